#ifndef DTCWT_TRANSFORM4D_HPP
#define DTCWT_TRANSFORM4D_HPP

#include <array>
#include <string>
#include <vector>

#include "dtcwt/array4d.hpp"
#include "dtcwt/filterbank.hpp"

namespace dtcwt {

/// Largest J with 2^J <= min extent. Extents must be positive and even.
int max_levels(const Shape4& extents);

/// The 16 real partial transforms of one filter configuration. Bit d of the
/// index (bit0=x .. bit3=t) set means dimension d used tree b.
struct PIotaBlock {
    std::array<Volume4D, 16> p;
    const Shape4& shape() const { return p[0].shape(); }
};

/// One decomposition step: the scaling block (configuration LLLL) plus the 15
/// wavelet configurations. Configuration kappa bit d set = high-pass in dim d.
struct AnalysisBlocks {
    PIotaBlock scaling;
    std::array<PIotaBlock, 15> details;  // index kappa-1
};

/// Analysis gain applied once at level 1 (and transposed in the adjoint);
/// it sets the frame constant to 4, i.e. operator norm 2, for banks whose
/// level-1 pair is power complementary.
inline constexpr double kLevel1Gain = 1.4142135623730950488;

/// Level 1: full-rate filtering with the biorthogonal pair; tree a / tree b
/// are the even / odd output phases per dimension.
AnalysisBlocks analyze_level1(const Volume4D& v, const FilterBank& fb, double gain = kLevel1Gain);

/// Levels >= 2: input is the interleaved scaling array of the previous level;
/// per dimension, tree a/b q-shift filtering decimated by 2 (on each tree's
/// own sub-grid). Every extent of the input must be divisible by 4.
AnalysisBlocks analyze_qshift(const Volume4D& interleaved_scaling, const FilterBank& fb);

/// Complex orthant subbands from a P-block: psi_zeta = 1/2 sum_iota
/// (prod_{d in b(iota)} I_d(zeta)) P_iota with I_t = +i and the remaining
/// signs indexed by zeta = 1..8 (array position zeta-1).
std::array<ComplexArray4D, 8> combine_orthants(const PIotaBlock& p);

enum class SplitNormalization { kInverse, kAdjoint };  // factor 1/4 vs 1/2

/// Signed sums over orthants of the real or imaginary parts, recovering the
/// 16 P_iota terms.
PIotaBlock split_orthants(const std::array<ComplexArray4D, 8>& c, SplitNormalization norm);

/// Scaling storage between levels: sample at parity (e_x..e_t) comes from the
/// P_iota with tree b exactly on the odd-parity dimensions. Output extents 2x.
Volume4D interleave_scaling(const PIotaBlock& p);
PIotaBlock deinterleave_scaling(const Volume4D& w);

enum class Normalization { kStandard, kParseval };

struct TransformOptions {
    int levels = 1;
    bool include_level1_details = true;
    Normalization normalization = Normalization::kStandard;
};

struct Coeffs4D {
    int levels = 0;
    Shape4 original_extents{0, 0, 0, 0};
    std::string filter_bank;
    bool level1_details_included = true;
    Normalization normalization = Normalization::kStandard;
    /// subbands[j-1][kappa-1][zeta-1]; level-1 arrays are empty when details
    /// were not included.
    std::vector<std::array<std::array<ComplexArray4D, 8>, 15>> subbands;
    std::array<ComplexArray4D, 8> final_scaling;

    Shape4 subband_shape(int level) const;
    long long total_complex_count() const;
};

Coeffs4D forward(const Volume4D& v, const FilterBank& fb, const TransformOptions& opt);

/// Exact inverse. Coefficients missing level-1 details reconstruct only with
/// allow_lossy (zeros substituted, per the speed option of the construction).
Volume4D inverse(const Coeffs4D& c, const FilterBank& fb, bool allow_lossy = false);

/// Synthesis with decomposition normalization: identical pipeline to the
/// inverse except the orthant split uses 1/2 and level 1 uses the
/// time-reversed analysis filters. Interior-exact transpose of forward();
/// boundary handling makes it approximate.
Volume4D adjoint(const Coeffs4D& c, const FilterBank& fb);

// --- coefficient-space helpers (solver, tests) ---

/// Visits every stored complex subband including the final scaling block.
void for_each_subband(Coeffs4D& c, const std::function<void(ComplexArray4D&)>& fn);
void for_each_subband(const Coeffs4D& c, const std::function<void(const ComplexArray4D&)>& fn);

double coeffs_energy(const Coeffs4D& c);
/// Real part of the Hermitian inner product.
double coeffs_dot(const Coeffs4D& a, const Coeffs4D& b);
Coeffs4D coeffs_like(const Coeffs4D& c);  // same layout, zeroed

struct PowerIterationResult {
    double eigenvalue = 0.0;
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;
};

/// Power iteration on v -> adjoint(forward(v)), the normal operator of the
/// transform. Deterministic under seed.
PowerIterationResult transform_normal_eigenvalue(const FilterBank& fb, const Shape4& extents,
                                                 const TransformOptions& opt, unsigned long long seed,
                                                 double tol = 1e-4, int max_iters = 60);

}  // namespace dtcwt

#endif
