#ifndef DTCWT_SOLVER_HPP
#define DTCWT_SOLVER_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtcwt/array4d.hpp"
#include "dtcwt/dwt4d.hpp"
#include "dtcwt/tomo.hpp"
#include "dtcwt/transform4d.hpp"

namespace dtcwt {

enum class SparsifierKind { kDtcwt, kDwt };

struct SolverConfig {
    double gamma = 0.0;   // primal step; 0 -> 1.9 / lambda_max(A^T A)
    double lambda = 0.0;  // dual step; 0 -> 1 / lambda_max(CC*) (1.0 for the orthonormal DWT)
    double mu0 = 0.0;     // initial regularization weight; 0 -> scale-aware default
    double target_sparsity = 0.6;
    double controller_gain = 0.3;
    double controller_tol = 0.01;
    int freeze_after = 5;  // consecutive in-tolerance iterations before mu freezes
    double mu_min = 1e-12, mu_max = 1e12;
    int max_iterations = 70;
    double stop_tol = 1e-5;
    SparsifierKind sparsifier = SparsifierKind::kDtcwt;
    int levels = 2;
    bool include_level1_details = true;
    bool parseval = false;
    bool sparsity_includes_scaling = false;
    std::string bank = "nearsym13_19+qshift14";
    std::string wavelet = "db2";
    unsigned long long seed = 1;
};

SolverConfig parse_solver_config(const std::string& path);

/// Magnitude shrinkage preserving phase: max{0, |v|-tau} e^{i arg v}.
std::vector<std::complex<double>> radial_soft_threshold(const std::vector<std::complex<double>>& v,
                                                        double tau);

struct DivergenceError : std::runtime_error {
    explicit DivergenceError(int it)
        : std::runtime_error("PDFP diverged (non-finite iterate) at iteration " + std::to_string(it)),
          iteration(it) {}
    int iteration;
};

/// Proportional multiplicative controller: mu * (1 + K (d_target - achieved)),
/// clamped to [mu_min, mu_max]. The freeze rule lives in the iteration loop.
double update_mu(double mu, double achieved_sparsity, const SolverConfig& cfg);

struct PdfpHistoryRow {
    int iteration = 0;
    double objective = 0, misfit = 0, l1 = 0, sparsity = 0, mu = 0, rel_change = 0;
};

struct ConvergenceReport {
    std::vector<PdfpHistoryRow> rows;
    double gamma = 0, lambda = 0;
    double operator_norm_sq = 0;      // lambda_max(A^T A) used for gamma
    double transform_eigenvalue = 0;  // lambda_max(CC*) used for lambda
    int iterations = 0;
    bool mu_frozen = false;
    std::string stop_reason;
};

/// Flattened complex coefficient vector; entries from scaling_begin onward
/// are the final scaling band (excluded from the sparsity measure by default).
struct CoefVec {
    std::vector<std::complex<double>> v;
    size_t scaling_begin = 0;
};

/// Operators and resolved parameters for one reconstruction problem.
class PdfpContext {
public:
    PdfpContext(const Geometry& g, const SolverConfig& cfg);

    CoefVec analyze(const Volume4D& f) const;
    Volume4D synthesize(const CoefVec& c) const;  // C* (adjoint for dtcwt, inverse for dwt)
    Volume4D backproject_residual(const Volume4D& f, const ProjectionData& m) const;  // A^T(Af - m)
    double misfit(const Volume4D& f, const ProjectionData& m) const;                  // 0.5 |Af - m|^2

    const SolverConfig& config() const { return cfg_; }
    const Geometry& geometry() const { return geom_; }
    Shape4 volume_shape() const { return {geom_.nx, geom_.ny, geom_.nz, geom_.nt}; }
    double gamma() const { return gamma_; }
    double lambda() const { return lambda_; }
    double op_norm_sq() const { return op_norm_sq_; }
    double transform_eig() const { return transform_eig_; }
    double default_mu0(const ProjectionData& m) const;

    /// Fraction of post-threshold magnitudes below 1e-10 * max magnitude.
    double sparsity_of(const CoefVec& thresholded) const;

private:
    Geometry geom_;
    SolverConfig cfg_;
    FilterBank fb_;
    TransformOptions topt_;
    double gamma_ = 0, lambda_ = 0, op_norm_sq_ = 0, transform_eig_ = 0;
    Coeffs4D coeff_template_;
    DwtCoeffs4D dwt_template_;
    friend struct CoefLayout;
};

struct PdfpState {
    Volume4D f;  // primal iterate
    Volume4D d;  // intermediate projected point
    CoefVec v;   // dual variable
    double mu = 0;
    int iteration = 0;
    int in_tolerance_streak = 0;
    bool mu_frozen = false;
    std::vector<PdfpHistoryRow> history;
};

PdfpState pdfp_init(const PdfpContext& ctx, double mu0);

/// One exact PDFP update (d, v, f), non-negativity projected, re-using the
/// same data gradient for the d- and f-updates. Appends one history row.
void pdfp_step(PdfpState& state, const PdfpContext& ctx, const ProjectionData& m);

std::pair<Volume4D, ConvergenceReport> solve(const ProjectionData& m, const Geometry& g,
                                             const SolverConfig& cfg);

struct Metrics {
    double relative_error = 0;
    double psnr = 0;
};

/// PSNR peak convention: max of the reference; identical volumes report the
/// capped sentinel 999 dB.
Metrics metrics(const Volume4D& recon, const Volume4D& reference);

}  // namespace dtcwt

#endif
