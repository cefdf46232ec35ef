#ifndef DTCWT_TEST_ORACLES_HPP
#define DTCWT_TEST_ORACLES_HPP

// Independent brute-force references for the transform kernels. Everything
// here is direct nested-loop evaluation of the frozen conventions -- no
// polyphase or separability shortcuts -- so agreement with the library is
// meaningful.

#include <complex>
#include <vector>

#include "dtcwt/array4d.hpp"
#include "dtcwt/filterbank.hpp"
#include "dtcwt/transform4d.hpp"

namespace oracle {

using dtcwt::FilterBank;
using dtcwt::PIotaBlock;
using dtcwt::Shape4;
using dtcwt::Volume4D;

int refl_half(int i, int n);
int wrap(int i, int n);

/// Level-1 P block for one configuration: full-rate centered correlation per
/// dimension followed by the even/odd polyphase split, times the analysis gain.
PIotaBlock brute_level1(const Volume4D& v, const FilterBank& fb, int kappa, double gain);

/// Q-shift P block for one configuration from the interleaved scaling array.
PIotaBlock brute_qshift(const Volume4D& w, const FilterBank& fb, int kappa);

/// Branch factor of P_iota in psi_zeta by literal complex multiplication of
/// the per-dimension imaginary units (zeta, iota zero-based).
std::complex<double> symbolic_orthant_factor(int zeta, int iota);

/// 1D circular decimated DWT step (analysis), y[m] = sum h[k] x[(2m+k)%n].
std::vector<double> dwt1d_analyze(const std::vector<double>& x, const std::vector<double>& h);

Volume4D random_volume(const Shape4& s, unsigned long long seed);
double rel_err(const Volume4D& a, const Volume4D& b);

}  // namespace oracle

#endif
