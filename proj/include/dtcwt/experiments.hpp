#ifndef DTCWT_EXPERIMENTS_HPP
#define DTCWT_EXPERIMENTS_HPP

#include <array>
#include <string>
#include <vector>

#include "dtcwt/array4d.hpp"
#include "dtcwt/filterbank.hpp"
#include "dtcwt/transform4d.hpp"

namespace dtcwt {

/// Shift-invariance comparison: a Gaussian blob translated by one sample
/// along +-x, +-y, +-z, +-t; per-subband magnitude energies at the coarsest
/// level; coefficient of variation across the 8 shifts, averaged over the
/// energetic subbands of each transform.
struct ShiftInvarianceResult {
    double cov_dtcwt = 0;
    double cov_dwt = 0;
    /// rows: subband id, mean energy, cov (dtcwt block first, then dwt)
    std::vector<std::vector<double>> table;
};
ShiftInvarianceResult shift_invariance_experiment(const FilterBank& fb, const Shape4& extents, int levels,
                                                  double sigma, const std::string& wavelet = "db2");

/// Directional selectivity: for each orthant a real plane wave with wave
/// vector strictly inside that orthant's frequency region at the coarsest
/// scale; fraction of coarsest-level energy of the matching configuration
/// landing in the matching orthant subband.
struct DirectionalityResult {
    std::array<double, 8> matched_fraction{};
    double min_fraction = 0;
};
DirectionalityResult directionality_experiment(const FilterBank& fb, const Shape4& extents, int levels);

/// Tight-frame measurement: energy ratio |Cf|^2/|f|^2 over n random volumes.
struct FrameMeasurement {
    double mean = 0;
    double rel_std = 0;
    std::vector<double> ratios;
};
FrameMeasurement frame_constant_measurement(const FilterBank& fb, const Shape4& extents,
                                            const TransformOptions& opt, int n_volumes,
                                            unsigned long long seed);

}  // namespace dtcwt

#endif
