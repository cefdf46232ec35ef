#ifndef DTCWT_DWT4D_HPP
#define DTCWT_DWT4D_HPP

#include <array>
#include <string>
#include <vector>

#include "dtcwt/array4d.hpp"

namespace dtcwt {

/// Real-valued separable orthogonal 4D DWT, periodic extension. Comparison
/// baseline for the complex transform.
struct DwtCoeffs4D {
    int levels = 0;
    Shape4 original_extents{0, 0, 0, 0};
    std::string wavelet;
    std::vector<std::array<Volume4D, 15>> details;  // [j-1][kappa-1]
    Volume4D approx;                                // final LLLL

    Shape4 subband_shape(int level) const;
};

std::vector<std::string> dwt_wavelet_names();

DwtCoeffs4D dwt_forward(const Volume4D& v, int levels, const std::string& wavelet = "db2");
Volume4D dwt_inverse(const DwtCoeffs4D& c, const std::string& wavelet = "db2");

void for_each_subband(DwtCoeffs4D& c, const std::function<void(Volume4D&)>& fn);
void for_each_subband(const DwtCoeffs4D& c, const std::function<void(const Volume4D&)>& fn);

/// Analysis/synthesis pair used internally; exposed for oracle tests.
struct DwtFilters {
    std::vector<double> lo;
    std::vector<double> hi;
};
DwtFilters dwt_filters(const std::string& wavelet);

}  // namespace dtcwt

#endif
