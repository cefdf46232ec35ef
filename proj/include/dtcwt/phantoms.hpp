#ifndef DTCWT_PHANTOMS_HPP
#define DTCWT_PHANTOMS_HPP

#include <string>
#include <utility>
#include <vector>

#include "dtcwt/array4d.hpp"

namespace dtcwt {

struct PhantomSpec {
    enum class Kind { kGrowingBall, kDynamicEllipsoids };
    Kind kind = Kind::kGrowingBall;
    Shape4 extents{32, 32, 32, 8};
    // growing ball: radius schedule in voxels, linear from start to end
    double radius_start = 4.0;
    double radius_end = 10.0;
    // dynamic ellipsoids: squeeze/stretch amplitude and period (time steps)
    double amplitude = 0.08;
    double period = 0.0;  // 0 -> N_t (periodic over the whole interval)
    double intensity = 1.0;
    int supersampling = 2;
};

PhantomSpec parse_phantom_spec(const std::string& path);
void save_phantom_spec(const PhantomSpec& spec, const std::string& path);

/// Frames at arbitrary (possibly fractional) time positions; the main
/// generators call this at integer steps. Used for periodicity checks and
/// the intra-step motion mode.
Volume4D phantom_at_times(const PhantomSpec& spec, const std::vector<double>& times);

Volume4D growing_ball(const PhantomSpec& spec);
Volume4D dynamic_ellipsoids(const PhantomSpec& spec);
Volume4D make_phantom(const PhantomSpec& spec);

/// (fine at 2x x,y resolution, coarse at target resolution); coarse is the
/// exact 2x2 block average of fine.
std::pair<Volume4D, Volume4D> fine_and_coarse(const PhantomSpec& spec);

Volume4D block_average_xy(const Volume4D& fine);

}  // namespace dtcwt

#endif
