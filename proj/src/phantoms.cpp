#include "dtcwt/phantoms.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dtcwt {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

struct Ellipsoid {
    double cx, cy, cz;  // center, normalized [-1,1] coordinates
    double ax, ay, az;  // semi-axes
    double value;       // additive intensity
};

// Six nested ellipsoids with Shepp-Logan-like contrast; intensities sum
// non-negatively everywhere and everything stays inside the unit ball with
// margin for the deformation amplitude.
const Ellipsoid kEllipsoids[] = {
    {0.00, 0.00, 0.00, 0.72, 0.90, 0.85, 1.00},
    {0.00, 0.00, 0.00, 0.65, 0.82, 0.78, -0.60},
    {-0.25, 0.18, 0.00, 0.25, 0.32, 0.30, 0.35},
    {0.25, 0.18, 0.05, 0.18, 0.28, 0.25, -0.22},
    {0.00, -0.42, -0.12, 0.10, 0.10, 0.12, 0.50},
    {0.08, -0.05, 0.35, 0.08, 0.07, 0.09, 0.30},
};

// Whole-phantom squeeze/stretch: per-dimension phase offsets so one axis
// stretches while another squeezes.
const double kPhase[3] = {0.0, 3.14159265358979323846, 1.57079632679489661923};

double ellipsoid_field(double x, double y, double z, double t_steps, double amplitude, double period,
                       double intensity) {
    double s[3];
    for (int d = 0; d < 3; ++d) s[d] = 1.0 + amplitude * std::sin(kTwoPi * t_steps / period + kPhase[d]);
    double px = x / s[0], py = y / s[1], pz = z / s[2];
    double v = 0;
    for (const auto& e : kEllipsoids) {
        double dx = (px - e.cx) / e.ax, dy = (py - e.cy) / e.ay, dz = (pz - e.cz) / e.az;
        if (dx * dx + dy * dy + dz * dz <= 1.0) v += e.value;
    }
    return intensity * v;
}

double ball_field(double x, double y, double z, double r_norm) {
    return (x * x + y * y + z * z <= r_norm * r_norm) ? 1.0 : 0.0;
}

}  // namespace

Volume4D phantom_at_times(const PhantomSpec& spec, const std::vector<double>& times) {
    const Shape4& s = spec.extents;
    for (int d = 0; d < 4; ++d)
        if (s[d] <= 0 || s[d] % 2 != 0)
            throw std::invalid_argument("phantom extents must be positive and even: " + shape_str(s));
    if (spec.supersampling < 1) throw std::invalid_argument("supersampling must be >= 1");
    int nt = static_cast<int>(times.size());
    double halfmin = 0.5 * std::min(s[0], std::min(s[1], s[2]));
    double period = spec.period > 0 ? spec.period : static_cast<double>(s[3]);
    if (spec.kind == PhantomSpec::Kind::kGrowingBall) {
        double rmax = std::max(spec.radius_start, spec.radius_end);
        if (rmax > halfmin)
            throw std::invalid_argument("ball radius " + std::to_string(rmax) +
                                        " exceeds half the smallest spatial extent " +
                                        std::to_string(halfmin));
        if (spec.radius_end < spec.radius_start)
            throw std::invalid_argument("growing ball requires a non-decreasing radius schedule");
    } else {
        double grow = 1.0 + std::abs(spec.amplitude);
        for (const auto& e : kEllipsoids) {
            if ((std::abs(e.cx) + e.ax) * grow > 1.0 || (std::abs(e.cy) + e.ay) * grow > 1.0 ||
                (std::abs(e.cz) + e.az) * grow > 1.0)
                throw std::invalid_argument("deformation amplitude " + std::to_string(spec.amplitude) +
                                            " pushes an ellipsoid outside the grid");
        }
    }

    Volume4D out(Shape4{s[0], s[1], s[2], nt});
    int ss = spec.supersampling;
    double inv = 1.0 / (ss * ss * ss);
    parallel_for(nt, worker_threads(), [&](long long ti) {
        double t = times[static_cast<size_t>(ti)];
        double r_norm = 0;
        if (spec.kind == PhantomSpec::Kind::kGrowingBall) {
            double frac = s[3] > 1 ? t / (s[3] - 1) : 0.0;
            double r = spec.radius_start + (spec.radius_end - spec.radius_start) * frac;
            r_norm = r / halfmin;
        }
        for (int z = 0; z < s[2]; ++z)
            for (int y = 0; y < s[1]; ++y)
                for (int x = 0; x < s[0]; ++x) {
                    double acc = 0;
                    for (int sz = 0; sz < ss; ++sz)
                        for (int sy = 0; sy < ss; ++sy)
                            for (int sx = 0; sx < ss; ++sx) {
                                // supersample point in normalized [-1,1] coords
                                double px = ((x + (sx + 0.5) / ss) / s[0]) * 2.0 - 1.0;
                                double py = ((y + (sy + 0.5) / ss) / s[1]) * 2.0 - 1.0;
                                double pz = ((z + (sz + 0.5) / ss) / s[2]) * 2.0 - 1.0;
                                if (spec.kind == PhantomSpec::Kind::kGrowingBall)
                                    acc += spec.intensity * ball_field(px, py, pz, r_norm);
                                else
                                    acc += ellipsoid_field(px, py, pz, t, spec.amplitude, period,
                                                           spec.intensity);
                            }
                    out.at(x, y, z, static_cast<int>(ti)) = acc * inv;
                }
    });
    return out;
}

Volume4D growing_ball(const PhantomSpec& spec) {
    std::vector<double> times(static_cast<size_t>(spec.extents[3]));
    for (size_t t = 0; t < times.size(); ++t) times[t] = static_cast<double>(t);
    return phantom_at_times(spec, times);
}

Volume4D dynamic_ellipsoids(const PhantomSpec& spec) {
    std::vector<double> times(static_cast<size_t>(spec.extents[3]));
    for (size_t t = 0; t < times.size(); ++t) times[t] = static_cast<double>(t);
    return phantom_at_times(spec, times);
}

Volume4D make_phantom(const PhantomSpec& spec) {
    return spec.kind == PhantomSpec::Kind::kGrowingBall ? growing_ball(spec) : dynamic_ellipsoids(spec);
}

Volume4D block_average_xy(const Volume4D& fine) {
    const Shape4& fs = fine.shape();
    if (fs[0] % 2 != 0 || fs[1] % 2 != 0)
        throw std::invalid_argument("block average needs even x,y extents");
    Volume4D out(Shape4{fs[0] / 2, fs[1] / 2, fs[2], fs[3]});
    for (int t = 0; t < fs[3]; ++t)
        for (int z = 0; z < fs[2]; ++z)
            for (int y = 0; y < fs[1] / 2; ++y)
                for (int x = 0; x < fs[0] / 2; ++x)
                    out.at(x, y, z, t) = 0.25 * (fine.at(2 * x, 2 * y, z, t) + fine.at(2 * x + 1, 2 * y, z, t) +
                                                 fine.at(2 * x, 2 * y + 1, z, t) + fine.at(2 * x + 1, 2 * y + 1, z, t));
    return out;
}

std::pair<Volume4D, Volume4D> fine_and_coarse(const PhantomSpec& spec) {
    PhantomSpec fine_spec = spec;
    fine_spec.extents[0] *= 2;
    fine_spec.extents[1] *= 2;
    Volume4D fine = make_phantom(fine_spec);
    Volume4D coarse = block_average_xy(fine);
    return {std::move(fine), std::move(coarse)};
}

PhantomSpec parse_phantom_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open phantom spec: " + path);
    PhantomSpec spec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        auto need = [&](double& dst) {
            if (!(ss >> dst))
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected a number");
        };
        if (key == "kind") {
            std::string v;
            ss >> v;
            if (v == "growing_ball") spec.kind = PhantomSpec::Kind::kGrowingBall;
            else if (v == "dynamic_ellipsoids") spec.kind = PhantomSpec::Kind::kDynamicEllipsoids;
            else throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown kind " + v);
        } else if (key == "extents") {
            for (int d = 0; d < 4; ++d)
                if (!(ss >> spec.extents[d]))
                    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": extents needs 4 ints");
        } else if (key == "radius_start") need(spec.radius_start);
        else if (key == "radius_end") need(spec.radius_end);
        else if (key == "amplitude") need(spec.amplitude);
        else if (key == "period") need(spec.period);
        else if (key == "intensity") need(spec.intensity);
        else if (key == "supersampling") {
            if (!(ss >> spec.supersampling))
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected an int");
        } else {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key " + key);
        }
    }
    return spec;
}

void save_phantom_spec(const PhantomSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write phantom spec: " + path);
    out << "kind " << (spec.kind == PhantomSpec::Kind::kGrowingBall ? "growing_ball" : "dynamic_ellipsoids")
        << "\n";
    out << "extents " << spec.extents[0] << " " << spec.extents[1] << " " << spec.extents[2] << " "
        << spec.extents[3] << "\n";
    out << "radius_start " << spec.radius_start << "\nradius_end " << spec.radius_end << "\n";
    out << "amplitude " << spec.amplitude << "\nperiod " << spec.period << "\n";
    out << "intensity " << spec.intensity << "\nsupersampling " << spec.supersampling << "\n";
}

}  // namespace dtcwt
