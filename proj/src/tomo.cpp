#include "dtcwt/tomo.hpp"

#include <cmath>
#include <stdexcept>

namespace dtcwt {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGoldenAngle = 1.9416110387254665;  // pi * (3 - sqrt(5))

/// Joseph-style ray enumeration for one 2D slice. The ray for detector bin s
/// is { p : <p, u> = o_s } with u = (-sin a, cos a); it is marched along the
/// axis most aligned with the ray direction and linearly interpolated across
/// the other. f(ix, iy, w) receives each pixel weight exactly once, in a
/// fixed order, so project/backproject built on it are exact transposes.
template <typename F>
void for_each_ray_weight(int nx, int ny, double px, int det, double ds, double theta, int bin, F&& f) {
    double c = std::cos(theta), s = std::sin(theta);
    double off = (bin - 0.5 * (det - 1)) * ds;
    // ray point: p(t) = t*(c,s) + off*(-s,c)
    if (std::abs(c) >= std::abs(s)) {
        double step = px / std::abs(c);
        for (int i = 0; i < nx; ++i) {
            double x = (i - 0.5 * (nx - 1)) * px;
            double t = (x + off * s) / c;
            double y = t * s + off * c;
            double jf = y / px + 0.5 * (ny - 1);
            int j0 = static_cast<int>(std::floor(jf));
            double w1 = jf - j0;
            if (j0 >= 0 && j0 < ny && w1 < 1.0) f(i, j0, step * (1.0 - w1));
            if (j0 + 1 >= 0 && j0 + 1 < ny && w1 > 0.0) f(i, j0 + 1, step * w1);
        }
    } else {
        double step = px / std::abs(s);
        for (int j = 0; j < ny; ++j) {
            double y = (j - 0.5 * (ny - 1)) * px;
            double t = (y - off * c) / s;
            double x = t * c - off * s;
            double jf = x / px + 0.5 * (nx - 1);
            int i0 = static_cast<int>(std::floor(jf));
            double w1 = jf - i0;
            if (i0 >= 0 && i0 < nx && w1 < 1.0) f(i0, j, step * (1.0 - w1));
            if (i0 + 1 >= 0 && i0 + 1 < nx && w1 > 0.0) f(i0 + 1, j, step * w1);
        }
    }
}

}  // namespace

void Geometry::validate() const {
    if (nx <= 0 || ny <= 0 || nz <= 0 || nt <= 0 || det_count <= 0)
        throw std::invalid_argument("geometry extents must be positive");
    if (static_cast<int>(angles.size()) != nt)
        throw std::invalid_argument("geometry needs one angle list per time step");
    for (const auto& a : angles)
        if (a.empty()) throw std::invalid_argument("every time step needs at least one angle");
    double diag = std::hypot(nx * pixel_size, ny * pixel_size);
    if (det_count * det_spacing < diag)
        throw std::invalid_argument("detector does not cover the slice diagonal (" +
                                    std::to_string(det_count * det_spacing) + " < " +
                                    std::to_string(diag) + ")");
}

long long Geometry::total_rays() const {
    long long n = 0;
    for (const auto& a : angles) n += static_cast<long long>(a.size()) * nz * det_count;
    return n;
}

Geometry Geometry::uniform(int nx, int ny, int nz, int nt, int det_count, int n_angles) {
    Geometry g;
    g.nx = nx; g.ny = ny; g.nz = nz; g.nt = nt;
    g.det_count = det_count;
    g.angles.resize(static_cast<size_t>(nt));
    for (int t = 0; t < nt; ++t) {
        g.angles[static_cast<size_t>(t)].resize(static_cast<size_t>(n_angles));
        for (int a = 0; a < n_angles; ++a)
            g.angles[static_cast<size_t>(t)][static_cast<size_t>(a)] = kPi * a / n_angles;
    }
    return g;
}

Geometry Geometry::rotating(int nx, int ny, int nz, int nt, int det_count, int n_angles) {
    Geometry g = uniform(nx, ny, nz, nt, det_count, n_angles);
    for (int t = 0; t < nt; ++t)
        for (auto& a : g.angles[static_cast<size_t>(t)])
            a = std::fmod(a + t * kGoldenAngle, kPi);
    return g;
}

size_t ProjectionData::offset(int t, int a, int z, int bin) const {
    size_t off = 0;
    for (int tt = 0; tt < t; ++tt)
        off += static_cast<size_t>(geom.angles_at(tt)) * static_cast<size_t>(geom.nz) *
               static_cast<size_t>(geom.det_count);
    off += (static_cast<size_t>(a) * static_cast<size_t>(geom.nz) + static_cast<size_t>(z)) *
               static_cast<size_t>(geom.det_count) +
           static_cast<size_t>(bin);
    return off;
}

double& ProjectionData::at(int t, int a, int z, int bin) { return data[offset(t, a, z, bin)]; }
double ProjectionData::at(int t, int a, int z, int bin) const { return data[offset(t, a, z, bin)]; }

double ProjectionData::norm2() const {
    double s = 0;
    for (double v : data) s += v * v;
    return std::sqrt(s);
}

ProjectionData project(const Volume4D& v, const Geometry& g) {
    g.validate();
    if (v.shape() != Shape4{g.nx, g.ny, g.nz, g.nt})
        throw std::invalid_argument("volume extents " + shape_str(v.shape()) +
                                    " do not match geometry (" + std::to_string(g.nx) + "," +
                                    std::to_string(g.ny) + "," + std::to_string(g.nz) + "," +
                                    std::to_string(g.nt) + ")");
    ProjectionData p;
    p.geom = g;
    p.data.assign(static_cast<size_t>(g.total_rays()), 0.0);
    // parallel over (t, z); every ray writes its own output cell
    parallel_for(1LL * g.nt * g.nz, worker_threads(), [&](long long i) {
        int t = static_cast<int>(i / g.nz);
        int z = static_cast<int>(i % g.nz);
        for (int a = 0; a < g.angles_at(t); ++a) {
            double theta = g.angles[static_cast<size_t>(t)][static_cast<size_t>(a)];
            for (int bin = 0; bin < g.det_count; ++bin) {
                double s = 0;
                for_each_ray_weight(g.nx, g.ny, g.pixel_size, g.det_count, g.det_spacing, theta, bin,
                                    [&](int ix, int iy, double w) { s += w * v.at(ix, iy, z, t); });
                p.at(t, a, z, bin) = s;
            }
        }
    });
    return p;
}

Volume4D backproject(const ProjectionData& p, const Geometry& g) {
    g.validate();
    if (p.data.size() != static_cast<size_t>(g.total_rays()))
        throw std::invalid_argument("projection data size does not match geometry");
    Volume4D v(Shape4{g.nx, g.ny, g.nz, g.nt});
    parallel_for(1LL * g.nt * g.nz, worker_threads(), [&](long long i) {
        int t = static_cast<int>(i / g.nz);
        int z = static_cast<int>(i % g.nz);
        for (int a = 0; a < g.angles_at(t); ++a) {
            double theta = g.angles[static_cast<size_t>(t)][static_cast<size_t>(a)];
            for (int bin = 0; bin < g.det_count; ++bin) {
                double val = p.at(t, a, z, bin);
                for_each_ray_weight(g.nx, g.ny, g.pixel_size, g.det_count, g.det_spacing, theta, bin,
                                    [&](int ix, int iy, double w) { v.at(ix, iy, z, t) += w * val; });
            }
        }
    });
    return v;
}

OperatorNormResult operator_norm_sq(const Geometry& g, const Shape4& extents, unsigned long long seed,
                                    double tol, int max_iters) {
    g.validate();
    GaussianSampler gauss(seed);
    Volume4D v(extents);
    for (auto& x : v.vec()) x = gauss();
    OperatorNormResult res;
    double prev = 0;
    for (int it = 1; it <= max_iters; ++it) {
        double nv = norm2(v);
        if (nv == 0) throw std::runtime_error("power iteration started in the null space");
        v *= 1.0 / nv;
        Volume4D av = backproject(project(v, g), g);
        double lambda = dot(v, av);
        res.value = lambda;
        res.iterations = it;
        res.residual = std::abs(lambda - prev) / std::max(std::abs(lambda), 1e-300);
        if (it > 1 && res.residual < tol) {
            res.converged = true;
            break;
        }
        prev = lambda;
        v = std::move(av);
    }
    return res;
}

Geometry fine_geometry(const Geometry& g) {
    Geometry f = g;
    f.nx = 2 * g.nx;
    f.ny = 2 * g.ny;
    f.pixel_size = 0.5 * g.pixel_size;
    f.det_count = 2 * g.det_count;
    f.det_spacing = 0.5 * g.det_spacing;
    return f;
}

ProjectionData simulate_measurements(const Volume4D& phantom_fine, const Geometry& g, double noise_rel,
                                     unsigned long long seed) {
    Geometry fg = fine_geometry(g);
    if (phantom_fine.shape() != Shape4{fg.nx, fg.ny, fg.nz, fg.nt})
        throw std::invalid_argument("phantom must be sampled at exactly 2x the x,y resolution: expected " +
                                    shape_str(Shape4{fg.nx, fg.ny, fg.nz, fg.nt}) + ", got " +
                                    shape_str(phantom_fine.shape()));
    ProjectionData fine = project(phantom_fine, fg);
    ProjectionData out;
    out.geom = g;
    out.data.assign(static_cast<size_t>(g.total_rays()), 0.0);
    for (int t = 0; t < g.nt; ++t)
        for (int a = 0; a < g.angles_at(t); ++a)
            for (int z = 0; z < g.nz; ++z)
                for (int bin = 0; bin < g.det_count; ++bin)
                    out.at(t, a, z, bin) =
                        0.5 * (fine.at(t, a, z, 2 * bin) + fine.at(t, a, z, 2 * bin + 1));
    if (noise_rel > 0) {
        double mx = 0;
        for (double v : out.data) mx = std::max(mx, std::abs(v));
        double sigma = noise_rel * mx;
        GaussianSampler gauss(seed);
        for (auto& v : out.data) v += sigma * gauss();
    }
    return out;
}

}  // namespace dtcwt
