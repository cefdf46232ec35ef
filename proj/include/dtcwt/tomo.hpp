#ifndef DTCWT_TOMO_HPP
#define DTCWT_TOMO_HPP

#include <string>
#include <vector>

#include "dtcwt/array4d.hpp"

namespace dtcwt {

/// Desk-scale dynamic parallel-beam geometry: per z-slice 2D ray transform,
/// block-diagonal over time with a per-time-step angle schedule.
struct Geometry {
    int nx = 0, ny = 0, nz = 0, nt = 0;
    int det_count = 0;
    double det_spacing = 1.0;
    double pixel_size = 1.0;
    std::vector<std::vector<double>> angles;  // [t][angle], radians

    void validate() const;
    int angles_at(int t) const { return static_cast<int>(angles[static_cast<size_t>(t)].size()); }
    long long total_rays() const;

    /// Same angle list for every time step.
    static Geometry uniform(int nx, int ny, int nz, int nt, int det_count, int n_angles);
    /// Golden-angle offset added per time step (measurement during rotation).
    static Geometry rotating(int nx, int ny, int nz, int nt, int det_count, int n_angles);
};

struct ProjectionData {
    Geometry geom;
    std::vector<double> data;  // [t][angle][z][bin], bin fastest

    double& at(int t, int a, int z, int bin);
    double at(int t, int a, int z, int bin) const;
    size_t offset(int t, int a, int z, int bin) const;
    double norm2() const;
};

ProjectionData project(const Volume4D& v, const Geometry& g);
Volume4D backproject(const ProjectionData& p, const Geometry& g);

struct OperatorNormResult {
    double value = 0.0;  // lambda_max(A^T A)
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;
};

/// Power-iteration estimate of lambda_max(A^T A), relative tolerance 1e-3.
OperatorNormResult operator_norm_sq(const Geometry& g, const Shape4& extents,
                                    unsigned long long seed = 7, double tol = 1e-3,
                                    int max_iters = 300);

/// Anti-inverse-crime measurement simulation: project a phantom sampled at
/// twice the x,y resolution, average detector-bin pairs down to the target
/// geometry, then add Gaussian noise with std = noise_rel * max datum.
ProjectionData simulate_measurements(const Volume4D& phantom_fine, const Geometry& g,
                                     double noise_rel, unsigned long long seed);

/// Fine-grid counterpart of g used inside simulate_measurements (2x pixels
/// and detector bins at half spacing).
Geometry fine_geometry(const Geometry& g);

}  // namespace dtcwt

#endif
