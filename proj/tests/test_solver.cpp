#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dtcwt/phantoms.hpp"
#include "dtcwt/solver.hpp"
#include "oracles.hpp"

using namespace dtcwt;

namespace {

// theta = 0 geometry whose rays sum whole x-rows; two detector bins hit the
// two image rows with unit weights, the rest miss
Geometry row_sum_geometry() {
    Geometry g;
    g.nx = 4;
    g.ny = 2;
    g.nz = 2;
    g.nt = 2;
    g.det_count = 6;
    g.angles.assign(2, {0.0});
    return g;
}

}  // namespace

TEST_CASE("radial soft-thresholding: formula, kill zone, identity at zero") {
    using C = std::complex<double>;
    std::vector<C> v = {std::polar(3.0, M_PI / 4), std::polar(0.8, -2.0), C(0.0, 0.0)};
    auto out = radial_soft_threshold(v, 1.0);
    CHECK(std::abs(out[0] - std::polar(2.0, M_PI / 4)) < 1e-14);
    CHECK(out[1] == C(0.0, 0.0));  // |v| <= tau -> 0
    CHECK(out[2] == C(0.0, 0.0));
    auto id = radial_soft_threshold(v, 0.0);
    for (size_t i = 0; i < v.size(); ++i) CHECK(std::abs(id[i] - v[i]) < 1e-15);
    CHECK_THROWS_AS(radial_soft_threshold(v, -0.1), std::invalid_argument);
}

TEST_CASE("thresholding residual identity S(u) + (I-S)(u) = u") {
    GaussianSampler g(4);
    std::vector<std::complex<double>> u(500);
    for (auto& x : u) x = {g(), g()};
    auto s = radial_soft_threshold(u, 0.7);
    double worst = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        std::complex<double> resid = u[i] - s[i];  // (I-S)(u)
        worst = std::max(worst, std::abs(s[i] + resid - u[i]));
    }
    CHECK(worst < 1e-14);
}

TEST_CASE("update_mu: zero error keeps mu; too-dense coefficients raise mu") {
    SolverConfig cfg;
    cfg.target_sparsity = 0.6;
    cfg.controller_gain = 0.5;
    CHECK(update_mu(2.0, 0.6, cfg) == doctest::Approx(2.0));
    CHECK(update_mu(2.0, 0.4, cfg) > 2.0);
    CHECK(update_mu(2.0, 0.9, cfg) < 2.0);
    cfg.mu_max = 2.1;
    CHECK(update_mu(2.0, 0.0, cfg) == doctest::Approx(2.1));  // clamped
}

TEST_CASE("zero data with zero initialization is a fixed point") {
    Geometry g = row_sum_geometry();
    ProjectionData m;
    m.geom = g;
    m.data.assign(static_cast<size_t>(g.total_rays()), 0.0);
    SolverConfig cfg;
    cfg.sparsifier = SparsifierKind::kDwt;
    cfg.levels = 1;
    cfg.max_iterations = 5;
    cfg.mu0 = 0.1;
    auto [vol, rep] = solve(m, g, cfg);
    CHECK(norm2(vol) == 0.0);
    for (const auto& r : rep.rows) CHECK(r.misfit == 0.0);
}

TEST_CASE("mu = 0 projected Landweber matches the per-channel scalar oracle") {
    Geometry g = row_sum_geometry();
    Shape4 s{4, 2, 2, 2};
    Volume4D truth(s, 1.0);
    ProjectionData m = project(truth, g);
    SolverConfig cfg;
    cfg.sparsifier = SparsifierKind::kDwt;
    cfg.levels = 1;
    cfg.max_iterations = 12;
    cfg.mu0 = 0.0;
    cfg.target_sparsity = 0.0;  // disables the controller/regularizer entirely
    cfg.stop_tol = 0.0;
    auto [vol, rep] = solve(m, g, cfg);
    // scalar model: each (y,z,t) channel sums nx pixels; S_{k+1} = S_k - gamma*nx*(S_k - m)
    // with f = S/nx spread uniformly; projection never activates (S_k >= 0)
    double gamma = rep.gamma;
    double S = 0;
    for (int k = 0; k < cfg.max_iterations; ++k) S = S - gamma * 4.0 * (S - 4.0);
    double expect_pixel = S / 4.0;
    double worst = 0;
    for (double x : vol.vec()) worst = std::max(worst, std::abs(x - expect_pixel));
    CHECK(worst < 1e-10);
    // misfit decreases monotonically for a quadratic with gamma < 2/L
    for (size_t i = 1; i < rep.rows.size(); ++i) CHECK(rep.rows[i].misfit <= rep.rows[i - 1].misfit + 1e-12);
}

TEST_CASE("objective is non-increasing after the burn-in on a small phantom run") {
    PhantomSpec spec;
    spec.kind = PhantomSpec::Kind::kDynamicEllipsoids;
    spec.extents = {16, 16, 8, 4};
    spec.amplitude = 0.08;
    spec.supersampling = 1;
    auto [fine, coarse] = fine_and_coarse(spec);
    Geometry g = Geometry::uniform(16, 16, 8, 4, 26, 10);
    ProjectionData m = simulate_measurements(fine, g, 0.02, 3);
    SolverConfig cfg;
    cfg.sparsifier = SparsifierKind::kDtcwt;
    cfg.levels = 1;
    cfg.max_iterations = 40;
    cfg.target_sparsity = 0.5;
    cfg.stop_tol = 0.0;
    auto [vol, rep] = solve(m, g, cfg);
    REQUIRE((int)rep.rows.size() == 40);
    for (size_t i = 6; i < rep.rows.size(); ++i) {
        // PDFP is not strictly monotone; allow 0.1% per-step slack
        CHECK(rep.rows[i].objective <= rep.rows[i - 1].objective * 1.001);
    }
    CHECK(metrics(vol, coarse).relative_error < 1.0);
}

TEST_CASE("solver determinism: identical config gives bitwise-identical output") {
    PhantomSpec spec;
    spec.kind = PhantomSpec::Kind::kGrowingBall;
    spec.extents = {8, 8, 8, 4};
    spec.radius_start = 2;
    spec.radius_end = 3;
    spec.supersampling = 1;
    auto [fine, coarse] = fine_and_coarse(spec);
    Geometry g = Geometry::uniform(8, 8, 8, 4, 14, 6);
    ProjectionData m = simulate_measurements(fine, g, 0.05, 11);
    SolverConfig cfg;
    cfg.sparsifier = SparsifierKind::kDtcwt;
    cfg.levels = 1;
    cfg.max_iterations = 6;
    auto [v1, r1] = solve(m, g, cfg);
    auto [v2, r2] = solve(m, g, cfg);
    CHECK(v1.vec() == v2.vec());
    REQUIRE(r1.rows.size() == r2.rows.size());
    for (size_t i = 0; i < r1.rows.size(); ++i) {
        CHECK(r1.rows[i].objective == r2.rows[i].objective);
        CHECK(r1.rows[i].mu == r2.rows[i].mu);
    }
}

TEST_CASE("divergence guard reports the iteration") {
    Geometry g = row_sum_geometry();
    Volume4D truth(Shape4{4, 2, 2, 2}, 1.0);
    ProjectionData m = project(truth, g);
    SolverConfig cfg;
    cfg.sparsifier = SparsifierKind::kDwt;
    cfg.levels = 1;
    cfg.gamma = 1e4;  // far outside (0, 2/L)
    cfg.lambda = 1.0;
    cfg.mu0 = 1e-6;
    cfg.max_iterations = 400;
    cfg.stop_tol = 0.0;
    try {
        solve(m, g, cfg);
        CHECK(false);
    } catch (const DivergenceError& e) {
        CHECK(e.iteration >= 1);
        CHECK(std::string(e.what()).find("iteration") != std::string::npos);
    }
}

TEST_CASE("metrics: exact, zero, and 10%-offset reconstructions") {
    Volume4D ref(Shape4{4, 4, 2, 2});
    GaussianSampler g(2);
    for (auto& x : ref.vec()) x = std::abs(g());
    Metrics same = metrics(ref, ref);
    CHECK(same.relative_error == 0.0);
    CHECK(same.psnr == 999.0);
    Volume4D zero(ref.shape());
    CHECK(metrics(zero, ref).relative_error == doctest::Approx(1.0));
    double peak = 0;
    for (double x : ref.vec()) peak = std::max(peak, x);
    Volume4D off = ref;
    for (auto& x : off.vec()) x += 0.1 * peak;
    CHECK(metrics(off, ref).psnr == doctest::Approx(20.0).epsilon(1e-12));
    CHECK_THROWS_AS(metrics(zero, zero), std::invalid_argument);
    CHECK_THROWS_AS(metrics(Volume4D(Shape4{2, 2, 2, 2}), ref), std::invalid_argument);
}

TEST_CASE("sparsifier swap changes only the dual bound and transform calls") {
    Geometry g = Geometry::uniform(8, 8, 4, 4, 14, 5);
    Volume4D truth = oracle::random_volume({8, 8, 4, 4}, 5);
    for (auto& x : truth.vec()) x = std::abs(x);
    ProjectionData m = project(truth, g);
    SolverConfig cfg;
    cfg.levels = 1;
    cfg.max_iterations = 3;
    cfg.sparsifier = SparsifierKind::kDwt;
    auto [v1, r1] = solve(m, g, cfg);
    CHECK(r1.lambda == 1.0);  // orthonormal basis: lambda = 1 exactly
    cfg.sparsifier = SparsifierKind::kDtcwt;
    auto [v2, r2] = solve(m, g, cfg);
    CHECK(r2.lambda == doctest::Approx(0.25).epsilon(0.05));  // 1/lambda_max(CC*) ~ 1/4
    CHECK(r1.gamma == r2.gamma);  // same data term
}

TEST_CASE("solver config file parsing") {
    std::string path = "solver_test.cfg";
    {
        std::ofstream out(path);
        out << "# test config\nsparsifier dwt\nlevels 3\nmax_iterations 55\n";
        out << "target_sparsity 0.45\ncontroller_gain 0.2\nmu0 0.01\n";
    }
    SolverConfig cfg = parse_solver_config(path);
    CHECK(cfg.sparsifier == SparsifierKind::kDwt);
    CHECK(cfg.levels == 3);
    CHECK(cfg.max_iterations == 55);
    CHECK(cfg.target_sparsity == doctest::Approx(0.45));
    CHECK(cfg.controller_gain == doctest::Approx(0.2));
    CHECK(cfg.mu0 == doctest::Approx(0.01));
    std::remove(path.c_str());
    CHECK_THROWS_AS(parse_solver_config("definitely_missing.cfg"), std::runtime_error);
}
