#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dtcwt/dwt4d.hpp"
#include "oracles.hpp"

using namespace dtcwt;

namespace {

double coeff_energy(const DwtCoeffs4D& c) {
    double e = 0;
    for_each_subband(c, std::function<void(const Volume4D&)>([&](const Volume4D& sb) {
                         for (double x : sb.vec()) e += x * x;
                     }));
    return e;
}

}  // namespace

TEST_CASE("zero volume gives zero coefficients and back") {
    Volume4D zero(Shape4{16, 16, 16, 16});
    DwtCoeffs4D c = dwt_forward(zero, 2);
    CHECK(coeff_energy(c) == 0.0);
    CHECK(oracle::rel_err(dwt_inverse(c, "db2"), zero) == 0.0);
}

TEST_CASE("orthonormal energy preservation under periodic extension") {
    Volume4D v = oracle::random_volume({16, 16, 16, 16}, 7);
    DwtCoeffs4D c = dwt_forward(v, 2);
    double n = norm2(v);
    CHECK(std::abs(coeff_energy(c) - n * n) / (n * n) < 1e-10);
}

TEST_CASE("separable input: subbands equal tensor products of the 1D oracle") {
    DwtFilters f = dwt_filters("db2");
    Shape4 s{16, 16, 16, 16};
    std::array<std::vector<double>, 4> lines;
    GaussianSampler g(3);
    for (auto& l : lines) {
        l.resize(16);
        for (auto& x : l) x = g();
    }
    Volume4D v(s);
    for (int t = 0; t < 16; ++t)
        for (int z = 0; z < 16; ++z)
            for (int y = 0; y < 16; ++y)
                for (int x = 0; x < 16; ++x)
                    v.at(x, y, z, t) = lines[0][x] * lines[1][y] * lines[2][z] * lines[3][t];
    DwtCoeffs4D c = dwt_forward(v, 1);
    for (int kappa : {1, 5, 15}) {
        std::array<std::vector<double>, 4> want1d;
        for (int d = 0; d < 4; ++d)
            want1d[d] = oracle::dwt1d_analyze(lines[d], (kappa >> d) & 1 ? f.hi : f.lo);
        const Volume4D& sb = c.details[0][kappa - 1];
        double worst = 0;
        for (int t = 0; t < 8; ++t)
            for (int z = 0; z < 8; ++z)
                for (int y = 0; y < 8; ++y)
                    for (int x = 0; x < 8; ++x)
                        worst = std::max(worst,
                                         std::abs(sb.at(x, y, z, t) - want1d[0][x] * want1d[1][y] *
                                                                          want1d[2][z] * want1d[3][t]));
        INFO("kappa ", kappa);
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("perfect reconstruction") {
    for (auto [s, J] :
         {std::pair<Shape4, int>{{16, 16, 16, 16}, 2}, {{8, 8, 8, 8}, 3}, {{16, 8, 32, 8}, 2}}) {
        Volume4D v = oracle::random_volume(s, 11);
        Volume4D r = dwt_inverse(dwt_forward(v, J), "db2");
        INFO(shape_str(s), " J=", J);
        CHECK(oracle::rel_err(r, v) < 1e-10);
    }
}

TEST_CASE("single coarsest approximation coefficient reconstructs the tensor scaling vector") {
    DwtFilters f = dwt_filters("db2");
    Shape4 s{16, 16, 16, 16};
    DwtCoeffs4D c = dwt_forward(Volume4D(s), 2);
    c.approx.at(1, 1, 1, 1) = 1.0;
    Volume4D r = dwt_inverse(c, "db2");
    // 1D oracle: transpose a unit impulse at position 1 up through two levels
    std::vector<double> imp(4, 0.0);
    imp[1] = 1.0;
    auto up = [&](const std::vector<double>& y) {
        int n = 2 * (int)y.size();
        std::vector<double> x((size_t)n, 0.0);
        for (int m = 0; m < (int)y.size(); ++m)
            for (int k = 0; k < (int)f.lo.size(); ++k)
                x[(size_t)((2 * m + k) % n)] += f.lo[(size_t)k] * y[(size_t)m];
        return x;
    };
    std::vector<double> vec1d = up(up(imp));  // length 16
    double worst = 0;
    for (int t = 0; t < 16; ++t)
        for (int z = 0; z < 16; ++z)
            for (int y = 0; y < 16; ++y)
                for (int x = 0; x < 16; ++x)
                    worst = std::max(worst,
                                     std::abs(r.at(x, y, z, t) - vec1d[(size_t)x] * vec1d[(size_t)y] *
                                                                     vec1d[(size_t)z] * vec1d[(size_t)t]));
    CHECK(worst < 1e-12);
}

TEST_CASE("error paths: unknown wavelet, J range, metadata mismatch") {
    Volume4D v(Shape4{16, 16, 16, 16});
    CHECK_THROWS_WITH_AS(dwt_forward(v, 1, "sym9"), doctest::Contains("unknown wavelet"),
                         std::invalid_argument);
    CHECK_THROWS_AS(dwt_forward(v, 9), std::invalid_argument);
    DwtCoeffs4D c = dwt_forward(v, 1);
    CHECK_THROWS_WITH_AS(dwt_inverse(c, "haar"), doctest::Contains("mismatch"), std::invalid_argument);
}
