#include "dtcwt/experiments.hpp"

#include <cmath>

#include "dtcwt/dwt4d.hpp"

namespace dtcwt {

namespace {

Volume4D gaussian_blob(const Shape4& s, double sigma, const std::array<double, 4>& shift) {
    Volume4D v(s);
    for (int t = 0; t < s[3]; ++t)
        for (int z = 0; z < s[2]; ++z)
            for (int y = 0; y < s[1]; ++y)
                for (int x = 0; x < s[0]; ++x) {
                    double dx = x - 0.5 * s[0] - shift[0];
                    double dy = y - 0.5 * s[1] - shift[1];
                    double dz = z - 0.5 * s[2] - shift[2];
                    double dt = t - 0.5 * s[3] - shift[3];
                    v.at(x, y, z, t) =
                        std::exp(-(dx * dx + dy * dy + dz * dz + dt * dt) / (2 * sigma * sigma));
                }
    return v;
}

double cov(const std::vector<double>& xs) {
    double m = 0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    if (m == 0) return 0;
    double var = 0;
    for (double x : xs) var += (x - m) * (x - m);
    var /= static_cast<double>(xs.size());
    return std::sqrt(var) / m;
}

}  // namespace

ShiftInvarianceResult shift_invariance_experiment(const FilterBank& fb, const Shape4& extents, int levels,
                                                  double sigma, const std::string& wavelet) {
    const std::array<std::array<double, 4>, 8> shifts = {{{+1, 0, 0, 0},
                                                          {-1, 0, 0, 0},
                                                          {0, +1, 0, 0},
                                                          {0, -1, 0, 0},
                                                          {0, 0, +1, 0},
                                                          {0, 0, -1, 0},
                                                          {0, 0, 0, +1},
                                                          {0, 0, 0, -1}}};
    TransformOptions opt;
    opt.levels = levels;
    // energies[subband][shift]
    std::vector<std::vector<double>> e_cwt(15 * 8, std::vector<double>(8, 0.0));
    std::vector<std::vector<double>> e_dwt(15, std::vector<double>(8, 0.0));
    for (size_t si = 0; si < shifts.size(); ++si) {
        Volume4D v = gaussian_blob(extents, sigma, shifts[si]);
        Coeffs4D c = forward(v, fb, opt);
        for (int k = 0; k < 15; ++k)
            for (int z = 0; z < 8; ++z) {
                double e = 0;
                for (const auto& q :
                     c.subbands[static_cast<size_t>(levels - 1)][static_cast<size_t>(k)][static_cast<size_t>(z)].vec())
                    e += std::norm(q);
                e_cwt[static_cast<size_t>(k * 8 + z)][si] = e;
            }
        DwtCoeffs4D w = dwt_forward(v, levels, wavelet);
        for (int k = 0; k < 15; ++k) {
            double e = 0;
            for (double q : w.details[static_cast<size_t>(levels - 1)][static_cast<size_t>(k)].vec()) e += q * q;
            e_dwt[static_cast<size_t>(k)][si] = e;
        }
    }
    // average CoV over subbands carrying non-negligible energy
    auto mean_cov = [](const std::vector<std::vector<double>>& es, std::vector<std::vector<double>>* table,
                       double tag) {
        double tot = 0;
        for (const auto& row : es)
            for (double x : row) tot += x;
        double floor = 1e-9 * tot;
        double s = 0;
        int n = 0;
        for (size_t i = 0; i < es.size(); ++i) {
            double m = 0;
            for (double x : es[i]) m += x;
            if (m < floor) continue;
            double c = cov(es[i]);
            s += c;
            ++n;
            if (table) table->push_back({tag, static_cast<double>(i), m / 8.0, c});
        }
        return n ? s / n : 0.0;
    };
    ShiftInvarianceResult out;
    out.cov_dtcwt = mean_cov(e_cwt, &out.table, 0.0);
    out.cov_dwt = mean_cov(e_dwt, &out.table, 1.0);
    return out;
}

DirectionalityResult directionality_experiment(const FilterBank& fb, const Shape4& extents, int levels) {
    DirectionalityResult out;
    TransformOptions opt;
    opt.levels = levels;
    // coarsest-level high band center ~ 3*pi/2^(J+1), configuration HHHH
    double k0 = 3.0 * M_PI / std::pow(2.0, levels + 1);
    out.min_fraction = 1.0;
    for (int zeta = 0; zeta < 8; ++zeta) {
        double kx = (zeta & 1) ? -k0 : k0;
        double ky = (zeta & 2) ? -k0 : k0;
        double kz = (zeta & 4) ? -k0 : k0;
        double kt = k0;  // positive time frequency always
        Volume4D v(extents);
        for (int t = 0; t < extents[3]; ++t)
            for (int z = 0; z < extents[2]; ++z)
                for (int y = 0; y < extents[1]; ++y)
                    for (int x = 0; x < extents[0]; ++x)
                        v.at(x, y, z, t) = std::cos(kx * x + ky * y + kz * z + kt * t + 0.7);
        Coeffs4D c = forward(v, fb, opt);
        double tot = 0;
        std::array<double, 8> per{};
        for (int zz = 0; zz < 8; ++zz) {
            double e = 0;
            for (const auto& q :
                 c.subbands[static_cast<size_t>(levels - 1)][14][static_cast<size_t>(zz)].vec())
                e += std::norm(q);
            per[static_cast<size_t>(zz)] = e;
            tot += e;
        }
        double frac = tot > 0 ? per[static_cast<size_t>(zeta)] / tot : 0.0;
        out.matched_fraction[static_cast<size_t>(zeta)] = frac;
        out.min_fraction = std::min(out.min_fraction, frac);
    }
    return out;
}

FrameMeasurement frame_constant_measurement(const FilterBank& fb, const Shape4& extents,
                                            const TransformOptions& opt, int n_volumes,
                                            unsigned long long seed) {
    FrameMeasurement out;
    GaussianSampler g(seed);
    for (int i = 0; i < n_volumes; ++i) {
        Volume4D v(extents);
        for (auto& x : v.vec()) x = g();
        Coeffs4D c = forward(v, fb, opt);
        double n2 = norm2(v);
        out.ratios.push_back(coeffs_energy(c) / (n2 * n2));
    }
    double m = 0;
    for (double r : out.ratios) m += r;
    m /= static_cast<double>(out.ratios.size());
    double var = 0;
    for (double r : out.ratios) var += (r - m) * (r - m);
    var /= static_cast<double>(out.ratios.size());
    out.mean = m;
    out.rel_std = std::sqrt(var) / m;
    return out;
}

}  // namespace dtcwt
