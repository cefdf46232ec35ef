#include "oracles.hpp"

#include <cmath>

namespace oracle {

int refl_half(int i, int n) {
    int p = 2 * n;
    i %= p;
    if (i < 0) i += p;
    return i < n ? i : p - 1 - i;
}

int wrap(int i, int n) {
    i %= n;
    if (i < 0) i += n;
    return i;
}

PIotaBlock brute_level1(const Volume4D& v, const FilterBank& fb, int kappa, double gain) {
    const Shape4& s = v.shape();
    Shape4 hs{s[0] / 2, s[1] / 2, s[2] / 2, s[3] / 2};
    bool periodic = fb.level1_periodic();
    const std::vector<double>* h[4];
    int c[4];
    for (int d = 0; d < 4; ++d) {
        h[d] = (kappa >> d) & 1 ? &fb.level1.analysis_high : &fb.level1.analysis_low;
        c[d] = fb.center(*h[d], false);
    }
    auto ext = [&](int i, int n) { return periodic ? wrap(i, n) : refl_half(i, n); };
    PIotaBlock out;
    for (int iota = 0; iota < 16; ++iota) {
        out.p[iota] = Volume4D(hs);
        int ex = iota & 1, ey = (iota >> 1) & 1, ez = (iota >> 2) & 1, et = (iota >> 3) & 1;
        for (int mt = 0; mt < hs[3]; ++mt)
            for (int mz = 0; mz < hs[2]; ++mz)
                for (int my = 0; my < hs[1]; ++my)
                    for (int mx = 0; mx < hs[0]; ++mx) {
                        double acc = 0;
                        for (int kt = 0; kt < (int)h[3]->size(); ++kt)
                            for (int kz = 0; kz < (int)h[2]->size(); ++kz)
                                for (int ky = 0; ky < (int)h[1]->size(); ++ky)
                                    for (int kx = 0; kx < (int)h[0]->size(); ++kx) {
                                        int ix = ext(2 * mx + ex + kx - c[0], s[0]);
                                        int iy = ext(2 * my + ey + ky - c[1], s[1]);
                                        int iz = ext(2 * mz + ez + kz - c[2], s[2]);
                                        int it = ext(2 * mt + et + kt - c[3], s[3]);
                                        acc += (*h[0])[kx] * (*h[1])[ky] * (*h[2])[kz] * (*h[3])[kt] *
                                               v.at(ix, iy, iz, it);
                                    }
                        out.p[iota].at(mx, my, mz, mt) = gain * acc;
                    }
    }
    return out;
}

PIotaBlock brute_qshift(const Volume4D& w, const FilterBank& fb, int kappa) {
    const Shape4& s = w.shape();
    Shape4 qs{s[0] / 4, s[1] / 4, s[2] / 4, s[3] / 4};
    int M = (int)fb.qshift.tree_a_low.size();
    int alpha = 2 - M, beta = 3 - M;
    PIotaBlock out;
    for (int iota = 0; iota < 16; ++iota) {
        out.p[iota] = Volume4D(qs);
        const std::vector<double>* h[4];
        int off[4];
        for (int d = 0; d < 4; ++d) {
            bool tree_b = (iota >> d) & 1;
            bool high = (kappa >> d) & 1;
            if (tree_b)
                h[d] = high ? &fb.qshift.tree_b_high : &fb.qshift.tree_b_low;
            else
                h[d] = high ? &fb.qshift.tree_a_high : &fb.qshift.tree_a_low;
            off[d] = tree_b ? beta : alpha;
        }
        for (int mt = 0; mt < qs[3]; ++mt)
            for (int mz = 0; mz < qs[2]; ++mz)
                for (int my = 0; my < qs[1]; ++my)
                    for (int mx = 0; mx < qs[0]; ++mx) {
                        double acc = 0;
                        for (int kt = 0; kt < M; ++kt)
                            for (int kz = 0; kz < M; ++kz)
                                for (int ky = 0; ky < M; ++ky)
                                    for (int kx = 0; kx < M; ++kx) {
                                        int ix = refl_half(4 * mx + off[0] + 2 * kx, s[0]);
                                        int iy = refl_half(4 * my + off[1] + 2 * ky, s[1]);
                                        int iz = refl_half(4 * mz + off[2] + 2 * kz, s[2]);
                                        int it = refl_half(4 * mt + off[3] + 2 * kt, s[3]);
                                        acc += (*h[0])[kx] * (*h[1])[ky] * (*h[2])[kz] * (*h[3])[kt] *
                                               w.at(ix, iy, iz, it);
                                    }
                        out.p[iota].at(mx, my, mz, mt) = acc;
                    }
    }
    return out;
}

std::complex<double> symbolic_orthant_factor(int zeta, int iota) {
    const std::complex<double> i_unit(0.0, 1.0);
    std::complex<double> f(1.0, 0.0);
    double sigma[4] = {(zeta & 1) ? -1.0 : 1.0, (zeta & 2) ? -1.0 : 1.0, (zeta & 4) ? -1.0 : 1.0, 1.0};
    for (int d = 0; d < 4; ++d)
        if ((iota >> d) & 1) f *= sigma[d] * i_unit;
    return f;
}

std::vector<double> dwt1d_analyze(const std::vector<double>& x, const std::vector<double>& h) {
    int n = (int)x.size();
    std::vector<double> y((size_t)(n / 2));
    for (int m = 0; m < n / 2; ++m) {
        double s = 0;
        for (int k = 0; k < (int)h.size(); ++k) s += h[(size_t)k] * x[(size_t)wrap(2 * m + k, n)];
        y[(size_t)m] = s;
    }
    return y;
}

Volume4D random_volume(const Shape4& s, unsigned long long seed) {
    dtcwt::GaussianSampler g(seed);
    Volume4D v(s);
    for (auto& x : v.vec()) x = g();
    return v;
}

double rel_err(const Volume4D& a, const Volume4D& b) {
    double num = 0, den = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a.data()[i] - b.data()[i];
        num += d * d;
        den += b.data()[i] * b.data()[i];
    }
    return den == 0 ? std::sqrt(num) : std::sqrt(num / den);
}

}  // namespace oracle
