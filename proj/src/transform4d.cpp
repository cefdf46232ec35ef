#include "dtcwt/transform4d.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace dtcwt {

namespace {

inline int refl_half(int i, int n) {
    int p = 2 * n;
    i %= p;
    if (i < 0) i += p;
    return i < n ? i : p - 1 - i;
}

inline int wrap(int i, int n) {
    i %= n;
    if (i < 0) i += n;
    return i;
}

// Full-rate correlation y[i] = sum_k h[k] x_e[i + k - c].
void l1_line(const double* x, int n, const std::vector<double>& h, int c, bool periodic, double* y) {
    int m = static_cast<int>(h.size());
    for (int i = 0; i < n; ++i) {
        double s = 0;
        int base = i - c;
        if (periodic) {
            for (int k = 0; k < m; ++k) s += h[k] * x[wrap(base + k, n)];
        } else {
            for (int k = 0; k < m; ++k) s += h[k] * x[refl_half(base + k, n)];
        }
        y[i] = s;
    }
}

// Interleaved q-shift analysis. w has R samples (R % 4 == 0); output R/2:
//   z[2m]   = sum_k ha[k] w_e[4m + 2 - M + 2k]   (tree a, even sub-grid)
//   z[2m+1] = sum_k hb[k] w_e[4m + 3 - M + 2k]   (tree b, odd sub-grid)
void qshift_analyze_line(const double* w, int R, const std::vector<double>& ha,
                         const std::vector<double>& hb, double* z) {
    int M = static_cast<int>(ha.size());
    int alpha = 2 - M, beta = 3 - M;
    int Q = R / 2;
    for (int m = 0; m < Q / 2; ++m) {
        double sa = 0, sb = 0;
        int ba = 4 * m + alpha, bb = 4 * m + beta;
        for (int k = 0; k < M; ++k) {
            sa += ha[k] * w[refl_half(ba + 2 * k, R)];
            sb += hb[k] * w[refl_half(bb + 2 * k, R)];
        }
        z[2 * m] = sa;
        z[2 * m + 1] = sb;
    }
}

// Transpose-structured synthesis with coefficient extension:
//   w[i] = sum_{4m+2-M+2k = i} ha[k] z_e[2m] + sum_{4m+3-M+2k = i} hb[k] z_e[2m+1]
void qshift_synth_line(const double* z, int Q, const std::vector<double>& ha,
                       const std::vector<double>& hb, double* w) {
    int M = static_cast<int>(ha.size());
    int alpha = 2 - M, beta = 3 - M;
    int R = 2 * Q;
    for (int i = 0; i < R; ++i) {
        double s = 0;
        // tree a: taps satisfy 4m + alpha + 2k = i, so i - alpha must be even
        // and k must match (i - alpha)/2 mod 2
        int r = i - alpha;
        if (r % 2 == 0) {
            int k0 = ((r / 2) % 2 + 2) % 2;
            for (int k = k0; k < M; k += 2) {
                int m = (r - 2 * k) / 4;  // exact: r - 2k is a multiple of 4
                s += ha[k] * z[refl_half(2 * m, Q)];
            }
        }
        r = i - beta;
        if (r % 2 == 0) {
            int k0 = ((r / 2) % 2 + 2) % 2;
            for (int k = k0; k < M; k += 2) {
                int m = (r - 2 * k) / 4;
                s += hb[k] * z[refl_half(2 * m + 1, Q)];
            }
        }
        w[i] = s;
    }
}

// Apply a 1D line transform along one axis. out_extent is the output length
// along that axis; other extents are preserved.
template <typename Fn>
Volume4D apply_axis(const Volume4D& in, int axis, int out_extent, Fn&& line_fn) {
    Shape4 os = in.shape();
    int n = os[axis];
    os[axis] = out_extent;
    Volume4D out(os);
    long long stride = 1;
    for (int d = 0; d < axis; ++d) stride *= in.shape()[d];
    // enumerate lines by the three other coordinates
    Shape4 s = in.shape();
    std::array<int, 3> dims{};
    int nd = 0;
    for (int d = 0; d < 4; ++d)
        if (d != axis) dims[nd++] = d;
    long long lines = 1LL * s[dims[0]] * s[dims[1]] * s[dims[2]];
    int threads = worker_threads();
    parallel_for(lines, threads, [&](long long li) {
        int c0 = static_cast<int>(li % s[dims[0]]);
        int c1 = static_cast<int>((li / s[dims[0]]) % s[dims[1]]);
        int c2 = static_cast<int>(li / (1LL * s[dims[0]] * s[dims[1]]));
        int coord[4] = {0, 0, 0, 0};
        coord[dims[0]] = c0;
        coord[dims[1]] = c1;
        coord[dims[2]] = c2;
        size_t in_base = in.idx(coord[0], coord[1], coord[2], coord[3]);
        size_t out_base = out.idx(coord[0], coord[1], coord[2], coord[3]);
        std::vector<double> src(static_cast<size_t>(n)), dst(static_cast<size_t>(out_extent));
        const double* ip = in.data() + in_base;
        for (int i = 0; i < n; ++i) src[static_cast<size_t>(i)] = ip[static_cast<size_t>(i) * stride];
        line_fn(src.data(), n, dst.data());
        double* op = out.data() + out_base;
        for (int i = 0; i < out_extent; ++i) op[static_cast<size_t>(i) * stride] = dst[static_cast<size_t>(i)];
    });
    return out;
}

void check_div4(const Shape4& s) {
    for (int d = 0; d < 4; ++d)
        if (s[d] % 4 != 0)
            throw std::invalid_argument(
                "interleaved scaling extent not divisible by 4 (odd tree extent) at dimension " +
                std::to_string(d) + ": " + shape_str(s));
}

// ---------------------------------------------------------------- sign table

// factor of P_iota inside psi_zeta: i^{popcount(iota)} * prod_{d in iota} sigma_d(zeta)
// sigma_d from Table-I pattern, sigma_t = +1 always.
struct SignEntry {
    bool imag;   // contributes to the imaginary part
    double sign; // +-1
};

SignEntry sign_entry(int zeta, int iota) {
    int sx = (zeta & 1) ? -1 : 1;   // zeta here is 0-based: zeta=0 -> O1
    int sy = (zeta & 2) ? -1 : 1;
    int sz = (zeta & 4) ? -1 : 1;
    double prod = 1.0;
    if (iota & 1) prod *= sx;
    if (iota & 2) prod *= sy;
    if (iota & 4) prod *= sz;
    // t contributes +1
    int nb = std::popcount(static_cast<unsigned>(iota));
    SignEntry e;
    e.imag = nb % 2 != 0;
    int quarter = e.imag ? (nb - 1) / 2 : nb / 2;
    e.sign = (quarter % 2 == 0 ? 1.0 : -1.0) * prod;
    return e;
}

std::array<ComplexArray4D, 8> combine_orthants_fac(const PIotaBlock& p, double fac) {
    std::array<ComplexArray4D, 8> out;
    const Shape4& sh = p.shape();
    for (int z = 0; z < 8; ++z) out[z] = ComplexArray4D(sh);
    size_t n = p.p[0].size();
    for (int z = 0; z < 8; ++z) {
        auto* o = out[z].data();
        for (int iota = 0; iota < 16; ++iota) {
            SignEntry e = sign_entry(z, iota);
            double c = fac * e.sign;
            const double* src = p.p[iota].data();
            if (e.imag) {
                for (size_t i = 0; i < n; ++i) o[i] += std::complex<double>(0.0, c * src[i]);
            } else {
                for (size_t i = 0; i < n; ++i) o[i] += c * src[i];
            }
        }
    }
    return out;
}

PIotaBlock split_orthants_fac(const std::array<ComplexArray4D, 8>& c, double fac) {
    PIotaBlock out;
    const Shape4& sh = c[0].shape();
    for (int z = 1; z < 8; ++z) c[z].check_same_shape(c[0]);
    size_t n = c[0].size();
    for (int iota = 0; iota < 16; ++iota) {
        out.p[iota] = Volume4D(sh);
        double* o = out.p[iota].data();
        for (int z = 0; z < 8; ++z) {
            SignEntry e = sign_entry(z, iota);
            double s = fac * e.sign;
            const auto* src = c[z].data();
            if (e.imag) {
                for (size_t i = 0; i < n; ++i) o[i] += s * src[i].imag();
            } else {
                for (size_t i = 0; i < n; ++i) o[i] += s * src[i].real();
            }
        }
    }
    return out;
}

double combine_factor(Normalization n) {
    return n == Normalization::kStandard ? 0.5 : 1.0 / std::sqrt(8.0);
}
double split_factor(Normalization n, SplitNormalization s) {
    if (n == Normalization::kParseval) return 1.0 / std::sqrt(8.0);
    return s == SplitNormalization::kInverse ? 0.25 : 0.5;
}
double level1_gain(Normalization n) {
    return n == Normalization::kStandard ? kLevel1Gain : 1.0;
}

// sequential per-kappa separable level-1 filtering (full rate)
Volume4D level1_pass(const Volume4D& v, const FilterBank& fb, int kappa) {
    bool periodic = fb.level1_periodic();
    Volume4D cur = v;
    for (int d = 0; d < 4; ++d) {
        const auto& h = (kappa >> d) & 1 ? fb.level1.analysis_high : fb.level1.analysis_low;
        int c = fb.center(h, false);
        cur = apply_axis(cur, d, cur.extent(d),
                         [&](const double* x, int n, double* y) { l1_line(x, n, h, c, periodic, y); });
    }
    return cur;
}

PIotaBlock polyphase_split(const Volume4D& u) {
    const Shape4& s = u.shape();
    Shape4 hs{s[0] / 2, s[1] / 2, s[2] / 2, s[3] / 2};
    PIotaBlock blk;
    for (int iota = 0; iota < 16; ++iota) blk.p[iota] = Volume4D(hs);
    for (int t = 0; t < s[3]; ++t)
        for (int z = 0; z < s[2]; ++z)
            for (int y = 0; y < s[1]; ++y)
                for (int x = 0; x < s[0]; ++x) {
                    int iota = (x & 1) | ((y & 1) << 1) | ((z & 1) << 2) | ((t & 1) << 3);
                    blk.p[iota].at(x / 2, y / 2, z / 2, t / 2) = u.at(x, y, z, t);
                }
    return blk;
}

Volume4D qshift_pass(const Volume4D& w, const FilterBank& fb, int kappa) {
    Volume4D cur = w;
    for (int d = 0; d < 4; ++d) {
        bool high = (kappa >> d) & 1;
        const auto& ha = high ? fb.qshift.tree_a_high : fb.qshift.tree_a_low;
        const auto& hb = high ? fb.qshift.tree_b_high : fb.qshift.tree_b_low;
        cur = apply_axis(cur, d, cur.extent(d) / 2,
                         [&](const double* x, int n, double* y) { qshift_analyze_line(x, n, ha, hb, y); });
    }
    return cur;
}

Volume4D qshift_synth_pass(const Volume4D& z, const FilterBank& fb, int kappa) {
    Volume4D cur = z;
    for (int d = 3; d >= 0; --d) {
        bool high = (kappa >> d) & 1;
        const auto& ha = high ? fb.qshift.tree_a_high : fb.qshift.tree_a_low;
        const auto& hb = high ? fb.qshift.tree_b_high : fb.qshift.tree_b_low;
        cur = apply_axis(cur, d, cur.extent(d) * 2,
                         [&](const double* x, int n, double* y) { qshift_synth_line(x, n, ha, hb, y); });
    }
    return cur;
}

// level >= 2 synthesis from 16 interleaved configuration arrays
Volume4D synth_qshift(const std::array<Volume4D, 16>& Z, const FilterBank& fb) {
    Volume4D acc;
    for (int kappa = 0; kappa < 16; ++kappa) {
        Volume4D part = qshift_synth_pass(Z[kappa], fb, kappa);
        if (kappa == 0)
            acc = std::move(part);
        else
            acc += part;
    }
    return acc;
}

// level-1 synthesis from 16 full-rate configuration arrays
Volume4D synth_level1(const std::array<Volume4D, 16>& U, const FilterBank& fb, bool adjoint_filters) {
    bool periodic = fb.level1_periodic();
    Volume4D acc;
    for (int kappa = 0; kappa < 16; ++kappa) {
        Volume4D cur = U[kappa];
        for (int d = 0; d < 4; ++d) {
            bool high = (kappa >> d) & 1;
            std::vector<double> h;
            int c;
            if (adjoint_filters) {
                const auto& a = high ? fb.level1.analysis_high : fb.level1.analysis_low;
                h.assign(a.rbegin(), a.rend());
                c = static_cast<int>(a.size()) - 1 - fb.center(a, false);
            } else {
                h = high ? fb.level1.synthesis_high : fb.level1.synthesis_low;
                c = fb.center(h, true);
            }
            cur = apply_axis(cur, d, cur.extent(d),
                             [&](const double* x, int n, double* y) { l1_line(x, n, h, c, periodic, y); });
        }
        if (kappa == 0)
            acc = std::move(cur);
        else
            acc += cur;
    }
    return acc;
}

std::array<Volume4D, 16> interleave_all(const Coeffs4D& c, int level, double fac, Volume4D&& scaling) {
    std::array<Volume4D, 16> Z;
    Z[0] = std::move(scaling);
    for (int kappa = 1; kappa < 16; ++kappa) {
        PIotaBlock blk = split_orthants_fac(c.subbands[static_cast<size_t>(level - 1)][static_cast<size_t>(kappa - 1)], fac);
        Z[static_cast<size_t>(kappa)] = interleave_scaling(blk);
    }
    return Z;
}

Volume4D synthesize(const Coeffs4D& c, const FilterBank& fb, bool adjoint_mode, bool allow_lossy) {
    if (!c.level1_details_included && !allow_lossy && !adjoint_mode)
        throw std::invalid_argument(
            "imperfect reconstruction: level-1 details missing (reconstruct with allow_lossy to "
            "substitute zeros)");
    double fac = split_factor(c.normalization,
                              adjoint_mode ? SplitNormalization::kAdjoint : SplitNormalization::kInverse);
    PIotaBlock pj = split_orthants_fac(c.final_scaling, fac);
    Volume4D W = interleave_scaling(pj);
    for (int j = c.levels; j >= 2; --j) {
        std::array<Volume4D, 16> Z = interleave_all(c, j, fac, std::move(W));
        W = synth_qshift(Z, fb);
    }
    std::array<Volume4D, 16> U;
    U[0] = std::move(W);
    const Shape4& full = U[0].shape();
    for (int kappa = 1; kappa < 16; ++kappa) {
        if (c.level1_details_included) {
            PIotaBlock blk = split_orthants_fac(c.subbands[0][static_cast<size_t>(kappa - 1)], fac);
            U[static_cast<size_t>(kappa)] = interleave_scaling(blk);
        } else {
            U[static_cast<size_t>(kappa)] = Volume4D(full);
        }
    }
    Volume4D out = synth_level1(U, fb, adjoint_mode);
    double g = level1_gain(c.normalization);
    out *= adjoint_mode ? g : 1.0 / g;
    return out;
}

}  // namespace

int max_levels(const Shape4& extents) {
    int mn = extents[0];
    for (int d = 0; d < 4; ++d) {
        if (extents[d] <= 0 || extents[d] % 2 != 0)
            throw std::invalid_argument("extents must be positive and even, got " + shape_str(extents));
        mn = std::min(mn, extents[d]);
    }
    int j = 1;
    while ((1LL << (j + 1)) <= mn) ++j;
    return j;
}

AnalysisBlocks analyze_level1(const Volume4D& v, const FilterBank& fb, double gain) {
    validate_volume(v);
    AnalysisBlocks out;
    Volume4D scaled = v;
    scaled *= gain;
    for (int kappa = 0; kappa < 16; ++kappa) {
        Volume4D u = level1_pass(scaled, fb, kappa);
        PIotaBlock blk = polyphase_split(u);
        if (kappa == 0)
            out.scaling = std::move(blk);
        else
            out.details[static_cast<size_t>(kappa - 1)] = std::move(blk);
    }
    return out;
}

AnalysisBlocks analyze_qshift(const Volume4D& interleaved_scaling, const FilterBank& fb) {
    check_div4(interleaved_scaling.shape());
    AnalysisBlocks out;
    for (int kappa = 0; kappa < 16; ++kappa) {
        Volume4D z = qshift_pass(interleaved_scaling, fb, kappa);
        PIotaBlock blk = polyphase_split(z);
        if (kappa == 0)
            out.scaling = std::move(blk);
        else
            out.details[static_cast<size_t>(kappa - 1)] = std::move(blk);
    }
    return out;
}

std::array<ComplexArray4D, 8> combine_orthants(const PIotaBlock& p) {
    return combine_orthants_fac(p, 0.5);
}

PIotaBlock split_orthants(const std::array<ComplexArray4D, 8>& c, SplitNormalization norm) {
    return split_orthants_fac(c, norm == SplitNormalization::kInverse ? 0.25 : 0.5);
}

Volume4D interleave_scaling(const PIotaBlock& p) {
    const Shape4& hs = p.shape();
    for (int i = 1; i < 16; ++i) p.p[static_cast<size_t>(i)].check_same_shape(p.p[0]);
    Shape4 fs{2 * hs[0], 2 * hs[1], 2 * hs[2], 2 * hs[3]};
    Volume4D w(fs);
    for (int t = 0; t < fs[3]; ++t)
        for (int z = 0; z < fs[2]; ++z)
            for (int y = 0; y < fs[1]; ++y)
                for (int x = 0; x < fs[0]; ++x) {
                    int iota = (x & 1) | ((y & 1) << 1) | ((z & 1) << 2) | ((t & 1) << 3);
                    w.at(x, y, z, t) = p.p[static_cast<size_t>(iota)].at(x / 2, y / 2, z / 2, t / 2);
                }
    return w;
}

PIotaBlock deinterleave_scaling(const Volume4D& w) {
    return polyphase_split(w);
}

Shape4 Coeffs4D::subband_shape(int level) const {
    Shape4 s = original_extents;
    for (int d = 0; d < 4; ++d) s[d] >>= level;
    return s;
}

long long Coeffs4D::total_complex_count() const {
    long long n = 0;
    for (int j = 1; j <= levels; ++j) {
        if (j == 1 && !level1_details_included) continue;
        n += 15LL * 8LL * element_count(subband_shape(j));
    }
    n += 8LL * element_count(subband_shape(levels));
    return n;
}

Coeffs4D forward(const Volume4D& v, const FilterBank& fb, const TransformOptions& opt) {
    validate_volume(v);
    int jmax = max_levels(v.shape());
    if (opt.levels < 1 || opt.levels > jmax)
        throw std::invalid_argument("levels J=" + std::to_string(opt.levels) +
                                    " outside [1, " + std::to_string(jmax) +
                                    "] (2^J <= min extent bound for " + shape_str(v.shape()) + ")");
    Coeffs4D out;
    out.levels = opt.levels;
    out.original_extents = v.shape();
    out.filter_bank = fb.name;
    out.level1_details_included = opt.include_level1_details;
    out.normalization = opt.normalization;
    out.subbands.resize(static_cast<size_t>(opt.levels));
    double cfac = combine_factor(opt.normalization);

    AnalysisBlocks l1 = analyze_level1(v, fb, level1_gain(opt.normalization));
    if (opt.include_level1_details)
        for (int kappa = 1; kappa < 16; ++kappa)
            out.subbands[0][static_cast<size_t>(kappa - 1)] =
                combine_orthants_fac(l1.details[static_cast<size_t>(kappa - 1)], cfac);
    if (opt.levels == 1) {
        out.final_scaling = combine_orthants_fac(l1.scaling, cfac);
        return out;
    }
    Volume4D w = interleave_scaling(l1.scaling);
    for (int j = 2; j <= opt.levels; ++j) {
        AnalysisBlocks q = analyze_qshift(w, fb);
        for (int kappa = 1; kappa < 16; ++kappa)
            out.subbands[static_cast<size_t>(j - 1)][static_cast<size_t>(kappa - 1)] =
                combine_orthants_fac(q.details[static_cast<size_t>(kappa - 1)], cfac);
        if (j < opt.levels)
            w = interleave_scaling(q.scaling);
        else
            out.final_scaling = combine_orthants_fac(q.scaling, cfac);
    }
    return out;
}

Volume4D inverse(const Coeffs4D& c, const FilterBank& fb, bool allow_lossy) {
    return synthesize(c, fb, false, allow_lossy);
}

Volume4D adjoint(const Coeffs4D& c, const FilterBank& fb) {
    return synthesize(c, fb, true, true);
}

void for_each_subband(Coeffs4D& c, const std::function<void(ComplexArray4D&)>& fn) {
    for (int j = 1; j <= c.levels; ++j) {
        if (j == 1 && !c.level1_details_included) continue;
        for (auto& cfg : c.subbands[static_cast<size_t>(j - 1)])
            for (auto& sb : cfg) fn(sb);
    }
    for (auto& sb : c.final_scaling) fn(sb);
}

void for_each_subband(const Coeffs4D& c, const std::function<void(const ComplexArray4D&)>& fn) {
    for (int j = 1; j <= c.levels; ++j) {
        if (j == 1 && !c.level1_details_included) continue;
        for (const auto& cfg : c.subbands[static_cast<size_t>(j - 1)])
            for (const auto& sb : cfg) fn(sb);
    }
    for (const auto& sb : c.final_scaling) fn(sb);
}

double coeffs_energy(const Coeffs4D& c) {
    double e = 0;
    for_each_subband(c, [&](const ComplexArray4D& sb) {
        for (const auto& v : sb.vec()) e += std::norm(v);
    });
    return e;
}

double coeffs_dot(const Coeffs4D& a, const Coeffs4D& b) {
    double s = 0;
    if (a.levels != b.levels || a.level1_details_included != b.level1_details_included)
        throw std::invalid_argument("coefficient layout mismatch");
    for (int j = 1; j <= a.levels; ++j) {
        if (j == 1 && !a.level1_details_included) continue;
        for (int k = 0; k < 15; ++k)
            for (int z = 0; z < 8; ++z) {
                const auto& x = a.subbands[static_cast<size_t>(j - 1)][static_cast<size_t>(k)][static_cast<size_t>(z)];
                const auto& y = b.subbands[static_cast<size_t>(j - 1)][static_cast<size_t>(k)][static_cast<size_t>(z)];
                x.check_same_shape(y);
                for (size_t i = 0; i < x.size(); ++i)
                    s += x.data()[i].real() * y.data()[i].real() + x.data()[i].imag() * y.data()[i].imag();
            }
    }
    for (int z = 0; z < 8; ++z) {
        const auto& x = a.final_scaling[static_cast<size_t>(z)];
        const auto& y = b.final_scaling[static_cast<size_t>(z)];
        x.check_same_shape(y);
        for (size_t i = 0; i < x.size(); ++i)
            s += x.data()[i].real() * y.data()[i].real() + x.data()[i].imag() * y.data()[i].imag();
    }
    return s;
}

Coeffs4D coeffs_like(const Coeffs4D& c) {
    Coeffs4D out = c;
    for_each_subband(out, [](ComplexArray4D& sb) { sb.fill({0, 0}); });
    return out;
}

PowerIterationResult transform_normal_eigenvalue(const FilterBank& fb, const Shape4& extents,
                                                 const TransformOptions& opt, unsigned long long seed,
                                                 double tol, int max_iters) {
    GaussianSampler g(seed);
    Volume4D v(extents);
    for (auto& x : v.vec()) x = g();
    PowerIterationResult res;
    double prev = 0;
    for (int it = 1; it <= max_iters; ++it) {
        double nv = norm2(v);
        v *= 1.0 / nv;
        Volume4D av = adjoint(forward(v, fb, opt), fb);
        double lambda = dot(v, av);
        res.eigenvalue = lambda;
        res.iterations = it;
        res.residual = std::abs(lambda - prev) / std::max(std::abs(lambda), 1e-300);
        if (it > 1 && res.residual < tol) {
            res.converged = true;
            v = std::move(av);
            break;
        }
        prev = lambda;
        v = std::move(av);
    }
    return res;
}

}  // namespace dtcwt
