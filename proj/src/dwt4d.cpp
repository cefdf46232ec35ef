#include "dtcwt/dwt4d.hpp"

#include <cmath>
#include <stdexcept>

namespace dtcwt {

namespace {

inline int wrap(int i, int n) {
    i %= n;
    if (i < 0) i += n;
    return i;
}

// y[m] = sum_k h[k] x[(2m + k) mod n]
void dwt_line(const double* x, int n, const std::vector<double>& h, double* y) {
    int m2 = n / 2;
    int M = static_cast<int>(h.size());
    for (int m = 0; m < m2; ++m) {
        double s = 0;
        for (int k = 0; k < M; ++k) s += h[k] * x[wrap(2 * m + k, n)];
        y[m] = s;
    }
}

// transpose: x[(2m + k) mod n] += h[k] y[m]
void idwt_line(const double* y, int m2, const std::vector<double>& h, double* x) {
    int n = 2 * m2;
    int M = static_cast<int>(h.size());
    for (int i = 0; i < n; ++i) x[i] = 0;
    for (int m = 0; m < m2; ++m)
        for (int k = 0; k < M; ++k) x[wrap(2 * m + k, n)] += h[k] * y[m];
}

template <typename Fn>
Volume4D apply_axis(const Volume4D& in, int axis, int out_extent, Fn&& line_fn) {
    Shape4 os = in.shape();
    int n = os[axis];
    os[axis] = out_extent;
    Volume4D out(os);
    long long stride = 1;
    for (int d = 0; d < axis; ++d) stride *= in.shape()[d];
    Shape4 s = in.shape();
    std::array<int, 3> dims{};
    int nd = 0;
    for (int d = 0; d < 4; ++d)
        if (d != axis) dims[nd++] = d;
    long long lines = 1LL * s[dims[0]] * s[dims[1]] * s[dims[2]];
    parallel_for(lines, worker_threads(), [&](long long li) {
        int c0 = static_cast<int>(li % s[dims[0]]);
        int c1 = static_cast<int>((li / s[dims[0]]) % s[dims[1]]);
        int c2 = static_cast<int>(li / (1LL * s[dims[0]] * s[dims[1]]));
        int coord[4] = {0, 0, 0, 0};
        coord[dims[0]] = c0;
        coord[dims[1]] = c1;
        coord[dims[2]] = c2;
        std::vector<double> src(static_cast<size_t>(n)), dst(static_cast<size_t>(out_extent));
        const double* ip = in.data() + in.idx(coord[0], coord[1], coord[2], coord[3]);
        for (int i = 0; i < n; ++i) src[static_cast<size_t>(i)] = ip[static_cast<size_t>(i) * stride];
        line_fn(src.data(), n, dst.data());
        double* op = out.data() + out.idx(coord[0], coord[1], coord[2], coord[3]);
        for (int i = 0; i < out_extent; ++i) op[static_cast<size_t>(i) * stride] = dst[static_cast<size_t>(i)];
    });
    return out;
}

void check_even(const Shape4& s, int level) {
    for (int d = 0; d < 4; ++d)
        if (s[d] % 2 != 0)
            throw std::invalid_argument("odd extent at decomposition level " + std::to_string(level) +
                                        ": " + shape_str(s));
}

}  // namespace

std::vector<std::string> dwt_wavelet_names() { return {"db2", "haar"}; }

DwtFilters dwt_filters(const std::string& wavelet) {
    if (wavelet == "db2") {
        const double s3 = std::sqrt(3.0);
        const double q = 4.0 * std::sqrt(2.0);
        DwtFilters f;
        f.lo = {(1 + s3) / q, (3 + s3) / q, (3 - s3) / q, (1 - s3) / q};
        // CQF: hi[n] = (-1)^n lo[M-1-n]
        f.hi.resize(4);
        for (int n = 0; n < 4; ++n) f.hi[static_cast<size_t>(n)] = (n % 2 ? -1.0 : 1.0) * f.lo[static_cast<size_t>(3 - n)];
        return f;
    }
    if (wavelet == "haar") {
        const double s = 1.0 / std::sqrt(2.0);
        return {{s, s}, {s, -s}};
    }
    std::string msg = "unknown wavelet \"" + wavelet + "\"; available:";
    for (const auto& n : dwt_wavelet_names()) msg += " " + n;
    throw std::invalid_argument(msg);
}

Shape4 DwtCoeffs4D::subband_shape(int level) const {
    Shape4 s = original_extents;
    for (int d = 0; d < 4; ++d) s[d] >>= level;
    return s;
}

DwtCoeffs4D dwt_forward(const Volume4D& v, int levels, const std::string& wavelet) {
    validate_volume(v);
    DwtFilters f = dwt_filters(wavelet);
    int mn = *std::min_element(v.shape().begin(), v.shape().end());
    int jmax = 0;
    while ((1 << (jmax + 1)) <= mn) ++jmax;
    if (levels < 1 || levels > jmax)
        throw std::invalid_argument("levels J=" + std::to_string(levels) + " outside [1, " +
                                    std::to_string(jmax) + "] for " + shape_str(v.shape()));
    DwtCoeffs4D out;
    out.levels = levels;
    out.original_extents = v.shape();
    out.wavelet = wavelet;
    out.details.resize(static_cast<size_t>(levels));
    Volume4D approx = v;
    for (int j = 1; j <= levels; ++j) {
        check_even(approx.shape(), j);
        for (int kappa = 15; kappa >= 0; --kappa) {
            Volume4D cur = approx;
            for (int d = 0; d < 4; ++d) {
                const auto& h = (kappa >> d) & 1 ? f.hi : f.lo;
                cur = apply_axis(cur, d, cur.extent(d) / 2,
                                 [&](const double* x, int n, double* y) { dwt_line(x, n, h, y); });
            }
            if (kappa == 0)
                approx = std::move(cur);
            else
                out.details[static_cast<size_t>(j - 1)][static_cast<size_t>(kappa - 1)] = std::move(cur);
        }
    }
    out.approx = std::move(approx);
    return out;
}

Volume4D dwt_inverse(const DwtCoeffs4D& c, const std::string& wavelet) {
    if (wavelet != c.wavelet)
        throw std::invalid_argument("wavelet mismatch: coefficients carry \"" + c.wavelet +
                                    "\", requested \"" + wavelet + "\"");
    if (c.levels < 1 || c.details.size() != static_cast<size_t>(c.levels))
        throw std::invalid_argument("inconsistent DWT coefficient metadata");
    DwtFilters f = dwt_filters(wavelet);
    Volume4D approx = c.approx;
    for (int j = c.levels; j >= 1; --j) {
        Volume4D acc;
        for (int kappa = 0; kappa < 16; ++kappa) {
            const Volume4D& src =
                kappa == 0 ? approx : c.details[static_cast<size_t>(j - 1)][static_cast<size_t>(kappa - 1)];
            Volume4D cur = src;
            for (int d = 3; d >= 0; --d) {
                const auto& h = (kappa >> d) & 1 ? f.hi : f.lo;
                cur = apply_axis(cur, d, cur.extent(d) * 2,
                                 [&](const double* y, int m2, double* x) { idwt_line(y, m2, h, x); });
            }
            if (kappa == 0)
                acc = std::move(cur);
            else
                acc += cur;
        }
        approx = std::move(acc);
    }
    return approx;
}

void for_each_subband(DwtCoeffs4D& c, const std::function<void(Volume4D&)>& fn) {
    for (auto& lvl : c.details)
        for (auto& sb : lvl) fn(sb);
    fn(c.approx);
}

void for_each_subband(const DwtCoeffs4D& c, const std::function<void(const Volume4D&)>& fn) {
    for (const auto& lvl : c.details)
        for (const auto& sb : lvl) fn(sb);
    fn(c.approx);
}

}  // namespace dtcwt
