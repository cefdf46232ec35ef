#include "dtcwt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dtcwt {

namespace {

struct FlatWriter {
    std::vector<std::complex<double>>* out;
    void operator()(const ComplexArray4D& sb) {
        out->insert(out->end(), sb.vec().begin(), sb.vec().end());
    }
    void operator()(const Volume4D& sb) {
        for (double x : sb.vec()) out->emplace_back(x, 0.0);
    }
};

struct FlatReader {
    const std::complex<double>* src;
    void operator()(ComplexArray4D& sb) {
        std::copy(src, src + sb.size(), sb.vec().begin());
        src += sb.size();
    }
    void operator()(Volume4D& sb) {
        for (auto& x : sb.vec()) x = (src++)->real();
    }
};

}  // namespace

std::vector<std::complex<double>> radial_soft_threshold(const std::vector<std::complex<double>>& v,
                                                        double tau) {
    if (tau < 0) throw std::invalid_argument("soft-threshold level must be non-negative");
    std::vector<std::complex<double>> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        double mag = std::abs(v[i]);
        if (mag <= tau) {
            out[i] = {0.0, 0.0};
        } else {
            double s = (mag - tau) / mag;
            out[i] = v[i] * s;
        }
    }
    return out;
}

double update_mu(double mu, double achieved_sparsity, const SolverConfig& cfg) {
    if (achieved_sparsity < 0 || achieved_sparsity > 1)
        throw std::invalid_argument("achieved sparsity must be in [0,1]");
    double next = mu * (1.0 + cfg.controller_gain * (cfg.target_sparsity - achieved_sparsity));
    return std::clamp(next, cfg.mu_min, cfg.mu_max);
}

PdfpContext::PdfpContext(const Geometry& g, const SolverConfig& cfg) : geom_(g), cfg_(cfg) {
    geom_.validate();
    Shape4 vs = volume_shape();
    op_norm_sq_ = cfg.gamma > 0 ? 0.0 : operator_norm_sq(geom_, vs, cfg.seed + 101).value;
    gamma_ = cfg.gamma > 0 ? cfg.gamma : 1.9 / op_norm_sq_;
    if (cfg.sparsifier == SparsifierKind::kDtcwt) {
        fb_ = resolve_filter_bank(cfg.bank);
        topt_.levels = cfg.levels;
        topt_.include_level1_details = cfg.include_level1_details;
        topt_.normalization = cfg.parseval ? Normalization::kParseval : Normalization::kStandard;
        Volume4D zero(vs);
        coeff_template_ = forward(zero, fb_, topt_);
        if (cfg.lambda > 0) {
            lambda_ = cfg.lambda;
        } else {
            transform_eig_ = transform_normal_eigenvalue(fb_, vs, topt_, cfg.seed + 202).eigenvalue;
            lambda_ = 1.0 / transform_eig_;
        }
    } else {
        Volume4D zero(vs);
        dwt_template_ = dwt_forward(zero, cfg.levels, cfg.wavelet);
        transform_eig_ = 1.0;  // orthonormal
        lambda_ = cfg.lambda > 0 ? cfg.lambda : 1.0;
    }
    if (gamma_ <= 0 || lambda_ <= 0) throw std::invalid_argument("step sizes must be positive");
}

CoefVec PdfpContext::analyze(const Volume4D& f) const {
    CoefVec out;
    FlatWriter w{&out.v};
    if (cfg_.sparsifier == SparsifierKind::kDtcwt) {
        const Coeffs4D c = forward(f, fb_, topt_);
        out.v.reserve(static_cast<size_t>(c.total_complex_count()));
        for_each_subband(c, std::function<void(const ComplexArray4D&)>(
                                [&](const ComplexArray4D& sb) { w(sb); }));
        out.scaling_begin = out.v.size() - 8 * c.final_scaling[0].size();
    } else {
        const DwtCoeffs4D c = dwt_forward(f, cfg_.levels, cfg_.wavelet);
        for_each_subband(c, std::function<void(const Volume4D&)>([&](const Volume4D& sb) { w(sb); }));
        out.scaling_begin = out.v.size() - c.approx.size();
    }
    return out;
}

Volume4D PdfpContext::synthesize(const CoefVec& c) const {
    if (cfg_.sparsifier == SparsifierKind::kDtcwt) {
        Coeffs4D full = coeff_template_;
        FlatReader r{c.v.data()};
        for_each_subband(full,
                         std::function<void(ComplexArray4D&)>([&](ComplexArray4D& sb) { r(sb); }));
        return adjoint(full, fb_);
    }
    DwtCoeffs4D full = dwt_template_;
    FlatReader r{c.v.data()};
    for_each_subband(full, std::function<void(Volume4D&)>([&](Volume4D& sb) { r(sb); }));
    return dwt_inverse(full, cfg_.wavelet);
}

Volume4D PdfpContext::backproject_residual(const Volume4D& f, const ProjectionData& m) const {
    ProjectionData af = project(f, geom_);
    for (size_t i = 0; i < af.data.size(); ++i) af.data[i] -= m.data[i];
    return backproject(af, geom_);
}

double PdfpContext::misfit(const Volume4D& f, const ProjectionData& m) const {
    ProjectionData af = project(f, geom_);
    double s = 0;
    for (size_t i = 0; i < af.data.size(); ++i) {
        double r = af.data[i] - m.data[i];
        s += r * r;
    }
    return 0.5 * s;
}

double PdfpContext::default_mu0(const ProjectionData& m) const {
    Volume4D b = backproject(m, geom_);
    double scale = norm2(b) / std::sqrt(static_cast<double>(b.size()));
    CoefVec c = analyze(b);
    double mx = 0;
    for (const auto& z : c.v) mx = std::max(mx, std::abs(z));
    (void)scale;
    return 1e-3 * mx;
}

double PdfpContext::sparsity_of(const CoefVec& thresholded) const {
    size_t end = cfg_.sparsity_includes_scaling ? thresholded.v.size() : thresholded.scaling_begin;
    if (end == 0) return 0.0;
    double mx = 0;
    for (size_t i = 0; i < end; ++i) mx = std::max(mx, std::abs(thresholded.v[i]));
    if (mx == 0) return 1.0;
    double floor = 1e-10 * mx;
    size_t small = 0;
    for (size_t i = 0; i < end; ++i)
        if (std::abs(thresholded.v[i]) < floor) ++small;
    return static_cast<double>(small) / static_cast<double>(end);
}

PdfpState pdfp_init(const PdfpContext& ctx, double mu0) {
    PdfpState st;
    st.f = Volume4D(ctx.volume_shape());
    st.d = st.f;
    st.v = ctx.analyze(st.f);  // zeros with the right layout
    st.mu = mu0;
    return st;
}

namespace {

void project_nonneg(Volume4D& v) {
    for (auto& x : v.vec())
        if (x < 0) x = 0;
}

bool finite(const Volume4D& v) {
    for (double x : v.vec())
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

void pdfp_step(PdfpState& state, const PdfpContext& ctx, const ProjectionData& m) {
    const double gamma = ctx.gamma(), lambda = ctx.lambda();
    const double tau = state.mu * gamma / lambda;
    bool v_zero = true;
    for (const auto& z : state.v.v)
        if (z != std::complex<double>(0, 0)) {
            v_zero = false;
            break;
        }
    // mu = 0 with a zero dual keeps the dual at zero: S_0 is the identity, so
    // v' = (I - S_0)(Cd + 0) = 0 and the update is projected Landweber
    const bool landweber = state.mu == 0.0 && v_zero;

    // shared data gradient at f^(i)
    Volume4D q = ctx.backproject_residual(state.f, m);
    Volume4D base = state.f;
    for (size_t i = 0; i < base.size(); ++i) base.data()[i] -= gamma * q.data()[i];

    Volume4D d, fnew;
    double sparsity = 0.0;
    CoefVec u;
    if (landweber) {
        d = base;
        project_nonneg(d);
        fnew = d;
        u = state.v;  // stays zero
    } else {
        // d^(i+1) = P+(base - lambda C* v^(i))
        Volume4D cv = ctx.synthesize(state.v);
        d = base;
        for (size_t i = 0; i < d.size(); ++i) d.data()[i] -= lambda * cv.data()[i];
        project_nonneg(d);

        // v^(i+1) = (I - S_tau)(C d + v)
        u = ctx.analyze(d);
        for (size_t i = 0; i < u.v.size(); ++i) u.v[i] += state.v.v[i];
        std::vector<std::complex<double>> shrunk = radial_soft_threshold(u.v, tau);
        CoefVec thresholded{shrunk, u.scaling_begin};
        sparsity = ctx.sparsity_of(thresholded);
        for (size_t i = 0; i < u.v.size(); ++i) u.v[i] -= shrunk[i];

        // f^(i+1) = P+(base - lambda C* v^(i+1))
        Volume4D cv2 = ctx.synthesize(u);
        fnew = base;
        for (size_t i = 0; i < fnew.size(); ++i) fnew.data()[i] -= lambda * cv2.data()[i];
        project_nonneg(fnew);
    }

    ++state.iteration;
    if (!finite(fnew)) throw DivergenceError(state.iteration);

    double diff = 0, den = 0;
    for (size_t i = 0; i < fnew.size(); ++i) {
        double r = fnew.data()[i] - state.f.data()[i];
        diff += r * r;
        den += state.f.data()[i] * state.f.data()[i];
    }
    double rel_change = den > 0 ? std::sqrt(diff / den) : (diff > 0 ? 1.0 : 0.0);

    state.d = std::move(d);
    state.v = std::move(u);
    state.f = std::move(fnew);

    PdfpHistoryRow row;
    row.iteration = state.iteration;
    row.misfit = ctx.misfit(state.f, m);
    double l1 = 0;
    if (!landweber) {
        CoefVec cf = ctx.analyze(state.f);
        for (const auto& z : cf.v) l1 += std::abs(z);
    }
    row.l1 = l1;
    row.objective = row.misfit + state.mu * l1;
    row.sparsity = sparsity;
    row.mu = state.mu;
    row.rel_change = rel_change;
    state.history.push_back(row);

    // controller with freeze rule
    const SolverConfig& cfg = ctx.config();
    if (!state.mu_frozen) {
        if (std::abs(cfg.target_sparsity - sparsity) < cfg.controller_tol)
            ++state.in_tolerance_streak;
        else
            state.in_tolerance_streak = 0;
        if (state.in_tolerance_streak >= cfg.freeze_after)
            state.mu_frozen = true;
        else if (state.mu > 0)
            state.mu = update_mu(state.mu, sparsity, cfg);
    }
}

std::pair<Volume4D, ConvergenceReport> solve(const ProjectionData& m, const Geometry& g,
                                             const SolverConfig& cfg) {
    PdfpContext ctx(g, cfg);
    double mu0 = cfg.mu0 > 0 ? cfg.mu0 : (cfg.target_sparsity > 0 ? ctx.default_mu0(m) : 0.0);
    PdfpState st = pdfp_init(ctx, mu0);
    ConvergenceReport rep;
    rep.gamma = ctx.gamma();
    rep.lambda = ctx.lambda();
    rep.operator_norm_sq = ctx.op_norm_sq();
    rep.transform_eigenvalue = ctx.transform_eig();
    rep.stop_reason = "max_iterations";
    for (int it = 0; it < cfg.max_iterations; ++it) {
        pdfp_step(st, ctx, m);
        if (st.history.back().rel_change < cfg.stop_tol && it > 0) {
            rep.stop_reason = "stop_tolerance";
            break;
        }
    }
    rep.rows = st.history;
    rep.iterations = st.iteration;
    rep.mu_frozen = st.mu_frozen;
    return {std::move(st.f), std::move(rep)};
}

Metrics metrics(const Volume4D& recon, const Volume4D& reference) {
    recon.check_same_shape(reference);
    double den = norm2(reference);
    if (den == 0) throw std::invalid_argument("reference volume has zero norm");
    Volume4D diff = recon;
    diff -= reference;
    double err = norm2(diff);
    Metrics out;
    out.relative_error = err / den;
    double peak = 0;
    for (double x : reference.vec()) peak = std::max(peak, x);
    if (err == 0) {
        out.psnr = 999.0;
    } else {
        double n = static_cast<double>(reference.size());
        out.psnr = 10.0 * std::log10(peak * peak * n / (err * err));
        out.psnr = std::min(out.psnr, 999.0);
    }
    return out;
}

SolverConfig parse_solver_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open solver config: " + path);
    SolverConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        auto num = [&](double& dst) {
            if (!(ss >> dst)) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected number");
        };
        auto integer = [&](int& dst) {
            if (!(ss >> dst)) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected int");
        };
        if (key == "gamma") num(cfg.gamma);
        else if (key == "lambda") num(cfg.lambda);
        else if (key == "mu0") num(cfg.mu0);
        else if (key == "target_sparsity") num(cfg.target_sparsity);
        else if (key == "controller_gain") num(cfg.controller_gain);
        else if (key == "controller_tol") num(cfg.controller_tol);
        else if (key == "freeze_after") integer(cfg.freeze_after);
        else if (key == "mu_min") num(cfg.mu_min);
        else if (key == "mu_max") num(cfg.mu_max);
        else if (key == "max_iterations") integer(cfg.max_iterations);
        else if (key == "stop_tol") num(cfg.stop_tol);
        else if (key == "levels") integer(cfg.levels);
        else if (key == "sparsifier") {
            std::string v;
            ss >> v;
            if (v == "dtcwt") cfg.sparsifier = SparsifierKind::kDtcwt;
            else if (v == "dwt") cfg.sparsifier = SparsifierKind::kDwt;
            else throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown sparsifier " + v);
        } else if (key == "include_level1_details") {
            int b; integer(b); cfg.include_level1_details = b != 0;
        } else if (key == "parseval") {
            int b; integer(b); cfg.parseval = b != 0;
        } else if (key == "sparsity_includes_scaling") {
            int b; integer(b); cfg.sparsity_includes_scaling = b != 0;
        } else if (key == "bank") {
            ss >> cfg.bank;
        } else if (key == "wavelet") {
            ss >> cfg.wavelet;
        } else if (key == "seed") {
            long long s; if (!(ss >> s)) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected int");
            cfg.seed = static_cast<unsigned long long>(s);
        } else {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key " + key);
        }
    }
    return cfg;
}

}  // namespace dtcwt
