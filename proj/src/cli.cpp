#include "dtcwt/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "dtcwt/experiments.hpp"
#include "dtcwt/io.hpp"
#include "dtcwt/phantoms.hpp"
#include "dtcwt/solver.hpp"

namespace fs = std::filesystem;

namespace dtcwt::cli {

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

int detector_count_for(int nx, int ny) {
    int d = static_cast<int>(std::ceil(std::hypot(nx, ny))) + 2;
    return d + (d % 2);  // even, so the fine geometry halves cleanly
}

Geometry build_geometry(const Shape4& s, int n_angles, const std::string& schedule) {
    int det = detector_count_for(s[0], s[1]);
    if (schedule == "rotating") return Geometry::rotating(s[0], s[1], s[2], s[3], det, n_angles);
    if (schedule != "uniform")
        throw CLI::ValidationError("--schedule", "must be uniform or rotating");
    return Geometry::uniform(s[0], s[1], s[2], s[3], det, n_angles);
}

// ------------------------------------------------------------- transform

struct TransformArgs {
    std::string input, output, bank = "nearsym13_19+qshift14", direction = "forward", reference;
    int levels = 2;
    bool no_level1_details = false, allow_lossy = false, check_adjoint = false, parseval = false;
};

int cmd_transform(const TransformArgs& a, unsigned long long seed) {
    Timer timer;
    FilterBank fb = resolve_filter_bank(a.bank);
    TransformOptions opt;
    opt.levels = a.levels;
    opt.include_level1_details = !a.no_level1_details;
    opt.normalization = a.parseval ? Normalization::kParseval : Normalization::kStandard;
    RunManifest man;
    man.command = "transform";
    man.seed = seed;
    man.add("input", a.input);
    man.add("output", a.output);
    man.add("bank", fb.name);
    man.add("direction", a.direction);
    man.add("levels", static_cast<long long>(a.levels));
    man.add("include_level1_details", static_cast<long long>(opt.include_level1_details));
    man.add("normalization", a.parseval ? "parseval" : "standard");

    if (a.direction == "forward") {
        Volume4D v = load_volume(a.input);
        Coeffs4D c = forward(v, fb, opt);
        save_coeffs(c, a.output);
    } else if (a.direction == "inverse" || a.direction == "adjoint") {
        Coeffs4D c = load_coeffs(a.input);
        Volume4D v = a.direction == "inverse" ? inverse(c, fb, a.allow_lossy) : adjoint(c, fb);
        save_volume(v, a.output);
        if (!a.reference.empty()) {
            Volume4D ref = load_volume(a.reference);
            Volume4D diff = v;
            diff -= ref;
            double rel = norm2(diff) / norm2(ref);
            std::printf("round-trip relative error: %.6e\n", rel);
            man.add("roundtrip_relative_error", rel);
        }
        if (a.check_adjoint && !a.reference.empty()) {
            Volume4D ref = load_volume(a.reference);
            Coeffs4D cf = forward(ref, fb, opt);
            double lhs = coeffs_dot(cf, c);
            double rhs = dot(ref, adjoint(c, fb));
            double denom = std::sqrt(coeffs_energy(cf)) * std::sqrt(coeffs_energy(c));
            double resid = std::abs(lhs - rhs) / denom;
            std::printf("adjoint dot-test residual: %.6e\n", resid);
            man.add("adjoint_dot_residual", resid);
        }
    } else {
        throw CLI::ValidationError("--direction", "must be forward, inverse or adjoint");
    }
    man.elapsed_seconds = timer.seconds();
    man.write(a.output);
    return 0;
}

// ------------------------------------------------------------- demo

struct DemoArgs {
    std::string name, output = "demo-out", bank = "nearsym13_19+qshift14";
    int size = 16, levels = 2;
};

int cmd_demo(const DemoArgs& a, unsigned long long seed) {
    Timer timer;
    FilterBank fb = resolve_filter_bank(a.bank);
    fs::create_directories(a.output);
    RunManifest man;
    man.command = "demo";
    man.seed = seed;
    man.add("name", a.name);
    man.add("bank", fb.name);
    man.add("size", static_cast<long long>(a.size));
    man.add("levels", static_cast<long long>(a.levels));

    if (a.name == "shift-invariance") {
        Shape4 s{a.size, a.size, a.size, a.size};
        auto r = shift_invariance_experiment(fb, s, a.levels, a.size / 6.0);
        write_csv(a.output + "/shift_invariance.csv", {"transform", "subband", "mean_energy", "cov"},
                  r.table);
        write_csv(a.output + "/shift_invariance_summary.csv", {"cov_dtcwt", "cov_dwt", "ratio"},
                  {{r.cov_dtcwt, r.cov_dwt, r.cov_dtcwt / r.cov_dwt}});
        std::printf("shift-invariance: cov dtcwt %.4e, dwt %.4e, ratio %.4f\n", r.cov_dtcwt, r.cov_dwt,
                    r.cov_dtcwt / r.cov_dwt);
    } else if (a.name == "directionality") {
        Shape4 s{a.size, a.size, a.size, a.size};
        auto r = directionality_experiment(fb, s, a.levels);
        std::vector<std::vector<double>> rows;
        for (int z = 0; z < 8; ++z)
            rows.push_back({static_cast<double>(z + 1), r.matched_fraction[static_cast<size_t>(z)]});
        write_csv(a.output + "/directionality.csv", {"orthant", "matched_fraction"}, rows);
        std::printf("directionality: min matched fraction %.4f\n", r.min_fraction);
    } else if (a.name == "growing-ball-subband") {
        PhantomSpec spec;
        spec.kind = PhantomSpec::Kind::kGrowingBall;
        spec.extents = {a.size, a.size, a.size, 2 * a.size};
        spec.radius_start = a.size / 8.0;
        spec.radius_end = a.size / 2.5;
        spec.supersampling = 2;
        Volume4D ball = growing_ball(spec);
        TransformOptions opt;
        opt.levels = a.levels;
        // single configuration LLHL (high-pass along z): vertical features
        int kappa = 4;
        Coeffs4D c = forward(ball, fb, opt);
        Coeffs4D only = coeffs_like(c);
        for (int z = 0; z < 8; ++z)
            only.subbands[static_cast<size_t>(a.levels - 1)][static_cast<size_t>(kappa - 1)][static_cast<size_t>(z)] =
                c.subbands[static_cast<size_t>(a.levels - 1)][static_cast<size_t>(kappa - 1)][static_cast<size_t>(z)];
        Volume4D rec_cwt = inverse(only, fb);
        DwtCoeffs4D w = dwt_forward(ball, a.levels);
        DwtCoeffs4D wonly = w;
        for_each_subband(wonly, std::function<void(Volume4D&)>([](Volume4D& sb) { sb.fill(0.0); }));
        wonly.details[static_cast<size_t>(a.levels - 1)][static_cast<size_t>(kappa - 1)] =
            w.details[static_cast<size_t>(a.levels - 1)][static_cast<size_t>(kappa - 1)];
        Volume4D rec_dwt = dwt_inverse(wonly);
        double lim = 0;
        for (double x : rec_cwt.vec()) lim = std::max(lim, std::abs(x));
        for (double x : rec_dwt.vec()) lim = std::max(lim, std::abs(x));
        int tmid = spec.extents[3] / 2;
        for (auto& [vol, tag] : {std::pair<Volume4D&, const char*>{rec_cwt, "dtcwt"},
                                 std::pair<Volume4D&, const char*>{rec_dwt, "dwt"}}) {
            std::string dir = a.output + "/" + tag;
            export_slice(vol, {SlicePlane::kXZ, a.size / 2, tmid}, dir, -lim, lim);
            export_slice(vol, {SlicePlane::kXY, a.size / 2, tmid}, dir, -lim, lim);
        }
        man.add("window_lo", -lim);
        man.add("window_hi", lim);
        std::printf("growing-ball-subband: wrote single-configuration reconstructions (|max| %.3e)\n", lim);
    } else {
        throw CLI::ValidationError("demo", "unknown demo \"" + a.name +
                                               "\" (shift-invariance, directionality, growing-ball-subband)");
    }
    man.elapsed_seconds = timer.seconds();
    man.write(a.output);
    return 0;
}

// ------------------------------------------------------------- reconstruct

struct ReconstructArgs {
    std::string preset, phantom_config, sinogram, output = "recon-out";
    std::string sparsifier = "both", schedule = "uniform";
    int angles = 30, max_iters = 70, levels = 2;
    double noise = 0.05, mu0 = 0.0, d_cwt = 0.6, d_dwt = 0.5;
    bool no_level1_details = false, intra_step_motion = false;
    std::string bank = "nearsym13_19+qshift14", wavelet = "db2";
    std::vector<int> slice_times;
};

PhantomSpec preset_phantom(const std::string& preset) {
    PhantomSpec spec;
    if (preset == "dsl-32") {
        spec.kind = PhantomSpec::Kind::kDynamicEllipsoids;
        spec.extents = {32, 32, 32, 8};
        spec.amplitude = 0.08;
        spec.supersampling = 2;
    } else if (preset == "ball-16") {
        spec.kind = PhantomSpec::Kind::kGrowingBall;
        spec.extents = {16, 16, 16, 16};
        spec.radius_start = 3.0;
        spec.radius_end = 6.5;
        spec.supersampling = 4;
    } else {
        throw CLI::ValidationError("--preset", "unknown preset \"" + preset + "\" (dsl-32, ball-16)");
    }
    return spec;
}

ProjectionData simulate_intra_step(const PhantomSpec& spec, const Geometry& g, double noise_rel,
                                   unsigned long long seed) {
    // evaluate the continuous phantom at t + k/n_angles per projection angle
    Geometry fg = fine_geometry(g);
    PhantomSpec fine_spec = spec;
    fine_spec.extents[0] *= 2;
    fine_spec.extents[1] *= 2;
    ProjectionData fine;
    fine.geom = fg;
    fine.data.assign(static_cast<size_t>(fg.total_rays()), 0.0);
    for (int t = 0; t < g.nt; ++t) {
        int na = g.angles_at(t);
        for (int a = 0; a < na; ++a) {
            PhantomSpec frame_spec = fine_spec;
            frame_spec.extents[3] = spec.extents[3];  // keep the period reference
            Volume4D frame = phantom_at_times(frame_spec, {t + static_cast<double>(a) / na});
            Geometry g1 = fg;
            g1.nt = 1;
            g1.angles = {fg.angles[static_cast<size_t>(t)]};
            g1.angles[0] = {fg.angles[static_cast<size_t>(t)][static_cast<size_t>(a)]};
            ProjectionData row = project(frame, g1);
            for (int z = 0; z < g.nz; ++z)
                for (int bin = 0; bin < fg.det_count; ++bin)
                    fine.at(t, a, z, bin) = row.at(0, 0, z, bin);
        }
    }
    // downsample detector pairs + noise (same convention as simulate_measurements)
    ProjectionData out;
    out.geom = g;
    out.data.assign(static_cast<size_t>(g.total_rays()), 0.0);
    for (int t = 0; t < g.nt; ++t)
        for (int a = 0; a < g.angles_at(t); ++a)
            for (int z = 0; z < g.nz; ++z)
                for (int bin = 0; bin < g.det_count; ++bin)
                    out.at(t, a, z, bin) = 0.5 * (fine.at(t, a, z, 2 * bin) + fine.at(t, a, z, 2 * bin + 1));
    if (noise_rel > 0) {
        double mx = 0;
        for (double v : out.data) mx = std::max(mx, std::abs(v));
        GaussianSampler gauss(seed);
        for (auto& v : out.data) v += noise_rel * mx * gauss();
    }
    return out;
}

int cmd_reconstruct(const ReconstructArgs& a, unsigned long long seed) {
    Timer timer;
    RunManifest man;
    man.command = "reconstruct";
    man.seed = seed;
    fs::create_directories(a.output);

    ProjectionData m;
    Volume4D reference;
    bool have_reference = false;
    if (!a.sinogram.empty()) {
        m = load_sinogram(a.sinogram);
        man.add("sinogram", a.sinogram);
    } else {
        PhantomSpec spec = a.phantom_config.empty() ? preset_phantom(a.preset.empty() ? "dsl-32" : a.preset)
                                                    : parse_phantom_spec(a.phantom_config);
        man.add("preset", a.preset.empty() ? (a.phantom_config.empty() ? "dsl-32" : a.phantom_config)
                                           : a.preset);
        Geometry g = build_geometry(spec.extents, a.angles, a.schedule);
        if (a.intra_step_motion) {
            reference = make_phantom(spec);  // motion frozen per step for the reference
            m = simulate_intra_step(spec, g, a.noise, seed);
        } else {
            auto [fine, coarse] = fine_and_coarse(spec);
            reference = std::move(coarse);
            m = simulate_measurements(fine, g, a.noise, seed);
        }
        have_reference = true;
        save_volume(reference, a.output + "/reference");
        save_sinogram(m, a.output + "/sinogram");
    }
    man.add("angles", static_cast<long long>(a.angles));
    man.add("noise", a.noise);
    man.add("schedule", a.schedule);
    man.add("levels", static_cast<long long>(a.levels));
    man.add("max_iterations", static_cast<long long>(a.max_iters));
    man.add("bank", a.bank);
    man.add("wavelet", a.wavelet);
    man.add("intra_step_motion", static_cast<long long>(a.intra_step_motion));

    std::vector<std::pair<std::string, SparsifierKind>> runs;
    if (a.sparsifier == "both" || a.sparsifier == "dtcwt") runs.emplace_back("dtcwt", SparsifierKind::kDtcwt);
    if (a.sparsifier == "both" || a.sparsifier == "dwt") runs.emplace_back("dwt", SparsifierKind::kDwt);
    if (runs.empty())
        throw CLI::ValidationError("--sparsifier", "must be dtcwt, dwt or both");

    std::vector<std::vector<double>> metric_rows;
    std::ofstream metrics_txt(a.output + "/metrics.txt");
    for (auto& [tag, kind] : runs) {
        SolverConfig cfg;
        cfg.sparsifier = kind;
        cfg.levels = a.levels;
        cfg.max_iterations = a.max_iters;
        cfg.mu0 = a.mu0;
        cfg.target_sparsity = kind == SparsifierKind::kDtcwt ? a.d_cwt : a.d_dwt;
        cfg.include_level1_details = !a.no_level1_details;
        cfg.bank = a.bank;
        cfg.wavelet = a.wavelet;
        cfg.seed = seed;
        auto [vol, rep] = solve(m, m.geom, cfg);
        save_volume(vol, a.output + "/recon_" + tag);
        write_convergence_csv(rep, a.output + "/convergence_" + tag + ".csv");
        man.add(tag + "_gamma", rep.gamma);
        man.add(tag + "_lambda", rep.lambda);
        man.add(tag + "_iterations", static_cast<long long>(rep.iterations));
        if (have_reference) {
            Metrics mt = metrics(vol, reference);
            metric_rows.push_back({kind == SparsifierKind::kDtcwt ? 0.0 : 1.0, mt.relative_error, mt.psnr});
            std::printf("%-6s relative error %.4f  psnr %.2f dB  (%d iterations)\n", tag.c_str(),
                        mt.relative_error, mt.psnr, rep.iterations);
            metrics_txt << tag << " relative_error " << mt.relative_error << " psnr " << mt.psnr << "\n";
        }
        double lim = 0;
        for (double x : vol.vec()) lim = std::max(lim, x);
        std::vector<int> times = a.slice_times;
        if (times.empty()) times = {vol.extent(3) / 4, vol.extent(3) / 2, 3 * vol.extent(3) / 4};
        for (int t : times)
            export_slice(vol, {SlicePlane::kXY, vol.extent(2) / 2, t}, a.output + "/slices_" + tag, 0.0,
                         lim > 0 ? lim : 1.0);
    }
    if (have_reference)
        write_csv(a.output + "/metrics.csv", {"sparsifier", "relative_error", "psnr"}, metric_rows);
    man.elapsed_seconds = timer.seconds();
    man.write(a.output);
    return 0;
}

// ------------------------------------------------------------- validate-bank

int cmd_validate_bank(const std::string& bank) {
    FilterBank fb = resolve_filter_bank(bank);
    ValidationReport rep = validate_filter_bank(fb);
    std::printf("filter bank: %s\n", fb.name.c_str());
    for (const auto& c : rep.checks)
        std::printf("  %-40s %s  residual %.3e (threshold %.3e)%s\n", c.name.c_str(),
                    c.passed ? "pass" : "FAIL", c.residual, c.threshold,
                    c.informational ? "  [informational]" : "");
    std::printf("%s\n", rep.all_passed() ? "all required checks passed" : "required checks FAILED");
    return 0;
}

// ------------------------------------------------------------- export

struct ExportArgs {
    std::string input, output = "slices", plane = "xy";
    int index = 0, time = 0;
    std::vector<double> window;
};

int cmd_export(const ExportArgs& a, unsigned long long seed) {
    Timer timer;
    Volume4D v = load_volume(a.input);
    SlicePick pick;
    if (a.plane == "xy") pick.plane = SlicePlane::kXY;
    else if (a.plane == "xz") pick.plane = SlicePlane::kXZ;
    else if (a.plane == "yz") pick.plane = SlicePlane::kYZ;
    else throw CLI::ValidationError("--plane", "must be xy, xz or yz");
    pick.index = a.index;
    pick.time = a.time;
    double lo = 0, hi = 0;
    if (a.window.size() == 2) {
        lo = a.window[0];
        hi = a.window[1];
    } else {
        for (double x : v.vec()) hi = std::max(hi, x);
        if (hi == 0) hi = 1.0;
    }
    std::string name = export_slice(v, pick, a.output, lo, hi);
    RunManifest man;
    man.command = "export";
    man.seed = seed;
    man.add("input", a.input);
    man.add("file", name);
    man.add("window_lo", lo);
    man.add("window_hi", hi);
    man.elapsed_seconds = timer.seconds();
    man.write(a.output);
    std::printf("wrote %s/%s\n", a.output.c_str(), name.c_str());
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"4D dual-tree complex wavelet transforms and dynamic tomography"};
    app.set_config("--config");
    unsigned long long seed = 1;
    int threads = 1;
    app.add_option("--seed", seed, "global random seed");
    app.add_option("--threads", threads, "worker threads");

    TransformArgs ta;
    auto* t = app.add_subcommand("transform", "forward/inverse/adjoint 4D DT-CWT on containers");
    t->add_option("--input", ta.input)->required();
    t->add_option("--output", ta.output)->required();
    t->add_option("--direction", ta.direction, "forward|inverse|adjoint");
    t->add_option("--levels", ta.levels);
    t->add_option("--bank", ta.bank, "built-in name or bank file");
    t->add_flag("--no-level1-details", ta.no_level1_details);
    t->add_flag("--allow-lossy", ta.allow_lossy);
    t->add_flag("--check-adjoint", ta.check_adjoint);
    t->add_flag("--parseval", ta.parseval);
    t->add_option("--reference", ta.reference, "original volume for round-trip/adjoint reports");

    DemoArgs da;
    auto* d = app.add_subcommand("demo", "property demonstrations (both transforms)");
    d->add_option("name", da.name, "shift-invariance|directionality|growing-ball-subband")->required();
    d->add_option("--output", da.output);
    d->add_option("--bank", da.bank);
    d->add_option("--size", da.size);
    d->add_option("--levels", da.levels);

    ReconstructArgs ra;
    auto* r = app.add_subcommand("reconstruct", "PDFP reconstruction from simulated or stored data");
    r->add_option("--preset", ra.preset, "dsl-32|ball-16");
    r->add_option("--phantom-config", ra.phantom_config);
    r->add_option("--sinogram", ra.sinogram, "stored sinogram container");
    r->add_option("--output", ra.output);
    r->add_option("--sparsifier", ra.sparsifier, "dtcwt|dwt|both");
    r->add_option("--angles", ra.angles);
    r->add_option("--noise", ra.noise);
    r->add_option("--mu0", ra.mu0);
    r->add_option("--target-sparsity-cwt", ra.d_cwt);
    r->add_option("--target-sparsity-dwt", ra.d_dwt);
    r->add_option("--max-iters", ra.max_iters);
    r->add_option("--levels", ra.levels);
    r->add_option("--schedule", ra.schedule, "uniform|rotating");
    r->add_option("--bank", ra.bank);
    r->add_option("--wavelet", ra.wavelet);
    r->add_option("--slice-times", ra.slice_times);
    r->add_flag("--no-level1-details", ra.no_level1_details);
    r->add_flag("--intra-step-motion", ra.intra_step_motion);

    std::string vb_bank = "nearsym13_19+qshift14";
    auto* vb = app.add_subcommand("validate-bank", "run the filter bank validation oracles");
    vb->add_option("--bank", vb_bank);

    ExportArgs ea;
    auto* e = app.add_subcommand("export", "export grayscale slice images");
    e->add_option("--input", ea.input)->required();
    e->add_option("--output", ea.output);
    e->add_option("--plane", ea.plane);
    e->add_option("--index", ea.index);
    e->add_option("--time", ea.time);
    e->add_option("--window", ea.window)->expected(2);

    app.require_subcommand(1);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& ex) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& ex) {
        std::cerr << ex.what() << "\n" << app.help();
        return 2;
    }

    set_worker_threads(threads);
    try {
        if (*t) return cmd_transform(ta, seed);
        if (*d) return cmd_demo(da, seed);
        if (*r) return cmd_reconstruct(ra, seed);
        if (*vb) return cmd_validate_bank(vb_bank);
        if (*e) return cmd_export(ea, seed);
    } catch (const CLI::ParseError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace dtcwt::cli
