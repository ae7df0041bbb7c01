#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "hlab/config.hpp"
#include "hlab/discs.hpp"
#include "hlab/entropy.hpp"
#include "hlab/green.hpp"
#include "hlab/parallel.hpp"
#include "hlab/verify.hpp"

namespace fs = std::filesystem;
using namespace hlab;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

cplx parse_cplx(const std::string& s) {
    std::size_t pos = 0;
    const double re = std::stod(s, &pos);
    double im = 0.0;
    if (pos < s.size()) {
        if (s[pos] != ',') throw CLI::ValidationError("expected re,im: " + s);
        im = std::stod(s.substr(pos + 1));
    }
    return cplx(re, im);
}

HenonLikeMap pick_map(const ExperimentConfig& cfg) {
    return cfg.map_file.empty() ? standard_map() : load_map(cfg.map_file);
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

PotentialField read_potential(const std::string& path) {
    std::uint8_t orient = 0;
    double floor_value = kFloor;
    Grid4 g = read_grid_file(path, &orient, &floor_value);
    const Bidisk D(g.axis(0).hi, g.axis(2).hi, 0.8, 0.8, 0.9);
    return PotentialField(std::move(g), static_cast<Orientation>(orient), D,
                          floor_value);
}

int finish(RunManifest& m, const ExperimentConfig& cfg,
           const std::string& name, double t0) {
    m.set_wall_seconds(now_s() - t0);
    m.write(out_path(cfg, name + "-manifest.json"));
    return m.all_pass() ? 0 : 1;
}

int run_verify_map(const ExperimentConfig& cfg) {
    const double t0 = now_s();
    const HenonLikeMap f = pick_map(cfg);
    RunManifest m("verify-map", cfg);
    const HorizontalLikeReport hr =
        check_horizontal_like(f, f.domain(), 200, cfg.seed);
    m.add_check("horizontal_like_forward_margin", hr.forward_margin,
                hr.pass);
    m.add_check("horizontal_like_backward_margin", hr.backward_margin,
                hr.pass);
    const DegreeReport dr = dynamical_degree(f, f.domain(), 20, cfg.seed);
    m.add_check("dynamical_degree", dr.degree,
                !dr.ambiguous && dr.degree == f.poly_degree());
    m.add_check("degree_modal_fraction", dr.modal_fraction,
                dr.modal_fraction >= 0.95);
    std::cout << "verify-map: " << (m.all_pass() ? "pass" : "FAIL")
              << " (degree " << dr.degree << ", modal "
              << dr.modal_fraction << ")\n";
    return finish(m, cfg, "verify-map", t0);
}

int run_green(const ExperimentConfig& cfg, int n, const std::string& dir_s,
              const std::string& seed_kind, const std::string& out,
              const std::string& diag) {
    const double t0 = now_s();
    const HenonLikeMap f = pick_map(cfg);
    const GreenDirection dir = dir_s == "backward" ? GreenDirection::backward
                                                   : GreenDirection::forward;
    RunManifest m("green", cfg);
    m.add_note("direction", dir_s);
    m.add_note("seed_kind", seed_kind);

    PotentialField seed;
    if (seed_kind == "canonical") {
        seed = canonical_seed(f.domain(), cfg.resolution);
    } else if (seed_kind.rfind("line:", 0) == 0) {
        seed = vertical_line(parse_cplx(seed_kind.substr(5)), f.domain(),
                             cfg.resolution);
    } else if (seed_kind.rfind("smoothline:", 0) == 0) {
        // re,im,s — line at re+im*i mollified at scale s
        const std::string spec = seed_kind.substr(11);
        const std::size_t cut = spec.rfind(',');
        if (cut == std::string::npos)
            throw CLI::ValidationError("expected smoothline:re,im,s");
        seed = smoothed_vertical_line(parse_cplx(spec.substr(0, cut)),
                                      std::stod(spec.substr(cut + 1)),
                                      f.domain(), cfg.resolution);
    } else if (seed_kind.rfind("grid:", 0) == 0) {
        seed = read_potential(seed_kind.substr(5));
    } else {
        throw CLI::ValidationError(
            "--seed must be canonical|line:a|smoothline:a,s|grid:f");
    }
    if (dir == GreenDirection::backward)
        seed = transpose_potential(seed);

    MapSequence seq{{f}, {f.poly_degree()}, f.domain()};
    const GreenRun run =
        green_iterate(seq, {seed}, n, cfg.resolution, false, dir);
    write_grid_file(out, run.final_potential.grid(),
                    static_cast<std::uint8_t>(
                        run.final_potential.orientation()),
                    run.final_potential.floor_value());
    m.add_output(out);
    if (!diag.empty()) {
        std::ofstream d(diag);
        d << "stage,delta,slice_mass\n";
        for (std::size_t k = 0; k < run.slice_masses.size(); ++k) {
            d << k << ',';
            if (k >= 1 && k - 1 < run.deltas.size())
                d << format_scalar(run.deltas[k - 1]);
            d << ',' << format_scalar(run.slice_masses[k]) << "\n";
        }
        d.close();
        m.add_output(diag);
    }
    const double mass = run.slice_masses.empty()
                            ? 0.0
                            : run.slice_masses.back();
    m.add_check("slice_mass", mass, std::abs(mass - 1.0) < 10 * cfg.tolerance);
    if (n >= 6)
        m.add_check("deltas_geometric", run.delta_fit.slope,
                    run.deltas_geometric());
    std::cout << "green: stages=" << run.stages << " slice_mass="
              << format_scalar(mass) << "\n";
    return finish(m, cfg, "green-" + fs::path(out).stem().string(), t0);
}

int run_equilibrium(const ExperimentConfig& cfg, int n, const std::string& out,
                    int mixing_m, int moments_k) {
    const double t0 = now_s();
    const HenonLikeMap f = pick_map(cfg);
    RunManifest m("equilibrium", cfg);
    m.add_note("route", cfg.route);
    Rng rng(cfg.seed);
    const cplx a = rng.disk(0.9 * f.domain().inner_m_radius());
    const cplx b = rng.disk(0.9 * f.domain().inner_n_radius());

    MuCloud mu;
    if (cfg.route == "points") {
        mu = mu_points(f, a, b, n);
        m.add_check("roots_found_fraction",
                    static_cast<double>(mu.roots_found) / mu.roots_expected,
                    mu.generic_ok);
    } else if (cfg.route == "wedge") {
        mu = cloud_from_wedge(mu_wedge(f, n), n, MuRoute::wedge);
    } else if (cfg.route == "forms") {
        const PotentialField R =
            smoothed_vertical_line(cplx(0.3, -0.2), 0.8, f.domain());
        const PotentialField S =
            smoothed_horizontal_line(cplx(-0.1, 0.25), 0.8, f.domain());
        mu = cloud_from_wedge(mu_forms(f, R, S, n, n), n, MuRoute::forms);
    } else {
        throw CLI::ValidationError("--route must be points|wedge|forms");
    }
    mu.measure.write_csv(out);
    m.add_output(out);
    const double mass = mu.measure.total_mass();
    m.add_check("mass", mass,
                std::abs(mass - 1.0) <
                    (cfg.route == "points" ? 1e-9 : 5e-3));
    if (moments_k > 0) {
        const std::string mout = out_path(cfg, "equilibrium-moments.csv");
        std::ofstream mf(mout);
        mf << "index,value\n";
        const std::vector<double> mom = mu.measure.moments(moments_k);
        for (std::size_t i = 0; i < mom.size(); ++i)
            mf << i << ',' << format_scalar(mom[i]) << "\n";
        mf.close();
        m.add_output(mout);
    }
    if (mixing_m > 0) {
        const std::string xout = out_path(cfg, "equilibrium-mixing.csv");
        std::ofstream xf(xout);
        xf << "m,correlation,escaped\n";
        const auto phi = [](Pt2 x) { return x.z.real(); };
        const auto psi = [](Pt2 x) { return x.w.real(); };
        for (int mm = 0; mm <= mixing_m; ++mm) {
            const MixingResult r = mixing_correlation(mu, f, phi, psi, mm);
            xf << mm << ',' << format_scalar(r.value) << ','
               << r.escaped_atoms << "\n";
        }
        xf.close();
        m.add_output(xout);
    }
    std::cout << "equilibrium: route=" << cfg.route << " atoms="
              << mu.measure.size() << " mass=" << format_scalar(mass) << "\n";
    return finish(m, cfg, "equilibrium-" + fs::path(out).stem().string(), t0);
}

int run_intersect(const ExperimentConfig& cfg, const std::string& r_path,
                  const std::string& s_path, const std::string& schedule_s,
                  const std::string& out) {
    const double t0 = now_s();
    RunManifest m("intersect", cfg);
    const PotentialField R = read_potential(r_path);
    const PotentialField S = read_potential(s_path);
    // default: direct contraction of the FD coefficient forms (node values
    // of file grids are exact, so this is free of interpolation kinks);
    // an explicit schedule selects the disc-regularized route instead.
    WedgeResult w;
    if (schedule_s.empty()) {
        w = wedge_smooth(sampled_form(R, cfg.resolution),
                         sampled_form(S, cfg.resolution));
    } else {
        std::vector<double> schedule;
        std::istringstream ss(schedule_s);
        std::string tok;
        while (std::getline(ss, tok, ',')) schedule.push_back(std::stod(tok));
        w = wedge_regularized(R, S, schedule, cfg.resolution);
    }
    w.atoms().write_csv(out);
    m.add_output(out);
    const double expect = slice_mass(R).mean * slice_mass(S).mean;
    m.add_check("mass", w.mass,
                std::abs(w.mass - expect) < 10 * cfg.tolerance);
    m.add_check("positivity", w.min_density, w.positivity_ok);
    std::cout << "intersect: mass=" << format_scalar(w.mass) << " expected="
              << format_scalar(expect) << "\n";
    return finish(m, cfg, "intersect-" + fs::path(out).stem().string(), t0);
}

int run_discs(const ExperimentConfig& cfg, int theta_grid,
              const std::string& phi_path, const std::string& report) {
    const double t0 = now_s();
    const HenonLikeMap f = pick_map(cfg);
    RunManifest m("discs", cfg);
    StructuralDiscSpec spec{vertical_line(cplx(0), f.domain(), 16)};
    spec.kernel = SmoothingKernel(0.3);
    CoefficientForm phi;
    if (phi_path.empty()) {
        phi = lemma_base_form(f.domain(), kFormRes, 2);
    } else {
        phi = sampled_form(read_potential(phi_path), kFormRes);
    }
    std::vector<cplx> thetas;
    for (int i = 0; i < theta_grid; ++i)
        thetas.push_back(cplx(0.15 + 0.7 * i / std::max(1, theta_grid - 1),
                              0.0));
    const SubharmonicityReport rep =
        subharmonicity_check(spec, phi, thetas, {0.05, 0.1});
    {
        std::ofstream rf(report);
        rf << "theta_re,theta_im,pairing,violation\n";
        for (const auto& [th, val] : rep.values)
            rf << format_scalar(th.real()) << ',' << format_scalar(th.imag())
               << ',' << format_scalar(val) << ','
               << format_scalar(rep.worst_violation) << "\n";
    }
    m.add_output(report);
    m.add_check("worst_violation", rep.worst_violation,
                rep.worst_violation <= cfg.tolerance);
    std::cout << "discs: centers=" << rep.centers << " worst_violation="
              << format_scalar(rep.worst_violation) << "\n";
    return finish(m, cfg, "discs-" + fs::path(report).stem().string(), t0);
}

int run_entropy(const ExperimentConfig& cfg, const std::string& method,
                int n_max, double eps, int samples, const std::string& out) {
    const double t0 = now_s();
    const HenonLikeMap f = pick_map(cfg);
    RunManifest m("entropy", cfg);
    m.add_note("method", method);
    EntropyEstimate e;
    if (method == "lov") {
        e = lov_estimate(f, n_max, samples, false, cfg.seed);
    } else {
        // deep enough solves that n_max forward steps stay controlled
        const int depth = n_max / 2 + 1;
        const int atom_step = std::max(0, 2 * depth - n_max);
        double per = 1.0;
        for (int i = 0; i < 2 * depth; ++i) per *= f.poly_degree();
        const int clouds =
            std::max(1, static_cast<int>(samples / per + 0.5));
        const MuCloud K =
            k_proxy_samples(f, clouds, depth, cfg.seed, atom_step);
        m.add_check("sample_completeness",
                    static_cast<double>(K.roots_found) / K.roots_expected,
                    K.generic_ok);
        e = method == "separated"
                ? separated_entropy(f, K.measure, n_max, eps)
                : bowen_measure_entropy(K, f, n_max, eps);
    }
    {
        std::ofstream of(out);
        of << "n,raw\n";
        for (std::size_t i = 0; i < e.n_values.size(); ++i)
            of << e.n_values[i] << ',' << format_scalar(e.raw[i]) << "\n";
    }
    m.add_output(out);
    m.add_check("rate", e.rate, std::isfinite(e.rate));
    m.add_check("band", e.band, std::isfinite(e.band));
    m.add_note("saturated", e.saturated ? "true" : "false");
    m.add_note("undersampled", e.undersampled ? "true" : "false");
    std::cout << "entropy: method=" << method << " rate="
              << format_scalar(e.rate) << " band=" << format_scalar(e.band)
              << "\n";
    return finish(m, cfg, "entropy-" + method + "-" + fs::path(out).stem().string(), t0);
}

int run_report(const ExperimentConfig& cfg, const std::string& dir) {
    const std::vector<ReportRow> rows = aggregate_report(dir);
    write_report_csv(out_path(cfg, "report.csv"), rows);
    bool ok = true;
    for (const ReportRow& r : rows) {
        std::cout << r.run << "  " << r.check << "  " << r.value << "  "
                  << r.status << "\n";
        if (r.status == "fail" || r.status == "mismatch" ||
            r.status == "missing")
            ok = false;
    }
    if (rows.empty()) std::cout << "(no runs found)\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for horizontal-like maps in C^2"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    if (const char* env = std::getenv("HLAB_OUT_DIR")) cfg.out_dir = env;
    std::string config_file;
    app.add_option("--config", config_file, "experiment config file");
    app.add_option("--map", cfg.map_file, "map definition file");
    app.add_option("--out-dir", cfg.out_dir, "output directory");
    app.add_option("--resolution", cfg.resolution, "grid nodes per axis");
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_option("--threads", cfg.threads, "worker threads");
    app.add_option("--tolerance", cfg.tolerance, "check tolerance");

    auto* c_verify = app.add_subcommand("verify-map", "map sanity checks");

    int g_n = 12;
    std::string g_dir = "forward", g_seed = "canonical";
    std::string g_out = "green.grid", g_diag;
    auto* c_green = app.add_subcommand("green", "iterated potential");
    c_green->add_option("--n", g_n, "stages");
    c_green->add_option("--direction", g_dir, "forward|backward");
    c_green->add_option("--seed-potential", g_seed,
                        "canonical|line:re,im|smoothline:re,im,s|grid:file");
    c_green->add_option("--out", g_out, "output grid file");
    c_green->add_option("--diagnostics", g_diag, "stage csv");

    int e_n = 3, e_mix = 0, e_mom = 0;
    std::string e_out = "cloud.csv";
    auto* c_eq = app.add_subcommand("equilibrium", "intersection measure");
    c_eq->add_option("--n", e_n, "depth");
    c_eq->add_option("--route", cfg.route, "points|wedge|forms");
    c_eq->add_option("--out", e_out, "cloud csv");
    c_eq->add_option("--mixing", e_mix, "correlation rows up to m");
    c_eq->add_option("--moments", e_mom, "moment degree to emit");

    std::string i_r, i_s, i_sched, i_out = "wedge.csv";
    auto* c_int = app.add_subcommand("intersect", "current wedge");
    c_int->add_option("--r", i_r, "vertical grid file")->required();
    c_int->add_option("--s", i_s, "horizontal grid file")->required();
    c_int->add_option("--schedule", i_sched,
                      "eps schedule for the disc-regularized route "
                      "(default: direct contraction)");
    c_int->add_option("--out", i_out, "cell-atom csv");

    int d_nt = 9;
    std::string d_phi, d_report = "discs.csv";
    auto* c_discs = app.add_subcommand("discs", "disc family probes");
    c_discs->add_option("--theta-grid", d_nt, "theta samples");
    c_discs->add_option("--phi", d_phi, "test-form potential grid");
    c_discs->add_option("--report", d_report, "report csv");

    std::string n_method = "separated", n_out = "entropy.csv";
    int n_nmax = 8, n_samples = 10240;
    double n_eps = 0.05;
    auto* c_ent = app.add_subcommand("entropy", "growth-rate estimators");
    c_ent->add_option("--method", n_method, "separated|bowen|lov");
    c_ent->add_option("--n-max", n_nmax, "max depth");
    c_ent->add_option("--epsilon", n_eps, "metric scale");
    c_ent->add_option("--samples", n_samples, "sample budget");
    c_ent->add_option("--out", n_out, "raw-curve csv");

    std::string r_dir;
    auto* c_rep = app.add_subcommand("report", "aggregate run manifests");
    c_rep->add_option("--dir", r_dir, "run directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (!config_file.empty()) {
            ExperimentConfig file_cfg = ExperimentConfig::from_file(config_file);
            // explicit flags already wrote into cfg; fill unset-looking
            // fields from the file by re-applying file values first
            file_cfg.map_file = cfg.map_file.empty() ? file_cfg.map_file
                                                     : cfg.map_file;
            if (app.count("--out-dir")) file_cfg.out_dir = cfg.out_dir;
            if (app.count("--resolution"))
                file_cfg.resolution = cfg.resolution;
            if (app.count("--seed")) file_cfg.seed = cfg.seed;
            if (app.count("--threads")) file_cfg.threads = cfg.threads;
            if (app.count("--tolerance")) file_cfg.tolerance = cfg.tolerance;
            if (c_eq->count("--route")) file_cfg.route = cfg.route;
            cfg = file_cfg;
        }
        cfg.validate();
        set_thread_count(cfg.threads);

        if (*c_verify) return run_verify_map(cfg);
        if (*c_green)
            return run_green(cfg, g_n, g_dir, g_seed,
                             out_path(cfg, g_out),
                             g_diag.empty() ? "" : out_path(cfg, g_diag));
        if (*c_eq)
            return run_equilibrium(cfg, e_n, out_path(cfg, e_out), e_mix,
                                   e_mom);
        if (*c_int)
            return run_intersect(cfg, i_r, i_s, i_sched,
                                 out_path(cfg, i_out));
        if (*c_discs)
            return run_discs(cfg, d_nt, d_phi, out_path(cfg, d_report));
        if (*c_ent)
            return run_entropy(cfg, n_method, n_nmax, n_eps, n_samples,
                               out_path(cfg, n_out));
        if (*c_rep)
            return run_report(cfg, r_dir.empty() ? cfg.out_dir : r_dir);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
