// SPDX-License-Identifier: Apache-2.0

// Experiment runner: every analysis is a subcommand driven by a JSON config
// (flags override file values). Each run writes its artifacts plus a config
// echo and a manifest into the output directory; re-running from the echo
// with the same build reproduces the outputs byte for byte.

#include "CLI11.hpp"
#include "json.hpp"

#include "tiplab/dynamics.hpp"
#include "tiplab/io.hpp"
#include "tiplab/manifolds.hpp"
#include "tiplab/sde.hpp"
#include "tiplab/stats.hpp"
#include "tiplab/svg.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tiplab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct GlobalOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int threads = 0;
    bool plots = true;
};

json load_config(const GlobalOpts& g) {
    if (g.config_path.empty()) return json::object();
    std::ifstream in(g.config_path);
    if (!in) throw std::invalid_argument("cannot read config " + g.config_path);
    json j;
    in >> j;
    return j;
}

struct Manifest {
    std::string command;
    fs::path dir;
    std::vector<std::string> artifacts;

    fs::path file(const std::string& name) {
        artifacts.push_back(name);
        return dir / name;
    }
    void write(const json& echo) const {
        json m;
        m["command"] = command;
        m["artifacts"] = artifacts;
        io::write_text(dir / "manifest.json", m.dump(2) + "\n");
        io::write_text(dir / "config_echo.json", echo.dump(2) + "\n");
    }
};

Manifest make_manifest(const GlobalOpts& g, const std::string& command) {
    Manifest m;
    m.command = command;
    m.dir = g.out_dir;
    fs::create_directories(m.dir);
    return m;
}

std::string tag_of(double r, double sigma) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "r%g_s%g", r, sigma);
    for (char& c : buf)
        if (c == '.') c = 'p';
    return buf;
}

json params_json(const SystemParams& p) {
    return {{"r", p.r}, {"sigma1", p.sigma1}};
}

// ---------------------------------------------------------------------------

int cmd_deterministic(const GlobalOpts& g, const json& cfg) {
    std::vector<double> grid =
        cfg.value("r_grid", std::vector<double>{0.5, 1.0, 4.0 / 3.0, 1.5, 2.0});
    if (grid.empty()) throw std::invalid_argument("deterministic: empty r_grid");
    const double t_span = cfg.value("t_span", 40.0);
    const double x0 = cfg.value("x0", -1.0);
    const double y0 = cfg.value("y0", 2.80729e-13);

    Manifest man = make_manifest(g, "deterministic");
    svg::Plot plot("Ramped trajectories", "ramp coordinate y", "state x");

    // frozen equilibrium branches for reference
    {
        std::vector<double> ys, stable, unstable;
        for (double y = 0.0; y <= 3.0001; y += 0.05) {
            ys.push_back(y);
            stable.push_back(frozen_equilibria(y).x_stable);
            unstable.push_back(frozen_equilibria(y).x_unstable);
        }
        plot.add({ys, stable, "#555555", 1.0, true, false, 2.5, "stable branch"});
        plot.add({ys, unstable, "#aaaaaa", 1.0, true, false, 2.5, "unstable branch"});
    }

    const std::vector<std::string> colors{"#1f77b4", "#2ca02c", "#ff7f0e",
                                          "#d62728", "#9467bd", "#8c564b"};
    json summary = json::array();
    int color_ix = 0;
    for (const double r : grid) {
        const DetRun run =
            integrate_deterministic({x0, y0}, {r, 0.0}, 0.0, t_span, {});
        const DetOutcome out = classify_deterministic(run);
        const std::string name = "deterministic_" + tag_of(r, 0.0) + ".csv";
        io::write_trajectory_csv(man.file(name), run.trajectory);
        summary.push_back({{"r", r},
                           {"outcome", out == DetOutcome::tracks ? "tracks"
                                       : out == DetOutcome::tips ? "tips"
                                                                 : "indeterminate"},
                           {"t_final", run.t_final},
                           {"x_final", run.final_state.x},
                           {"y_final", run.final_state.y},
                           {"file", name}});
        std::vector<double> xs, ys;
        for (const auto& s : run.trajectory.state) {
            if (s.x > 2.0) break; // clip the blow-up for the plot
            ys.push_back(s.y);
            xs.push_back(s.x);
        }
        char label[32];
        std::snprintf(label, sizeof(label), "r = %g", r);
        plot.add({ys, xs, colors[color_ix++ % colors.size()], 1.6, false, false,
                  2.5, label});
    }

    json crit;
    if (!cfg.contains("bisection") || cfg["bisection"].is_object()) {
        const json b = cfg.value("bisection", json::object());
        const auto res = find_critical_rate(b.value("r_lo", 1.0),
                                            b.value("r_hi", 2.0),
                                            b.value("tol", 1e-3));
        crit = {{"r_lo", res.r_lo},
                {"r_hi", res.r_hi},
                {"r_est", res.r_est},
                {"iterations", res.iterations}};
        io::write_text(man.file("critical_rate.json"), crit.dump(2) + "\n");
    }

    io::write_text(man.file("deterministic_summary.json"), summary.dump(2) + "\n");
    if (g.plots) {
        plot.set_ylim(-5.0, 2.0);
        plot.write(man.file("deterministic.svg"));
    }

    json echo = {{"command", "deterministic"}, {"seed", g.seed},
                 {"threads", g.threads},       {"plots", g.plots},
                 {"out", g.out_dir},           {"deterministic", cfg}};
    man.write(echo);
    std::cout << "critical rate estimate: " << crit.value("r_est", 0.0) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_heteroclinic(const GlobalOpts& g, const json& cfg) {
    json pairs = cfg.value("pairs", json::array({json{{"r", 1.0}, {"sigma1", 0.25}}}));
    if (pairs.empty()) throw std::invalid_argument("heteroclinic: no pairs");

    HetOptions opt;
    opt.seeding.radius = cfg.value("radius", 1e-3);
    opt.seeding.count = cfg.value("seed_count", 64);
    opt.seeding.max_gap = cfg.value("max_gap", 0.01);
    if (cfg.value("stable_mode", std::string("symmetry")) == "backward")
        opt.stable_mode = StableCurveMode::backward_shooting;

    Manifest man = make_manifest(g, "heteroclinic");
    json summary = json::array();

    for (const auto& pr : pairs) {
        const SystemParams params{pr.value("r", 1.0), pr.value("sigma1", 0.25)};
        const std::string tag = tag_of(params.r, params.sigma1);

        const SectionCurve cu = section_curve_unstable(params, opt.seeding);
        const SectionCurve cs =
            section_curve_stable(params, opt.seeding, opt.stable_mode);
        const Intersection inter = find_intersection(cu, cs);
        const HeteroclinicOrbit orb = heteroclinic(params, opt);

        io::write_section_curve_csv(man.file("section_unstable_" + tag + ".csv"), cu);
        io::write_section_curve_csv(man.file("section_stable_" + tag + ".csv"), cs);
        io::write_trajectory_csv(man.file("heteroclinic_" + tag + ".csv"),
                                 orb.trajectory);

        const json rec = {{"r", params.r},
                          {"sigma1", params.sigma1},
                          {"y_star", inter.y},
                          {"p_star", inter.p},
                          {"action", orb.action.value},
                          {"quadrature_error", orb.action.quadrature_error},
                          {"case", "case3"}};
        io::write_text(man.file("heteroclinic_" + tag + ".json"), rec.dump(2) + "\n");
        summary.push_back(rec);

        if (g.plots) {
            svg::Plot sec("Section plane y = -x  (" + tag + ")",
                          "ramp coordinate y", "momentum p");
            std::vector<double> yu, pu, ys, ps;
            for (const auto& n : cu.nodes) {
                yu.push_back(n.y);
                pu.push_back(n.p);
            }
            for (const auto& n : cs.nodes) {
                ys.push_back(n.y);
                ps.push_back(n.p);
            }
            sec.add({yu, pu, "#d62728", 1.6, false, false, 2.5, "unstable side"});
            sec.add({ys, ps, "#17becf", 1.6, false, false, 2.5, "stable side"});
            sec.add({{inter.y}, {inter.p}, "#000000", 1.0, false, true, 4.0,
                     "intersection"});
            sec.write(man.file("section_" + tag + ".svg"));

            svg::Plot proj("Connecting orbit (" + tag + ")", "ramp coordinate y",
                           "state x");
            std::vector<double> oy, ox;
            for (const auto& s : orb.trajectory.state) {
                oy.push_back(s.y);
                ox.push_back(s.x);
            }
            proj.add({oy, ox, "#e6b400", 2.0, false, false, 2.5, "orbit"});
            proj.write(man.file("orbit_" + tag + ".svg"));
        }
        std::cout << tag << ": y* = " << inter.y
                  << ", action = " << orb.action.value << "\n";
    }

    io::write_text(man.file("heteroclinic_summary.json"), summary.dump(2) + "\n");
    json echo = {{"command", "heteroclinic"}, {"seed", g.seed},
                 {"threads", g.threads},      {"plots", g.plots},
                 {"out", g.out_dir},          {"heteroclinic", cfg}};
    man.write(echo);
    return kExitOk;
}

// ---------------------------------------------------------------------------

SimConfig sim_config_from(const json& cfg, const GlobalOpts& g) {
    SimConfig sim;
    sim.params = {cfg.value("r", 1.0), cfg.value("sigma1", 0.15)};
    sim.t0 = cfg.value("t0", 0.0);
    sim.t1 = cfg.value("t1", 30.0);
    sim.dt = cfg.value("dt", 1e-3);
    sim.x0 = cfg.value("x0", -1.0);
    sim.y0 = cfg.value("y0", 2.80729e-13);
    sim.stride = cfg.value("stride", 10);
    sim.n_realizations = cfg.value("n", 3000);
    sim.seed = g.seed;
    sim.threads = g.threads;
    return sim;
}

int cmd_montecarlo(const GlobalOpts& g, const json& cfg) {
    SimConfig sim = sim_config_from(cfg, g);
    sim.store_paths = cfg.value("store_paths", true);
    sim.validate();

    Manifest man = make_manifest(g, "montecarlo");
    const EnsembleResult er = run_ensemble(sim);

    json summary = {{"N", er.n},
                    {"M", er.m_tipped},
                    {"tracked", er.n_tracked},
                    {"indeterminate", er.n_indeterminate},
                    {"p_tip", (double)er.m_tipped / er.n},
                    {"master_seed", sim.seed},
                    {"config",
                     {{"r", sim.params.r},
                      {"sigma1", sim.params.sigma1},
                      {"t0", sim.t0},
                      {"t1", sim.t1},
                      {"dt", sim.dt},
                      {"x0", sim.x0},
                      {"y0", sim.y0},
                      {"n", sim.n_realizations},
                      {"stride", sim.stride}}}};
    io::write_text(man.file("ensemble.json"), summary.dump(2) + "\n");
    io::write_first_passage_csv(man.file("first_passage.csv"), er);

    std::optional<HeteroclinicOrbit> orb;
    if (sim.store_paths && sim.params.r <= kCriticalRate &&
        sim.params.sigma1 > 0.0) {
        try {
            orb = heteroclinic(sim.params);
        } catch (const std::exception& e) {
            std::cerr << "note: connecting orbit unavailable: " << e.what()
                      << "\n";
        }
    }

    if (sim.store_paths) {
        if (er.m_tipped >= 30) {
            const ModePath mp = mode_path(er, PathSubset::tipped);
            io::write_mode_path_csv(man.file("mode_tipped.csv"), mp);
            if (g.plots) {
                svg::Plot overlay("Tipped realizations: mode vs connecting orbit",
                                  "ramp coordinate y", "state x");
                overlay.add({mp.y, mp.x_mode, "#d62728", 2.0, true, false, 2.5,
                             "ensemble mode"});
                if (orb) {
                    std::vector<double> oy, ox;
                    for (const auto& s : orb->trajectory.state) {
                        oy.push_back(s.y);
                        ox.push_back(s.x);
                    }
                    overlay.add({oy, ox, "#000000", 1.5, false, false, 2.5,
                                 "connecting orbit"});
                }
                overlay.write(man.file("overlay_tipped.svg"));
            }
        }
        if (er.n_tracked >= 30) {
            const ModePath mp = mode_path(er, PathSubset::tracked);
            io::write_mode_path_csv(man.file("mode_tracked.csv"), mp);
            if (g.plots) {
                const DetRun det = integrate_deterministic(
                    {sim.x0, sim.y0}, {sim.params.r, 0.0}, sim.t0, sim.t1, {});
                svg::Plot overlay("Tracked realizations: mode vs pullback",
                                  "ramp coordinate y", "state x");
                overlay.add({mp.y, mp.x_mode, "#1f77b4", 2.0, true, false, 2.5,
                             "ensemble mode"});
                std::vector<double> dy, dx;
                for (const auto& s : det.trajectory.state) {
                    dy.push_back(s.y);
                    dx.push_back(s.x);
                }
                overlay.add({dy, dx, "#000000", 1.5, false, false, 2.5,
                             "pullback trajectory"});
                overlay.write(man.file("overlay_tracked.svg"));
            }
        }
        if (cfg.value("dump_paths", false)) {
            const fs::path dir = man.dir / "paths";
            fs::create_directories(dir);
            for (int i = 0; i < er.n; ++i) {
                char name[64];
                std::snprintf(name, sizeof(name), "paths/realization_%06d.csv", i);
                std::vector<double> ys = er.path_y;
                io::write_csv(man.file(name), {"t", "x", "y"},
                              {&er.path_times, &er.paths[i], &ys});
            }
        }
    }

    json echo = {{"command", "montecarlo"}, {"seed", g.seed},
                 {"threads", g.threads},    {"plots", g.plots},
                 {"out", g.out_dir},        {"montecarlo", cfg}};
    man.write(echo);
    std::cout << "N = " << er.n << ", tipped = " << er.m_tipped
              << " (p = " << (double)er.m_tipped / er.n << ")\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct CellResult {
    SystemParams params;
    TipDistribution dist;
    bool no_escapes = false;
};

CellResult run_cell(const GlobalOpts& g, const json& proto, double r, double sigma) {
    SimConfig base;
    base.params = {r, sigma};
    base.dt = proto.value("dt", 1e-3);
    base.t1 = proto.value("t1", 30.0);
    base.y0 = proto.value("y0", 2.80729e-13);
    base.seed = g.seed;
    base.threads = g.threads;
    base.n_realizations = proto.value("n0", 3000);
    const int max_rounds = proto.value("max_rounds", 6);

    // A pilot batch sizes the first round so the doubling protocol reaches
    // its error target within the round budget even when tipping is rare.
    if (proto.value("pilot", true)) {
        SimConfig pilot = base;
        pilot.seed = base.seed ^ 0xD1B54A32D192ED03ull;
        pilot.n_realizations = proto.value("pilot_n", 4000);
        int tipped = 0;
        for (int tries = 0; tries < 4; ++tries) {
            const EnsembleResult er = run_ensemble(pilot);
            tipped = er.m_tipped;
            if (tipped >= 25 || pilot.n_realizations >= 64000) break;
            pilot.n_realizations *= 4;
            pilot.stream_offset += 1000000;
        }
        if (tipped > 0) {
            const double p_hat = (double)tipped / pilot.n_realizations;
            const long target = proto.value("target_tipped", 9000L);
            const long n0 = (long)std::ceil((double)target / p_hat);
            base.n_realizations =
                (int)std::min<long>(std::max<long>(base.n_realizations, n0),
                                    20000000L);
        }
    }

    CellResult cell;
    cell.params = base.params;
    try {
        cell.dist = converge_tip_distribution(base, max_rounds);
    } catch (const NoEscapesError&) {
        cell.no_escapes = true;
    }
    return cell;
}

json cell_json(const CellResult& cell) {
    json j = params_json(cell.params);
    if (cell.no_escapes) {
        j["status"] = "no-escapes";
        j["converged"] = false;
        return j;
    }
    const TipDistribution& d = cell.dist;
    j["status"] = d.converged ? "converged" : "not-converged";
    j["converged"] = d.converged;
    j["N_total"] = d.total_realizations;
    j["M_total"] = d.total_tipped;
    j["n_final_batch"] = d.n_per_batch_final;
    j["rounds"] = d.rounds;
    j["bins"] = d.bin_edges;
    j["counts"] = d.d1;
    j["counts_repeat"] = d.d2;
    j["mean_tau"] = d.expected_time;
    j["err"] = d.err;
    j["ks_p"] = d.ks_p;
    return j;
}

int cmd_tiptime(const GlobalOpts& g, const json& cfg) {
    json cells = cfg.value("cells", json::array({json{{"r", 1.0}, {"sigma1", 0.15}}}));
    if (cells.empty()) throw std::invalid_argument("tiptime: no cells");

    Manifest man = make_manifest(g, "tiptime");
    json table = json::array();
    bool all_ok = true;
    for (const auto& c : cells) {
        const double r = c.value("r", 1.0), s = c.value("sigma1", 0.15);
        std::cout << "cell r = " << r << ", sigma1 = " << s << "..." << std::flush;
        const CellResult cell = run_cell(g, cfg, r, s);
        const json j = cell_json(cell);
        io::write_text(man.file("tiptime_" + tag_of(r, s) + ".json"),
                       j.dump(2) + "\n");
        table.push_back(j);
        all_ok = all_ok && j["converged"].get<bool>();
        std::cout << " " << j["status"].get<std::string>();
        if (!cell.no_escapes)
            std::cout << ", mean = " << cell.dist.expected_time;
        std::cout << "\n";
    }
    io::write_text(man.file("tiptime_table.json"), table.dump(2) + "\n");

    json echo = {{"command", "tiptime"}, {"seed", g.seed},
                 {"threads", g.threads}, {"plots", g.plots},
                 {"out", g.out_dir},     {"tiptime", cfg}};
    man.write(echo);
    return all_ok ? kExitOk : kExitNumerical;
}

// ---------------------------------------------------------------------------

int cmd_scaling(const GlobalOpts& g, const json& cfg) {
    json fits = cfg.value(
        "fits", json::array({json{{"r", 1.0},
                                  {"sigmas", {0.25, 0.2, 0.15, 0.1, 0.08}}}}));
    if (fits.empty()) throw std::invalid_argument("scaling: no fits");

    Manifest man = make_manifest(g, "scaling");
    bool all_ok = true;
    json out = json::array();
    for (const auto& f : fits) {
        const double r = f.value("r", 1.0);
        const std::vector<double> sigmas =
            f.value("sigmas", std::vector<double>{0.25, 0.2, 0.15, 0.1, 0.08});
        std::vector<std::pair<double, double>> pts;
        json points = json::array();
        for (const double s : sigmas) {
            std::cout << "cell r = " << r << ", sigma1 = " << s << "..."
                      << std::flush;
            const CellResult cell = run_cell(g, cfg, r, s);
            json cj = cell_json(cell);
            points.push_back(cj);
            if (cj["converged"].get<bool>()) {
                pts.emplace_back(s, cell.dist.expected_time);
                std::cout << " mean = " << cell.dist.expected_time << "\n";
            } else {
                all_ok = false;
                std::cout << " " << cj["status"].get<std::string>() << "\n";
            }
        }
        json rec = {{"r", r}, {"points", points}};
        if (pts.size() >= 3) {
            const PowerLawFit fit = power_law_fit(pts);
            rec["a"] = fit.a;
            rec["b"] = fit.b;
            rec["r_value"] = fit.r_value;
            rec["residuals"] = fit.residuals;
            std::cout << "fit r = " << r << ": tau = " << fit.a
                      << " (1/sigma^2)^" << fit.b << "\n";
            if (g.plots) {
                svg::Plot lp("Expected time to tip vs 1/sigma^2 (r = " +
                                 std::to_string(r) + ")",
                             "log(1/sigma^2)", "log(tau)");
                std::vector<double> fx, fy;
                for (const auto& [s, tau] : pts) {
                    fx.push_back(std::log(1.0 / (s * s)));
                    fy.push_back(std::log(tau));
                }
                lp.add({fx, fy, "#1f77b4", 1.0, false, true, 3.5, "measured"});
                std::vector<double> lx{fx.front(), fx.back()};
                std::vector<double> ly{std::log(fit.a) + fit.b * lx[0],
                                       std::log(fit.a) + fit.b * lx[1]};
                lp.add({lx, ly, "#d62728", 1.5, false, false, 2.5, "power-law fit"});
                lp.write(man.file("scaling_" + tag_of(r, 0.0) + ".svg"));
            }
        } else {
            all_ok = false;
        }
        io::write_text(man.file("scaling_" + tag_of(r, 0.0) + ".json"),
                       rec.dump(2) + "\n");
        out.push_back(rec);
    }
    io::write_text(man.file("scaling_summary.json"), out.dump(2) + "\n");

    json echo = {{"command", "scaling"}, {"seed", g.seed},
                 {"threads", g.threads}, {"plots", g.plots},
                 {"out", g.out_dir},     {"scaling", cfg}};
    man.write(echo);
    return all_ok ? kExitOk : kExitNumerical;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for rate- and noise-induced tipping in "
                 "the ramped saddle system"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON config file");
    app.add_option("--seed", g.seed, "master RNG seed");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--threads", g.threads, "worker threads (0 = auto)");
    bool no_plots = false;
    app.add_flag("--no-plots", no_plots, "skip SVG rendering");

    auto* det = app.add_subcommand("deterministic",
                                   "ramped trajectories and the critical rate");
    auto* het = app.add_subcommand("heteroclinic",
                                   "manifold curves, intersection, orbit, action");
    auto* mc = app.add_subcommand("montecarlo", "ensemble and mode paths");
    auto* tt = app.add_subcommand("tiptime", "time-to-tip distributions");
    auto* sc = app.add_subcommand("scaling", "power law of expected tip time");
    for (auto* sub : {det, het, mc, tt, sc}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        const json file = load_config(g);
        if (file.contains("seed") && !app.count("--seed"))
            g.seed = file["seed"].get<std::uint64_t>();
        if (file.contains("out") && !app.count("--out"))
            g.out_dir = file["out"].get<std::string>();
        if (file.contains("threads") && !app.count("--threads"))
            g.threads = file["threads"].get<int>();
        if (file.contains("plots") && !no_plots)
            g.plots = file["plots"].get<bool>();
        if (no_plots) g.plots = false;

        if (det->parsed())
            return cmd_deterministic(g, file.value("deterministic", json::object()));
        if (het->parsed())
            return cmd_heteroclinic(g, file.value("heteroclinic", json::object()));
        if (mc->parsed())
            return cmd_montecarlo(g, file.value("montecarlo", json::object()));
        if (tt->parsed())
            return cmd_tiptime(g, file.value("tiptime", json::object()));
        if (sc->parsed())
            return cmd_scaling(g, file.value("scaling", json::object()));
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
