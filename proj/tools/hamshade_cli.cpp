// hamshade — command-line front end: ingests system/config documents,
// dispatches analyses, writes JSON reports and CSV time series with stable
// schemas. Exit codes: 0 analysis completed with verdict holds/success,
// 1 completed with verdict fails/failure, 2 input/config error, 3 numerical
// failure.

#include "hamshade/acceptance.hpp"
#include "hamshade/io.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

namespace hs = hamshade;
using hs::json;

namespace {

namespace fs = std::filesystem;

struct GlobalOpts {
    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    json config = json::object();

    fs::path out(const std::string& name) const { return fs::path(out_dir) / name; }
};

hs::Vec parse_vec(const std::string& csv) {
    std::vector<double> vals;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            vals.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw hs::ConfigError("cannot parse vector entry: " + item);
        }
    }
    if (vals.empty()) throw hs::ConfigError("empty vector argument");
    hs::Vec v(static_cast<int>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
    return v;
}

/// "point;t_begin;t_end" with point = comma-separated coordinates.
hs::OrbitArc parse_arc(const std::string& text) {
    std::stringstream ss(text);
    std::string point, b, e;
    if (!std::getline(ss, point, ';') || !std::getline(ss, b, ';') || !std::getline(ss, e, ';'))
        throw hs::ConfigError("arc must be point;t_begin;t_end");
    hs::OrbitArc arc;
    arc.point = parse_vec(point);
    arc.t_begin = std::stod(b);
    arc.t_end = std::stod(e);
    return arc;
}

/// Config-file fallback: CLI flags override config values override defaults.
template <typename T>
T effective(const CLI::Option* opt, const T& cli_value, const GlobalOpts& g, const std::string& key, const T& dflt) {
    if (opt && opt->count() > 0) return cli_value;
    if (g.config.contains(key)) return g.config[key].get<T>();
    return dflt;
}

hs::Method parse_method(const std::string& name) {
    if (name == "implicit-midpoint") return hs::Method::ImplicitMidpoint;
    if (name == "leapfrog-if-separable" || name == "leapfrog") return hs::Method::Leapfrog;
    if (name == "rk4-reference" || name == "rk4") return hs::Method::RK4Reference;
    throw hs::ConfigError("unknown method: " + name);
}

json flow_policy_json(const hs::FlowPolicy& pol) {
    return {{"step", pol.step},
            {"method", pol.method == hs::Method::ImplicitMidpoint ? "implicit-midpoint"
                       : pol.method == hs::Method::Leapfrog       ? "leapfrog-if-separable"
                                                                  : "rk4-reference"},
            {"solver_tol", pol.solver_tol},
            {"solver_max_iters", pol.solver_max_iters},
            {"singular_tol", pol.singular_tol}};
}

json base_report(const std::string& command, const json& effective_config) {
    json doc;
    doc["format_version"] = 1;
    doc["command"] = command;
    doc["effective_config"] = effective_config;
    return doc;
}

/// Run fn(i) for i in [0, n) on a bounded worker pool; results land by index.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex err_mutex;
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            if (failed.load()) return;
            try {
                fn(i);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!failed.exchange(true)) first_error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(jobs, n); ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed) throw hs::Error(first_error);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hamshade: transversal linear Poincare flow and shade-property toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    const char* env_out = std::getenv("HAMSHADE_OUTPUT_DIR");
    g.out_dir = env_out ? env_out : ".";
    app.add_option("--config", g.config_path, "JSON config file (flags override its values)");
    app.add_option("--out", g.out_dir, "output directory (default: HAMSHADE_OUTPUT_DIR or .)");
    app.add_option("--jobs", g.jobs, "worker pool size for fan-out commands")->check(CLI::PositiveNumber);

    struct {
        std::string system = "builtin:harmonic";
        std::string x0, seed, point, state;
        double t = 10.0, T = 1e3, step = 1e-3, renorm = 1.0, record_dt = 0.0;
        std::string method = "implicit-midpoint";
        double eps = 0.1, delta = 0.01, window = 10.0, K = 5.0, tol = 1e-9;
        long budget = 2000;
        std::string pseudo_file, section_json, arc1, arc2;
        double energy = 0.0;
        bool full_tangent = false, tangent = false;
        double dt = 0.5, horizon = 10.0, lmin = 0.5, lmax = 8.0;
        int samples = 40, lcount = 16;
        double s_time = 1.0;
        int suspension_samples = 50;
        double tol_scale = 1.0;
        bool fast = false;
        std::vector<std::string> x0_list;
    } a;

    auto* describe = app.add_subcommand("describe", "summarize a system document");
    describe->add_option("--system", a.system, "builtin:NAME or system JSON path");
    auto* opt_point = describe->add_option("--point", a.point, "phase point q1..qn,p1..pn");

    auto* flowcmd = app.add_subcommand("flow", "integrate a trajectory, write CSV");
    flowcmd->add_option("--system", a.system);
    flowcmd->add_option("--x0", a.x0, "initial point")->required();
    auto* opt_t = flowcmd->add_option("--t", a.t, "integration time (may be negative)");
    auto* opt_step_f = flowcmd->add_option("--step", a.step);
    auto* opt_method =
        flowcmd->add_option("--method", a.method, "implicit-midpoint|leapfrog-if-separable|rk4-reference");
    auto* opt_record = flowcmd->add_option("--record-dt", a.record_dt, "sample interval (0 = every step)");
    flowcmd->add_flag("--tangent", a.tangent, "also integrate the tangent flow and report its symplectic defect");

    auto* lyap = app.add_subcommand("lyap", "transversal Lyapunov spectrum");
    lyap->add_option("--system", a.system);
    lyap->add_option("--x0", a.x0_list, "initial point(s); repeat for fan-out")->required();
    auto* opt_T = lyap->add_option("--T", a.T, "integration time");
    auto* opt_step_l = lyap->add_option("--step", a.step);
    auto* opt_renorm = lyap->add_option("--renorm", a.renorm, "QR re-orthonormalization interval");
    lyap->add_flag("--full-tangent", a.full_tangent, "debug: report all 2n exponents");

    auto* orbitcmd = app.add_subcommand("orbit", "Newton search for a periodic orbit");
    orbitcmd->add_option("--system", a.system);
    orbitcmd->add_option("--seed", a.seed, "seed phase point")->required();
    auto* opt_section = orbitcmd->add_option(
        "--section", a.section_json, "section JSON {normal, offset, direction}; default: through the seed");
    auto* opt_energy = orbitcmd->add_option("--energy", a.energy, "project the seed onto this energy level first");
    auto* opt_tol = orbitcmd->add_option("--tol", a.tol, "residual tolerance");
    auto* opt_step_o = orbitcmd->add_option("--step", a.step);

    auto* splitcmd = app.add_subcommand("splitting", "estimate blocks and test domination along an orbit");
    splitcmd->add_option("--system", a.system);
    splitcmd->add_option("--x0", a.x0, "orbit start")->required();
    auto* opt_dt = splitcmd->add_option("--dt", a.dt, "cocycle sampling interval");
    auto* opt_samples = splitcmd->add_option("--samples", a.samples, "number of samples");
    auto* opt_horizon = splitcmd->add_option("--horizon", a.horizon, "finite-time window (multiple of dt)");
    auto* opt_lmin = splitcmd->add_option("--lmin", a.lmin, "smallest scale in the grid");
    auto* opt_lmax = splitcmd->add_option("--lmax", a.lmax, "largest scale in the grid");
    auto* opt_lcount = splitcmd->add_option("--lcount", a.lcount, "grid size");

    auto* shadowcmd = app.add_subcommand("shadow", "shadowing search for a pseudo-orbit file");
    shadowcmd->add_option("--system", a.system);
    shadowcmd->add_option("--pseudo", a.pseudo_file, "pseudo-orbit JSON file")->required();
    auto* opt_eps_s = shadowcmd->add_option("--eps", a.eps)->required();
    auto* opt_budget_s = shadowcmd->add_option("--budget", a.budget);

    auto* weakcmd = app.add_subcommand("weakshadow", "weak shadowing search (time-free containment)");
    weakcmd->add_option("--system", a.system);
    weakcmd->add_option("--pseudo", a.pseudo_file)->required();
    auto* opt_eps_w = weakcmd->add_option("--eps", a.eps)->required();
    auto* opt_budget_w = weakcmd->add_option("--budget", a.budget);

    auto* expcmd = app.add_subcommand("expansive", "expansiveness probe around a point");
    expcmd->add_option("--system", a.system);
    expcmd->add_option("--x", a.x0, "base point")->required();
    auto* opt_delta = expcmd->add_option("--delta", a.delta, "closeness scale");
    auto* opt_window = expcmd->add_option("--window", a.window, "time window");
    auto* opt_eps_e = expcmd->add_option("--eps", a.eps, "orbit-displacement tolerance");
    auto* opt_budget_e = expcmd->add_option("--budget", a.budget);

    auto* speccmd = app.add_subcommand("spec", "weak specification check for two orbit arcs");
    speccmd->add_option("--system", a.system);
    speccmd->add_option("--arc1", a.arc1, "point;t_begin;t_end (point = q1..,p1..)")->required();
    speccmd->add_option("--arc2", a.arc2, "point;t_begin;t_end")->required();
    auto* opt_K = speccmd->add_option("--K", a.K, "required arc spacing");
    auto* opt_eps_sp = speccmd->add_option("--eps", a.eps);
    auto* opt_budget_sp = speccmd->add_option("--budget", a.budget);

    auto* suspcmd = app.add_subcommand("suspend", "cat-map suspension flow evaluation and checks");
    suspcmd->add_option("--state", a.state, "base point and roof: x1,x2;r")->required();
    suspcmd->add_option("--s", a.s_time, "flow time");
    suspcmd->add_option("--samples", a.suspension_samples, "states for the semigroup/slab checks");

    auto* selftest = app.add_subcommand("selftest", "run the embedded acceptance suite");
    selftest->add_option("--tolerance-scale", a.tol_scale, "debug: scale every pass threshold (< 1 tightens)");
    selftest->add_flag("--fast", a.fast, "run only the sub-second criteria");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!g.config_path.empty()) {
            std::ifstream in(g.config_path);
            if (!in) throw hs::ConfigError("cannot open config file: " + g.config_path);
            try {
                in >> g.config;
            } catch (const json::exception& e) {
                throw hs::ConfigError(std::string("config file is not valid JSON: ") + e.what());
            }
        }

        // ------------------------------------------------------------------
        if (describe->parsed()) {
            auto sys = hs::load_system(a.system);
            json doc = base_report("describe", {{"system", a.system}});
            doc["system"] = hs::system_to_json(sys);
            doc["separable"] = sys.separable();
            if (opt_point->count() > 0 || g.config.contains("point")) {
                const hs::Vec x = parse_vec(effective(opt_point, a.point, g, "point", a.point));
                doc["point"] = hs::vec_to_json(x);
                doc["energy"] = sys.eval_h(x);
                doc["field_norm"] = sys.field(x).norm();
                doc["regular"] = sys.is_regular(x);
            }
            hs::write_json(g.out("describe_report.json"), doc);
            std::cout << "describe: " << sys.name() << " (n = " << sys.dof() << ")\n";
            return 0;
        }

        // ------------------------------------------------------------------
        if (flowcmd->parsed()) {
            auto sys = hs::load_system(a.system);
            hs::FlowPolicy pol;
            pol.step = effective(opt_step_f, a.step, g, "step", 1e-3);
            pol.method = parse_method(effective(opt_method, a.method, g, "method", std::string("implicit-midpoint")));
            pol.record_dt = effective(opt_record, a.record_dt, g, "record_dt", 0.0);
            const double t = effective(opt_t, a.t, g, "t", 10.0);
            const hs::Vec x0 = parse_vec(a.x0);

            const auto traj = hs::integrate(sys, x0, t, pol);
            hs::atomic_write(g.out("trajectory.csv"), hs::trajectory_csv(sys, traj));

            json doc = base_report("flow", {{"system", a.system}, {"t", t}, {"policy", flow_policy_json(pol)}});
            doc["energy_drift"] = traj.energy_drift;
            doc["samples"] = traj.times.size();
            if (a.tangent) {
                const auto tf = hs::tangent_flow(sys, x0, t, pol);
                doc["tangent_symplectic_defect"] = tf.symplectic_defect;
            }
            hs::write_json(g.out("flow_report.json"), doc);
            std::cout << "flow: energy drift " << traj.energy_drift << " over t = " << t << "\n";
            return 0;
        }

        // ------------------------------------------------------------------
        if (lyap->parsed()) {
            auto sys = hs::load_system(a.system);
            hs::LyapunovPolicy lpol;
            lpol.step = effective(opt_step_l, a.step, g, "step", 1e-3);
            lpol.renorm = effective(opt_renorm, a.renorm, g, "renorm", 1.0);
            lpol.full_tangent = a.full_tangent;
            const double T = effective(opt_T, a.T, g, "T", 1e3);

            const int n_jobs = static_cast<int>(a.x0_list.size());
            std::vector<hs::LyapunovSpectrum> specs(static_cast<size_t>(n_jobs));
            std::vector<std::string> csvs(static_cast<size_t>(n_jobs));
            parallel_for(n_jobs, g.jobs, [&](int i) {
                const hs::Vec x0 = parse_vec(a.x0_list[static_cast<size_t>(i)]);
                const int fiber = lpol.full_tangent ? sys.dim() : sys.dim() - 2;
                hs::SpectrumCsv csv(fiber);
                hs::LyapunovPolicy local = lpol;
                const double progress_dt = std::max(T / 100.0, lpol.renorm);
                double next = progress_dt;
                local.progress = [&](double t, const std::vector<double>& run) {
                    if (t + 1e-12 >= next) {
                        csv.add_row(t, run);
                        next += progress_dt;
                    }
                };
                specs[static_cast<size_t>(i)] = hs::lyapunov_spectrum(sys, x0, T, local);
                csv.add_row(specs[static_cast<size_t>(i)].T, specs[static_cast<size_t>(i)].exponents);
                csvs[static_cast<size_t>(i)] = csv.str();
            });

            json doc = base_report("lyap", {{"system", a.system},
                                            {"T", T},
                                            {"step", lpol.step},
                                            {"renorm", lpol.renorm},
                                            {"full_tangent", lpol.full_tangent},
                                            {"jobs", g.jobs}});
            json runs = json::array();
            for (int i = 0; i < n_jobs; ++i) {
                const std::string name = n_jobs == 1 ? "spectrum.csv" : "spectrum_" + std::to_string(i) + ".csv";
                hs::atomic_write(g.out(name), csvs[static_cast<size_t>(i)]);
                json r = hs::spectrum_report_json(specs[static_cast<size_t>(i)]);
                r["x0"] = a.x0_list[static_cast<size_t>(i)];
                r["csv"] = name;
                runs.push_back(std::move(r));
            }
            doc["runs"] = runs;
            hs::write_json(g.out("lyap_report.json"), doc);
            std::cout << "lyap: " << n_jobs << " run(s), top exponent " << specs[0].exponents.front() << "\n";
            return 0;
        }

        // ------------------------------------------------------------------
        if (orbitcmd->parsed()) {
            auto sys = hs::load_system(a.system);
            hs::FlowPolicy pol;
            pol.step = effective(opt_step_o, a.step, g, "step", 1e-3);
            hs::NewtonPolicy npol;
            npol.tol = effective(opt_tol, a.tol, g, "tol", 1e-9);
            hs::Vec seed = parse_vec(a.seed);
            if (opt_energy->count() > 0 || g.config.contains("energy")) {
                const double e = effective(opt_energy, a.energy, g, "energy", 0.0);
                for (int it = 0; it < 50; ++it) {
                    const hs::Vec grad = sys.grad(seed);
                    const double de = sys.eval_h(seed) - e;
                    if (std::abs(de) < 1e-13) break;
                    seed -= grad * (de / grad.squaredNorm());
                }
                if (std::abs(sys.eval_h(seed) - e) > 1e-10)
                    throw hs::ConfigError("cannot project the seed onto the requested energy level");
            }
            hs::AffineSection sec;
            if (opt_section->count() > 0) {
                sec = hs::section_from_json(json::parse(a.section_json), sys.dim());
            } else if (g.config.contains("section")) {
                sec = hs::section_from_json(g.config["section"], sys.dim());
            } else {
                sec = hs::AffineSection::through(sys, seed);
            }

            const auto orbit = hs::find_periodic(sys, seed, sec, npol, pol);
            json doc = base_report("orbit", {{"system", a.system},
                                             {"tol", npol.tol},
                                             {"step", pol.step},
                                             {"section", {{"normal", hs::vec_to_json(sec.normal)},
                                                          {"offset", sec.offset},
                                                          {"direction", sec.direction}}}});
            doc.update(hs::orbit_report_json(orbit));
            hs::write_json(g.out("orbit_report.json"), doc);
            std::cout << "orbit: period " << orbit.period << ", residual " << orbit.residual << ", "
                      << orbit.classification.str() << "\n";
            return 0;
        }

        // ------------------------------------------------------------------
        if (splitcmd->parsed()) {
            auto sys = hs::load_system(a.system);
            const double dt = effective(opt_dt, a.dt, g, "dt", 0.5);
            const int samples = effective(opt_samples, a.samples, g, "samples", 40);
            const double horizon = effective(opt_horizon, a.horizon, g, "horizon", 10.0);
            const double lmin = effective(opt_lmin, a.lmin, g, "lmin", 0.5);
            const double lmax = effective(opt_lmax, a.lmax, g, "lmax", 8.0);
            const int lcount = effective(opt_lcount, a.lcount, g, "lcount", 16);

            const auto cocycle = hs::SampledCocycle::from_orbit(sys, parse_vec(a.x0), dt, samples);
            json doc = base_report("splitting", {{"system", a.system},
                                                 {"dt", dt},
                                                 {"samples", samples},
                                                 {"horizon", horizon},
                                                 {"grid", {{"min", lmin}, {"max", lmax}, {"count", lcount}}}});
            int exit_code = 1;
            try {
                const auto split = hs::estimate_splitting(cocycle, horizon);
                std::vector<double> grid;
                for (int k = 0; k < lcount; ++k) {
                    const double raw = lmin + (lmax - lmin) * k / std::max(1, lcount - 1);
                    grid.push_back(std::max(1.0, std::round(raw / dt)) * dt);
                }
                const auto rep = hs::domination_profile(cocycle, split, split.blocks() - 1, 0, grid);
                doc.update(hs::splitting_report_json(rep));
                exit_code = rep.verdict == hs::Verdict::Holds ? 0 : 1;
                std::cout << "splitting: " << hs::verdict_str(rep.verdict) << " (blocks";
                for (int d : split.dims) std::cout << " " << d;
                std::cout << ", worst product " << rep.worst_product << ")\n";
            } catch (const hs::RankCollapse& e) {
                doc["verdict"] = "inconclusive";
                doc["rank_collapse"] = e.what();
                std::cout << "splitting: rank collapse (no separable blocks)\n";
                exit_code = 1;
            }
            hs::write_json(g.out("splitting_report.json"), doc);
            return exit_code;
        }

        // ------------------------------------------------------------------
        if (shadowcmd->parsed() || weakcmd->parsed()) {
            const bool weak = weakcmd->parsed();
            auto sys = hs::load_system(a.system);
            std::ifstream in(a.pseudo_file);
            if (!in) throw hs::ConfigError("cannot open pseudo-orbit file: " + a.pseudo_file);
            json podoc;
            try {
                in >> podoc;
            } catch (const json::exception& e) {
                throw hs::ConfigError(std::string("pseudo-orbit file is not valid JSON: ") + e.what());
            }
            const auto po = hs::pseudo_orbit_from_json(sys, podoc);
            const double eps = weak ? effective(opt_eps_w, a.eps, g, "eps", 0.1)
                                    : effective(opt_eps_s, a.eps, g, "eps", 0.1);
            const long budget = weak ? effective(opt_budget_w, a.budget, g, "budget", 2000L)
                                     : effective(opt_budget_s, a.budget, g, "budget", 2000L);

            const auto rep = weak ? hs::weak_shadow_search(sys, po, eps, budget)
                                  : hs::shadow_search(sys, po, eps, budget);
            json doc = base_report(weak ? "weakshadow" : "shadow",
                                   {{"system", a.system}, {"pseudo", a.pseudo_file}, {"eps", eps},
                                    {"budget", budget}, {"delta", po.delta}, {"T", po.T_min}});
            doc.update(hs::shadow_report_json(rep));
            hs::write_json(g.out(weak ? "weakshadow_report.json" : "shadow_report.json"), doc);
            std::cout << (weak ? "weakshadow: " : "shadow: ") << (rep.success ? "success" : "failure")
                      << ", achieved eps " << rep.achieved_eps << " (budget spent " << rep.budget_spent << ")\n";
            return rep.success ? 0 : 1;
        }

        // ------------------------------------------------------------------
        if (expcmd->parsed()) {
            auto sys = hs::load_system(a.system);
            const double delta = effective(opt_delta, a.delta, g, "delta", 0.01);
            const double window = effective(opt_window, a.window, g, "window", 10.0);
            const double eps = effective(opt_eps_e, a.eps, g, "eps", 0.1);
            const long budget = effective(opt_budget_e, a.budget, g, "budget", 100000L);

            const auto rep = hs::expansiveness_probe(sys, parse_vec(a.x0), delta, window, eps, budget);
            json doc = base_report("expansive", {{"system", a.system},
                                                 {"delta", delta},
                                                 {"window", window},
                                                 {"eps", eps},
                                                 {"budget", budget}});
            const char* verdict = rep.verdict == hs::ExpansiveVerdict::Separated ? "separated"
                                  : rep.verdict == hs::ExpansiveVerdict::NonExpansiveWitness
                                      ? "non_expansive_witness"
                                      : "inconclusive";
            doc["verdict"] = verdict;
            doc["exit_time"] = rep.exit_time;
            doc["witness"] = rep.witness ? hs::vec_to_json(*rep.witness) : json(nullptr);
            doc["budget_spent"] = rep.budget_spent;
            hs::write_json(g.out("expansive_report.json"), doc);
            std::cout << "expansive: " << verdict << "\n";
            return rep.verdict == hs::ExpansiveVerdict::Separated ? 0 : 1;
        }

        // ------------------------------------------------------------------
        if (speccmd->parsed()) {
            auto sys = hs::load_system(a.system);
            const double K = effective(opt_K, a.K, g, "K", 5.0);
            const double eps = effective(opt_eps_sp, a.eps, g, "eps", 0.1);
            const long budget = effective(opt_budget_sp, a.budget, g, "budget", 2000L);
            const auto rep = hs::weak_spec_check(sys, parse_arc(a.arc1), parse_arc(a.arc2), K, eps, budget);
            json doc = base_report("spec", {{"system", a.system}, {"K", K}, {"eps", eps}, {"budget", budget}});
            doc.update(hs::shadow_report_json(rep));
            hs::write_json(g.out("spec_report.json"), doc);
            std::cout << "spec: " << (rep.success ? "success" : "failure") << ", achieved eps "
                      << rep.achieved_eps << "\n";
            return rep.success ? 0 : 1;
        }

        // ------------------------------------------------------------------
        if (suspcmd->parsed()) {
            auto susp = hs::make_cat_suspension();
            std::stringstream ss(a.state);
            std::string xs, rs;
            if (!std::getline(ss, xs, ';') || !std::getline(ss, rs, ';'))
                throw hs::ConfigError("state must be x1,x2;r");
            const hs::Vec x = parse_vec(xs);
            const double roof = std::stod(rs);

            auto [xe, re] = susp.flow(x, roof, a.s_time);
            json doc = base_report("suspend", {{"s", a.s_time}, {"samples", a.suspension_samples}});
            doc["state"] = {{"x", hs::vec_to_json(x)}, {"r", roof}};
            doc["flowed"] = {{"x", hs::vec_to_json(xe)}, {"r", re}};

            // semigroup and slab checks over deterministic pseudo-random states
            std::mt19937_64 rng(2024);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            double worst_semigroup = 0.0;
            bool slab_ok = true;
            for (int k = 0; k < a.suspension_samples; ++k) {
                hs::Vec y(2);
                y << u(rng), u(rng);
                const double r0 = 0.999 * u(rng);
                const double s1 = 4.0 * u(rng) - 1.0, s2 = 4.0 * u(rng) - 1.0;
                auto [x1, r1] = susp.flow(y, r0, s1);
                auto [x2, r2] = susp.flow(x1, r1, s2);
                auto [xd, rd] = susp.flow(y, r0, s1 + s2);
                worst_semigroup = std::max(worst_semigroup, (x2 - xd).norm() + std::abs(r2 - rd));
                if (r0 < 0.5) {
                    auto [xm, rm] = susp.flow(y, 0.999 * r0 * 0.5, 3.0);
                    (void)xm;
                    if (rm >= 0.5) slab_ok = false;
                }
            }
            doc["semigroup_defect"] = worst_semigroup;
            doc["non_mixing_slab_witness"] = slab_ok;
            hs::write_json(g.out("suspend_report.json"), doc);
            std::cout << "suspend: semigroup defect " << worst_semigroup << ", slab witness "
                      << (slab_ok ? "holds" : "fails") << "\n";
            return (worst_semigroup <= 1e-12 && slab_ok) ? 0 : 1;
        }

        // ------------------------------------------------------------------
        if (selftest->parsed()) {
            hs::AcceptanceConfig cfg;
            cfg.tol_scale = a.tol_scale;
            cfg.fast_only = a.fast;
            bool all = true;
            std::string first_fail;
            const auto results = hs::run_acceptance(cfg, [&](const hs::CriterionResult& r) {
                std::cout << (r.pass ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.name << "\n";
                if (!r.pass && first_fail.empty()) first_fail = r.name;
                all = all && r.pass;
            });
            hs::write_json(g.out("selftest_report.json"),
                           hs::acceptance_report(results, {{"tolerance_scale", cfg.tol_scale},
                                                           {"fast", cfg.fast_only}}));
            if (!all) std::cout << "selftest: FAILED at \"" << first_fail << "\"\n";
            else std::cout << "selftest: all criteria passed\n";
            return all ? 0 : 1;
        }
    } catch (const hs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const hs::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
