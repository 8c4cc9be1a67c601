// Command-line driver: configures one experiment from a flat key = value
// file and runs one of the subcommands
//   simulate     time series + summary of a single trajectory
//   decompose    same, plus the linear/compact split and superposition audit
//   steady       Newton sweep for equilibria, written as a JSON array
//   verify       the full fourteen-check verification suite
//   rate         decay-rate fits over an existing series.csv
//   kernel-check admissibility report for the configured memory kernel
// Exit codes: 0 ok, 1 check failure, 2 config error, 3 numerical failure.

#include "platemem/acceptance.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using namespace platemem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalFailure = 3;

struct GlobalOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

RunConfig resolve_config(const GlobalOptions& g) {
    RunConfig cfg = g.config_path.empty() ? default_config() : load_config(g.config_path);
    if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
    if (g.seed) cfg.seed = *g.seed;
    return cfg;
}

// one evaluated sample of a trajectory, everything the series and the
// summary need; distances are reconstructed post-hoc from the modal
// coefficients because every equilibrium carries zero history
struct Sample {
    double t = 0.0;
    std::vector<double> u;
    double v0 = 0.0, th0 = 0.0, eta1 = 0.0;
    double E = 0.0, J = 0.0, grad_v_sq = 0.0, pairing = 0.0, resid = 0.0;
    HProbeSample hp;
    // decompose extras
    double zd0 = 0.0, zc0 = 0.0, sup_err = 0.0;
    std::vector<double> uc;
    double vc1 = 0.0, thc1 = 0.0, etac2 = 0.0;
};

void fill_common(Sample& s, const StateVector& z, const Nonlinearity& f) {
    s.t = z.t;
    s.u = z.u.coeffs();
    s.v0 = v_norm(z.v, 0.0);
    s.th0 = v_norm(z.theta, 0.0);
    s.eta1 = z.eta.m_norm(1.0);
    s.E = energy_E(z, f);
    s.J = functional_J(z);
    s.grad_v_sq = v_norm_sq(z.v, 1.0);
    s.pairing = z.eta.dissipation_pairing(1.0);
    s.resid = stationarity_residual(z.u, f);
    s.hp = h_probe(z, f);
}

double dist_sq_u(const ModalBasis& basis, const std::vector<double>& u, const SpectralField& u_inf,
                 double power) {
    double acc = 0.0;
    for (int k = 0; k < static_cast<int>(u.size()); ++k) {
        const double d = u[k] - u_inf[k];
        acc += std::pow(basis.lambda(k), power) * d * d;
    }
    return acc;
}

struct Analysis {
    std::vector<Equilibrium> equilibria;
    int best = -1; // closest to u(T) in V^2, -1 when the sweep failed
    double e_inf = 0.0;
    FunctionalConfig functional;
    std::vector<double> h;            // H with the resolved coefficients
    std::vector<double> dist_v0;      // ||z - z_inf||_{V^0}, NaN rows without target
    std::vector<double> dist_u_v2;    // ||u - u_inf||_{V^2}
    std::vector<double> dissipation;  // per-sample residual, NaN unless stride 1
};

Analysis analyze(const ModalBasis& basis, const RunConfig& cfg, const std::vector<Sample>& samples) {
    Analysis a;
    const double nan = std::nan("");

    try {
        a.equilibria = steady_sweep(basis, cfg.f, default_steady_guesses(basis));
    } catch (const NewtonFailure&) {
        // distances stay NaN
    }
    if (!a.equilibria.empty()) {
        a.best = 0;
        const auto& u_fin = samples.back().u;
        for (std::size_t i = 1; i < a.equilibria.size(); ++i)
            if (dist_sq_u(basis, u_fin, a.equilibria[i].u, 2.0) <
                dist_sq_u(basis, u_fin, a.equilibria[a.best].u, 2.0))
                a.best = static_cast<int>(i);
        a.e_inf = energy_of_u(a.equilibria[a.best].u, cfg.f);
    }

    a.functional = cfg.functional;
    if (cfg.audit_functional) {
        std::vector<HProbeSample> probe;
        for (const auto& s : samples) probe.push_back(s.hp);
        try {
            a.functional = coefficient_audit(probe);
        } catch (const std::exception&) {
            // probe too short to audit: keep the configured coefficients
        }
    }

    for (const auto& s : samples) {
        a.h.push_back(s.hp.base + a.functional.alpha * s.hp.J + a.functional.eps * s.hp.pairing);
        if (a.best >= 0) {
            const SpectralField& u_inf = a.equilibria[a.best].u;
            const double du2 = dist_sq_u(basis, s.u, u_inf, 2.0);
            a.dist_v0.push_back(
                std::sqrt(du2 + s.v0 * s.v0 + s.th0 * s.th0 + s.eta1 * s.eta1));
            a.dist_u_v2.push_back(std::sqrt(du2));
        } else {
            a.dist_v0.push_back(nan);
            a.dist_u_v2.push_back(nan);
        }
    }

    a.dissipation.assign(samples.size(), nan);
    if (cfg.scheme.sample_stride == 1 && samples.size() >= 2) {
        std::vector<EnergySample> es(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            es[i].t = samples[i].t;
            es[i].E = samples[i].E;
            es[i].grad_v_sq = samples[i].grad_v_sq;
            es[i].pairing = samples[i].pairing;
        }
        dissipation_residual(es, cfg.scheme.dt, cfg.scheme.scheme);
        for (std::size_t i = 0; i < samples.size(); ++i)
            a.dissipation[i] = es[i].dissipation_residual;
    }
    return a;
}

json fit_to_json(const RateFit& f) {
    return json{{"p", f.p},
                {"prefactor", f.prefactor},
                {"r2_poly", f.r2_poly},
                {"rate", f.rate},
                {"prefactor_exp", f.prefactor_exp},
                {"r2_exp", f.r2_exp},
                {"t_a", f.t_a},
                {"t_b", f.t_b},
                {"rho_hat", f.rho_hat},
                {"exponential_wins", f.exponential_wins}};
}

// rate fit over the window where the value series is positive and above the
// final-plateau floor; returns nothing when fewer than three samples qualify
std::optional<RateFit> tail_fit(const std::vector<double>& t, const std::vector<double>& v) {
    double floor = 0.0;
    for (double x : v)
        if (std::isfinite(x)) floor = std::max(floor, x);
    floor = std::max(100.0 * (std::isfinite(v.back()) ? v.back() : 0.0), 1e-14 * floor);
    std::vector<double> tw, vw;
    const double t_end = t.back();
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= 0.1 * t_end && std::isfinite(v[i]) && v[i] > floor) {
            tw.push_back(t[i]);
            vw.push_back(v[i]);
        }
    if (tw.size() < 3) return std::nullopt;
    return fit_rate(tw, vw, tw.front(), tw.back());
}

std::optional<LojasiewiczProbe> probe_tail(const std::vector<double>& gap,
                                           const std::vector<double>& resid) {
    std::vector<double> g, r;
    for (std::size_t i = 0; i < gap.size(); ++i)
        if (gap[i] > 1e-13 && resid[i] > 1e-13) {
            g.push_back(gap[i]);
            r.push_back(resid[i]);
        }
    if (g.size() < 3) return std::nullopt;
    return ls_probe(g, r, 0.5);
}

void write_row(std::FILE* f, const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i)
        std::fprintf(f, "%s%.17g", i ? "," : "", row[i]);
    std::fprintf(f, "\n");
}

json summarize(const ModalBasis& basis, const RunConfig& cfg, const std::vector<Sample>& samples,
               const Analysis& a) {
    json sum;
    const Sample& fin = samples.back();
    sum["final"] = {{"t", fin.t},
                    {"norm_v", fin.v0},
                    {"norm_theta", fin.th0},
                    {"norm_eta_M1", fin.eta1},
                    {"E", fin.E},
                    {"H", a.h.back()},
                    {"dist_V0", a.dist_v0.back()},
                    {"dist_u_V2", a.dist_u_v2.back()}};
    sum["functional"] = {{"alpha", a.functional.alpha},
                         {"eps", a.functional.eps},
                         {"transient_samples", a.functional.transient_samples},
                         {"audited", cfg.audit_functional}};
    if (a.best >= 0) {
        const Equilibrium& eq = a.equilibria[a.best];
        const bool state_small = fin.v0 + fin.th0 + fin.eta1 <= 1e-6;
        const bool u_close = a.dist_u_v2.back() <= 1e-4;
        sum["equilibrium"] = {{"residual_Vm2", eq.residual},
                              {"nondegenerate", eq.nondegenerate},
                              {"local_minimizer", eq.local_minimizer},
                              {"coefficients", eq.u.coeffs()},
                              {"energy", a.e_inf}};
        sum["convergence"] = {{"state_residual_small", state_small},
                              {"u_close_to_equilibrium", u_close},
                              {"converged", state_small && u_close}};
        std::vector<double> t;
        for (const auto& s : samples) t.push_back(s.t);
        if (auto f = tail_fit(t, a.dist_v0)) sum["rate_fit_dist_V0"] = fit_to_json(*f);
        std::vector<double> gap, resid;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            gap.push_back(samples[i].E - a.e_inf);
            resid.push_back(samples[i].resid);
        }
        if (auto p = probe_tail(gap, resid))
            sum["lojasiewicz_probe"] = {{"sigma", p->sigma},
                                        {"rho_hat", p->rho_hat},
                                        {"r2", p->r2},
                                        {"samples_used", p->samples_used}};
    } else {
        sum["equilibrium"] = nullptr;
        sum["convergence"] = {{"converged", false}};
    }
    sum["modes"] = basis.mode_count();
    sum["dt"] = cfg.scheme.dt;
    sum["total_time"] = cfg.scheme.total_time;
    sum["seed"] = cfg.seed;
    return sum;
}

std::FILE* open_series(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = cfg.out_dir + "/series.csv";
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    return f;
}

void write_json(const RunConfig& cfg, const std::string& name, const json& j) {
    std::ofstream out(cfg.out_dir + "/" + name);
    out << j.dump(2) << "\n";
}

int cmd_simulate(const RunConfig& cfg, bool decomposed) {
    ModalBasis basis = build_basis(cfg.domain());
    ModelParams params = cfg.model();
    KernelQuadrature quad = build_quadrature(params.kernel, cfg.scheme.dt, cfg.scheme.tail_tol);
    StateVector z0 = cfg.initial_state(basis, quad);

    std::vector<Sample> samples;
    if (decomposed) {
        decompose(std::move(z0), basis, quad, params, cfg.scheme,
                  [&](const StateVector& z, const StateVector& zd, const StateVector& zc) {
                      Sample s;
                      fill_common(s, z, params.f);
                      s.zd0 = zd.norm(0.0);
                      s.zc0 = zc.norm(0.0);
                      s.sup_err = superposition_error(z, zd, zc);
                      s.uc = zc.u.coeffs();
                      s.vc1 = v_norm(zc.v, 1.0);
                      s.thc1 = v_norm(zc.theta, 1.0);
                      s.etac2 = zc.eta.m_norm(2.0);
                      samples.push_back(std::move(s));
                  });
    } else {
        simulate(std::move(z0), basis, quad, params, cfg.scheme, [&](const StateVector& z) {
            Sample s;
            fill_common(s, z, params.f);
            samples.push_back(std::move(s));
        });
    }

    Analysis a = analyze(basis, cfg, samples);

    std::FILE* f = open_series(cfg);
    std::fprintf(f, "t,E,H,J,norm_v,norm_theta,norm_eta_M1,grad_v_sq,dissipation_residual,"
                    "stat_residual,dist_V0,dist_u_V2%s\n",
                 decomposed ? ",norm_zD_V0,norm_zC_V0,superposition_error" : "");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Sample& s = samples[i];
        std::vector<double> row{s.t,         s.E,          a.h[i],          s.J,
                                s.v0,        s.th0,        s.eta1,          s.grad_v_sq,
                                a.dissipation[i], s.resid, a.dist_v0[i],    a.dist_u_v2[i]};
        if (decomposed) {
            row.push_back(s.zd0);
            row.push_back(s.zc0);
            row.push_back(s.sup_err);
        }
        write_row(f, row);
    }
    std::fclose(f);

    json sum = summarize(basis, cfg, samples, a);
    if (decomposed) {
        double worst = 0.0;
        std::vector<double> t, zd, zc_dist;
        for (const auto& s : samples) {
            worst = std::max(worst, s.sup_err);
            t.push_back(s.t);
            zd.push_back(s.zd0);
        }
        sum["superposition_error_max"] = worst;
        if (auto f_zd = tail_fit(t, zd)) sum["zD_fit_V0"] = fit_to_json(*f_zd);
        if (a.best >= 0) {
            const SpectralField& u_inf = a.equilibria[a.best].u;
            for (const auto& s : samples)
                zc_dist.push_back(std::sqrt(dist_sq_u(basis, s.uc, u_inf, 3.0) + s.vc1 * s.vc1 +
                                            s.thc1 * s.thc1 + s.etac2 * s.etac2));
            if (auto f_zc = tail_fit(t, zc_dist)) sum["zC_fit_V1"] = fit_to_json(*f_zc);
        }
    }
    write_json(cfg, "summary.json", sum);
    std::cout << "wrote " << cfg.out_dir << "/series.csv and summary.json ("
              << samples.size() << " samples)\n";
    return kExitOk;
}

int cmd_steady(const RunConfig& cfg) {
    ModalBasis basis = build_basis(cfg.domain());
    std::vector<Equilibrium> eqs;
    try {
        eqs = steady_sweep(basis, cfg.f, default_steady_guesses(basis));
    } catch (const NewtonFailure& e) {
        std::cerr << "steady: " << e.what() << "\n";
        return kExitNumericalFailure;
    }
    json arr = json::array();
    for (const auto& eq : eqs) arr.push_back(json::parse(equilibrium_to_json(eq)));
    std::filesystem::create_directories(cfg.out_dir);
    write_json(cfg, "equilibria.json", arr);
    std::cout << "wrote " << cfg.out_dir << "/equilibria.json (" << eqs.size()
              << " equilibria)\n";
    return kExitOk;
}

json assumption_json(const AssumptionReport& rep) {
    auto one = [](const AssumptionCheck& c) {
        return json{{"pass", c.pass}, {"margin", c.margin}, {"worst_node", c.worst_node}};
    };
    return json{{"integrability", one(rep.h1)},
                {"sign_and_monotonicity", one(rep.h2)},
                {"exponential_domination", one(rep.h3)},
                {"positive_mass", one(rep.h4)},
                {"domination_delta", rep.h3_delta},
                {"all_pass", rep.all_pass()}};
}

AssumptionReport check_config_kernel(const RunConfig& cfg) {
    std::vector<double> grid;
    if (cfg.kernel.kind == KernelKind::Table) {
        grid = cfg.kernel.s;
        if (!grid.empty() && grid.front() > 0.0) grid.insert(grid.begin(), 0.0);
    } else {
        for (int i = 0; i <= 5000; ++i) grid.push_back(0.01 * i);
    }
    return verify_assumptions(cfg.kernel, grid);
}

int cmd_kernel_check(const RunConfig& cfg) {
    AssumptionReport rep = check_config_kernel(cfg);
    KernelQuadrature quad = build_quadrature(cfg.kernel, cfg.scheme.dt, cfg.scheme.tail_tol);
    json j = assumption_json(rep);
    j["quadrature"] = {{"ds", quad.ds},
                       {"nodes", quad.nodes},
                       {"horizon", quad.horizon},
                       {"kappa0", quad.kappa0},
                       {"tail_mass", quad.tail_mass},
                       {"partition_defect", std::abs(quad.weight_sum() + quad.tail_mass - quad.kappa0)}};
    std::filesystem::create_directories(cfg.out_dir);
    write_json(cfg, "kernel_check.json", j);
    std::cout << j.dump(2) << "\n";
    return rep.all_pass() ? kExitOk : kExitCheckFailure;
}

int cmd_verify(const RunConfig& cfg) {
    json checks = json::array();

    // the configured kernel must be admissible before the suite is meaningful
    AssumptionReport rep = check_config_kernel(cfg);
    checks.push_back({{"id", 0},
                      {"name", "config-kernel-admissibility"},
                      {"pass", rep.all_pass()},
                      {"detail", assumption_json(rep).dump()}});
    bool ok = rep.all_pass();
    std::cout << (ok ? "PASS" : "FAIL") << "  [0] config-kernel-admissibility\n";

    if (ok) {
        std::vector<CheckResult> results = run_acceptance_suite(&std::cerr);
        for (const auto& r : results) {
            checks.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
            std::cout << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << " — "
                      << r.detail << "\n";
        }
        ok = all_pass(results);
    } else {
        std::cout << "configured kernel is inadmissible; skipping the trajectory checks\n";
    }

    std::filesystem::create_directories(cfg.out_dir);
    write_json(cfg, "verify.json", json{{"checks", checks}, {"all_pass", ok}});
    return ok ? kExitOk : kExitCheckFailure;
}

int cmd_rate(const RunConfig& cfg) {
    const std::string path = cfg.out_dir + "/series.csv";
    std::ifstream in(path);
    if (!in) throw ConfigError("rate: cannot open " + path + " (run simulate first)");

    std::string header;
    std::getline(in, header);
    std::vector<std::string> cols;
    {
        std::stringstream ss(header);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    auto col = [&](const std::string& name) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name) return static_cast<int>(i);
        throw ConfigError("rate: series.csv lacks column '" + name + "'");
    };
    const int ct = col("t"), ce = col("E"), cr = col("stat_residual"), cd = col("dist_V0");

    std::vector<double> t, e, resid, dist;
    std::string line;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string item;
        std::vector<double> row;
        while (std::getline(ss, item, ',')) row.push_back(std::strtod(item.c_str(), nullptr));
        if (row.size() != cols.size()) throw ConfigError("rate: malformed row in " + path);
        t.push_back(row[ct]);
        e.push_back(row[ce]);
        resid.push_back(row[cr]);
        dist.push_back(row[cd]);
    }
    if (t.size() < 3) throw ConfigError("rate: series too short to fit");

    json j;
    if (auto f = tail_fit(t, dist)) j["rate_fit_dist_V0"] = fit_to_json(*f);
    double e_floor = e.back();
    std::vector<double> gap;
    for (double x : e) gap.push_back(x - e_floor);
    if (auto p = probe_tail(gap, resid))
        j["lojasiewicz_probe"] = {{"sigma", p->sigma},
                                  {"rho_hat", p->rho_hat},
                                  {"r2", p->r2},
                                  {"samples_used", p->samples_used}};
    if (j.empty()) {
        std::cerr << "rate: no usable decay window in " << path << "\n";
        return kExitCheckFailure;
    }
    write_json(cfg, "rate.json", j);
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral solver for a plate equation coupled to heat conduction with memory"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--config", g.config_path, "path to a flat key = value config file");
    app.add_option("--out", g.out_dir, "output directory (overrides the config)");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "random seed (overrides the config)");
    app.add_option("--threads", g.threads, "worker threads (evaluations are single-threaded)")
        ->check(CLI::PositiveNumber);

    auto* simulate_cmd = app.add_subcommand("simulate", "run one trajectory, write series + summary");
    auto* decompose_cmd =
        app.add_subcommand("decompose", "run the linear/compact decomposition in lockstep");
    auto* steady_cmd = app.add_subcommand("steady", "Newton sweep for equilibria");
    auto* verify_cmd = app.add_subcommand("verify", "run the full verification suite");
    auto* rate_cmd = app.add_subcommand("rate", "fit decay rates over an existing series.csv");
    auto* kernel_cmd = app.add_subcommand("kernel-check", "kernel admissibility report");
    // global flags may appear before or after the subcommand name
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }
    if (seed_opt->count() > 0) g.seed = seed_value;

    RunConfig cfg;
    try {
        cfg = resolve_config(g);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        if (simulate_cmd->parsed()) return cmd_simulate(cfg, false);
        if (decompose_cmd->parsed()) return cmd_simulate(cfg, true);
        if (steady_cmd->parsed()) return cmd_steady(cfg);
        if (verify_cmd->parsed()) return cmd_verify(cfg);
        if (rate_cmd->parsed()) return cmd_rate(cfg);
        if (kernel_cmd->parsed()) return cmd_kernel_check(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const SimulationFailure& e) {
        std::cerr << "numerical failure at t = " << e.t << ": " << e.what() << "\n";
        return kExitNumericalFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericalFailure;
    }
    return kExitConfigError;
}
