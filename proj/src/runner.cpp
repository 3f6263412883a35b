#include "mhdbl/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mhdbl/checks.hpp"
#include "mhdbl/field_io.hpp"
#include "mhdbl/text.hpp"

namespace mhdbl {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json num_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

json cplx_json(cplx z) { return json{{"re", num(z.real())}, {"im", num(z.imag())}}; }

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Csv {
public:
    Csv(const fs::path& path, const std::string& header) : path_(path), os_(path) {
        if (!os_) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
        os_ << header << '\n';
    }
    template <class... T>
    void row(const T&... v) {
        bool first = true;
        ((os_ << (first ? "" : ",") << cell(v), first = false), ...);
        os_ << '\n';
    }
    ~Csv() noexcept(false) {
        os_.flush();
        if (!os_ && std::uncaught_exceptions() == 0) throw Error(ErrorKind::IoError, "write failed for " + path_.string());
    }

private:
    static std::string cell(double v) { return fmt_double(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }

    fs::path path_;
    std::ofstream os_;
};

void write_json(const fs::path& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
    os << j.dump(2) << '\n';
    if (!os) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::string magnetic_name(MagneticProfile::Kind k) {
    switch (k) {
        case MagneticProfile::Kind::uniform: return "uniform";
        case MagneticProfile::Kind::nondegenerate: return "nondegenerate";
        case MagneticProfile::Kind::degenerate: return "degenerate";
    }
    return "?";
}

json config_json(const ScenarioConfig& c) {
    const auto& p = c.instability;
    json j;
    j["grid"] = {{"nx", c.grid.nx}, {"ny", c.grid.ny}, {"y_max", c.grid.y_max}, {"y_stretch", c.grid.y_stretch}};
    j["run"] = {{"T", c.run.T},
                {"dt", c.run.dt},
                {"solver", c.run.solver},
                {"tol", c.run.tol},
                {"max_iter", c.run.max_iter},
                {"m_monitor", c.run.m_monitor},
                {"J", c.run.J},
                {"cfl", c.run.cfl},
                {"contraction_search", c.run.contraction_search},
                {"max_halvings", c.run.max_halvings},
                {"snapshots", c.run.snapshots},
                {"samples", c.run.samples},
                {"levels", c.run.levels}};
    j["data"] = {{"kind", c.data.kind},           {"amplitude", c.data.amplitude}, {"delta0", c.data.delta0},
                 {"dip", c.data.dip},             {"dip_y", c.data.dip_y},         {"dip_width", c.data.dip_width}};
    j["outflow"] = {{"mode", c.outflow.mode}, {"U0", c.outflow.U0}, {"B0", c.outflow.B0},
                    {"dU", c.outflow.dU},     {"dB", c.outflow.dB}, {"nt0", c.outflow.nt0}};
    j["profile"] = {{"U0", p.U0},       {"a", p.a},           {"curvature", p.curvature},
                    {"jet_width", p.jet_width}, {"magnetic", magnetic_name(p.magnetic)},
                    {"B0", p.B0},       {"b_width", p.b_width}, {"delta0", p.delta0}};
    j["instability"] = {{"eps", num_array(p.eps_list)},
                        {"remainder_eps", num_array(p.remainder_eps)},
                        {"remainder_samples", p.remainder_samples},
                        {"Z", p.Z},
                        {"n_z", p.n_z},
                        {"ny", p.ny},
                        {"y_max", p.y_max},
                        {"heat_dt", p.heat_dt},
                        {"cutoff_width", p.cutoff_width},
                        {"alpha", p.alpha},
                        {"window", {p.window.lo, p.window.hi}},
                        {"steps_per_window", p.steps_per_window},
                        {"cfl", p.cfl},
                        {"cache", c.eigen_cache},
                        {"collocation_nodes", c.collocation_nodes}};
    return j;
}

// ---- simulate ----

ProblemSetup build_setup(const ScenarioConfig& c, const Grid& g, double T) {
    const auto spec = c.outflow_spec();
    ProblemSetup s;
    if (c.data.kind == "zero") {
        s.outflow = make_outflow(spec, g.nx(), time_grid(T, c.run.dt));
        s.forcing = residual_forcing(s.outflow, g);
        s.b_init = Field(g);
        s.v_init = Field(g);
    } else if (c.data.kind == "bump") {
        s = gaussian_bump_setup(g, T, c.run.dt, c.data.amplitude, spec);
    } else if (c.data.kind == "manufactured") {
        s = manufactured_setup(g, T, c.run.dt, spec.U0, spec.B0);
    } else {
        s = random_admissible_setup(g, T, c.run.dt, c.seed);
    }
    if (c.data.dip > 0.0) {
        const double w2 = c.data.dip_width * c.data.dip_width;
        for (int i = 0; i < g.nx(); ++i)
            for (int j = 0; j < g.ny(); ++j) {
                const double dx = g.x(i) - kTwoPi / 2, dy = g.y(j) - c.data.dip_y;
                s.b_init(i, j) -= c.data.dip * std::exp(-(dx * dx + dy * dy) / w2);
            }
    }
    return s;
}

// Admissibility gate on b0 + B(0,·); returns the δ0 to use.
double admissible_delta0(const ScenarioConfig& c, const ProblemSetup& s) {
    const Grid& g = s.b_init.grid();
    double lo = 1e300;
    int li = 0, lj = 0;
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            if (const double v = s.b_init(i, j) + s.outflow.B[0][i]; v < lo) {
                lo = v;
                li = i;
                lj = j;
            }
    std::ostringstream where;
    where << "b0 + B = " << lo << " at x=" << g.x(li) << ", y=" << g.y(lj);
    if (c.data.delta0 > 0.0) {
        if (lo < c.data.delta0)
            throw ValidationFailure({"data.delta0: " + where.str() + " is below delta0 = " + fmt_double(c.data.delta0)});
        return c.data.delta0;
    }
    if (!(lo > 0.0)) throw ValidationFailure({"data: " + where.str() + " is not positive"});
    return lo;
}

json run_simulate(const ScenarioConfig& c, const fs::path& out) {
    const Grid g(c.grid.nx, c.grid.ny, c.grid.y_max, c.grid.y_stretch);
    auto setup = build_setup(c, g, c.run.T);
    const double delta0 = admissible_delta0(c, setup);

    json r;
    r["solver"] = c.run.solver;
    r["delta0"] = delta0;
    r["forcing_bound_ratio"] = num(setup.forcing.bound_ratio);
    HomogenizedState state;
    if (c.run.solver == "direct") {
        MarchOptions mo;
        mo.lower_bound = 0.5 * delta0;
        mo.cfl = c.run.cfl;
        state = direct_march(setup.b_init, setup.v_init, setup.outflow, setup.forcing, delta0, mo);
        r["T"] = c.run.T;
    } else {
        PicardOptions po;
        po.tol = c.run.tol;
        po.max_iter = c.run.max_iter;
        po.m_monitor = c.run.m_monitor;
        po.J = c.run.J;
        po.delta0 = delta0;
        po.cfl = c.run.cfl;
        PicardResult pr;
        double T = c.run.T;
        if (c.run.contraction_search) {
            auto cs = find_contraction_time([&](double t) { return build_setup(c, g, t); }, c.run.T,
                                            c.run.max_halvings, po);
            r["halvings"] = cs.halvings;
            r["contraction_found"] = cs.found;
            r["contraction_ratios"] = num_array(cs.ratios);
            if (!cs.found)
                throw Error(ErrorKind::NoContraction,
                            "no contracting horizon within " + std::to_string(c.run.max_halvings) + " halvings");
            T = cs.T;
            pr = std::move(cs.result);
        } else {
            pr = picard_solve(setup.b_init, setup.v_init, setup.outflow, setup.forcing, po);
        }
        r["T"] = T;
        r["converged"] = pr.converged;
        r["iterations"] = pr.reports.size();
        Csv csv(out / "iterations.csv", "iter,sup_Hm,l2_diff,ratio,min_b");
        json its = json::array();
        for (const auto& it : pr.reports) {
            csv.row(it.iterate_index, it.sup_Hm, it.l2_diff, it.contraction_ratio, it.min_b_plus_B);
            its.push_back({{"iter", it.iterate_index},
                           {"sup_Hm", num(it.sup_Hm)},
                           {"l2_diff", num(it.l2_diff)},
                           {"ratio", num(it.contraction_ratio)},
                           {"min_b", num(it.min_b_plus_B)}});
        }
        r["iteration_reports"] = its;
        state = std::move(pr.state);
    }
    const auto inv = monitor_invariants(state);
    {
        Csv csv(out / "energy.csv", "t,energy,dissipation");
        for (std::size_t n = 0; n < state.nt(); ++n) csv.row(state.t_grid[n], inv.energy[n], inv.dissipation[n]);
    }
    r["min_b_plus_B"] = num(inv.min_b_plus_B);
    r["energy_initial"] = num(inv.energy.front());
    r["energy_final"] = num(inv.energy.back());
    r["energy_max"] = num(*std::max_element(inv.energy.begin(), inv.energy.end()));
    r["gronwall_K"] = num(inv.gronwall_K);
    if (c.run.snapshots) {
        write_field(out / "b_final.bin", state.b.back());
        write_field(out / "v_final.bin", state.v.back());
        r["snapshots"] = {"b_final.bin", "v_final.bin"};
    }
    return r;
}

// ---- eigen / instability ----

EigenOptions eigen_options(const ScenarioConfig& c) {
    EigenOptions eo;
    eo.Z = c.instability.Z;
    eo.n_z = c.instability.n_z;
    eo.collocation_nodes = c.collocation_nodes;
    return eo;
}

Eigenpair obtain_pair(const ScenarioConfig& c, const fs::path& out) {
    const auto eo = eigen_options(c);
    return c.eigen_cache ? cached_eigenpair(out, eo) : solve_eigenpair(eo);
}

json pair_json(const Eigenpair& p) {
    double wmax = 0.0;
    for (const auto& w : p.W) wmax = std::max(wmax, std::abs(w));
    return {{"tau", cplx_json(p.tau)},
            {"tau_collocation", cplx_json(p.tau_collocation)},
            {"tau_gap", num(std::abs(p.tau - p.tau_collocation))},
            {"cross_validated", p.cross_validated},
            {"residual", num(p.residual)},
            {"boundary_defect", num(p.boundary_defect)},
            {"max_abs_W", num(wmax)},
            {"Z", p.Z},
            {"n_z", p.n_z}};
}

json run_eigen(const ScenarioConfig& c, const fs::path& out) {
    const auto p = obtain_pair(c, out);
    Csv csv(out / "eigen.csv", "z,W_re,W_im,V_re,V_im");
    for (std::size_t j = 0; j < p.z.size(); ++j)
        csv.row(p.z[j], p.W[j].real(), p.W[j].imag(), p.V[j][0].real(), p.V[j][0].imag());
    json r = pair_json(p);
    if (c.eigen_cache) r["cache"] = eigen_cache_path(".", p.Z, p.n_z).filename().string();
    return r;
}

json run_instability(const ScenarioConfig& c, const fs::path& out) {
    auto pair = std::make_shared<const Eigenpair>(obtain_pair(c, out));
    const auto res = illposedness_experiment(c.instability, pair);
    const auto& rep = res.report;
    {
        Csv csv(out / "growth.csv", "eps,t,norm,sigma_fit");
        for (std::size_t i = 0; i < res.runs.size(); ++i) {
            const auto& s = res.runs[i].evolved;
            for (std::size_t n = 0; n < s.t.size(); ++n) csv.row(s.epsilon, s.t[n], s.norm[n], rep.fitted_sigma[i]);
        }
    }
    {
        Csv csv(out / "mode.csv", "eps,t,evolved_norm,mode_norm");
        for (const auto& run : res.runs)
            for (std::size_t n = 0; n < run.evolved.t.size(); ++n)
                csv.row(run.epsilon, run.evolved.t[n], run.evolved.norm[n], run.mode_norm[n]);
    }
    json checks = json::array();
    if (!res.remainder_checks.empty()) {
        Csv csv(out / "remainders.csv", "eps,t,norm");
        for (const auto& b : res.remainder_checks) {
            for (std::size_t n = 0; n < b.t.size(); ++n) csv.row(b.epsilon, b.t[n], b.norm[n]);
            checks.push_back({{"eps", b.epsilon}, {"c0", num(b.c0)}, {"c4", num(b.c4)}, {"C", num(b.C)}});
        }
    }
    json runs = json::array();
    for (const auto& run : res.runs) {
        double lo = 1e300, hi = 0.0;
        for (std::size_t n = 0; n < run.mode_norm.size(); ++n) {
            const double q = run.evolved.norm[n] / run.mode_norm[n];
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
        runs.push_back({{"eps", run.epsilon},
                        {"dt", run.dt},
                        {"steps", run.evolved.t.size() - 1},
                        {"sigma0_over_sqrt_eps", num(run.sigma0_mean)},
                        {"initial_norm", num(run.evolved.norm.front())},
                        {"evolved_over_mode_min", num(lo)},
                        {"evolved_over_mode_max", num(hi)}});
    }
    json r;
    r["eigenpair"] = pair_json(*pair);
    r["growth_report"] = {{"eps_list", num_array(rep.eps_list)},
                          {"fitted_sigma", num_array(rep.fitted_sigma)},
                          {"scaling_slope", num(rep.scaling_slope)},
                          {"r_squared", num(rep.r_squared)},
                          {"remainder_exponents",
                           {{"p_small_t", num(rep.remainder_exponents[0])}, {"p_t4", num(rep.remainder_exponents[1])}}}};
    r["verdict"] = res.verdict;
    r["verdict_detail"] = res.verdict == "unstable"  ? "sigma(eps) grows like 1/sqrt(eps)"
                          : res.verdict == "stable" ? "sigma(eps) bounded in eps"
                                                    : "scaling slope between 0.3 and 0.8";
    r["runs"] = runs;
    r["remainder_checks"] = checks;
    return r;
}

// ---- checks ----

json run_transform_check(const ScenarioConfig& c, const fs::path& out) {
    Csv csv(out / "transform.csv", "seed,nx,ny,error,divergence");
    json studies = json::array();
    double min_e = 1e300, min_d = 1e300;
    for (int k = 0; k < c.run.samples; ++k) {
        const std::uint64_t seed = c.seed + 1 + static_cast<std::uint64_t>(k);
        const auto st = transform_roundtrip(seed, c.run.levels);
        for (const auto& l : st.levels) csv.row(seed, l.nx, l.ny, l.error, l.divergence);
        studies.push_back({{"seed", seed},
                           {"min_error_ratio", num(st.min_error_ratio)},
                           {"min_divergence_ratio", num(st.min_divergence_ratio)}});
        min_e = std::min(min_e, st.min_error_ratio);
        min_d = std::min(min_d, st.min_divergence_ratio);
    }
    return {{"studies", studies}, {"min_error_ratio", num(min_e)}, {"min_divergence_ratio", num(min_d)}};
}

json run_outflow_check(const ScenarioConfig& c, const fs::path& out) {
    const auto st = outflow_study(c.outflow_spec(), c.grid.nx, c.run.T, c.outflow.nt0, c.run.levels);
    Csv csv(out / "outflow.csv", "nt,residual");
    json lv = json::array();
    for (const auto& l : st.levels) {
        csv.row(l.nt, l.residual);
        lv.push_back({{"nt", l.nt}, {"residual", num(l.residual)}});
    }
    return {{"levels", lv}, {"min_ratio", num(st.min_ratio)}, {"max_U", num(st.max_U)}, {"max_B", num(st.max_B)}};
}

json error_json(const Error& e) {
    json j{{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    if (auto* v = dynamic_cast<const ValidationFailure*>(&e)) j["violations"] = v->violations();
    if (auto* p = dynamic_cast<const ParseFailure*>(&e)) j["line"] = p->line();
    if (auto* l = dynamic_cast<const LocatedError*>(&e)) j["location"] = {{"t", l->t()}, {"x", l->x()}, {"y", l->y()}};
    return j;
}

int finish(json& report, const fs::path& out, int code) {
    report["exit_code"] = code;
    report["timestamp"] = utc_timestamp();
    write_json(out / "report.json", report);
    return code;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ParseError:
        case ErrorKind::ValidationErrors: return 2;
        case ErrorKind::NumericalBlowup:
        case ErrorKind::OutflowBlowup: return 3;
        case ErrorKind::LowerBoundLost: return 4;
        case ErrorKind::EigenpairNotFound: return 5;
        default: return 1;
    }
}

int run_scenario(const ScenarioConfig& cfg, const fs::path& out) {
    fs::create_directories(out);
    json report;
    report["command"] = std::string(to_string(cfg.command));
    report["seed"] = cfg.seed;
    report["config"] = config_json(cfg);
    try {
        json result;
        switch (cfg.command) {
            case Command::simulate: result = run_simulate(cfg, out); break;
            case Command::instability: result = run_instability(cfg, out); break;
            case Command::eigen: result = run_eigen(cfg, out); break;
            case Command::transform_check: result = run_transform_check(cfg, out); break;
            case Command::outflow_check: result = run_outflow_check(cfg, out); break;
        }
        report["status"] = "ok";
        report["result"] = result;
        return finish(report, out, 0);
    } catch (const Error& e) {
        report["status"] = "error";
        report["error"] = error_json(e);
        return finish(report, out, exit_code_for(e.kind()));
    } catch (const std::exception& e) {
        report["status"] = "error";
        report["error"] = {{"kind", "Internal"}, {"message", e.what()}};
        return finish(report, out, 1);
    }
}

int run_from_file(Command command, const fs::path& config_path, const fs::path& out) {
    fs::create_directories(out);
    json report;
    report["command"] = std::string(to_string(command));
    try {
        std::ifstream is(config_path);
        if (!is) throw Error(ErrorKind::IoError, "cannot read config " + config_path.string());
        std::stringstream ss;
        ss << is.rdbuf();
        const auto cfg = parse_config(ss.str(), command);
        return run_scenario(cfg, out);
    } catch (const Error& e) {
        report["status"] = "error";
        report["error"] = error_json(e);
        return finish(report, out, exit_code_for(e.kind()));
    }
}

}  // namespace mhdbl
