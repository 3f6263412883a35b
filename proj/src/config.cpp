#include "mhdbl/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <toml.hpp>

namespace mhdbl {
namespace {

std::string join_lines(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += "\n  " + x;
    return s;
}

// Typed access to one table; type errors and unknown keys land in errs.
class Section {
public:
    Section(const toml::table* t, std::string name, std::vector<std::string>& errs)
        : t_(t), name_(std::move(name)), errs_(errs) {}

    void num(const char* key, double& out) {
        if (auto* n = get(key)) {
            if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer()))
                out = *v;
            else
                bad(key, "expected a number");
        }
    }
    void integer(const char* key, int& out) {
        if (auto* n = get(key)) {
            if (auto v = n->as_integer(); v && std::abs(v->get()) <= (1LL << 31) - 1)
                out = static_cast<int>(v->get());
            else
                bad(key, "expected an integer");
        }
    }
    void boolean(const char* key, bool& out) {
        if (auto* n = get(key)) {
            if (auto v = n->as_boolean())
                out = v->get();
            else
                bad(key, "expected true or false");
        }
    }
    void str(const char* key, std::string& out, std::initializer_list<const char*> allowed) {
        if (auto* n = get(key)) {
            auto v = n->as_string();
            if (!v) return bad(key, "expected a string");
            std::string opts;
            for (const char* a : allowed) {
                if (v->get() == a) {
                    out = v->get();
                    return;
                }
                opts += opts.empty() ? a : std::string(", ") + a;
            }
            bad(key, "unknown value \"" + v->get() + "\" (expected one of " + opts + ")");
        }
    }
    void num_list(const char* key, std::vector<double>& out) {
        if (auto* n = get(key)) {
            auto arr = n->as_array();
            if (!arr) return bad(key, "expected an array of numbers");
            std::vector<double> v;
            for (auto& e : *arr) {
                auto x = e.value<double>();
                if (!x || !(e.is_floating_point() || e.is_integer())) return bad(key, "expected an array of numbers");
                v.push_back(*x);
            }
            out = std::move(v);
        }
    }
    void finish() {
        if (!t_) return;
        for (auto&& [k, v] : *t_) {
            (void)v;
            if (!seen_.count(std::string(k.str()))) errs_.push_back(name_ + "." + std::string(k.str()) + ": unknown key");
        }
    }
    void bad(const char* key, const std::string& why) { errs_.push_back(name_ + "." + key + ": " + why); }

private:
    const toml::node* get(const char* key) {
        seen_.insert(key);
        return t_ ? t_->get(key) : nullptr;
    }

    const toml::table* t_;
    std::string name_;
    std::vector<std::string>& errs_;
    std::set<std::string> seen_;
};

bool integer_inverse(double e) {
    if (!(e > 0.0 && e <= 1.0)) return false;
    const double n = 1.0 / e;
    return std::abs(n - std::round(n)) <= 1e-9 * n;
}

std::string num_str(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

std::string_view to_string(Command c) {
    switch (c) {
        case Command::simulate: return "simulate";
        case Command::instability: return "instability";
        case Command::eigen: return "eigen";
        case Command::transform_check: return "transform-check";
        case Command::outflow_check: return "outflow-check";
    }
    return "?";
}

std::optional<Command> parse_command(std::string_view name) {
    for (Command c : {Command::simulate, Command::instability, Command::eigen, Command::transform_check,
                      Command::outflow_check})
        if (to_string(c) == name) return c;
    return std::nullopt;
}

ValidationFailure::ValidationFailure(std::vector<std::string> list)
    : Error(ErrorKind::ValidationErrors, std::to_string(list.size()) + " violation(s):" + join_lines(list)),
      list_(std::move(list)) {}

OutflowSpec ScenarioConfig::outflow_spec() const {
    OutflowSpec s;
    s.mode = outflow.mode == "evolved" ? OutflowSpec::Mode::evolved : OutflowSpec::Mode::constant;
    s.U0 = outflow.U0;
    s.B0 = outflow.B0;
    s.dU = outflow.dU;
    s.dB = outflow.dB;
    return s;
}

ScenarioConfig parse_config(const std::string& text, Command command) {
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        const int line = static_cast<int>(e.source().begin.line);
        throw ParseFailure("line " + std::to_string(line) + ": " + std::string(e.description()), line);
    }
    std::vector<std::string> errs;
    ScenarioConfig c;
    c.command = command;

    static const std::set<std::string> sections{"grid", "run", "data", "outflow", "profile", "instability"};
    for (auto&& [k, v] : root) {
        const std::string key(k.str());
        if (key == "command") {
            auto s = v.as_string();
            if (!s)
                errs.push_back("command: expected a string");
            else if (auto cmd = parse_command(s->get()); !cmd)
                errs.push_back("command: unknown command \"" + s->get() + "\"");
            else if (*cmd != command)
                errs.push_back("command: config is for \"" + s->get() + "\" but \"" + std::string(to_string(command)) +
                               "\" was requested");
        } else if (key == "seed") {
            auto s = v.as_integer();
            if (!s || s->get() < 0)
                errs.push_back("seed: expected a nonnegative integer");
            else
                c.seed = static_cast<std::uint64_t>(s->get());
        } else if (sections.count(key)) {
            if (!v.is_table()) errs.push_back(key + ": expected a table");
        } else {
            errs.push_back(key + ": unknown key");
        }
    }
    auto table = [&](const char* name) { return root.get_as<toml::table>(name); };

    {
        Section s(table("grid"), "grid", errs);
        s.integer("nx", c.grid.nx);
        s.integer("ny", c.grid.ny);
        s.num("y_max", c.grid.y_max);
        s.num("y_stretch", c.grid.y_stretch);
        s.finish();
        if (c.grid.nx < 4) s.bad("nx", "must be at least 4");
        if (c.grid.ny < 3) s.bad("ny", "must be at least 3");
        if (!(c.grid.y_max > 0.0)) s.bad("y_max", "must be positive");
        if (!(c.grid.y_stretch >= 0.0)) s.bad("y_stretch", "must be nonnegative");
    }
    {
        auto& r = c.run;
        Section s(table("run"), "run", errs);
        s.num("T", r.T);
        s.num("dt", r.dt);
        s.str("solver", r.solver, {"picard", "direct"});
        s.num("tol", r.tol);
        s.integer("max_iter", r.max_iter);
        s.integer("m_monitor", r.m_monitor);
        s.integer("J", r.J);
        s.num("cfl", r.cfl);
        s.boolean("contraction_search", r.contraction_search);
        s.integer("max_halvings", r.max_halvings);
        s.boolean("snapshots", r.snapshots);
        s.integer("samples", r.samples);
        s.integer("levels", r.levels);
        s.finish();
        if (!(r.T > 0.0)) s.bad("T", "must be positive");
        if (!(r.dt > 0.0)) s.bad("dt", "must be positive");
        else if (r.T > 0.0 && r.dt > r.T) s.bad("dt", "must not exceed T");
        if (!(r.tol > 0.0)) s.bad("tol", "must be positive");
        if (r.max_iter < 1) s.bad("max_iter", "must be at least 1");
        if (r.m_monitor < 0 || r.m_monitor > 4) s.bad("m_monitor", "must lie in 0..4");
        if (r.J < 0 || r.J > 2) s.bad("J", "must lie in 0..2");
        if (!(r.cfl > 0.0 && r.cfl <= 1.0)) s.bad("cfl", "must lie in (0, 1]");
        if (r.max_halvings < 0 || r.max_halvings > 20) s.bad("max_halvings", "must lie in 0..20");
        if (r.samples < 1) s.bad("samples", "must be at least 1");
        if (r.levels < 2 || r.levels > 6) s.bad("levels", "must lie in 2..6");
    }
    {
        auto& d = c.data;
        Section s(table("data"), "data", errs);
        s.str("kind", d.kind, {"zero", "bump", "manufactured", "random"});
        s.num("amplitude", d.amplitude);
        s.num("delta0", d.delta0);
        s.num("dip", d.dip);
        s.num("dip_y", d.dip_y);
        s.num("dip_width", d.dip_width);
        s.finish();
        if (!std::isfinite(d.amplitude)) s.bad("amplitude", "must be finite");
        if (!std::isfinite(d.delta0)) s.bad("delta0", "must be finite");
        if (!(d.dip >= 0.0)) s.bad("dip", "must be nonnegative");
        if (!(d.dip_width > 0.0)) s.bad("dip_width", "must be positive");
        if (!(d.dip_y >= 0.0 && d.dip_y <= c.grid.y_max)) s.bad("dip_y", "must lie in [0, grid.y_max]");
    }
    {
        auto& o = c.outflow;
        Section s(table("outflow"), "outflow", errs);
        s.str("mode", o.mode, {"constant", "evolved"});
        s.num("U0", o.U0);
        s.num("B0", o.B0);
        s.num("dU", o.dU);
        s.num("dB", o.dB);
        s.integer("nt0", o.nt0);
        s.finish();
        for (auto [k, v] : {std::pair{"U0", o.U0}, {"B0", o.B0}, {"dU", o.dU}, {"dB", o.dB}})
            if (!std::isfinite(v)) s.bad(k, "must be finite");
        if (o.nt0 < 2) s.bad("nt0", "must be at least 2");
    }
    {
        auto& p = c.instability;
        Section s(table("profile"), "profile", errs);
        std::string mag = "degenerate";
        s.num("U0", p.U0);
        s.num("a", p.a);
        s.num("curvature", p.curvature);
        s.num("jet_width", p.jet_width);
        s.str("magnetic", mag, {"degenerate", "nondegenerate", "uniform"});
        s.num("B0", p.B0);
        s.num("b_width", p.b_width);
        s.num("delta0", p.delta0);
        s.finish();
        p.magnetic = mag == "uniform"         ? MagneticProfile::Kind::uniform
                     : mag == "nondegenerate" ? MagneticProfile::Kind::nondegenerate
                                              : MagneticProfile::Kind::degenerate;
        if (!(p.U0 > 0.0)) s.bad("U0", "must be positive");
        if (!(p.a > 0.0)) s.bad("a", "must be positive");
        if (!(p.curvature < 0.0)) s.bad("curvature", "must be negative");
        if (!(p.jet_width > 0.0)) s.bad("jet_width", "must be positive");
        if (!(p.B0 > 0.0)) s.bad("B0", "must be positive");
        if (!(p.b_width > 0.0)) s.bad("b_width", "must be positive");
        if (p.magnetic == MagneticProfile::Kind::nondegenerate && !(p.delta0 > 0.0 && p.delta0 < p.B0))
            s.bad("delta0", "must lie in (0, profile.B0) for a nondegenerate profile");
    }
    {
        auto& p = c.instability;
        Section s(table("instability"), "instability", errs);
        std::vector<double> window{p.window.lo, p.window.hi};
        s.num_list("eps", p.eps_list);
        s.num_list("remainder_eps", p.remainder_eps);
        s.integer("remainder_samples", p.remainder_samples);
        s.num("Z", p.Z);
        s.integer("n_z", p.n_z);
        s.integer("ny", p.ny);
        s.num("y_max", p.y_max);
        s.num("heat_dt", p.heat_dt);
        s.num("cutoff_width", p.cutoff_width);
        s.num("alpha", p.alpha);
        s.num_list("window", window);
        s.integer("steps_per_window", p.steps_per_window);
        s.num("cfl", p.cfl);
        s.boolean("cache", c.eigen_cache);
        s.integer("collocation_nodes", c.collocation_nodes);
        s.finish();
        const bool needs_eps = command == Command::instability;
        if (needs_eps && p.eps_list.size() < 3) s.bad("eps", "needs at least three values");
        for (double e : p.eps_list)
            if (!integer_inverse(e))
                s.bad("eps", "1/eps must be a positive integer (x-periodicity of e^{ix/eps}); got " + num_str(e));
        if (!p.remainder_eps.empty() && p.remainder_eps.size() < 2)
            s.bad("remainder_eps", "needs at least two values or none");
        for (double e : p.remainder_eps)
            if (!integer_inverse(e))
                s.bad("remainder_eps",
                      "1/eps must be a positive integer (x-periodicity of e^{ix/eps}); got " + num_str(e));
        if (p.remainder_samples < 3) s.bad("remainder_samples", "must be at least 3");
        if (!(p.Z >= 8.0)) s.bad("Z", "must be at least 8");
        if (p.n_z < 1024 || p.n_z % 2) s.bad("n_z", "must be an even integer of at least 1024");
        if (p.ny < 101) s.bad("ny", "must be at least 101");
        if (!(p.y_max > 0.0)) s.bad("y_max", "must be positive");
        if (!(p.heat_dt > 0.0)) s.bad("heat_dt", "must be positive");
        if (!(p.cutoff_width > 0.0)) s.bad("cutoff_width", "must be positive");
        if (!(p.alpha >= 0.0)) s.bad("alpha", "must be nonnegative");
        if (window.size() != 2 || !(window[0] >= 0.0 && window[1] > window[0] && window[1] <= 1.0))
            s.bad("window", "must be [lo, hi] with 0 <= lo < hi <= 1");
        else
            p.window = {window[0], window[1]};
        if (p.steps_per_window < 3) s.bad("steps_per_window", "must be at least 3");
        if (!(p.cfl > 0.0 && p.cfl <= 0.5)) s.bad("cfl", "must lie in (0, 0.5]");
        if (c.collocation_nodes < 16) s.bad("collocation_nodes", "must be at least 16");
        if (p.a > 0.0 && p.cutoff_width > 0.0 && p.y_max > 0.0 && p.a + p.cutoff_width >= p.y_max)
            s.bad("y_max", "must exceed profile.a + instability.cutoff_width");
    }
    if (!errs.empty()) throw ValidationFailure(std::move(errs));
    return c;
}

}  // namespace mhdbl
