// Acceptance run: one PASS/FAIL line per criterion, exit 0 only when all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <thread>

#include "mhdbl/checks.hpp"
#include "mhdbl/instability.hpp"
#include "mhdbl/norms.hpp"
#include "mhdbl/parallel.hpp"

using namespace mhdbl;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string g(double v) { return fmt("%.4g", v); }

int failures = 0;

void criterion(int id, const char* what, const std::function<Verdict()>& body) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("threw ") + e.what()};
    }
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    if (!v.pass) ++failures;
    std::printf("criterion %2d: %s  %s | %s [%.1f s]\n", id, v.pass ? "PASS" : "FAIL", what, v.detail.c_str(), s);
    std::fflush(stdout);
}

double elapsed_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::shared_ptr<const Eigenpair> the_pair;

Field random_field(const Grid& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double c[4][3];
    for (auto& row : c)
        for (auto& v : row) v = 2.0 * std::generate_canonical<double, 53>(rng) - 1.0;
    return Field::from_function(grid, [&](double x, double y) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k)
            s += (c[k][0] * std::cos(k * x) + c[k][1] * std::sin(k * x)) * std::exp(-(1.0 + 0.3 * k) * y) *
                 (1.0 + c[k][2] * y);
        return s;
    });
}

}  // namespace

int main() {
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("MHD_BLAYER_THREADS")) threads = std::max(1, std::atoi(env));
    set_thread_count(threads);

    criterion(1, "eigenpair residual, Im tau, boundary, shooting vs collocation, <= 60 s", [] {
        const auto t0 = Clock::now();
        the_pair = std::make_shared<const Eigenpair>(solve_eigenpair(10.0, 4096));
        const double s = elapsed_since(t0);
        const auto& p = *the_pair;
        double wmax = 0.0;
        for (const auto& w : p.W) wmax = std::max(wmax, std::abs(w));
        const double gap = std::abs(p.tau - p.tau_collocation);
        const bool ok = p.residual <= 1e-8 * wmax && p.tau.imag() < 0.0 && p.boundary_defect <= 1e-6 && gap <= 1e-6 &&
                        s <= 60.0;
        return Verdict{ok, "tau=" + fmt("%.12f", p.tau.real()) + fmt("%+.12fi", p.tau.imag()) + " residual=" +
                               g(p.residual) + " boundary=" + g(p.boundary_defect) + " |dtau|=" + g(gap)};
    });
    if (!the_pair) the_pair = std::make_shared<const Eigenpair>(solve_eigenpair(10.0, 4096));

    double degenerate_slope = 0.0;
    criterion(2, "degenerate scaling slope in [0.8, 1.2], r^2 >= 0.99, <= 10 min", [&] {
        const auto t0 = Clock::now();
        const auto r = illposedness_experiment(InstabilityConfig{}, the_pair);
        const double s = elapsed_since(t0);
        degenerate_slope = r.report.scaling_slope;
        std::string sig;
        for (double v : r.report.fitted_sigma) sig += (sig.empty() ? "" : ",") + g(v);
        const bool ok = r.report.scaling_slope >= 0.8 && r.report.scaling_slope <= 1.2 && r.report.r_squared >= 0.99 &&
                        s <= 600.0;
        return Verdict{ok, "slope=" + g(r.report.scaling_slope) + " r2=" + fmt("%.6f", r.report.r_squared) +
                               " sigma=[" + sig + "] verdict=" + r.verdict};
    });

    criterion(3, "control b_s = 0.5: slope <= 0.3, max/min sigma <= 2", [&] {
        InstabilityConfig c;
        c.magnetic = MagneticProfile::Kind::uniform;
        c.B0 = 0.5;
        const auto r = illposedness_experiment(c, the_pair);
        const auto [lo, hi] = std::minmax_element(r.report.fitted_sigma.begin(), r.report.fitted_sigma.end());
        const double ratio = *lo > 0.0 ? *hi / *lo : INFINITY;
        const bool ok = r.report.scaling_slope <= 0.3 && ratio <= 2.0;
        return Verdict{ok, "slope=" + g(r.report.scaling_slope) + " sigma max/min=" + g(ratio) +
                               " contrast=" + g(degenerate_slope - r.report.scaling_slope) + " verdict=" + r.verdict};
    });

    criterion(4, "remainder exponents -0.25 +- 0.10 and -1.25 +- 0.15 over eps = 1/16..1/128", [] {
        InstabilityConfig c;
        c.B0 = 50.0;
        const auto prof = instability_profile(c, 0.55);
        std::vector<BoundCheck> cs;
        for (double e : {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}) {
            const double q = std::pow(e, 0.25);
            std::vector<double> ts;
            for (int k = 0; k < 9; ++k) ts.push_back(q * k / 8);
            cs.push_back(evaluate_remainders(build_growing_mode(the_pair, prof, e, ts, c.cutoff_width)).bound_check);
        }
        const auto p = remainder_exponents(cs);
        const bool ok = std::abs(p.p_small_t + 0.25) <= 0.10 && std::abs(p.p_t4 + 1.25) <= 0.15;
        return Verdict{ok, "p_small_t=" + g(p.p_small_t) + " p_t4=" + g(p.p_t4)};
    });

    criterion(5, "Picard contraction on the Gaussian bump (<= 4 halvings, ratio <= 0.5, >= 4 iterates), <= 5 min",
              [] {
                  const auto t0 = Clock::now();
                  Grid grid(32, 65, 6.0);
                  OutflowSpec os;
                  auto build = [&](double T) { return gaussian_bump_setup(grid, T, 0.01, 1.0, os); };
                  PicardOptions opt;
                  const auto c = find_contraction_time(build, 0.2, 4, opt);
                  const double s = elapsed_since(t0);
                  bool geometric = c.result.reports.size() >= 4;
                  for (std::size_t k = 1; k < c.result.reports.size(); ++k)
                      geometric = geometric && c.result.reports[k].l2_diff < c.result.reports[k - 1].l2_diff;
                  double qmax = 0.0;
                  for (double q : c.ratios) qmax = std::max(qmax, q);
                  const bool ok = c.found && c.halvings <= 4 && qmax <= 0.5 && geometric && s <= 300.0;
                  return Verdict{ok, "T=" + g(c.T) + " halvings=" + std::to_string(c.halvings) +
                                         " iterates=" + std::to_string(c.result.reports.size()) + " max ratio=" + g(qmax)};
              });

    criterion(6, "lower bound b + B >= delta0/2 on 10 random admissible scenarios", [] {
        Grid grid(24, 49, 6.0);
        double worst = INFINITY;
        int passed = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto s = random_admissible_setup(grid, 0.1, 0.005, seed);
            const auto r = picard_solve(s.b_init, s.v_init, s.outflow, s.forcing);
            double m = r.state.min_b_plus_B();
            for (const auto& rep : r.reports) m = std::min(m, rep.min_b_plus_B);
            const double q = m / r.state.delta0;
            worst = std::min(worst, q);
            if (r.converged && q >= 0.5) ++passed;
        }
        return Verdict{passed == 10, std::to_string(passed) + "/10 pass, min (b+B)/delta0=" + g(worst)};
    });

    criterion(7, "stream-coordinate round trip and divergence shrink >= 3.5x per doubling (5 fields)", [] {
        double e = INFINITY, d = INFINITY;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto st = transform_roundtrip(seed);
            e = std::min(e, st.min_error_ratio);
            d = std::min(d, st.min_divergence_ratio);
        }
        return Verdict{e >= 3.5 && d >= 3.5, "min error ratio=" + g(e) + " min divergence ratio=" + g(d)};
    });

    criterion(8, "heat shear erf self-similar solution, ny=512, dt=1e-3, t <= 1: error <= 1e-5", [] {
        const auto tab = solve_heat_shear([](double y) { return std::erf(y / 2); }, 1.0, 512, 10.0, 1.0, 1e-3);
        double err = 0.0;
        for (std::size_t n = 0; n < tab.t().size(); ++n) {
            const auto& u = tab.level(n, 0);
            for (std::size_t j = 0; j < u.size(); ++j)
                err = std::max(err, std::abs(u[j] - std::erf(tab.y()[j] / (2.0 * std::sqrt(1.0 + tab.t()[n])))));
        }
        return Verdict{err <= 1e-5, "max error=" + g(err)};
    });

    criterion(9, "picard vs direct march disagreement order >= 1 in h + dt (manufactured)", [] {
        std::vector<double> lh, le;
        std::string es;
        double min_order = INFINITY;
        for (int lev = 0; lev < 3; ++lev) {
            Grid grid(32 << lev, (64 << lev) + 1, 6.0);
            const double dt = 0.006 / (1 << lev);
            const auto m = manufactured_setup(grid, 0.2, dt, 1.0, 2.0);
            PicardOptions opt;
            opt.tol = 1e-10;
            const auto p = picard_solve(m.b_init, m.v_init, m.outflow, m.forcing, opt);
            const auto d = direct_march(m.b_init, m.v_init, m.outflow, m.forcing, p.state.delta0);
            const double e = sup_l2_distance(p.state, d);
            const double h = std::max(grid.dx(), grid.y(1) - grid.y(0));
            if (!le.empty()) min_order = std::min(min_order, (le.back() - std::log(e)) / (lh.back() - std::log(h + dt)));
            lh.push_back(std::log(h + dt));
            le.push_back(std::log(e));
            es += (es.empty() ? "" : ",") + g(e);
        }
        return Verdict{min_order >= 1.0, "errors=[" + es + "] min order=" + g(min_order)};
    });

    criterion(10, "Alfven energy non-increasing every step over 1000 steps", [] {
        ShearProfile p;
        p.bs = uniform_magnetic(1.0);
        p.table = solve_heat_shear([](double) { return 0.0; }, 0.0, 401, 8.0, 1.0, 1e-3);
        const auto& y = p.table.y();
        std::vector<cplx> u(y.size()), b(y.size());
        for (std::size_t j = 0; j < y.size(); ++j) {
            u[j] = std::sin(3.0 * y[j]) * std::exp(-0.3 * (y[j] - 3) * (y[j] - 3));
            b[j] = cplx(0.5, 0.2) * std::exp(-(y[j] - 4) * (y[j] - 4));
        }
        u.back() = 0.0;
        EvolveOptions eo;
        eo.store_tables = false;
        const auto r = linearized_evolve(p, 4.0, u, b, 1.0, 1e-3, eo);
        int bad = 0;
        double worst = -INFINITY;
        for (std::size_t n = 1; n < r.l2.size(); ++n) {
            const double inc = (r.l2[n] - r.l2[n - 1]) / r.l2[n - 1];
            worst = std::max(worst, inc);
            if (r.l2[n] > r.l2[n - 1]) ++bad;
        }
        return Verdict{bad == 0 && r.l2.size() == 1001, std::to_string(r.l2.size() - 1) + " steps, increases=" +
                                                            std::to_string(bad) + " max relative change=" + g(worst)};
    });

    criterion(11, "norm identity gap <= 1e-12 (m <= 4); Moser constant within 10% over 100-pair samples", [] {
        Grid grid(32, 64, 8.0, 1.0);
        double gap = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto f = random_field(grid, seed);
            for (int m = 0; m <= 4; ++m) gap = std::max(gap, norm_identity_check(f, m).gap);
        }
        Grid mg(48, 96, 8.0);
        std::vector<double> c;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) c.push_back(moser_calibration(mg, 2, 100, seed).max_ratio);
        const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
        const double mid = 0.5 * (*lo + *hi), spread = (*hi - *lo) / (2.0 * mid);
        return Verdict{gap <= 1e-12 && spread <= 0.10,
                       "max gap=" + g(gap) + " Moser constants=[" + g(c[0]) + "," + g(c[1]) + "," + g(c[2]) +
                           "] spread=+-" + fmt("%.1f%%", 100 * spread)};
    });

    std::printf("%s: %d of 11 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
