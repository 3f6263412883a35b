#include "mhdbl/instability.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "mhdbl/numerics.hpp"
#include "mhdbl/parallel.hpp"
#include "mhdbl/wellposed.hpp"

namespace mhdbl {
namespace {

const cplx I{0.0, 1.0};

bool integer_inverse(double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) return false;
    const double n = 1.0 / eps;
    return std::abs(n - std::round(n)) <= 1e-9 * n;
}

// Everything the mode and its remainders need at one time.
struct Slice {
    double a = 0, ua = 0, uyy_a = 0, K = 0, kappa = 0;
    double adot = 0, Kdot = 0, kdot = 0, ua_dot = 0;
    cplx omega, omega_dot;
    std::vector<double> us, us1, us2, us3, b, b1;
    std::vector<cplx> W, Wy, Phi, Phiy, vsl, vsl_y;
    // Time derivatives (chain rule), filled when requested.
    std::vector<cplx> Wt, Wyt, vsl_yt, d, d_t;
};

struct ModeContext {
    const Eigenpair& pair;
    const ShearProfile& prof;
    double eps, width;
};

Slice make_slice(const ModeContext& c, double t, bool derivs) {
    const auto& tab = c.prof.table;
    const auto& y = tab.y();
    const std::size_t n = y.size();
    const cplx tau = c.pair.tau;
    const double se = std::sqrt(c.eps), e = std::pow(c.eps, -0.25);
    Slice s;
    const auto cs = c.prof.curve.at(t);
    s.a = cs.a;
    s.adot = cs.da;
    s.ua = tab.eval(0, t, s.a);
    s.uyy_a = tab.eval(2, t, s.a);
    s.K = std::sqrt(std::abs(s.uyy_a) / 2.0);
    s.kappa = std::sqrt(s.K);
    const double uyy_dot = tab.eval(4, t, s.a) + tab.eval(3, t, s.a) * s.adot;
    s.Kdot = (s.uyy_a < 0 ? -1.0 : 1.0) * uyy_dot / (4.0 * s.K);
    s.kdot = s.Kdot / (2.0 * s.kappa);
    s.ua_dot = tab.eval(2, t, s.a) + tab.eval(1, t, s.a) * s.adot;
    s.omega = -s.ua + se * s.K * tau;
    s.omega_dot = -s.ua_dot + se * s.Kdot * tau;
    s.us = tab.column(0, t);
    s.us1 = tab.column(1, t);
    if (derivs) {
        s.us2 = tab.column(2, t);
        s.us3 = tab.column(3, t);
    }
    s.b.resize(n);
    s.b1.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto bt = c.prof.bs.eval(y[j]);
        s.b[j] = bt[0];
        s.b1[j] = bt[1];
    }
    s.W.resize(n);
    s.Wy.resize(n);
    s.Phi.resize(n);
    s.Phiy.resize(n);
    s.vsl.resize(n);
    s.vsl_y.resize(n);
    s.d.resize(n);
    if (derivs) {
        s.Wt.resize(n);
        s.Wyt.resize(n);
        s.vsl_yt.resize(n);
        s.d_t.resize(n);
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double xi = y[j] - s.a;
        const double H = xi >= 0.0 ? 1.0 : 0.0;
        const double z = s.kappa * xi * e;
        const double p0 = mode_cutoff(xi, c.width, 0), p1 = mode_cutoff(xi, c.width, 1);
        const Jet3 V = (p0 != 0.0 || p1 != 0.0) ? c.pair.profile(z) : Jet3{};
        const cplx d = s.us[j] - s.ua + se * s.K * tau;
        s.d[j] = d;
        s.vsl[j] = se * s.K * p0 * V[0];
        s.vsl_y[j] = se * s.K * (p1 * V[0] + p0 * s.kappa * e * V[1]);
        s.W[j] = H * d + s.vsl[j];
        s.Wy[j] = H * s.us1[j] + s.vsl_y[j];
        s.Phi[j] = s.b[j] * s.W[j] / d;
        s.Phiy[j] = s.b1[j] * s.W[j] / d + s.b[j] * (s.Wy[j] / d - s.us1[j] * s.W[j] / (d * d));
        if (derivs) {
            const double p2 = mode_cutoff(xi, c.width, 2);
            const double zt = e * (s.kdot * xi - s.kappa * s.adot);
            const cplx vsl_t = se * s.Kdot * p0 * V[0] + se * s.K * (-s.adot * p1 * V[0] + p0 * V[1] * zt);
            s.vsl_yt[j] = se * s.Kdot * (p1 * V[0] + p0 * s.kappa * e * V[1]) +
                          se * s.K *
                              (-s.adot * p2 * V[0] + p1 * V[1] * zt - s.adot * p1 * s.kappa * e * V[1] +
                               p0 * s.kdot * e * V[1] + p0 * s.kappa * e * V[2] * zt);
            s.d_t[j] = s.us2[j] - s.ua_dot + se * s.Kdot * tau;
            s.Wt[j] = H * s.d_t[j] + vsl_t;
            s.Wyt[j] = H * s.us3[j] + s.vsl_yt[j];
        }
    }
    return s;
}

void check_slice(const ModeContext& c, const Slice& s, double t) {
    const auto& y = c.prof.table.y();
    const double h = y[1] - y[0];
    const double layer = std::pow(c.eps, 0.25) / s.kappa;
    if (layer / h < 16.0) {
        std::ostringstream os;
        os << "layer width " << layer << " spans " << layer / h << " nodes at t=" << t << " (need 16)";
        throw Error(ErrorKind::LayerUnderResolved, os.str());
    }
    if (s.a - c.width <= 0.0 || s.a + c.width >= y.back()) {
        std::ostringstream os;
        os << "cutoff support [" << s.a - c.width << ", " << s.a + c.width << "] leaves (0, y_max) at t=" << t;
        throw Error(ErrorKind::BadParameters, os.str());
    }
    const double bound = std::sqrt(c.eps) * std::abs(c.pair.tau.imag()) * s.K;
    for (std::size_t j = 0; j < s.d.size(); ++j)
        if (!(std::abs(s.d[j]) >= 0.5 * bound))
            throw LocatedError(ErrorKind::DegenerateDenominator, "omega + u_s too small", t, 0.0, y[j]);
}

// Cumulative ∫₀ᵗ f over the critical-curve samples, evaluated at tq.
struct TimeIntegral {
    std::vector<double> t;
    std::vector<cplx> F;
    cplx operator()(double tq) const { return num::interp_cubic<cplx>(t, F, tq, 0); }
};

TimeIntegral integrate_samples(const std::vector<double>& t, const std::vector<cplx>& f) {
    const auto q = num::interval_quadrature(t);
    return {t, num::cumulative_integral(q, f.data(), f.size())};
}

}  // namespace

double mode_cutoff(double s, double width, int deriv) {
    const double r = 2.0 * std::abs(s) / width;
    if (deriv == 0) return 1.0 - cutoff(r, 0);
    const double sg = s < 0 ? -1.0 : 1.0;
    if (deriv == 1) return -cutoff(r, 1) * 2.0 * sg / width;
    return -cutoff(r, 2) * 4.0 / (width * width);
}

double GrowingMode::norm(std::size_t n, double alpha) const {
    double best = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j)
        best = std::max(best, std::exp(alpha * y[j]) * std::sqrt(std::norm(U[n][j]) + std::norm(B1[n][j])));
    return best;
}

GrowingMode build_growing_mode(std::shared_ptr<const Eigenpair> pair, std::shared_ptr<const ShearProfile> profile,
                               double epsilon, const std::vector<double>& t_grid, double cutoff_width,
                               double amplitude) {
    if (!pair || !profile) throw Error(ErrorKind::BadParameters, "mode needs an eigenpair and a profile");
    if (!integer_inverse(epsilon)) throw Error(ErrorKind::BadParameters, "1/epsilon must be a positive integer");
    if (!(cutoff_width > 0.0)) throw Error(ErrorKind::BadParameters, "cutoff width must be positive");
    if (t_grid.empty()) throw Error(ErrorKind::BadParameters, "empty time grid");
    const auto& curve = profile->curve;
    for (double t : t_grid)
        if (!(t >= 0.0 && t <= curve.t.back() + 1e-12))
            throw Error(ErrorKind::BadParameters, "time outside the critical-curve range");
    ModeContext ctx{*pair, *profile, epsilon, cutoff_width};
    GrowingMode m;
    m.epsilon = epsilon;
    m.cutoff_width = cutoff_width;
    m.amplitude = amplitude;
    m.t_grid = t_grid;
    m.y = profile->table.y();
    m.pair = pair;
    m.profile = profile;

    // ∫ω and ∫σ₀ on the curve samples.
    const std::size_t nc = curve.t.size();
    std::vector<cplx> om(nc), sg(nc);
    const double se = std::sqrt(epsilon);
    for (std::size_t k = 0; k < nc; ++k) {
        const double t = curve.t[k], a = curve.a[k];
        const double K = std::sqrt(std::abs(profile->table.eval(2, t, a)) / 2.0);
        om[k] = -profile->table.eval(0, t, a) + se * K * pair->tau;
        sg[k] = -pair->tau.imag() * K;
    }
    const auto Om = integrate_samples(curve.t, om), Sg = integrate_samples(curve.t, sg);

    for (double t : t_grid) {
        const auto s = make_slice(ctx, t, false);
        check_slice(ctx, s, t);
        const cplx P = std::exp(I * Om(t) / epsilon);
        m.phase.push_back(P);
        m.growth_exponent.push_back(Sg(t).real() / se);
        m.omega.push_back(s.omega);
        m.a.push_back(s.a);
        m.sigma0.push_back(-pair->tau.imag() * s.K);
        const std::size_t n = m.y.size();
        std::vector<cplx> U(n), V(n), B1(n), B2(n), W(n), Phi(n);
        for (std::size_t j = 0; j < n; ++j) {
            W[j] = amplitude * s.W[j];
            Phi[j] = amplitude * s.Phi[j];
            U[j] = I * P * amplitude * s.Wy[j];
            V[j] = P * W[j] / epsilon;
            B1[j] = I * P * amplitude * s.Phiy[j];
            B2[j] = P * Phi[j] / epsilon;
        }
        m.U.push_back(std::move(U));
        m.V.push_back(std::move(V));
        m.B1.push_back(std::move(B1));
        m.B2.push_back(std::move(B2));
        m.W.push_back(std::move(W));
        m.Phi.push_back(std::move(Phi));
    }
    return m;
}

Remainders evaluate_remainders(const GrowingMode& mode, const RemainderOptions& opt) {
    if (!mode.pair || !mode.profile) throw Error(ErrorKind::BadParameters, "mode without eigenpair or profile");
    ModeContext ctx{*mode.pair, *mode.profile, mode.epsilon, mode.cutoff_width};
    const double ie = 1.0 / mode.epsilon;
    const auto& y = mode.y;
    const std::size_t n = y.size();
    const double t_end = mode.profile->curve.t.back();
    Remainders out;
    auto& bc = out.bound_check;
    bc.epsilon = mode.epsilon;
    for (std::size_t k = 0; k < mode.t_grid.size(); ++k) {
        const double t = mode.t_grid[k];
        auto s = make_slice(ctx, t, true);
        check_slice(ctx, s, t);
        if (opt.fd_time) {
            const double dl = opt.dt_fd;
            std::vector<cplx> fv(n), fp(n);
            if (t < dl || t + dl > t_end) {
                const double sgn = t < dl ? 1.0 : -1.0;
                const auto s1 = make_slice(ctx, t + sgn * dl, false), s2 = make_slice(ctx, t + 2 * sgn * dl, false);
                for (std::size_t j = 0; j < n; ++j) {
                    fv[j] = sgn * (-3.0 * s.vsl_y[j] + 4.0 * s1.vsl_y[j] - s2.vsl_y[j]) / (2.0 * dl);
                    fp[j] = sgn * (-3.0 * s.Phiy[j] + 4.0 * s1.Phiy[j] - s2.Phiy[j]) / (2.0 * dl);
                }
            } else {
                const auto sp = make_slice(ctx, t + dl, false), sm = make_slice(ctx, t - dl, false);
                for (std::size_t j = 0; j < n; ++j) {
                    fv[j] = (sp.vsl_y[j] - sm.vsl_y[j]) / (2.0 * dl);
                    fp[j] = (sp.Phiy[j] - sm.Phiy[j]) / (2.0 * dl);
                }
            }
            s.vsl_yt = fv;
            s.Wyt = fp;  // holds ∂t∂yΦ in this branch
        }
        std::vector<cplx> r1(n), r2(n);
        double sup = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double xi = y[j] - s.a;
            const cplx d = s.d[j];
            const double D2 = s.us[j] - s.ua - 0.5 * s.uyy_a * xi * xi;
            const double D1 = s.us1[j] - s.uyy_a * xi;
            const cplx bracket = s.vsl_y[j] / d - s.us1[j] * s.vsl[j] / (d * d);
            cplx R1 = -ie * D2 * s.vsl_y[j] + ie * D1 * s.vsl[j] + ie * s.b[j] * s.b[j] * bracket + I * s.vsl_yt[j];
            cplx Gt;
            if (opt.fd_time) {
                Gt = s.Wyt[j];
            } else {
                const cplx W = s.W[j], Wy = s.Wy[j], Wt = s.Wt[j], Wyt = s.Wyt[j], dt = s.d_t[j];
                const double u1 = s.us1[j], u3 = s.us3[j];
                Gt = s.b1[j] * (Wt / d - W * dt / (d * d)) +
                     s.b[j] * (Wyt / d - Wy * dt / (d * d) - u3 * W / (d * d) - u1 * Wt / (d * d) +
                               2.0 * u1 * W * dt / (d * d * d));
            }
            cplx R2 = I * Gt;
            R1 *= mode.amplitude;
            R2 *= mode.amplitude;
            sup = std::max(sup, std::exp(opt.alpha * y[j]) * std::sqrt(std::norm(R1) + std::norm(R2)));
            r1[j] = R1;
            r2[j] = R2;
        }
        // Phase applied to the stored tables; the bound check uses the bare braces.
        const cplx P = k < mode.phase.size() ? mode.phase[k] : cplx(1.0);
        for (std::size_t j = 0; j < n; ++j) {
            r1[j] *= P;
            r2[j] *= P;
        }
        out.R1.push_back(std::move(r1));
        out.R2.push_back(std::move(r2));
        bc.t.push_back(t);
        bc.norm.push_back(sup);
    }
    bc.c0 = bc.norm.empty() ? 0.0 : bc.norm.front();
    double num = 0.0, den = 0.0;
    for (std::size_t k = 1; k < bc.t.size(); ++k) {
        const double t4 = std::pow(bc.t[k] - bc.t.front(), 4);
        num += (bc.norm[k] - bc.c0) * t4;
        den += t4 * t4;
    }
    bc.c4 = den > 0.0 ? num / den : 0.0;
    for (std::size_t k = 0; k < bc.t.size(); ++k) {
        const double env = std::pow(mode.epsilon, -0.25) + std::pow(mode.epsilon, -1.25) * std::pow(bc.t[k], 4);
        bc.C = std::max(bc.C, bc.norm[k] / env);
    }
    return out;
}

RemainderExponents remainder_exponents(const std::vector<BoundCheck>& checks) {
    if (checks.size() < 2) throw Error(ErrorKind::InsufficientData, "remainder exponents need at least two epsilon values");
    std::vector<double> le, l0, l4;
    for (const auto& c : checks) {
        if (!(c.c0 > 0.0) || c.c4 == 0.0)
            throw Error(ErrorKind::InsufficientData, "remainder fit needs positive norms and a nonzero t^4 coefficient");
        le.push_back(std::log(c.epsilon));
        l0.push_back(std::log(c.c0));
        l4.push_back(std::log(std::abs(c.c4)));
    }
    return {num::linear_fit(le, l0).slope, num::linear_fit(le, l4).slope};
}

GrowthReport growth_rate_fit(const std::vector<NormSeries>& series, const FitWindow& window) {
    if (series.size() < 3) throw Error(ErrorKind::InsufficientData, "growth fit needs at least three epsilon values");
    GrowthReport r;
    r.remainder_exponents = {std::nan(""), std::nan("")};
    bool positive = true;
    for (const auto& s : series) {
        const double q = std::pow(s.epsilon, 0.25);
        const double lo = window.lo * q * (1.0 - 1e-12), hi = window.hi * q * (1.0 + 1e-12);
        std::vector<double> tt, ln;
        for (std::size_t k = 0; k < s.t.size(); ++k)
            if (s.t[k] >= lo && s.t[k] <= hi && s.norm[k] > 0.0) {
                tt.push_back(s.t[k]);
                ln.push_back(std::log(s.norm[k]));
            }
        if (tt.size() < 3) {
            std::ostringstream os;
            os << "fewer than three samples in the fit window for eps=" << s.epsilon;
            throw Error(ErrorKind::InsufficientData, os.str());
        }
        const double sigma = num::linear_fit(tt, ln).slope;
        r.eps_list.push_back(s.epsilon);
        r.fitted_sigma.push_back(sigma);
        positive = positive && sigma > 0.0;
    }
    if (positive) {
        std::vector<double> x, yv;
        for (std::size_t k = 0; k < r.eps_list.size(); ++k) {
            x.push_back(std::log(1.0 / std::sqrt(r.eps_list[k])));
            yv.push_back(std::log(r.fitted_sigma[k]));
        }
        const auto f = num::linear_fit(x, yv);
        r.scaling_slope = f.slope;
        r.r_squared = std::clamp(f.r_squared, 0.0, 1.0);
    }
    return r;
}

std::string growth_verdict(double slope) {
    if (slope >= 0.8) return "unstable";
    if (slope <= 0.3) return "stable";
    return "inconclusive";
}

std::shared_ptr<const ShearProfile> instability_profile(const InstabilityConfig& cfg, double t_max) {
    auto p = std::make_shared<ShearProfile>();
    p->Us = build_jet_profile(cfg.U0, cfg.a, cfg.curvature, cfg.jet_width);
    switch (cfg.magnetic) {
        case MagneticProfile::Kind::degenerate: p->bs = degenerate_magnetic(cfg.B0, cfg.a, cfg.b_width); break;
        case MagneticProfile::Kind::nondegenerate: p->bs = nondegenerate_magnetic(cfg.B0, cfg.delta0); break;
        case MagneticProfile::Kind::uniform: p->bs = uniform_magnetic(cfg.B0); break;
    }
    const VelocityProfile Us = p->Us;
    p->table = solve_heat_shear([Us](double y) { return Us(y); }, cfg.U0, cfg.ny, cfg.y_max, t_max, cfg.heat_dt);
    p->curve = critical_curve(p->table, cfg.a, t_max);
    p->a0 = p->curve.a.front();
    return p;
}

IllposednessResult illposedness_experiment(const InstabilityConfig& cfg, std::shared_ptr<const Eigenpair> pair) {
    if (cfg.eps_list.size() < 3) throw Error(ErrorKind::InsufficientData, "need at least three epsilon values");
    for (double e : cfg.eps_list)
        if (!integer_inverse(e)) throw Error(ErrorKind::BadParameters, "1/epsilon must be a positive integer");
    for (double e : cfg.remainder_eps)
        if (!integer_inverse(e)) throw Error(ErrorKind::BadParameters, "1/epsilon must be a positive integer");
    if (!cfg.remainder_eps.empty() && cfg.remainder_eps.size() < 2)
        throw Error(ErrorKind::InsufficientData, "remainder sweep needs at least two epsilon values");
    if (!(cfg.window.lo >= 0.0 && cfg.window.hi > cfg.window.lo)) throw Error(ErrorKind::BadParameters, "bad fit window");

    IllposednessResult res;
    res.pair = pair ? pair : std::make_shared<const Eigenpair>(solve_eigenpair(cfg.Z, cfg.n_z));
    double t_max = 0.0;
    for (double e : cfg.eps_list) t_max = std::max(t_max, cfg.window.hi * std::pow(e, 0.25));
    for (double e : cfg.remainder_eps) t_max = std::max(t_max, std::pow(e, 0.25));
    t_max += 4.0 * cfg.heat_dt;
    const auto profile = instability_profile(cfg, t_max);

    double us_max = std::abs(profile->table.U0());
    for (double v : profile->table.level(0, 0)) us_max = std::max(us_max, std::abs(v));

    const int ne = static_cast<int>(cfg.eps_list.size());
    res.runs.resize(ne);
    std::vector<std::exception_ptr> errs(ne);
    parallel_for(0, ne, [&](int i) {
        try {
            const double eps = cfg.eps_list[i], k = 1.0 / eps;
            const double T = cfg.window.hi * std::pow(eps, 0.25);
            const double dt_cfl = cfg.cfl / (k * us_max) * (1.0 - 1e-9);
            const double dt0 = std::min(T / cfg.steps_per_window, dt_cfl);
            const int steps = static_cast<int>(std::ceil(T / dt0 - 1e-9));
            const double dt = T / steps;
            const auto m0 = build_growing_mode(res.pair, profile, eps, {0.0}, cfg.cutoff_width);
            EvolveOptions eo;
            eo.frame_speed = profile->curve.u_at_a.front();
            eo.alpha = cfg.alpha;
            eo.cfl = cfg.cfl;
            eo.store_tables = false;
            const auto ev = linearized_evolve(*profile, k, m0.U[0], m0.B1[0], T, dt, eo);
            EpsilonRun run;
            run.epsilon = eps;
            run.dt = dt;
            run.evolved = {eps, ev.t, ev.norm};
            const auto mt = build_growing_mode(res.pair, profile, eps, ev.t, cfg.cutoff_width);
            double ssum = 0.0;
            int cnt = 0;
            const double q = std::pow(eps, 0.25);
            for (std::size_t n = 0; n < ev.t.size(); ++n) {
                run.mode_norm.push_back(mt.norm(n, cfg.alpha));
                if (ev.t[n] >= cfg.window.lo * q * (1 - 1e-12) && ev.t[n] <= cfg.window.hi * q * (1 + 1e-12)) {
                    ssum += mt.sigma0[n] / std::sqrt(eps);
                    ++cnt;
                }
            }
            run.sigma0_mean = cnt ? ssum / cnt : 0.0;
            res.runs[i] = std::move(run);
        } catch (...) {
            errs[i] = std::current_exception();
        }
    });
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);

    std::vector<NormSeries> series;
    for (const auto& r : res.runs) series.push_back(r.evolved);
    res.report = growth_rate_fit(series, cfg.window);
    res.verdict = growth_verdict(res.report.scaling_slope);

    if (!cfg.remainder_eps.empty()) {
        const int nr = static_cast<int>(cfg.remainder_eps.size());
        res.remainder_checks.resize(nr);
        std::vector<std::exception_ptr> rerrs(nr);
        parallel_for(0, nr, [&](int i) {
            try {
                const double eps = cfg.remainder_eps[i];
                const double q = std::pow(eps, 0.25);
                std::vector<double> ts;
                const int ns = std::max(3, cfg.remainder_samples);
                for (int s = 0; s < ns; ++s) ts.push_back(q * s / (ns - 1));
                const auto m = build_growing_mode(res.pair, profile, eps, ts, cfg.cutoff_width);
                RemainderOptions ro;
                ro.alpha = cfg.alpha;
                res.remainder_checks[i] = evaluate_remainders(m, ro).bound_check;
            } catch (...) {
                rerrs[i] = std::current_exception();
            }
        });
        for (auto& e : rerrs)
            if (e) std::rethrow_exception(e);
        const auto ex = remainder_exponents(res.remainder_checks);
        res.report.remainder_exponents = {ex.p_small_t, ex.p_t4};
    }
    return res;
}

}  // namespace mhdbl
