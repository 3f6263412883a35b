#include "mhdbl/shear.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mhdbl/error.hpp"
#include "mhdbl/numerics.hpp"

namespace mhdbl {
namespace {

// d^n/dy^n e^{−((y−c)/w)²} for n = 0..6.
std::array<double, 7> gaussian_derivs(double y, double c, double w) {
    const double s = (y - c) / w;
    const double G = std::exp(-s * s);
    std::array<double, 7> H{};
    H[0] = 1.0;
    H[1] = 2.0 * s;
    for (int n = 1; n + 1 < 7; ++n) H[n + 1] = 2.0 * s * H[n] - 2.0 * n * H[n - 1];
    std::array<double, 7> out{};
    double sign = 1.0, wp = 1.0;
    for (int n = 0; n < 7; ++n) {
        out[n] = sign * H[n] * G / wp;
        sign = -sign;
        wp *= w;
    }
    return out;
}

// (y/a)² e^{−((y−c)/w)²} and derivatives 0..4.
Taylor4 weighted_gaussian(double y, double a, double c, double w) {
    const auto G = gaussian_derivs(y, c, w);
    const double p0 = y * y / (a * a), p1 = 2.0 * y / (a * a), p2 = 2.0 / (a * a);
    Taylor4 out{};
    for (int n = 0; n <= 4; ++n) {
        double v = p0 * G[n];
        if (n >= 1) v += n * p1 * G[n - 1];
        if (n >= 2) v += 0.5 * n * (n - 1) * p2 * G[n - 2];
        out[n] = v;
    }
    return out;
}

Taylor4 exp_part(double U0, double y) {
    const double e = std::exp(-y);
    Taylor4 out{};
    out[0] = U0 * (1.0 - e);
    double sign = 1.0;
    for (int n = 1; n <= 4; ++n) {
        out[n] = sign * U0 * e;
        sign = -sign;
    }
    return out;
}

// Newton on two unknowns with a finite-difference Jacobian of analytic residuals.
template <class Residual>
bool newton2(Residual F, double& p, double& q, int max_iter = 50) {
    for (int it = 0; it < max_iter; ++it) {
        const auto r = F(p, q);
        if (!std::isfinite(r[0]) || !std::isfinite(r[1])) return false;
        const double hp = 1e-7 * std::max(1.0, std::abs(p)), hq = 1e-7 * std::max(1.0, std::abs(q));
        const auto rp1 = F(p + hp, q), rp0 = F(p - hp, q);
        const auto rq1 = F(p, q + hq), rq0 = F(p, q - hq);
        const double j00 = (rp1[0] - rp0[0]) / (2 * hp), j10 = (rp1[1] - rp0[1]) / (2 * hp);
        const double j01 = (rq1[0] - rq0[0]) / (2 * hq), j11 = (rq1[1] - rq0[1]) / (2 * hq);
        const double det = j00 * j11 - j01 * j10;
        if (det == 0.0 || !std::isfinite(det)) return false;
        const double dp = -(j11 * r[0] - j01 * r[1]) / det;
        const double dq = -(-j10 * r[0] + j00 * r[1]) / det;
        p += dp;
        q += dq;
        if (std::abs(dp) <= 1e-14 * std::max(1.0, std::abs(p)) && std::abs(dq) <= 1e-14 * std::max(1.0, std::abs(q)))
            return true;
    }
    const auto r = F(p, q);
    return std::abs(r[0]) <= 1e-10 && std::abs(r[1]) <= 1e-10;
}

void check_curvature_request(double a, double curvature) {
    if (!(a >= 1.0)) throw Error(ErrorKind::ProfileConstructionFailed, "critical point a must be >= 1");
    if (!(curvature < 0.0) || std::abs(curvature) < 1e-3)
        throw Error(ErrorKind::ProfileConstructionFailed, "curvature must be negative with |curvature| >= 1e-3");
}

void verify(const VelocityProfile& p) {
    const auto d = p.eval(p.a);
    if (!(std::abs(d[1]) <= 1e-10) || !(std::abs(d[2] - p.curvature) <= 1e-8))
        throw Error(ErrorKind::ProfileConstructionFailed,
                    "profile constraints not met (U'(a)=" + std::to_string(d[1]) + ", U''(a)=" + std::to_string(d[2]) + ")");
}

}  // namespace

Taylor4 VelocityProfile::eval(double y) const {
    if (family == Family::erf) {
        Taylor4 out{};
        out[0] = U0 * std::erf(0.5 * y);
        // d/dy erf(y/2) = e^{−y²/4}/√π; higher orders via Hermite polynomials in y/2.
        const auto G = gaussian_derivs(y, 0.0, 2.0);
        const double k = U0 / std::sqrt(M_PI);
        for (int n = 1; n <= 4; ++n) out[n] = k * G[n - 1];
        return out;
    }
    auto out = exp_part(U0, y);
    const double center = family == Family::bump ? a : c;
    const auto g = weighted_gaussian(y, a, center, w);
    for (int n = 0; n <= 4; ++n) out[n] += A * g[n];
    return out;
}

VelocityProfile build_velocity_profile(double U0, double a, double curvature) {
    check_curvature_request(a, curvature);
    VelocityProfile p;
    p.family = VelocityProfile::Family::bump;
    p.U0 = U0;
    p.a = a;
    p.curvature = curvature;
    p.c = a;
    // The bump is centred at a, so U''(a) > −U0 e^{−a}(1 + 1/a) for every width.
    const double bound = -U0 * std::exp(-a) * (1.0 + 1.0 / a);
    if (curvature < bound + 1e-12)
        throw Error(ErrorKind::ProfileConstructionFailed,
                    "curvature " + std::to_string(curvature) + " not reachable by the bump family (needs > " +
                        std::to_string(bound) + ")");
    double A = -U0 * a * std::exp(-a) / 2.0 * 1.05, logw = std::log(a);
    auto F = [&](double AA, double lw) {
        VelocityProfile q = p;
        q.A = AA;
        q.w = std::exp(lw);
        const auto d = q.eval(a);
        return std::array<double, 2>{d[1], d[2] - curvature};
    };
    if (!newton2(F, A, logw)) throw Error(ErrorKind::ProfileConstructionFailed, "Newton did not converge");
    p.A = A;
    p.w = std::exp(logw);
    verify(p);
    return p;
}

VelocityProfile build_jet_profile(double U0, double a, double curvature, double w) {
    check_curvature_request(a, curvature);
    if (!(w > 0.0)) throw Error(ErrorKind::ProfileConstructionFailed, "jet width must be positive");
    VelocityProfile p;
    p.family = VelocityProfile::Family::jet;
    p.U0 = U0;
    p.a = a;
    p.curvature = curvature;
    p.w = w;
    double A = -curvature * w * w / 2.0, c = a - w * w / a;
    auto F = [&](double AA, double cc) {
        VelocityProfile q = p;
        q.A = AA;
        q.c = cc;
        const auto d = q.eval(a);
        return std::array<double, 2>{d[1], d[2] - curvature};
    };
    if (!newton2(F, A, c)) throw Error(ErrorKind::ProfileConstructionFailed, "Newton did not converge");
    p.A = A;
    p.c = c;
    verify(p);
    return p;
}

VelocityProfile erf_profile(double U0) {
    VelocityProfile p;
    p.family = VelocityProfile::Family::erf;
    p.U0 = U0;
    return p;
}

Taylor4 MagneticProfile::eval(double y) const {
    Taylor4 out{};
    switch (kind) {
        case Kind::uniform: out[0] = B0; break;
        case Kind::nondegenerate: {
            const double e = (B0 - delta0) * std::exp(-y);
            out[0] = B0 - e;
            double sign = 1.0;
            for (int n = 1; n <= 4; ++n) {
                out[n] = sign * e;
                sign = -sign;
            }
            break;
        }
        case Kind::degenerate: {
            const auto G = gaussian_derivs(y, a, w);
            out[0] = B0 * (1.0 - G[0]);
            for (int n = 1; n <= 4; ++n) out[n] = -B0 * G[n];
            break;
        }
    }
    return out;
}

MagneticProfile uniform_magnetic(double B0) {
    if (!(B0 > 0.0)) throw Error(ErrorKind::BadParameters, "B0 must be positive");
    MagneticProfile m;
    m.kind = MagneticProfile::Kind::uniform;
    m.B0 = B0;
    m.delta0 = B0;
    return m;
}

MagneticProfile nondegenerate_magnetic(double B0, double delta0) {
    if (!(B0 > 0.0)) throw Error(ErrorKind::BadParameters, "B0 must be positive");
    if (!(delta0 > 0.0) || delta0 >= B0) throw Error(ErrorKind::BadParameters, "need 0 < delta0 < B0");
    MagneticProfile m;
    m.kind = MagneticProfile::Kind::nondegenerate;
    m.B0 = B0;
    m.delta0 = delta0;
    return m;
}

MagneticProfile degenerate_magnetic(double B0, double a, double w) {
    if (!(B0 > 0.0) || !(w > 0.0)) throw Error(ErrorKind::BadParameters, "need B0 > 0 and w > 0");
    MagneticProfile m;
    m.kind = MagneticProfile::Kind::degenerate;
    m.B0 = B0;
    m.a = a;
    m.w = w;
    return m;
}

// ---------------------------------------------------------------------------

ShearTable::ShearTable(std::vector<double> t, std::vector<double> y,
                       std::vector<std::array<std::vector<double>, 5>> levels, double U0)
    : t_(std::move(t)), y_(std::move(y)), lv_(std::move(levels)), U0_(U0) {}

namespace {

// Lagrange weights (value and first derivative) on four nodes starting at s.
void weights4(const std::vector<double>& x, std::size_t s, double z, double w[4], double dw[4]) {
    auto c = num::fd_weights(z, std::span<const double>(x).subspan(s, 4), 1);
    for (int k = 0; k < 4; ++k) {
        w[k] = c[0][k];
        dw[k] = c[1][k];
    }
}

std::size_t start4(const std::vector<double>& x, double z) {
    const std::size_t i = num::locate(x, z);
    return i == 0 ? 0 : std::min(i - 1, x.size() - 4);
}

}  // namespace

double ShearTable::eval(int k, double t, double y) const {
    double wt[4], dwt[4], wy[4], dwy[4];
    const std::size_t st = start4(t_, t), sy = start4(y_, y);
    weights4(t_, st, t, wt, dwt);
    weights4(y_, sy, y, wy, dwy);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        const auto& col = lv_[st + a][k];
        double v = 0.0;
        for (int b = 0; b < 4; ++b) v += wy[b] * col[sy + b];
        acc += wt[a] * v;
    }
    return acc;
}

double ShearTable::eval_t(int k, double t, double y) const {
    double wt[4], dwt[4], wy[4], dwy[4];
    const std::size_t st = start4(t_, t), sy = start4(y_, y);
    weights4(t_, st, t, wt, dwt);
    weights4(y_, sy, y, wy, dwy);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        const auto& col = lv_[st + a][k];
        double v = 0.0;
        for (int b = 0; b < 4; ++b) v += wy[b] * col[sy + b];
        acc += dwt[a] * v;
    }
    return acc;
}

double ShearTable::eval_y(int k, double t, double y) const {
    double wt[4], dwt[4], wy[4], dwy[4];
    const std::size_t st = start4(t_, t), sy = start4(y_, y);
    weights4(t_, st, t, wt, dwt);
    weights4(y_, sy, y, wy, dwy);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        const auto& col = lv_[st + a][k];
        double v = 0.0;
        for (int b = 0; b < 4; ++b) v += dwy[b] * col[sy + b];
        acc += wt[a] * v;
    }
    return acc;
}

std::vector<double> ShearTable::column(int k, double t) const {
    double wt[4], dwt[4];
    const std::size_t st = start4(t_, t);
    weights4(t_, st, t, wt, dwt);
    std::vector<double> out(y_.size(), 0.0);
    for (int a = 0; a < 4; ++a) {
        const auto& col = lv_[st + a][k];
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += wt[a] * col[j];
    }
    return out;
}

ShearTable solve_heat_shear(const std::function<double(double)>& Us, double U0, int ny, double y_max,
                            double t_max, double dt, int rannacher_steps) {
    if (ny < 6 || !(y_max > 0.0) || !(t_max > 0.0) || !(dt > 0.0))
        throw Error(ErrorKind::BadParameters, "heat solve needs ny >= 6 and positive y_max, t_max, dt");
    const auto y = num::linspace(0.0, y_max, ny);
    std::vector<double> u(ny);
    for (int j = 0; j < ny; ++j) u[j] = Us(y[j]);
    if (std::abs(u[0]) > 1e-12)
        throw Error(ErrorKind::IncompatibleData, "initial shear must vanish at the wall");
    if (std::abs(u[ny - 1] - U0) > 1e-6 * std::max(1.0, std::abs(U0)))
        throw Error(ErrorKind::IncompatibleData, "initial shear does not reach U0 at y_max");
    u[0] = 0.0;
    u[ny - 1] = U0;
    int nt = std::max(3, static_cast<int>(std::ceil(t_max / dt - 1e-9)));
    const double k = t_max / nt;
    const double h = y[1] - y[0];
    const auto st1 = num::derivative_stencils(y, 1);
    const auto st2 = num::derivative_stencils(y, 2);
    auto tabulate = [&](const std::vector<double>& v) {
        std::array<std::vector<double>, 5> lv;
        for (auto& a : lv) a.assign(ny, 0.0);
        lv[0] = v;
        num::apply_stencils(st1, v.data(), lv[1].data());
        num::apply_stencils(st2, v.data(), lv[2].data());
        num::apply_stencils(st1, lv[2].data(), lv[3].data());
        num::apply_stencils(st2, lv[2].data(), lv[4].data());
        return lv;
    };
    std::vector<double> ts{0.0};
    std::vector<std::array<std::vector<double>, 5>> levels{tabulate(u)};
    const int n_int = ny - 2;
    std::vector<double> rhs(n_int), cp(n_int), dp(n_int);
    // θ-step of size s: (I − θ s L) u⁺ = (I + (1−θ) s L) u.
    auto step = [&](double s, double theta) {
        const double r = s / (h * h);
        for (int m = 0; m < n_int; ++m) {
            const int j = m + 1;
            rhs[m] = u[j] + (1.0 - theta) * r * (u[j + 1] - 2.0 * u[j] + u[j - 1]);
        }
        rhs[n_int - 1] += theta * r * U0;
        const double lo = -theta * r, di = 1.0 + 2.0 * theta * r;
        cp[0] = lo / di;
        dp[0] = rhs[0] / di;
        for (int m = 1; m < n_int; ++m) {
            const double den = di - lo * cp[m - 1];
            cp[m] = lo / den;
            dp[m] = (rhs[m] - lo * dp[m - 1]) / den;
        }
        u[n_int] = dp[n_int - 1];
        for (int m = n_int - 2; m >= 0; --m) u[m + 1] = dp[m] - cp[m] * u[m + 2];
    };
    const int be_full = (rannacher_steps + 1) / 2;
    for (int n = 1; n <= nt; ++n) {
        if (n <= be_full) {
            step(0.5 * k, 1.0);
            step(0.5 * k, 1.0);
        } else {
            step(k, 0.5);
        }
        ts.push_back(n == nt ? t_max : n * k);
        levels.push_back(tabulate(u));
    }
    return ShearTable(std::move(ts), y, std::move(levels), U0);
}

CriticalCurve::Sample CriticalCurve::at(double tq) const {
    auto interp = [&](const std::vector<double>& f) {
        return num::interp_cubic<double>(t, f, tq, 0);
    };
    return {interp(a), interp(u_at_a), interp(uyy_at_a), interp(da_dt)};
}

CriticalCurve critical_curve(const ShearTable& us, double a0, double t_max) {
    if (t_max > us.t_max() + 1e-12) throw Error(ErrorKind::BadParameters, "critical curve beyond the tabulated time");
    const auto& y = us.y();
    const double h = y[1] - y[0];
    // Locate the tabulated root of ∂y u_s(0, ·) near a0.
    double lo = std::max(a0 - 0.5, y[2]), hi = std::min(a0 + 0.5, y[y.size() - 3]);
    const int nscan = 200;
    double best = a0, best_dist = 1e300;
    bool found = false;
    double prev_y = lo, prev_f = us.eval(1, 0.0, lo);
    for (int s = 1; s <= nscan; ++s) {
        const double yy = lo + (hi - lo) * s / nscan;
        const double f = us.eval(1, 0.0, yy);
        if ((f > 0.0) != (prev_f > 0.0) || f == 0.0) {
            double l = prev_y, r = yy, fl = prev_f;
            for (int it = 0; it < 100 && r - l > 1e-14; ++it) {
                const double m = 0.5 * (l + r), fm = us.eval(1, 0.0, m);
                if ((fm > 0.0) == (fl > 0.0))
                    l = m, fl = fm;
                else
                    r = m;
            }
            const double root = 0.5 * (l + r);
            if (std::abs(root - a0) < best_dist) best = root, best_dist = std::abs(root - a0), found = true;
        }
        prev_y = yy;
        prev_f = f;
    }
    if (!found) throw Error(ErrorKind::BadParameters, "no critical point of the shear near a0");
    auto rate = [&](double t, double a) {
        const double uyy = us.eval_y(1, t, a);
        if (!(std::abs(uyy) >= 1e-4)) throw LocatedError(ErrorKind::CriticalCurveLost, "curvature vanished", t, 0.0, a);
        return -us.eval_t(1, t, a) / uyy;
    };
    CriticalCurve c;
    const auto& tt = us.t();
    double a = best;
    auto record = [&](double t) {
        c.t.push_back(t);
        c.a.push_back(a);
        c.u_at_a.push_back(us.eval(0, t, a));
        c.uyy_at_a.push_back(us.eval_y(1, t, a));
        c.da_dt.push_back(rate(t, a));
        c.max_uy_residual = std::max(c.max_uy_residual, std::abs(us.eval(1, t, a)));
    };
    record(0.0);
    for (std::size_t n = 1; n < tt.size() && tt[n - 1] < t_max - 1e-14; ++n) {
        const double t0 = tt[n - 1], dt = std::min(tt[n], t_max) - t0;
        const double k1 = rate(t0, a);
        const double k2 = rate(t0 + 0.5 * dt, a + 0.5 * dt * k1);
        const double k3 = rate(t0 + 0.5 * dt, a + 0.5 * dt * k2);
        const double k4 = rate(t0 + dt, a + dt * k3);
        a += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (a < 2 * h || a > y.back() - 2 * h)
            throw LocatedError(ErrorKind::CriticalCurveLost, "critical point left the domain", t0 + dt, 0.0, a);
        record(t0 + dt);
    }
    return c;
}

}  // namespace mhdbl
