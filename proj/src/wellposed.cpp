#include "mhdbl/wellposed.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mhdbl/fields.hpp"
#include "mhdbl/norms.hpp"
#include "mhdbl/parallel.hpp"

namespace mhdbl {
namespace {

// f(s) = e^{−1/s} and its first two derivatives (0 for s ≤ 0).
void bump_pieces(double s, double& f, double& f1, double& f2) {
    if (s <= 0.0) {
        f = f1 = f2 = 0.0;
        return;
    }
    f = std::exp(-1.0 / s);
    const double s2 = s * s;
    f1 = f / s2;
    f2 = f * (1.0 / (s2 * s2) - 2.0 / (s2 * s));
}

// Trace coefficients at one time sample.
struct Coef {
    std::vector<double> U, B, Ux, Bx;
};

Coef coef_at(const OutflowState& o, std::size_t n) {
    const auto sl = outflow_slice(o, n);
    return {sl.U, sl.B, sl.Ux, sl.Bx};
}

void check_grid(const Grid& g, const OutflowState& o) {
    o.check_shape();
    if (o.nx != g.nx()) throw Error(ErrorKind::ShapeMismatch, "outflow and field x sampling differ");
}

void check_forcing(const Forcing& f, const Grid& g, std::size_t nt) {
    if (f.r1.size() != nt || f.r2.size() != nt)
        throw Error(ErrorKind::ShapeMismatch, "forcing series length differs from the time grid");
    for (std::size_t n = 0; n < nt; ++n)
        if (f.r1[n].grid() != g || f.r2[n].grid() != g)
            throw Error(ErrorKind::ShapeMismatch, "forcing grid differs from the state grid");
}

// c ∂y(c ∂y v) in conservative three-point form at interior rows (0 at the ends).
void diffusion_column(const double* c, const double* v, const std::vector<double>& y, double* out) {
    const std::size_t ny = y.size();
    out[0] = out[ny - 1] = 0.0;
    for (std::size_t j = 1; j + 1 < ny; ++j) {
        const double hm = y[j] - y[j - 1], hp = y[j + 1] - y[j];
        const double cm = 0.5 * (c[j] + c[j - 1]), cp = 0.5 * (c[j] + c[j + 1]);
        out[j] = c[j] * (cp * (v[j + 1] - v[j]) / hp - cm * (v[j] - v[j - 1]) / hm) / (0.5 * (hp + hm));
    }
}

// Three-point ∂y (one-sided first order at the ends).
double ddy(const double* f, const std::vector<double>& y, std::size_t j) {
    const std::size_t ny = y.size();
    if (j == 0) return (f[1] - f[0]) / (y[1] - y[0]);
    if (j == ny - 1) return (f[j] - f[j - 1]) / (y[j] - y[j - 1]);
    const double hm = y[j] - y[j - 1], hp = y[j + 1] - y[j];
    return (hm * hm * (f[j + 1] - f[j]) + hp * hp * (f[j] - f[j - 1])) / (hm * hp * (hm + hp));
}

// Evaluation of the homogenized system at one time sample: centered in x,
// the march's y operators in y.
StateDerivative rhs_core(const Field& b, const Field& v, const Coef& c, const Field& r1, const Field& r2,
                         const Cutoff& phi) {
    const Grid& g = b.grid();
    const int ny = g.ny();
    const auto& y = g.y_nodes();
    const Field bx = diff(b, Axis::x, 1), vx = diff(v, Axis::x, 1);
    StateDerivative out{Field(g), Field(g)};
    std::vector<double> cc(ny), src(ny), dif(ny);
    for (int i = 0; i < g.nx(); ++i) {
        for (int j = 0; j < ny; ++j) {
            cc[j] = b(i, j) + c.B[i];
            src[j] = phi.phi_y[j] * c.U[i] * b(i, j);
        }
        diffusion_column(cc.data(), v.column(i), y, dif.data());
        for (int j = 0; j < ny; ++j) {
            const double a = v(i, j) + c.U[i] * phi.phi[j];
            out.b(i, j) = -a * bx(i, j) + cc[j] * vx(i, j) - c.Bx[i] * v(i, j) + phi.phi[j] * c.Ux[i] * b(i, j) +
                          r1(i, j);
            out.v(i, j) = cc[j] * bx(i, j) - a * vx(i, j) + dif[j] + cc[j] * ddy(src.data(), y, j) +
                          (phi.phi_yy[j] * c.U[i] * c.B[i] + c.Bx[i]) * b(i, j) - phi.phi[j] * c.Ux[i] * v(i, j) +
                          r2(i, j);
        }
        out.v(i, 0) = 0.0;
        out.v(i, ny - 1) = 0.0;
        out.b(i, ny - 1) = 0.0;
    }
    return out;
}

double field_l2(const Field& b, const Field& v) { return std::sqrt(l2_squared(b) + l2_squared(v)); }

void check_finite(const Field& f, std::size_t step, double t) {
    const Grid& g = f.grid();
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            if (!std::isfinite(f(i, j)) || std::abs(f(i, j)) > 1e8)
                throw LocatedError(ErrorKind::NumericalBlowup, "march blew up at step " + std::to_string(step), t,
                                   g.x(i), g.y(j));
}

void check_lower_bound(const Field& b, const std::vector<double>& B, double bound, double t) {
    const Grid& g = b.grid();
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            if (b(i, j) + B[i] < bound)
                throw LocatedError(ErrorKind::LowerBoundLost,
                                   "b + B = " + std::to_string(b(i, j) + B[i]) + " below " + std::to_string(bound), t,
                                   g.x(i), g.y(j));
}

// Shared time stepper. coef(k) gives the (b, v) the coefficients are frozen at
// for level k; the implicit diffusion coefficient uses level implicit_level(k).
template <class CoefSource, class ImplicitLevel>
void march(const Field& b_init, const Field& v_init, const OutflowState& outflow, const Forcing& forcing,
          double delta0, const MarchOptions& opt, CoefSource&& coef, ImplicitLevel&& implicit_level,
          HomogenizedState& out) {
    const Grid& g = b_init.grid();
    const int nx = g.nx(), ny = g.ny();
    const auto& y = g.y_nodes();
    const double dx = g.dx();
    out.grid = g;
    out.t_grid = outflow.t_grid;
    out.outflow = outflow;
    out.delta0 = delta0;
    out.phi = make_cutoff(g);
    const Cutoff& phi = out.phi;
    out.b.assign(1, b_init);
    out.v.assign(1, v_init);
    for (int i = 0; i < nx; ++i) {
        out.v[0](i, 0) = 0.0;
        out.v[0](i, ny - 1) = 0.0;
        out.b[0](i, ny - 1) = 0.0;
    }
    const std::size_t nt = outflow.nt();
    for (std::size_t k = 0; k + 1 < nt; ++k) {
        const double dt = outflow.t_grid[k + 1] - outflow.t_grid[k];
        const Coef c = coef_at(outflow, k);
        const auto& Bn = outflow.B[k + 1];
        const auto cf = coef(k);
        const Field* bc = cf.first;
        const Field* vc = cf.second;
        const Field& b = out.b[k];
        const Field& v = out.v[k];
        double speed = 0.0;
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j)
                speed = std::max(speed, std::abs((*vc)(i, j) + c.U[i] * phi.phi[j]) + std::abs((*bc)(i, j) + c.B[i]));
        if (nx > 1 && dt * speed > opt.cfl * dx * (1.0 + 1e-12))
            throw Error(ErrorKind::StepTooLarge, "dt=" + std::to_string(dt) + " exceeds the advective limit " +
                                                     std::to_string(opt.cfl * dx / speed));
        const Field* bi = implicit_level(k).first;
        Field bn(g), vn(g);
        const Field& r1 = forcing.r1[k];
        const Field& r2 = forcing.r2[k];
        parallel_for(0, nx, [&](int i) {
            const int im = (i + nx - 1) % nx, ip = (i + 1) % nx;
            std::vector<double> rhs(ny), lo(ny), di(ny), up(ny), cimp(ny), src(ny);
            for (int j = 0; j < ny; ++j) src[j] = phi.phi_y[j] * c.U[i] * b(i, j);
            for (int j = 0; j < ny; ++j) {
                const double a = (*vc)(i, j) + c.U[i] * phi.phi[j];
                const double cc = (*bc)(i, j) + c.B[i];
                double tp = 0.0, tm = 0.0;
                if (nx > 1) {
                    const double lp = a - cc, lm = a + cc;
                    const double wp = v(i, j) + b(i, j), wm = v(i, j) - b(i, j);
                    const double dwp = lp > 0 ? (wp - v(im, j) - b(im, j)) / dx : (v(ip, j) + b(ip, j) - wp) / dx;
                    const double dwm = lm > 0 ? (wm - v(im, j) + b(im, j)) / dx : (v(ip, j) - b(ip, j) - wm) / dx;
                    tp = -lp * dwp;
                    tm = -lm * dwm;
                }
                const double dsrc = ddy(src.data(), y, j);
                const double eb = 0.5 * (tp - tm) - c.Bx[i] * v(i, j) + phi.phi[j] * c.Ux[i] * b(i, j) + r1(i, j);
                const double ev = 0.5 * (tp + tm) + cc * dsrc + (phi.phi_yy[j] * c.U[i] * c.B[i] + c.Bx[i]) * b(i, j) -
                                  phi.phi[j] * c.Ux[i] * v(i, j) + r2(i, j);
                bn(i, j) = b(i, j) + dt * eb;
                rhs[j] = v(i, j) + dt * ev;
                cimp[j] = (*bi)(i, j) + Bn[i];
            }
            bn(i, ny - 1) = 0.0;
            // (I − dt c ∂y(c ∂y)) v⁺ = rhs with v⁺ = 0 at both ends.
            for (int j = 1; j < ny - 1; ++j) {
                const double hm = y[j] - y[j - 1], hp = y[j + 1] - y[j], hc = 0.5 * (hp + hm);
                const double cm = 0.5 * (cimp[j] + cimp[j - 1]), cp = 0.5 * (cimp[j] + cimp[j + 1]);
                const double s = dt * cimp[j] / hc;
                lo[j] = -s * cm / hm;
                up[j] = -s * cp / hp;
                di[j] = 1.0 + s * (cm / hm + cp / hp);
            }
            double* col = vn.column(i);
            col[0] = 0.0;
            col[ny - 1] = 0.0;
            // Thomas sweep over interior rows 1..ny-2.
            std::vector<double> cprime(ny, 0.0), dprime(ny, 0.0);
            for (int j = 1; j < ny - 1; ++j) {
                const double den = di[j] - (j > 1 ? lo[j] * cprime[j - 1] : 0.0);
                cprime[j] = up[j] / den;
                dprime[j] = (rhs[j] - (j > 1 ? lo[j] * dprime[j - 1] : 0.0)) / den;
            }
            for (int j = ny - 2; j >= 1; --j) col[j] = dprime[j] - (j < ny - 2 ? cprime[j] * col[j + 1] : 0.0);
        });
        const double tn = outflow.t_grid[k + 1];
        check_finite(bn, k + 1, tn);
        check_finite(vn, k + 1, tn);
        if (opt.lower_bound > 0.0) check_lower_bound(bn, Bn, opt.lower_bound, tn);
        out.b.push_back(std::move(bn));
        out.v.push_back(std::move(vn));
    }
}

}  // namespace

double cutoff(double y, int deriv) {
    if (y <= 1.0 || y >= 2.0) return (deriv == 0 && y >= 2.0) ? 1.0 : 0.0;
    double g, g1, g2, h, h1, h2;
    bump_pieces(y - 1.0, g, g1, g2);
    bump_pieces(2.0 - y, h, h1, h2);
    h1 = -h1;  // d/dy of f(2 − y)
    const double D = g + h;
    if (deriv == 0) return g / D;
    const double N = g1 * h - g * h1;
    if (deriv == 1) return N / (D * D);
    const double N1 = g2 * h - g * h2;
    const double D1 = g1 + h1;
    return (N1 * D - 2.0 * N * D1) / (D * D * D);
}

Cutoff make_cutoff(const Grid& g) {
    Cutoff c;
    for (double y : g.y_nodes()) {
        c.phi.push_back(cutoff(y, 0));
        c.phi_y.push_back(cutoff(y, 1));
        c.phi_yy.push_back(cutoff(y, 2));
    }
    return c;
}

double HomogenizedState::min_b_plus_B() const {
    double m = 1e300;
    for (std::size_t n = 0; n < b.size(); ++n)
        for (int i = 0; i < grid.nx(); ++i)
            for (int j = 0; j < grid.ny(); ++j) m = std::min(m, b[n](i, j) + outflow.B[n][i]);
    return m;
}

Forcing residual_forcing(const OutflowState& o, const Grid& g) {
    check_grid(g, o);
    const Cutoff phi = make_cutoff(g);
    Forcing f;
    double sup = 0.0;
    for (std::size_t n = 0; n < o.nt(); ++n) {
        const auto sl = outflow_slice(o, n);
        Field r1(g), r2(g);
        for (int i = 0; i < g.nx(); ++i)
            for (int j = 0; j < g.ny(); ++j) {
                const double p = phi.phi[j];
                r1(i, j) = (1.0 - p) * (sl.U[i] * sl.Bx[i] - sl.B[i] * sl.Ux[i]);
                r2(i, j) = (1.0 - p) * sl.Ut[i] + (1.0 - p * p) * sl.U[i] * sl.Ux[i] +
                           phi.phi_yy[j] * sl.U[i] * sl.B[i] * sl.B[i];
            }
        sup = std::max(sup, field_l2(r1, r2));
        f.r1.push_back(std::move(r1));
        f.r2.push_back(std::move(r2));
    }
    const double M = o.M_bound;
    f.bound_ratio = M > 0.0 ? sup / (M * M * M) : 0.0;
    return f;
}

StateDerivative nonlinear_rhs(const Field& b, const Field& v, const OutflowState& outflow, const Forcing& forcing,
                              std::size_t n) {
    b.check_same(v);
    check_grid(b.grid(), outflow);
    check_forcing(forcing, b.grid(), outflow.nt());
    return rhs_core(b, v, coef_at(outflow, n), forcing.r1[n], forcing.r2[n], make_cutoff(b.grid()));
}

std::vector<StateDerivative> initial_time_derivatives(const Field& b0, const Field& v0, const OutflowState& outflow,
                                                      const Forcing& forcing, int J) {
    if (J < 0 || J > 2) throw Error(ErrorKind::UnsupportedOrder, "initial time derivatives are capped at J = 2");
    b0.check_same(v0);
    const Grid& g = b0.grid();
    check_grid(g, outflow);
    check_forcing(forcing, g, outflow.nt());
    std::vector<StateDerivative> out{{b0, v0}};
    if (J == 0) return out;
    const Cutoff phi = make_cutoff(g);
    const Coef c0 = coef_at(outflow, 0);
    out.push_back(rhs_core(b0, v0, c0, forcing.r1[0], forcing.r2[0], phi));
    if (J == 1) return out;

    // Second derivative: exact derivative of the (cubic in s) map
    // s ↦ rhs(b0 + s b1, v0 + s v1; trace + s ∂t trace; r + s ∂t r) at s = 0.
    const auto sl = outflow_slice(outflow, 0);
    const int nx = g.nx();
    std::vector<double> Bt(nx);
    for (int i = 0; i < nx; ++i) Bt[i] = -sl.U[i] * sl.Bx[i] + sl.B[i] * sl.Ux[i];
    const auto Uxt = diff_periodic(sl.Ut, outflow.dx(), 1);
    const auto Bxt = diff_periodic(Bt, outflow.dx(), 1);
    Field r1t(g), r2t(g);
    const std::size_t nt = outflow.nt();
    if (nt >= 3) {
        r1t = diff_t(forcing.r1, outflow.t_grid, 1)[0];
        r2t = diff_t(forcing.r2, outflow.t_grid, 1)[0];
    } else if (nt == 2) {
        const double dt = outflow.t_grid[1] - outflow.t_grid[0];
        r1t = (1.0 / dt) * (forcing.r1[1] - forcing.r1[0]);
        r2t = (1.0 / dt) * (forcing.r2[1] - forcing.r2[0]);
    }
    auto G = [&](double s) {
        Coef c = c0;
        for (int i = 0; i < nx; ++i) {
            c.U[i] += s * sl.Ut[i];
            c.B[i] += s * Bt[i];
            c.Ux[i] += s * Uxt[i];
            c.Bx[i] += s * Bxt[i];
        }
        return rhs_core(b0 + s * out[1].b, v0 + s * out[1].v, c, forcing.r1[0] + s * r1t, forcing.r2[0] + s * r2t,
                        phi);
    };
    const auto m2 = G(-2.0), m1 = G(-1.0), p1 = G(1.0), p2 = G(2.0);
    StateDerivative d2{Field(g), Field(g)};
    for (std::size_t k = 0; k < g.size(); ++k) {
        d2.b.values()[k] = (m2.b.values()[k] - 8.0 * m1.b.values()[k] + 8.0 * p1.b.values()[k] - p2.b.values()[k]) / 12.0;
        d2.v.values()[k] = (m2.v.values()[k] - 8.0 * m1.v.values()[k] + 8.0 * p1.v.values()[k] - p2.v.values()[k]) / 12.0;
    }
    out.push_back(std::move(d2));
    return out;
}

HomogenizedState zeroth_iterate(const std::vector<StateDerivative>& derivs, const OutflowState& outflow,
                                double delta0) {
    if (derivs.empty()) throw Error(ErrorKind::InsufficientData, "no initial data");
    const Grid& g = derivs[0].b.grid();
    check_grid(g, outflow);
    HomogenizedState s;
    s.grid = g;
    s.t_grid = outflow.t_grid;
    s.outflow = outflow;
    s.delta0 = delta0;
    s.phi = make_cutoff(g);
    for (double t : outflow.t_grid) {
        if (t == 0.0) {
            s.b.push_back(derivs[0].b);
            s.v.push_back(derivs[0].v);
            continue;
        }
        Field b(g), v(g);
        double coef = 1.0;
        for (std::size_t j = 0; j < derivs.size(); ++j) {
            if (j > 0) coef *= t / static_cast<double>(j);
            const auto& db = derivs[j].b.values();
            const auto& dv = derivs[j].v.values();
            for (std::size_t k = 0; k < g.size(); ++k) {
                b.values()[k] += coef * db[k];
                v.values()[k] += coef * dv[k];
            }
        }
        s.b.push_back(std::move(b));
        s.v.push_back(std::move(v));
    }
    return s;
}

HomogenizedState linear_march(const HomogenizedState& prev, const Forcing& forcing, const MarchOptions& opt) {
    if (prev.b.size() != prev.nt() || prev.v.size() != prev.nt() || prev.nt() != prev.outflow.nt())
        throw Error(ErrorKind::ShapeMismatch, "state series length differs from its time grid");
    check_grid(prev.grid, prev.outflow);
    check_forcing(forcing, prev.grid, prev.nt());
    HomogenizedState out;
    auto coef = [&](std::size_t k) { return std::pair<const Field*, const Field*>{&prev.b[k], &prev.v[k]}; };
    auto impl = [&](std::size_t k) { return std::pair<const Field*, const Field*>{&prev.b[k + 1], &prev.v[k + 1]}; };
    march(prev.b[0], prev.v[0], prev.outflow, forcing, prev.delta0, opt, coef, impl, out);
    return out;
}

HomogenizedState direct_march(const Field& b_init, const Field& v_init, const OutflowState& outflow,
                              const Forcing& forcing, double delta0, const MarchOptions& opt) {
    b_init.check_same(v_init);
    check_grid(b_init.grid(), outflow);
    check_forcing(forcing, b_init.grid(), outflow.nt());
    HomogenizedState out;
    auto coef = [&](std::size_t k) { return std::pair<const Field*, const Field*>{&out.b[k], &out.v[k]}; };
    march(b_init, v_init, outflow, forcing, delta0, opt, coef, coef, out);
    return out;
}

double sup_l2_distance(const HomogenizedState& a, const HomogenizedState& b) {
    if (a.b.size() != b.b.size()) throw Error(ErrorKind::ShapeMismatch, "states have different time grids");
    double m = 0.0;
    for (std::size_t n = 0; n < a.b.size(); ++n) m = std::max(m, field_l2(a.b[n] - b.b[n], a.v[n] - b.v[n]));
    return m;
}

PicardResult picard_solve(const Field& b_init, const Field& v_init, const OutflowState& outflow,
                          const Forcing& forcing, const PicardOptions& opt) {
    b_init.check_same(v_init);
    const Grid& g = b_init.grid();
    check_grid(g, outflow);
    check_forcing(forcing, g, outflow.nt());
    double start_min = 1e300;
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) start_min = std::min(start_min, b_init(i, j) + outflow.B[0][i]);
    const double delta0 = opt.delta0 > 0.0 ? opt.delta0 : start_min;
    if (!(delta0 > 0.0) || start_min < delta0)
        throw Error(ErrorKind::BadParameters, "initial b + B has minimum " + std::to_string(start_min) +
                                                  ", below delta0 = " + std::to_string(delta0));
    const auto derivs = initial_time_derivatives(b_init, v_init, outflow, forcing, opt.J);
    PicardResult res;
    HomogenizedState prev = zeroth_iterate(derivs, outflow, delta0);
    for (std::size_t n = 0; n < prev.nt(); ++n)
        check_lower_bound(prev.b[n], outflow.B[n], 0.5 * delta0, outflow.t_grid[n]);
    const NormSpec hm = NormSpec::sobolev_H(opt.m_monitor);
    MarchOptions mo;
    mo.lower_bound = 0.5 * delta0;
    mo.cfl = opt.cfl;
    for (int it = 1; it <= opt.max_iter; ++it) {
        HomogenizedState next = linear_march(prev, forcing, mo);
        IterationReport r;
        r.iterate_index = it;
        r.l2_diff = sup_l2_distance(next, prev);
        for (std::size_t n = 0; n < next.nt(); ++n) {
            const double nb = norm(next.b[n], hm), nv = norm(next.v[n], hm);
            r.sup_Hm = std::max(r.sup_Hm, std::sqrt(nb * nb + nv * nv));
        }
        if (!res.reports.empty() && res.reports.back().l2_diff > 0.0)
            r.contraction_ratio = r.l2_diff / res.reports.back().l2_diff;
        r.min_b_plus_B = next.min_b_plus_B();
        res.reports.push_back(r);
        prev = std::move(next);
        if (r.l2_diff <= opt.tol) {
            res.converged = true;
            break;
        }
    }
    res.state = std::move(prev);
    if (!res.converged && opt.require_convergence)
        throw Error(ErrorKind::NoContraction, "no convergence after " + std::to_string(opt.max_iter) +
                                                  " iterates (last difference " +
                                                  std::to_string(res.reports.back().l2_diff) + ")");
    return res;
}

InvariantReport monitor_invariants(const HomogenizedState& s) {
    InvariantReport r;
    r.min_b_plus_B = s.b.empty() ? 0.0 : s.min_b_plus_B();
    double K = -1e300;
    for (std::size_t n = 0; n < s.b.size(); ++n) {
        r.energy.push_back(l2_squared(s.b[n]) + l2_squared(s.v[n]));
        r.dissipation.push_back(l2_squared(diff(s.v[n], Axis::y, 1)));
        if (n > 0 && r.energy[n - 1] > 0.0 && r.energy[n] > 0.0)
            K = std::max(K, std::log(r.energy[n] / r.energy[n - 1]) / (s.t_grid[n] - s.t_grid[n - 1]));
    }
    r.gronwall_K = K == -1e300 ? 0.0 : K;
    return r;
}

ContractionSearch find_contraction_time(const SetupBuilder& build, double T0, int max_halvings,
                                        const PicardOptions& opt, int min_iterates) {
    ContractionSearch out;
    PicardOptions o = opt;
    o.require_convergence = false;
    for (int h = 0; h <= max_halvings; ++h) {
        const double T = T0 / std::ldexp(1.0, h);
        PicardResult res;
        try {
            const ProblemSetup s = build(T);
            res = picard_solve(s.b_init, s.v_init, s.outflow, s.forcing, o);
        } catch (const Error&) {
            continue;
        }
        std::vector<double> ratios;
        for (std::size_t k = 1; k < res.reports.size(); ++k) ratios.push_back(res.reports[k].contraction_ratio);
        const bool ok = res.converged && static_cast<int>(res.reports.size()) >= min_iterates && !ratios.empty() &&
                        std::all_of(ratios.begin(), ratios.end(), [](double q) { return q <= 0.5; });
        out.T = T;
        out.halvings = h;
        out.ratios = ratios;
        out.result = std::move(res);
        if (ok) {
            out.found = true;
            return out;
        }
    }
    return out;
}

}  // namespace mhdbl
