#include "mhdbl/transform.hpp"

#include <algorithm>
#include <cmath>

#include "mhdbl/fields.hpp"
#include "mhdbl/norms.hpp"
#include "mhdbl/numerics.hpp"

namespace mhdbl {
namespace {

// Cubic Lagrange interpolant through four nodes.
struct Cubic4 {
    double x[4], f[4];

    Cubic4(const double* xs, const double* fs) {
        std::copy(xs, xs + 4, x);
        std::copy(fs, fs + 4, f);
    }
    double operator()(double z) const {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
            double l = 1.0;
            for (int m = 0; m < 4; ++m)
                if (m != k) l *= (z - x[m]) / (x[k] - x[m]);
            acc += l * f[k];
        }
        return acc;
    }
    double deriv(double z) const {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
            double denom = 1.0;
            for (int m = 0; m < 4; ++m)
                if (m != k) denom *= x[k] - x[m];
            double s = 0.0;
            for (int m = 0; m < 4; ++m) {
                if (m == k) continue;
                double p = 1.0;
                for (int q = 0; q < 4; ++q)
                    if (q != k && q != m) p *= z - x[q];
                s += p;
            }
            acc += f[k] * s / denom;
        }
        return acc;
    }
};

std::size_t cubic_start(std::size_t interval, std::size_t n) {
    return interval == 0 ? 0 : std::min(interval - 1, n - 4);
}

double interp_column(const std::vector<double>& x, const double* f, double z) {
    const std::size_t n = x.size();
    const std::size_t i = num::locate(x, z);
    if (n < 4) {
        const double t = (z - x[i]) / (x[i + 1] - x[i]);
        return (1.0 - t) * f[i] + t * f[i + 1];
    }
    const std::size_t s = cubic_start(i, n);
    return Cubic4(x.data() + s, f + s)(z);
}

void check_monotone(const StreamFunction& sf) {
    const Grid& g = sf.grid;
    for (int i = 0; i < g.nx(); ++i) {
        const double* c = sf.psi.column(i);
        for (int j = 1; j < g.ny(); ++j)
            if (!(c[j] > c[j - 1]))
                throw LocatedError(ErrorKind::DegenerateField, "stream function column is not increasing", 0.0,
                                   g.x(i), g.y(j));
    }
}

}  // namespace

StreamFunction stream_function(const Field& b1, double delta0) {
    const Grid& g = b1.grid();
    double mn = b1(0, 0);
    int ai = 0, aj = 0;
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            if (b1(i, j) < mn) mn = b1(i, j), ai = i, aj = j;
    if (!(mn >= delta0) || !(delta0 > 0.0))
        throw LocatedError(ErrorKind::DegenerateField,
                           "b1 minimum " + std::to_string(mn) + " below delta0 " + std::to_string(delta0), 0.0,
                           g.x(ai), g.y(aj));
    StreamFunction sf{g, Field(g), mn};
    const auto q = num::interval_quadrature(g.y_nodes());
    for (int i = 0; i < g.nx(); ++i) {
        const auto col = num::cumulative_integral(q, b1.column(i), g.ny());
        std::copy(col.begin(), col.end(), sf.psi.column(i));
    }
    return sf;
}

Field to_stream_coords(const Field& f, const StreamFunction& sf, const Grid& eta_grid) {
    const Grid& g = sf.grid;
    if (f.grid() != g) throw Error(ErrorKind::ShapeMismatch, "field and stream function grids differ");
    if (eta_grid.nx() != g.nx()) throw Error(ErrorKind::ShapeMismatch, "eta grid must share the x sampling");
    check_monotone(sf);
    const auto& y = g.y_nodes();
    const std::size_t ny = y.size();
    Field out(eta_grid);
    for (int i = 0; i < g.nx(); ++i) {
        const double* psi = sf.psi.column(i);
        const double* fc = f.column(i);
        const std::vector<double> pc(psi, psi + ny);
        for (int k = 0; k < eta_grid.ny(); ++k) {
            const double eta = eta_grid.y(k);
            if (eta >= pc.back()) {
                out(i, k) = fc[ny - 1];
                continue;
            }
            if (eta <= 0.0) {
                out(i, k) = fc[0];
                continue;
            }
            const std::size_t j = num::locate(pc, eta);
            double yr;
            if (ny < 4) {
                yr = y[j] + (eta - pc[j]) / (pc[j + 1] - pc[j]) * (y[j + 1] - y[j]);
            } else {
                const std::size_t s = cubic_start(j, ny);
                const Cubic4 c(y.data() + s, psi + s);
                double lo = y[j], hi = y[j + 1];
                double flo = c(lo) - eta;
                while (hi - lo > 1e-12 * std::max(1.0, hi)) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = c(mid) - eta;
                    if ((fm > 0.0) == (flo > 0.0))
                        lo = mid, flo = fm;
                    else
                        hi = mid;
                }
                yr = 0.5 * (lo + hi);
                const double d = c.deriv(yr);
                if (d > 0.0) {
                    const double yn = yr - (c(yr) - eta) / d;
                    if (yn >= y[j] && yn <= y[j + 1]) yr = yn;
                }
            }
            out(i, k) = interp_column(y, fc, yr);
        }
    }
    return out;
}

Field from_stream_coords(const Field& gfield, const StreamFunction& sf) {
    const Grid& g = sf.grid;
    const Grid& eg = gfield.grid();
    if (eg.nx() != g.nx()) throw Error(ErrorKind::ShapeMismatch, "eta grid must share the x sampling");
    check_monotone(sf);
    const auto& eta = eg.y_nodes();
    Field out(g);
    for (int i = 0; i < g.nx(); ++i) {
        const double* gc = gfield.column(i);
        for (int j = 0; j < g.ny(); ++j) {
            const double p = sf.psi(i, j);
            out(i, j) = (p >= eta.back()) ? gc[eg.ny() - 1] : interp_column(eta, gc, p);
        }
    }
    return out;
}

NormalComponents reconstruct_normal(const Field& u_hat, const Field& b1_hat,
                                    const std::vector<StreamFunction>& sf_series, double dt) {
    if (sf_series.size() < 2) throw Error(ErrorKind::InsufficientData, "need at least two stream-function levels");
    if (!(dt > 0.0)) throw Error(ErrorKind::BadParameters, "dt must be positive");
    const StreamFunction& cur = sf_series.back();
    const Grid& g = cur.grid;
    u_hat.check_same(cur.psi);
    b1_hat.check_same(cur.psi);
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            if (b1_hat(i, j) < 0.5 * cur.delta0)
                throw LocatedError(ErrorKind::DegenerateField, "b1 below delta0/2 in reconstruction", 0.0, g.x(i),
                                   g.y(j));
    const std::size_t n = sf_series.size();
    Field psi_t(g);
    if (n >= 3) {
        const auto& p0 = sf_series[n - 1].psi.values();
        const auto& p1 = sf_series[n - 2].psi.values();
        const auto& p2 = sf_series[n - 3].psi.values();
        for (std::size_t k = 0; k < p0.size(); ++k)
            psi_t.values()[k] = (3.0 * (p0[k] - p1[k]) - (p1[k] - p2[k])) / (2.0 * dt);
    } else {
        const auto& p0 = sf_series[1].psi.values();
        const auto& p1 = sf_series[0].psi.values();
        for (std::size_t k = 0; k < p0.size(); ++k) psi_t.values()[k] = (p0[k] - p1[k]) / dt;
    }
    const Field psi_x = diff(cur.psi, Axis::x, 1);
    NormalComponents out{Field(g), Field(g)};
    for (int i = 0; i < g.nx(); ++i) {
        for (int j = 1; j < g.ny(); ++j) {
            out.v(i, j) = -(psi_t(i, j) + u_hat(i, j) * psi_x(i, j)) / b1_hat(i, j);
            out.b2(i, j) = -psi_x(i, j);
        }
        out.v(i, 0) = 0.0;
        out.b2(i, 0) = 0.0;
    }
    return out;
}

double divergence_residual(const Field& b1, const Field& b2) {
    b1.check_same(b2);
    Field d = diff(b1, Axis::x, 1);
    d += diff(b2, Axis::y, 1);
    return std::sqrt(l2_squared(d));
}

}  // namespace mhdbl
