#include "mhdbl/outflow.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "mhdbl/error.hpp"
#include "mhdbl/fields.hpp"
#include "mhdbl/grid.hpp"
#include "mhdbl/numerics.hpp"

namespace mhdbl {
namespace {

double sup_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

struct Rhs {
    std::vector<double> dU, dB;
};

Rhs bernoulli_rhs(const std::vector<double>& U, const std::vector<double>& B, const std::vector<double>& px,
                  double dx) {
    const auto Ux = diff_periodic(U, dx, 1);
    const auto Bx = diff_periodic(B, dx, 1);
    Rhs r{std::vector<double>(U.size()), std::vector<double>(U.size())};
    for (std::size_t i = 0; i < U.size(); ++i) {
        r.dU[i] = -U[i] * Ux[i] + B[i] * Bx[i] - px[i];
        r.dB[i] = -U[i] * Bx[i] + B[i] * Ux[i];
    }
    return r;
}

// p = gauge + zero-mean periodic antiderivative of px (trapezoid).
std::vector<double> pressure_from_gradient(const std::vector<double>& px, double dx, double gauge) {
    const std::size_t n = px.size();
    std::vector<double> p(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) p[i] = p[i - 1] + 0.5 * dx * (px[i - 1] + px[i]);
    double mean = 0.0;
    for (double v : p) mean += v;
    mean /= static_cast<double>(n);
    for (auto& v : p) v = v - mean + gauge;
    return p;
}

std::vector<double> sample_px(const PressureGradient& px, double t, int nx, double dx) {
    std::vector<double> out(nx, 0.0);
    if (!px) return out;
    double mean = 0.0, scale = 0.0;
    for (int i = 0; i < nx; ++i) {
        out[i] = px(t, dx * i);
        mean += out[i];
        scale = std::max(scale, std::abs(out[i]));
    }
    mean /= nx;
    if (std::abs(mean) > 1e-10 * std::max(1.0, scale))
        throw Error(ErrorKind::BadParameters, "pressure gradient must have zero x-mean");
    return out;
}

}  // namespace

double OutflowState::dx() const { return kTwoPi / nx; }

void OutflowState::check_shape() const {
    const std::size_t n = t_grid.size();
    if (U.size() != n || B.size() != n || p.size() != n)
        throw Error(ErrorKind::ShapeMismatch, "U, B, p must share the time sampling");
    for (std::size_t k = 0; k < n; ++k)
        if (static_cast<int>(U[k].size()) != nx || static_cast<int>(B[k].size()) != nx ||
            static_cast<int>(p[k].size()) != nx)
            throw Error(ErrorKind::ShapeMismatch, "U, B, p must share the x sampling");
}

BernoulliResidual bernoulli_residual(const OutflowState& s) {
    s.check_shape();
    if (s.nt() < 3) throw Error(ErrorKind::InsufficientData, "residual needs at least 3 time samples");
    const double dx = s.dx();
    const auto st = num::derivative_stencils(s.t_grid, 1);
    BernoulliResidual r;
    for (std::size_t n = 0; n < s.nt(); ++n) {
        const auto Ux = diff_periodic(s.U[n], dx, 1);
        const auto Bx = diff_periodic(s.B[n], dx, 1);
        const auto px = diff_periodic(s.p[n], dx, 1);
        for (int i = 0; i < s.nx; ++i) {
            double Ut = 0.0, Bt = 0.0;
            for (std::size_t k = 0; k < st[n].w.size(); ++k) {
                Ut += st[n].w[k] * s.U[st[n].start + k][i];
                Bt += st[n].w[k] * s.B[st[n].start + k][i];
            }
            const double U = s.U[n][i], B = s.B[n][i];
            r.r_momentum = std::max(r.r_momentum, std::abs(Ut + U * Ux[i] + px[i] - B * Bx[i]));
            r.r_induction = std::max(r.r_induction, std::abs(Bt + U * Bx[i] - B * Ux[i]));
        }
    }
    return r;
}

OutflowState evolve_outflow(std::span<const double> U0, std::span<const double> B0, double p_gauge,
                            std::span<const double> t_grid, const PressureGradient& px, double cfl) {
    const int nx = static_cast<int>(U0.size());
    if (nx < 3 || B0.size() != U0.size()) throw Error(ErrorKind::ShapeMismatch, "U0 and B0 need equal length >= 3");
    if (t_grid.empty()) throw Error(ErrorKind::InsufficientData, "empty time grid");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (!(t_grid[k] > t_grid[k - 1])) throw Error(ErrorKind::BadParameters, "time grid must increase");
    OutflowState s;
    s.nx = nx;
    s.t_grid.assign(t_grid.begin(), t_grid.end());
    const double dx = kTwoPi / nx;
    std::vector<double> U(U0.begin(), U0.end()), B(B0.begin(), B0.end());
    auto record = [&](double t) {
        const auto g = sample_px(px, t, nx, dx);
        s.U.push_back(U);
        s.B.push_back(B);
        s.p.push_back(pressure_from_gradient(g, dx, p_gauge));
    };
    record(t_grid[0]);
    auto rhs_at = [&](const std::vector<double>& u, const std::vector<double>& b, double t) {
        return bernoulli_rhs(u, b, sample_px(px, t, nx, dx), dx);
    };
    std::vector<double> u2(nx), b2(nx);
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        double t = t_grid[k - 1];
        const double span = t_grid[k] - t;
        double speed = 0.0;
        for (int i = 0; i < nx; ++i) speed = std::max(speed, std::abs(U[i]) + std::abs(B[i]));
        const double dt_max = speed > 0.0 ? cfl * dx / speed : span;
        const int sub = std::max(1, static_cast<int>(std::ceil(span / dt_max - 1e-12)));
        const double h = span / sub;
        for (int q = 0; q < sub; ++q) {
            const auto k1 = rhs_at(U, B, t);
            for (int i = 0; i < nx; ++i) u2[i] = U[i] + 0.5 * h * k1.dU[i], b2[i] = B[i] + 0.5 * h * k1.dB[i];
            const auto k2 = rhs_at(u2, b2, t + 0.5 * h);
            for (int i = 0; i < nx; ++i) u2[i] = U[i] + 0.5 * h * k2.dU[i], b2[i] = B[i] + 0.5 * h * k2.dB[i];
            const auto k3 = rhs_at(u2, b2, t + 0.5 * h);
            for (int i = 0; i < nx; ++i) u2[i] = U[i] + h * k3.dU[i], b2[i] = B[i] + h * k3.dB[i];
            const auto k4 = rhs_at(u2, b2, t + h);
            for (int i = 0; i < nx; ++i) {
                U[i] += h / 6.0 * (k1.dU[i] + 2.0 * k2.dU[i] + 2.0 * k3.dU[i] + k4.dU[i]);
                B[i] += h / 6.0 * (k1.dB[i] + 2.0 * k2.dB[i] + 2.0 * k3.dB[i] + k4.dB[i]);
            }
            t = (q + 1 == sub) ? t_grid[k] : t + h;
            for (int i = 0; i < nx; ++i)
                if (!std::isfinite(U[i]) || !std::isfinite(B[i]) || std::abs(U[i]) > 1e6 || std::abs(B[i]) > 1e6)
                    throw LocatedError(ErrorKind::OutflowBlowup, "outflow trace blew up", t, dx * i, 0.0);
        }
        record(t_grid[k]);
    }
    double M = 0.0;
    for (std::size_t n = 0; n < s.nt(); ++n) {
        M = std::max({M, sup_abs(s.U[n]), sup_abs(s.B[n]), sup_abs(diff_periodic(s.U[n], dx, 1)),
                      sup_abs(diff_periodic(s.B[n], dx, 1)), sup_abs(diff_periodic(s.p[n], dx, 1))});
    }
    s.M_bound = M;
    return s;
}

OutflowState constant_outflow(double U0, double B0, double p0, int nx, std::span<const double> t_grid) {
    OutflowState s;
    s.nx = nx;
    s.t_grid.assign(t_grid.begin(), t_grid.end());
    s.U.assign(t_grid.size(), std::vector<double>(nx, U0));
    s.B.assign(t_grid.size(), std::vector<double>(nx, B0));
    s.p.assign(t_grid.size(), std::vector<double>(nx, p0));
    s.M_bound = std::max(std::abs(U0), std::abs(B0));
    return s;
}

OutflowSlice outflow_slice(const OutflowState& s, std::size_t n) {
    const double dx = s.dx();
    OutflowSlice sl;
    sl.U = s.U[n];
    sl.B = s.B[n];
    sl.Ux = diff_periodic(s.U[n], dx, 1);
    sl.Bx = diff_periodic(s.B[n], dx, 1);
    const auto px = diff_periodic(s.p[n], dx, 1);
    sl.Ut.resize(s.nx);
    for (int i = 0; i < s.nx; ++i) sl.Ut[i] = -sl.U[i] * sl.Ux[i] + sl.B[i] * sl.Bx[i] - px[i];
    return sl;
}

void to_json(nlohmann::json& j, const OutflowState& s) {
    auto flat = [](const std::vector<std::vector<double>>& rows) {
        std::vector<double> out;
        for (const auto& r : rows) out.insert(out.end(), r.begin(), r.end());
        return out;
    };
    j = nlohmann::json{{"t_grid", s.t_grid}, {"nx", s.nx},         {"U", flat(s.U)},
                       {"B", flat(s.B)},      {"p", flat(s.p)},     {"M_bound", s.M_bound}};
}

void from_json(const nlohmann::json& j, OutflowState& s) {
    s.t_grid = j.at("t_grid").get<std::vector<double>>();
    s.nx = j.at("nx").get<int>();
    s.M_bound = j.value("M_bound", 0.0);
    auto rows = [&](const char* key) {
        const auto flat = j.at(key).get<std::vector<double>>();
        if (flat.size() != s.t_grid.size() * static_cast<std::size_t>(s.nx))
            throw Error(ErrorKind::ShapeMismatch, std::string("outflow array ") + key + " has wrong length");
        std::vector<std::vector<double>> out(s.t_grid.size());
        for (std::size_t n = 0; n < out.size(); ++n)
            out[n].assign(flat.begin() + n * s.nx, flat.begin() + (n + 1) * s.nx);
        return out;
    };
    s.U = rows("U");
    s.B = rows("B");
    s.p = rows("p");
}

}  // namespace mhdbl
