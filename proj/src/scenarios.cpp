#include "mhdbl/scenarios.hpp"

#include <cmath>
#include <random>

#include "mhdbl/numerics.hpp"

namespace mhdbl {

std::vector<double> time_grid(double T, double dt) {
    if (!(T > 0.0) || !(dt > 0.0)) throw Error(ErrorKind::BadParameters, "T and dt must be positive");
    const int n = std::max(1, static_cast<int>(std::ceil(T / dt - 1e-9)));
    std::vector<double> t(n + 1);
    for (int k = 0; k <= n; ++k) t[k] = std::min(T, k * dt);
    t[n] = T;
    return t;
}

OutflowState make_outflow(const OutflowSpec& spec, int nx, const std::vector<double>& t) {
    if (spec.mode == OutflowSpec::Mode::constant) return constant_outflow(spec.U0, spec.B0, 0.0, nx, t);
    std::vector<double> U(nx), B(nx);
    const double dx = kTwoPi / nx;
    for (int i = 0; i < nx; ++i) {
        U[i] = spec.U0 + spec.dU * std::sin(i * dx);
        B[i] = spec.B0 + spec.dB * std::cos(i * dx);
    }
    return evolve_outflow(U, B, 0.0, t);
}

ProblemSetup gaussian_bump_setup(const Grid& g, double T, double dt, double amplitude, const OutflowSpec& out) {
    const auto t = time_grid(T, dt);
    ProblemSetup s;
    s.outflow = make_outflow(out, g.nx(), t);
    s.forcing = residual_forcing(s.outflow, g);
    s.b_init = Field(g);
    s.v_init = Field::from_function(
        g, [&](double x, double y) { return amplitude * std::sin(x) * y * y * y * std::exp(-y * y); });
    return s;
}

Field manufactured_b(const Grid& g, double t) {
    return Field::from_function(g, [&](double x, double y) { return std::exp(-t) * std::sin(x) * std::exp(-y * y); });
}

Field manufactured_v(const Grid& g, double t) {
    return Field::from_function(
        g, [&](double x, double y) { return std::exp(-t) * std::sin(x) * y * std::exp(-y * y); });
}

ProblemSetup manufactured_setup(const Grid& g, double T, double dt, double U0, double B0) {
    const auto t = time_grid(T, dt);
    ProblemSetup s;
    s.outflow = constant_outflow(U0, B0, 0.0, g.nx(), t);
    s.b_init = manufactured_b(g, 0.0);
    s.v_init = manufactured_v(g, 0.0);
    for (double tn : t) {
        const double E = std::exp(-tn);
        auto r1 = Field::from_function(g, [&](double x, double y) {
            const double S = std::sin(x), C = std::cos(x), G = std::exp(-y * y);
            const double b = E * S * G, bt = -b, bx = E * C * G;
            const double v = E * S * y * G, vx = E * C * y * G;
            const double a = v + U0 * cutoff(y, 0), c = b + B0;
            return bt + a * bx - c * vx;
        });
        auto r2 = Field::from_function(g, [&](double x, double y) {
            const double S = std::sin(x), C = std::cos(x), G = std::exp(-y * y);
            const double p = cutoff(y, 0), py = cutoff(y, 1), pyy = cutoff(y, 2);
            const double b = E * S * G, bx = E * C * G, by = -2.0 * y * b;
            const double v = E * S * y * G, vt = -v, vx = E * C * y * G;
            const double vy = E * S * (1.0 - 2.0 * y * y) * G, vyy = E * S * (4.0 * y * y * y - 6.0 * y) * G;
            const double a = v + U0 * p, c = b + B0;
            const double dq = by * vy + c * vyy + pyy * U0 * b + py * U0 * by;
            return vt - c * bx + a * vx - c * dq - pyy * U0 * B0 * b;
        });
        s.forcing.r1.push_back(std::move(r1));
        s.forcing.r2.push_back(std::move(r2));
    }
    return s;
}

HomogenizedState manufactured_state(const Grid& g, const OutflowState& outflow) {
    HomogenizedState s;
    s.grid = g;
    s.t_grid = outflow.t_grid;
    s.outflow = outflow;
    s.phi = make_cutoff(g);
    for (double t : outflow.t_grid) {
        s.b.push_back(manufactured_b(g, t));
        s.v.push_back(manufactured_v(g, t));
    }
    s.delta0 = s.min_b_plus_B();
    return s;
}

ProblemSetup random_admissible_setup(const Grid& g, double T, double dt, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    OutflowSpec spec;
    spec.mode = unit(rng) < 0.5 ? OutflowSpec::Mode::constant : OutflowSpec::Mode::evolved;
    spec.U0 = -0.5 + unit(rng);
    spec.B0 = 1.0 + unit(rng);
    spec.dU = 0.1 * unit(rng);
    spec.dB = 0.1 * unit(rng);
    const double ab = 0.4 * (spec.B0 - spec.dB) * unit(rng);
    const double av = 0.2 + 0.8 * unit(rng);
    const double th = kTwoPi * unit(rng), y0 = 1.0 + 2.0 * unit(rng);
    const int k = 1 + static_cast<int>(2.0 * unit(rng));
    const auto t = time_grid(T, dt);
    ProblemSetup s;
    s.outflow = make_outflow(spec, g.nx(), t);
    s.forcing = residual_forcing(s.outflow, g);
    s.b_init = Field::from_function(
        g, [&](double x, double y) { return ab * std::cos(k * x + th) * std::exp(-(y - y0) * (y - y0)); });
    s.v_init = Field::from_function(
        g, [&](double x, double y) { return av * std::sin(k * x + th) * y * y * y * std::exp(-y * y); });
    return s;
}

}  // namespace mhdbl
