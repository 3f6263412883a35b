#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "mhdbl/grid.hpp"
#include "mhdbl/numerics.hpp"
#include "mhdbl/outflow.hpp"

using namespace mhdbl;

namespace {

std::vector<double> profile(int nx, double (*f)(double)) {
    std::vector<double> v(nx);
    for (int i = 0; i < nx; ++i) v[i] = f(kTwoPi * i / nx);
    return v;
}

}  // namespace

TEST(Outflow, ConstantsPreservedExactly) {
    const auto t = num::linspace(0.0, 1.0, 11);
    std::vector<double> U(32, 0.7), B(32, -1.3);
    auto s = evolve_outflow(U, B, 2.0, t);
    for (std::size_t n = 0; n < s.nt(); ++n)
        for (int i = 0; i < 32; ++i) {
            EXPECT_EQ(s.U[n][i], 0.7);
            EXPECT_EQ(s.B[n][i], -1.3);
            EXPECT_EQ(s.p[n][i], 2.0);
        }
    auto r = bernoulli_residual(s);
    EXPECT_EQ(r.r_momentum, 0.0);
    EXPECT_EQ(r.r_induction, 0.0);
}

TEST(Outflow, SymmetricTraceIsSteady) {
    const auto t = num::linspace(0.0, 1.0, 21);
    auto U = profile(64, [](double x) { return std::sin(x); });
    auto s = evolve_outflow(U, U, 0.0, t);
    for (std::size_t n = 0; n < s.nt(); ++n) EXPECT_EQ(s.U[n], U);
    auto r = bernoulli_residual(s);
    EXPECT_LE(r.r_momentum, 1e-8);
    EXPECT_LE(r.r_induction, 1e-8);
}

TEST(Outflow, BurgersTraceStepHalving) {
    const auto t = num::linspace(0.0, 0.5, 6);
    auto U = profile(128, [](double x) { return std::sin(x); });
    std::vector<double> B(128, 0.0);
    auto a = evolve_outflow(U, B, 0.0, t, {}, 0.4);
    auto b = evolve_outflow(U, B, 0.0, t, {}, 0.2);
    double err = 0;
    for (std::size_t n = 0; n < t.size(); ++n)
        for (int i = 0; i < 128; ++i) err = std::max(err, std::abs(a.U[n][i] - b.U[n][i]));
    EXPECT_LE(err, 1e-5);
}

TEST(Outflow, ManufacturedResidualWithQuadraturePressure) {
    const int nx = 256, nt = 200;
    const auto t = num::linspace(0.0, 1.0, nt);
    OutflowState s;
    s.nx = nx;
    s.t_grid = t;
    for (double tt : t) {
        std::vector<double> U(nx), B(nx, 0.0), p(nx);
        // ∂xp = −∂tU − U∂xU = −sin(x−t) + cos(x−t)sin(x−t); antiderivative by fine quadrature.
        for (int i = 0; i < nx; ++i) {
            const double x = kTwoPi * i / nx;
            U[i] = std::cos(x - tt);
            const int q = 400;
            double acc = 0.0;
            for (int k = 0; k < q; ++k) {
                const double xa = x * k / q, xb = x * (k + 1) / q, xm = 0.5 * (xa + xb);
                auto g = [&](double z) { return -std::sin(z - tt) + std::cos(z - tt) * std::sin(z - tt); };
                acc += (xb - xa) / 6.0 * (g(xa) + 4 * g(xm) + g(xb));
            }
            p[i] = acc;
        }
        s.U.push_back(U);
        s.B.push_back(B);
        s.p.push_back(p);
    }
    auto r = bernoulli_residual(s);
    EXPECT_LE(r.r_momentum, 1e-3);
    EXPECT_LE(r.r_induction, 1e-12);
}

TEST(Outflow, ResidualSmallUnderRefinement) {
    auto U = profile(64, [](double x) { return 0.5 * std::sin(x); });
    auto B = profile(64, [](double x) { return 0.3 * std::cos(x); });
    double prev = 0;
    for (int nt : {126, 251, 501}) {
        auto s = evolve_outflow(U, B, 0.0, num::linspace(0.0, 0.5, nt));
        auto r = bernoulli_residual(s);
        const double res = std::max(r.r_momentum, r.r_induction);
        if (prev > 0) EXPECT_GE(prev / res, 3.5);
        prev = res;
    }
    EXPECT_LE(prev, 1e-6 * (1 + 0.5 + 0.3));
}

TEST(Outflow, ShiftEquivariance) {
    const int nx = 48, shift = 7;
    auto U = profile(nx, [](double x) { return 0.4 * std::sin(x) + 0.1 * std::cos(2 * x); });
    auto B = profile(nx, [](double x) { return 1.0 + 0.2 * std::cos(x); });
    std::vector<double> Us(nx), Bs(nx);
    for (int i = 0; i < nx; ++i) Us[i] = U[(i + shift) % nx], Bs[i] = B[(i + shift) % nx];
    const auto t = num::linspace(0.0, 0.3, 4);
    auto a = evolve_outflow(U, B, 0.0, t), b = evolve_outflow(Us, Bs, 0.0, t);
    for (std::size_t n = 0; n < t.size(); ++n)
        for (int i = 0; i < nx; ++i) {
            EXPECT_NEAR(b.U[n][i], a.U[n][(i + shift) % nx], 1e-13);
            EXPECT_NEAR(b.B[n][i], a.B[n][(i + shift) % nx], 1e-13);
        }
}

TEST(Outflow, PressureGradientDrivesFlowAndBlowupIsReported) {
    std::vector<double> z(32, 0.0);
    const auto t = num::linspace(0.0, 0.1, 3);
    auto s = evolve_outflow(z, z, 0.0, t, [](double, double x) { return std::sin(x); });
    EXPECT_LT(s.U[2][8], 0.0);  // x = π/2: −∂xp < 0
    try {
        evolve_outflow(z, z, 0.0, num::linspace(0.0, 1.0, 3), [](double, double x) { return 1e9 * std::sin(x); });
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OutflowBlowup);
    }
    EXPECT_THROW(evolve_outflow(z, z, 0.0, t, [](double, double) { return 1.0; }), Error);
}

TEST(Outflow, JsonRoundTrip) {
    auto U = profile(8, [](double x) { return std::sin(x); });
    auto s = evolve_outflow(U, U, 1.0, num::linspace(0.0, 0.2, 3));
    nlohmann::json j = s;
    auto back = j.get<OutflowState>();
    EXPECT_EQ(back.U, s.U);
    EXPECT_EQ(back.p, s.p);
    EXPECT_EQ(back.t_grid, s.t_grid);
    EXPECT_THROW(bernoulli_residual(OutflowState{{0.0, 1.0, 2.0}, 4, {{1, 1, 1, 1}}, {}, {}, 0.0}), Error);
}
