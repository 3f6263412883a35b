#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mhdbl/error.hpp"
#include "mhdbl/shear.hpp"

using namespace mhdbl;

namespace {

double final_diff(const ShearTable& coarse, const ShearTable& fine, int stride) {
    const std::size_t nc = coarse.t().size() - 1, nf = fine.t().size() - 1;
    double e = 0.0;
    for (std::size_t j = 0; j < coarse.y().size(); ++j)
        e = std::max(e, std::abs(coarse.level(nc, 0)[j] - fine.level(nf, 0)[stride * j]));
    return e;
}

}  // namespace

TEST(VelocityProfile, BumpMeetsConstraints) {
    auto p = build_velocity_profile(3.0, 2.0, -0.5);
    const auto d = p.eval(2.0);
    EXPECT_LE(std::abs(d[1]), 1e-10);
    EXPECT_NEAR(d[2], -0.5, 1e-8);
    EXPECT_EQ(p.eval(0.0)[0], 0.0);
    EXPECT_NEAR(p(40.0), 3.0, 1e-12);
}

TEST(VelocityProfile, BumpMatchesClosedForm) {
    // With the bump centred at a the constraints decouple:
    // A = −U0 a e^{−a}/2 and w² = U0 a e^{−a}/(curv + U0 e^{−a}(1 + 1/a)).
    const double U0 = 3.0, a = 2.0, curv = -0.5;
    auto p = build_velocity_profile(U0, a, curv);
    EXPECT_NEAR(p.A, -U0 * a * std::exp(-a) / 2, 1e-12);
    const double w2 = U0 * a * std::exp(-a) / (curv + U0 * std::exp(-a) * (1 + 1 / a));
    EXPECT_NEAR(p.w, std::sqrt(w2), 1e-9);
}

TEST(VelocityProfile, AnalyticDerivativesMatchDifferences) {
    const VelocityProfile ps[] = {build_velocity_profile(3.0, 2.0, -0.5), build_jet_profile(1.0, 5.0, -8.0, 2.5),
                                  erf_profile(2.0)};
    const double h = 1e-3;
    for (const auto& p : ps) {
        for (double y : {0.3, 1.7, 4.2, 6.0}) {
            const auto d = p.eval(y);
            for (int k = 1; k <= 4; ++k) {
                const double fd = (p.eval(y + h)[k - 1] - p.eval(y - h)[k - 1]) / (2 * h);
                EXPECT_NEAR(d[k], fd, 1e-5 * std::max(1.0, std::abs(d[k]))) << "k=" << k << " y=" << y;
            }
        }
    }
}

TEST(VelocityProfile, JetMeetsConstraints) {
    auto p = build_jet_profile(1.0, 5.0, -8.0, 2.5);
    const auto d = p.eval(5.0);
    EXPECT_LE(std::abs(d[1]), 1e-10);
    EXPECT_NEAR(d[2], -8.0, 1e-8);
    EXPECT_EQ(p(0.0), 0.0);
}

TEST(VelocityProfile, Rejections) {
    EXPECT_THROW(build_velocity_profile(3.0, 2.0, -1e-4), Error);
    EXPECT_THROW(build_velocity_profile(3.0, 0.5, -0.5), Error);
    // Below the bump family's reachable curvature.
    EXPECT_THROW(build_velocity_profile(1.0, 2.0, -0.5), Error);
    try {
        build_velocity_profile(3.0, 2.0, -5e-4);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ProfileConstructionFailed);
    }
}

TEST(MagneticProfile, DegenerateNotch) {
    auto b = degenerate_magnetic(1.5, 2.0, 1.0);
    const auto d = b.eval(2.0);
    EXPECT_EQ(d[0], 0.0);
    EXPECT_EQ(d[1], 0.0);
    EXPECT_NEAR(d[2], 2 * 1.5 / 1.0, 1e-14);
    for (double y = 6.0; y <= 30.0; y += 0.25) EXPECT_LE(std::exp(y) * std::abs(b(y) - 1.5), 1e-4);
}

TEST(MagneticProfile, Nondegenerate) {
    auto b = nondegenerate_magnetic(1.0, 0.5);
    EXPECT_DOUBLE_EQ(b(0.0), 0.5);
    for (double y = 0.0; y < 20.0; y += 0.1) EXPECT_GE(b(y), 0.5);
    EXPECT_THROW(nondegenerate_magnetic(1.0, 1.0), Error);
    EXPECT_THROW(uniform_magnetic(0.0), Error);
    EXPECT_EQ(uniform_magnetic(0.5)(3.0), 0.5);
}

TEST(HeatShear, ErfSelfSimilar) {
    auto tab = solve_heat_shear([](double y) { return std::erf(y / 2); }, 1.0, 512, 10.0, 1.0, 1e-3);
    double err = 0.0;
    for (std::size_t n = 0; n < tab.t().size(); ++n) {
        const double t = tab.t()[n];
        for (std::size_t j = 0; j < tab.y().size(); ++j)
            err = std::max(err, std::abs(tab.level(n, 0)[j] - std::erf(tab.y()[j] / (2 * std::sqrt(1 + t)))));
    }
    EXPECT_LE(err, 1e-5);
}

TEST(HeatShear, ZeroStaysZero) {
    auto tab = solve_heat_shear([](double) { return 0.0; }, 0.0, 64, 8.0, 0.5, 1e-2);
    for (std::size_t n = 0; n < tab.t().size(); ++n)
        for (int k = 0; k <= 4; ++k)
            for (double v : tab.level(n, k)) EXPECT_EQ(v, 0.0);
}

TEST(HeatShear, IncompatibleBoundaryData) {
    EXPECT_THROW(solve_heat_shear([](double y) { return 1.0 + y * 0; }, 1.0, 64, 8.0, 0.1, 1e-2), Error);
    EXPECT_THROW(solve_heat_shear([](double y) { return 1.0 - std::exp(-y); }, 2.0, 64, 8.0, 0.1, 1e-2), Error);
}

TEST(HeatShear, StepHalvingBump) {
    auto p = build_velocity_profile(3.0, 2.0, -0.5);
    // Runs at (h, k), (h/2, k/2), (h/4, k/4); second-order error constants give
    // a halving ratio near 4, and the Richardson values of successive pairs agree.
    const double T = 0.05;
    auto r0 = solve_heat_shear(p, 3.0, 513, 16.0, T, 1e-3);
    auto r1 = solve_heat_shear(p, 3.0, 1025, 16.0, T, 5e-4);
    auto r2 = solve_heat_shear(p, 3.0, 2049, 16.0, T, 2.5e-4);
    const double d01 = final_diff(r0, r1, 2), d12 = final_diff(r1, r2, 2);
    EXPECT_GT(d01 / d12, 3.5);
    EXPECT_LT(d01 / d12, 4.5);
    double rich = 0.0;
    const std::size_t n0 = r0.t().size() - 1, n1 = r1.t().size() - 1, n2 = r2.t().size() - 1;
    for (std::size_t j = 0; j < r0.y().size(); ++j) {
        const double e0 = (4 * r1.level(n1, 0)[2 * j] - r0.level(n0, 0)[j]) / 3;
        const double e1 = (4 * r2.level(n2, 0)[4 * j] - r1.level(n1, 0)[2 * j]) / 3;
        rich = std::max(rich, std::abs(e0 - e1));
    }
    EXPECT_LE(rich, 1e-6);
}

TEST(HeatShear, MaximumPrinciple) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(1.5, 4.0), uc(-0.4, -0.05);
    for (int trial = 0; trial < 5; ++trial) {
        const double a = ua(rng);
        VelocityProfile p;
        try {
            p = build_velocity_profile(3.0, a, std::max(uc(rng), -0.9 * 3.0 * std::exp(-a) * (1 + 1 / a)));
        } catch (const Error&) {
            continue;
        }
        auto tab = solve_heat_shear(p, 3.0, 751, 30.0, 0.5, 2e-3);
        double lo = 1e300, hi = -1e300;
        for (double v : tab.level(0, 0)) lo = std::min(lo, v), hi = std::max(hi, v);
        for (std::size_t n = 0; n < tab.t().size(); ++n)
            for (double v : tab.level(n, 0)) {
                EXPECT_GE(v, lo - 1e-12);
                EXPECT_LE(v, hi + 1e-12);
            }
    }
}

TEST(HeatShear, InterpolationReproducesNodes) {
    auto tab = solve_heat_shear([](double y) { return std::erf(y / 2); }, 1.0, 128, 10.0, 0.2, 1e-2);
    const std::size_t n = 7;
    const double t = tab.t()[n];
    for (std::size_t j = 0; j < tab.y().size(); j += 13) EXPECT_NEAR(tab.eval(1, t, tab.y()[j]), tab.level(n, 1)[j], 1e-13);
    const auto col = tab.column(2, t);
    for (std::size_t j = 0; j < col.size(); ++j) EXPECT_NEAR(col[j], tab.level(n, 2)[j], 1e-12);
}

TEST(CriticalCurve, SteadyShearKeepsPoint) {
    auto p = build_velocity_profile(3.0, 2.0, -0.5);
    std::vector<double> y(401), t{0.0, 0.1, 0.2, 0.3, 0.4};
    for (int j = 0; j < 401; ++j) y[j] = 12.0 * j / 400;
    std::array<std::vector<double>, 5> lv;
    for (int k = 0; k <= 4; ++k) {
        lv[k].resize(y.size());
        for (std::size_t j = 0; j < y.size(); ++j) lv[k][j] = p.eval(y[j])[k];
    }
    ShearTable tab(t, y, std::vector<std::array<std::vector<double>, 5>>(t.size(), lv), 3.0);
    auto c = critical_curve(tab, 2.0, 0.4);
    for (double a : c.a) EXPECT_NEAR(a, c.a.front(), 1e-12);
    EXPECT_NEAR(c.a.front(), 2.0, 1e-6);
}

TEST(CriticalCurve, ErfHasNoCriticalPoint) {
    auto tab = solve_heat_shear([](double y) { return std::erf(y / 2); }, 1.0, 256, 12.0, 0.1, 1e-2);
    try {
        critical_curve(tab, 2.0, 0.1);
        FAIL() << "expected rejection";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BadParameters);
    }
}

TEST(CriticalCurve, BumpTracksRoot) {
    auto p = build_velocity_profile(3.0, 2.0, -0.5);
    auto tab = solve_heat_shear(p, 3.0, 513, 16.0, 0.05, 1e-3);
    auto c = critical_curve(tab, 2.0, 0.05);
    // Independent check: bisection root of the interpolated ∂y u_s at each sample.
    for (std::size_t n = 0; n < c.t.size(); ++n) {
        EXPECT_LE(std::abs(tab.eval(1, c.t[n], c.a[n])), 1e-6);
        double lo = c.a[n] - 0.2, hi = c.a[n] + 0.2;
        const double flo = tab.eval(1, c.t[n], lo);
        for (int it = 0; it < 80; ++it) {
            const double m = 0.5 * (lo + hi);
            ((tab.eval(1, c.t[n], m) > 0) == (flo > 0) ? lo : hi) = m;
        }
        EXPECT_NEAR(c.a[n], 0.5 * (lo + hi), 1e-6);
    }
    EXPECT_LE(c.max_uy_residual, 1e-6);
    EXPECT_GT(c.a.back(), c.a.front());
}

TEST(CriticalCurve, LostWhenCurvatureVanishes) {
    std::vector<double> y(201), t{0.0, 0.05, 0.1, 0.15};
    for (int j = 0; j < 201; ++j) y[j] = 6.0 * j / 200;
    std::vector<std::array<std::vector<double>, 5>> lv(t.size());
    for (std::size_t n = 0; n < t.size(); ++n) {
        // ∂y u = (y − 3)³ + t: a double root at t = 0 moves away with zero curvature at the start.
        for (int k = 0; k <= 4; ++k) lv[n][k].assign(y.size(), 0.0);
        for (std::size_t j = 0; j < y.size(); ++j) {
            const double s = y[j] - 3.0;
            lv[n][1][j] = s * s * s + 1e-6 * t[n];
            lv[n][2][j] = 3 * s * s;
        }
    }
    ShearTable tab(t, y, lv, 1.0);
    try {
        critical_curve(tab, 3.0, 0.15);
        FAIL() << "expected CriticalCurveLost";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CriticalCurveLost);
    }
}
