#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "mhdbl/instability.hpp"

using namespace mhdbl;
namespace fs = std::filesystem;

namespace {

const cplx I{0.0, 1.0};

std::shared_ptr<const Eigenpair> shared_pair() {
    static auto p = std::make_shared<const Eigenpair>(solve_eigenpair(10.0, 4096));
    return p;
}

std::shared_ptr<const ShearProfile> shared_profile() {
    static auto p = instability_profile(InstabilityConfig{}, 0.35);
    return p;
}

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no exception";
    return ErrorKind::IoError;
}

// Plain RK4 for V''' = i((τ−z²)V' + 2zV).
Jet3 rk4(cplx tau, double z0, Jet3 y, double dz, int steps) {
    auto f = [&](double z, const Jet3& v) {
        return Jet3{v[1], v[2], I * ((tau - z * z) * v[1] + 2.0 * z * v[0])};
    };
    const double h = dz / steps;
    for (int s = 0; s < steps; ++s) {
        const double z = z0 + s * h;
        const auto k1 = f(z, y);
        Jet3 t;
        for (int i = 0; i < 3; ++i) t[i] = y[i] + 0.5 * h * k1[i];
        const auto k2 = f(z + 0.5 * h, t);
        for (int i = 0; i < 3; ++i) t[i] = y[i] + 0.5 * h * k2[i];
        const auto k3 = f(z + 0.5 * h, t);
        for (int i = 0; i < 3; ++i) t[i] = y[i] + h * k3[i];
        const auto k4 = f(z + h, t);
        for (int i = 0; i < 3; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return y;
}

ShearProfile still_profile(double B0, int ny, double y_max, double t_max) {
    ShearProfile p;
    p.bs = uniform_magnetic(B0);
    p.table = solve_heat_shear([](double) { return 0.0; }, 0.0, ny, y_max, t_max, 1e-3);
    return p;
}

}  // namespace

TEST(Eigenpair, ResidualBoundaryAndCrossCheck) {
    const auto& p = *shared_pair();
    EXPECT_LT(p.tau.imag(), 0.0);
    double wmax = 0.0;
    for (const auto& w : p.W) wmax = std::max(wmax, std::abs(w));
    EXPECT_LE(p.residual, 1e-8 * wmax);
    EXPECT_LE(std::abs(p.W.front()), 1e-6);
    EXPECT_LE(std::abs(p.W.back() - 1.0), 1e-6);
    EXPECT_LE(p.boundary_defect, 1e-6);
    EXPECT_TRUE(p.cross_validated);
    EXPECT_LE(std::abs(p.tau - p.tau_collocation), 1e-6);
    EXPECT_NEAR(eigen_residual(p), p.residual, 1e-15 + 1e-6 * p.residual);
}

TEST(Eigenpair, MatchingConditionsAtZero) {
    const auto& p = *shared_pair();
    const Jet3 R = p.profile(0.0), L = p.V_left0;
    // V_left − V_right = (τ, 0, −2) from removing the (τ − z²) step.
    EXPECT_NEAR(std::abs(L[0] - R[0] - p.tau), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(L[1] - R[1]), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(L[2] - R[2] + 2.0), 0.0, 1e-8);
}

TEST(Eigenpair, TaylorStepAgreesWithRungeKutta) {
    const cplx tau{-0.7, -0.7};
    const Jet3 y0{cplx(1.0, 0.5), cplx(-0.3, 0.2), cplx(0.1, -1.0)};
    for (double z0 : {-4.0, -0.5, 0.0, 2.5}) {
        const auto a = taylor_propagate(tau, z0, y0, 0.25);
        const auto b = rk4(tau, z0, y0, 0.25, 4000);
        for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(a[i] - b[i]), 1e-11) << "z0=" << z0 << " i=" << i;
    }
}

TEST(Eigenpair, StoredJetsSatisfyTheOde) {
    const auto& p = *shared_pair();
    const double h = p.z[1] - p.z[0];
    for (std::size_t j : {std::size_t(100), p.z.size() / 4, 3 * p.z.size() / 4}) {
        const auto nxt = rk4(p.tau, p.z[j], p.V[j], h, 64);
        for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(nxt[i] - p.V[j + 1][i]), 1e-10);
    }
}

TEST(Eigenpair, CollocationIndependentlyFindsTau) {
    const cplx t = collocation_tau(10.0, 120, cplx(-0.5, -0.9));
    EXPECT_LT(std::abs(t - shared_pair()->tau), 1e-6);
}

TEST(Eigenpair, RejectsBadParameters) {
    EXPECT_EQ(kind_of([] { solve_eigenpair(5.0, 4096); }), ErrorKind::BadParameters);
    EXPECT_EQ(kind_of([] { solve_eigenpair(10.0, 512); }), ErrorKind::BadParameters);
}

TEST(Eigenpair, CacheRoundTrip) {
    const auto dir = fs::temp_directory_path() / "mhdbl_eigen_cache_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto& p = *shared_pair();
    const auto path = eigen_cache_path(dir, p.Z, p.n_z);
    save_eigenpair(path, p);
    const auto q = load_eigenpair(path, p.Z, p.n_z);
    ASSERT_TRUE(q.has_value());
    EXPECT_EQ(q->tau, p.tau);
    EXPECT_EQ(q->tau_collocation, p.tau_collocation);
    ASSERT_EQ(q->W.size(), p.W.size());
    for (std::size_t j = 0; j < p.W.size(); ++j) {
        EXPECT_EQ(q->W[j], p.W[j]);
        EXPECT_EQ(q->V[j], p.V[j]);
    }
    EXPECT_EQ(q->V_left0, p.V_left0);
    EXPECT_FALSE(load_eigenpair(path, p.Z, 2048).has_value());
    EXPECT_FALSE(load_eigenpair(dir / "missing.bin", p.Z, p.n_z).has_value());
    fs::remove_all(dir);
}

TEST(GrowingMode, SupportAndWallRows) {
    const double eps = 1.0 / 32;
    const std::vector<double> ts{0.0, 0.1, 0.2};
    const auto m = build_growing_mode(shared_pair(), shared_profile(), eps, ts, 3.5);
    for (std::size_t n = 0; n < ts.size(); ++n) {
        EXPECT_EQ(m.U[n][0], cplx(0.0));
        EXPECT_EQ(m.V[n][0], cplx(0.0));
        EXPECT_EQ(m.B2[n][0], cplx(0.0));
        for (std::size_t j = 0; j < m.y.size(); ++j)
            if (m.y[j] < m.a[n] - 3.5) ASSERT_EQ(m.U[n][j], cplx(0.0)) << "y=" << m.y[j];
    }
}

TEST(GrowingMode, DivergenceFree) {
    const double eps = 1.0 / 32;
    const auto m = build_growing_mode(shared_pair(), shared_profile(), eps, {0.0, 0.15}, 3.5);
    const double h = m.y[1] - m.y[0];
    for (std::size_t n = 0; n < 2; ++n) {
        double vmax = 0.0, umax = 0.0, gap = 0.0, gap_fd = 0.0;
        for (std::size_t j = 0; j < m.y.size(); ++j) {
            vmax = std::max(vmax, std::abs(m.V[n][j]));
            umax = std::max(umax, std::abs(m.U[n][j]));
            gap = std::max(gap, std::abs(eps * m.V[n][j] - m.phase[n] * m.W[n][j]));
        }
        // ∂x u + ∂y v with ∂x = i/ε: fourth-order differences of V against −(i/ε)U.
        for (std::size_t j = 2; j + 2 < m.y.size(); ++j) {
            const cplx dv = (-m.V[n][j + 2] + 8.0 * m.V[n][j + 1] - 8.0 * m.V[n][j - 1] + m.V[n][j - 2]) / (12.0 * h);
            gap_fd = std::max(gap_fd, std::abs(I / eps * m.U[n][j] + dv));
        }
        EXPECT_LE(gap, 1e-12 * eps * vmax);
        EXPECT_LE(gap_fd, 1e-4 * umax / eps);
    }
}

TEST(GrowingMode, PhaseModulusIdentity) {
    std::vector<double> ts;
    for (int k = 0; k <= 20; ++k) ts.push_back(0.3 * k / 20);
    for (double eps : {1.0 / 16, 1.0 / 64}) {
        const auto m = build_growing_mode(shared_pair(), shared_profile(), eps, ts, 3.5);
        double trap = 0.0;
        for (std::size_t n = 0; n < ts.size(); ++n) {
            const double g = std::exp(m.growth_exponent[n]);
            EXPECT_NEAR(std::abs(m.phase[n]) / g, 1.0, 1e-10);
            if (n > 0) trap += 0.5 * (ts[n] - ts[n - 1]) * (m.sigma0[n] + m.sigma0[n - 1]);
            EXPECT_NEAR(m.growth_exponent[n], trap / std::sqrt(eps), 1e-3 * (1.0 + trap / std::sqrt(eps)));
        }
        EXPECT_NEAR(m.sigma0[0], -shared_pair()->tau.imag() * 2.0, 1e-3);
    }
}

TEST(GrowingMode, InitialNormStableAcrossEpsilon) {
    std::vector<double> c;
    for (double eps : {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128})
        c.push_back(build_growing_mode(shared_pair(), shared_profile(), eps, {0.0}, 3.5).norm(0));
    const double mean = (c[0] + c[1] + c[2] + c[3]) / 4;
    for (double v : c) EXPECT_NEAR(v / mean, 1.0, 0.2);
}

TEST(GrowingMode, Preconditions) {
    EXPECT_EQ(kind_of([] { build_growing_mode(shared_pair(), shared_profile(), 0.3, {0.0}, 3.5); }),
              ErrorKind::BadParameters);
    InstabilityConfig coarse;
    coarse.ny = 201;
    const auto prof = instability_profile(coarse, 0.1);
    EXPECT_EQ(kind_of([&] { build_growing_mode(shared_pair(), prof, 1.0 / 64, {0.0}, 3.5); }),
              ErrorKind::LayerUnderResolved);
}

TEST(Remainders, ZeroAmplitudeGivesZero) {
    const auto m = build_growing_mode(shared_pair(), shared_profile(), 1.0 / 32, {0.0, 0.1}, 3.5, 0.0);
    const auto r = evaluate_remainders(m);
    for (std::size_t n = 0; n < 2; ++n)
        for (std::size_t j = 0; j < m.y.size(); ++j) {
            ASSERT_EQ(r.R1[n][j], cplx(0.0));
            ASSERT_EQ(r.R2[n][j], cplx(0.0));
        }
    EXPECT_EQ(r.bound_check.c0, 0.0);
}

TEST(Remainders, ChainRuleMatchesFiniteDifferences) {
    // Interior times only: at t = 0 the one-sided difference sees the start-up of the heat table.
    const std::vector<double> ts{0.05, 0.1, 0.2};
    const auto m = build_growing_mode(shared_pair(), shared_profile(), 1.0 / 32, ts, 3.5);
    const auto a = evaluate_remainders(m);
    RemainderOptions fd;
    fd.fd_time = true;
    const auto b = evaluate_remainders(m, fd);
    for (std::size_t n = 0; n < ts.size(); ++n) {
        double scale = 0.0, gap1 = 0.0, gap2 = 0.0;
        for (std::size_t j = 0; j < m.y.size(); ++j) {
            scale = std::max(scale, std::abs(a.R1[n][j]) + std::abs(a.R2[n][j]));
            gap1 = std::max(gap1, std::abs(a.R1[n][j] - b.R1[n][j]));
            gap2 = std::max(gap2, std::abs(a.R2[n][j] - b.R2[n][j]));
        }
        EXPECT_LE(gap1, 1e-5 * scale) << "t=" << ts[n];
        EXPECT_LE(gap2, 1e-5 * scale) << "t=" << ts[n];
    }
}

TEST(Remainders, ExponentFitOnExactPowers) {
    std::vector<BoundCheck> cs;
    for (double e : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
        BoundCheck c;
        c.epsilon = e;
        c.c0 = 3.0 * std::pow(e, -0.25);
        c.c4 = 7.0 * std::pow(e, -1.25);
        cs.push_back(c);
    }
    const auto p = remainder_exponents(cs);
    EXPECT_NEAR(p.p_small_t, -0.25, 1e-12);
    EXPECT_NEAR(p.p_t4, -1.25, 1e-12);
    cs.resize(1);
    EXPECT_EQ(kind_of([&] { remainder_exponents(cs); }), ErrorKind::InsufficientData);
}

TEST(Remainders, EpsilonScalingOfTheBound) {
    InstabilityConfig cfg;
    cfg.B0 = 50.0;
    const auto prof = instability_profile(cfg, 0.55);
    std::vector<BoundCheck> cs;
    for (double e : {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}) {
        const double q = std::pow(e, 0.25);
        std::vector<double> ts;
        for (int s = 0; s < 9; ++s) ts.push_back(q * s / 8);
        cs.push_back(evaluate_remainders(build_growing_mode(shared_pair(), prof, e, ts, 3.5)).bound_check);
    }
    const auto p = remainder_exponents(cs);
    EXPECT_NEAR(p.p_small_t, -0.25, 0.10);
    EXPECT_NEAR(p.p_t4, -1.25, 0.15);
}

TEST(Evolve, ZeroDataStaysZero) {
    const auto prof = shared_profile();
    const std::vector<cplx> z(prof->table.y().size());
    const auto r = linearized_evolve(*prof, 8.0, z, z, 0.05, 0.002);
    for (double v : r.norm) EXPECT_EQ(v, 0.0);
    for (const auto& u : r.u)
        for (const auto& x : u) ASSERT_EQ(x, cplx(0.0));
}

TEST(Evolve, AlfvenEnergyNonIncreasing) {
    const auto prof = still_profile(0.8, 401, 8.0, 1.0);
    const auto& y = prof.table.y();
    std::vector<cplx> u(y.size()), b(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
        u[j] = std::sin(3.0 * y[j]) * std::exp(-0.3 * (y[j] - 3) * (y[j] - 3));
        b[j] = cplx(0.5, 0.2) * std::exp(-(y[j] - 4) * (y[j] - 4));
    }
    u.back() = 0.0;
    const auto r = linearized_evolve(prof, 4.0, u, b, 1.0, 1e-3);
    ASSERT_EQ(r.l2.size(), 1001u);
    for (std::size_t n = 1; n < r.l2.size(); ++n) ASSERT_LE(r.l2[n], r.l2[n - 1] * (1.0 + 1e-13)) << "step " << n;
    EXPECT_LT(r.l2.back(), r.l2.front());
}

TEST(Evolve, WallRowAndCfl) {
    const auto prof = shared_profile();
    const auto& y = prof->table.y();
    std::vector<cplx> u(y.size()), b(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) u[j] = y[j] * std::exp(-y[j]);
    const auto r = linearized_evolve(*prof, 16.0, u, b, 0.02, 0.001);
    for (const auto& s : r.u) EXPECT_EQ(s.front(), cplx(0.0));
    EXPECT_EQ(kind_of([&] { linearized_evolve(*prof, 16.0, u, b, 0.1, 0.05); }), ErrorKind::StepTooLarge);
}

TEST(GrowthFit, SyntheticExponential) {
    std::vector<NormSeries> ss;
    for (double e : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
        NormSeries s{e, {}, {}};
        const double q = std::pow(e, 0.25);
        for (int k = 0; k <= 100; ++k) {
            const double t = 0.6 * q * k / 100;
            s.t.push_back(t);
            s.norm.push_back(std::exp(5.0 * t / std::sqrt(e)));
        }
        ss.push_back(s);
    }
    const auto r = growth_rate_fit(ss);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.fitted_sigma[i] * std::sqrt(r.eps_list[i]), 5.0, 0.05);
    EXPECT_NEAR(r.scaling_slope, 1.0, 0.02);
    EXPECT_GE(r.r_squared, 0.0);
    EXPECT_LE(r.r_squared, 1.0);
    ss.pop_back();
    EXPECT_EQ(kind_of([&] { growth_rate_fit(ss); }), ErrorKind::InsufficientData);
}

TEST(GrowthFit, Verdicts) {
    EXPECT_EQ(growth_verdict(1.0), "unstable");
    EXPECT_EQ(growth_verdict(0.8), "unstable");
    EXPECT_EQ(growth_verdict(0.3), "stable");
    EXPECT_EQ(growth_verdict(-0.1), "stable");
    EXPECT_EQ(growth_verdict(0.5), "inconclusive");
}

TEST(Experiment, DegenerateAgainstControl) {
    InstabilityConfig deg;
    const auto r = illposedness_experiment(deg, shared_pair());
    EXPECT_EQ(r.verdict, "unstable");
    EXPECT_GE(r.report.scaling_slope, 0.8);
    EXPECT_LE(r.report.scaling_slope, 1.2);
    EXPECT_GE(r.report.r_squared, 0.99);
    for (const auto& run : r.runs)
        for (std::size_t n = 0; n < run.evolved.t.size(); ++n) {
            const double ratio = run.evolved.norm[n] / run.mode_norm[n];
            ASSERT_LE(ratio, 3.0);
            ASSERT_GE(ratio, 1.0 / 3.0);
        }

    InstabilityConfig ctl;
    ctl.magnetic = MagneticProfile::Kind::uniform;
    ctl.B0 = 0.5;
    const auto c = illposedness_experiment(ctl, shared_pair());
    EXPECT_EQ(c.verdict, "stable");
    EXPECT_LE(c.report.scaling_slope, 0.3);
    const auto [lo, hi] = std::minmax_element(c.report.fitted_sigma.begin(), c.report.fitted_sigma.end());
    EXPECT_GT(*lo, 0.0);
    EXPECT_LE(*hi / *lo, 2.0);
    EXPECT_GE(r.report.scaling_slope - c.report.scaling_slope, 0.5);
}

TEST(Experiment, EmptyEpsilonList) {
    InstabilityConfig cfg;
    cfg.eps_list.clear();
    EXPECT_EQ(kind_of([&] { illposedness_experiment(cfg, shared_pair()); }), ErrorKind::InsufficientData);
    cfg.eps_list = {1.0 / 16, 0.3, 1.0 / 64};
    EXPECT_EQ(kind_of([&] { illposedness_experiment(cfg, shared_pair()); }), ErrorKind::BadParameters);
}
