#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mhdbl/instability.hpp"

namespace mhdbl {
namespace {

const cplx I{0.0, 1.0};

// Unknowns interleaved per node: 4j + {0: û, 1: b̂1, 2: v̂, 3: b̂2}.
constexpr int kKL = 6, kKU = 4, kLDAB = 2 * kKL + kKU + 1;

struct Band {
    int n;
    std::vector<cplx> ab;
    explicit Band(int n_) : n(n_), ab(static_cast<std::size_t>(kLDAB) * n_, cplx{}) {}
    void set(int i, int j, cplx v) { ab[static_cast<std::size_t>(kKL + kKU + i - j) + static_cast<std::size_t>(j) * kLDAB] = v; }
};

}  // namespace

EvolveResult linearized_evolve(const ShearProfile& profile, double k, const std::vector<cplx>& u0,
                               const std::vector<cplx>& b0, double T, double dt, const EvolveOptions& opt) {
    const auto& tab = profile.table;
    const auto& y = tab.y();
    const int N = static_cast<int>(y.size());
    if (static_cast<int>(u0.size()) != N || static_cast<int>(b0.size()) != N)
        throw Error(ErrorKind::ShapeMismatch, "initial data must live on the profile's y grid");
    if (!(k > 0.0) || !(T > 0.0) || !(dt > 0.0)) throw Error(ErrorKind::BadParameters, "k, T and dt must be positive");
    if (T > tab.t_max() + 1e-12) throw Error(ErrorKind::BadParameters, "evolution beyond the tabulated shear");
    const int steps = std::max(1, static_cast<int>(std::ceil(T / dt - 1e-9)));
    const double h = y[1] - y[0], tau = T / steps;
    double us_max = std::abs(tab.U0());
    for (double v : tab.level(0, 0)) us_max = std::max(us_max, std::abs(v));
    if (k * tau * us_max > opt.cfl * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "k*dt*max|u_s| = " << k * tau * us_max << " exceeds " << opt.cfl;
        throw Error(ErrorKind::StepTooLarge, os.str());
    }
    std::vector<double> bs(N), bs1(N), wgt(N);
    for (int j = 0; j < N; ++j) {
        const auto b = profile.bs.eval(y[j]);
        bs[j] = b[0];
        bs1[j] = b[1];
        wgt[j] = std::exp(opt.alpha * y[j]);
    }
    std::vector<cplx> u = u0, b = b0, v(N), b2(N);
    u.front() = 0.0;
    u.back() = 0.0;
    auto integrate = [&](const std::vector<cplx>& f, std::vector<cplx>& out) {
        out[0] = 0.0;
        for (int j = 1; j < N; ++j) out[j] = out[j - 1] - I * k * 0.5 * h * (f[j] + f[j - 1]);
    };
    integrate(u, v);
    integrate(b, b2);

    EvolveResult r;
    auto record = [&](double t) {
        double sup = 0.0, l2 = 0.0;
        for (int j = 0; j < N; ++j) {
            const double e = std::norm(u[j]) + std::norm(b[j]);
            sup = std::max(sup, wgt[j] * std::sqrt(e));
            l2 += h * e;
        }
        r.t.push_back(t);
        r.norm.push_back(sup);
        r.l2.push_back(l2);
        if (opt.store_tables) {
            r.u.push_back(u);
            r.b1.push_back(b);
        }
    };
    record(0.0);

    const int n4 = 4 * N;
    std::vector<cplx> rhs(n4);
    std::vector<lapack_int> piv(n4);
    const double c = opt.frame_speed;
    for (int step = 0; step < steps; ++step) {
        const double tm = (step + 0.5) * tau;
        const auto us = tab.column(0, tm), us1 = tab.column(1, tm);
        Band A(n4);
        for (int j = 0; j < N; ++j) {
            const int iu = 4 * j, ib = iu + 1, iv = iu + 2, ic = iu + 3;
            const cplx adv = I * k * (us[j] - c);
            // û row
            if (j == 0 || j == N - 1) {
                A.set(iu, iu, 1.0);
                rhs[iu] = 0.0;
            } else {
                const cplx lap = (u[j + 1] - 2.0 * u[j] + u[j - 1]) / (h * h);
                const cplx F = -adv * u[j] - v[j] * us1[j] + lap + I * k * bs[j] * b[j] + b2[j] * bs1[j];
                A.set(iu, iu, 1.0 / tau + 0.5 * (adv + 2.0 / (h * h)));
                A.set(iu, iu - 4, -0.5 / (h * h));
                A.set(iu, iu + 4, -0.5 / (h * h));
                A.set(iu, iv, 0.5 * us1[j]);
                A.set(iu, ib, -0.5 * I * k * bs[j]);
                A.set(iu, ic, -0.5 * bs1[j]);
                rhs[iu] = u[j] / tau + 0.5 * F;
            }
            // b̂1 row
            {
                const cplx F = -adv * b[j] - v[j] * bs1[j] + I * k * bs[j] * u[j] + b2[j] * us1[j];
                A.set(ib, ib, 1.0 / tau + 0.5 * adv);
                A.set(ib, iv, 0.5 * bs1[j]);
                A.set(ib, iu, -0.5 * I * k * bs[j]);
                A.set(ib, ic, -0.5 * us1[j]);
                rhs[ib] = b[j] / tau + 0.5 * F;
            }
            // v̂ and b̂2 rows: trapezoid integrals from the wall.
            A.set(iv, iv, 1.0);
            A.set(ic, ic, 1.0);
            rhs[iv] = 0.0;
            rhs[ic] = 0.0;
            if (j > 0) {
                A.set(iv, iv - 4, -1.0);
                A.set(iv, iu, 0.5 * I * k * h);
                A.set(iv, iu - 4, 0.5 * I * k * h);
                A.set(ic, ic - 4, -1.0);
                A.set(ic, ib, 0.5 * I * k * h);
                A.set(ic, ib - 4, 0.5 * I * k * h);
            }
        }
        const lapack_int info = LAPACKE_zgbsv(LAPACK_COL_MAJOR, n4, kKL, kKU, 1, A.ab.data(), kLDAB, piv.data(),
                                              rhs.data(), n4);
        if (info != 0) throw Error(ErrorKind::NumericalBlowup, "singular Crank-Nicolson system");
        rhs[0] = rhs[4 * (N - 1)] = 0.0;  // Dirichlet rows, free of pivoting roundoff
        for (int j = 0; j < N; ++j) {
            u[j] = rhs[4 * j];
            b[j] = rhs[4 * j + 1];
            v[j] = rhs[4 * j + 2];
            b2[j] = rhs[4 * j + 3];
            if (!std::isfinite(u[j].real()) || !std::isfinite(u[j].imag()) || !std::isfinite(b[j].real()) ||
                !std::isfinite(b[j].imag()))
                throw LocatedError(ErrorKind::NumericalBlowup, "non-finite amplitude", (step + 1) * tau, 0.0, y[j]);
        }
        record((step + 1) * tau);
    }
    return r;
}

}  // namespace mhdbl
