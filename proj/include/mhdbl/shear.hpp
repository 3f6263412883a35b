#pragma once

#include <array>
#include <functional>
#include <vector>

namespace mhdbl {

/// Value and y-derivatives 0..4 at one point.
using Taylor4 = std::array<double, 5>;

/// Closed-form initial velocity profiles U_s(y) with analytic derivatives.
///  - bump: U0(1 − e^{−y}) + A (y/a)² e^{−(y−a)²/w²}, (A, w) solved.
///  - jet:  U0(1 − e^{−y}) + A (y/a)² e^{−(y−c)²/w²}, (A, c) solved, w given.
///  - erf:  U0 erf(y/2) (no interior critical point).
struct VelocityProfile {
    enum class Family { bump, jet, erf };
    Family family = Family::bump;
    double U0 = 1.0;
    double a = 0.0;          // critical point
    double curvature = 0.0;  // U_s''(a)
    double A = 0.0, w = 1.0, c = 0.0;

    Taylor4 eval(double y) const;
    double operator()(double y) const { return eval(y)[0]; }
};

/// Bump family with U_s'(a) = 0 and U_s''(a) = curvature.
VelocityProfile build_velocity_profile(double U0, double a, double curvature);
/// Jet family with the same constraints at fixed width w (center solved).
VelocityProfile build_jet_profile(double U0, double a, double curvature, double w);
VelocityProfile erf_profile(double U0);

/// Magnetic profiles b_s(y).
///  - uniform: b_s ≡ B0
///  - nondegenerate: B0(1 − (1 − δ0/B0) e^{−y})
///  - degenerate: B0(1 − e^{−(y−a)²/w²})
struct MagneticProfile {
    enum class Kind { uniform, nondegenerate, degenerate };
    Kind kind = Kind::uniform;
    double B0 = 1.0;
    double delta0 = 0.0;
    double a = 0.0, w = 1.0;

    Taylor4 eval(double y) const;
    double operator()(double y) const { return eval(y)[0]; }
    bool degenerate() const { return kind == Kind::degenerate; }
};

MagneticProfile uniform_magnetic(double B0);
MagneticProfile nondegenerate_magnetic(double B0, double delta0);
MagneticProfile degenerate_magnetic(double B0, double a, double w);

/// Tabulated solution of ∂t u = ∂y² u on a uniform y grid with u(t,0) = 0,
/// u(t, y_max) = U0, and its y-derivatives 1..4.
class ShearTable {
public:
    ShearTable() = default;
    ShearTable(std::vector<double> t, std::vector<double> y, std::vector<std::array<std::vector<double>, 5>> levels,
               double U0);

    const std::vector<double>& t() const { return t_; }
    const std::vector<double>& y() const { return y_; }
    double U0() const { return U0_; }
    double t_max() const { return t_.back(); }
    /// Level n, derivative order k (0..4), as a y-array.
    const std::vector<double>& level(std::size_t n, int k) const { return lv_[n][k]; }

    /// ∂y^k u_s(t, y) by cubic interpolation in y then in t.
    double eval(int k, double t, double y) const;
    /// ∂t of the interpolated ∂y^k u_s.
    double eval_t(int k, double t, double y) const;
    /// ∂y of the interpolated ∂y^k u_s (derivative of the y-interpolant).
    double eval_y(int k, double t, double y) const;
    /// Whole y-column of ∂y^k u_s at time t (cubic in t).
    std::vector<double> column(int k, double t) const;

private:
    std::vector<double> t_, y_;
    std::vector<std::array<std::vector<double>, 5>> lv_;
    double U0_ = 0.0;
};

/// Crank–Nicolson march with a few backward-Euler half steps at the start.
ShearTable solve_heat_shear(const std::function<double(double)>& Us, double U0, int ny, double y_max,
                            double t_max, double dt, int rannacher_steps = 4);

/// Critical-point curve a(t) with a' = −∂t∂y u_s/∂y² u_s along it.
struct CriticalCurve {
    std::vector<double> t, a, u_at_a, uyy_at_a, da_dt;
    double max_uy_residual = 0.0;  // max |∂y u_s(t, a(t))|

    struct Sample {
        double a, u, uyy, da;
    };
    /// Cubic interpolation of the samples.
    Sample at(double t) const;
};

CriticalCurve critical_curve(const ShearTable& us, double a0, double t_max);

/// Background shear state used by the instability construction.
struct ShearProfile {
    VelocityProfile Us;
    MagneticProfile bs;
    ShearTable table;
    CriticalCurve curve;
    double a0 = 0.0;
};

}  // namespace mhdbl
