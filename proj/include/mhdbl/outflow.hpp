#pragma once

#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace mhdbl {

/// Outer trace (U, B, p)(t, x) on a periodic x grid of nx uniform nodes on
/// [0, 2π). Rows are time samples.
struct OutflowState {
    std::vector<double> t_grid;
    int nx = 0;
    std::vector<std::vector<double>> U, B, p;
    /// Declared bound on the trace and its first x-derivatives.
    double M_bound = 0.0;

    std::size_t nt() const { return t_grid.size(); }
    double dx() const;
    /// Throws ShapeMismatch unless every row has nx samples and U, B, p share t_grid.
    void check_shape() const;
};

/// Pressure gradient ∂xp(t, x); must have zero x-mean for a periodic p.
using PressureGradient = std::function<double(double t, double x)>;

struct BernoulliResidual {
    double r_momentum = 0.0;
    double r_induction = 0.0;
};

/// Max over (t,x) of ∂tU + U∂xU + ∂xp − B∂xB and ∂tB + U∂xB − B∂xU.
BernoulliResidual bernoulli_residual(const OutflowState& s);

/// RK4 march of the Bernoulli system with ∂xp prescribed (zero when empty).
/// p = p_gauge + zero-mean x-antiderivative of ∂xp.
OutflowState evolve_outflow(std::span<const double> U0, std::span<const double> B0, double p_gauge,
                            std::span<const double> t_grid, const PressureGradient& px = {},
                            double cfl = 0.4);

/// Spatially constant trace on t_grid.
OutflowState constant_outflow(double U0, double B0, double p0, int nx, std::span<const double> t_grid);

/// Trace quantities needed by the solvers at time sample n.
struct OutflowSlice {
    std::vector<double> U, B, Ux, Bx, Ut;
};
OutflowSlice outflow_slice(const OutflowState& s, std::size_t n);

void to_json(nlohmann::json& j, const OutflowState& s);
void from_json(const nlohmann::json& j, OutflowState& s);

}  // namespace mhdbl
