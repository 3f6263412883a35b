#pragma once

#include <functional>
#include <vector>

#include "mhdbl/grid.hpp"
#include "mhdbl/outflow.hpp"

namespace mhdbl {

/// Smooth monotone cutoff: 0 on [0,1], 1 on [2,∞). deriv = 0, 1, 2.
double cutoff(double y, int deriv = 0);

/// Cutoff and its first two derivatives at the y nodes.
struct Cutoff {
    std::vector<double> phi, phi_y, phi_yy;
};
Cutoff make_cutoff(const Grid& g);

/// Homogenized unknowns b = b1 − B and v = u − Uφ on the outflow's time grid.
struct HomogenizedState {
    Grid grid;
    std::vector<double> t_grid;
    std::vector<Field> b, v;
    OutflowState outflow;
    double delta0 = 0.0;
    Cutoff phi;

    std::size_t nt() const { return t_grid.size(); }
    /// min over space-time of b + B.
    double min_b_plus_B() const;
};

/// Right-hand sides of the homogenized system, one Field per time sample.
struct Forcing {
    std::vector<Field> r1, r2;
    /// ‖(r1, r2)‖ / M³ with M the outflow bound (0 when M = 0).
    double bound_ratio = 0.0;
};

/// r1 = (1−φ)(U B_x − B U_x), r2 = (1−φ)U_t + (1−φ²)U U_x + φ_yy U B².
Forcing residual_forcing(const OutflowState& outflow, const Grid& g);

/// Nonlinear right-hand side: (∂t b, ∂t v) = rhs(b, v) at outflow sample n
/// with forcing sample n: centered x-differences, the march's y-operators.
struct StateDerivative {
    Field b, v;
};
StateDerivative nonlinear_rhs(const Field& b, const Field& v, const OutflowState& outflow,
                              const Forcing& forcing, std::size_t n);

/// (∂t^j b, ∂t^j v)(0) for j = 0..J, J ≤ 2, by differentiating the equations.
std::vector<StateDerivative> initial_time_derivatives(const Field& b0, const Field& v0,
                                                      const OutflowState& outflow, const Forcing& forcing,
                                                      int J);

/// Taylor polynomial Σ t^j/j! (b0^j, v0^j) on the outflow time grid.
HomogenizedState zeroth_iterate(const std::vector<StateDerivative>& derivs, const OutflowState& outflow,
                                double delta0);

struct MarchOptions {
    /// Lower bound enforced at every step (LowerBoundLost below it); ≤ 0 disables.
    double lower_bound = 0.0;
    /// Advective CFL limit on dt·max(|v+Uφ| + |b+B|)/Δx.
    double cfl = 0.5;
};

/// One Picard step: solves the linear system with coefficients frozen at prev,
/// starting from prev's initial data. Upwinded x-transport on v ± b, explicit
/// lower-order couplings, implicit y-diffusion (one tridiagonal solve per column).
HomogenizedState linear_march(const HomogenizedState& prev, const Forcing& forcing, const MarchOptions& opt = {});

/// Same scheme with coefficients taken from the running solution one step back.
HomogenizedState direct_march(const Field& b_init, const Field& v_init, const OutflowState& outflow,
                              const Forcing& forcing, double delta0, const MarchOptions& opt = {});

struct IterationReport {
    int iterate_index = 0;
    double sup_Hm = 0.0;
    double l2_diff = 0.0;
    double contraction_ratio = 0.0;  // 0 when undefined
    double min_b_plus_B = 0.0;
};

struct PicardOptions {
    double tol = 1e-8;
    int max_iter = 30;
    int m_monitor = 2;
    int J = 1;
    /// Admissibility threshold δ₀; ≤ 0 means min(b_init + B(0,·)).
    double delta0 = 0.0;
    /// Throw NoContraction when max_iter is reached without meeting tol.
    bool require_convergence = true;
    double cfl = 0.5;
};

struct PicardResult {
    HomogenizedState state;
    std::vector<IterationReport> reports;
    bool converged = false;
};

PicardResult picard_solve(const Field& b_init, const Field& v_init, const OutflowState& outflow,
                          const Forcing& forcing, const PicardOptions& opt = {});

/// sup over time of the L² distance between two states (b and v combined).
double sup_l2_distance(const HomogenizedState& a, const HomogenizedState& b);

struct InvariantReport {
    double min_b_plus_B = 0.0;
    std::vector<double> energy;       // ‖b‖² + ‖v‖² per time sample
    std::vector<double> dissipation;  // ‖∂y v‖² per time sample
    /// Smallest K with E(t_{k+1}) ≤ e^{K Δt} E(t_k) at every step.
    double gronwall_K = 0.0;
};
InvariantReport monitor_invariants(const HomogenizedState& s);

/// Everything picard_solve needs for a horizon T.
struct ProblemSetup {
    Field b_init, v_init;
    OutflowState outflow;
    Forcing forcing;
};
using SetupBuilder = std::function<ProblemSetup(double T)>;

struct ContractionSearch {
    bool found = false;
    double T = 0.0;
    int halvings = 0;
    PicardResult result;
    /// Ratios of consecutive l2_diff values of the accepted run.
    std::vector<double> ratios;
};

/// Halves T from T0 until picard_solve converges with every measured
/// contraction ratio ≤ 0.5 over at least min_iterates iterates.
ContractionSearch find_contraction_time(const SetupBuilder& build, double T0, int max_halvings,
                                        const PicardOptions& opt, int min_iterates = 4);

}  // namespace mhdbl
