#pragma once

#include <cstdint>
#include <vector>

#include "mhdbl/wellposed.hpp"

namespace mhdbl {

/// Uniform time samples 0, dt, ..., T (the last step shortened to land on T).
std::vector<double> time_grid(double T, double dt);

/// Outflow trace for the well-posedness scenarios.
///  - constant: U ≡ U0, B ≡ B0, p ≡ 0
///  - evolved: U(0,x) = U0 + dU sin x, B(0,x) = B0 + dB cos x marched by the Bernoulli system
struct OutflowSpec {
    enum class Mode { constant, evolved };
    Mode mode = Mode::constant;
    double U0 = 0.0, B0 = 1.0, dU = 0.1, dB = 0.1;
};
OutflowState make_outflow(const OutflowSpec& spec, int nx, const std::vector<double>& t);

/// b = 0, v = A sin(x) y³ e^{−y²}; forcing from the outflow trace.
ProblemSetup gaussian_bump_setup(const Grid& g, double T, double dt, double amplitude, const OutflowSpec& out);

/// Exact pair b* = e^{−t} sin x e^{−y²}, v* = e^{−t} sin x y e^{−y²} under a
/// constant trace (U0, B0), with the forcing that makes it solve the system.
ProblemSetup manufactured_setup(const Grid& g, double T, double dt, double U0, double B0);
Field manufactured_b(const Grid& g, double t);
Field manufactured_v(const Grid& g, double t);
/// (b*, v*) sampled on the setup's time grid.
HomogenizedState manufactured_state(const Grid& g, const OutflowState& outflow);

/// Random smooth admissible data with min(b + B) ≥ 0.5·B0 at t = 0.
ProblemSetup random_admissible_setup(const Grid& g, double T, double dt, std::uint64_t seed);

}  // namespace mhdbl
