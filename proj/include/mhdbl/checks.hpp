#pragma once

#include <cstdint>
#include <vector>

#include "mhdbl/scenarios.hpp"

namespace mhdbl {

/// One refinement level of the stream-coordinate round trip.
struct RoundTripLevel {
    int nx = 0, ny = 0;
    double error = 0.0;       // max |to ∘ from − id| where every column's ψ range reaches
    double divergence = 0.0;  // L² of ∂x b1 + ∂y b2 with b2 from ψ
};

struct RoundTripStudy {
    std::uint64_t seed = 0;
    std::vector<RoundTripLevel> levels;
    /// Smallest error (divergence) ratio between consecutive levels.
    double min_error_ratio = 0.0;
    double min_divergence_ratio = 0.0;
};

/// Random b1 = 1 + Σ a_k cos(kx + θ_k)(1 + c_k y)e^{−y} with b1 ≥ 0.5, and a random
/// smooth g(x, η); grids (32·2^l, 128·2^l) on [0, 8] for l < levels.
RoundTripStudy transform_roundtrip(std::uint64_t seed, int levels = 3);

struct OutflowLevel {
    int nt = 0;
    double residual = 0.0;  // max of the two Bernoulli residuals
};

struct OutflowStudy {
    std::vector<OutflowLevel> levels;
    double min_ratio = 0.0;
    double max_U = 0.0, max_B = 0.0;  // over the finest run
};

/// Evolved outflow trace at nt0·2^l + 1 samples on [0, T]; constant traces
/// are passed through unchanged.
OutflowStudy outflow_study(const OutflowSpec& spec, int nx, double T, int nt0 = 125, int levels = 3);

}  // namespace mhdbl
