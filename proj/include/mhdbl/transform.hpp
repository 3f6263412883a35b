#pragma once

#include <vector>

#include "mhdbl/grid.hpp"

namespace mhdbl {

/// Magnetic stream function with ∂yψ = b1, −∂xψ = b2 and ψ(x, 0) = 0.
struct StreamFunction {
    Grid grid;
    Field psi;
    /// Certified lower bound on ∂yψ (the minimum node value of b1).
    double delta0 = 0.0;
};

/// Column-wise ψ = ∫₀^y b1 (fourth-order cumulative quadrature).
/// Throws DegenerateField (located at the argmin) when min b1 < delta0.
StreamFunction stream_function(const Field& b1, double delta0);

/// Resamples f(x, y) at the heights where ψ(x, y) = η for every eta node.
/// η above a column's range takes the column's far-field value.
Field to_stream_coords(const Field& f, const StreamFunction& sf, const Grid& eta_grid);

/// Inverse resampling: g(x, η) on eta_grid evaluated at η = ψ(x, y).
Field from_stream_coords(const Field& g, const StreamFunction& sf);

struct NormalComponents {
    Field v;
    Field b2;
};

/// v = −(∂tψ + u ∂xψ)/b1 and b2 = −∂xψ at the last level of the series.
/// ∂tψ uses second-order backward differences (first order with two levels).
NormalComponents reconstruct_normal(const Field& u_hat, const Field& b1_hat,
                                    const std::vector<StreamFunction>& sf_series, double dt);

/// L² norm of ∂x b1 + ∂y b2.
double divergence_residual(const Field& b1, const Field& b2);

}  // namespace mhdbl
