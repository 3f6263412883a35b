#pragma once

#include <span>
#include <vector>

#include "mhdbl/grid.hpp"

namespace mhdbl {

enum class Axis { x, y };

/// Second-order finite-difference derivative of order 0..4. x is periodic
/// (central stencils); y uses centered stencils in the interior and one-sided
/// second-order closures at both ends, on the (possibly stretched) node set.
template <class T>
BasicField<T> diff(const BasicField<T>& f, Axis axis, int order);

/// ∂x^p ∂y^q f.
template <class T>
BasicField<T> diff_xy(const BasicField<T>& f, int p, int q);

/// Time derivative of a sampled series on nonuniform times (second order,
/// one-sided at the ends). Returns one field per sample.
template <class T>
std::vector<BasicField<T>> diff_t(const std::vector<BasicField<T>>& series,
                                  std::span<const double> t, int order);

/// Periodic central derivative of a single x-profile of length n (orders 1..4).
std::vector<double> diff_periodic(std::span<const double> f, double dx, int order);

}  // namespace mhdbl
