#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace mhdbl::num {

/// Finite-difference weights (Fornberg) for derivatives 0..m at z from nodes x.
/// Result is indexed [k][node].
std::vector<std::vector<double>> fd_weights(double z, std::span<const double> x, int m);

/// One derivative stencil per node: weights applied to values[start .. start+w.size()).
struct Stencil {
    int start = 0;
    std::vector<double> w;
};

/// Second-order stencils of the given derivative order on arbitrary nodes:
/// centered where possible, one-sided near the ends.
std::vector<Stencil> derivative_stencils(std::span<const double> x, int order);

template <class T>
void apply_stencils(const std::vector<Stencil>& st, const T* in, T* out) {
    for (std::size_t j = 0; j < st.size(); ++j) {
        T acc{};
        const auto& s = st[j];
        for (std::size_t k = 0; k < s.w.size(); ++k) acc += s.w[k] * in[s.start + k];
        out[j] = acc;
    }
}

/// Running trapezoid integral with out[0] = 0.
template <class T>
std::vector<T> cumulative_trapezoid(std::span<const T> f, std::span<const double> x) {
    std::vector<T> out(f.size(), T{});
    for (std::size_t j = 1; j < f.size(); ++j)
        out[j] = out[j - 1] + 0.5 * (x[j] - x[j - 1]) * (f[j] + f[j - 1]);
    return out;
}

template <class T>
T trapezoid(std::span<const T> f, std::span<const double> x) {
    T acc{};
    for (std::size_t j = 1; j < f.size(); ++j) acc += 0.5 * (x[j] - x[j - 1]) * (f[j] + f[j - 1]);
    return acc;
}

/// Index i with x[i] <= z < x[i+1], clamped to [0, n-2].
inline std::size_t locate(std::span<const double> x, double z) {
    auto it = std::upper_bound(x.begin(), x.end(), z);
    std::ptrdiff_t i = (it - x.begin()) - 1;
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(x.size()) - 2);
    return static_cast<std::size_t>(i);
}

/// Piecewise cubic Lagrange interpolation through the four nodes around z
/// (clamped near the ends). deriv selects the value (0) or a derivative (1..3).
template <class T>
T interp_cubic(std::span<const double> x, std::span<const T> f, double z, int deriv = 0) {
    const std::size_t n = x.size();
    if (n < 4) {
        std::size_t i = locate(x, z);
        double t = (z - x[i]) / (x[i + 1] - x[i]);
        if (deriv == 0) return (1.0 - t) * f[i] + t * f[i + 1];
        if (deriv == 1) return (f[i + 1] - f[i]) / (x[i + 1] - x[i]);
        return T{};
    }
    std::size_t i = locate(x, z);
    std::size_t s = (i == 0) ? 0 : std::min(i - 1, n - 4);
    auto w = fd_weights(z, x.subspan(s, 4), deriv);
    T acc{};
    for (int k = 0; k < 4; ++k) acc += w[deriv][k] * f[s + k];
    return acc;
}

/// Per-interval quadrature: entry j integrates over [x_j, x_{j+1}] using the
/// cubic through the four nearest nodes (exact for cubics, fourth order).
std::vector<Stencil> interval_quadrature(std::span<const double> x);

/// Running integral with out[0] = 0 built from interval_quadrature weights.
template <class T>
std::vector<T> cumulative_integral(const std::vector<Stencil>& q, const T* f, std::size_t n) {
    std::vector<T> out(n, T{});
    for (std::size_t j = 0; j + 1 < n; ++j) {
        T acc{};
        for (std::size_t k = 0; k < q[j].w.size(); ++k) acc += q[j].w[k] * f[q[j].start + k];
        out[j + 1] = out[j] + acc;
    }
    return out;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y ≈ slope·x + intercept.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Uniformly spaced samples with n points on [a, b].
std::vector<double> linspace(double a, double b, int n);

}  // namespace mhdbl::num
