#pragma once

#include <cstdint>
#include <vector>

#include "mhdbl/grid.hpp"

namespace mhdbl {

/// Which discrete norm to evaluate. Tangential derivatives on a snapshot are
/// x-derivatives; all orders are capped at 4.
struct NormSpec {
    enum class Kind { weighted_sup, sobolev_H, anisotropic_B, mixed_C, mode_H_alpha };
    Kind kind = Kind::sobolev_H;
    double alpha = 0.0;
    int s = 0;   // weighted_sup: derivative order
    int m = 0;   // sobolev_H, mode_H_alpha
    int k1 = 0;  // anisotropic_B: tangential order
    int k2 = 0;  // anisotropic_B: normal order
    int k = 0;   // mixed_C
    double wavenumber = 1.0;  // mode_H_alpha

    static NormSpec weighted_sup(double alpha, int s) { return {Kind::weighted_sup, alpha, s}; }
    static NormSpec sobolev_H(int m) {
        NormSpec n;
        n.kind = Kind::sobolev_H;
        n.m = m;
        return n;
    }
    static NormSpec anisotropic_B(int k1, int k2) {
        NormSpec n;
        n.kind = Kind::anisotropic_B;
        n.k1 = k1;
        n.k2 = k2;
        return n;
    }
    static NormSpec mixed_C(int k) {
        NormSpec n;
        n.kind = Kind::mixed_C;
        n.k = k;
        return n;
    }
    static NormSpec mode_H_alpha(int m, double alpha, double wavenumber) {
        NormSpec n;
        n.kind = Kind::mode_H_alpha;
        n.m = m;
        n.alpha = alpha;
        n.wavenumber = wavenumber;
        return n;
    }
};

/// Discrete norm: trapezoid in y, uniform sum in x, max over nodes for sup parts.
template <class T>
double norm(const BasicField<T>& f, const NormSpec& spec);

/// ∫∫|f|² with the same quadrature as norm().
template <class T>
double l2_squared(const BasicField<T>& f);

struct NormIdentityReport {
    double lhs = 0.0;  // ‖f‖²_{H^m}
    double rhs = 0.0;  // Σ_j ‖f‖²_{B^{m-j,j}} over layers with exactly j normal derivatives
    double gap = 0.0;  // |lhs − rhs| / max(lhs, 1)
    /// Σ_j ‖f‖²_{B^{m-j,j}} with the cumulative (q ≤ k2) definition, divided by lhs.
    /// Lies in [1, m+1].
    double cumulative_ratio = 1.0;
};

template <class T>
NormIdentityReport norm_identity_check(const BasicField<T>& f, int m);

struct MoserReport {
    double max_ratio = 0.0;
    int alpha_x = 0, alpha_y = 0, beta_x = 0, beta_y = 0;  // maximizing pair
};

/// max over |α|+|β| ≤ m of ‖∂^α u·∂^β v‖_{L²}/(‖u‖_{H^m}‖v‖_{H^m}).
MoserReport moser_check(const Field& u, const Field& v, int m);

struct MoserCalibration {
    std::vector<double> ratios;
    double max_ratio = 0.0;
};

/// Moser ratios over `trials` random Gaussian-bump pairs drawn from `seed`.
MoserCalibration moser_calibration(const Grid& grid, int m, int trials, std::uint64_t seed);

}  // namespace mhdbl
