#include "mhdbl/norms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "mhdbl/fields.hpp"

namespace mhdbl {
namespace {

void check_norm_order(int order) {
    if (order < 0 || order > 4)
        throw Error(ErrorKind::GridTooCoarse, "norm order " + std::to_string(order) + " exceeds stencil order 4");
}

template <class T>
double sup_abs(const BasicField<T>& f) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

template <class T>
double l2_squared(const BasicField<T>& f) {
    const Grid& g = f.grid();
    const auto& w = g.y_weights();
    double acc = 0.0;
    for (int i = 0; i < g.nx(); ++i) {
        const T* c = f.column(i);
        double col = 0.0;
        for (int j = 0; j < g.ny(); ++j) col += w[j] * std::norm(c[j]);
        acc += col;
    }
    return acc * g.dx();
}

template <class T>
double norm(const BasicField<T>& f, const NormSpec& spec) {
    const Grid& g = f.grid();
    using K = NormSpec::Kind;
    switch (spec.kind) {
        case K::weighted_sup: {
            check_norm_order(spec.s);
            BasicField<T> ef(g);
            for (int i = 0; i < g.nx(); ++i)
                for (int j = 0; j < g.ny(); ++j) ef(i, j) = std::exp(spec.alpha * g.y(j)) * f(i, j);
            double m = 0.0;
            for (int p = 0; p <= spec.s; ++p)
                for (int q = 0; p + q <= spec.s; ++q) m = std::max(m, sup_abs(diff_xy(ef, p, q)));
            return m;
        }
        case K::sobolev_H: {
            check_norm_order(spec.m);
            double acc = 0.0;
            for (int p = 0; p <= spec.m; ++p)
                for (int q = 0; p + q <= spec.m; ++q) acc += l2_squared(diff_xy(f, p, q));
            return std::sqrt(acc);
        }
        case K::anisotropic_B: {
            check_norm_order(spec.k1);
            check_norm_order(spec.k2);
            double acc = 0.0;
            for (int p = 0; p <= spec.k1; ++p)
                for (int q = 0; q <= spec.k2; ++q) acc += l2_squared(diff_xy(f, p, q));
            return std::sqrt(acc);
        }
        case K::mixed_C: {
            check_norm_order(spec.k);
            const auto& gy = g;
            double total = 0.0;
            for (int p = 0; p <= spec.k; ++p)
                for (int q = 0; p + q <= spec.k; ++q) {
                    auto d = diff_xy(f, p, q);
                    double acc = 0.0;
                    for (int i = 0; i < gy.nx(); ++i) {
                        double col = 0.0;
                        const T* c = d.column(i);
                        for (int j = 0; j < gy.ny(); ++j) col = std::max(col, std::abs(c[j]));
                        acc += col * col;
                    }
                    total += std::sqrt(acc * gy.dx());
                }
            return total;
        }
        case K::mode_H_alpha: {
            check_norm_order(spec.m);
            double sup = 0.0;
            for (int i = 0; i < g.nx(); ++i)
                for (int j = 0; j < g.ny(); ++j)
                    sup = std::max(sup, std::exp(spec.alpha * g.y(j)) * std::abs(f(i, j)));
            double weight = 0.0;
            for (int p = 0; p <= spec.m; ++p) weight += std::pow(spec.wavenumber, 2 * p);
            return std::sqrt(kTwoPi * weight) * sup;
        }
    }
    return 0.0;
}

template <class T>
NormIdentityReport norm_identity_check(const BasicField<T>& f, int m) {
    check_norm_order(m);
    NormIdentityReport r;
    for (int p = 0; p <= m; ++p)
        for (int q = 0; p + q <= m; ++q) r.lhs += l2_squared(diff_xy(f, p, q));
    // Layer j collects exactly j normal derivatives; evaluated with the y
    // derivative taken first.
    for (int j = 0; j <= m; ++j) {
        const auto dy = diff(f, Axis::y, j);
        double layer = 0.0;
        for (int p = 0; p <= m - j; ++p) layer += l2_squared(diff(dy, Axis::x, p));
        r.rhs += layer;
    }
    r.gap = std::abs(r.lhs - r.rhs) / std::max(r.lhs, 1.0);
    double cumulative = 0.0;
    for (int j = 0; j <= m; ++j) {
        const double b = norm(f, NormSpec::anisotropic_B(m - j, j));
        cumulative += b * b;
    }
    r.cumulative_ratio = r.lhs > 0.0 ? cumulative / r.lhs : 1.0;
    return r;
}

MoserReport moser_check(const Field& u, const Field& v, int m) {
    if (m < 2) throw Error(ErrorKind::OrderTooLow, "Moser check needs m >= 2");
    check_norm_order(m);
    u.check_same(v);
    MoserReport rep;
    const double nu = norm(u, NormSpec::sobolev_H(m));
    const double nv = norm(v, NormSpec::sobolev_H(m));
    if (nu == 0.0 || nv == 0.0) return rep;
    std::vector<std::vector<Field>> du(m + 1), dv(m + 1);
    for (int p = 0; p <= m; ++p)
        for (int q = 0; p + q <= m; ++q) {
            du[p].push_back(diff_xy(u, p, q));
            dv[p].push_back(diff_xy(v, p, q));
        }
    Field prod(u.grid());
    for (int ap = 0; ap <= m; ++ap)
        for (int aq = 0; ap + aq <= m; ++aq)
            for (int bp = 0; ap + aq + bp <= m; ++bp)
                for (int bq = 0; ap + aq + bp + bq <= m; ++bq) {
                    const auto& a = du[ap][aq].values();
                    const auto& b = dv[bp][bq].values();
                    auto& o = prod.values();
                    for (std::size_t k = 0; k < o.size(); ++k) o[k] = a[k] * b[k];
                    const double ratio = std::sqrt(l2_squared(prod)) / (nu * nv);
                    if (ratio > rep.max_ratio) rep = {ratio, ap, aq, bp, bq};
                }
    return rep;
}

MoserCalibration moser_calibration(const Grid& grid, int m, int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(0.5, 2.0), conc(1.0, 4.0), phase(0.0, kTwoPi),
        center(1.0, 0.5 * grid.y_max()), width(0.5, 1.5);
    auto bump = [&] {
        const double A = amp(rng), c = conc(rng), x0 = phase(rng), y0 = center(rng), w = width(rng);
        return Field::from_function(grid, [=](double x, double y) {
            const double r = (y - y0) / w;
            return A * std::exp(c * (std::cos(x - x0) - 1.0)) * std::exp(-r * r);
        });
    };
    MoserCalibration out;
    out.ratios.reserve(trials);
    for (int t = 0; t < trials; ++t) {
        const Field u = bump();
        const Field v = bump();
        const double r = moser_check(u, v, m).max_ratio;
        out.ratios.push_back(r);
        out.max_ratio = std::max(out.max_ratio, r);
    }
    return out;
}

template double norm(const Field&, const NormSpec&);
template double norm(const CField&, const NormSpec&);
template double l2_squared(const Field&);
template double l2_squared(const CField&);
template NormIdentityReport norm_identity_check(const Field&, int);
template NormIdentityReport norm_identity_check(const CField&, int);

}  // namespace mhdbl
