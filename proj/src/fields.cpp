#include "mhdbl/fields.hpp"

#include <array>
#include <string>

#include "mhdbl/numerics.hpp"

namespace mhdbl {
namespace {

void check_order(int order) {
    if (order < 0 || order > 4)
        throw Error(ErrorKind::UnsupportedOrder, "derivative order " + std::to_string(order) + " (max 4)");
}

// Periodic central weights at offsets -2..2.
std::array<double, 5> periodic_weights(int order, double h) {
    switch (order) {
        case 1: return {0.0, -0.5 / h, 0.0, 0.5 / h, 0.0};
        case 2: return {0.0, 1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h), 0.0};
        case 3: {
            const double c = 0.5 / (h * h * h);
            return {-c, 2.0 * c, 0.0, -2.0 * c, c};
        }
        case 4: {
            const double c = 1.0 / (h * h * h * h);
            return {c, -4.0 * c, 6.0 * c, -4.0 * c, c};
        }
        default: return {0.0, 0.0, 1.0, 0.0, 0.0};
    }
}

int periodic_min_nodes(int order) { return order <= 2 ? 3 : 5; }

}  // namespace

std::vector<double> diff_periodic(std::span<const double> f, double dx, int order) {
    check_order(order);
    const int n = static_cast<int>(f.size());
    std::vector<double> out(f.size(), 0.0);
    if (order == 0) return {f.begin(), f.end()};
    if (n == 1) return out;
    if (n < periodic_min_nodes(order)) throw Error(ErrorKind::GridTooCoarse, "too few periodic x nodes");
    const auto w = periodic_weights(order, dx);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int o = -2; o <= 2; ++o)
            if (w[o + 2] != 0.0) acc += w[o + 2] * f[((i + o) % n + n) % n];
        out[i] = acc;
    }
    return out;
}

template <class T>
BasicField<T> diff(const BasicField<T>& f, Axis axis, int order) {
    check_order(order);
    if (order == 0) return f;
    const Grid& g = f.grid();
    const int nx = g.nx(), ny = g.ny();
    BasicField<T> out(g);
    if (axis == Axis::x) {
        if (nx == 1) return out;  // a single column carries no x-variation
        if (nx < periodic_min_nodes(order)) throw Error(ErrorKind::GridTooCoarse, "too few periodic x nodes");
        const auto w = periodic_weights(order, g.dx());
        for (int i = 0; i < nx; ++i) {
            T* o = out.column(i);
            for (int s = -2; s <= 2; ++s) {
                if (w[s + 2] == 0.0) continue;
                const T* src = f.column(((i + s) % nx + nx) % nx);
                for (int j = 0; j < ny; ++j) o[j] += w[s + 2] * src[j];
            }
        }
        return out;
    }
    if (ny < order + 2) throw Error(ErrorKind::GridTooCoarse, "ny must be at least order+2 for y-derivatives");
    const auto st = num::derivative_stencils(g.y_nodes(), order);
    for (int i = 0; i < nx; ++i) num::apply_stencils(st, f.column(i), out.column(i));
    return out;
}

template <class T>
BasicField<T> diff_xy(const BasicField<T>& f, int p, int q) {
    return diff(diff(f, Axis::x, p), Axis::y, q);
}

template <class T>
std::vector<BasicField<T>> diff_t(const std::vector<BasicField<T>>& series, std::span<const double> t,
                                  int order) {
    check_order(order);
    if (series.size() != t.size()) throw Error(ErrorKind::ShapeMismatch, "series and time grid differ in length");
    if (order == 0) return series;
    if (static_cast<int>(t.size()) < order + 2)
        throw Error(ErrorKind::GridTooCoarse, "too few time samples for requested order");
    for (const auto& s : series) series.front().check_same(s);
    const auto st = num::derivative_stencils(t, order);
    std::vector<BasicField<T>> out;
    out.reserve(series.size());
    for (std::size_t n = 0; n < series.size(); ++n) {
        BasicField<T> d(series.front().grid());
        const auto& s = st[n];
        for (std::size_t k = 0; k < s.w.size(); ++k) {
            const auto& src = series[s.start + k].values();
            auto& dst = d.values();
            for (std::size_t m = 0; m < dst.size(); ++m) dst[m] += s.w[k] * src[m];
        }
        out.push_back(std::move(d));
    }
    return out;
}

template Field diff(const Field&, Axis, int);
template CField diff(const CField&, Axis, int);
template Field diff_xy(const Field&, int, int);
template CField diff_xy(const CField&, int, int);
template std::vector<Field> diff_t(const std::vector<Field>&, std::span<const double>, int);
template std::vector<CField> diff_t(const std::vector<CField>&, std::span<const double>, int);

}  // namespace mhdbl
