#include "mhdbl/numerics.hpp"

#include "mhdbl/error.hpp"

namespace mhdbl::num {

std::vector<std::vector<double>> fd_weights(double z, std::span<const double> x, int m) {
    const int n = static_cast<int>(x.size());
    std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

std::vector<Stencil> derivative_stencils(std::span<const double> x, int order) {
    const int n = static_cast<int>(x.size());
    const int half = (order + 1) / 2;
    const int central = 2 * half + 1;
    const int sided = order + 2;
    if (n < sided) throw Error(ErrorKind::GridTooCoarse, "need at least order+2 nodes");
    // Uniform nodes get weights computed on integer offsets, which keeps the
    // classical stencils (1, -2, 1 and so on) free of rounding.
    const double h = (x[n - 1] - x[0]) / (n - 1);
    bool uniform = true;
    for (int j = 1; j < n && uniform; ++j) uniform = std::abs(x[j] - x[j - 1] - h) <= 1e-12 * std::abs(h);
    std::vector<double> unit;
    if (uniform) {
        unit.resize(n);
        for (int j = 0; j < n; ++j) unit[j] = j;
    }
    const double scale = uniform ? std::pow(h, -order) : 1.0;
    std::vector<Stencil> out(n);
    for (int j = 0; j < n; ++j) {
        int start, len;
        if (j - half >= 0 && j + half <= n - 1) {
            start = j - half;
            len = central;
        } else if (j - half < 0) {
            start = 0;
            len = sided;
        } else {
            start = n - sided;
            len = sided;
        }
        auto w = uniform ? fd_weights(j, std::span<const double>(unit).subspan(start, len), order)
                         : fd_weights(x[j], x.subspan(start, len), order);
        out[j].start = start;
        out[j].w = std::move(w[order]);
        if (uniform)
            for (auto& c : out[j].w) c *= scale;
    }
    return out;
}

std::vector<Stencil> interval_quadrature(std::span<const double> x) {
    const int n = static_cast<int>(x.size());
    std::vector<Stencil> out(std::max(n - 1, 0));
    if (n < 4) {
        for (int j = 0; j + 1 < n; ++j) {
            const double h = x[j + 1] - x[j];
            out[j] = {j, {0.5 * h, 0.5 * h}};
        }
        return out;
    }
    const double g = 0.5 / std::sqrt(3.0);
    for (int j = 0; j + 1 < n; ++j) {
        const int s = std::clamp(j - 1, 0, n - 4);
        const double h = x[j + 1] - x[j], mid = 0.5 * (x[j] + x[j + 1]);
        auto a = fd_weights(mid - g * h, x.subspan(s, 4), 0);
        auto b = fd_weights(mid + g * h, x.subspan(s, 4), 0);
        out[j].start = s;
        out[j].w.resize(4);
        for (int k = 0; k < 4; ++k) out[j].w[k] = 0.5 * h * (a[0][k] + b[0][k]);
    }
    return out;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw Error(ErrorKind::InsufficientData, "linear fit needs >= 2 points");
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double r = y[k] - (f.slope * x[k] + f.intercept);
        ssr += r * r;
    }
    f.r_squared = syy > 0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
    return f;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (int k = 0; k < n; ++k) out[k] = a + (b - a) * k / (n - 1);
    out[n - 1] = b;
    return out;
}

}  // namespace mhdbl::num
