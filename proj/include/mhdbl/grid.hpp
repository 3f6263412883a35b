#pragma once

#include <complex>
#include <cstddef>
#include <type_traits>
#include <vector>

#include "mhdbl/error.hpp"

namespace mhdbl {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Tensor grid on T×[0, y_max]: x periodic with nx uniform nodes, y mapped by
/// y(η) = y_max (e^{sη} − 1)/(e^s − 1) on ny nodes (s = 0 gives uniform nodes).
class Grid {
public:
    Grid() = default;
    Grid(int nx, int ny, double y_max, double y_stretch = 0.0);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double y_max() const { return y_max_; }
    double y_stretch() const { return s_; }
    double dx() const { return kTwoPi / nx_; }
    double x(int i) const { return dx() * i; }
    double y(int j) const { return y_[static_cast<std::size_t>(j)]; }
    const std::vector<double>& y_nodes() const { return y_; }
    /// Trapezoid weights in y.
    const std::vector<double>& y_weights() const { return wy_; }
    std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }

    bool operator==(const Grid& o) const {
        return nx_ == o.nx_ && ny_ == o.ny_ && y_max_ == o.y_max_ && s_ == o.s_;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }

private:
    int nx_ = 0, ny_ = 0;
    double y_max_ = 0.0, s_ = 0.0;
    std::vector<double> y_, wy_;
};

enum class Parity : unsigned char { real = 0, complex = 1 };

/// Samples on a Grid, stored with y contiguous: values[i*ny + j].
template <class T>
class BasicField {
    static_assert(std::is_same_v<T, double> || std::is_same_v<T, cplx>);

public:
    using value_type = T;

    BasicField() = default;
    explicit BasicField(const Grid& g, T fill = T{}) : grid_(g), v_(g.size(), fill) {}
    BasicField(const Grid& g, std::vector<T> values) : grid_(g), v_(std::move(values)) {
        if (v_.size() != g.size()) throw Error(ErrorKind::ShapeMismatch, "field value count");
    }

    template <class F>
    static BasicField from_function(const Grid& g, F&& f) {
        BasicField out(g);
        for (int i = 0; i < g.nx(); ++i)
            for (int j = 0; j < g.ny(); ++j) out(i, j) = f(g.x(i), g.y(j));
        return out;
    }

    static constexpr Parity parity() {
        return std::is_same_v<T, double> ? Parity::real : Parity::complex;
    }

    const Grid& grid() const { return grid_; }
    T& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * grid_.ny() + j]; }
    const T& operator()(int i, int j) const {
        return v_[static_cast<std::size_t>(i) * grid_.ny() + j];
    }
    T* column(int i) { return v_.data() + static_cast<std::size_t>(i) * grid_.ny(); }
    const T* column(int i) const { return v_.data() + static_cast<std::size_t>(i) * grid_.ny(); }
    std::vector<T>& values() { return v_; }
    const std::vector<T>& values() const { return v_; }
    std::size_t size() const { return v_.size(); }

    BasicField& operator+=(const BasicField& o) {
        check_same(o);
        for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
        return *this;
    }
    BasicField& operator-=(const BasicField& o) {
        check_same(o);
        for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
        return *this;
    }
    BasicField& operator*=(T s) {
        for (auto& x : v_) x *= s;
        return *this;
    }
    friend BasicField operator+(BasicField a, const BasicField& b) { return a += b; }
    friend BasicField operator-(BasicField a, const BasicField& b) { return a -= b; }
    friend BasicField operator*(T s, BasicField a) { return a *= s; }

    void check_same(const BasicField& o) const {
        if (o.grid_ != grid_) throw Error(ErrorKind::ShapeMismatch, "fields live on different grids");
    }

private:
    Grid grid_;
    std::vector<T> v_;
};

using Field = BasicField<double>;
using CField = BasicField<cplx>;

}  // namespace mhdbl
