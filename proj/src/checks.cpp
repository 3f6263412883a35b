#include "mhdbl/checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mhdbl/numerics.hpp"
#include "mhdbl/transform.hpp"

namespace mhdbl {

RoundTripStudy transform_roundtrip(std::uint64_t seed, int levels) {
    if (levels < 2) throw Error(ErrorKind::BadParameters, "round trip needs at least two levels");
    std::mt19937_64 rng(seed);
    auto unif = [&](double lo, double hi) { return lo + (hi - lo) * std::generate_canonical<double, 53>(rng); };
    double a[3], th[3], c[3], ga[3], gk[3];
    for (int k = 0; k < 3; ++k) {
        a[k] = unif(-0.15, 0.15);
        th[k] = unif(0.0, kTwoPi);
        c[k] = unif(0.0, 0.5);
        ga[k] = unif(-1.0, 1.0);
        gk[k] = unif(0.3, 0.8);
    }
    auto b1fn = [&](double x, double y) {
        double s = 1.0;
        for (int k = 0; k < 3; ++k) s += a[k] * std::cos((k + 1) * x + th[k]) * (1.0 + c[k] * y) * std::exp(-y);
        return s;
    };
    auto gfn = [&](double x, double e) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += ga[k] * std::sin((k + 1) * x + th[k]) * std::exp(-gk[k] * e) * (1.0 + e);
        return s;
    };

    RoundTripStudy st;
    st.seed = seed;
    for (int l = 0; l < levels; ++l) {
        const int nx = 32 << l, ny = 128 << l;
        Grid g(nx, ny, 8.0);
        const auto b1 = Field::from_function(g, b1fn);
        const auto sf = stream_function(b1, 0.5);
        double lo = 1e300, hi = 0.0;
        for (int i = 0; i < nx; ++i) {
            lo = std::min(lo, sf.psi(i, ny - 1));
            hi = std::max(hi, sf.psi(i, ny - 1));
        }
        Grid eg(nx, ny, hi + 0.1);
        const auto gf = Field::from_function(eg, gfn);
        const auto rt = to_stream_coords(from_stream_coords(gf, sf), sf, eg);
        RoundTripLevel lv{nx, ny, 0.0, 0.0};
        for (int i = 0; i < nx; ++i)
            for (int k = 0; k < ny && eg.y(k) <= lo; ++k) lv.error = std::max(lv.error, std::abs(rt(i, k) - gf(i, k)));
        const auto r = reconstruct_normal(Field(g), b1, {sf, sf}, 0.1);
        lv.divergence = divergence_residual(b1, r.b2);
        st.levels.push_back(lv);
    }
    st.min_error_ratio = st.min_divergence_ratio = 1e300;
    for (int l = 1; l < levels; ++l) {
        st.min_error_ratio = std::min(st.min_error_ratio, st.levels[l - 1].error / st.levels[l].error);
        st.min_divergence_ratio =
            std::min(st.min_divergence_ratio, st.levels[l - 1].divergence / st.levels[l].divergence);
    }
    return st;
}

OutflowStudy outflow_study(const OutflowSpec& spec, int nx, double T, int nt0, int levels) {
    if (nx < 4 || !(T > 0.0) || nt0 < 2 || levels < 1) throw Error(ErrorKind::BadParameters, "bad outflow study");
    OutflowStudy st;
    for (int l = 0; l < levels; ++l) {
        const int nt = (nt0 << l) + 1;
        const auto s = make_outflow(spec, nx, num::linspace(0.0, T, nt));
        const auto r = bernoulli_residual(s);
        st.levels.push_back({nt, std::max(r.r_momentum, r.r_induction)});
        if (l == levels - 1) {
            for (const auto& row : s.U)
                for (double v : row) st.max_U = std::max(st.max_U, std::abs(v));
            for (const auto& row : s.B)
                for (double v : row) st.max_B = std::max(st.max_B, std::abs(v));
        }
    }
    st.min_ratio = levels > 1 ? 1e300 : 0.0;
    for (int l = 1; l < levels; ++l) {
        const double prev = st.levels[l - 1].residual, cur = st.levels[l].residual;
        st.min_ratio = std::min(st.min_ratio, cur > 0.0 ? prev / cur : (prev > 0.0 ? 1e300 : 0.0));
    }
    if (st.min_ratio >= 1e300) st.min_ratio = 0.0;
    return st;
}

}  // namespace mhdbl
