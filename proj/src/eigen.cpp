#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mhdbl/field_io.hpp"
#include "mhdbl/instability.hpp"
#include "mhdbl/numerics.hpp"

namespace mhdbl {
namespace {

const cplx I{0.0, 1.0};

Jet3 rhs(cplx tau, double z, const Jet3& y) {
    return {y[1], y[2], I * ((tau - z * z) * y[1] + 2.0 * z * y[0])};
}

Jet3 axpy(const Jet3& y, cplx s, const Jet3& k) {
    return {y[0] + s * k[0], y[1] + s * k[1], y[2] + s * k[2]};
}

Jet3 rk4(cplx tau, double z, const Jet3& y, double h) {
    const auto k1 = rhs(tau, z, y);
    const auto k2 = rhs(tau, z + 0.5 * h, axpy(y, 0.5 * h, k1));
    const auto k3 = rhs(tau, z + 0.5 * h, axpy(y, 0.5 * h, k2));
    const auto k4 = rhs(tau, z + h, axpy(y, h, k3));
    Jet3 out;
    for (int c = 0; c < 3; ++c) out[c] = y[c] + h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    return out;
}

// Two-term WKB jet of e^{S} with S' = c√(z²−τ) − 5z/(2(z²−τ)).
Jet3 wkb_start(cplx tau, double z, cplx c) {
    const cplx q = std::sqrt(z * z - tau);
    const cplx s1 = c * q - 5.0 * z / (2.0 * (z * z - tau));
    const cplx s2 = c * z / q;
    return {1.0, s1, s1 * s1 + s2};
}

const cplx kLeftBranch = std::exp(cplx(0.0, -std::numbers::pi / 4));

struct Shot {
    Jet3 left, right;  // unnormalized jets at z = 0
};

// Integrates the decaying branches from ∓Z to 0 over n intervals per side.
// When store is given it receives the jets at the n_z + 1 nodes (left branch
// up to and including the center, then the right branch from the center).
Shot shoot(cplx tau, double Z, int n, int substeps, std::vector<Jet3>* left_store = nullptr,
           std::vector<Jet3>* right_store = nullptr) {
    const double h = Z / n, hs = h / substeps;
    Shot s;
    Jet3 y = wkb_start(tau, -Z, kLeftBranch);
    if (left_store) left_store->assign(1, y);
    for (int j = 0; j < n; ++j) {
        const double z0 = -Z + j * h;
        for (int m = 0; m < substeps; ++m) y = rk4(tau, z0 + m * hs, y, hs);
        if (left_store) left_store->push_back(y);
    }
    s.left = y;
    y = wkb_start(tau, Z, -kLeftBranch);
    if (right_store) right_store->assign(1, y);
    for (int j = 0; j < n; ++j) {
        const double z0 = Z - j * h;
        for (int m = 0; m < substeps; ++m) y = rk4(tau, z0 - m * hs, y, -hs);
        if (right_store) right_store->push_back(y);
    }
    s.right = y;
    return s;
}

Eigen::Vector3cd vec(const Jet3& j) { return {j[0], j[1], j[2]}; }

Eigen::Vector3cd jump(cplx tau) { return {tau, 0.0, -2.0}; }

double scan_defect(cplx tau, double Z, int n) {
    const auto s = shoot(tau, Z, n, 1);
    Eigen::Matrix3cd M;
    M.col(0) = vec(s.left).normalized();
    M.col(1) = jump(tau).normalized();
    M.col(2) = vec(s.right).normalized();
    return std::abs(M.determinant());
}

struct NewtonResult {
    bool ok = false;
    cplx tau, alpha, beta;
};

// Complex Newton on F(α, β, τ) = α L̂(τ) − β R̂(τ) − (τ, 0, −2), with L̂, R̂
// the shooting jets at 0 scaled to unit value.
NewtonResult match(cplx tau, double Z, int n, int substeps) {
    using Pair = std::pair<Eigen::Vector3cd, Eigen::Vector3cd>;
    auto normalized = [&](cplx t) -> Pair {
        auto s = shoot(t, Z, n, substeps);
        return {vec(s.left) / s.left[0], vec(s.right) / s.right[0]};
    };
    Eigen::Vector3cd L, R;
    std::tie(L, R) = normalized(tau);
    Eigen::Matrix<cplx, 3, 2> A;
    A.col(0) = L;
    A.col(1) = -R;
    Eigen::Vector2cd ab = A.colPivHouseholderQr().solve(jump(tau));
    cplx alpha = ab(0), beta = ab(1);
    const double delta = 1e-6;
    for (int it = 0; it < 60; ++it) {
        const Eigen::Vector3cd F = alpha * L - beta * R - jump(tau);
        auto [Lp, Rp] = normalized(tau + delta);
        auto [Lm, Rm] = normalized(tau - delta);
        Eigen::Matrix3cd J;
        J.col(0) = L;
        J.col(1) = -R;
        J.col(2) = alpha * (Lp - Lm) / (2.0 * delta) - beta * (Rp - Rm) / (2.0 * delta) -
                   Eigen::Vector3cd(1.0, 0.0, 0.0);
        const Eigen::Vector3cd d = J.partialPivLu().solve(-F);
        if (!d.allFinite()) return {};
        alpha += d(0);
        beta += d(1);
        tau += d(2);
        if (std::abs(tau) > 50.0) return {};
        std::tie(L, R) = normalized(tau);
        if (std::abs(d(2)) < 1e-13 * std::max(1.0, std::abs(tau))) {
            const Eigen::Vector3cd Fn = alpha * L - beta * R - jump(tau);
            return {Fn.norm() < 1e-9, tau, alpha, beta};
        }
    }
    return {};
}

template <class V>
void put(std::ostream& os, V v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class V>
V get(std::istream& is) {
    V v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw Error(ErrorKind::IoError, "truncated eigenpair cache");
    return v;
}

void put_c(std::ostream& os, cplx c) {
    put(os, c.real());
    put(os, c.imag());
}

cplx get_c(std::istream& is) {
    const double re = get<double>(is);
    return {re, get<double>(is)};
}

}  // namespace

Jet3 taylor_propagate(cplx tau, double z0, const Jet3& y0, double dz) {
    if (dz == 0.0) return y0;
    constexpr int kMax = 120;
    const cplx q = tau - z0 * z0;
    // Coefficients of V(z0 + s) = Σ c_k s^k, kept as d_k = c_k dz^k.
    std::array<cplx, kMax + 1> d{};
    d[0] = y0[0];
    d[1] = y0[1] * dz;
    d[2] = 0.5 * y0[2] * dz * dz;
    Jet3 out{d[0] + d[1] + d[2], (d[1] + 2.0 * d[2]) / dz, 2.0 * d[2] / (dz * dz)};
    int quiet = 0;
    for (int k = 0; k + 3 <= kMax; ++k) {
        const cplx prev = k >= 1 ? d[k - 1] * dz : cplx{};
        d[k + 3] = I * (q * double(k + 1) * d[k + 1] * dz * dz + 2.0 * z0 * double(1 - k) * d[k] * dz * dz * dz +
                        double(3 - k) * prev * dz * dz * dz) /
                   double((k + 1) * (k + 2) * (k + 3));
        const int m = k + 3;
        const cplx t0 = d[m], t1 = double(m) * d[m] / dz, t2 = double(m) * double(m - 1) * d[m] / (dz * dz);
        out[0] += t0;
        out[1] += t1;
        out[2] += t2;
        const bool small = std::abs(t0) <= 1e-18 * std::abs(out[0]) + 1e-300 &&
                           std::abs(t1) <= 1e-18 * std::abs(out[1]) + 1e-300 &&
                           std::abs(t2) <= 1e-18 * std::abs(out[2]) + 1e-300;
        quiet = small ? quiet + 1 : 0;
        if (quiet >= 3) break;
    }
    return out;
}

Jet3 Eigenpair::profile(double zq) const {
    if (!(std::abs(zq) <= Z)) return {};
    const double h = 2.0 * Z / n_z;
    const int jc = n_z / 2;
    int j = static_cast<int>(std::lround((zq + Z) / h));
    j = std::clamp(j, 0, n_z);
    if (zq < 0.0) {
        j = std::min(j, jc);
        const Jet3& base = (j == jc) ? V_left0 : V[j];
        return taylor_propagate(tau, z[j], base, zq - z[j]);
    }
    j = std::max(j, jc);
    return taylor_propagate(tau, z[j], V[j], zq - z[j]);
}

double eigen_residual(const Eigenpair& p) {
    const int jc = p.n_z / 2;
    double worst = 0.0, peak = 0.0;
    for (const auto& y : p.V) peak = std::max({peak, std::abs(y[0]), std::abs(y[1]), std::abs(y[2])});
    for (int j = 0; j < p.n_z; ++j) {
        const double h = p.z[j + 1] - p.z[j];
        Jet3 from, to;
        if (j < jc) {
            from = p.V[j];
            to = (j + 1 == jc) ? p.V_left0 : p.V[j + 1];
        } else {
            from = p.V[j];
            to = p.V[j + 1];
        }
        const auto prop = taylor_propagate(p.tau, p.z[j], from, h);
        for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(prop[c] - to[c]) / h);
    }
    return peak > 0.0 ? worst / peak : worst;
}

cplx collocation_tau(double Z, int N, cplx tau) {
    using Eigen::MatrixXcd;
    using Eigen::MatrixXd;
    using Eigen::VectorXcd;
    using Eigen::VectorXd;
    if (N < 16) throw Error(ErrorKind::BadParameters, "collocation needs at least 16 nodes");
    const double pi = std::numbers::pi;
    VectorXd x(N), c(N);
    for (int j = 0; j < N; ++j) {
        x(j) = std::cos(pi * j / (N - 1));
        c(j) = ((j == 0 || j == N - 1) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
    }
    MatrixXd D = MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            if (i != j) D(i, j) = c(i) / c(j) / (x(i) - x(j));
    for (int i = 0; i < N; ++i) D(i, i) = -D.row(i).sum();
    D /= Z;
    const MatrixXd D3 = D * D * D;
    const int M = N - 3;
    VectorXd zc(M);
    MatrixXd P(M, N);
    for (int i = 0; i < M; ++i) {
        const double xc = std::cos(pi * (i + 0.5) / M);
        zc(i) = Z * xc;
        double sum = 0.0;
        for (int j = 0; j < N; ++j) {
            const double w = ((j == 0 || j == N - 1) ? 0.5 : 1.0) * ((j % 2) ? -1.0 : 1.0);
            P(i, j) = w / (xc - x(j));
            sum += P(i, j);
        }
        P.row(i) /= sum;
    }
    const MatrixXd PD = P * D, PD3 = P * D3;
    const double rpi = 1.0 / std::sqrt(pi);
    auto system = [&](cplx t, MatrixXcd& A, VectorXcd& f, VectorXcd& dfdt) {
        A.resize(M, N);
        f.resize(M);
        dfdt.resize(M);
        for (int i = 0; i < M; ++i) {
            const double zz = zc(i);
            const cplx q = t - zz * zz;
            const double c1 = std::exp(-zz * zz) * rpi, c2 = -2.0 * zz * c1, c3 = (4.0 * zz * zz - 2.0) * c1;
            // L[χ q] with L V = V''' − i((τ−z²)V' + 2zV), using L q = 0.
            f(i) = -(c3 * q + 3.0 * c2 * (-2.0 * zz) + 3.0 * c1 * (-2.0) - I * q * c1 * q);
            dfdt(i) = -(c3 - 2.0 * I * q * c1);
            for (int j = 0; j < N; ++j) A(i, j) = PD3(i, j) - I * q * PD(i, j) - 2.0 * I * zz * P(i, j);
        }
    };
    MatrixXcd A;
    VectorXcd f, dfdt;
    system(tau, A, f, dfdt);
    MatrixXcd J = MatrixXcd::Zero(N + 1, N + 1);
    auto fill_bc = [&](MatrixXcd& m) {
        m(M, 0) = 1.0;
        m(M + 1, N - 1) = 1.0;
        for (int j = 0; j < N; ++j) {
            m(M + 2, j) = D(0, j);
            m(M + 3, j) = D(N - 1, j);
        }
    };
    MatrixXcd B = MatrixXcd::Zero(N + 1, N);
    B.topRows(M) = A;
    fill_bc(B);
    VectorXcd r0 = VectorXcd::Zero(N + 1);
    r0.head(M) = f;
    VectorXcd u = B.colPivHouseholderQr().solve(r0);
    for (int it = 0; it < 40; ++it) {
        system(tau, A, f, dfdt);
        J.setZero();
        J.topLeftCorner(M, N) = A;
        fill_bc(J);
        VectorXcd res(N + 1);
        res.head(M) = A * u - f;
        res(M) = u(0);
        res(M + 1) = u(N - 1);
        res(M + 2) = (D.row(0).cast<cplx>() * u)(0);
        res(M + 3) = (D.row(N - 1).cast<cplx>() * u)(0);
        J.col(N).head(M) = -I * (PD.cast<cplx>() * u) - dfdt;
        const VectorXcd d = J.partialPivLu().solve(-res);
        if (!d.allFinite()) throw Error(ErrorKind::EigenpairNotFound, "collocation Newton produced non-finite values");
        u += d.head(N);
        tau += d(N);
        if (std::abs(d(N)) < 1e-14 * std::max(1.0, std::abs(tau))) return tau;
    }
    return tau;
}

Eigenpair solve_eigenpair(double Z, int n_z) {
    EigenOptions opt;
    opt.Z = Z;
    opt.n_z = n_z;
    return solve_eigenpair(opt);
}

Eigenpair solve_eigenpair(const EigenOptions& opt) {
    if (!(opt.Z >= 8.0) || opt.n_z < 1024 || opt.n_z % 2 != 0 || opt.substeps < 1)
        throw Error(ErrorKind::BadParameters, "eigen solve needs Z >= 8 and an even n_z >= 1024");
    const double Z = opt.Z;
    const int half = opt.n_z / 2;
    // Coarse scan of the matching defect over the search box.
    std::vector<std::pair<double, cplx>> scan;
    const int ns = 13;
    for (int a = 0; a < ns; ++a)
        for (int b = 0; b < ns; ++b) {
            const cplx t(-3.0 + 6.0 * a / (ns - 1), -3.0 + 2.95 * b / (ns - 1));
            const double d = scan_defect(t, Z, std::min(half, 1024));
            if (std::isfinite(d)) scan.emplace_back(d, t);
        }
    std::sort(scan.begin(), scan.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    NewtonResult root;
    for (std::size_t k = 0; k < std::min<std::size_t>(6, scan.size()); ++k) {
        auto r = match(scan[k].second, Z, half, opt.substeps);
        if (r.ok && r.tau.imag() < 0.0 && std::abs(r.tau.real()) <= 3.0 && r.tau.imag() >= -3.0) {
            root = r;
            break;
        }
    }
    if (!root.ok) throw Error(ErrorKind::EigenpairNotFound, "no matching root with Im tau < 0 in the search box");

    Eigenpair p;
    p.tau = root.tau;
    p.Z = Z;
    p.n_z = opt.n_z;
    p.z = num::linspace(-Z, Z, opt.n_z + 1);
    p.z[half] = 0.0;
    std::vector<Jet3> left, right;
    const auto s = shoot(p.tau, Z, half, opt.substeps, &left, &right);
    const cplx la = root.alpha / s.left[0], rb = root.beta / s.right[0];
    p.V.resize(opt.n_z + 1);
    for (int j = 0; j < half; ++j)
        for (int c = 0; c < 3; ++c) p.V[j][c] = la * left[j][c];
    for (int c = 0; c < 3; ++c) p.V_left0[c] = la * left[half][c];
    for (int m = 0; m <= half; ++m)
        for (int c = 0; c < 3; ++c) p.V[opt.n_z - m][c] = rb * right[m][c];
    p.W.resize(opt.n_z + 1);
    for (int j = 0; j <= opt.n_z; ++j) {
        const cplx q = p.tau - p.z[j] * p.z[j];
        p.W[j] = p.V[j][0] / q + (j >= half ? 1.0 : 0.0);
    }
    p.boundary_defect = std::max(std::abs(p.W.front()), std::abs(p.W.back() - 1.0));
    p.residual = eigen_residual(p);
    if (opt.cross_validate) {
        p.tau_collocation = collocation_tau(Z, opt.collocation_nodes, p.tau);
        const double gap = std::abs(p.tau_collocation - p.tau);
        if (!(gap <= 1e-5)) {
            std::ostringstream os;
            os << "shooting and collocation disagree by " << gap;
            throw Error(ErrorKind::CrossValidationFailed, os.str());
        }
        p.cross_validated = true;
    }
    return p;
}

std::filesystem::path eigen_cache_path(const std::filesystem::path& dir, double Z, int n_z) {
    std::ostringstream os;
    os << "eigenpair_Z" << Z << "_n" << n_z << ".bin";
    return dir / os.str();
}

void save_eigenpair(const std::filesystem::path& path, const Eigenpair& p) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
    SnapshotHeader h;
    h.nx = 1;
    h.ny = static_cast<std::uint32_t>(p.n_z + 1);
    h.parity = Parity::complex;
    write_snapshot_header(os, h);
    put(os, p.Z);
    put_c(os, p.tau);
    put_c(os, p.tau_collocation);
    put(os, p.residual);
    put(os, p.boundary_defect);
    put(os, static_cast<std::uint8_t>(p.cross_validated));
    for (int j = 0; j <= p.n_z; ++j) {
        put_c(os, p.W[j]);
        for (int c = 0; c < 3; ++c) put_c(os, p.V[j][c]);
    }
    for (int c = 0; c < 3; ++c) put_c(os, p.V_left0[c]);
    if (!os) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::optional<Eigenpair> load_eigenpair(const std::filesystem::path& path, double Z, int n_z) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    const auto h = read_snapshot_header(is);
    if (h.nx != 1 || h.ny != static_cast<std::uint32_t>(n_z + 1) || h.parity != Parity::complex) return std::nullopt;
    Eigenpair p;
    p.Z = get<double>(is);
    if (p.Z != Z) return std::nullopt;
    p.n_z = n_z;
    p.tau = get_c(is);
    p.tau_collocation = get_c(is);
    p.residual = get<double>(is);
    p.boundary_defect = get<double>(is);
    p.cross_validated = get<std::uint8_t>(is) != 0;
    p.z = num::linspace(-Z, Z, n_z + 1);
    p.z[n_z / 2] = 0.0;
    p.W.resize(n_z + 1);
    p.V.resize(n_z + 1);
    for (int j = 0; j <= n_z; ++j) {
        p.W[j] = get_c(is);
        for (int c = 0; c < 3; ++c) p.V[j][c] = get_c(is);
    }
    for (int c = 0; c < 3; ++c) p.V_left0[c] = get_c(is);
    return p;
}

Eigenpair cached_eigenpair(const std::filesystem::path& dir, const EigenOptions& opt) {
    const auto path = eigen_cache_path(dir, opt.Z, opt.n_z);
    if (auto p = load_eigenpair(path, opt.Z, opt.n_z)) return *p;
    auto p = solve_eigenpair(opt);
    std::filesystem::create_directories(dir);
    save_eigenpair(path, p);
    return p;
}

}  // namespace mhdbl
