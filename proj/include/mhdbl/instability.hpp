#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mhdbl/grid.hpp"
#include "mhdbl/shear.hpp"

namespace mhdbl {

/// (V, V', V'') at one point.
using Jet3 = std::array<cplx, 3>;

/// Solution of (τ−z²)²W' + i((τ−z²)W)''' = 0 with W(−∞) = 0, W(+∞) = 1.
struct Eigenpair {
    cplx tau{};
    double Z = 0.0;
    int n_z = 0;
    std::vector<double> z;  // n_z + 1 nodes on [−Z, Z]
    std::vector<cplx> W;
    /// Jets of V(z) = (τ−z²)W − 1_{z>0}(τ−z²); the center node holds the right limit.
    std::vector<Jet3> V;
    Jet3 V_left0{};  // left limit at z = 0
    /// Max one-step Taylor defect of the stored jets per unit z, relative to max |jet|.
    double residual = 0.0;
    double boundary_defect = 0.0;  // max(|W(−Z)|, |W(Z) − 1|)
    cplx tau_collocation{};
    bool cross_validated = false;

    /// V and its first two derivatives at any z; zero beyond ±Z. At z = 0 the
    /// right branch is used.
    Jet3 profile(double zq) const;
};

struct EigenOptions {
    double Z = 10.0;
    int n_z = 4096;
    int substeps = 4;  // RK4 steps per grid interval
    int collocation_nodes = 120;
    bool cross_validate = true;
};

Eigenpair solve_eigenpair(double Z, int n_z);
Eigenpair solve_eigenpair(const EigenOptions& opt);

/// Jet of the V equation V''' = i((τ−z²)V' + 2zV) carried from z0 to z0 + dz
/// by its Taylor series.
Jet3 taylor_propagate(cplx tau, double z0, const Jet3& y0, double dz);

/// Re-evaluates the Eigenpair residual from the stored jets.
double eigen_residual(const Eigenpair& p);

/// τ from Chebyshev collocation of Ṽ = V − χ(τ−z²) on [−Z, Z], χ = (1 + erf z)/2,
/// with Ṽ = Ṽ' = 0 at both ends; Newton on (Ṽ, τ) from tau0.
cplx collocation_tau(double Z, int nodes, cplx tau0);

/// Binary cache: snapshot header (nx = 1, ny = n_z + 1, complex), then Z, τ,
/// collocation τ, residual, boundary defect, flags, per-node W and V jets,
/// then the left jet at 0.
void save_eigenpair(const std::filesystem::path& path, const Eigenpair& p);
/// nullopt when the file is missing or keyed by a different (Z, n_z).
std::optional<Eigenpair> load_eigenpair(const std::filesystem::path& path, double Z, int n_z);
std::filesystem::path eigen_cache_path(const std::filesystem::path& dir, double Z, int n_z);
/// Loads from dir when cached, else solves and stores.
Eigenpair cached_eigenpair(const std::filesystem::path& dir, const EigenOptions& opt);

/// Approximate solution e^{ix/ε}(U, V, B1, B2)(t, y) of the linearized system.
struct GrowingMode {
    double epsilon = 0.0;
    double cutoff_width = 0.0;
    double amplitude = 1.0;
    std::vector<double> t_grid, y;
    /// Tables indexed [time][node].
    std::vector<std::vector<cplx>> U, V, B1, B2, W, Phi;
    std::vector<cplx> omega;
    std::vector<double> a, sigma0;
    /// ∫₀ᵗ σ₀ ds / √ε, and the phase e^{iε⁻¹∫₀ᵗ ω ds}.
    std::vector<double> growth_exponent;
    std::vector<cplx> phase;

    std::shared_ptr<const Eigenpair> pair;
    std::shared_ptr<const ShearProfile> profile;

    /// sup_y e^{αy}(|U|² + |B1|²)^{1/2} at time index n.
    double norm(std::size_t n, double alpha = 0.0) const;
};

/// φ(s): 1 on |s| ≤ width/2, 0 on |s| ≥ width. deriv = 0, 1, 2.
double mode_cutoff(double s, double width, int deriv = 0);

GrowingMode build_growing_mode(std::shared_ptr<const Eigenpair> pair, std::shared_ptr<const ShearProfile> profile,
                               double epsilon, const std::vector<double>& t_grid, double cutoff_width,
                               double amplitude = 1.0);

/// Remainder norms against C(ε^{-1/4} + ε^{-5/4}t⁴).
struct BoundCheck {
    double epsilon = 0.0;
    std::vector<double> t;
    /// sup_y e^{αy}|(R1, R2)(t, y)| · e^{−∫σ₀/√ε}.
    std::vector<double> norm;
    double c0 = 0.0;  // norm at the first time
    double c4 = 0.0;  // least squares of norm − c0 on t⁴
    double C = 0.0;   // max norm / (ε^{-1/4} + ε^{-5/4}t⁴)
};

struct Remainders {
    std::vector<std::vector<cplx>> R1, R2;  // [time][node], phase included
    BoundCheck bound_check;
};

struct RemainderOptions {
    double alpha = 0.0;
    /// Time derivatives by central differences of step dt_fd instead of the chain rule.
    bool fd_time = false;
    double dt_fd = 1e-4;
};

Remainders evaluate_remainders(const GrowingMode& mode, const RemainderOptions& opt = {});

struct RemainderExponents {
    double p_small_t = 0.0;  // slope of log c0 against log ε
    double p_t4 = 0.0;       // slope of log |c4| against log ε
};
RemainderExponents remainder_exponents(const std::vector<BoundCheck>& checks);

struct EvolveOptions {
    /// Advection is taken relative to this speed; only the phase changes.
    double frame_speed = 0.0;
    double alpha = 0.0;
    double cfl = 0.5;
    bool store_tables = true;
};

struct EvolveResult {
    std::vector<double> t;
    std::vector<std::vector<cplx>> u, b1;  // empty unless store_tables
    std::vector<double> norm;  // sup_y e^{αy}(|û|² + |b̂1|²)^{1/2}
    std::vector<double> l2;    // h Σ (|û|² + |b̂1|²)
};

/// One Fourier mode e^{ikx} of the linearized system on the profile's y grid,
/// Crank–Nicolson on all terms, v̂ and b̂2 from trapezoid integrals of −ik û, −ik b̂1.
EvolveResult linearized_evolve(const ShearProfile& profile, double k, const std::vector<cplx>& u0,
                               const std::vector<cplx>& b0, double T, double dt, const EvolveOptions& opt = {});

struct NormSeries {
    double epsilon = 0.0;
    std::vector<double> t, norm;
};

struct GrowthReport {
    std::vector<double> eps_list, fitted_sigma;
    double scaling_slope = 0.0;
    double r_squared = 0.0;
    /// (p_small_t, p_t4); NaN when no remainder sweep was run.
    std::array<double, 2> remainder_exponents{};
};

/// Fit window in units of ε^{1/4}.
struct FitWindow {
    double lo = 0.1, hi = 0.5;
};

/// σ(ε) from least squares on log norm over the window; slope of log σ against
/// log(1/√ε). A nonpositive σ leaves slope and r² at 0.
GrowthReport growth_rate_fit(const std::vector<NormSeries>& series, const FitWindow& window = {});

std::string growth_verdict(double scaling_slope);

struct InstabilityConfig {
    // Jet velocity profile.
    double U0 = 1.0, a = 5.0, curvature = -8.0, jet_width = 2.5;
    // Magnetic profile.
    MagneticProfile::Kind magnetic = MagneticProfile::Kind::degenerate;
    double B0 = 1.0, b_width = 2.0, delta0 = 0.5;

    std::vector<double> eps_list{1.0 / 16, 1.0 / 32, 1.0 / 64};
    /// Remainder sweep; empty skips it.
    std::vector<double> remainder_eps;
    int remainder_samples = 9;  // times s·ε^{1/4}, s uniform on [0, 1]

    double Z = 10.0;
    int n_z = 4096;
    int ny = 1601;
    double y_max = 16.0;
    double heat_dt = 1e-3;
    double cutoff_width = 3.5;
    double alpha = 0.0;
    FitWindow window{};
    int steps_per_window = 80;
    double cfl = 0.5;
};

struct EpsilonRun {
    double epsilon = 0.0;
    double dt = 0.0;
    NormSeries evolved;
    std::vector<double> mode_norm;  // constructed mode on the same times
    double sigma0_mean = 0.0;       // mean σ₀/√ε over the fit window
};

struct IllposednessResult {
    std::shared_ptr<const Eigenpair> pair;
    GrowthReport report;
    std::string verdict;
    std::vector<EpsilonRun> runs;
    std::vector<BoundCheck> remainder_checks;
};

std::shared_ptr<const ShearProfile> instability_profile(const InstabilityConfig& cfg, double t_max);

/// Eigenpair, modes, linearized evolutions and fits for every ε (in parallel
/// across ε), plus the optional remainder sweep. pair may be null.
IllposednessResult illposedness_experiment(const InstabilityConfig& cfg,
                                           std::shared_ptr<const Eigenpair> pair = nullptr);

}  // namespace mhdbl
