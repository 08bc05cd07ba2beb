#pragma once

#include "nlslab/dyadic.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/solver.hpp"

#include <array>
#include <cstdint>
#include <functional>

namespace nlslab {

/// Exponent bookkeeping for the refined Strichartz machinery:
/// q = 2(N+2)/N, the bilinear-restriction admissibility bound
/// 1/p' > (N+3)/(N+1) 1/q, and the (beta, mu) selection
///   beta = (max(2/q, p/2) + 1)/2,  mu = (1 - beta)/p.
struct ExponentSet {
    int dim = 1;
    double q = 6.0;
    long q_num = 6, q_den = 1; // exact rational q
    double p_min = 1.5;        // infimum of admissible p
    double p_default = 1.75;   // midpoint of (p_min, 2)
    double beta = 0.0;
    double mu = 0.0;
};

ExponentSet admissible_exponents(int dim);
double select_beta(double p, double q);
double select_mu(double p, double q);

/// Truncated spacetime evaluation domain t in [-t_box, t_box].
struct SpacetimeBox {
    double t_box = 8.0;
    int slices = 129;
};

/// Default dyadic scale window for spectra on this grid: cubes from the
/// full Nyquist box down to 4 frequency cells.
void default_spectral_window(const GridSpec& spec, int& j_min, int& j_max);

/// |T(.)g|_{L^q(box)} / |g|_2 with q = 2(N+2)/N.
double strichartz_ratio(const Field& g, const SpacetimeBox& box,
                        int workers = 1);

struct RefinedRatio {
    double lhs = 0.0;      // |T(.)g|_{L^q(box)}
    double sup_term = 0.0; // xpq_sup_term(g^, p) over the window
    DyadicCube sup_cube;
    double rhs = 0.0;      // sup_term^mu |g|_2^{1 - mu p}
    double ratio = 0.0;    // lhs / rhs: the empirical constant this g attains
};

/// Both sides of the refined Strichartz inequality for one input.
RefinedRatio refined_ratio(const Field& g, const ExponentSet& exps,
                           const SpacetimeBox& box, int workers = 1);

/// Calibrated empirical constant of the refined Strichartz inequality over
/// a fixed randomized family of frequency-localized inputs.  Cached per
/// (dim, p); deterministic for a given seed.
struct Calibration {
    int dim = 1;
    double p = 0.0;
    double mu = 0.0;
    double c_emp = 0.0; // max over the family of lhs / rhs
    int samples = 0;
    std::uint64_t seed = 0;
};

Calibration calibrate_refined_constant(int dim, double p, int samples,
                                       std::uint64_t seed,
                                       const SpacetimeBox& box,
                                       int workers = 1);
/// Default-parameter cached form used by the decomposition algorithms.
const Calibration& refined_calibration(int dim, double p);

/// One ball-mass measurement.
struct ConcentrationReport {
    double time = 0.0;
    double radius = 0.0;
    std::array<double, 3> center{};
    double mass_in_ball = 0.0;
    std::string rule_tag = "fixed";
};

/// sup_c int_{B(c,R)} |u|^2 over grid centers (FFT correlation with the
/// sharp ball indicator; ties resolved to the lexicographically smallest
/// center).  Requires R >= grid spacing.
ConcentrationReport concentration_scan(const Field& u, double radius);

/// Radius rules R(t) = lambda(T-t) sqrt(T-t); lambda presets.
using RadiusRule = std::function<double(double /*T - t*/)>;
RadiusRule fixed_radius_rule();          // lambda = 1
RadiusRule log_radius_rule();            // lambda = |ln(T-t)|
RadiusRule power_radius_rule();          // lambda = (T-t)^{-1/4}

/// Scans every snapshot with t < t_est whose radius is resolvable.
std::vector<ConcentrationReport> concentration_series(
    const Trajectory& traj, double t_est, const RadiusRule& rule,
    const std::string& rule_tag);

/// Same scan over analytically generated snapshots (streaming; the ladder
/// fields are produced one at a time and discarded).
std::vector<ConcentrationReport> concentration_ladder(
    const std::function<Field(double)>& field_at, const std::vector<double>& times,
    double t_est, const RadiusRule& rule, const std::string& rule_tag);

/// Windowed concentration: maximizes ball mass at radius
/// R = min(sqrt(T1-t), sqrt(t-T0)) over snapshots inside (T0, T1); also
/// reports the window's spacetime norm eta.
struct WindowConcentration {
    double t0 = 0.0;
    ConcentrationReport report;
    double eta = 0.0;
};
WindowConcentration window_concentration(const Trajectory& traj, double T0,
                                         double T1);

/// Greedy left-to-right slab boundaries at which each full slab's spacetime
/// L^q norm equals eta0 (piecewise-linear inversion of the accumulated
/// q-power; returns interior breakpoints, empty when eta0 exceeds the total).
std::vector<double> partition_by_spacetime_norm(const Trajectory& traj,
                                                double eta0);

/// One entry of a symmetry-group sequence: scale, time shift, Galilean
/// velocity, spatial center.
struct ProfileParams {
    double rho = 1.0;
    double t0 = 0.0;
    std::array<double, 3> xi{};
    std::array<double, 3> x0{};
};

/// H(phi)(t) = T(t)[ e^{i(.).xi/2} T(-t0) rho^{-N/2} phi((. - x0)/rho) ].
Field apply_profile(const Field& phi, const ProfileParams& params, double t);
/// The t = 0 state of the profile (everything but the outer T(t)).
Field prepare_profile(const Field& phi, const ProfileParams& params);

/// The divergence score of Definition of orthogonal families:
/// rho1/rho2 + rho2/rho1 + |t1-t2|/rho1^2 + |(x1-x2)/rho1 + (t1 xi1 - t2 xi2)/rho1|.
double orthogonality_score(const ProfileParams& a, const ProfileParams& b,
                           int dim);

/// Mixed-product spacetime norms |H1_n(phi1) H2_n(phi2)|_{L^{(N+2)/N}(box)}
/// per family index; decays along orthogonal families.
std::vector<double> product_norm_decay(const Field& phi1, const Field& phi2,
                                       std::span<const ProfileParams> fam1,
                                       std::span<const ProfileParams> fam2,
                                       const SpacetimeBox& box,
                                       int workers = 1);

} // namespace nlslab
