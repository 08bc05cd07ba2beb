#pragma once

#include "nlslab/grid.hpp"
#include "nlslab/groundstate.hpp"

namespace nlslab {

enum class DtPolicy { fixed, adaptive };

/// Time integration parameters for i u_t + Laplace u + gamma |u|^{4/N} u = 0.
/// gamma = 0 is accepted as a test hook (the step degenerates to the free
/// propagator); the CLI rejects it.
struct SolverConfig {
    double gamma = 1.0;
    double dt_base = 1e-3;
    DtPolicy dt_policy = DtPolicy::fixed;
    double amplitude_cutoff = 0.0; // 0: use the 1/(8h) resolution heuristic
    int snapshot_stride = 16;
    double c_adapt = 0.05;         // adaptive law dt = dt_base/(1 + c |u|_inf^{4/N})
    double mass_drift_tol = 1e-6;
};

/// Snapshots plus per-snapshot diagnostics.  st_accum holds the running
/// integral int_0^t |u|_q^q with q = 2(N+2)/N, accumulated per step.
struct Trajectory {
    SpacetimeSeries series;
    std::vector<double> mass_series;
    std::vector<double> amp_series;
    std::vector<double> st_accum;
    bool truncated = false; // amplitude cutoff reached (blow-up suspected)
    bool valid = true;      // finite samples and mass drift within tolerance
    double gamma = 0.0;
};

/// One Strang step: half nonlinear phase, full free evolution, half phase.
Field step(const Field& u, double dt, const SolverConfig& cfg);

/// Integrates from u0 until t_target or the amplitude cutoff.
Trajectory evolve(const Field& u0, double t_target, const SolverConfig& cfg);

struct BlowupEstimate {
    double t_est = 0.0;
    double fit_exponent = 0.0; // measured growth rate of |u|_inf
    double fit_residual = 0.0;
    bool reliable = false;
};

/// Least-squares fit of |u|_inf^{-2/N} against t on the last `tail`
/// snapshots; exact for pseudoconformal blow-up.  Unreliable when the
/// trajectory is not truncated, the tail is not monotone, or the root falls
/// inside the observed window.
BlowupEstimate estimate_blowup_time(const Trajectory& traj, int tail = 12);
BlowupEstimate fit_blowup_time(const std::vector<double>& times,
                               const std::vector<double>& amps, int dim,
                               bool truncated, int tail = 12);

/// L^2 norm of u(t_b) - T(t_b - t_a) u(t_a)
///   - i gamma int_{t_a}^{t_b} T(t_b - s) {|u|^{4/N} u}(s) ds
/// with trapezoid quadrature on the snapshots in [t_a, t_b] (>= 4 nodes;
/// endpoints must be snapshot instants).
double duhamel_residual(const Trajectory& traj, double t_a, double t_b);

/// Exact blow-up oracle built from the ground state:
///   S(t,x) = (T-t)^{-N/2} e^{i(|x|^2/(4(t-T)) + 1/(T-t))} Q(x/(T-t)).
/// Throws when the rescaled profile does not fit the grid resolution/box.
Field pseudoconformal_field(const Field& q_profile, double t_blow, double t);

/// Same field sampled from a radial profile table (fast path for big grids).
Field pseudoconformal_field(const RadialProfile& prof, const GridSpec& spec,
                            double t_blow, double t);

} // namespace nlslab
