#pragma once

#include "nlslab/grid.hpp"

namespace nlslab {

/// Converged ground state Q > 0 of -Laplace Q + Q = Q^{1+4/N} on a grid.
struct GroundState {
    Field q;          // physical domain, real positive samples
    double mass_sq;   // |Q|_2^2
    double residual;  // | -Laplace Q + Q - Q^{1+4/N} |_2 (spectral Laplacian)
    int iterations;
};

/// Spectral renormalization (Petviashvili) iteration
///   Q <- gamma^theta (1 - Laplace)^{-1} Q^{1+4/N},  theta = (N+4)/4,
/// started from a centered unit gaussian.  Throws on non-convergence.
GroundState petviashvili(const GridSpec& grid, double tol = 1e-10,
                         int max_iter = 800);

/// Cached |Q|_2^2 per dimension on a fixed default grid.
double q_mass(int dim);

/// Radial profile table from an independent shooting integration of
///   Q'' + (N-1)/r Q' - Q + Q^{1+4/N} = 0,  Q'(0) = 0,  Q(inf) = 0.
struct RadialProfile {
    int dim = 1;
    double dr = 1e-3;
    std::vector<double> values; // Q(k dr)
    double mass_sq = 0.0;       // |Q|_2^2 over R^N
    double amplitude = 0.0;     // Q(0)

    /// Cubic interpolation of Q(r); zero beyond the table.
    double operator()(double r) const;
};

RadialProfile radial_ground_state(int dim, double r_max = 20.0,
                                  double dr = 1e-3);

} // namespace nlslab
