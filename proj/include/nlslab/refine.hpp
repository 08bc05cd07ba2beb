#pragma once

#include "nlslab/diagnostics.hpp"
#include "nlslab/dyadic.hpp"
#include "nlslab/grid.hpp"

#include <optional>

namespace nlslab {

/// Parameters shared by the decomposition algorithms.  The spacetime boxes
/// are the quadrature domains of every L^q(R x R^N) norm here: t in
/// [-t_box, t_box] in physical units for the greedy loop, and in rescaled
/// units (where tubes are unit cells) for the cover.
struct RefineConfig {
    double p = 0.0; // 0: default admissible p for the dimension
    double t_box = 8.0;
    int slices = 129;
    double tube_t_box = 8.0;
    int tube_slices = 129;
    int max_tubes = 4096;
    int lambda_iters = 40;
    int workers = 1;
};

/// One extracted piece: spectrum supported on `cube`, bounded by
/// max |f^| < A^{-N/2} with A = 2^{a_log2}.
struct Piece {
    Field f;
    DyadicCube cube;
    int a_log2 = 0;         // A as a power of two (exact tube geometry)
    double threshold = 0.0; // the paper-formula threshold M
    double mass_sq = 0.0;
    bool fallback = false;  // threshold cut was empty; plain cube cut used

    double amplitude_scale() const { return std::ldexp(1.0, a_log2); }
};

/// Single-cube extraction: argmax of the sup-functional on g^, threshold
/// cut h^ = g^ chi_{tau & {|g^| < M}}.  Returns nothing when the free
/// evolution of g is already below eps on the configured box (refusal).
std::optional<Piece> extract_single(const Field& g, double eps,
                                    const RefineConfig& cfg = {});

/// Greedy decomposition: extract from the running residual until its free
/// evolution drops below eps or max_pieces is reached.
struct Decomposition {
    std::vector<Piece> pieces;
    Field residual;
    double epsilon = 0.0;
    bool converged = false;       // residual norm < eps on exit
    double residual_st_norm = 0.0;
};
Decomposition decompose(const Field& f, double eps, int max_pieces,
                        const RefineConfig& cfg = {});

/// Spacetime tube {t in I_n, x - 4 pi t xi0 in C_n} with |I_n| = 1/A^2 and
/// l(C_n) = 1/A held exactly (A a power of two, corners integer cells).
struct Tube {
    int dim = 1;
    int a_log2 = 0;
    std::array<double, 3> xi0{};
    std::int64_t t_cell = 0;
    std::array<std::int64_t, 3> x_cell{};

    double a() const { return std::ldexp(1.0, a_log2); }
    double interval_length() const { return std::ldexp(1.0, -2 * a_log2); }
    double cube_side() const { return std::ldexp(1.0, -a_log2); }
    double interval_lo() const { return t_cell * interval_length(); }
    double cube_lo(int axis) const { return x_cell[axis] * cube_side(); }
    bool contains(double t, const double* x) const;
};

struct TubeCover {
    std::vector<Tube> tubes;
    double lambda0 = 0.0;        // selected level (rescaled amplitude)
    double exterior_norm = 0.0;  // spacetime L^q norm outside the tubes
};

/// Level-set tube cover of T(.)g for a piece: bisects the level lambda0 so
/// the rescaled super-level cells capture all but eps of the spacetime
/// L^{2(N+2)/N} norm over the box.  Throws when more than max_tubes cells
/// would be needed (reporting the achievable floor).
TubeCover tube_cover(const Piece& piece, double eps,
                     const RefineConfig& cfg = {});

} // namespace nlslab
