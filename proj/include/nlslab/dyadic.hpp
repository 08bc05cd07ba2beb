#pragma once

#include "nlslab/grid.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>

namespace nlslab {

/// Half-closed dyadic cube tau_k^j = prod_m [k_m 2^-j, (k_m+1) 2^-j) with
/// side 2^-j.  Cube combinatorics (parents, adjacency, subdivision) are
/// exact integer arithmetic.
struct DyadicCube {
    int dim = 1;
    int scale = 0;                          // j
    std::array<std::int64_t, 3> corner{};   // k

    double side() const;
    double lower(int axis) const { return corner[axis] * side(); }
    double upper(int axis) const { return (corner[axis] + 1) * side(); }
    double center(int axis) const { return (corner[axis] + 0.5) * side(); }
    bool contains(const double* x) const;
    DyadicCube parent() const;

    bool operator==(const DyadicCube&) const = default;
};

/// Minimal Euclidean distance between two same-scale cubes.
double cube_distance(const DyadicCube& a, const DyadicCube& b);

/// The Whitney relation tau ~ tau': same scale, not adjacent, adjacent
/// parents.  Adjacency means every axis offset is in {-1,0,1}.
bool whitney_related(const DyadicCube& a, const DyadicCube& b);

struct CubePair {
    DyadicCube left;
    DyadicCube right;
};

/// Exponent parameters of the X_{p,q} norm with the truncated scale window.
struct XpqParams {
    double p;  // in (1,2)
    double q;  // > 2
    int j_min; // coarsest scale
    int j_max; // finest scale
};
XpqParams make_xpq_params(double p, double q, int j_min, int j_max);

/// Zeroes every sample outside the cube; idempotent.  A cube disjoint from
/// the sampled box yields a zero field.
Field cube_restrict(const Field& f, const DyadicCube& cube);

/// Truncated-scale X_{p,q} norm
///   [ sum_j 2^{j (N/2) ((2-p)/p) q} sum_k |f restricted to tau_k^j|_p^q ]^{1/q}
/// evaluated with the field's own quadrature (physical f or spectrum g^).
double xpq_norm(const Field& f, const XpqParams& params);

struct SupTerm {
    double value = 0.0;
    DyadicCube cube;
};

/// sup over (j,k) in the window of 2^{j N (2-p)/2} int_tau |f|^p, with the
/// attaining cube (ties: smallest j, then lexicographic corner).
SupTerm xpq_sup_term(const Field& f, double p, int j_min, int j_max);

/// Axis-aligned scan box [lo, hi)^N for cube enumeration.
struct ScanBox {
    double lo;
    double hi;
};

/// All ordered Whitney pairs at scales in [j_min, j_max] whose cubes meet
/// the box.  The relation is symmetric, so pairs appear in both orders.
std::vector<CubePair> whitney_pairs(int j_min, int j_max, const ScanBox& box,
                                    int dim);

/// Locates all window scales whose Whitney product contains (xi, eta);
/// the decomposition property says exactly one when the separation scale
/// lies inside the window.
std::vector<CubePair> whitney_locate(const double* xi, const double* eta,
                                     int j_min, int j_max, int dim);

/// Splits each cube of a Whitney pair into dyadic subcubes of sidelength
/// 2^{-(j+m_sub)} and returns every cross pair; their union covers the
/// input product exactly and their separation is at least 2^{-l+m_sub}
/// where l = j + m_sub.
std::vector<CubePair> refined_subdivision(const CubePair& pair, int m_sub);

/// Line-oriented cube serialization: one cube per line as "j k_1 ... k_N".
void write_cubes(std::ostream& out, std::span<const DyadicCube> cubes);
std::vector<DyadicCube> read_cubes(std::istream& in, int dim);

} // namespace nlslab
