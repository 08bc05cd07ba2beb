#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nlslab {

using cplx = std::complex<double>;

/// Tag telling whether a field holds samples of u(x) or of its Fourier
/// transform u^(xi).  Both domains share the centered index convention:
/// sample i along an axis sits at coordinate (i - M/2) * step, where the
/// step is the grid spacing h = L/M in the physical domain and 1/L in the
/// frequency domain.
enum class Domain { physical, frequency };

/// Uniform periodic grid on the centered box [-L/2, L/2)^N.
struct GridSpec {
    int dim = 1;         // N
    double extent = 1.0; // physical side length L per axis
    int points = 8;      // samples M per axis, power of two

    double spacing() const { return extent / points; }
    double step(Domain d) const {
        return d == Domain::physical ? spacing() : 1.0 / extent;
    }
    /// Coordinate of sample index i along one axis in the given domain.
    double coord(int i, Domain d) const { return (i - points / 2) * step(d); }
    /// Half side of the sampled box in the given domain (Nyquist for frequency).
    double half_extent(Domain d) const { return (points / 2) * step(d); }
    std::size_t size() const;

    bool operator==(const GridSpec&) const = default;
};

/// Validates and builds a grid spec.  Throws std::invalid_argument on a
/// non-power-of-two point count, dim outside [1,3] or nonpositive extent.
GridSpec make_grid(int dim, double extent, int points);

/// Complex samples on a grid, tagged with their domain.  Values are stored
/// row-major with axis 0 slowest.  Fields are immutable value types: all
/// operations return new fields.
class Field {
public:
    Field(GridSpec spec, Domain domain);
    Field(GridSpec spec, Domain domain, std::vector<cplx> values);

    const GridSpec& spec() const { return spec_; }
    Domain domain() const { return domain_; }
    std::span<const cplx> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    const cplx& operator[](std::size_t i) const { return values_[i]; }

    /// Takes the sample buffer out of the field (used by in-place pipelines).
    std::vector<cplx> take() && { return std::move(values_); }

private:
    GridSpec spec_;
    Domain domain_;
    std::vector<cplx> values_;
};

/// Samples fn(x) at every grid point of the given domain.
Field sample(const GridSpec& spec, Domain domain,
             const std::function<cplx(const double*)>& fn);

/// Decomposes a flat index into per-axis indices (axis 0 slowest).
void unflatten(const GridSpec& spec, std::size_t flat, int* idx);
std::size_t flatten(const GridSpec& spec, const int* idx);

/// Circular shift by whole cells per axis; exact (pure permutation).
Field roll(const Field& f, const std::array<int, 3>& cells);

/// Riemann-sum L^p norm with the domain's own quadrature weight
/// (h^N in physical space, L^-N in frequency space); p = infinity is the
/// sample max.  Throws on p < 1.
double lp_norm(const Field& f, double p);

/// Squared L^2 norm, same quadrature.
double mass_sq(const Field& f);

/// Time-ordered snapshots sharing one grid.
struct SpacetimeSeries {
    std::vector<double> times;
    std::vector<Field> fields;

    void validate() const; // strictly increasing times, shared spec
};

/// Trapezoid-in-time, Riemann-in-space approximation of the norm of u over
/// the slab [times.front(), times.back()] x box.  Needs >= 2 instants.
double spacetime_lq_norm(const SpacetimeSeries& s, double q);

/// Trapezoid weights for a strictly increasing time list.
std::vector<double> trapezoid_weights(const std::vector<double>& times);

/// Binary snapshot: 16-byte magic+version header, then dim (u32),
/// points-per-axis (u32), extent (f64), then M^N interleaved little-endian
/// f64 pairs, row-major with axis 0 slowest.  Physical-domain fields only.
void write_snapshot(const std::string& path, const Field& f);
Field read_snapshot(const std::string& path);

} // namespace nlslab
