#pragma once

#include "nlslab/grid.hpp"

namespace nlslab {

/// Discrete counterpart of Fu(xi) = int e^{-2 i pi x.xi} u(x) dx with the
/// centered index convention on both sides.  The map is unitary between the
/// two quadrature-weighted L^2 norms.  This module owns the 2 pi convention;
/// everything downstream (propagator multipliers, tube directions 4 pi t xi0)
/// consumes it from here.
Field forward_transform(const Field& f);

/// Inverse of forward_transform; round trips are exact up to rounding.
Field inverse_transform(const Field& f_hat);

/// Free Schroedinger propagator T(t) = e^{it Laplace} at one fixed time:
/// multiplication by e^{-4 pi^2 i |xi|^2 t} in the frequency domain.
class Propagator {
public:
    Propagator(GridSpec spec, double t);

    double time() const { return t_; }
    const GridSpec& spec() const { return spec_; }
    /// Unit-modulus multiplier per frequency sample.
    std::span<const cplx> multiplier() const { return mult_; }

    /// Applies T(t) to a physical-domain field.
    Field apply(const Field& f) const;
    /// Applies the multiplier to an in-place frequency buffer.
    void apply_spectrum(std::vector<cplx>& hat) const;

private:
    GridSpec spec_;
    double t_;
    std::vector<cplx> mult_;
};

/// T(t) applied to a physical field (one-shot convenience).
Field free_evolve(const Field& f, double t);

/// One free-evolved snapshot per instant; t_list strictly increasing.
SpacetimeSeries evaluate_on_spacetime_grid(const Field& f,
                                           const std::vector<double>& t_list);

/// Spacetime L^q norm of T(.)g over the slab [t_list.front(), t_list.back()]
/// without materializing the series (parallel over slices).
double free_spacetime_norm(const Field& g, const std::vector<double>& t_list,
                           double q, int workers = 1);

/// Uniform time grid [-t_box, t_box] with `slices` samples.
std::vector<double> symmetric_times(double t_box, int slices);

/// L^2-scaling dilation rho^{-N/2} f(. / rho) for rho > 0, evaluated by
/// trigonometric resampling of the spectrum (per-axis matrices).  Frequencies
/// scaled past the Nyquist box are truncated.
Field dilate(const Field& f, double rho);

/// |xi|^2 per frequency sample (cached pattern helper for multipliers).
std::vector<double> frequency_norms_sq(const GridSpec& spec);

} // namespace nlslab
