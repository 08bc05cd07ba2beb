#include "nlslab/spectral.hpp"

#include "nlslab/fft.hpp"
#include "nlslab/parallel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nlslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Parity of the index sum: the (-1)^{i1+...+iN} factor that converts between
// FFTW's corner-anchored transform and the centered convention.  Requires M
// divisible by 4, which make_grid guarantees (power of two >= 8).
void apply_checkerboard(std::vector<cplx>& v, const GridSpec& spec) {
    const int m = spec.points;
    const std::size_t n = v.size();
    if (spec.dim == 1) {
        for (std::size_t i = 1; i < n; i += 2) v[i] = -v[i];
        return;
    }
    int idx[3];
    for (std::size_t flat = 0; flat < n; ++flat) {
        unflatten(spec, flat, idx);
        int s = 0;
        for (int a = 0; a < spec.dim; ++a) s += idx[a];
        if (s & 1) v[flat] = -v[flat];
    }
    (void)m;
}

} // namespace

Field forward_transform(const Field& f) {
    if (f.domain() != Domain::physical)
        throw std::invalid_argument("forward_transform expects a physical field");
    std::vector<cplx> v(f.values().begin(), f.values().end());
    apply_checkerboard(v, f.spec());
    detail::dft(v, f.spec(), -1);
    apply_checkerboard(v, f.spec());
    const double scale = std::pow(f.spec().spacing(), f.spec().dim);
    for (cplx& z : v) z *= scale;
    return Field(f.spec(), Domain::frequency, std::move(v));
}

Field inverse_transform(const Field& f_hat) {
    if (f_hat.domain() != Domain::frequency)
        throw std::invalid_argument("inverse_transform expects a frequency field");
    std::vector<cplx> v(f_hat.values().begin(), f_hat.values().end());
    apply_checkerboard(v, f_hat.spec());
    detail::dft(v, f_hat.spec(), +1);
    apply_checkerboard(v, f_hat.spec());
    const double scale =
        std::pow(1.0 / f_hat.spec().extent, f_hat.spec().dim);
    for (cplx& z : v) z *= scale;
    return Field(f_hat.spec(), Domain::physical, std::move(v));
}

std::vector<double> frequency_norms_sq(const GridSpec& spec) {
    const int m = spec.points;
    std::vector<double> axis(m);
    for (int i = 0; i < m; ++i) {
        const double xi = spec.coord(i, Domain::frequency);
        axis[i] = xi * xi;
    }
    std::vector<double> out(spec.size());
    int idx[3];
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        unflatten(spec, flat, idx);
        double s = 0.0;
        for (int a = 0; a < spec.dim; ++a) s += axis[idx[a]];
        out[flat] = s;
    }
    return out;
}

Propagator::Propagator(GridSpec spec, double t) : spec_(spec), t_(t) {
    const std::vector<double> k2 = frequency_norms_sq(spec_);
    mult_.resize(k2.size());
    const double c = -kTwoPi * kTwoPi * t;
    for (std::size_t i = 0; i < k2.size(); ++i)
        mult_[i] = std::polar(1.0, c * k2[i]);
}

void Propagator::apply_spectrum(std::vector<cplx>& hat) const {
    if (hat.size() != mult_.size())
        throw std::invalid_argument("propagator/grid mismatch");
    for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= mult_[i];
}

Field Propagator::apply(const Field& f) const {
    if (!(f.spec() == spec_))
        throw std::invalid_argument("propagator/grid mismatch");
    std::vector<cplx> hat = forward_transform(f).take();
    apply_spectrum(hat);
    return inverse_transform(Field(spec_, Domain::frequency, std::move(hat)));
}

Field free_evolve(const Field& f, double t) {
    return Propagator(f.spec(), t).apply(f);
}

SpacetimeSeries evaluate_on_spacetime_grid(const Field& f,
                                           const std::vector<double>& t_list) {
    if (t_list.empty())
        throw std::invalid_argument("empty time list");
    for (std::size_t i = 0; i + 1 < t_list.size(); ++i)
        if (!(t_list[i] < t_list[i + 1]))
            throw std::invalid_argument("time list must be strictly increasing");
    const Field hat = forward_transform(f);
    SpacetimeSeries s;
    s.times = t_list;
    s.fields.reserve(t_list.size());
    for (double t : t_list) {
        std::vector<cplx> v(hat.values().begin(), hat.values().end());
        Propagator prop(f.spec(), t);
        prop.apply_spectrum(v);
        s.fields.push_back(
            inverse_transform(Field(f.spec(), Domain::frequency, std::move(v))));
    }
    return s;
}

double free_spacetime_norm(const Field& g, const std::vector<double>& t_list,
                           double q, int workers) {
    if (t_list.size() < 2)
        throw std::invalid_argument("free_spacetime_norm needs >= 2 instants");
    const Field hat = forward_transform(g);
    const std::vector<double> wt = trapezoid_weights(t_list);
    const double wx = std::pow(g.spec().step(Domain::physical), g.spec().dim);
    std::vector<double> slice_pow(t_list.size(), 0.0);
    parallel_for(t_list.size(), workers, [&](std::size_t i) {
        std::vector<cplx> v(hat.values().begin(), hat.values().end());
        Propagator prop(g.spec(), t_list[i]);
        prop.apply_spectrum(v);
        Field u = inverse_transform(Field(g.spec(), Domain::frequency, std::move(v)));
        double acc = 0.0;
        for (const cplx& z : u.values()) acc += std::pow(std::abs(z), q);
        slice_pow[i] = acc * wx;
    });
    double total = 0.0;
    for (std::size_t i = 0; i < slice_pow.size(); ++i) total += wt[i] * slice_pow[i];
    return std::pow(total, 1.0 / q);
}

std::vector<double> symmetric_times(double t_box, int slices) {
    if (slices < 2 || !(t_box > 0))
        throw std::invalid_argument("bad spacetime box");
    std::vector<double> t(slices);
    for (int i = 0; i < slices; ++i)
        t[i] = -t_box + 2.0 * t_box * i / (slices - 1);
    return t;
}

Field dilate(const Field& f, double rho) {
    if (!(rho > 0.0))
        throw std::invalid_argument("dilation scale must be positive");
    if (f.domain() != Domain::physical)
        throw std::invalid_argument("dilate expects a physical field");
    const GridSpec& spec = f.spec();
    const int m = spec.points;
    const double h = spec.spacing();
    const double nyquist = spec.half_extent(Domain::frequency);

    // Per-axis resampling matrix W[k][j] = h * e^{-2 i pi x_j * (rho xi_k)},
    // rows past the Nyquist box zeroed.  Applying it along every axis yields
    // hat(f)(rho xi) for the quadrature-defined transform.
    std::vector<cplx> w(static_cast<std::size_t>(m) * m);
    for (int k = 0; k < m; ++k) {
        const double xi = rho * spec.coord(k, Domain::frequency);
        if (std::abs(xi) >= nyquist) continue; // row stays zero: truncation
        for (int j = 0; j < m; ++j) {
            const double x = spec.coord(j, Domain::physical);
            w[static_cast<std::size_t>(k) * m + j] =
                std::polar(h, -kTwoPi * x * xi);
        }
    }

    std::vector<cplx> data(f.values().begin(), f.values().end());
    std::vector<cplx> next(data.size());
    // Apply along each axis in turn; axis a has stride points^(dim-1-a).
    for (int a = 0; a < spec.dim; ++a) {
        std::size_t stride = 1;
        for (int b = a + 1; b < spec.dim; ++b) stride *= m;
        const std::size_t outer = data.size() / (static_cast<std::size_t>(m) * stride);
        for (std::size_t o = 0; o < outer; ++o) {
            const std::size_t base = o * m * stride;
            for (std::size_t s = 0; s < stride; ++s) {
                for (int k = 0; k < m; ++k) {
                    cplx acc = 0.0;
                    const cplx* row = &w[static_cast<std::size_t>(k) * m];
                    for (int j = 0; j < m; ++j)
                        acc += row[j] * data[base + static_cast<std::size_t>(j) * stride + s];
                    next[base + static_cast<std::size_t>(k) * stride + s] = acc;
                }
            }
        }
        data.swap(next);
    }
    const double amp = std::pow(rho, 0.5 * spec.dim);
    for (cplx& z : data) z *= amp;
    return inverse_transform(Field(spec, Domain::frequency, std::move(data)));
}

} // namespace nlslab
