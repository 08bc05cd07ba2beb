#include "nlslab/groundstate.hpp"

#include "nlslab/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace nlslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sphere_area(int dim) {
    switch (dim) {
        case 1: return 2.0;
        case 2: return kTwoPi;
        case 3: return 2.0 * kTwoPi;
        default: throw std::invalid_argument("dim out of range");
    }
}

} // namespace

GroundState petviashvili(const GridSpec& grid, double tol, int max_iter) {
    const int dim = grid.dim;
    const double alpha = 4.0 / dim;     // nonlinearity power |Q|^alpha Q
    const double theta = (dim + 4) / 4.0;
    const std::vector<double> k2 = frequency_norms_sq(grid);
    const double wx = std::pow(grid.spacing(), dim);
    const double wf = std::pow(1.0 / grid.extent, dim);

    Field q = sample(grid, Domain::physical, [&](const double* x) {
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
        return cplx(std::exp(-r2), 0.0);
    });

    double residual = 0.0;
    for (int iter = 1; iter <= max_iter; ++iter) {
        std::vector<double> w(q.size());
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double v = q[i].real();
            w[i] = std::pow(std::abs(v), alpha) * v;
        }
        std::vector<cplx> qhat = forward_transform(q).take();
        std::vector<cplx> what =
            forward_transform(
                Field(grid, Domain::physical,
                      std::vector<cplx>(w.begin(), w.end())))
                .take();

        // gamma = <(1-Laplace)Q, Q> / <Q^{1+alpha}, Q>; residual comes free
        // from the same spectra.
        double s = 0.0, r2 = 0.0;
        for (std::size_t i = 0; i < qhat.size(); ++i) {
            const double sym = 1.0 + kTwoPi * kTwoPi * k2[i];
            s += sym * std::norm(qhat[i]);
            r2 += std::norm(sym * qhat[i] - what[i]);
        }
        s *= wf;
        r2 *= wf;
        double p = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) p += w[i] * q[i].real();
        p *= wx;
        residual = std::sqrt(r2);
        if (residual < tol) {
            double m = 0.0;
            for (const cplx& z : q.values()) m += std::norm(z);
            return GroundState{q, m * wx, residual, iter};
        }

        const double gamma = s / p;
        const double g = std::pow(gamma, theta);
        for (std::size_t i = 0; i < what.size(); ++i)
            what[i] *= g / (1.0 + kTwoPi * kTwoPi * k2[i]);
        Field next = inverse_transform(
            Field(grid, Domain::frequency, std::move(what)));
        // the iterate is real and positive up to rounding
        std::vector<cplx> vals(next.size());
        for (std::size_t i = 0; i < next.size(); ++i)
            vals[i] = cplx(std::max(next[i].real(), 0.0), 0.0);
        q = Field(grid, Domain::physical, std::move(vals));
    }
    throw std::runtime_error("petviashvili did not converge: residual " +
                             std::to_string(residual));
}

double q_mass(int dim) {
    static std::mutex mutex;
    static std::map<int, double> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(dim);
    if (it != cache.end()) return it->second;
    GridSpec grid;
    double tol = 1e-10;
    switch (dim) {
        case 1: grid = make_grid(1, 32.0, 512); break;
        case 2: grid = make_grid(2, 32.0, 256); break;
        case 3: grid = make_grid(3, 20.0, 64); tol = 1e-6; break;
        default: throw std::invalid_argument("q_mass supports dim 1..3");
    }
    const double m = petviashvili(grid, tol).mass_sq;
    cache.emplace(dim, m);
    return m;
}

double RadialProfile::operator()(double r) const {
    r = std::abs(r);
    const double t = r / dr;
    const auto n = static_cast<std::ptrdiff_t>(values.size());
    const auto k = static_cast<std::ptrdiff_t>(t);
    if (k >= n - 1) return 0.0;
    // Catmull-Rom through the four neighbouring table entries.
    const double u = t - static_cast<double>(k);
    auto at = [&](std::ptrdiff_t i) {
        if (i < 0) i = -i; // even extension through r = 0
        return i < n ? values[static_cast<std::size_t>(i)] : 0.0;
    };
    const double p0 = at(k - 1), p1 = at(k), p2 = at(k + 1), p3 = at(k + 2);
    return p1 + 0.5 * u * (p2 - p0 +
                           u * (2 * p0 - 5 * p1 + 4 * p2 - p3 +
                                u * (3 * (p1 - p2) + p3 - p0)));
}

RadialProfile radial_ground_state(int dim, double r_max, double dr) {
    const double alpha = 4.0 / dim;
    // Q'' = Q - Q^{1+alpha} - (N-1)/r Q', started just off the origin with
    // the series Q(r) = a + r^2 (a - a^{1+alpha}) / (2N).
    auto rhs = [&](double r, double q, double v) {
        const double nl = std::pow(std::abs(q), alpha) * q;
        double acc = q - nl;
        if (dim > 1 && r > 0.0) acc -= (dim - 1) / r * v;
        return acc;
    };
    const double h = dr / 8.0;
    auto shoot = [&](double a, std::vector<double>* table) {
        double r = 1e-8;
        double q = a + r * r * (a - std::pow(a, 1.0 + alpha)) / (2.0 * dim);
        double v = r * (a - std::pow(a, 1.0 + alpha)) / dim;
        double next_record = 0.0;
        if (table) {
            table->clear();
            table->push_back(a);
            next_record = dr;
        }
        while (r < r_max) {
            const double k1q = v, k1v = rhs(r, q, v);
            const double k2q = v + 0.5 * h * k1v,
                         k2v = rhs(r + 0.5 * h, q + 0.5 * h * k1q,
                                   v + 0.5 * h * k1v);
            const double k3q = v + 0.5 * h * k2v,
                         k3v = rhs(r + 0.5 * h, q + 0.5 * h * k2q,
                                   v + 0.5 * h * k2v);
            const double k4q = v + h * k3v,
                         k4v = rhs(r + h, q + h * k3q, v + h * k3v);
            q += h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
            v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
            r += h;
            if (q < 0.0) return +1;       // overshoot: crossed zero
            if (q > 1.25 * a) return -1;  // undershoot: bounced back up
            if (table && r >= next_record - 0.25 * h) {
                table->push_back(q);
                next_record += dr;
            }
        }
        return -1; // never crossed zero: undershoot (bounded bounce)
    };

    double lo = 1.05, hi = 4.0;
    while (shoot(hi, nullptr) != +1) {
        hi *= 2.0;
        if (hi > 64.0) throw std::runtime_error("shooting bracket failed");
    }
    if (shoot(lo, nullptr) != -1)
        throw std::runtime_error("shooting bracket failed");
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (shoot(mid, nullptr) == +1 ? hi : lo) = mid;
    }
    RadialProfile prof;
    prof.dim = dim;
    prof.dr = dr;
    const double a = 0.5 * (lo + hi);
    shoot(a, &prof.values);
    // the diverging tail past the last clean decay is spurious; cut where the
    // profile stops decreasing and pad with zeros
    std::size_t cut = prof.values.size();
    for (std::size_t i = 1; i < prof.values.size(); ++i) {
        if (prof.values[i] > prof.values[i - 1]) {
            cut = i;
            break;
        }
    }
    prof.values.resize(static_cast<std::size_t>(r_max / dr) + 1, 0.0);
    for (std::size_t i = cut; i < prof.values.size(); ++i) prof.values[i] = 0.0;
    prof.amplitude = a;

    // |Q|_2^2 = area(S^{N-1}) int Q(r)^2 r^{N-1} dr by the trapezoid rule on
    // the table (the integrand vanishes to high order at both ends).
    double acc = 0.0;
    for (std::size_t i = 0; i < prof.values.size(); ++i) {
        const double r = static_cast<double>(i) * dr;
        const double g = prof.values[i] * prof.values[i] *
                         std::pow(r, dim - 1);
        acc += (i == 0 || i + 1 == prof.values.size()) ? 0.5 * g : g;
    }
    prof.mass_sq = sphere_area(dim) * acc * dr;
    return prof;
}

} // namespace nlslab
