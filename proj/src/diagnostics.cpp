#include "nlslab/diagnostics.hpp"

#include "nlslab/fft.hpp"
#include "nlslab/parallel.hpp"
#include "nlslab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

namespace nlslab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
} // namespace

double select_beta(double p, double q) {
    return 0.5 * (std::max(2.0 / q, 0.5 * p) + 1.0);
}

double select_mu(double p, double q) { return (1.0 - select_beta(p, q)) / p; }

ExponentSet admissible_exponents(int dim) {
    if (dim < 1 || dim > 4)
        throw std::invalid_argument("exponents defined for dim in [1,4]");
    ExponentSet e;
    e.dim = dim;
    // q = 2(N+2)/N in lowest terms
    long num = 2L * (dim + 2), den = dim;
    const long g = std::gcd(num, den);
    e.q_num = num / g;
    e.q_den = den / g;
    e.q = static_cast<double>(e.q_num) / static_cast<double>(e.q_den);
    // 1/p' = N(N+3) / (2(N+1)(N+2))  =>  p_min = 2(N+1)(N+2) / (...)
    const long a = 2L * (dim + 1) * (dim + 2);
    const long b = static_cast<long>(dim) * (dim + 3);
    e.p_min = static_cast<double>(a) / static_cast<double>(a - b);
    e.p_default = 0.5 * (e.p_min + 2.0);
    e.beta = select_beta(e.p_default, e.q);
    e.mu = select_mu(e.p_default, e.q);
    return e;
}

void default_spectral_window(const GridSpec& spec, int& j_min, int& j_max) {
    const double nyq_box = spec.points / spec.extent; // full frequency extent
    const double cell = 1.0 / spec.extent;
    j_min = -static_cast<int>(std::ceil(std::log2(nyq_box))) - 1;
    j_max = static_cast<int>(std::floor(std::log2(1.0 / (4.0 * cell)) + 1e-12));
}

double strichartz_ratio(const Field& g, const SpacetimeBox& box, int workers) {
    const double mass = lp_norm(g, 2.0);
    if (!(mass > 0.0))
        throw std::invalid_argument("strichartz_ratio needs nonzero input");
    const double q = 2.0 * (g.spec().dim + 2.0) / g.spec().dim;
    return free_spacetime_norm(g, symmetric_times(box.t_box, box.slices), q,
                               workers) /
           mass;
}

RefinedRatio refined_ratio(const Field& g, const ExponentSet& exps,
                           const SpacetimeBox& box, int workers) {
    const double mass = lp_norm(g, 2.0);
    if (!(mass > 0.0))
        throw std::invalid_argument("refined_ratio needs nonzero input");
    RefinedRatio r;
    r.lhs = free_spacetime_norm(g, symmetric_times(box.t_box, box.slices),
                                exps.q, workers);
    int j_min = 0, j_max = 0;
    default_spectral_window(g.spec(), j_min, j_max);
    const Field ghat = forward_transform(g);
    SupTerm st = xpq_sup_term(ghat, exps.p_default, j_min, j_max);
    r.sup_term = st.value;
    r.sup_cube = st.cube;
    r.rhs = std::pow(st.value, exps.mu) *
            std::pow(mass, 1.0 - exps.mu * exps.p_default);
    r.ratio = r.lhs / r.rhs;
    return r;
}

Calibration calibrate_refined_constant(int dim, double p, int samples,
                                       std::uint64_t seed,
                                       const SpacetimeBox& box, int workers) {
    if (samples < 1) throw std::invalid_argument("need at least one sample");
    ExponentSet exps = admissible_exponents(dim);
    if (p > 0.0) {
        if (!(p > 1.0 && p < 2.0))
            throw std::invalid_argument("calibration p must lie in (1,2)");
        exps.p_default = p;
        exps.beta = select_beta(p, exps.q);
        exps.mu = select_mu(p, exps.q);
    }
    const GridSpec grid =
        dim == 1 ? make_grid(1, 32.0, 512)
                 : (dim == 2 ? make_grid(2, 16.0, 128)
                             : make_grid(3, 8.0, 32));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double nyq = grid.half_extent(Domain::frequency);

    Calibration cal;
    cal.dim = dim;
    cal.p = exps.p_default;
    cal.mu = exps.mu;
    cal.samples = samples;
    cal.seed = seed;
    for (int s = 0; s < samples; ++s) {
        // random dyadic cube within the Nyquist box, random content on it
        const int j_lo = -static_cast<int>(std::floor(std::log2(nyq)));
        const int j_hi = static_cast<int>(
            std::floor(std::log2(grid.extent / 8.0) + 1e-12));
        const int j = j_lo + static_cast<int>(unif(rng) * (j_hi - j_lo + 1));
        const double side = std::ldexp(1.0, -j);
        DyadicCube cube{dim, j, {}};
        for (int a = 0; a < dim; ++a) {
            const auto kmax = static_cast<std::int64_t>(
                std::floor((nyq - side) / side));
            const auto kmin = static_cast<std::int64_t>(-nyq / side);
            cube.corner[a] =
                kmin + static_cast<std::int64_t>(unif(rng) * (kmax - kmin + 1));
        }
        std::vector<cplx> hat(grid.size(), 0.0);
        int idx[3];
        for (std::size_t i = 0; i < hat.size(); ++i) {
            unflatten(grid, i, idx);
            double xi[3];
            for (int a = 0; a < dim; ++a)
                xi[a] = grid.coord(idx[a], Domain::frequency);
            if (cube.contains(xi)) hat[i] = cplx(gauss(rng), gauss(rng));
        }
        Field g = inverse_transform(Field(grid, Domain::frequency, std::move(hat)));
        RefinedRatio r = refined_ratio(g, exps, box, workers);
        cal.c_emp = std::max(cal.c_emp, r.ratio);
    }
    return cal;
}

const Calibration& refined_calibration(int dim, double p) {
    static std::mutex mutex;
    static std::map<std::pair<int, long>, Calibration> cache;
    const long pkey = std::lround(p * 1e9);
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find({dim, pkey});
    if (it != cache.end()) return it->second;
    Calibration cal = calibrate_refined_constant(
        dim, p, 64, 0x9e3779b97f4a7c15ULL, SpacetimeBox{8.0, 65}, 1);
    return cache.emplace(std::make_pair(dim, pkey), std::move(cal))
        .first->second;
}

ConcentrationReport concentration_scan(const Field& u, double radius) {
    const GridSpec& spec = u.spec();
    if (u.domain() != Domain::physical)
        throw std::invalid_argument("concentration_scan expects physical field");
    if (!(radius >= spec.spacing()))
        throw std::invalid_argument("ball radius below one grid cell");
    const double w = std::pow(spec.spacing(), spec.dim);

    // mass(c) = (|u|^2 * chi_ball)(c) via the convolution theorem; the
    // periodic convolution realizes the torus metric.
    std::vector<cplx> a(u.size());
    double total = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double m = std::norm(u[i]);
        a[i] = m;
        total += m;
    }
    total *= w;
    Field ahat = forward_transform(Field(spec, Domain::physical, std::move(a)));
    Field chi = sample(spec, Domain::physical, [&](const double* x) {
        double r2 = 0.0;
        for (int i = 0; i < spec.dim; ++i) r2 += x[i] * x[i];
        return cplx(r2 < radius * radius ? 1.0 : 0.0, 0.0);
    });
    Field chihat = forward_transform(chi);
    std::vector<cplx> prod(u.size());
    for (std::size_t i = 0; i < prod.size(); ++i)
        prod[i] = ahat[i] * chihat[i];
    Field mass = inverse_transform(Field(spec, Domain::frequency, std::move(prod)));

    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        const double v = mass[i].real();
        if (v > best) {
            best = v;
            arg = i;
        }
    }
    ConcentrationReport rep;
    rep.radius = radius;
    rep.mass_in_ball = std::clamp(best, 0.0, total);
    int idx[3];
    unflatten(spec, arg, idx);
    for (int d = 0; d < spec.dim; ++d)
        rep.center[d] = spec.coord(idx[d], Domain::physical);
    return rep;
}

RadiusRule fixed_radius_rule() {
    return [](double sigma) { return std::sqrt(sigma); };
}
RadiusRule log_radius_rule() {
    return [](double sigma) {
        return std::abs(std::log(sigma)) * std::sqrt(sigma);
    };
}
RadiusRule power_radius_rule() {
    return [](double sigma) { return std::pow(sigma, 0.25); };
}

std::vector<ConcentrationReport> concentration_series(
    const Trajectory& traj, double t_est, const RadiusRule& rule,
    const std::string& rule_tag) {
    if (traj.series.times.empty() || t_est <= traj.series.times.back())
        throw std::invalid_argument(
            "concentration_series needs t_est past the last snapshot");
    std::vector<ConcentrationReport> out;
    const double h = traj.series.fields.front().spec().spacing();
    for (std::size_t i = 0; i < traj.series.times.size(); ++i) {
        const double t = traj.series.times[i];
        const double r = rule(t_est - t);
        if (!(r >= h)) continue;
        ConcentrationReport rep = concentration_scan(traj.series.fields[i], r);
        rep.time = t;
        rep.rule_tag = rule_tag;
        out.push_back(std::move(rep));
    }
    return out;
}

std::vector<ConcentrationReport> concentration_ladder(
    const std::function<Field(double)>& field_at,
    const std::vector<double>& times, double t_est, const RadiusRule& rule,
    const std::string& rule_tag) {
    std::vector<ConcentrationReport> out;
    for (double t : times) {
        if (!(t < t_est)) break;
        Field u = field_at(t);
        const double r = rule(t_est - t);
        if (!(r >= u.spec().spacing())) continue;
        ConcentrationReport rep = concentration_scan(u, r);
        rep.time = t;
        rep.rule_tag = rule_tag;
        out.push_back(std::move(rep));
    }
    return out;
}

namespace {

// piecewise-linear interpolation of the accumulated q-power at time t
double st_accum_at(const Trajectory& traj, double t) {
    const auto& ts = traj.series.times;
    const auto& acc = traj.st_accum;
    if (t <= ts.front()) return acc.front();
    if (t >= ts.back()) return acc.back();
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - ts.begin());
    const double f = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
    return acc[i - 1] + f * (acc[i] - acc[i - 1]);
}

} // namespace

WindowConcentration window_concentration(const Trajectory& traj, double T0,
                                         double T1) {
    const auto& ts = traj.series.times;
    if (!(T0 < T1)) throw std::invalid_argument("empty window");
    if (ts.size() < 2) throw std::invalid_argument("trajectory too short");
    double stride = (ts.back() - ts.front()) /
                    static_cast<double>(ts.size() - 1);
    if (T1 - T0 < 2.0 * stride)
        throw std::invalid_argument("window shorter than two snapshot strides");

    WindowConcentration best;
    bool found = false;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double t = ts[i];
        if (!(t > T0 && t < T1)) continue;
        const double r =
            std::min(std::sqrt(T1 - t), std::sqrt(t - T0));
        if (!(r >= traj.series.fields[i].spec().spacing())) continue;
        ConcentrationReport rep = concentration_scan(traj.series.fields[i], r);
        rep.time = t;
        rep.rule_tag = "window";
        if (!found || rep.mass_in_ball > best.report.mass_in_ball) {
            best.t0 = t;
            best.report = std::move(rep);
            found = true;
        }
    }
    if (!found)
        throw std::invalid_argument("no resolvable snapshot inside the window");
    const double q = 2.0 * (traj.series.fields.front().spec().dim + 2.0) /
                     traj.series.fields.front().spec().dim;
    best.eta =
        std::pow(std::max(0.0, st_accum_at(traj, T1) - st_accum_at(traj, T0)),
                 1.0 / q);
    return best;
}

std::vector<double> partition_by_spacetime_norm(const Trajectory& traj,
                                                double eta0) {
    if (!(eta0 > 0.0)) throw std::invalid_argument("eta0 must be positive");
    const auto& ts = traj.series.times;
    const auto& acc = traj.st_accum;
    const double q = 2.0 * (traj.series.fields.front().spec().dim + 2.0) /
                     traj.series.fields.front().spec().dim;
    const double slab_power = std::pow(eta0, q);
    std::vector<double> breaks;
    double target = slab_power;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        while (acc[i] >= target) {
            const double f = (target - acc[i - 1]) / (acc[i] - acc[i - 1]);
            breaks.push_back(ts[i - 1] + f * (ts[i] - ts[i - 1]));
            target += slab_power;
        }
    }
    return breaks;
}

Field prepare_profile(const Field& phi, const ProfileParams& params) {
    const GridSpec& spec = phi.spec();
    if (!(params.rho > 0.0))
        throw std::invalid_argument("profile scale must be positive");
    const double mass0 = lp_norm(phi, 2.0);
    Field psi = dilate(phi, params.rho);

    std::vector<cplx> hat = forward_transform(psi).take();
    const std::vector<double> k2 = frequency_norms_sq(spec);
    int idx[3];
    for (std::size_t i = 0; i < hat.size(); ++i) {
        unflatten(spec, i, idx);
        double dot = 0.0;
        for (int a = 0; a < spec.dim; ++a)
            dot += params.x0[a] * spec.coord(idx[a], Domain::frequency);
        // translation by x0 then T(-t0)
        hat[i] *= std::polar(1.0, -kTwoPi * dot +
                                      2.0 * kTwoPi * kPi * k2[i] * params.t0);
    }
    psi = inverse_transform(Field(spec, Domain::frequency, std::move(hat)));

    std::vector<cplx> v = std::move(psi).take();
    for (std::size_t i = 0; i < v.size(); ++i) {
        unflatten(spec, i, idx);
        double dot = 0.0;
        for (int a = 0; a < spec.dim; ++a)
            dot += params.xi[a] * spec.coord(idx[a], Domain::physical);
        v[i] *= std::polar(1.0, 0.5 * dot); // Galilean factor e^{i x.xi/2}
    }
    Field out(spec, Domain::physical, std::move(v));
    if (std::abs(lp_norm(out, 2.0) - mass0) > 1e-6 * mass0)
        throw std::runtime_error(
            "profile overflow: rescaled support exceeds the grid");
    return out;
}

Field apply_profile(const Field& phi, const ProfileParams& params, double t) {
    return free_evolve(prepare_profile(phi, params), t);
}

double orthogonality_score(const ProfileParams& a, const ProfileParams& b,
                           int dim) {
    double score = a.rho / b.rho + b.rho / a.rho +
                   std::abs(a.t0 - b.t0) / (a.rho * a.rho);
    double v2 = 0.0;
    for (int d = 0; d < dim; ++d) {
        const double c = (a.x0[d] - b.x0[d]) / a.rho +
                         (a.t0 * a.xi[d] - b.t0 * b.xi[d]) / a.rho;
        v2 += c * c;
    }
    return score + std::sqrt(v2);
}

std::vector<double> product_norm_decay(const Field& phi1, const Field& phi2,
                                       std::span<const ProfileParams> fam1,
                                       std::span<const ProfileParams> fam2,
                                       const SpacetimeBox& box, int workers) {
    if (fam1.size() != fam2.size())
        throw std::invalid_argument("families must have equal length");
    const GridSpec& spec = phi1.spec();
    const double r = (spec.dim + 2.0) / spec.dim;
    const std::vector<double> times = symmetric_times(box.t_box, box.slices);
    const std::vector<double> wt = trapezoid_weights(times);
    const double wx = std::pow(spec.spacing(), spec.dim);

    std::vector<double> out(fam1.size(), 0.0);
    for (std::size_t n = 0; n < fam1.size(); ++n) {
        const Field h1 = forward_transform(prepare_profile(phi1, fam1[n]));
        const Field h2 = forward_transform(prepare_profile(phi2, fam2[n]));
        std::vector<double> slice(times.size(), 0.0);
        parallel_for(times.size(), workers, [&](std::size_t k) {
            Propagator prop(spec, times[k]);
            std::vector<cplx> a(h1.values().begin(), h1.values().end());
            std::vector<cplx> b(h2.values().begin(), h2.values().end());
            prop.apply_spectrum(a);
            prop.apply_spectrum(b);
            Field ua = inverse_transform(Field(spec, Domain::frequency, std::move(a)));
            Field ub = inverse_transform(Field(spec, Domain::frequency, std::move(b)));
            double acc = 0.0;
            for (std::size_t i = 0; i < ua.size(); ++i)
                acc += std::pow(std::abs(ua[i]) * std::abs(ub[i]), r);
            slice[k] = acc * wx;
        });
        double total = 0.0;
        for (std::size_t k = 0; k < slice.size(); ++k) total += wt[k] * slice[k];
        out[n] = std::pow(total, 1.0 / r);
    }
    return out;
}

} // namespace nlslab
