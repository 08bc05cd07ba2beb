#include "nlslab/solver.hpp"

#include "nlslab/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nlslab {

namespace {

// |u|^{4/N} per sample; integer powers special-cased for the hot loop.
inline double amp_pow(double norm_sq, int dim) {
    switch (dim) {
        case 1: return norm_sq * norm_sq;
        case 2: return norm_sq;
        default: return std::pow(norm_sq, 2.0 / dim);
    }
}

void half_phase(std::vector<cplx>& v, int dim, double gamma, double dt) {
    const double c = 0.5 * gamma * dt;
    for (cplx& z : v) z *= std::polar(1.0, c * amp_pow(std::norm(z), dim));
}

double sup_abs(std::span<const cplx> v) {
    double m = 0.0;
    for (const cplx& z : v) m = std::max(m, std::abs(z));
    return m;
}

double q_power(const Field& u, double q) {
    const double w = std::pow(u.spec().spacing(), u.spec().dim);
    double acc = 0.0;
    for (const cplx& z : u.values()) acc += std::pow(std::abs(z), q);
    return w * acc;
}

} // namespace

Field step(const Field& u, double dt, const SolverConfig& cfg) {
    const GridSpec& spec = u.spec();
    std::vector<cplx> v(u.values().begin(), u.values().end());
    half_phase(v, spec.dim, cfg.gamma, dt);
    std::vector<cplx> hat =
        forward_transform(Field(spec, Domain::physical, std::move(v))).take();
    Propagator(spec, dt).apply_spectrum(hat);
    v = inverse_transform(Field(spec, Domain::frequency, std::move(hat))).take();
    half_phase(v, spec.dim, cfg.gamma, dt);
    return Field(spec, Domain::physical, std::move(v)); // validates finiteness
}

Trajectory evolve(const Field& u0, double t_target, const SolverConfig& cfg) {
    if (!(cfg.dt_base > 0.0))
        throw std::invalid_argument("dt_base must be positive");
    if (!(t_target > 0.0))
        throw std::invalid_argument("t_target must be positive");
    const GridSpec& spec = u0.spec();
    const double mass0 = lp_norm(u0, 2.0);
    if (!(mass0 > 0.0)) throw std::invalid_argument("u0 must be nonzero");
    const double cutoff = cfg.amplitude_cutoff > 0.0
                              ? cfg.amplitude_cutoff
                              : 1.0 / (8.0 * spec.spacing());
    const double q = 2.0 * (spec.dim + 2.0) / spec.dim;

    Trajectory traj;
    traj.gamma = cfg.gamma;
    Field u = u0;
    double t = 0.0;
    double st_int = 0.0;
    double qpow_prev = q_power(u, q);
    double worst_drift = 0.0;

    auto record = [&](const Field& f, double time) {
        traj.series.times.push_back(time);
        traj.series.fields.push_back(f);
        const double m = lp_norm(f, 2.0);
        traj.mass_series.push_back(m);
        traj.amp_series.push_back(sup_abs(f.values()));
        traj.st_accum.push_back(st_int);
        worst_drift = std::max(worst_drift, std::abs(m - mass0) / mass0);
    };
    record(u, 0.0);
    if (traj.amp_series.front() > cutoff) {
        traj.truncated = true;
        return traj;
    }

    long step_count = 0;
    while (t < t_target * (1.0 - 1e-14)) {
        double dt = cfg.dt_base;
        if (cfg.dt_policy == DtPolicy::adaptive) {
            const double a = sup_abs(u.values());
            dt = cfg.dt_base / (1.0 + cfg.c_adapt * amp_pow(a * a, spec.dim));
        }
        dt = std::min(dt, t_target - t);
        Field next = u;
        try {
            next = step(u, dt, cfg);
        } catch (const std::invalid_argument&) {
            traj.valid = false; // non-finite samples: keep last valid state
            break;
        }
        u = std::move(next);
        t += dt;
        ++step_count;
        const double qpow = q_power(u, q);
        st_int += 0.5 * dt * (qpow_prev + qpow);
        qpow_prev = qpow;

        const double amp = sup_abs(u.values());
        if (amp > cutoff) {
            record(u, t);
            traj.truncated = true;
            break;
        }
        if (step_count % cfg.snapshot_stride == 0) record(u, t);
    }
    if (traj.series.times.back() < t - 1e-15) record(u, t);
    if (worst_drift > cfg.mass_drift_tol) traj.valid = false;
    return traj;
}

BlowupEstimate fit_blowup_time(const std::vector<double>& times,
                               const std::vector<double>& amps, int dim,
                               bool truncated, int tail) {
    BlowupEstimate est;
    const int n = static_cast<int>(times.size());
    const int k = std::min(tail, n);
    if (k < 8 || !truncated) return est; // unreliable
    bool monotone = true;
    for (int i = n - k + 1; i < n; ++i)
        monotone = monotone && amps[i] > amps[i - 1];

    // least squares y = a + m t with y = amp^{-2/N}
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = n - k; i < n; ++i) {
        const double x = times[i];
        const double y = std::pow(amps[i], -2.0 / dim);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double det = k * sxx - sx * sx;
    const double m = (k * sxy - sx * sy) / det;
    const double a = (sy - m * sx) / k;
    if (!(m < 0.0)) return est;
    est.t_est = -a / m;
    double rss = 0.0, scale = 0.0;
    for (int i = n - k; i < n; ++i) {
        const double y = std::pow(amps[i], -2.0 / dim);
        const double fit = a + m * times[i];
        rss += (y - fit) * (y - fit);
        scale += y * y;
    }
    est.fit_residual = std::sqrt(rss / scale);

    // measured growth exponent of |u|_inf against (T_est - t)
    double lx = 0, ly = 0, lxx = 0, lxy = 0;
    for (int i = n - k; i < n; ++i) {
        const double x = std::log(est.t_est - times[i]);
        const double y = std::log(amps[i]);
        lx += x; ly += y; lxx += x * x; lxy += x * y;
    }
    est.fit_exponent = (k * lxy - lx * ly) / (k * lxx - lx * lx);
    est.reliable = monotone && est.t_est > times.back();
    return est;
}

BlowupEstimate estimate_blowup_time(const Trajectory& traj, int tail) {
    return fit_blowup_time(traj.series.times, traj.amp_series,
                           traj.series.fields.empty()
                               ? 1
                               : traj.series.fields.front().spec().dim,
                           traj.truncated, tail);
}

double duhamel_residual(const Trajectory& traj, double t_a, double t_b) {
    const auto& times = traj.series.times;
    if (!(t_a < t_b))
        throw std::invalid_argument("duhamel_residual needs t_a < t_b");
    std::vector<std::size_t> nodes;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] >= t_a - 1e-12 && times[i] <= t_b + 1e-12)
            nodes.push_back(i);
    if (nodes.size() < 4)
        throw std::invalid_argument("duhamel_residual needs >= 4 nodes");
    if (std::abs(times[nodes.front()] - t_a) > 1e-9 ||
        std::abs(times[nodes.back()] - t_b) > 1e-9)
        throw std::invalid_argument("window endpoints must be snapshot times");

    const GridSpec& spec = traj.series.fields.front().spec();
    std::vector<double> node_times;
    for (std::size_t i : nodes) node_times.push_back(times[i]);
    const std::vector<double> w = trapezoid_weights(node_times);

    std::vector<cplx> acc =
        free_evolve(traj.series.fields[nodes.front()], t_b - t_a).take();
    const cplx igamma(0.0, traj.gamma);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Field& us = traj.series.fields[nodes[k]];
        std::vector<cplx> nl(us.values().begin(), us.values().end());
        for (cplx& z : nl) z *= amp_pow(std::norm(z), spec.dim);
        Field prop = free_evolve(Field(spec, Domain::physical, std::move(nl)),
                                 t_b - node_times[k]);
        const cplx cw = igamma * w[k];
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += cw * prop[i];
    }
    const Field& ub = traj.series.fields[nodes.back()];
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = ub[i] - acc[i];
    return lp_norm(Field(spec, Domain::physical, std::move(acc)), 2.0);
}

namespace {

double support_radius(const Field& q, double rel_thresh) {
    const GridSpec& spec = q.spec();
    double peak = 0.0;
    for (const cplx& z : q.values()) peak = std::max(peak, std::abs(z));
    const double thresh = rel_thresh * peak;
    double radius = 0.0;
    int idx[3];
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (std::abs(q[i]) <= thresh) continue;
        unflatten(spec, i, idx);
        for (int a = 0; a < spec.dim; ++a)
            radius = std::max(radius,
                              std::abs(spec.coord(idx[a], Domain::physical)));
    }
    return radius;
}

void apply_pseudoconformal_phase(std::vector<cplx>& v, const GridSpec& spec,
                                 double sigma) {
    // e^{i(|x|^2 / (4(t-T)) + 1/(T-t))} with sigma = T-t > 0
    int idx[3];
    for (std::size_t i = 0; i < v.size(); ++i) {
        unflatten(spec, i, idx);
        double r2 = 0.0;
        for (int a = 0; a < spec.dim; ++a) {
            const double x = spec.coord(idx[a], Domain::physical);
            r2 += x * x;
        }
        v[i] *= std::polar(1.0, -r2 / (4.0 * sigma) + 1.0 / sigma);
    }
}

} // namespace

Field pseudoconformal_field(const Field& q_profile, double t_blow, double t) {
    const double sigma = t_blow - t;
    if (!(sigma > 0.0))
        throw std::invalid_argument("pseudoconformal field needs t < T");
    const GridSpec& spec = q_profile.spec();
    if (sigma < 4.0 * spec.spacing())
        throw std::invalid_argument("pseudoconformal profile below resolution");
    if (sigma * support_radius(q_profile, 1e-9) > 0.45 * spec.extent)
        throw std::invalid_argument("pseudoconformal support exceeds the box");
    std::vector<cplx> v = dilate(q_profile, sigma).take();
    apply_pseudoconformal_phase(v, spec, sigma);
    return Field(spec, Domain::physical, std::move(v));
}

Field pseudoconformal_field(const RadialProfile& prof, const GridSpec& spec,
                            double t_blow, double t) {
    const double sigma = t_blow - t;
    if (!(sigma > 0.0))
        throw std::invalid_argument("pseudoconformal field needs t < T");
    if (sigma < 4.0 * spec.spacing())
        throw std::invalid_argument("pseudoconformal profile below resolution");
    const double amp = std::pow(sigma, -0.5 * spec.dim);
    std::vector<cplx> v(spec.size());
    int idx[3];
    for (std::size_t i = 0; i < v.size(); ++i) {
        unflatten(spec, i, idx);
        double r2 = 0.0;
        for (int a = 0; a < spec.dim; ++a) {
            const double x = spec.coord(idx[a], Domain::physical);
            r2 += x * x;
        }
        v[i] = amp * prof(std::sqrt(r2) / sigma) *
               std::polar(1.0, -r2 / (4.0 * sigma) + 1.0 / sigma);
    }
    return Field(spec, Domain::physical, std::move(v));
}

} // namespace nlslab
