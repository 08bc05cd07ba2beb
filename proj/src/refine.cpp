#include "nlslab/refine.hpp"

#include "nlslab/parallel.hpp"
#include "nlslab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace nlslab {

namespace {

constexpr double kPi = std::numbers::pi;

int pow2_floor_log2(double v) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::runtime_error("amplitude scale out of range");
    return static_cast<int>(std::floor(std::log2(v)));
}

double resolve_p(const RefineConfig& cfg, int dim) {
    if (cfg.p > 0.0) {
        if (!(cfg.p > 1.0 && cfg.p < 2.0))
            throw std::invalid_argument("refine p must lie in (1,2)");
        return cfg.p;
    }
    return admissible_exponents(dim).p_default;
}

} // namespace

std::optional<Piece> extract_single(const Field& g, double eps,
                                    const RefineConfig& cfg) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    const GridSpec& spec = g.spec();
    const int dim = spec.dim;
    const double q = 2.0 * (dim + 2.0) / dim;
    const double st_norm = free_spacetime_norm(
        g, symmetric_times(cfg.t_box, cfg.slices), q, cfg.workers);
    if (st_norm < eps) return std::nullopt; // refusal: caller stops iterating

    const double p = resolve_p(cfg, dim);
    const double mu = select_mu(p, q);
    const double c_emp = refined_calibration(dim, p).c_emp;
    const double mass = lp_norm(g, 2.0);

    Field ghat = forward_transform(g);
    int j_min = 0, j_max = 0;
    default_spectral_window(spec, j_min, j_max);
    const SupTerm sup = xpq_sup_term(ghat, p, j_min, j_max);
    const int j = sup.cube.scale;

    // guaranteed lower bound for int_tau |g^|^p, then the threshold at which
    // the super-level part can hold at most half of it
    const double v_low =
        std::pow(eps / (c_emp * std::pow(mass, 1.0 - mu * p)), 1.0 / mu) *
        std::pow(2.0, -j * dim * 0.5 * (2.0 - p));
    const double m_thr =
        std::pow(v_low / (2.0 * mass * mass), 1.0 / (p - 2.0));

    std::vector<cplx> hat(ghat.values().begin(), ghat.values().end());
    double cut_max = 0.0;
    {
        const int m = spec.points;
        std::vector<char> in_axis(static_cast<std::size_t>(dim) * m);
        const double side = sup.cube.side();
        for (int a = 0; a < dim; ++a)
            for (int i = 0; i < m; ++i) {
                const double c = spec.coord(i, Domain::frequency);
                in_axis[static_cast<std::size_t>(a) * m + i] =
                    static_cast<std::int64_t>(std::floor(c / side)) ==
                    sup.cube.corner[a];
            }
        int idx[3] = {0, 0, 0};
        for (std::size_t i = 0; i < hat.size(); ++i) {
            bool keep = true;
            for (int a = 0; a < dim; ++a)
                keep = keep && in_axis[static_cast<std::size_t>(a) * m + idx[a]];
            keep = keep && std::abs(hat[i]) < m_thr;
            if (!keep) hat[i] = 0.0;
            else cut_max = std::max(cut_max, std::abs(hat[i]));
            for (int a = dim - 1; a >= 0; --a) {
                if (++idx[a] < m) break;
                idx[a] = 0;
            }
        }
    }
    bool fallback = false;
    if (cut_max == 0.0) {
        // the guaranteed half-mass bound failed (input outside the calibrated
        // family): fall back to the plain cube cut
        fallback = true;
        hat.assign(ghat.values().begin(), ghat.values().end());
        const int m = spec.points;
        const double side = sup.cube.side();
        int idx[3] = {0, 0, 0};
        for (std::size_t i = 0; i < hat.size(); ++i) {
            bool keep = true;
            for (int a = 0; a < dim; ++a) {
                const double c = spec.coord(idx[a], Domain::frequency);
                keep = keep &&
                       static_cast<std::int64_t>(std::floor(c / side)) ==
                           sup.cube.corner[a];
            }
            if (!keep) hat[i] = 0.0;
            else cut_max = std::max(cut_max, std::abs(hat[i]));
            for (int a = dim - 1; a >= 0; --a) {
                if (++idx[a] < m) break;
                idx[a] = 0;
            }
        }
        if (cut_max == 0.0) return std::nullopt; // argmax cube carries nothing
    }

    Piece piece{inverse_transform(Field(spec, Domain::frequency, std::move(hat))),
                sup.cube, 0, m_thr, 0.0, fallback};
    // A = 2^k with A^{-N/2} a strict upper bound for |h^|; the amplitude
    // bound is what the tube cover consumes, so use the tight one
    const double bound = std::min(m_thr, cut_max * (1.0 + 1e-12));
    piece.a_log2 = pow2_floor_log2(std::pow(bound, -2.0 / dim));
    piece.mass_sq = mass_sq(piece.f);
    return piece;
}

Decomposition decompose(const Field& f, double eps, int max_pieces,
                        const RefineConfig& cfg) {
    if (max_pieces < 0) throw std::invalid_argument("max_pieces < 0");
    Decomposition dec{{}, f, eps, false, 0.0};
    const double q = 2.0 * (f.spec().dim + 2.0) / f.spec().dim;
    const std::vector<double> times = symmetric_times(cfg.t_box, cfg.slices);
    while (true) {
        dec.residual_st_norm =
            free_spacetime_norm(dec.residual, times, q, cfg.workers);
        if (dec.residual_st_norm < eps) {
            dec.converged = true;
            break;
        }
        if (static_cast<int>(dec.pieces.size()) >= max_pieces) break;
        std::optional<Piece> piece = extract_single(dec.residual, eps, cfg);
        if (!piece) { // refusal and loop condition disagree only by quadrature
            dec.converged = true;
            break;
        }
        std::vector<cplx> r(dec.residual.values().begin(),
                            dec.residual.values().end());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= piece->f[i];
        dec.residual = Field(f.spec(), Domain::physical, std::move(r));
        dec.pieces.push_back(std::move(*piece));
    }
    return dec;
}

bool Tube::contains(double t, const double* x) const {
    const double ilen = interval_length();
    if (!(t >= t_cell * ilen && t < (t_cell + 1) * ilen)) return false;
    const double side = cube_side();
    for (int a = 0; a < dim; ++a) {
        const double y = x[a] - 4.0 * kPi * t * xi0[a];
        if (!(y >= x_cell[a] * side && y < (x_cell[a] + 1) * side))
            return false;
    }
    return true;
}

TubeCover tube_cover(const Piece& piece, double eps, const RefineConfig& cfg) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    const GridSpec& spec = piece.f.spec();
    const int dim = spec.dim;
    const double q = 2.0 * (dim + 2.0) / dim;
    const double a = piece.amplitude_scale();
    const double inv_a2 = std::ldexp(1.0, -2 * piece.a_log2);
    double xi0[3] = {0, 0, 0};
    for (int d = 0; d < dim; ++d) xi0[d] = piece.cube.center(d);

    // Rescaled time grid t' in [-T, T], original t = t'/A^2; one unit cell in
    // (t', x') is one tube.
    const int slices = cfg.tube_slices;
    std::vector<double> tprime = symmetric_times(cfg.tube_t_box, slices);
    std::vector<double> wt = trapezoid_weights(tprime);
    const double wx = std::pow(spec.spacing(), dim);
    const double amp_rescale = std::pow(a, -0.5 * dim);

    const std::size_t n_samples = tprime.size() * spec.size();
    std::vector<std::uint64_t> cell(n_samples);
    std::vector<double> qw(n_samples);
    std::vector<double> amp(n_samples);

    const Field ghat = forward_transform(piece.f);
    parallel_for(tprime.size(), cfg.workers, [&](std::size_t s) {
        const double t = tprime[s] * inv_a2;
        std::vector<cplx> hat(ghat.values().begin(), ghat.values().end());
        Propagator prop(spec, t);
        prop.apply_spectrum(hat);
        Field u = inverse_transform(Field(spec, Domain::frequency, std::move(hat)));
        const auto n_t = static_cast<std::int64_t>(std::floor(tprime[s]));
        int idx[3];
        for (std::size_t i = 0; i < u.size(); ++i) {
            unflatten(spec, i, idx);
            std::uint64_t key = static_cast<std::uint64_t>(n_t + 512) & 0x3ff;
            for (int d = 0; d < dim; ++d) {
                const double xp =
                    a * (spec.coord(idx[d], Domain::physical) -
                         4.0 * kPi * t * xi0[d]);
                const auto n_x = static_cast<std::int64_t>(std::floor(xp));
                if (n_x < -(1 << 17) || n_x >= (1 << 17))
                    throw std::runtime_error("tube cell index out of range");
                key = (key << 18) | (static_cast<std::uint64_t>(n_x + (1 << 17)) &
                                     0x3ffff);
            }
            const std::size_t flat = s * spec.size() + i;
            cell[flat] = key;
            const double mag = std::abs(u[i]);
            qw[flat] = wt[s] * inv_a2 * wx * std::pow(mag, q);
            amp[flat] = amp_rescale * mag;
        }
    });

    double amp_max = 0.0;
    for (double v : amp) amp_max = std::max(amp_max, v);

    std::unordered_map<std::uint64_t, double> cell_peak;
    cell_peak.reserve(1024);
    auto exterior_at = [&](double lambda, std::size_t* count) {
        cell_peak.clear();
        for (std::size_t i = 0; i < n_samples; ++i) {
            auto& peak = cell_peak[cell[i]];
            peak = std::max(peak, amp[i]);
        }
        double ext = 0.0;
        std::size_t covered = 0;
        for (const auto& [key, peak] : cell_peak)
            if (peak >= 2.0 * lambda) ++covered;
        for (std::size_t i = 0; i < n_samples; ++i)
            if (cell_peak[cell[i]] < 2.0 * lambda) ext += qw[i];
        if (count) *count = covered;
        return ext;
    };

    const double eps_q = std::pow(eps, q);
    double lo = 0.0, hi = amp_max; // exterior(0)=0 feasible, exterior(hi)=all
    std::size_t count = 0;
    if (exterior_at(hi, &count) < eps_q) {
        lo = hi; // even the empty cover is admissible
    } else {
        for (int it = 0; it < cfg.lambda_iters; ++it) {
            const double mid = 0.5 * (lo + hi);
            (exterior_at(mid, &count) < eps_q ? lo : hi) = mid;
        }
    }

    TubeCover cover;
    cover.lambda0 = lo;
    std::size_t n_tubes = 0;
    cover.exterior_norm = std::pow(exterior_at(lo, &n_tubes), 1.0 / q);
    if (n_tubes > static_cast<std::size_t>(cfg.max_tubes))
        throw std::runtime_error(
            "tube budget exceeded: achievable exterior with " +
            std::to_string(cfg.max_tubes) + " tubes is above eps");

    for (const auto& [key, peak] : cell_peak) {
        if (peak < 2.0 * lo) continue;
        Tube tube;
        tube.dim = dim;
        tube.a_log2 = piece.a_log2;
        for (int d = 0; d < dim; ++d) tube.xi0[d] = xi0[d];
        std::uint64_t k = key;
        for (int d = dim - 1; d >= 0; --d) {
            tube.x_cell[d] =
                static_cast<std::int64_t>(k & 0x3ffff) - (1 << 17);
            k >>= 18;
        }
        tube.t_cell = static_cast<std::int64_t>(k & 0x3ff) - 512;
        cover.tubes.push_back(tube);
    }
    std::sort(cover.tubes.begin(), cover.tubes.end(),
              [](const Tube& x, const Tube& y) {
                  if (x.t_cell != y.t_cell) return x.t_cell < y.t_cell;
                  return x.x_cell < y.x_cell;
              });
    return cover;
}

} // namespace nlslab
