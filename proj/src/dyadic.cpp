#include "nlslab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nlslab {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

// Per-scale cube sums of sum_{x in tau} |f(x)|^p * step^N, visited from the
// finest requested scale upward by exact index halving (floor(c/2s) =
// floor(floor(c/s)/2)).  visit(j, lo, hi, sums) sees a dense row-major array
// over corner offsets k - lo, one slot per cube meeting the sampled box.
class CubeSums {
public:
    CubeSums(const Field& f, double p, int j_min, int j_max)
        : spec_(f.spec()), j_min_(j_min), j_max_(j_max) {
        const double w = std::pow(spec_.step(f.domain()), spec_.dim);
        step_ = spec_.step(f.domain());
        pw_.resize(f.size());
        for (std::size_t i = 0; i < f.size(); ++i)
            pw_[i] = w * std::pow(std::abs(f[i]), p);
    }

    template <typename Visit>
    void run(Visit&& visit) const {
        const int m = spec_.points;
        const int dim = spec_.dim;

        // Finest-scale assignment per axis: k = floor(coord / side).
        const double side0 = std::ldexp(1.0, -j_max_);
        std::vector<std::int64_t> kaxis(m);
        const double ratio = side0 / step_;
        const std::int64_t r = std::llround(ratio);
        const bool integer_ratio =
            ratio >= 1.0 && std::abs(ratio - static_cast<double>(r)) < 1e-9;
        for (int i = 0; i < m; ++i) {
            const std::int64_t ci = i - m / 2;
            kaxis[i] = integer_ratio
                           ? floor_div(ci, r)
                           : static_cast<std::int64_t>(
                                 std::floor(ci * step_ / side0));
        }
        std::int64_t lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
        for (int a = 0; a < dim; ++a) {
            lo[a] = kaxis.front();
            hi[a] = kaxis.back();
        }
        auto slots = [&](const std::int64_t* l, const std::int64_t* h) {
            std::size_t n = 1;
            for (int a = 0; a < dim; ++a)
                n *= static_cast<std::size_t>(h[a] - l[a] + 1);
            return n;
        };

        std::vector<double> sums(slots(lo, hi), 0.0);
        {
            int idx[3] = {0, 0, 0};
            for (std::size_t flat = 0; flat < pw_.size(); ++flat) {
                std::size_t slot = 0;
                for (int a = 0; a < dim; ++a) {
                    const std::size_t n =
                        static_cast<std::size_t>(hi[a] - lo[a] + 1);
                    slot = slot * n +
                           static_cast<std::size_t>(kaxis[idx[a]] - lo[a]);
                }
                sums[slot] += pw_[flat];
                for (int a = dim - 1; a >= 0; --a) {
                    if (++idx[a] < m) break;
                    idx[a] = 0;
                }
            }
        }

        for (int j = j_max_;; --j) {
            visit(j, lo, hi, sums);
            if (j == j_min_) break;
            std::int64_t plo[3] = {0, 0, 0}, phi[3] = {0, 0, 0};
            for (int a = 0; a < dim; ++a) {
                plo[a] = floor_div(lo[a], 2);
                phi[a] = floor_div(hi[a], 2);
            }
            std::vector<double> parent(slots(plo, phi), 0.0);
            std::int64_t k[3] = {lo[0], lo[1], lo[2]};
            for (std::size_t s = 0; s < sums.size(); ++s) {
                std::size_t pslot = 0;
                for (int a = 0; a < dim; ++a) {
                    const std::size_t pn =
                        static_cast<std::size_t>(phi[a] - plo[a] + 1);
                    pslot = pslot * pn +
                            static_cast<std::size_t>(floor_div(k[a], 2) - plo[a]);
                }
                parent[pslot] += sums[s];
                for (int a = dim - 1; a >= 0; --a) {
                    if (++k[a] <= hi[a]) break;
                    k[a] = lo[a];
                }
            }
            sums.swap(parent);
            for (int a = 0; a < dim; ++a) {
                lo[a] = plo[a];
                hi[a] = phi[a];
            }
        }
    }

private:
    GridSpec spec_;
    int j_min_, j_max_;
    double step_;
    std::vector<double> pw_;
};

} // namespace

double DyadicCube::side() const { return std::ldexp(1.0, -scale); }

bool DyadicCube::contains(const double* x) const {
    const double s = side();
    for (int a = 0; a < dim; ++a) {
        if (static_cast<std::int64_t>(std::floor(x[a] / s)) != corner[a])
            return false;
    }
    return true;
}

DyadicCube DyadicCube::parent() const {
    DyadicCube p{dim, scale - 1, {}};
    for (int a = 0; a < dim; ++a) p.corner[a] = floor_div(corner[a], 2);
    return p;
}

double cube_distance(const DyadicCube& a, const DyadicCube& b) {
    if (a.scale != b.scale)
        throw std::invalid_argument("cube_distance expects one scale");
    const double s = a.side();
    double d2 = 0.0;
    for (int ax = 0; ax < a.dim; ++ax) {
        const std::int64_t dk = std::llabs(a.corner[ax] - b.corner[ax]);
        if (dk > 1) {
            const double gap = static_cast<double>(dk - 1) * s;
            d2 += gap * gap;
        }
    }
    return std::sqrt(d2);
}

bool whitney_related(const DyadicCube& a, const DyadicCube& b) {
    if (a.dim != b.dim || a.scale != b.scale) return false;
    bool adjacent = true;
    for (int ax = 0; ax < a.dim; ++ax)
        adjacent = adjacent && std::llabs(a.corner[ax] - b.corner[ax]) <= 1;
    if (adjacent) return false;
    const DyadicCube pa = a.parent(), pb = b.parent();
    for (int ax = 0; ax < a.dim; ++ax)
        if (std::llabs(pa.corner[ax] - pb.corner[ax]) > 1) return false;
    return true;
}

XpqParams make_xpq_params(double p, double q, int j_min, int j_max) {
    if (!(p > 1.0 && p < 2.0))
        throw std::invalid_argument("X_{p,q} requires 1 < p < 2");
    if (!(q > 2.0))
        throw std::invalid_argument("X_{p,q} requires q > 2");
    if (j_min > j_max)
        throw std::invalid_argument("empty scale window");
    return XpqParams{p, q, j_min, j_max};
}

Field cube_restrict(const Field& f, const DyadicCube& cube) {
    const GridSpec& spec = f.spec();
    if (cube.dim != spec.dim)
        throw std::invalid_argument("cube/grid dimension mismatch");
    const Domain dom = f.domain();
    const double s = cube.side();
    const int m = spec.points;
    std::vector<char> in_axis(static_cast<std::size_t>(spec.dim) * m);
    for (int a = 0; a < spec.dim; ++a) {
        for (int i = 0; i < m; ++i) {
            const double c = spec.coord(i, dom);
            in_axis[static_cast<std::size_t>(a) * m + i] =
                static_cast<std::int64_t>(std::floor(c / s)) == cube.corner[a];
        }
    }
    std::vector<cplx> v(f.values().begin(), f.values().end());
    int idx[3] = {0, 0, 0};
    for (std::size_t flat = 0; flat < v.size(); ++flat) {
        bool inside = true;
        for (int a = 0; a < spec.dim; ++a)
            inside = inside && in_axis[static_cast<std::size_t>(a) * m + idx[a]];
        if (!inside) v[flat] = 0.0;
        for (int a = spec.dim - 1; a >= 0; --a) {
            if (++idx[a] < m) break;
            idx[a] = 0;
        }
    }
    return Field(spec, dom, std::move(v));
}

double xpq_norm(const Field& f, const XpqParams& params) {
    CubeSums sums(f, params.p, params.j_min, params.j_max);
    const int dim = f.spec().dim;
    const double exp_per_j = dim * 0.5 * (2.0 - params.p) / params.p * params.q;
    const double qp = params.q / params.p;
    double total = 0.0;
    sums.run([&](int j, const std::int64_t*, const std::int64_t*,
                 const std::vector<double>& cubes) {
        double level = 0.0;
        for (double s : cubes)
            if (s > 0.0) level += std::pow(s, qp);
        total += std::pow(2.0, j * exp_per_j) * level;
    });
    return std::pow(total, 1.0 / params.q);
}

SupTerm xpq_sup_term(const Field& f, double p, int j_min, int j_max) {
    if (!(p > 1.0 && p < 2.0))
        throw std::invalid_argument("sup term requires 1 < p < 2");
    if (j_min > j_max)
        throw std::invalid_argument("empty scale window");
    CubeSums sums(f, p, j_min, j_max);
    const int dim = f.spec().dim;
    SupTerm best;
    best.value = -1.0;
    sums.run([&](int j, const std::int64_t* lo, const std::int64_t* hi,
                 const std::vector<double>& cubes) {
        const double weight = std::pow(2.0, j * dim * 0.5 * (2.0 - p));
        std::int64_t k[3] = {lo[0], lo[1], lo[2]};
        for (std::size_t s = 0; s < cubes.size(); ++s) {
            const double v = weight * cubes[s];
            if (v > best.value) {
                best.value = v;
                best.cube = DyadicCube{dim, j, {k[0], k[1], k[2]}};
            }
            for (int a = dim - 1; a >= 0; --a) {
                if (++k[a] <= hi[a]) break;
                k[a] = lo[a];
            }
        }
    });
    if (best.value < 0.0) best.value = 0.0;
    return best;
}

std::vector<CubePair> whitney_pairs(int j_min, int j_max, const ScanBox& box,
                                    int dim) {
    if (j_min > j_max) throw std::invalid_argument("empty scale window");
    if (!(box.lo < box.hi)) throw std::invalid_argument("empty scan box");
    std::vector<CubePair> out;
    for (int j = j_min; j <= j_max; ++j) {
        const double s = std::ldexp(1.0, -j);
        const auto klo = static_cast<std::int64_t>(std::floor(box.lo / s));
        const auto khi = static_cast<std::int64_t>(std::ceil(box.hi / s)) - 1;
        std::int64_t k[3] = {klo, klo, klo};
        for (;;) {
            DyadicCube a{dim, j, {k[0], k[1], k[2]}};
            // Partners live within +/-3 cells per axis (adjacent parents).
            std::int64_t d[3] = {-3, -3, -3};
            for (;;) {
                DyadicCube b{dim, j, {}};
                bool in_box = true;
                for (int ax = 0; ax < dim; ++ax) {
                    b.corner[ax] = k[ax] + d[ax];
                    in_box = in_box && b.corner[ax] >= klo && b.corner[ax] <= khi;
                }
                if (in_box && whitney_related(a, b)) out.push_back({a, b});
                int ax = 0;
                for (; ax < dim; ++ax) {
                    if (++d[ax] <= 3) break;
                    d[ax] = -3;
                }
                if (ax == dim) break;
            }
            int ax = 0;
            for (; ax < dim; ++ax) {
                if (++k[ax] <= khi) break;
                k[ax] = klo;
            }
            if (ax == dim) break;
        }
    }
    return out;
}

std::vector<CubePair> whitney_locate(const double* xi, const double* eta,
                                     int j_min, int j_max, int dim) {
    std::vector<CubePair> hits;
    for (int j = j_min; j <= j_max; ++j) {
        const double s = std::ldexp(1.0, -j);
        DyadicCube a{dim, j, {}}, b{dim, j, {}};
        for (int ax = 0; ax < dim; ++ax) {
            a.corner[ax] = static_cast<std::int64_t>(std::floor(xi[ax] / s));
            b.corner[ax] = static_cast<std::int64_t>(std::floor(eta[ax] / s));
        }
        if (whitney_related(a, b)) hits.push_back({a, b});
    }
    return hits;
}

std::vector<CubePair> refined_subdivision(const CubePair& pair, int m_sub) {
    if (m_sub < 0) throw std::invalid_argument("m_sub must be >= 0");
    const DyadicCube& L = pair.left;
    const DyadicCube& R = pair.right;
    if (!whitney_related(L, R))
        throw std::invalid_argument("refined_subdivision expects a Whitney pair");
    const int dim = L.dim;
    const int jj = L.scale + m_sub;
    const std::int64_t f = std::int64_t{1} << m_sub;

    auto children = [&](const DyadicCube& c) {
        std::vector<DyadicCube> kids;
        std::int64_t d[3] = {0, 0, 0};
        for (;;) {
            DyadicCube kid{dim, jj, {}};
            for (int ax = 0; ax < dim; ++ax)
                kid.corner[ax] = c.corner[ax] * f + d[ax];
            kids.push_back(kid);
            int ax = 0;
            for (; ax < dim; ++ax) {
                if (++d[ax] < f) break;
                d[ax] = 0;
            }
            if (ax == dim) break;
        }
        return kids;
    };

    std::vector<CubePair> out;
    const auto ls = children(L);
    const auto rs = children(R);
    out.reserve(ls.size() * rs.size());
    for (const DyadicCube& a : ls)
        for (const DyadicCube& b : rs) out.push_back({a, b});
    return out;
}

void write_cubes(std::ostream& out, std::span<const DyadicCube> cubes) {
    for (const DyadicCube& c : cubes) {
        out << c.scale;
        for (int a = 0; a < c.dim; ++a) out << ' ' << c.corner[a];
        out << '\n';
    }
}

std::vector<DyadicCube> read_cubes(std::istream& in, int dim) {
    std::vector<DyadicCube> cubes;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        DyadicCube c{dim, 0, {}};
        ls >> c.scale;
        for (int a = 0; a < dim; ++a) ls >> c.corner[a];
        if (!ls) throw std::runtime_error("malformed cube line: " + line);
        cubes.push_back(c);
    }
    return cubes;
}

} // namespace nlslab
