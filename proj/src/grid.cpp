#include "nlslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace nlslab {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_finite(std::span<const cplx> v) {
    for (const cplx& z : v) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument("field contains non-finite samples");
    }
}

} // namespace

std::size_t GridSpec::size() const {
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(points);
    return n;
}

GridSpec make_grid(int dim, double extent, int points) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("grid dim must be in [1,3]");
    if (!(extent > 0.0))
        throw std::invalid_argument("grid extent must be positive");
    if (!is_pow2(points) || points < 8)
        throw std::invalid_argument("grid points must be a power of two >= 8");
    return GridSpec{dim, extent, points};
}

Field::Field(GridSpec spec, Domain domain)
    : spec_(spec), domain_(domain), values_(spec.size()) {}

Field::Field(GridSpec spec, Domain domain, std::vector<cplx> values)
    : spec_(spec), domain_(domain), values_(std::move(values)) {
    if (values_.size() != spec_.size())
        throw std::invalid_argument("field value count does not match grid");
    check_finite(values_);
}

Field sample(const GridSpec& spec, Domain domain,
             const std::function<cplx(const double*)>& fn) {
    std::vector<cplx> v(spec.size());
    const int m = spec.points;
    int idx[3] = {0, 0, 0};
    double x[3] = {0, 0, 0};
    for (std::size_t flat = 0; flat < v.size(); ++flat) {
        for (int a = 0; a < spec.dim; ++a) x[a] = spec.coord(idx[a], domain);
        v[flat] = fn(x);
        for (int a = spec.dim - 1; a >= 0; --a) {
            if (++idx[a] < m) break;
            idx[a] = 0;
        }
    }
    return Field(spec, domain, std::move(v));
}

void unflatten(const GridSpec& spec, std::size_t flat, int* idx) {
    for (int a = spec.dim - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % spec.points);
        flat /= spec.points;
    }
}

std::size_t flatten(const GridSpec& spec, const int* idx) {
    std::size_t flat = 0;
    for (int a = 0; a < spec.dim; ++a)
        flat = flat * spec.points + static_cast<std::size_t>(idx[a]);
    return flat;
}

Field roll(const Field& f, const std::array<int, 3>& cells) {
    const GridSpec& spec = f.spec();
    const int m = spec.points;
    std::vector<cplx> out(f.size());
    int idx[3];
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        unflatten(spec, flat, idx);
        int src[3];
        for (int a = 0; a < spec.dim; ++a) {
            int s = (idx[a] - cells[a]) % m;
            src[a] = s < 0 ? s + m : s;
        }
        out[flat] = f[flatten(spec, src)];
    }
    return Field(spec, f.domain(), std::move(out));
}

double lp_norm(const Field& f, double p) {
    if (p < 1.0)
        throw std::invalid_argument("lp_norm requires p >= 1");
    if (std::isinf(p)) {
        double mx = 0.0;
        for (const cplx& z : f.values()) mx = std::max(mx, std::abs(z));
        return mx;
    }
    const double w = std::pow(f.spec().step(f.domain()), f.spec().dim);
    double acc = 0.0;
    if (p == 2.0) {
        for (const cplx& z : f.values()) acc += std::norm(z);
    } else {
        for (const cplx& z : f.values()) acc += std::pow(std::abs(z), p);
    }
    return std::pow(w * acc, 1.0 / p);
}

double mass_sq(const Field& f) {
    const double w = std::pow(f.spec().step(f.domain()), f.spec().dim);
    double acc = 0.0;
    for (const cplx& z : f.values()) acc += std::norm(z);
    return w * acc;
}

void SpacetimeSeries::validate() const {
    if (times.size() != fields.size())
        throw std::invalid_argument("series times/fields length mismatch");
    if (times.empty())
        throw std::invalid_argument("empty series");
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i] < times[i + 1]))
            throw std::invalid_argument("series times must be strictly increasing");
    for (const Field& f : fields)
        if (!(f.spec() == fields.front().spec()))
            throw std::invalid_argument("series fields must share one grid");
}

std::vector<double> trapezoid_weights(const std::vector<double>& times) {
    std::vector<double> w(times.size(), 0.0);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        const double dt = times[i + 1] - times[i];
        w[i] += 0.5 * dt;
        w[i + 1] += 0.5 * dt;
    }
    return w;
}

double spacetime_lq_norm(const SpacetimeSeries& s, double q) {
    s.validate();
    if (s.times.size() < 2)
        throw std::invalid_argument("spacetime norm needs >= 2 instants");
    if (q < 1.0)
        throw std::invalid_argument("spacetime norm requires q >= 1");
    const std::vector<double> wt = trapezoid_weights(s.times);
    const GridSpec& spec = s.fields.front().spec();
    const double wx = std::pow(spec.step(Domain::physical), spec.dim);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.fields.size(); ++i) {
        double slice = 0.0;
        for (const cplx& z : s.fields[i].values())
            slice += std::pow(std::abs(z), q);
        acc += wt[i] * wx * slice;
    }
    return std::pow(acc, 1.0 / q);
}

namespace {
constexpr char kMagic[12] = {'N', 'L', 'S', 'L', 'A', 'B',
                             'F', 'I', 'E', 'L', 'D', '\0'};
constexpr std::uint32_t kVersion = 1;
} // namespace

void write_snapshot(const std::string& path, const Field& f) {
    if (f.domain() != Domain::physical)
        throw std::invalid_argument("snapshots store physical-domain fields");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.write(kMagic, sizeof(kMagic));
    auto put_u32 = [&](std::uint32_t v) {
        out.write(reinterpret_cast<const char*>(&v), 4);
    };
    put_u32(kVersion);
    put_u32(static_cast<std::uint32_t>(f.spec().dim));
    put_u32(static_cast<std::uint32_t>(f.spec().points));
    const double extent = f.spec().extent;
    out.write(reinterpret_cast<const char*>(&extent), 8);
    // interleaved re/im f64 pairs; this code targets little-endian hosts
    out.write(reinterpret_cast<const char*>(f.values().data()),
              static_cast<std::streamsize>(f.size() * sizeof(cplx)));
    if (!out) throw std::runtime_error("short write to " + path);
}

Field read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[12];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw std::runtime_error("bad snapshot magic in " + path);
    auto get_u32 = [&] {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    const std::uint32_t version = get_u32();
    if (version != kVersion)
        throw std::runtime_error("unsupported snapshot version in " + path);
    const int dim = static_cast<int>(get_u32());
    const int points = static_cast<int>(get_u32());
    double extent = 0.0;
    in.read(reinterpret_cast<char*>(&extent), 8);
    const GridSpec spec = make_grid(dim, extent, points);
    std::vector<cplx> v(spec.size());
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(cplx)));
    if (!in) throw std::runtime_error("truncated snapshot " + path);
    return Field(spec, Domain::physical, std::move(v));
}

} // namespace nlslab
