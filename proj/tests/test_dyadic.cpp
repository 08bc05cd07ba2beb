#include "doctest.h"

#include "nlslab/dyadic.hpp"
#include "nlslab/grid.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

using namespace nlslab;

namespace {

Field indicator_unit_cube(const GridSpec& spec) {
    return sample(spec, Domain::physical, [&](const double* x) {
        for (int a = 0; a < spec.dim; ++a)
            if (x[a] < 0.0 || x[a] >= 1.0) return cplx(0.0, 0.0);
        return cplx(1.0, 0.0);
    });
}

Field random_field(const GridSpec& spec, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<cplx> v(spec.size());
    for (cplx& z : v) z = cplx(g(rng), g(rng));
    return Field(spec, Domain::physical, std::move(v));
}

// Closed form of |chi_{[0,1)^N}|_{X_{p,q}}^q over all scales: two geometric
// series, coarse cubes (one cube per scale) and fine cubes (2^{jN} cubes of
// mass 2^{-jN}).
double indicator_xpq_qpower(int dim, double p, double q) {
    const double a = dim * 0.5 * (2.0 - p) / p * q;
    const double b = dim * (1.0 - q / 2.0);
    const double coarse = 1.0 / (1.0 - std::pow(2.0, -a));
    const double fine = std::pow(2.0, b) / (1.0 - std::pow(2.0, b));
    return coarse + fine;
}

} // namespace

TEST_CASE("cube_restrict produces indicators and is idempotent") {
    GridSpec s = make_grid(1, 2.0, 64);
    Field ones(s, Domain::physical, std::vector<cplx>(64, 1.0));
    DyadicCube unit{1, 0, {0, 0, 0}};
    Field r = cube_restrict(ones, unit);
    for (int i = 0; i < 64; ++i) {
        const double x = s.coord(i, Domain::physical);
        CHECK(r[i] == ((x >= 0.0 && x < 1.0) ? cplx(1.0) : cplx(0.0)));
    }
    Field rr = cube_restrict(r, unit);
    for (int i = 0; i < 64; ++i) CHECK(rr[i] == r[i]);

    DyadicCube far{1, 0, {37, 0, 0}};
    Field z = cube_restrict(ones, far);
    CHECK(lp_norm(z, 2.0) == 0.0);
}

TEST_CASE("same-scale cubes partition the mass exactly") {
    GridSpec s = make_grid(2, 2.0, 32);
    Field f = random_field(s, 19);
    const int j = 2; // side 1/4, 4 cells per cube side
    double total = 0.0;
    for (std::int64_t kx = -4; kx < 4; ++kx)
        for (std::int64_t ky = -4; ky < 4; ++ky)
            total += mass_sq(cube_restrict(f, DyadicCube{2, j, {kx, ky, 0}}));
    CHECK(total == doctest::Approx(mass_sq(f)).epsilon(1e-13));
}

TEST_CASE("unit-cube indicator X_{p,q} norm matches the two geometric series") {
    // N = 1
    {
        GridSpec s = make_grid(1, 2.0, 1024); // h = 2^-9
        Field f = indicator_unit_cube(s);
        XpqParams params = make_xpq_params(1.5, 10.0, -30, 9);
        const double got = xpq_norm(f, params);
        const double want = std::pow(indicator_xpq_qpower(1, 1.5, 10.0), 0.1);
        CHECK(std::abs(got - want) / want < 1e-12);
    }
    // N = 2
    {
        GridSpec s = make_grid(2, 2.0, 64); // h = 2^-5
        Field f = indicator_unit_cube(s);
        XpqParams params = make_xpq_params(1.5, 10.0, -20, 5);
        const double got = xpq_norm(f, params);
        const double want = std::pow(indicator_xpq_qpower(2, 1.5, 10.0), 0.1);
        CHECK(std::abs(got - want) / want < 1e-12);
    }
    GridSpec s = make_grid(1, 2.0, 64);
    CHECK(xpq_norm(Field(s, Domain::physical), make_xpq_params(1.5, 4.0, -8, 4)) ==
          0.0);
}

TEST_CASE("dyadic dilation rescales the X norm by 2^{N/2}") {
    for (int dim : {1, 2}) {
        const int m = dim == 1 ? 512 : 32;
        GridSpec fine = make_grid(dim, 4.0, m);
        GridSpec wide = make_grid(dim, 8.0, m);
        Field f = random_field(fine, 31);
        // g(x) = f(x/2) on the doubled box has identical samples.
        Field g(wide, Domain::physical,
                std::vector<cplx>(f.values().begin(), f.values().end()));
        XpqParams pf = make_xpq_params(1.4, 3.0, -6, 4);
        XpqParams pg = make_xpq_params(1.4, 3.0, -7, 3);
        const double scale = std::pow(2.0, 0.5 * dim);
        CHECK(xpq_norm(g, pg) ==
              doctest::Approx(scale * xpq_norm(f, pf)).epsilon(1e-10));
    }
}

TEST_CASE("sup term of the unit-cube indicator is 1 at (j,k) = (0,0)") {
    GridSpec s = make_grid(1, 2.0, 256);
    Field f = indicator_unit_cube(s);
    SupTerm st = xpq_sup_term(f, 1.5, -10, 7);
    CHECK(st.value == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(st.cube.scale == 0);
    CHECK(st.cube.corner[0] == 0);
}

TEST_CASE("sup term obeys the Hoelder bound and p-homogeneity") {
    GridSpec s = make_grid(2, 4.0, 32);
    const double p = 1.6;
    for (unsigned seed = 0; seed < 50; ++seed) {
        Field f = random_field(s, 100 + seed);
        SupTerm st = xpq_sup_term(f, p, -6, 3);
        const double bound = std::pow(lp_norm(f, 2.0), p);
        CHECK(st.value <= bound * (1.0 + 1e-12));
    }
    Field f = random_field(s, 5);
    std::vector<cplx> scaled(f.values().begin(), f.values().end());
    for (cplx& z : scaled) z *= 3.5;
    Field g(s, Domain::physical, std::move(scaled));
    CHECK(xpq_sup_term(g, p, -6, 3).value ==
          doctest::Approx(std::pow(3.5, p) * xpq_sup_term(f, p, -6, 3).value)
              .epsilon(1e-12));
}

TEST_CASE("log-refined truncations witness L2 != X_{p,q}") {
    // The L2 norm diverges like sqrt(ln ln (1/eps)) while the X norm stays
    // bounded, so the ratio grows along the deepening truncations.
    GridSpec s = make_grid(1, 1.0, 1 << 22); // h = 2^-22
    XpqParams params = make_xpq_params(1.5, 6.0, -4, 20);
    double prev = 0.0;
    for (double eps : {std::ldexp(1.0, -6), std::ldexp(1.0, -12),
                       std::ldexp(1.0, -18)}) {
        Field f = sample(s, Domain::physical, [&](const double* x) {
            if (x[0] <= eps || x[0] >= 0.5) return cplx(0.0);
            const double r = std::abs(x[0]);
            return cplx(1.0 / (std::sqrt(r) * std::sqrt(std::abs(std::log(r)))),
                        0.0);
        });
        const double ratio = lp_norm(f, 2.0) / xpq_norm(f, params);
        CHECK(ratio > prev);
        prev = ratio;
    }
}

TEST_CASE("whitney relation on the four child pairs of adjacent parents") {
    // Parents [0,1) and [1,2); children at scale 1 with side 1/2.
    DyadicCube c0{1, 1, {0, 0, 0}}; // [0, 1/2)
    DyadicCube c1{1, 1, {1, 0, 0}}; // [1/2, 1)
    DyadicCube c2{1, 1, {2, 0, 0}}; // [1, 3/2)
    DyadicCube c3{1, 1, {3, 0, 0}}; // [3/2, 2)
    CHECK(whitney_related(c0, c2));
    CHECK(whitney_related(c0, c3));
    CHECK(whitney_related(c1, c3));
    CHECK_FALSE(whitney_related(c1, c2)); // adjacent
    CHECK_FALSE(whitney_related(c0, c1)); // same parent, adjacent
    CHECK(whitney_related(c2, c0));       // symmetry
}

TEST_CASE("whitney pairs: symmetry and bounded partner counts") {
    for (int dim : {1, 2}) {
        auto pairs = whitney_pairs(0, 3, ScanBox{0.0, 2.0}, dim);
        CHECK(!pairs.empty());
        std::map<std::tuple<int, std::int64_t, std::int64_t, std::int64_t>, int>
            partner_count;
        for (const CubePair& pr : pairs) {
            CHECK(whitney_related(pr.left, pr.right));
            bool found = false;
            for (const CubePair& rp : pairs) {
                if (rp.left == pr.right && rp.right == pr.left) {
                    found = true;
                    break;
                }
            }
            CHECK(found);
            ++partner_count[{pr.left.scale, pr.left.corner[0], pr.left.corner[1],
                             pr.left.corner[2]}];
        }
        const int bound = static_cast<int>(std::pow(12.0, dim));
        for (const auto& [key, count] : partner_count) CHECK(count <= bound);
    }
}

TEST_CASE("whitney products cover off-diagonal points exactly once") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int dim = 2;
    const int j_min = 0, j_max = 12;
    int tested = 0;
    while (tested < 500) {
        double xi[3] = {u(rng), u(rng), 0.0};
        double eta[3] = {u(rng), u(rng), 0.0};
        double dmax = 0.0;
        for (int a = 0; a < dim; ++a)
            dmax = std::max(dmax, std::abs(xi[a] - eta[a]));
        // keep the separation scale well inside the window
        if (dmax < 64.0 * std::ldexp(1.0, -j_max) || dmax > 0.1) continue;
        ++tested;
        auto hits = whitney_locate(xi, eta, j_min, j_max, dim);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].left.contains(xi));
        CHECK(hits[0].right.contains(eta));
    }
}

TEST_CASE("refined subdivision covers the product with separated subcubes") {
    const int dim = 2;
    DyadicCube a{dim, 1, {0, 0, 0}};
    DyadicCube b{dim, 1, {2, 1, 0}};
    REQUIRE(whitney_related(a, b));
    const int m_sub = 2;
    auto subs = refined_subdivision({a, b}, m_sub);
    const int per_cube = 1 << (m_sub * dim);
    CHECK(static_cast<int>(subs.size()) == per_cube * per_cube);

    const int l = a.scale + m_sub;
    const double lower = std::ldexp(1.0, -l + m_sub); // parent separation
    const double upper = 4.0 * std::sqrt(dim) * std::ldexp(1.0, -l + m_sub);
    double measure = 0.0;
    for (const CubePair& pr : subs) {
        const double d = cube_distance(pr.left, pr.right);
        CHECK(d >= lower - 1e-12);
        CHECK(d < upper);
        measure += std::pow(pr.left.side(), dim) * std::pow(pr.right.side(), dim);
    }
    // union of products has the same measure as the input product
    CHECK(measure ==
          doctest::Approx(std::pow(a.side(), dim) * std::pow(b.side(), dim))
              .epsilon(1e-12));

    // degenerate subdivision keeps the original pair
    auto same = refined_subdivision({a, b}, 0);
    REQUIRE(same.size() == 1);
    CHECK(same[0].left == a);
    CHECK(same[0].right == b);
}

TEST_CASE("cube serialization round trip") {
    std::vector<DyadicCube> cubes = {{2, 3, {1, -4, 0}}, {2, -1, {0, 7, 0}}};
    std::ostringstream os;
    write_cubes(os, cubes);
    std::istringstream is(os.str());
    auto back = read_cubes(is, 2);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == cubes[0]);
    CHECK(back[1] == cubes[1]);
}
