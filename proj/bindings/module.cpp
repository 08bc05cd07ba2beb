#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlslab/diagnostics.hpp"
#include "nlslab/dyadic.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/groundstate.hpp"
#include "nlslab/refine.hpp"
#include "nlslab/solver.hpp"
#include "nlslab/spectral.hpp"

namespace py = pybind11;
using namespace nlslab;

namespace {

Field field_from_numpy(const GridSpec& spec, py::array_t<cplx> values,
                       Domain domain) {
    auto buf = values.request();
    if (static_cast<std::size_t>(buf.size) != spec.size())
        throw std::invalid_argument("array size does not match grid");
    const cplx* src = static_cast<const cplx*>(buf.ptr);
    py::array_t<cplx> contiguous =
        py::array_t<cplx, py::array::c_style | py::array::forcecast>(values);
    auto cbuf = contiguous.request();
    src = static_cast<const cplx*>(cbuf.ptr);
    return Field(spec, domain,
                 std::vector<cplx>(src, src + spec.size()));
}

py::array_t<cplx> field_to_numpy(const Field& f) {
    std::vector<py::ssize_t> shape(static_cast<std::size_t>(f.spec().dim),
                                   f.spec().points);
    py::array_t<cplx> out(shape);
    std::copy(f.values().begin(), f.values().end(),
              static_cast<cplx*>(out.request().ptr));
    return out;
}

SolverConfig solver_config(double gamma, double dt_base,
                           const std::string& policy, double cutoff,
                           int stride, double c_adapt, double drift_tol) {
    SolverConfig cfg;
    cfg.gamma = gamma;
    cfg.dt_base = dt_base;
    if (policy == "fixed") cfg.dt_policy = DtPolicy::fixed;
    else if (policy == "adaptive") cfg.dt_policy = DtPolicy::adaptive;
    else throw std::invalid_argument("dt_policy must be 'fixed' or 'adaptive'");
    cfg.amplitude_cutoff = cutoff;
    cfg.snapshot_stride = stride;
    cfg.c_adapt = c_adapt;
    cfg.mass_drift_tol = drift_tol;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "spectral laboratory for mass concentration in the "
              "L^2-critical nonlinear Schroedinger equation";

    py::enum_<Domain>(m, "Domain")
        .value("physical", Domain::physical)
        .value("frequency", Domain::frequency);

    py::class_<GridSpec>(m, "GridSpec")
        .def_readonly("dim", &GridSpec::dim)
        .def_readonly("extent", &GridSpec::extent)
        .def_readonly("points", &GridSpec::points)
        .def_property_readonly("spacing", &GridSpec::spacing)
        .def("coord", &GridSpec::coord)
        .def("__repr__", [](const GridSpec& s) {
            return "GridSpec(dim=" + std::to_string(s.dim) +
                   ", extent=" + std::to_string(s.extent) +
                   ", points=" + std::to_string(s.points) + ")";
        });
    m.def("make_grid", &make_grid, py::arg("dim"), py::arg("extent"),
          py::arg("points"));

    py::class_<Field>(m, "Field")
        .def_property_readonly("spec", &Field::spec)
        .def_property_readonly("domain", &Field::domain)
        .def("to_numpy", &field_to_numpy)
        .def("__len__", &Field::size);
    m.def("field", &field_from_numpy, py::arg("spec"), py::arg("values"),
          py::arg("domain") = Domain::physical);

    m.def("lp_norm", &lp_norm, py::arg("field"), py::arg("p"));
    m.def("mass_sq", &mass_sq);
    m.def("forward_transform", &forward_transform);
    m.def("inverse_transform", &inverse_transform);
    m.def("free_evolve", &free_evolve, py::arg("field"), py::arg("t"));
    m.def("dilate", &dilate, py::arg("field"), py::arg("rho"));
    m.def("free_spacetime_norm", &free_spacetime_norm, py::arg("field"),
          py::arg("times"), py::arg("q"), py::arg("workers") = 1);
    m.def("symmetric_times", &symmetric_times, py::arg("t_box"),
          py::arg("slices"));

    py::class_<DyadicCube>(m, "DyadicCube")
        .def(py::init([](int dim, int scale, std::vector<std::int64_t> corner) {
                 DyadicCube c{dim, scale, {}};
                 for (std::size_t a = 0; a < corner.size() && a < 3; ++a)
                     c.corner[a] = corner[a];
                 return c;
             }),
             py::arg("dim"), py::arg("scale"), py::arg("corner"))
        .def_readonly("dim", &DyadicCube::dim)
        .def_readonly("scale", &DyadicCube::scale)
        .def_property_readonly("corner",
                               [](const DyadicCube& c) {
                                   return std::vector<std::int64_t>(
                                       c.corner.begin(),
                                       c.corner.begin() + c.dim);
                               })
        .def_property_readonly("side", &DyadicCube::side)
        .def("center", &DyadicCube::center);

    m.def("cube_restrict", &cube_restrict);
    m.def("whitney_related", &whitney_related);
    m.def(
        "xpq_norm",
        [](const Field& f, double p, double q, int j_min, int j_max) {
            return xpq_norm(f, make_xpq_params(p, q, j_min, j_max));
        },
        py::arg("field"), py::arg("p"), py::arg("q"), py::arg("j_min"),
        py::arg("j_max"));
    m.def(
        "xpq_sup_term",
        [](const Field& f, double p, int j_min, int j_max) {
            SupTerm st = xpq_sup_term(f, p, j_min, j_max);
            return py::make_tuple(st.value, st.cube);
        },
        py::arg("field"), py::arg("p"), py::arg("j_min"), py::arg("j_max"));
    m.def(
        "whitney_pairs",
        [](int j_min, int j_max, double lo, double hi, int dim) {
            std::vector<std::pair<DyadicCube, DyadicCube>> out;
            for (const CubePair& p :
                 whitney_pairs(j_min, j_max, ScanBox{lo, hi}, dim))
                out.emplace_back(p.left, p.right);
            return out;
        },
        py::arg("j_min"), py::arg("j_max"), py::arg("lo"), py::arg("hi"),
        py::arg("dim"));
    m.def(
        "refined_subdivision",
        [](const DyadicCube& a, const DyadicCube& b, int m_sub) {
            std::vector<std::pair<DyadicCube, DyadicCube>> out;
            for (const CubePair& p : refined_subdivision({a, b}, m_sub))
                out.emplace_back(p.left, p.right);
            return out;
        },
        py::arg("left"), py::arg("right"), py::arg("m_sub"));

    py::class_<ExponentSet>(m, "ExponentSet")
        .def_readonly("dim", &ExponentSet::dim)
        .def_readonly("q", &ExponentSet::q)
        .def_readonly("q_num", &ExponentSet::q_num)
        .def_readonly("q_den", &ExponentSet::q_den)
        .def_readonly("p_min", &ExponentSet::p_min)
        .def_readonly("p_default", &ExponentSet::p_default)
        .def_readonly("beta", &ExponentSet::beta)
        .def_readonly("mu", &ExponentSet::mu);
    m.def("admissible_exponents", &admissible_exponents, py::arg("dim"));

    m.def(
        "strichartz_ratio",
        [](const Field& g, double t_box, int slices, int workers) {
            return strichartz_ratio(g, SpacetimeBox{t_box, slices}, workers);
        },
        py::arg("field"), py::arg("t_box") = 8.0, py::arg("slices") = 129,
        py::arg("workers") = 1);

    py::class_<RefinedRatio>(m, "RefinedRatio")
        .def_readonly("lhs", &RefinedRatio::lhs)
        .def_readonly("sup_term", &RefinedRatio::sup_term)
        .def_readonly("sup_cube", &RefinedRatio::sup_cube)
        .def_readonly("rhs", &RefinedRatio::rhs)
        .def_readonly("ratio", &RefinedRatio::ratio);
    m.def(
        "refined_ratio",
        [](const Field& g, double t_box, int slices, int workers) {
            return refined_ratio(g, admissible_exponents(g.spec().dim),
                                 SpacetimeBox{t_box, slices}, workers);
        },
        py::arg("field"), py::arg("t_box") = 8.0, py::arg("slices") = 129,
        py::arg("workers") = 1);

    py::class_<Calibration>(m, "Calibration")
        .def_readonly("dim", &Calibration::dim)
        .def_readonly("p", &Calibration::p)
        .def_readonly("mu", &Calibration::mu)
        .def_readonly("c_emp", &Calibration::c_emp)
        .def_readonly("samples", &Calibration::samples)
        .def_readonly("seed", &Calibration::seed);
    m.def(
        "calibrate_refined_constant",
        [](int dim, double p, int samples, std::uint64_t seed, double t_box,
           int slices, int workers) {
            return calibrate_refined_constant(
                dim, p, samples, seed, SpacetimeBox{t_box, slices}, workers);
        },
        py::arg("dim"), py::arg("p") = 0.0, py::arg("samples") = 64,
        py::arg("seed") = 0x9e3779b97f4a7c15ULL, py::arg("t_box") = 8.0,
        py::arg("slices") = 65, py::arg("workers") = 1);

    py::class_<GroundState>(m, "GroundState")
        .def_readonly("q", &GroundState::q)
        .def_readonly("mass_sq", &GroundState::mass_sq)
        .def_readonly("residual", &GroundState::residual)
        .def_readonly("iterations", &GroundState::iterations);
    m.def("petviashvili", &petviashvili, py::arg("grid"),
          py::arg("tol") = 1e-10, py::arg("max_iter") = 800);
    m.def("q_mass", &q_mass, py::arg("dim"));

    py::class_<RadialProfile>(m, "RadialProfile")
        .def_readonly("dim", &RadialProfile::dim)
        .def_readonly("mass_sq", &RadialProfile::mass_sq)
        .def_readonly("amplitude", &RadialProfile::amplitude)
        .def("__call__", &RadialProfile::operator());
    m.def("radial_ground_state", &radial_ground_state, py::arg("dim"),
          py::arg("r_max") = 20.0, py::arg("dr") = 1e-3);

    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("times",
                               [](const Trajectory& t) { return t.series.times; })
        .def_property_readonly(
            "fields", [](const Trajectory& t) { return t.series.fields; })
        .def_readonly("mass", &Trajectory::mass_series)
        .def_readonly("amplitude", &Trajectory::amp_series)
        .def_readonly("st_accum", &Trajectory::st_accum)
        .def_readonly("truncated", &Trajectory::truncated)
        .def_readonly("valid", &Trajectory::valid);
    m.def(
        "evolve",
        [](const Field& u0, double t_target, double gamma, double dt_base,
           const std::string& policy, double cutoff, int stride,
           double c_adapt, double drift_tol) {
            return evolve(u0, t_target,
                          solver_config(gamma, dt_base, policy, cutoff, stride,
                                        c_adapt, drift_tol));
        },
        py::arg("u0"), py::arg("t_target"), py::arg("gamma") = 1.0,
        py::arg("dt_base") = 1e-3, py::arg("dt_policy") = "fixed",
        py::arg("amplitude_cutoff") = 0.0, py::arg("snapshot_stride") = 16,
        py::arg("c_adapt") = 0.05, py::arg("mass_drift_tol") = 1e-6);
    m.def(
        "step",
        [](const Field& u, double dt, double gamma) {
            SolverConfig cfg;
            cfg.gamma = gamma;
            return step(u, dt, cfg);
        },
        py::arg("u"), py::arg("dt"), py::arg("gamma") = 1.0);

    py::class_<BlowupEstimate>(m, "BlowupEstimate")
        .def_readonly("t_est", &BlowupEstimate::t_est)
        .def_readonly("fit_exponent", &BlowupEstimate::fit_exponent)
        .def_readonly("fit_residual", &BlowupEstimate::fit_residual)
        .def_readonly("reliable", &BlowupEstimate::reliable);
    m.def("estimate_blowup_time", &estimate_blowup_time, py::arg("trajectory"),
          py::arg("tail") = 12);
    m.def("duhamel_residual", &duhamel_residual, py::arg("trajectory"),
          py::arg("t_a"), py::arg("t_b"));
    m.def("pseudoconformal_field",
          py::overload_cast<const Field&, double, double>(
              &pseudoconformal_field),
          py::arg("q"), py::arg("t_blow"), py::arg("t"));
    m.def("pseudoconformal_field_radial",
          py::overload_cast<const RadialProfile&, const GridSpec&, double,
                            double>(&pseudoconformal_field),
          py::arg("profile"), py::arg("grid"), py::arg("t_blow"), py::arg("t"));

    py::class_<ConcentrationReport>(m, "ConcentrationReport")
        .def_readonly("time", &ConcentrationReport::time)
        .def_readonly("radius", &ConcentrationReport::radius)
        .def_readonly("mass_in_ball", &ConcentrationReport::mass_in_ball)
        .def_readonly("rule_tag", &ConcentrationReport::rule_tag)
        .def_property_readonly("center", [](const ConcentrationReport& r) {
            return std::vector<double>(r.center.begin(), r.center.end());
        });
    m.def("concentration_scan", &concentration_scan, py::arg("field"),
          py::arg("radius"));
    m.def(
        "concentration_series",
        [](const Trajectory& traj, double t_est, const std::string& rule) {
            RadiusRule r;
            if (rule == "fixed") r = fixed_radius_rule();
            else if (rule == "log") r = log_radius_rule();
            else if (rule == "power") r = power_radius_rule();
            else throw std::invalid_argument("rule must be fixed|log|power");
            return concentration_series(traj, t_est, r, rule);
        },
        py::arg("trajectory"), py::arg("t_est"), py::arg("rule") = "fixed");
    m.def(
        "window_concentration",
        [](const Trajectory& traj, double T0, double T1) {
            WindowConcentration w = window_concentration(traj, T0, T1);
            return py::make_tuple(w.t0, w.report, w.eta);
        },
        py::arg("trajectory"), py::arg("T0"), py::arg("T1"));
    m.def("partition_by_spacetime_norm", &partition_by_spacetime_norm,
          py::arg("trajectory"), py::arg("eta0"));

    py::class_<ProfileParams>(m, "ProfileParams")
        .def(py::init([](double rho, double t0, std::vector<double> xi,
                         std::vector<double> x0) {
                 ProfileParams p;
                 p.rho = rho;
                 p.t0 = t0;
                 for (std::size_t a = 0; a < xi.size() && a < 3; ++a)
                     p.xi[a] = xi[a];
                 for (std::size_t a = 0; a < x0.size() && a < 3; ++a)
                     p.x0[a] = x0[a];
                 return p;
             }),
             py::arg("rho") = 1.0, py::arg("t0") = 0.0,
             py::arg("xi") = std::vector<double>{},
             py::arg("x0") = std::vector<double>{})
        .def_readwrite("rho", &ProfileParams::rho)
        .def_readwrite("t0", &ProfileParams::t0);
    m.def("apply_profile", &apply_profile, py::arg("phi"), py::arg("params"),
          py::arg("t"));
    m.def("orthogonality_score", &orthogonality_score, py::arg("a"),
          py::arg("b"), py::arg("dim"));
    m.def(
        "product_norm_decay",
        [](const Field& phi1, const Field& phi2,
           const std::vector<ProfileParams>& fam1,
           const std::vector<ProfileParams>& fam2, double t_box, int slices,
           int workers) {
            return product_norm_decay(phi1, phi2, fam1, fam2,
                                      SpacetimeBox{t_box, slices}, workers);
        },
        py::arg("phi1"), py::arg("phi2"), py::arg("fam1"), py::arg("fam2"),
        py::arg("t_box") = 0.25, py::arg("slices") = 9, py::arg("workers") = 1);

    py::class_<Piece>(m, "Piece")
        .def_readonly("f", &Piece::f)
        .def_readonly("cube", &Piece::cube)
        .def_readonly("threshold", &Piece::threshold)
        .def_readonly("mass_sq", &Piece::mass_sq)
        .def_property_readonly("amplitude_scale", &Piece::amplitude_scale);
    py::class_<Decomposition>(m, "Decomposition")
        .def_readonly("pieces", &Decomposition::pieces)
        .def_readonly("residual", &Decomposition::residual)
        .def_readonly("epsilon", &Decomposition::epsilon)
        .def_readonly("converged", &Decomposition::converged)
        .def_readonly("residual_st_norm", &Decomposition::residual_st_norm);
    m.def(
        "extract_single",
        [](const Field& g, double eps) -> py::object {
            auto piece = extract_single(g, eps);
            if (!piece) return py::none();
            return py::cast(std::move(*piece));
        },
        py::arg("g"), py::arg("eps"));
    m.def(
        "decompose",
        [](const Field& f, double eps, int max_pieces) {
            return decompose(f, eps, max_pieces);
        },
        py::arg("f"), py::arg("eps"), py::arg("max_pieces") = 32);

    py::class_<Tube>(m, "Tube")
        .def_readonly("dim", &Tube::dim)
        .def_readonly("t_cell", &Tube::t_cell)
        .def_property_readonly("a", &Tube::a)
        .def_property_readonly("interval_length", &Tube::interval_length)
        .def_property_readonly("cube_side", &Tube::cube_side)
        .def("contains", [](const Tube& tb, double t, std::vector<double> x) {
            return tb.contains(t, x.data());
        });
    py::class_<TubeCover>(m, "TubeCover")
        .def_readonly("tubes", &TubeCover::tubes)
        .def_readonly("lambda0", &TubeCover::lambda0)
        .def_readonly("exterior_norm", &TubeCover::exterior_norm);
    m.def(
        "tube_cover",
        [](const Piece& piece, double eps) { return tube_cover(piece, eps); },
        py::arg("piece"), py::arg("eps"));

    m.def("write_snapshot", &write_snapshot, py::arg("path"), py::arg("field"));
    m.def("read_snapshot", &read_snapshot, py::arg("path"));
}
