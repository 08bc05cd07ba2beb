// Experiment runner: each pipeline is a subcommand reading one structured
// config document and writing a self-contained run directory (config copy,
// CSVs, JSON summary, field snapshots).
//
// Exit codes: 0 success, 2 config error, 3 numerical failure,
//             4 precondition refusal.

#include "CLI11.hpp"
#include "json.hpp"

#include "nlslab/diagnostics.hpp"
#include "nlslab/dyadic.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/groundstate.hpp"
#include "nlslab/parallel.hpp"
#include "nlslab/refine.hpp"
#include "nlslab/solver.hpp"
#include "nlslab/spectral.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nlslab;

namespace {

constexpr double kPi = std::numbers::pi;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Refusal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_keys(const json& block, const std::string& name,
                  const std::vector<std::string>& allowed) {
    if (!block.is_object())
        throw ConfigError("config block '" + name + "' must be an object");
    for (const auto& [key, value] : block.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in config block '" +
                              name + "'");
    }
}

GridSpec parse_grid(const json& cfg) {
    if (!cfg.contains("grid")) throw ConfigError("missing 'grid' block");
    const json& g = cfg["grid"];
    require_keys(g, "grid", {"dim", "extent", "points"});
    try {
        return make_grid(g.value("dim", 1), g.value("extent", 32.0),
                         g.value("points", 512));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
}

SolverConfig parse_solver(const json& cfg) {
    SolverConfig s;
    if (!cfg.contains("solver")) return s;
    const json& b = cfg["solver"];
    require_keys(b, "solver",
                 {"gamma", "dt_base", "dt_policy", "amplitude_cutoff",
                  "snapshot_stride", "c_adapt", "mass_drift_tol"});
    s.gamma = b.value("gamma", 1.0);
    if (s.gamma == 0.0) throw ConfigError("solver.gamma must be nonzero");
    s.dt_base = b.value("dt_base", 1e-3);
    if (!(s.dt_base > 0.0)) throw ConfigError("solver.dt_base must be > 0");
    const std::string policy = b.value("dt_policy", "fixed");
    if (policy == "fixed") s.dt_policy = DtPolicy::fixed;
    else if (policy == "adaptive") s.dt_policy = DtPolicy::adaptive;
    else throw ConfigError("solver.dt_policy must be 'fixed' or 'adaptive'");
    s.amplitude_cutoff = b.value("amplitude_cutoff", 0.0);
    if (s.amplitude_cutoff < 0.0)
        throw ConfigError("solver.amplitude_cutoff must be >= 0");
    s.snapshot_stride = b.value("snapshot_stride", 16);
    if (s.snapshot_stride < 1)
        throw ConfigError("solver.snapshot_stride must be >= 1");
    s.c_adapt = b.value("c_adapt", 0.05);
    s.mass_drift_tol = b.value("mass_drift_tol", 1e-6);
    return s;
}

SpacetimeBox parse_box(const json& cfg) {
    SpacetimeBox box;
    if (!cfg.contains("spacetime")) return box;
    const json& b = cfg["spacetime"];
    require_keys(b, "spacetime", {"t_box", "slices"});
    box.t_box = b.value("t_box", 8.0);
    box.slices = b.value("slices", 129);
    if (!(box.t_box > 0.0) || box.slices < 2)
        throw ConfigError("spacetime box must have t_box > 0 and slices >= 2");
    return box;
}

struct Common {
    json cfg;
    fs::path out;
    std::uint64_t seed = 1234;
    int workers = 1;
    bool quiet = false;
};

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f.precision(17);
    return f;
}

void write_summary(const Common& c, const json& summary) {
    open_out(c.out / "summary.json") << summary.dump(2) << "\n";
}

void prepare_run_dir(Common& c) {
    fs::create_directories(c.out);
    open_out(c.out / "config.json") << c.cfg.dump(2) << "\n";
}

Field gaussian_data(const GridSpec& spec, double amp, double width) {
    return sample(spec, Domain::physical, [&](const double* x) {
        double r2 = 0.0;
        for (int a = 0; a < spec.dim; ++a) r2 += x[a] * x[a];
        return cplx(amp * std::exp(-kPi * r2 / (width * width)), 0.0);
    });
}

void write_trajectory_csv(const fs::path& p, const Trajectory& traj) {
    std::ofstream f = open_out(p);
    f << "t,mass,amplitude,st_norm_accum\n";
    for (std::size_t i = 0; i < traj.series.times.size(); ++i)
        f << traj.series.times[i] << ',' << traj.mass_series[i] << ','
          << traj.amp_series[i] << ',' << traj.st_accum[i] << '\n';
}

void write_reports_csv(const fs::path& p,
                       const std::vector<ConcentrationReport>& reports,
                       int dim) {
    std::ofstream f = open_out(p);
    f << "t,radius,mass_in_ball";
    for (int a = 0; a < dim; ++a) f << ",c" << a;
    f << ",rule\n";
    for (const auto& r : reports) {
        f << r.time << ',' << r.radius << ',' << r.mass_in_ball;
        for (int a = 0; a < dim; ++a) f << ',' << r.center[a];
        f << ',' << r.rule_tag << '\n';
    }
}

// ---------------------------------------------------------------- groundstate

int cmd_groundstate(Common& c) {
    require_keys(c.cfg, "config",
                 {"grid", "experiment", "seed", "out_dir"});
    GridSpec grid = parse_grid(c.cfg);
    double tol = 1e-10;
    int max_iter = 800;
    if (c.cfg.contains("experiment")) {
        const json& e = c.cfg["experiment"];
        require_keys(e, "experiment", {"tol", "max_iter"});
        tol = e.value("tol", tol);
        max_iter = e.value("max_iter", max_iter);
    }
    prepare_run_dir(c);
    GroundState gs = petviashvili(grid, tol, max_iter);
    write_snapshot((c.out / "groundstate.fld").string(), gs.q);
    json summary = {{"command", "groundstate"},
                    {"dim", grid.dim},
                    {"mass_sq", gs.mass_sq},
                    {"residual", gs.residual},
                    {"iterations", gs.iterations}};
    write_summary(c, summary);
    if (!c.quiet)
        std::cout << "groundstate: |Q|_2^2 = " << gs.mass_sq
                  << ", residual = " << gs.residual << "\n";
    return 0;
}

// --------------------------------------------------------------------- blowup

int cmd_blowup(Common& c) {
    require_keys(c.cfg, "config",
                 {"grid", "solver", "experiment", "seed", "out_dir"});
    GridSpec grid = parse_grid(c.cfg);
    SolverConfig scfg = parse_solver(c.cfg);
    std::string mode = "simulate";
    double amplitude = 1.6, width = 1.0, t_target = 4.0, t_blow = 1.0;
    bool dt_halving = false;
    if (c.cfg.contains("experiment")) {
        const json& e = c.cfg["experiment"];
        require_keys(e, "experiment",
                     {"mode", "amplitude", "profile_width", "t_target",
                      "t_blow", "dt_halving_check"});
        mode = e.value("mode", mode);
        amplitude = e.value("amplitude", amplitude);
        width = e.value("profile_width", width);
        t_target = e.value("t_target", t_target);
        t_blow = e.value("t_blow", t_blow);
        dt_halving = e.value("dt_halving_check", dt_halving);
    }
    prepare_run_dir(c);
    json summary = {{"command", "blowup"}, {"mode", mode}};

    if (mode == "pseudoconformal") {
        // analytic replay: ladder of exact blow-up snapshots
        RadialProfile prof = radial_ground_state(grid.dim);
        std::vector<double> times;
        for (double sigma = 0.5; sigma > 6.0 * grid.spacing(); sigma *= 0.85)
            times.push_back(t_blow - sigma);
        auto gen = [&](double t) {
            return pseudoconformal_field(prof, grid, t_blow, t);
        };
        const std::vector<std::pair<std::string, RadiusRule>> rules = {
            {"fixed", fixed_radius_rule()},
            {"log", log_radius_rule()},
            {"power", power_radius_rule()}};
        json trend;
        for (const auto& [tag, rule] : rules) {
            auto reports = concentration_ladder(gen, times, t_blow, rule, tag);
            write_reports_csv(c.out / ("concentration_" + tag + ".csv"),
                              reports, grid.dim);
            if (!reports.empty())
                trend[tag] = {{"first", reports.front().mass_in_ball},
                              {"last", reports.back().mass_in_ball}};
        }
        summary["q_mass_sq"] = prof.mass_sq;
        summary["concentration"] = trend;
        write_summary(c, summary);
        return 0;
    }
    if (mode != "simulate")
        throw ConfigError("blowup.mode must be 'simulate' or 'pseudoconformal'");

    Field u0 = gaussian_data(grid, amplitude, width);
    Trajectory traj = evolve(u0, t_target, scfg);
    write_trajectory_csv(c.out / "trajectory.csv", traj);
    summary["truncated"] = traj.truncated;
    summary["valid"] = traj.valid;
    summary["final_time"] = traj.series.times.back();

    if (!traj.truncated) {
        summary["verdict"] = "global-looking";
        write_summary(c, summary);
        if (!c.quiet)
            std::cout << "blowup: no blow-up signal (global-looking)\n";
        throw Refusal("trajectory reached the horizon without blow-up");
    }

    BlowupEstimate est = estimate_blowup_time(traj);
    summary["t_est"] = est.t_est;
    summary["fit_exponent"] = est.fit_exponent;
    summary["fit_residual"] = est.fit_residual;
    summary["estimate_reliable"] = est.reliable;
    if (est.reliable) {
        const std::vector<std::pair<std::string, RadiusRule>> rules = {
            {"fixed", fixed_radius_rule()},
            {"log", log_radius_rule()},
            {"power", power_radius_rule()}};
        for (const auto& [tag, rule] : rules) {
            auto reports = concentration_series(traj, est.t_est, rule, tag);
            write_reports_csv(c.out / ("concentration_" + tag + ".csv"),
                              reports, grid.dim);
        }
    }
    if (dt_halving) {
        SolverConfig half = scfg;
        half.dt_base *= 0.5;
        Trajectory traj2 = evolve(u0, t_target, half);
        BlowupEstimate est2 = estimate_blowup_time(traj2);
        summary["t_est_half_dt"] = est2.t_est;
        if (est.reliable && est2.reliable)
            summary["t_est_rel_change"] =
                std::abs(est.t_est - est2.t_est) / est.t_est;
    }
    write_summary(c, summary);
    if (!c.quiet)
        std::cout << "blowup: truncated at t = " << traj.series.times.back()
                  << ", T_est = " << est.t_est << "\n";
    return 0;
}

// ----------------------------------------------------------------- strichartz

int cmd_strichartz(Common& c) {
    require_keys(c.cfg, "config",
                 {"grid", "spacetime", "experiment", "seed", "out_dir"});
    GridSpec grid = parse_grid(c.cfg);
    SpacetimeBox box = parse_box(c.cfg);
    int samples = 64;
    int family_m_max = 4;
    double p = 0.0;
    if (c.cfg.contains("experiment")) {
        const json& e = c.cfg["experiment"];
        require_keys(e, "experiment", {"samples", "family_m_max", "p"});
        samples = e.value("samples", samples);
        family_m_max = e.value("family_m_max", family_m_max);
        p = e.value("p", p);
    }
    if (samples < 1) throw ConfigError("strichartz.samples must be >= 1");
    prepare_run_dir(c);

    Calibration cal = calibrate_refined_constant(grid.dim, p, samples, c.seed,
                                                 box, c.workers);
    json summary = {{"command", "strichartz"},
                    {"dim", grid.dim},
                    {"p", cal.p},
                    {"mu", cal.mu},
                    {"samples", cal.samples},
                    {"seed", cal.seed},
                    {"c_emp", cal.c_emp}};

    // multi-cube spreading family: quotient |T(.)g| / |g|_2 against m
    ExponentSet exps = admissible_exponents(grid.dim);
    if (p > 0.0) {
        exps.p_default = p;
        exps.beta = select_beta(p, exps.q);
        exps.mu = select_mu(p, exps.q);
    }
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> shift(-grid.extent / 4.0,
                                                 grid.extent / 4.0);
    const double nyq = grid.half_extent(Domain::frequency);
    // unit cubes spaced four widths apart; cap the family to what fits the
    // Nyquist box
    const double gap = 4.0;
    int m_eff = family_m_max;
    while (m_eff > 0 && (1 << m_eff) * gap > 2.0 * nyq) --m_eff;
    summary["family_m_max_effective"] = m_eff;
    std::ofstream decay = open_out(c.out / "multicube_decay.csv");
    decay << "m,copies,quotient,sup_term\n";
    json curve = json::array();
    for (int m = 0; m <= m_eff; ++m) {
        const int copies = 1 << m;
        std::vector<cplx> hat(grid.size(), 0.0);
        std::vector<double> xc(copies);
        for (double& x : xc) x = shift(rng);
        for (int i = 0; i < grid.points; ++i) {
            const double xi = grid.coord(i, Domain::frequency);
            for (int k = 0; k < copies; ++k) {
                const double lo = -0.5 * copies * gap + k * gap;
                if (xi >= lo && xi < lo + 1.0)
                    hat[i] = std::polar(1.0 / std::sqrt(copies),
                                        -2.0 * kPi * xc[k] * xi);
            }
        }
        Field g = inverse_transform(
            Field(grid, Domain::frequency, std::move(hat)));
        RefinedRatio rr = refined_ratio(g, exps, box, c.workers);
        const double quot = rr.lhs / lp_norm(g, 2.0);
        decay << m << ',' << copies << ',' << quot << ',' << rr.sup_term
              << '\n';
        curve.push_back({{"m", m}, {"quotient", quot}});
    }
    summary["multicube_decay"] = curve;
    write_summary(c, summary);
    if (!c.quiet)
        std::cout << "strichartz: C_emp = " << cal.c_emp << " over "
                  << cal.samples << " samples\n";
    return 0;
}

// ------------------------------------------------------------------ decompose

int cmd_decompose(Common& c) {
    require_keys(c.cfg, "config",
                 {"grid", "experiment", "seed", "out_dir"});
    GridSpec grid = parse_grid(c.cfg);
    std::string input;
    double epsilon_rel = 0.3;
    int max_pieces = 16;
    bool tubes = true;
    if (c.cfg.contains("experiment")) {
        const json& e = c.cfg["experiment"];
        require_keys(e, "experiment",
                     {"input", "epsilon_rel", "max_pieces", "tubes"});
        input = e.value("input", input);
        epsilon_rel = e.value("epsilon_rel", epsilon_rel);
        max_pieces = e.value("max_pieces", max_pieces);
        tubes = e.value("tubes", tubes);
    }
    prepare_run_dir(c);

    Field f = [&] {
        if (!input.empty()) return read_snapshot(input);
        // default input: two well-separated spectral bumps of equal mass
        const double nyq = grid.half_extent(Domain::frequency);
        std::vector<cplx> hat(grid.size(), 0.0);
        int idx[3];
        for (std::size_t i = 0; i < hat.size(); ++i) {
            unflatten(grid, i, idx);
            const double xi = grid.coord(idx[0], Domain::frequency);
            hat[i] = std::exp(-kPi * (xi - nyq / 2) * (xi - nyq / 2) / 0.1) +
                     std::exp(-kPi * (xi + nyq / 2) * (xi + nyq / 2) / 0.1);
        }
        return inverse_transform(Field(grid, Domain::frequency, std::move(hat)));
    }();
    if (!(f.spec() == grid))
        throw ConfigError("input snapshot grid differs from config grid");

    RefineConfig rcfg;
    rcfg.workers = c.workers;
    const double q = 2.0 * (grid.dim + 2.0) / grid.dim;
    const double total = free_spacetime_norm(
        f, symmetric_times(rcfg.t_box, rcfg.slices), q, c.workers);
    const double eps = epsilon_rel * total;
    Decomposition dec = decompose(f, eps, max_pieces, rcfg);

    std::ofstream report = open_out(c.out / "report.txt");
    report << "epsilon: " << eps << "\n"
           << "input_st_norm: " << total << "\n"
           << "converged: " << (dec.converged ? "yes" : "no") << "\n"
           << "residual_st_norm: " << dec.residual_st_norm << "\n"
           << "pieces: " << dec.pieces.size() << "\n";
    double pieces_mass = 0.0;
    std::vector<DyadicCube> cubes;
    for (std::size_t n = 0; n < dec.pieces.size(); ++n) {
        const Piece& p = dec.pieces[n];
        pieces_mass += p.mass_sq;
        cubes.push_back(p.cube);
        report << "piece " << n + 1 << ":\n"
               << "  cube_scale: " << p.cube.scale << "\n"
               << "  cube_corner:";
        for (int a = 0; a < grid.dim; ++a) report << ' ' << p.cube.corner[a];
        report << "\n  amplitude_scale: " << p.amplitude_scale() << "\n"
               << "  threshold: " << p.threshold << "\n"
               << "  mass_sq: " << p.mass_sq << "\n";
        char name[32];
        std::snprintf(name, sizeof name, "piece_%03zu.fld", n + 1);
        write_snapshot((c.out / name).string(), p.f);
        if (tubes) {
            TubeCover cover = tube_cover(p, eps, rcfg);
            report << "  tubes: " << cover.tubes.size() << "\n"
                   << "  tube_exterior_norm: " << cover.exterior_norm << "\n";
            std::snprintf(name, sizeof name, "tubes_%03zu.txt", n + 1);
            std::ofstream tf = open_out(c.out / name);
            tf << "# t_cell x_cells... A xi0...\n";
            for (const Tube& tb : cover.tubes) {
                tf << tb.t_cell;
                for (int a = 0; a < grid.dim; ++a) tf << ' ' << tb.x_cell[a];
                tf << ' ' << tb.a();
                for (int a = 0; a < grid.dim; ++a) tf << ' ' << tb.xi0[a];
                tf << '\n';
            }
        }
    }
    const double pyth =
        std::abs(mass_sq(f) - pieces_mass - mass_sq(dec.residual)) /
        mass_sq(f);
    report << "pythagoras_defect_rel: " << pyth << "\n";
    write_snapshot((c.out / "residual.fld").string(), dec.residual);
    {
        std::ofstream cf = open_out(c.out / "cubes.txt");
        write_cubes(cf, cubes);
    }
    json summary = {{"command", "decompose"},
                    {"epsilon", eps},
                    {"pieces", dec.pieces.size()},
                    {"converged", dec.converged},
                    {"residual_st_norm", dec.residual_st_norm},
                    {"pythagoras_defect_rel", pyth}};
    write_summary(c, summary);
    if (!c.quiet)
        std::cout << "decompose: " << dec.pieces.size()
                  << " pieces, residual " << dec.residual_st_norm << "\n";
    if (dec.pieces.empty())
        throw Refusal("input spacetime norm below epsilon");
    return 0;
}

// ------------------------------------------------------------------- profiles

int cmd_profiles(Common& c) {
    require_keys(c.cfg, "config",
                 {"grid", "experiment", "seed", "out_dir"});
    GridSpec grid = parse_grid(c.cfg);
    int steps = 5;
    double t_box = 0.25;
    int slices = 9;
    if (c.cfg.contains("experiment")) {
        const json& e = c.cfg["experiment"];
        require_keys(e, "experiment", {"rho_steps", "t_box", "slices"});
        steps = e.value("rho_steps", steps);
        t_box = e.value("t_box", t_box);
        slices = e.value("slices", slices);
    }
    prepare_run_dir(c);

    Field phi = gaussian_data(grid, 1.0, 1.0);
    std::vector<ProfileParams> fam1(steps), fam2(steps);
    for (int n = 0; n < steps; ++n) fam1[n].rho = std::ldexp(1.0, n);
    SpacetimeBox box{t_box, slices};
    auto decay = product_norm_decay(phi, phi, fam1, fam2, box, c.workers);
    auto flat = product_norm_decay(phi, phi, fam2, fam2, box, c.workers);

    std::ofstream f = open_out(c.out / "product_decay.csv");
    f << "n,rho1,scale_separated,identical_control\n";
    for (int n = 0; n < steps; ++n)
        f << n << ',' << fam1[n].rho << ',' << decay[n] << ',' << flat[n]
          << '\n';

    std::ofstream sf = open_out(c.out / "scores.csv");
    sf << "n,score_separated,score_identical\n";
    for (int n = 0; n < steps; ++n)
        sf << n << ',' << orthogonality_score(fam1[n], fam2[n], grid.dim)
           << ',' << orthogonality_score(fam2[n], fam2[n], grid.dim) << '\n';

    json summary = {{"command", "profiles"},
                    {"decay_first", decay.front()},
                    {"decay_last", decay.back()},
                    {"decay_ratio", decay.back() / decay.front()},
                    {"identical_score",
                     orthogonality_score(fam2[0], fam2[0], grid.dim)}};
    write_summary(c, summary);
    if (!c.quiet)
        std::cout << "profiles: decay ratio " << decay.back() / decay.front()
                  << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for L^2-critical NLS mass concentration"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int workers = default_workers();
    bool quiet = false;
    app.add_option("--config", config_path, "config file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "RNG seed override");
    app.add_option("--workers", workers, "worker pool size");
    app.add_flag("--quiet", quiet, "suppress progress output");

    auto* sub_ground =
        app.add_subcommand("groundstate", "compute the ground state Q");
    auto* sub_blowup =
        app.add_subcommand("blowup", "blow-up run + concentration scans");
    auto* sub_stric =
        app.add_subcommand("strichartz", "refined Strichartz calibration");
    auto* sub_decomp =
        app.add_subcommand("decompose", "greedy decomposition + tube covers");
    auto* sub_prof =
        app.add_subcommand("profiles", "profile orthogonality diagnostics");
    for (CLI::App* sub :
         {sub_ground, sub_blowup, sub_stric, sub_decomp, sub_prof})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    Common c;
    try {
        std::ifstream in(config_path);
        c.cfg = json::parse(in);
        c.seed = c.cfg.value("seed", std::uint64_t{1234});
        if (seed != 0) c.seed = seed;
        c.workers = std::max(1, workers);
        c.quiet = quiet;
        std::string dir = c.cfg.value("out_dir", std::string("out"));
        if (!out_dir.empty()) dir = out_dir;
        c.out = dir;

        if (sub_ground->parsed()) return cmd_groundstate(c);
        if (sub_blowup->parsed()) return cmd_blowup(c);
        if (sub_stric->parsed()) return cmd_strichartz(c);
        if (sub_decomp->parsed()) return cmd_decompose(c);
        if (sub_prof->parsed()) return cmd_profiles(c);
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Refusal& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
