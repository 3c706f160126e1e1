#include "tomoprop/jobs.hpp"

#include "tomoprop/errors.hpp"
#include "tomoprop/io.hpp"
#include "tomoprop/log.hpp"
#include "tomoprop/pde_evolution.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>

namespace tomoprop {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

std::string path_in(const JobConfig& cfg, const std::string& name) {
    return (fs::path(cfg.output_dir) / name).string();
}

void write_json(const std::string& path, const json& doc) { write_file_atomic(path, doc.dump(2) + "\n"); }

Metadata grid_meta(const JobConfig& cfg) {
    return {{"task", to_string(cfg.task)}, {"state", cfg.to_json()["state"].dump()}};
}

double pde_step(const JobConfig& cfg, const QuadraticHamiltonian& h, double t) {
    return cfg.pde_dt > 0.0 ? cfg.pde_dt : max_semilagrangian_step(h, t);
}

KernelKind kernel_kind(const JobConfig& cfg) {
    return cfg.omega_sq.value == 0.0 ? KernelKind::free : KernelKind::oscillator;
}

json check_json(const CheckResult& c) {
    return {{"name", c.name},
            {"value", c.value},
            {"threshold", c.threshold},
            {"bound", c.upper_bound ? "max" : "min"},
            {"pass", c.pass}};
}

CheckResult at_most(std::string name, double value, double threshold) {
    return {std::move(name), value, threshold, true, value <= threshold};
}

CheckResult at_least(std::string name, double value, double threshold) {
    return {std::move(name), value, threshold, false, value >= threshold};
}

// --- tasks -----------------------------------------------------------------

void task_tomogram(const JobConfig& cfg, JobResult& res) {
    const Tomogram w = initial_tomogram(cfg);
    const auto inv = w.invariants();
    res.files.push_back(path_in(cfg, "tomogram.csv"));
    write_tomogram(res.files.back(), w, grid_meta(cfg));
    res.files.push_back(path_in(cfg, "tomogram_report.json"));
    write_json(res.files.back(), {{"min_value", inv.min_value}, {"max_row_mass_defect", inv.max_row_mass_defect}});
}

void task_evolve(const JobConfig& cfg, JobResult& res) {
    const Tomogram w0 = initial_tomogram(cfg);
    const auto h = cfg.hamiltonian();
    json entries = json::array();
    for (std::size_t k = 0; k < cfg.times.size(); ++k) {
        const double t = cfg.times[k];
        std::optional<Tomogram> by_map;
        std::optional<Tomogram> by_pde;
        if (cfg.backend != Backend::pde) by_map = evolve_tomogram(w0, map_for(h, t, cfg.dt), cfg.interpolation);
        if (cfg.backend != Backend::map) by_pde = evolve_semilagrangian(w0, h, t, pde_step(cfg, h, t));

        json entry = {{"t_index", k}, {"t", t}};
        auto emit = [&](const Tomogram& w, const char* backend) {
            const std::string name = std::string("evolve_") + backend + "_" + std::to_string(k) + ".csv";
            Metadata meta = grid_meta(cfg);
            meta.emplace_back("backend", backend);
            meta.emplace_back("t", format_double(t));
            res.files.push_back(path_in(cfg, name));
            write_tomogram(res.files.back(), w, meta);
            const auto inv = w.invariants();
            entry[backend] = {{"file", name},
                              {"min_value", inv.min_value},
                              {"max_row_mass_defect", inv.max_row_mass_defect}};
        };
        if (by_map) emit(*by_map, "map");
        if (by_pde) emit(*by_pde, "pde");
        if (by_map && by_pde) entry["l1_difference"] = tomogram_l1(*by_map, *by_pde);
        entries.push_back(entry);
    }
    res.files.push_back(path_in(cfg, "evolve_report.json"));
    write_json(res.files.back(), {{"backend", to_string(cfg.backend)}, {"evolutions", entries}});
}

void task_invert(const JobConfig& cfg, JobResult& res) {
    const auto file = read_tomogram(cfg.input);
    const auto& w = file.tomogram;
    const CoordinateGrid grid = cfg.grid.coordinate_grid();
    const auto [qa, pa] = wigner_axes_for(grid, w.grid.x_max());
    const WignerFunction wig = inverse_radon(w, qa, pa);
    DensityMatrix rho = density_from_wigner(wig);
    const double herm = (rho.values - rho.values.adjoint()).cwiseAbs().maxCoeff();
    rho.values = 0.5 * (rho.values + rho.values.adjoint()).eval();
    const auto inv = rho.invariants();

    Metadata meta = {{"task", "invert"}, {"source", fs::path(cfg.input).filename().string()}};
    res.files.push_back(path_in(cfg, "wigner.csv"));
    write_wigner(res.files.back(), wig, meta);
    res.files.push_back(path_in(cfg, "density.csv"));
    write_density(res.files.back(), rho, meta);
    res.files.push_back(path_in(cfg, "invert_report.json"));
    write_json(res.files.back(), {{"hermiticity_defect", herm},
                                  {"trace_defect", inv.trace_defect},
                                  {"min_diagonal", inv.min_diagonal},
                                  {"purity", rho.purity()},
                                  {"wigner_mass", wig.total_mass()}});
}

void task_moments(const JobConfig& cfg, JobResult& res) {
    const Tomogram w = initial_tomogram(cfg);
    const auto m1 = moments(w, 1);
    const auto m2 = moments(w, 2);
    std::string csv;
    for (const auto& [k, v] : grid_meta(cfg)) csv += "# " + k + "=" + v + "\n";
    csv += "theta_index,theta,m1,m2\n";
    std::vector<double> thetas;
    for (std::size_t j = 0; j < w.grid.n_theta(); ++j) {
        thetas.push_back(w.grid.theta(j));
        csv += std::to_string(j) + "," + format_double(thetas.back()) + "," + format_double(m1[j]) + "," +
               format_double(m2[j]) + "\n";
    }
    res.files.push_back(path_in(cfg, "moments.csv"));
    write_file_atomic(res.files.back(), csv);
    res.files.push_back(path_in(cfg, "moments.json"));
    write_json(res.files.back(), {{"theta", thetas}, {"m1", m1}, {"m2", m2}});
}

void task_validate(const JobConfig& cfg, JobResult& res) {
    res.checks = validation_suite(cfg);
    json checks = json::array();
    for (const auto& c : res.checks) {
        checks.push_back(check_json(c));
        res.ok = res.ok && c.pass;
    }
    res.files.push_back(path_in(cfg, "validation.json"));
    write_json(res.files.back(), {{"pass", res.ok}, {"checks", checks}});
}

void task_pipeline(const JobConfig& cfg, JobResult& res) {
    const auto rho = density_from_wavefunction(make_state(cfg.state, cfg.grid.coordinate_grid()));
    const KernelKind kind = kernel_kind(cfg);
    json records = json::array();
    for (const double t : cfg.times) {
        const auto rec = pipeline_discrepancy(rho, kind, t, cfg.grid.tomogram_grid());
        const bool pass = rec.trace_distance <= 1e-2;
        res.ok = res.ok && pass;
        records.push_back({{"kind", to_string(kind)},
                           {"t", t},
                           {"trace_distance", rec.trace_distance},
                           {"linf", rec.linf},
                           {"threshold", 1e-2},
                           {"pass", pass}});
    }
    res.files.push_back(path_in(cfg, "pipeline.json"));
    write_json(res.files.back(), {{"pass", res.ok}, {"records", records}});
}

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

}  // namespace

WaveFunction make_state(const StateSpec& s, const CoordinateGrid& grid) {
    const cdouble alpha(s.alpha_re, s.alpha_im);
    switch (s.kind) {
        case StateKind::vacuum: return make_coherent(0.0, grid);
        case StateKind::coherent: return make_coherent(alpha, grid);
        case StateKind::cat: return make_cat(alpha, s.sign, grid);
    }
    return make_coherent(0.0, grid);
}

Tomogram initial_tomogram(const JobConfig& cfg) {
    const auto psi = make_state(cfg.state, cfg.grid.coordinate_grid());
    const TomogramGrid tg = cfg.grid.tomogram_grid();
    switch (cfg.source) {
        case TomogramSource::wavefunction: return tomogram_from_wavefunction(psi, tg);
        case TomogramSource::via_wigner: return tomogram_from_density(density_from_wavefunction(psi), tg);
        case TomogramSource::direct: return tomogram_from_density(density_from_wavefunction(psi), tg, Route::direct);
    }
    return tomogram_from_wavefunction(psi, tg);
}

std::vector<CheckResult> validation_suite(const JobConfig& cfg) {
    std::vector<CheckResult> out;
    const auto h = cfg.hamiltonian();
    const double t_evo = cfg.times.empty() ? 1.0 : cfg.times.back();
    const bool long_ok = h.omega_sq.covers(0.0, 10.0) && h.force.covers(0.0, 10.0);
    const double t_long = long_ok ? 10.0 : t_evo;

    // Classical solution and integrals of motion.
    const auto traj = solve_epsilon(h, t_long, cfg.dt);
    out.push_back(at_most("wronskian_drift", traj.max_wronskian_defect(), 1e-8));
    double det = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); k += 10) {
        det = std::max(det, motion_integrals(traj, traj.times[k]).det_defect());
    }
    out.push_back(at_most("det_lambda_defect", det, 1e-8));

    const double split = 0.37 * t_evo;
    const auto one = motion_integrals(solve_epsilon(h, t_evo, cfg.dt), t_evo);
    const auto first = motion_integrals(solve_epsilon(h, split, cfg.dt), split);
    const auto second = motion_integrals(solve_epsilon(h, t_evo, cfg.dt, split), t_evo);
    const auto two = compose(second, first);
    out.push_back(at_most("chapman_kolmogorov_map",
                          std::max((two.lambda - one.lambda).cwiseAbs().maxCoeff(),
                                   (two.delta - one.delta).cwiseAbs().maxCoeff()),
                          1e-8));

    // Transforms of the configured state.
    const CoordinateGrid cg = cfg.grid.coordinate_grid();
    const TomogramGrid tg = cfg.grid.tomogram_grid();
    const auto psi = make_state(cfg.state, cg);
    const auto rho = density_from_wavefunction(psi);
    const Tomogram w0 = initial_tomogram(cfg);
    const auto inv0 = w0.invariants();
    out.push_back(at_least("tomogram_min_value", inv0.min_value, -1e-6));
    out.push_back(at_most("tomogram_row_mass_defect", inv0.max_row_mass_defect, 1e-3));

    const Tomogram w_rho = tomogram_from_density(rho, tg);
    const auto rec = density_from_tomogram(w_rho, cg);
    out.push_back(at_most("density_roundtrip_trace_distance", trace_distance(rho, rec.rho), 1e-2));
    const auto [qa, pa] = wigner_axes_for(cg, tg.x_max());
    out.push_back(at_most("tomogram_roundtrip_linf", tomogram_linf(radon(inverse_radon(w_rho, qa, pa), tg), w_rho),
                          2e-3));

    // Evolution of the configured state to the last requested time.
    const Tomogram wm = evolve_tomogram(w0, map_for(h, t_evo, cfg.dt), cfg.interpolation);
    const auto inv = wm.invariants();
    out.push_back(at_most("evolution_row_mass_defect", inv.max_row_mass_defect, 1e-3));
    out.push_back(at_least("evolution_min_value", inv.min_value,
                           cfg.interpolation == Interpolation::bilinear ? -1e-12 : -1e-6));

    const auto cl = classical_trajectory(h, mean_position(psi), mean_momentum(psi), t_evo, cfg.dt);
    const auto m1 = moments(wm, 1);
    double ehr = 0.0;
    for (std::size_t j = 0; j < tg.n_theta(); ++j) {
        const double expect = cl.q.back() * std::cos(tg.theta(j)) + cl.p.back() * std::sin(tg.theta(j));
        ehr = std::max(ehr, std::abs(m1[j] - expect));
    }
    out.push_back(at_most("ehrenfest_first_moment", ehr, 1e-3));

    const Tomogram wp = evolve_semilagrangian(w0, h, t_evo, pde_step(cfg, h, t_evo));
    out.push_back(at_most("backend_l1_difference", tomogram_l1(wm, wp), 1e-2));
    return out;
}

JobResult run_job(const JobConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec || !fs::is_directory(cfg.output_dir)) {
        throw IoError("cannot create output directory " + cfg.output_dir + ": " + ec.message());
    }

    JobResult res;
    switch (cfg.task) {
        case Task::tomogram: task_tomogram(cfg, res); break;
        case Task::evolve: task_evolve(cfg, res); break;
        case Task::invert: task_invert(cfg, res); break;
        case Task::moments: task_moments(cfg, res); break;
        case Task::validate: task_validate(cfg, res); break;
        case Task::pipeline_check: task_pipeline(cfg, res); break;
    }

    json files = json::array();
    for (const auto& f : res.files) files.push_back(fs::path(f).filename().string());
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json(path_in(cfg, "run_metadata.json"), {{"config", cfg.to_json()},
                                                   {"files", files},
                                                   {"ok", res.ok},
                                                   {"started_utc", started},
                                                   {"wall_seconds", wall},
                                                   {"threads", max_threads()}});
    return res;
}

}  // namespace tomoprop
