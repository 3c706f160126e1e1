#pragma once

#include "tomoprop/quad_dynamics.hpp"
#include "tomoprop/transforms.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tomoprop {

enum class Task { tomogram, evolve, invert, moments, validate, pipeline_check };
enum class Backend { map, pde, both };
enum class StateKind { vacuum, coherent, cat };
// How the tomogram of the initial state is produced.
enum class TomogramSource { wavefunction, via_wigner, direct };

std::string to_string(Task t);
std::optional<Task> task_from_string(std::string_view s);
std::string to_string(Backend b);

struct SamplerSpec {
    std::string kind = "constant";  // constant | cosine | table
    double value = 0.0;
    double a = 0.0;
    double b = 0.0;
    double freq = 0.0;
    std::vector<double> t;
    std::vector<double> v;

    TimeSampler build() const;
};

struct StateSpec {
    StateKind kind = StateKind::vacuum;
    double alpha_re = 0.0;
    double alpha_im = 0.0;
    int sign = 1;
};

struct GridSpec {
    double x_max = kDefaultXMax;
    std::size_t n_x = kDefaultNx;
    std::size_t n_theta = kDefaultNtheta;
    double q_max = kDefaultQMax;
    std::size_t n_q = kDefaultNq;

    TomogramGrid tomogram_grid() const { return {x_max, n_x, n_theta}; }
    CoordinateGrid coordinate_grid() const { return {q_max, n_q}; }
};

struct JobConfig {
    Task task = Task::tomogram;
    StateSpec state;
    GridSpec grid;
    SamplerSpec omega_sq;
    SamplerSpec force;
    Backend backend = Backend::map;
    std::vector<double> times;
    double dt = 1e-3;     // epsilon integrator step
    double pde_dt = 0.0;  // semi-Lagrangian step; 0 picks the largest admissible
    Interpolation interpolation = Interpolation::bilinear;
    TomogramSource source = TomogramSource::wavefunction;
    std::string input;  // tomogram CSV for the invert task
    std::string output_dir = ".";

    QuadraticHamiltonian hamiltonian() const { return {omega_sq.build(), force.build()}; }
    // Effective document after defaults, for run metadata.
    nlohmann::json to_json() const;
};

// Parses a JSON document, applies dotted-path overrides ("grid.n_x=256"; the
// value is read as JSON and falls back to a plain string) and validates.
// `task` fills in or must match the document's task field.
JobConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {},
                       std::optional<Task> task = std::nullopt);

// Validates an already-parsed document.
JobConfig config_from_json(const nlohmann::json& doc);

}  // namespace tomoprop
