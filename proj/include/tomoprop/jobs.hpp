#pragma once

#include "tomoprop/config.hpp"
#include "tomoprop/oracles.hpp"

#include <string>
#include <vector>

namespace tomoprop {

struct CheckResult {
    std::string name;
    double value;
    double threshold;
    bool upper_bound;  // value <= threshold passes; otherwise value >= threshold
    bool pass;
};

struct JobResult {
    std::vector<std::string> files;  // data files and reports, in write order
    std::vector<CheckResult> checks;  // filled by the validate task
    bool ok = true;                   // false when a validation check failed
};

// Builds the configured initial state on the coordinate grid.
WaveFunction make_state(const StateSpec& s, const CoordinateGrid& grid);
Tomogram initial_tomogram(const JobConfig& cfg);

// Runs the configured task and writes into cfg.output_dir (created if needed).
// Library errors propagate; a failed validation returns ok = false.
JobResult run_job(const JobConfig& cfg);

// The invariant suite behind the validate task.
std::vector<CheckResult> validation_suite(const JobConfig& cfg);

}  // namespace tomoprop
