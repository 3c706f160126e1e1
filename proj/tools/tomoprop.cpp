#include "tomoprop/errors.hpp"
#include "tomoprop/jobs.hpp"
#include "tomoprop/log.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

// Prints the machine-readable error record and returns the exit code.
int fail(int code, const std::string& kind, const std::string& message, const nlohmann::json& extra = {}) {
    nlohmann::json rec = {{"error", kind}, {"message", message}, {"exit_code", code}};
    if (!extra.is_null()) rec.update(extra);
    std::cerr << rec.dump() << '\n';
    return code;
}

int apply_thread_cap() {
    const char* env = std::getenv("TOMOPROP_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 0) {
        return fail(kExitConfig, "ValidationError", std::string("TOMOPROP_THREADS must be a nonnegative integer, got '") +
                                                        env + "'");
    }
    tomoprop::set_max_threads(static_cast<int>(n));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optical tomogram transforms and evolution for quadratic systems"};
    std::string task_name;
    std::string config_path;
    std::string output_dir;
    std::vector<std::string> overrides;
    app.add_option("task", task_name, "tomogram | evolve | invert | moments | validate | pipeline-check")->required();
    app.add_option("--config", config_path, "JSON job config")->required();
    app.add_option("--output-dir", output_dir, "Directory for data files (overrides the config)");
    app.add_option("--override", overrides, "Config override key=value (dotted keys, JSON values)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (const int rc = apply_thread_cap(); rc != 0) return rc;

    const auto task = tomoprop::task_from_string(task_name);
    if (!task) return fail(kExitConfig, "ValidationError", "unknown task '" + task_name + "'");

    std::ifstream in(config_path, std::ios::binary);
    if (!in) return fail(kExitIo, "IoError", "cannot read config " + config_path);
    std::ostringstream text;
    text << in.rdbuf();

    try {
        if (!output_dir.empty()) overrides.push_back("output_dir=" + nlohmann::json(output_dir).dump());
        const auto cfg = tomoprop::parse_config(text.str(), overrides, *task);
        const auto res = tomoprop::run_job(cfg);
        for (const auto& f : res.files) std::cout << f << '\n';
        if (!res.ok) return fail(kExitNumeric, "ValidationFailure", "one or more checks failed");
        return 0;
    } catch (const tomoprop::ParseError& e) {
        return fail(kExitConfig, e.kind(), e.what(), {{"line", e.line()}, {"column", e.column()}});
    } catch (const tomoprop::ValidationError& e) {
        return fail(kExitConfig, e.kind(), e.what(), {{"issues", e.issues()}});
    } catch (const tomoprop::IoError& e) {
        return fail(kExitIo, e.kind(), e.what());
    } catch (const tomoprop::Error& e) {
        return fail(kExitNumeric, e.kind(), e.what());
    } catch (const std::invalid_argument& e) {
        return fail(kExitNumeric, "InvalidArgument", e.what());
    } catch (const std::exception& e) {
        return fail(kExitNumeric, "Error", e.what());
    }
}
