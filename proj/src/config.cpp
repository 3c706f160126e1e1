#include "tomoprop/config.hpp"

#include "tomoprop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tomoprop {

using nlohmann::json;

namespace {

// Walks the document, recording every problem instead of stopping at the first.
class Reader {
public:
    std::vector<std::string> issues;

    void unknown_keys(const json& obj, const std::string& path, std::set<std::string> allowed) {
        for (const auto& [k, v] : obj.items()) {
            if (!allowed.count(k)) issues.push_back(field(path, k) + ": unknown field");
        }
    }

    const json* object(const json& parent, const std::string& path, const char* key) {
        if (!parent.contains(key)) return nullptr;
        const json& v = parent.at(key);
        if (!v.is_object()) {
            issues.push_back(field(path, key) + ": expected an object");
            return nullptr;
        }
        return &v;
    }

    void number(const json& obj, const std::string& path, const char* key, double& out) {
        if (!obj.contains(key)) return;
        const json& v = obj.at(key);
        if (!v.is_number()) {
            issues.push_back(field(path, key) + ": expected a number");
            return;
        }
        out = v.get<double>();
        if (!std::isfinite(out)) issues.push_back(field(path, key) + ": must be finite");
    }

    void count(const json& obj, const std::string& path, const char* key, std::size_t& out) {
        if (!obj.contains(key)) return;
        const json& v = obj.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            issues.push_back(field(path, key) + ": expected a nonnegative integer");
            return;
        }
        out = v.get<std::size_t>();
    }

    std::optional<std::string> string(const json& obj, const std::string& path, const char* key) {
        if (!obj.contains(key)) return std::nullopt;
        const json& v = obj.at(key);
        if (!v.is_string()) {
            issues.push_back(field(path, key) + ": expected a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    void numbers(const json& obj, const std::string& path, const char* key, std::vector<double>& out) {
        if (!obj.contains(key)) return;
        const json& v = obj.at(key);
        if (!v.is_array()) {
            issues.push_back(field(path, key) + ": expected an array of numbers");
            return;
        }
        out.clear();
        for (const auto& e : v) {
            if (!e.is_number() || !std::isfinite(e.get<double>())) {
                issues.push_back(field(path, key) + ": expected finite numbers only");
                return;
            }
            out.push_back(e.get<double>());
        }
    }

    static std::string field(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }
};

void read_sampler(Reader& r, const json& parent, const std::string& path, const char* key, SamplerSpec& s) {
    if (!parent.contains(key)) return;
    const json& v = parent.at(key);
    const std::string p = Reader::field(path, key);
    if (v.is_number()) {  // shorthand for a constant
        s.kind = "constant";
        s.value = v.get<double>();
        if (!std::isfinite(s.value)) r.issues.push_back(p + ": must be finite");
        return;
    }
    if (!v.is_object()) {
        r.issues.push_back(p + ": expected a number or a sampler object");
        return;
    }
    s.kind = r.string(v, p, "kind").value_or("constant");
    if (s.kind == "constant") {
        r.unknown_keys(v, p, {"kind", "value"});
        r.number(v, p, "value", s.value);
    } else if (s.kind == "cosine") {
        r.unknown_keys(v, p, {"kind", "a", "b", "freq"});
        r.number(v, p, "a", s.a);
        r.number(v, p, "b", s.b);
        r.number(v, p, "freq", s.freq);
    } else if (s.kind == "table") {
        r.unknown_keys(v, p, {"kind", "t", "v"});
        r.numbers(v, p, "t", s.t);
        r.numbers(v, p, "v", s.v);
        if (s.t.size() < 2 || s.t.size() != s.v.size()) {
            r.issues.push_back(p + ": table needs at least two matching t and v entries");
        } else if (!std::is_sorted(s.t.begin(), s.t.end(), std::less_equal<>())) {
            r.issues.push_back(p + ".t: table times not increasing");
        }
    } else {
        r.issues.push_back(p + ".kind: expected constant, cosine or table");
    }
}

// Line and column of a byte offset into text.
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t offset) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ParseError("override '" + assignment + "' is not of the form key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ParseError("override key '" + key + "' has an empty component");
        if (!node->is_object()) throw ParseError("override key '" + key + "' descends into a non-object");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

json sampler_json(const SamplerSpec& s) {
    if (s.kind == "cosine") return {{"kind", "cosine"}, {"a", s.a}, {"b", s.b}, {"freq", s.freq}};
    if (s.kind == "table") return {{"kind", "table"}, {"t", s.t}, {"v", s.v}};
    return {{"kind", "constant"}, {"value", s.value}};
}

}  // namespace

std::string to_string(Task t) {
    switch (t) {
        case Task::tomogram: return "tomogram";
        case Task::evolve: return "evolve";
        case Task::invert: return "invert";
        case Task::moments: return "moments";
        case Task::validate: return "validate";
        case Task::pipeline_check: return "pipeline-check";
    }
    return "";
}

std::optional<Task> task_from_string(std::string_view s) {
    for (Task t : {Task::tomogram, Task::evolve, Task::invert, Task::moments, Task::validate, Task::pipeline_check}) {
        if (to_string(t) == s) return t;
    }
    return std::nullopt;
}

std::string to_string(Backend b) {
    switch (b) {
        case Backend::map: return "map";
        case Backend::pde: return "pde";
        case Backend::both: return "both";
    }
    return "";
}

TimeSampler SamplerSpec::build() const {
    if (kind == "cosine") return TimeSampler::cosine(a, b, freq);
    if (kind == "table") return TimeSampler::table(t, v);
    return TimeSampler::constant(value);
}

json JobConfig::to_json() const {
    static const char* state_names[] = {"vacuum", "coherent", "cat"};
    static const char* source_names[] = {"wavefunction", "via_wigner", "direct"};
    return {{"task", to_string(task)},
            {"state",
             {{"kind", state_names[static_cast<int>(state.kind)]},
              {"alpha_re", state.alpha_re},
              {"alpha_im", state.alpha_im},
              {"sign", state.sign}}},
            {"grid",
             {{"x_max", grid.x_max},
              {"n_x", grid.n_x},
              {"n_theta", grid.n_theta},
              {"q_max", grid.q_max},
              {"n_q", grid.n_q}}},
            {"hamiltonian", {{"omega_sq", sampler_json(omega_sq)}, {"force", sampler_json(force)}}},
            {"backend", to_string(backend)},
            {"times", times},
            {"dt", dt},
            {"pde_dt", pde_dt},
            {"interpolation", interpolation == Interpolation::cubic ? "cubic" : "bilinear"},
            {"tomogram_source", source_names[static_cast<int>(source)]},
            {"input", input},
            {"output_dir", output_dir}};
}

JobConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("config root must be an object");
    Reader r;
    JobConfig cfg;
    r.unknown_keys(doc, "", {"task", "state", "grid", "hamiltonian", "backend", "times", "dt", "pde_dt",
                             "interpolation", "tomogram_source", "input", "output_dir"});

    if (const auto task = r.string(doc, "", "task")) {
        if (const auto t = task_from_string(*task)) {
            cfg.task = *t;
        } else {
            r.issues.push_back("task: unknown task '" + *task + "'");
        }
    } else if (!doc.contains("task")) {
        r.issues.push_back("task: required");
    }

    if (const json* st = r.object(doc, "", "state")) {
        r.unknown_keys(*st, "state", {"kind", "alpha_re", "alpha_im", "sign"});
        const auto kind = r.string(*st, "state", "kind").value_or("vacuum");
        if (kind == "vacuum") {
            cfg.state.kind = StateKind::vacuum;
        } else if (kind == "coherent") {
            cfg.state.kind = StateKind::coherent;
        } else if (kind == "cat") {
            cfg.state.kind = StateKind::cat;
        } else {
            r.issues.push_back("state.kind: expected vacuum, coherent or cat");
        }
        r.number(*st, "state", "alpha_re", cfg.state.alpha_re);
        r.number(*st, "state", "alpha_im", cfg.state.alpha_im);
        if (st->contains("sign")) {
            const json& s = st->at("sign");
            if (!s.is_number_integer() || (s.get<int>() != 1 && s.get<int>() != -1)) {
                r.issues.push_back("state.sign: must be +1 or -1");
            } else {
                cfg.state.sign = s.get<int>();
            }
        }
        if (cfg.state.kind == StateKind::cat && cfg.state.sign == -1 && cfg.state.alpha_re == 0.0 &&
            cfg.state.alpha_im == 0.0) {
            r.issues.push_back("state: odd cat with alpha = 0 is not normalizable");
        }
    }

    if (const json* g = r.object(doc, "", "grid")) {
        r.unknown_keys(*g, "grid", {"x_max", "n_x", "n_theta", "q_max", "n_q"});
        r.number(*g, "grid", "x_max", cfg.grid.x_max);
        r.count(*g, "grid", "n_x", cfg.grid.n_x);
        r.count(*g, "grid", "n_theta", cfg.grid.n_theta);
        r.number(*g, "grid", "q_max", cfg.grid.q_max);
        r.count(*g, "grid", "n_q", cfg.grid.n_q);
    }
    if (!(cfg.grid.x_max > 0.0)) r.issues.push_back("grid.x_max: must be positive");
    if (!(cfg.grid.q_max > 0.0)) r.issues.push_back("grid.q_max: must be positive");
    if (cfg.grid.n_x < 16) r.issues.push_back("grid.n_x: must be at least 16");
    if (cfg.grid.n_theta < 8) r.issues.push_back("grid.n_theta: must be at least 8");
    if (cfg.grid.n_q < 8 || cfg.grid.n_q % 2 != 0) r.issues.push_back("grid.n_q: must be even and at least 8");

    if (const json* h = r.object(doc, "", "hamiltonian")) {
        r.unknown_keys(*h, "hamiltonian", {"omega_sq", "force"});
        read_sampler(r, *h, "hamiltonian", "omega_sq", cfg.omega_sq);
        read_sampler(r, *h, "hamiltonian", "force", cfg.force);
    }

    if (const auto b = r.string(doc, "", "backend")) {
        if (*b == "map") {
            cfg.backend = Backend::map;
        } else if (*b == "pde") {
            cfg.backend = Backend::pde;
        } else if (*b == "both") {
            cfg.backend = Backend::both;
        } else {
            r.issues.push_back("backend: expected map, pde or both");
        }
    }

    r.numbers(doc, "", "times", cfg.times);
    if (std::any_of(cfg.times.begin(), cfg.times.end(), [](double t) { return t < 0.0; })) {
        r.issues.push_back("times: must be nonnegative");
    }
    if (std::adjacent_find(cfg.times.begin(), cfg.times.end(), std::greater_equal<>()) != cfg.times.end()) {
        r.issues.push_back("times not increasing");
    }

    r.number(doc, "", "dt", cfg.dt);
    if (!(cfg.dt > 0.0)) r.issues.push_back("dt: must be positive");
    r.number(doc, "", "pde_dt", cfg.pde_dt);
    if (cfg.pde_dt < 0.0) r.issues.push_back("pde_dt: must be nonnegative (0 selects automatically)");

    if (const auto s = r.string(doc, "", "interpolation")) {
        if (*s == "bilinear") {
            cfg.interpolation = Interpolation::bilinear;
        } else if (*s == "cubic") {
            cfg.interpolation = Interpolation::cubic;
        } else {
            r.issues.push_back("interpolation: expected bilinear or cubic");
        }
    }
    if (const auto s = r.string(doc, "", "tomogram_source")) {
        if (*s == "wavefunction") {
            cfg.source = TomogramSource::wavefunction;
        } else if (*s == "via_wigner") {
            cfg.source = TomogramSource::via_wigner;
        } else if (*s == "direct") {
            cfg.source = TomogramSource::direct;
        } else {
            r.issues.push_back("tomogram_source: expected wavefunction, via_wigner or direct");
        }
    }
    cfg.input = r.string(doc, "", "input").value_or("");
    cfg.output_dir = r.string(doc, "", "output_dir").value_or(".");
    if (cfg.output_dir.empty()) r.issues.push_back("output_dir: must not be empty");

    // Task-required fields.
    if (cfg.task == Task::evolve && cfg.times.empty()) r.issues.push_back("times: required by the evolve task");
    if (cfg.task == Task::pipeline_check && cfg.times.empty()) {
        r.issues.push_back("times: required by the pipeline-check task");
    }
    if (cfg.task == Task::invert && cfg.input.empty()) r.issues.push_back("input: required by the invert task");
    if (cfg.task == Task::pipeline_check) {
        const bool zero_force = cfg.force.kind == "constant" && cfg.force.value == 0.0;
        const bool analytic = cfg.omega_sq.kind == "constant" && (cfg.omega_sq.value == 0.0 || cfg.omega_sq.value == 1.0);
        if (!zero_force || !analytic) {
            r.issues.push_back("hamiltonian: pipeline-check needs the free (omega_sq = 0) or oscillator (omega_sq = 1) "
                               "Hamiltonian without force");
        }
    }
    if (cfg.task == Task::evolve || cfg.task == Task::validate) {
        const double t_end = cfg.times.empty() ? 0.0 : cfg.times.back();
        if (r.issues.empty()) {
            const auto h = cfg.hamiltonian();
            if (!h.omega_sq.covers(0.0, t_end) || !h.force.covers(0.0, t_end)) {
                r.issues.push_back("hamiltonian: sampler tables do not cover the requested times");
            }
        }
    }

    if (!r.issues.empty()) throw ValidationError(r.issues);
    return cfg;
}

JobConfig parse_config(std::string_view text, const std::vector<std::string>& overrides, std::optional<Task> task) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = locate(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError("config syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                             ": " + e.what(),
                         line, col);
    }
    if (!doc.is_object()) throw ParseError("config root must be an object", 1, 1);
    for (const auto& o : overrides) apply_override(doc, o);
    if (task) {
        if (doc.contains("task") && doc["task"].is_string() && doc["task"].get<std::string>() != to_string(*task)) {
            throw ValidationError({"task: config says '" + doc["task"].get<std::string>() +
                                   "' but the command line asks for '" + to_string(*task) + "'"});
        }
        doc["task"] = to_string(*task);
    }
    return config_from_json(doc);
}

}  // namespace tomoprop
