#include "tomoprop/io.hpp"

#include "tomoprop/errors.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace tomoprop {

namespace {

void append_header(std::string& out, const Metadata& meta, const char* columns) {
    for (const auto& [k, v] : meta) out += "# " + k + "=" + v + "\n";
    out += columns;
    out += '\n';
}

void append_row(std::string& out, std::initializer_list<double> values) {
    bool first = true;
    for (const double v : values) {
        if (!first) out += ',';
        out += format_double(v);
        first = false;
    }
    out += '\n';
}

double parse_double(std::string_view s, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw IoError("line " + std::to_string(line) + ": '" + std::string(s) + "' is not a number");
    }
    return v;
}

std::string lookup(const Metadata& meta, const std::string& key) {
    for (const auto& [k, v] : meta) {
        if (k == key) return v;
    }
    throw IoError("tomogram file lacks the '" + key + "' header");
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing: " + std::strerror(errno));
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename " + tmp.string() + " to " + target.string() + ": " + ec.message());
    }
}

std::string tomogram_csv(const Tomogram& w, const Metadata& meta) {
    const auto& g = w.grid;
    Metadata m = {{"format", "tomogram"},
                  {"x_max", format_double(g.x_max())},
                  {"n_x", std::to_string(g.n_x())},
                  {"n_theta", std::to_string(g.n_theta())}};
    m.insert(m.end(), meta.begin(), meta.end());
    std::string out;
    out.reserve(g.n_x() * g.n_theta() * 64);
    append_header(out, m, "theta_index,theta,X,w");
    for (std::size_t j = 0; j < g.n_theta(); ++j) {
        const std::string prefix = std::to_string(j) + "," + format_double(g.theta(j)) + ",";
        for (std::size_t i = 0; i < g.n_x(); ++i) {
            out += prefix;
            out += format_double(g.x(i));
            out += ',';
            out += format_double(w.at(j, i));
            out += '\n';
        }
    }
    return out;
}

std::string density_csv(const DensityMatrix& rho, const Metadata& meta) {
    const auto& g = rho.grid;
    Metadata m = {{"format", "density"}, {"q_max", format_double(g.q_max())}, {"n_q", std::to_string(g.size())}};
    m.insert(m.end(), meta.begin(), meta.end());
    std::string out;
    out.reserve(g.size() * g.size() * 80);
    append_header(out, m, "qi,qj,re,im");
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            const cdouble v = rho.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            append_row(out, {g.q(i), g.q(j), v.real(), v.imag()});
        }
    }
    return out;
}

std::string wigner_csv(const WignerFunction& w, const Metadata& meta) {
    Metadata m = {{"format", "wigner"},
                  {"q_min", format_double(w.q_axis.min)},
                  {"q_step", format_double(w.q_axis.step)},
                  {"n_q", std::to_string(w.q_axis.n)},
                  {"p_min", format_double(w.p_axis.min)},
                  {"p_step", format_double(w.p_axis.step)},
                  {"n_p", std::to_string(w.p_axis.n)}};
    m.insert(m.end(), meta.begin(), meta.end());
    std::string out;
    out.reserve(w.values.size() * 60);
    append_header(out, m, "q,p,w");
    for (std::size_t a = 0; a < w.q_axis.n; ++a) {
        for (std::size_t b = 0; b < w.p_axis.n; ++b) append_row(out, {w.q_axis.at(a), w.p_axis.at(b), w.at(a, b)});
    }
    return out;
}

void write_tomogram(const std::string& path, const Tomogram& w, const Metadata& meta) {
    write_file_atomic(path, tomogram_csv(w, meta));
}

void write_density(const std::string& path, const DensityMatrix& rho, const Metadata& meta) {
    write_file_atomic(path, density_csv(rho, meta));
}

void write_wigner(const std::string& path, const WignerFunction& w, const Metadata& meta) {
    write_file_atomic(path, wigner_csv(w, meta));
}

TomogramFile parse_tomogram_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    Metadata meta;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.rfind("#", 0) != 0) break;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw IoError("line " + std::to_string(lineno) + ": header without '='");
        std::size_t k0 = 1;
        while (k0 < eq && line[k0] == ' ') ++k0;
        meta.emplace_back(line.substr(k0, eq - k0), line.substr(eq + 1));
    }
    if (line != "theta_index,theta,X,w") {
        throw IoError("line " + std::to_string(lineno) + ": expected the column line 'theta_index,theta,X,w'");
    }
    TomogramGrid grid = [&] {
        try {
            return TomogramGrid(std::stod(lookup(meta, "x_max")), std::stoul(lookup(meta, "n_x")),
                                std::stoul(lookup(meta, "n_theta")));
        } catch (const IoError&) {
            throw;
        } catch (const std::exception& e) {
            throw IoError(std::string("invalid tomogram grid header: ") + e.what());
        }
    }();
    Tomogram w(grid);
    const std::size_t expected = grid.n_x() * grid.n_theta();
    std::size_t count = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::string_view rest(line);
        std::string_view fields[4];
        for (int f = 0; f < 4; ++f) {
            const auto comma = rest.find(',');
            if ((f < 3) == (comma == std::string_view::npos)) {
                throw IoError("line " + std::to_string(lineno) + ": expected 4 comma-separated fields");
            }
            fields[f] = rest.substr(0, comma);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        if (count >= expected) throw IoError("line " + std::to_string(lineno) + ": more rows than the grid holds");
        const std::size_t j = count / grid.n_x();
        const std::size_t i = count % grid.n_x();
        const double jj = parse_double(fields[0], lineno);
        const double x = parse_double(fields[2], lineno);
        if (jj != static_cast<double>(j) || std::abs(x - grid.x(i)) > 1e-9 * std::max(1.0, grid.x_max())) {
            throw IoError("line " + std::to_string(lineno) + ": row does not match the grid order");
        }
        w.at(j, i) = parse_double(fields[3], lineno);
        ++count;
    }
    if (count != expected) {
        throw IoError("tomogram file has " + std::to_string(count) + " rows, grid needs " + std::to_string(expected));
    }
    return {std::move(w), std::move(meta)};
}

TomogramFile read_tomogram(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + ": " + std::strerror(errno));
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_tomogram_csv(ss.str());
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

}  // namespace tomoprop
