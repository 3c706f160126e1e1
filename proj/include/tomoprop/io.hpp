#pragma once

#include "tomoprop/states.hpp"
#include "tomoprop/transforms.hpp"

#include <string>
#include <utility>
#include <vector>

namespace tomoprop {

// Header lines written as "# key=value" before the CSV column line.
using Metadata = std::vector<std::pair<std::string, std::string>>;

// Shortest exact text for a double ("%.17g").
std::string format_double(double v);

// Writes through a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string tomogram_csv(const Tomogram& w, const Metadata& meta = {});
std::string density_csv(const DensityMatrix& rho, const Metadata& meta = {});
std::string wigner_csv(const WignerFunction& w, const Metadata& meta = {});

void write_tomogram(const std::string& path, const Tomogram& w, const Metadata& meta = {});
void write_density(const std::string& path, const DensityMatrix& rho, const Metadata& meta = {});
void write_wigner(const std::string& path, const WignerFunction& w, const Metadata& meta = {});

struct TomogramFile {
    Tomogram tomogram;
    Metadata meta;
};

// Reads a file produced by write_tomogram; the grid comes from the x_max, n_x
// and n_theta header keys and every row is checked against it. Throws IoError.
TomogramFile read_tomogram(const std::string& path);
TomogramFile parse_tomogram_csv(const std::string& text);

}  // namespace tomoprop
