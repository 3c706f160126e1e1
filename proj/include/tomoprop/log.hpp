#pragma once

#include <functional>
#include <string>

namespace tomoprop {

using WarningHandler = std::function<void(const std::string&)>;

// Installs a handler for non-fatal numerical diagnostics; returns the previous one.
// The default handler writes to stderr.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

// Caps OpenMP worker threads; 0 restores the runtime default.
void set_max_threads(int n);
int max_threads();

}  // namespace tomoprop
