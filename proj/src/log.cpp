#include "tomoprop/log.hpp"

#include <iostream>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tomoprop {

namespace {
std::mutex g_mutex;
WarningHandler& handler() {
    static WarningHandler h = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
    return h;
}
}  // namespace

WarningHandler set_warning_handler(WarningHandler h) {
    std::lock_guard lock(g_mutex);
    auto old = std::move(handler());
    handler() = std::move(h);
    return old;
}

void warn(const std::string& message) {
    std::lock_guard lock(g_mutex);
    if (handler()) handler()(message);
}

void set_max_threads(int n) {
#ifdef _OPENMP
    if (n > 0) {
        omp_set_num_threads(n);
    } else {
        omp_set_num_threads(omp_get_num_procs());
    }
#else
    (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace tomoprop
