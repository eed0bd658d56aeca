#ifndef PROPFLOW_LOG_HPP
#define PROPFLOW_LOG_HPP

#include <cstdlib>
#include <iostream>
#include <string>

namespace propflow {

// Diagnostics are off unless the PROPFLOW_LOG environment variable is set.
inline bool log_enabled() {
    static const bool on = [] {
        const char* v = std::getenv("PROPFLOW_LOG");
        return v != nullptr && v[0] != '\0' && std::string(v) != "0";
    }();
    return on;
}

inline void diag(const std::string& msg) {
    if (log_enabled()) std::cerr << "[propflow] " << msg << "\n";
}

}  // namespace propflow

#endif
