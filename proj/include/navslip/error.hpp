#pragma once

#include <stdexcept>
#include <string>

namespace navslip {

/// Raised for precondition violations and solver failures anywhere in the library.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw SolverError(what);
}

} // namespace navslip
