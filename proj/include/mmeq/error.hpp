#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mmeq {

// Single exception type for the whole library. `code()` carries the stable,
// machine-checkable error name (e.g. "NotDoublyStochastic", "Infeasible");
// what() is the human-readable diagnostic. `witness` optionally carries the
// offending indices (agent/good sets), 0-based.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    Error(std::string code, const std::string& message, std::vector<int> witness_indices)
        : std::runtime_error(code + ": " + message),
          witness(std::move(witness_indices)),
          code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

    std::vector<int> witness;

private:
    std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message) {
    throw Error(std::move(code), message);
}

[[noreturn]] inline void fail(std::string code, const std::string& message,
                              std::vector<int> witness) {
    throw Error(std::move(code), message, std::move(witness));
}

// For conditions that are supposed to be unreachable if the algorithms are
// correct. Always on (not assert()): a wrong equilibrium must never escape
// silently in release builds.
inline void internal_check(bool ok, const char* what) {
    if (!ok) throw Error("InternalError", what);
}

} // namespace mmeq
