#pragma once

#include <stdexcept>
#include <string>

namespace bbc {

/// Bad user input: malformed files, invalid flags, capacity violations.
/// The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
   public:
    explicit InputError(const std::string &what) : std::runtime_error(what) {}
};

/// A broken internal invariant (cycle in a DAG, non-symplectic transform, ...).
/// The CLI maps this to exit code 2.
class InvariantError : public std::logic_error {
   public:
    explicit InvariantError(const std::string &what) : std::logic_error(what) {}
};

inline void require(bool condition, const std::string &message) {
    if (!condition) {
        throw InvariantError(message);
    }
}

}  // namespace bbc
