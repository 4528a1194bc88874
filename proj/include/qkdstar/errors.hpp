#pragma once

#include <stdexcept>
#include <string>

namespace qkdstar {

/// Bad configuration input: unreadable files, unknown keys, invalid field
/// values. Maps to process exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Model-domain violation: arguments outside the physical model's domain,
/// yields leaving [0,1], degenerate links. Maps to process exit code 3.
class model_error : public std::runtime_error {
public:
    explicit model_error(const std::string& what) : std::runtime_error(what) {}
};

/// Requested more codes/users than a code family can hold.
class capacity_error : public model_error {
public:
    explicit capacity_error(const std::string& what) : model_error(what) {}
};

/// Invariant breakage inside the library itself. Maps to exit code 4.
class internal_error : public std::runtime_error {
public:
    explicit internal_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qkdstar
