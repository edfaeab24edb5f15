#pragma once

#include <stdexcept>
#include <string>

namespace uwsynth {

// Filesystem / codec failures. Mapped to exit code 3 by the CLI.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad arguments, violated preconditions, mismatched shapes. Exit code 4.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace uwsynth
