#pragma once

#include <stdexcept>
#include <string>

namespace topicaudit {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad input data: malformed files, inconsistent corpora, unmet preconditions.
// The CLI maps these to exit code 2.
struct DataError : Error {
    explicit DataError(const std::string& msg) : Error(msg) {}
};

// Bad invocation: unknown flags, missing arguments. Exit code 1.
struct UsageError : Error {
    explicit UsageError(const std::string& msg) : Error(msg) {}
};

}  // namespace topicaudit
