#pragma once

#include <stdexcept>
#include <string>

namespace lifegraph {

// Base for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// Graph mutation or query violated a contract (dangling endpoint, unknown id, ...).
class GraphError : public Error {
public:
    using Error::Error;
};

// Persistence / input file problems. Carries the 1-based line number when known.
class LoadError : public Error {
public:
    explicit LoadError(std::string msg, long line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : std::move(msg)),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_ = 0;
};

// Model backend failures (timeouts, HTTP errors, strict-mock exhaustion).
class ModelError : public Error {
public:
    using Error::Error;
};

class ConstructionError : public Error {
public:
    using Error::Error;
};

}  // namespace lifegraph
