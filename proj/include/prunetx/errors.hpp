#pragma once

#include <stdexcept>
#include <string>

namespace prunetx {

// Error hierarchy shared by the library and the CLI. The exit code follows
// the CLI contract: 2 config error, 3 infeasibility, 4 numeric error.
class Error : public std::runtime_error {
  public:
    Error(const std::string& msg, int exit_code)
        : std::runtime_error(msg), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

  private:
    int exit_code_;
};

class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& msg) : Error(msg, 2) {}
};

// Model-size guards (state count, decoder scope).
class ResourceError : public Error {
  public:
    explicit ResourceError(const std::string& msg) : Error(msg, 2) {}
};

class InfeasibleError : public Error {
  public:
    InfeasibleError(const std::string& msg, double max_achievable)
        : Error(msg, 3), max_achievable_(max_achievable) {}
    double max_achievable() const noexcept { return max_achievable_; }

  private:
    double max_achievable_;
};

class NumericError : public Error {
  public:
    explicit NumericError(const std::string& msg) : Error(msg, 4) {}
};

}  // namespace prunetx
