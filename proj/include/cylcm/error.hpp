#pragma once

#include <stdexcept>
#include <string>

namespace cylcm {

enum class ErrorKind { config, precondition, numerical };

/// Library error carrying a coarse category that the CLI maps to an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_config(const std::string& msg) { throw Error(ErrorKind::config, msg); }
[[noreturn]] inline void fail_pre(const std::string& msg) { throw Error(ErrorKind::precondition, msg); }
[[noreturn]] inline void fail_num(const std::string& msg) { throw Error(ErrorKind::numerical, msg); }

}  // namespace cylcm
