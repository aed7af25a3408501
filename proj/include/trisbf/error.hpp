#pragma once

#include <stdexcept>
#include <string>

namespace trisbf {

enum class ErrorKind {
    domain,
    argument_on_cut,
    overflow,
    nonconvergence,
    pole,
    order_limit,
    reality_violation,
    unsupported_power,
    derivative_order_limit,
    cost_limit,
    tolerance_unreachable,
    io,
    usage,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace trisbf
