#pragma once
#include <stdexcept>
#include <string>

namespace stcg {

enum class ErrorKind {
    Usage,
    Parse,
    Validation,
    Reference,
    Hermiticity,
    Shape,
    InvalidWeight,
    Singular,
    Divergent,
    UnsupportedFilter,
    Range,
    UnresolvedSymbol,
    Division,
    Resource,
    Margin,
    Numeric,
    OracleMismatch,
    Io,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

}  // namespace stcg
