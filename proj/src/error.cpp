#include "error.hpp"

namespace stcg {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::Usage: return "usage";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Reference: return "reference";
        case ErrorKind::Hermiticity: return "hermiticity";
        case ErrorKind::Shape: return "shape";
        case ErrorKind::InvalidWeight: return "invalid-weight";
        case ErrorKind::Singular: return "singular-input";
        case ErrorKind::Divergent: return "divergent-limit";
        case ErrorKind::UnsupportedFilter: return "unsupported-filter";
        case ErrorKind::Range: return "range";
        case ErrorKind::UnresolvedSymbol: return "unresolved-symbol";
        case ErrorKind::Division: return "division";
        case ErrorKind::Resource: return "resource";
        case ErrorKind::Margin: return "margin";
        case ErrorKind::Numeric: return "numeric";
        case ErrorKind::OracleMismatch: return "oracle-mismatch";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

}  // namespace stcg
