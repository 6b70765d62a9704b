#include "beam/error.hpp"

namespace beam {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::off_grid: return "off_grid";
    case ErrorKind::out_of_range: return "out_of_range";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::duplicate: return "duplicate";
    case ErrorKind::not_pending: return "not_pending";
    case ErrorKind::budget_exhausted: return "budget_exhausted";
    case ErrorKind::over_constrained: return "over_constrained";
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::version: return "version";
    case ErrorKind::conflict: return "conflict";
    }
    return "unknown";
}

}  // namespace beam
