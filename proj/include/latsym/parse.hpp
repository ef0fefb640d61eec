#pragma once

#include "latsym/expr.hpp"

#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace latsym {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, std::size_t position)
        : std::runtime_error(msg + " (at position " + std::to_string(position) + ")"),
          position(position) {}
    std::size_t position;
};

/// Names in scope while parsing. Dependent variables are recognized by the
/// `name[offsets]` syntax; when `variables` is non-empty the name must be
/// listed. Bare identifiers must be an axis name or a declared parameter.
struct ParseContext {
    explicit ParseContext(std::size_t dim = 1)
        : dim(dim), axes(default_axes(dim)) {}

    std::size_t dim;
    std::vector<std::string> axes;
    std::set<std::string> variables;
    std::set<std::string> params;
};

/// Parses the expression DSL. `(-1)^(...)` over lattice variables becomes an
/// AltSign node, so alternating signs never touch floating pow.
Expr parse_expr(const std::string& text, const ParseContext& ctx);

} // namespace latsym
