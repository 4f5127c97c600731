#pragma once

#include <stdexcept>
#include <string>

namespace fsapprox {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input text. Carries a 1-based source position.
struct ParseError : Error {
    ParseError(const std::string& msg, int line_, int col_)
        : Error(msg + " (line " + std::to_string(line_) + ", column " +
                std::to_string(col_) + ")"),
          line(line_),
          col(col_) {}
    int line;
    int col;
};

/// Input is well-formed but violates a declaration-level constraint,
/// e.g. a feature constraint naming an undeclared feature or value.
struct SemanticError : Error {
    SemanticError(const std::string& msg, int line_, int col_)
        : Error(msg + " (line " + std::to_string(line_) + ", column " +
                std::to_string(col_) + ")"),
          line(line_),
          col(col_) {}
    int line;
    int col;
};

/// A configurable resource cap was exceeded (unfolded-state or
/// subset-state limits). Carries the site where growth blew up.
struct ResourceLimitError : Error {
    ResourceLimitError(const std::string& msg, long limit_)
        : Error(msg), limit(limit_) {}
    long limit;
};

}  // namespace fsapprox
