#pragma once

#include <string>
#include <utility>

#include "homlog/formula.hpp"
#include "homlog/signature.hpp"

namespace homlog {

// Syntax error with 1-based line/column position.
struct ParseError : HomlogError {
    ParseError(const std::string& msg, int line, int col)
        : HomlogError(msg + " at " + std::to_string(line) + ":" + std::to_string(col)),
          line(line),
          col(col) {}
    int line, col;
};

// Parses a formula in the concrete grammar and validates it against sig.
FormulaPtr parse_sentence(const std::string& text, const Signature& sig);

// Parses "sig { P/2; Q/1; const c; } <formula>". Symbol names declared in the
// header may not use the reserved "__" prefix.
std::pair<Signature, FormulaPtr> parse_problem(const std::string& text);

// Parses just a "sig { ... }" block.
Signature parse_signature(const std::string& text);

}  // namespace homlog
