// Recursive-descent parser with statement-boundary recovery.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdsl/ast.hpp"
#include "cdsl/token.hpp"

namespace cdsl {

struct ParseDiagnostic {
    SourceSpan span;
    std::string expected;
    std::string found;
    std::string message;  // "expected X, found Y" plus context
};

// script is present exactly when diagnostics is empty.
struct ParseResult {
    std::optional<Script> script;
    std::vector<ParseDiagnostic> diagnostics;
};

ParseResult parse(const std::vector<Token>& tokens);

// tokenize + parse in one step. Lex errors are reported as a single
// diagnostic rather than an exception so callers see one failure channel.
ParseResult parse_source(std::string_view source);

// Convenience for tests and trusted inputs; throws ContractViolation with the
// first diagnostic's message if the source does not parse.
Script parse_or_throw(std::string_view source);

}  // namespace cdsl
