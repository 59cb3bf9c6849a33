// JSON dump of the AST (stable field names) and span-insensitive equality.
#pragma once

#include "cdsl/ast.hpp"
#include "cdsl/json_util.hpp"

namespace cdsl {

// include_spans=false yields the structural fingerprint used for AST equality.
Json ast_to_json(const Script& script, bool include_spans = true);
Json ast_to_json(const Statement& stmt, bool include_spans = true);
Json ast_to_json(const Expr& expr, bool include_spans = true);
Json ast_to_json(const Predicate& pred, bool include_spans = true);

// Structural equality, spans excluded.
bool ast_equal(const Script& a, const Script& b);

}  // namespace cdsl
