// Canonical source rendering: 4-space indents, one statement per line, no
// semicolons, comments preserved on their own lines.
#pragma once

#include <string>

#include "cdsl/ast.hpp"

namespace cdsl {

std::string pretty_print(const Script& script);
std::string pretty_print(const Expr& expr);
std::string pretty_print(const Predicate& pred);

}  // namespace cdsl
