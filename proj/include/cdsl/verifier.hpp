// Static checks: definition order, search arity, reason-result typing,
// attribute names, operate targets, unused bindings.
#pragma once

#include <string>
#include <vector>

#include "cdsl/ast.hpp"
#include "cdsl/json_util.hpp"

namespace cdsl {

enum class DiagCode { V001, V002, V003, V004, V005, V006 };

const char* diag_code_name(DiagCode code);

struct Diagnostic {
    DiagCode code = DiagCode::V001;
    bool warning = false;  // V006 only
    SourceSpan span;
    std::string message;
    std::string hint;
};

struct VerifyReport {
    std::vector<Diagnostic> diagnostics;  // sorted by span, then code
    bool valid = true;                    // no error-severity diagnostic
};

struct VerifyOptions {
    // Attribute names accepted beyond the core eight. `role` ships enabled:
    // the stock rotation scripts tag objects with it.
    std::vector<std::string> extra_attributes{"role"};
};

VerifyReport verify(const Script& script);
VerifyReport verify(const Script& script, const VerifyOptions& options);

// One-paragraph repair instruction for a regeneration prompt.
std::string explain(const Diagnostic& diagnostic);

Json diagnostic_to_json(const Diagnostic& d);
Json report_to_json(const VerifyReport& r);

}  // namespace cdsl
