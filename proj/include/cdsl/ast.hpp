// AST for CAPTCHA DSL scripts. All nodes carry source spans and plain value
// semantics; recursive edges use std::vector so the mutually recursive types
// stay copyable without manual memory management (vectors of size 0 or 1
// stand in for optional children of incomplete type).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cdsl/source.hpp"

namespace cdsl {

struct Expr;
struct Predicate;
struct Statement;

enum class Comparator { eq, ne, lt, gt, le, ge };

const char* comparator_text(Comparator c);  // "==", "!=", ...

enum class BuiltinFn { mode, count };

struct VarRef {
    std::string name;
    SourceSpan span;
};

struct Literal {
    bool is_string = false;
    std::string string_value;  // decoded (escapes resolved)
    long long number_value = 0;
    SourceSpan span;
};

struct AttributeAccess {
    std::string object;
    std::string attribute;
    SourceSpan span;
};

// One comparison leaf: lhs cmp operand. `operand` always holds exactly one Expr.
struct Comparison {
    std::variant<AttributeAccess, VarRef> lhs;
    Comparator cmp = Comparator::eq;
    std::vector<Expr> operand;
    SourceSpan span;
};

// Predicate / condition tree. SEARCH ... WHERE predicates have comparison
// leaves only; IF conditions may additionally carry expression atoms
// (REASON{...} or a truth-valued binding).
struct Predicate {
    enum class Kind { comparison, atom, and_, or_, not_ };
    Kind kind = Kind::comparison;
    std::vector<Comparison> comparison;  // kind == comparison: exactly one
    std::vector<Expr> atom;              // kind == atom: exactly one
    std::vector<Predicate> children;     // and_/or_: two; not_: one
    SourceSpan span;
};

// What a REASON description's raw text was recognized as. Free text is the
// fallback; the structured forms are the ones the paper-style scripts use and
// the deterministic reasoner can evaluate.
enum class DescriptionForm { attr_read, comprehension, mode, count_compare, free_text };

const char* description_form_name(DescriptionForm f);

struct Description {
    std::string raw;  // verbatim bytes between the braces
    DescriptionForm form = DescriptionForm::free_text;

    // attr_read: the access itself. comprehension/mode: the projection.
    std::optional<AttributeAccess> attr;
    std::string element_var;  // comprehension/mode/count_compare
    std::string source;       // comprehension/mode: iterated set; count_compare: counted set
    // count_compare: COUNT(source WHERE pred) cmp rhs
    std::vector<Predicate> count_pred;  // 0 or 1
    Comparator count_cmp = Comparator::eq;
    long long count_rhs = 0;

    // Dotted names ("letter_W.orientation") and identifiers found in raw text.
    // For structured forms these are precise; for free text they are every
    // identifier-shaped word, filtered against actual bindings by the verifier.
    std::vector<std::string> embedded_refs;
};

struct SearchExpr {
    std::string element_var;
    bool source_is_captcha = false;
    std::string source;           // binding name when !source_is_captcha
    std::vector<Predicate> where;  // 0 or 1
    SourceSpan span;
};

struct ReasonExpr {
    Description description;
    SourceSpan span;
};

struct LocateExpr {
    std::string target;
    SourceSpan span;
};

struct Comprehension {
    AttributeAccess projection;  // projection.object == element_var
    std::string element_var;
    std::string source;
    SourceSpan span;
};

struct CallExpr {
    BuiltinFn function = BuiltinFn::mode;
    std::vector<Expr> args;
    SourceSpan span;
};

struct Expr {
    std::variant<SearchExpr, ReasonExpr, LocateExpr, AttributeAccess, Comprehension, CallExpr,
                 Literal, VarRef>
        node;
};

SourceSpan span_of(const Expr& e);

// MOVE destination cell. Coordinates are literals or identifier references;
// identifier coordinates exist so the verifier can reject reasoning results
// used positionally.
struct CellCoord {
    bool is_number = true;
    long long number = 0;
    std::string name;
    SourceSpan span;
};

struct GridCellDest {
    CellCoord row;
    CellCoord col;
    SourceSpan span;
};

struct AlignDest {
    std::string set;   // object-set binding to align with
    std::string axis;  // "x", "y" or "common_axis"
    SourceSpan span;
};

enum class OperateKind { move, rotate, click };

struct OperateStmt {
    OperateKind op = OperateKind::click;
    std::string subject;
    std::optional<GridCellDest> cell;   // move only
    std::optional<AlignDest> align;     // move only
    std::vector<Expr> rotate_target;    // rotate only: exactly one
    SourceSpan span;
};

struct Assignment {
    std::vector<std::string> targets;
    bool bracketed = false;
    std::vector<Expr> value;  // exactly one
    SourceSpan span;
};

struct ForLoop {
    std::string var;
    std::string iterable;
    std::vector<Statement> body;
    SourceSpan span;
};

struct IfBranch {
    Predicate condition;
    std::vector<Statement> body;
    SourceSpan span;
};

struct IfStmt {
    std::vector<IfBranch> branches;       // first is IF, rest are ELIF
    std::vector<Statement> else_body;     // empty when no ELSE
    SourceSpan span;
};

struct Comment {
    std::string text;  // includes the leading "//"
    SourceSpan span;
};

struct Statement {
    std::variant<Assignment, ForLoop, IfStmt, OperateStmt, Comment> node;
};

SourceSpan span_of(const Statement& s);

struct Script {
    std::vector<Statement> statements;
    SourceSpan span;
};

inline bool is_comment(const Statement& s) { return std::holds_alternative<Comment>(s.node); }

}  // namespace cdsl
