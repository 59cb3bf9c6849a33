// Deterministic execution of verified scripts against scenes: the reference
// semantics and the oracle behind mock clients and acceptance checks.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cdsl/ast.hpp"
#include "cdsl/scene.hpp"

namespace cdsl {

enum class Truth { true_, false_, unknown };

const char* truth_name(Truth t);

// Kleene three-valued connectives
Truth truth_not(Truth a);
Truth truth_and(Truth a, Truth b);
Truth truth_or(Truth a, Truth b);

inline Truth truth_of(bool b) { return b ? Truth::true_ : Truth::false_; }

struct ObjectSet {
    std::vector<std::string> ids;  // scene order
    bool operator==(const ObjectSet&) const = default;
};

struct ObjectRef {
    std::string id;
    bool operator==(const ObjectRef&) const = default;
};

// List items are scalars: lists only arise from attribute comprehensions and
// LOCATE over several objects, and attributes are scalar-valued.
using Scalar = std::variant<long long, std::string, Orientation, GridPos, Truth>;

struct ListValue {
    std::vector<Scalar> items;
    bool operator==(const ListValue&) const = default;
};

using Value = std::variant<ObjectSet, ObjectRef, Truth, Orientation, long long, std::string,
                           GridPos, ListValue>;

using Env = std::map<std::string, Value>;

std::string value_summary(const Value& v);  // short human form for traces
Json value_to_json(const Value& v);

enum class RuntimeErrorKind {
    empty_set_where_one_required,
    unknown_condition_strict,
    no_such_attribute,
    ambiguous_mode,
    illegal_move,
};

const char* runtime_error_kind_name(RuntimeErrorKind k);

class RuntimeError : public std::runtime_error {
public:
    RuntimeError(RuntimeErrorKind kind, SourceSpan span, const std::string& what)
        : std::runtime_error(what), kind(kind), span(span) {}
    RuntimeErrorKind kind;
    SourceSpan span;
};

class IdSetMismatch : public std::runtime_error {
public:
    explicit IdSetMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct ExecOptions {
    // strict: unknown IF conditions and MODE ties raise instead of defaulting
    // (lenient: unknown is false with a trace note; ties pick the smallest
    // value under the canonical ordering).
    bool strict = false;
    // Resolves free-text REASON descriptions the built-in forms do not cover.
    // Unset, or returning nullopt, leaves the result unknown with a trace note.
    std::function<std::optional<Value>(const std::string&)> reasoner;
};

struct StepRecord {
    int line = 0;
    int step = 0;  // 1-based executed-statement counter
    std::string summary;
    // Typed result of the step, when it has one: the assigned value for
    // assignments, ObjectRef for CLICK, Orientation for ROTATE, and
    // [subject id, target cell] for MOVE. Control steps carry none.
    std::optional<Value> value;
};

Json trace_to_json(const std::vector<StepRecord>& trace);

struct ExecutionResult {
    Env final_env;
    std::vector<Action> actions;
    std::vector<StepRecord> trace;
    Scene final_scene;              // working copy after MOVE/ROTATE effects
    std::optional<Answer> answer;   // terminal-answer convention, if derivable
};

// Requires verify(script).valid; the input scene is never mutated. The final
// answer is the last action when any action ran, else a click on the object
// whose position the last LOCATE reported.
ExecutionResult execute(const Script& script, const Scene& scene, const ExecOptions& opts = {});

// Three-valued predicate evaluation for one candidate object; `element_var`
// names the object inside the predicate. Missing attributes make comparisons
// unknown rather than raising.
Truth eval_predicate(const Scene& scene, const Env& env, const Predicate& pred,
                     const std::string& element_var, const SceneObject& object,
                     const ExecOptions& opts = {});

// Minimal Move/Rotate list transforming `before` into `after` by per-object
// comparison. Throws IdSetMismatch when the object id sets differ.
std::vector<Action> diff_scenes(const Scene& before, const Scene& after);

}  // namespace cdsl
