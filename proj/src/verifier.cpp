#include "cdsl/verifier.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

namespace cdsl {

namespace {

const std::set<std::string>& core_attributes() {
    static const std::set<std::string> core = {"value", "color", "shape",       "size",
                                               "type",  "x",     "orientation", "y"};
    return core;
}

// What a binding holds, as far as the static rules care. Reason results keep
// their description-derived flavor so misuse sites can be flagged; everything
// else collapses to object/position/plain.
enum class BindKind {
    object_set,   // SEARCH result
    position,     // LOCATE result
    reason_truth, // REASON: count comparison or free text
    reason_orient,// REASON: <obj>.orientation read
    reason_value, // REASON: MODE(...) or a non-orientation attribute read
    reason_list,  // REASON: bare comprehension
    plain,        // literals, copies of plain values, builtins outside REASON
    loop_var,
};

bool is_reason(BindKind k) {
    return k == BindKind::reason_truth || k == BindKind::reason_orient ||
           k == BindKind::reason_value || k == BindKind::reason_list;
}

struct Binding {
    std::string name;
    BindKind kind = BindKind::plain;
    SourceSpan span;
    bool used = false;
    bool exempt = false;  // its statement already carries an error
};

struct Finding {
    DiagCode code;
    SourceSpan span;
    std::string message;
    std::string hint;
};

// Ranks check classes; per statement only the first failing class reports.
int rank(DiagCode c) { return static_cast<int>(c); }

class Verifier {
public:
    explicit Verifier(const VerifyOptions& options) {
        known_attrs_ = core_attributes();
        known_attrs_.insert(options.extra_attributes.begin(), options.extra_attributes.end());
    }

    VerifyReport run(const Script& script) {
        scopes_.emplace_back();
        const Statement* last = nullptr;
        for (const Statement& st : script.statements)
            if (!is_comment(st)) last = &st;
        for (const Statement& st : script.statements) statement(st, &st == last);
        pop_scope();

        std::stable_sort(diags_.begin(), diags_.end(), [](const Diagnostic& a, const Diagnostic& b) {
            auto key = [](const Diagnostic& d) {
                return std::tuple(d.span.line, d.span.col, d.span.end_line, d.span.end_col,
                                  static_cast<int>(d.code));
            };
            return key(a) < key(b);
        });
        VerifyReport report;
        report.valid = std::none_of(diags_.begin(), diags_.end(),
                                    [](const Diagnostic& d) { return !d.warning; });
        report.diagnostics = std::move(diags_);
        return report;
    }

private:
    std::set<std::string> known_attrs_;
    std::vector<std::vector<Binding>> scopes_;
    std::vector<Diagnostic> diags_;

    // ---- scope plumbing ----

    Binding* lookup(const std::string& name) {
        for (auto scope = scopes_.rbegin(); scope != scopes_.rend(); ++scope)
            for (auto b = scope->rbegin(); b != scope->rend(); ++b)
                if (b->name == name) return &*b;
        return nullptr;
    }

    void bind(const std::string& name, BindKind kind, SourceSpan span, bool exempt) {
        Binding b;
        b.name = name;
        b.kind = kind;
        b.span = span;
        b.exempt = exempt;
        scopes_.back().push_back(std::move(b));
    }

    void pop_scope() {
        for (const Binding& b : scopes_.back())
            if (!b.used && !b.exempt)
                report(DiagCode::V006, b.span, "binding '" + b.name + "' is never used",
                       "remove the assignment or use '" + b.name + "' in a later statement");
        scopes_.pop_back();
    }

    void report(DiagCode code, SourceSpan span, std::string message, std::string hint) {
        Diagnostic d;
        d.code = code;
        d.warning = code == DiagCode::V006;
        d.span = span;
        d.message = std::move(message);
        d.hint = std::move(hint);
        diags_.push_back(std::move(d));
    }

    // ---- per-statement findings, first failing class wins ----

    struct Sink {
        std::optional<Finding> best;
        void add(DiagCode code, SourceSpan span, std::string message, std::string hint) {
            if (!best || rank(code) < rank(best->code))
                best = Finding{code, span, std::move(message), std::move(hint)};
        }
    };

    // Emits the winning finding for one statement, if any. Returns whether an
    // error was reported, so the statement's bindings can be exempted from
    // the unused-binding warning.
    bool flush(Sink& sink) {
        if (!sink.best) return false;
        report(sink.best->code, sink.best->span, std::move(sink.best->message),
               std::move(sink.best->hint));
        return true;
    }

    // Marks every visible site of `name` used, not just the innermost: sites
    // bound in sibling IF branches are indistinguishable without flow
    // analysis, and a later use keeps each of them alive.
    Binding* mark_all(const std::string& name) {
        Binding* innermost = nullptr;
        for (auto scope = scopes_.rbegin(); scope != scopes_.rend(); ++scope)
            for (auto b = scope->rbegin(); b != scope->rend(); ++b)
                if (b->name == name) {
                    b->used = true;
                    if (!innermost) innermost = &*b;
                }
        return innermost;
    }

    // ---- use resolution (V001) ----

    // Resolves a name use; records V001 into the sink when undefined.
    Binding* use(const std::string& name, SourceSpan span, Sink& sink) {
        Binding* b = mark_all(name);
        if (!b)
            sink.add(DiagCode::V001, span, "use of undefined identifier '" + name + "'",
                     "define '" + name + "' before its first use");
        return b;
    }

    // A reference that may be dotted ("a.b" from description text): the
    // object part is the name that must resolve.
    Binding* use_ref(const std::string& ref, SourceSpan span, Sink& sink) {
        auto dot = ref.find('.');
        return use(dot == std::string::npos ? ref : ref.substr(0, dot), span, sink);
    }

    void mark_if_bound(const std::string& ref) {
        auto dot = ref.find('.');
        mark_all(dot == std::string::npos ? ref : ref.substr(0, dot));
    }

    // ---- statements ----

    void statement(const Statement& st, bool is_last) {
        std::visit([&](const auto& node) { stmt(node, is_last); }, st.node);
    }

    void stmt(const Comment&, bool) {}

    void stmt(const Assignment& a, bool is_last) {
        Sink sink;
        check_expr(a.value.front(), sink);
        bool errored = flush(sink);
        BindKind kind = kind_of(a.value.front());
        for (const std::string& target : a.targets) bind(target, kind, a.span, errored || is_last);
    }

    void stmt(const ForLoop& f, bool is_last) {
        Sink sink;
        Binding* it = use(f.iterable, f.span, sink);
        if (it && is_reason(it->kind) && it->kind != BindKind::reason_list)
            sink.add(DiagCode::V003, f.span,
                     "reason result '" + f.iterable + "' used as a loop iterable",
                     reason_hint());
        bool errored = flush(sink);
        scopes_.emplace_back();
        bind(f.var, BindKind::loop_var, f.span, errored);
        const Statement* last_in_body = nullptr;
        if (is_last)
            for (const Statement& st : f.body)
                if (!is_comment(st)) last_in_body = &st;
        for (const Statement& st : f.body) statement(st, &st == last_in_body);
        pop_scope();
    }

    void stmt(const IfStmt& s, bool is_last) {
        for (const IfBranch& b : s.branches) {
            Sink sink;
            check_predicate(b.condition, /*element_var=*/nullptr, /*as_condition=*/true, sink);
            flush(sink);
            for (const Statement& st : b.body) statement(st, false);
        }
        for (const Statement& st : s.else_body) statement(st, false);
        (void)is_last;  // branch bodies bind into this scope; no special casing
    }

    void stmt(const OperateStmt& op, bool) {
        Sink sink;
        subject_use(op.subject, op.span, sink);
        if (op.op == OperateKind::move && op.cell) {
            coord_use(op.cell->row, op.span, sink);
            coord_use(op.cell->col, op.span, sink);
        }
        if (op.op == OperateKind::move && op.align) {
            Binding* set = use(op.align->set, op.align->span, sink);
            if (set && is_reason(set->kind))
                sink.add(DiagCode::V003, op.align->span,
                         "reason result '" + op.align->set + "' used as an alignment set",
                         reason_hint());
            check_axis(op.align->axis, op.align->span, sink);
        }
        if (op.op == OperateKind::rotate) rotate_target(op.rotate_target.front(), sink);
        flush(sink);
    }

    void subject_use(const std::string& name, SourceSpan span, Sink& sink) {
        Binding* b = use(name, span, sink);
        if (b && is_reason(b->kind))
            sink.add(DiagCode::V003, span, "reason result '" + name + "' used as an object binding",
                     reason_hint());
    }

    void coord_use(const CellCoord& c, SourceSpan span, Sink& sink) {
        if (c.is_number) return;
        Binding* b = use(c.name, span, sink);
        if (b && is_reason(b->kind))
            sink.add(DiagCode::V003, span,
                     "reason result '" + c.name + "' used as a grid coordinate", reason_hint());
    }

    void rotate_target(const Expr& e, Sink& sink) {
        if (std::holds_alternative<Literal>(e.node)) return;
        if (std::holds_alternative<AttributeAccess>(e.node)) {
            const auto& a = std::get<AttributeAccess>(e.node);
            use(a.object, a.span, sink);
            check_attr_name(a.attribute, a.span, sink);
            return;
        }
        if (std::holds_alternative<VarRef>(e.node)) {
            const auto& v = std::get<VarRef>(e.node);
            Binding* b = use(v.name, v.span, sink);
            if (b && is_reason(b->kind) && b->kind != BindKind::reason_orient)
                sink.add(DiagCode::V003, v.span,
                         "reason result '" + v.name + "' used as a rotate target",
                         reason_hint());
        }
    }

    void check_axis(const std::string& axis, SourceSpan span, Sink& sink) {
        if (axis == "x" || axis == "y") return;
        if (axis == "common_axis") {
            if (lookup("common_x") && lookup("common_y")) {
                mark_if_bound("common_x");
                mark_if_bound("common_y");
                return;
            }
            sink.add(DiagCode::V005, span,
                     "alignment axis 'common_axis' is unresolved (common_x and common_y must be "
                     "defined first)",
                     axis_hint());
            return;
        }
        sink.add(DiagCode::V005, span, "invalid alignment axis '" + axis + "'", axis_hint());
    }

    static std::string reason_hint() {
        return "reason results may only be used as conditions, in equality comparisons, or as "
               "orientation targets";
    }

    static std::string axis_hint() {
        return "align on axis x or y, or on common_axis after defining common_x and common_y";
    }

    // ---- expressions ----

    BindKind kind_of(const Expr& e) {
        if (std::holds_alternative<SearchExpr>(e.node)) return BindKind::object_set;
        if (std::holds_alternative<LocateExpr>(e.node)) return BindKind::position;
        if (std::holds_alternative<ReasonExpr>(e.node)) {
            switch (std::get<ReasonExpr>(e.node).description.form) {
                case DescriptionForm::attr_read:
                    return std::get<ReasonExpr>(e.node).description.attr->attribute == "orientation"
                               ? BindKind::reason_orient
                               : BindKind::reason_value;
                case DescriptionForm::comprehension: return BindKind::reason_list;
                case DescriptionForm::mode: return BindKind::reason_value;
                case DescriptionForm::count_compare:
                case DescriptionForm::free_text: return BindKind::reason_truth;
            }
        }
        if (std::holds_alternative<VarRef>(e.node)) {
            // Copies keep the source's flavor so later misuse is still caught.
            if (Binding* b = lookup(std::get<VarRef>(e.node).name)) return b->kind;
        }
        return BindKind::plain;
    }

    void check_expr(const Expr& e, Sink& sink) {
        if (std::holds_alternative<SearchExpr>(e.node)) {
            const auto& s = std::get<SearchExpr>(e.node);
            if (!s.source_is_captcha) {
                Binding* src = use(s.source, s.span, sink);
                if (src && is_reason(src->kind))
                    sink.add(DiagCode::V003, s.span,
                             "reason result '" + s.source + "' used as a search source",
                             reason_hint());
            }
            if (!s.where.empty()) {
                check_predicate(s.where.front(), &s.element_var, /*as_condition=*/false, sink);
                check_search_arity(s, sink);
            }
            return;
        }
        if (std::holds_alternative<ReasonExpr>(e.node)) {
            check_description(std::get<ReasonExpr>(e.node).description,
                              std::get<ReasonExpr>(e.node).span, sink);
            return;
        }
        if (std::holds_alternative<LocateExpr>(e.node)) {
            const auto& l = std::get<LocateExpr>(e.node);
            Binding* b = use(l.target, l.span, sink);
            if (b && is_reason(b->kind))
                sink.add(DiagCode::V003, l.span,
                         "reason result '" + l.target + "' used as an object binding",
                         reason_hint());
            return;
        }
        if (std::holds_alternative<AttributeAccess>(e.node)) {
            const auto& a = std::get<AttributeAccess>(e.node);
            use(a.object, a.span, sink);
            check_attr_name(a.attribute, a.span, sink);
            return;
        }
        if (std::holds_alternative<Comprehension>(e.node)) {
            const auto& c = std::get<Comprehension>(e.node);
            use(c.source, c.span, sink);
            check_attr_name(c.projection.attribute, c.projection.span, sink);
            return;
        }
        if (std::holds_alternative<CallExpr>(e.node)) {
            for (const Expr& arg : std::get<CallExpr>(e.node).args) check_expr(arg, sink);
            return;
        }
        if (std::holds_alternative<VarRef>(e.node)) {
            const auto& v = std::get<VarRef>(e.node);
            use(v.name, v.span, sink);
            return;
        }
        // Literal: nothing to check.
    }

    // Distinct attribute names compared against the search's own element
    // variable; more than one is the multi-attribute error.
    void check_search_arity(const SearchExpr& s, Sink& sink) {
        std::vector<std::string> attrs;
        collect_element_attrs(s.where.front(), s.element_var, attrs);
        std::vector<std::string> distinct;
        for (const std::string& a : attrs)
            if (std::find(distinct.begin(), distinct.end(), a) == distinct.end())
                distinct.push_back(a);
        if (distinct.size() <= 1) return;
        std::string list;
        for (std::size_t i = 0; i < distinct.size(); ++i) list += (i ? ", " : "") + distinct[i];
        sink.add(DiagCode::V002, s.span,
                 "search predicate constrains " + std::to_string(distinct.size()) +
                     " attributes (" + list + "); only one attribute is allowed per search",
                 "split the search into two sequential single-attribute searches");
    }

    void collect_element_attrs(const Predicate& p, const std::string& element_var,
                               std::vector<std::string>& out) {
        if (p.kind == Predicate::Kind::comparison) {
            const Comparison& c = p.comparison.front();
            if (std::holds_alternative<AttributeAccess>(c.lhs)) {
                const auto& a = std::get<AttributeAccess>(c.lhs);
                if (a.object == element_var) out.push_back(a.attribute);
            }
            const Expr& operand = c.operand.front();
            if (std::holds_alternative<AttributeAccess>(operand.node)) {
                const auto& a = std::get<AttributeAccess>(operand.node);
                if (a.object == element_var) out.push_back(a.attribute);
            }
            return;
        }
        for (const Predicate& child : p.children) collect_element_attrs(child, element_var, out);
    }

    // ---- predicates ----

    // element_var: the search's own variable, in scope for this predicate
    // only. as_condition: the predicate sits in IF position, where bare atoms
    // are allowed.
    void check_predicate(const Predicate& p, const std::string* element_var, bool as_condition,
                         Sink& sink) {
        switch (p.kind) {
            case Predicate::Kind::comparison:
                check_comparison(p.comparison.front(), element_var, sink);
                return;
            case Predicate::Kind::atom: {
                const Expr& a = p.atom.front();
                if (std::holds_alternative<ReasonExpr>(a.node)) {
                    const auto& r = std::get<ReasonExpr>(a.node);
                    check_description(r.description, r.span, sink);
                    DescriptionForm f = r.description.form;
                    if (f != DescriptionForm::count_compare && f != DescriptionForm::free_text)
                        sink.add(DiagCode::V003, r.span,
                                 "reason result used as a condition but its description does not "
                                 "yield a truth value",
                                 reason_hint());
                } else if (std::holds_alternative<VarRef>(a.node)) {
                    const auto& v = std::get<VarRef>(a.node);
                    Binding* b = use(v.name, v.span, sink);
                    if (b && is_reason(b->kind) && b->kind != BindKind::reason_truth)
                        sink.add(DiagCode::V003, v.span,
                                 "reason result '" + v.name + "' used as a condition",
                                 reason_hint());
                }
                (void)as_condition;
                return;
            }
            default:
                for (const Predicate& child : p.children)
                    check_predicate(child, element_var, as_condition, sink);
        }
    }

    void check_comparison(const Comparison& c, const std::string* element_var, Sink& sink) {
        bool equality = c.cmp == Comparator::eq || c.cmp == Comparator::ne;
        if (std::holds_alternative<AttributeAccess>(c.lhs)) {
            const auto& a = std::get<AttributeAccess>(c.lhs);
            if (!element_var || a.object != *element_var) use(a.object, a.span, sink);
            check_attr_name(a.attribute, a.span, sink);
        } else {
            const auto& v = std::get<VarRef>(c.lhs);
            if (!element_var || v.name != *element_var) {
                Binding* b = use(v.name, v.span, sink);
                if (b && is_reason(b->kind) && !equality)
                    sink.add(DiagCode::V003, v.span,
                             "reason result '" + v.name + "' used in an ordering comparison",
                             reason_hint());
            }
        }
        const Expr& operand = c.operand.front();
        if (std::holds_alternative<VarRef>(operand.node)) {
            const auto& v = std::get<VarRef>(operand.node);
            if (!element_var || v.name != *element_var) {
                Binding* b = use(v.name, v.span, sink);
                if (b && is_reason(b->kind) && !equality)
                    sink.add(DiagCode::V003, v.span,
                             "reason result '" + v.name + "' used in an ordering comparison",
                             reason_hint());
            }
            return;
        }
        if (std::holds_alternative<AttributeAccess>(operand.node)) {
            const auto& a = std::get<AttributeAccess>(operand.node);
            if (!element_var || a.object != *element_var) use(a.object, a.span, sink);
            check_attr_name(a.attribute, a.span, sink);
            return;
        }
        if (std::holds_alternative<ReasonExpr>(operand.node)) {
            const auto& r = std::get<ReasonExpr>(operand.node);
            check_description(r.description, r.span, sink);
            if (!equality)
                sink.add(DiagCode::V003, r.span,
                         "reason result used in an ordering comparison", reason_hint());
            return;
        }
        // Literal operands carry nothing to resolve.
    }

    // ---- descriptions ----

    void check_description(const Description& d, SourceSpan span, Sink& sink) {
        switch (d.form) {
            case DescriptionForm::attr_read:
                use(d.attr->object, span, sink);
                check_attr_name(d.attr->attribute, span, sink);
                return;
            case DescriptionForm::comprehension:
            case DescriptionForm::mode:
                use(d.source, span, sink);
                check_attr_name(d.attr->attribute, span, sink);
                return;
            case DescriptionForm::count_compare:
                use(d.source, span, sink);
                // The counted predicate gets the full treatment; its spans
                // were shifted into file coordinates during parsing.
                check_predicate(d.count_pred.front(), &d.element_var, /*as_condition=*/false,
                                sink);
                return;
            case DescriptionForm::free_text:
                // Prose never fails resolution; words that happen to match a
                // binding count as uses.
                for (const std::string& ref : d.embedded_refs) mark_if_bound(ref);
                return;
        }
    }

    void check_attr_name(const std::string& name, SourceSpan span, Sink& sink) {
        if (known_attrs_.count(name)) return;
        sink.add(DiagCode::V004, span, "unknown attribute '" + name + "'",
                 "use a core attribute (value, color, shape, size, type, orientation, x, y) or "
                 "register '" +
                     name + "' as an extension attribute");
    }
};

}  // namespace

const char* diag_code_name(DiagCode code) {
    switch (code) {
        case DiagCode::V001: return "V001";
        case DiagCode::V002: return "V002";
        case DiagCode::V003: return "V003";
        case DiagCode::V004: return "V004";
        case DiagCode::V005: return "V005";
        case DiagCode::V006: return "V006";
    }
    return "?";
}

VerifyReport verify(const Script& script) { return verify(script, VerifyOptions{}); }

VerifyReport verify(const Script& script, const VerifyOptions& options) {
    return Verifier(options).run(script);
}

std::string explain(const Diagnostic& d) {
    std::string head = d.warning ? "warning on line " : "On line ";
    return head + std::to_string(d.span.line) + ": " + d.message + ". Repair: " + d.hint + ".";
}

Json diagnostic_to_json(const Diagnostic& d) {
    Json j;
    j["code"] = diag_code_name(d.code);
    j["severity"] = d.warning ? "warning" : "error";
    j["line"] = d.span.line;
    j["col"] = d.span.col;
    j["message"] = d.message;
    j["hint"] = d.hint;
    return j;
}

Json report_to_json(const VerifyReport& r) {
    Json j;
    j["valid"] = r.valid;
    j["diagnostics"] = Json::array();
    for (const Diagnostic& d : r.diagnostics) j["diagnostics"].push_back(diagnostic_to_json(d));
    return j;
}

}  // namespace cdsl
