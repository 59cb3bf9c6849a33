#include "cdsl/interpreter.hpp"

#include <algorithm>
#include <cstdio>
#include <utility>

#include "cdsl/verifier.hpp"

namespace cdsl {

const char* truth_name(Truth t) {
    switch (t) {
        case Truth::true_: return "true";
        case Truth::false_: return "false";
        case Truth::unknown: return "unknown";
    }
    return "unknown";
}

Truth truth_not(Truth a) {
    if (a == Truth::true_) return Truth::false_;
    if (a == Truth::false_) return Truth::true_;
    return Truth::unknown;
}

Truth truth_and(Truth a, Truth b) {
    if (a == Truth::false_ || b == Truth::false_) return Truth::false_;
    if (a == Truth::true_ && b == Truth::true_) return Truth::true_;
    return Truth::unknown;
}

Truth truth_or(Truth a, Truth b) {
    if (a == Truth::true_ || b == Truth::true_) return Truth::true_;
    if (a == Truth::false_ && b == Truth::false_) return Truth::false_;
    return Truth::unknown;
}

const char* runtime_error_kind_name(RuntimeErrorKind k) {
    switch (k) {
        case RuntimeErrorKind::empty_set_where_one_required: return "EmptySetWhereOneRequired";
        case RuntimeErrorKind::unknown_condition_strict: return "UnknownConditionStrict";
        case RuntimeErrorKind::no_such_attribute: return "NoSuchAttribute";
        case RuntimeErrorKind::ambiguous_mode: return "AmbiguousMode";
        case RuntimeErrorKind::illegal_move: return "IllegalMove";
    }
    return "?";
}

namespace {

std::string fmt_degrees(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string pos_text(GridPos p) {
    return "(" + std::to_string(p.row) + ", " + std::to_string(p.col) + ")";
}

// type rank = variant index: numbers before strings before orientations...
bool scalar_less(const Scalar& a, const Scalar& b) {
    if (a.index() != b.index()) return a.index() < b.index();
    switch (a.index()) {
        case 0: return std::get<long long>(a) < std::get<long long>(b);
        case 1: return std::get<std::string>(a) < std::get<std::string>(b);
        case 2: return std::get<Orientation>(a).degrees < std::get<Orientation>(b).degrees;
        case 3: {
            GridPos pa = std::get<GridPos>(a);
            GridPos pb = std::get<GridPos>(b);
            return pa.row != pb.row ? pa.row < pb.row : pa.col < pb.col;
        }
        default:
            return static_cast<int>(std::get<Truth>(a)) < static_cast<int>(std::get<Truth>(b));
    }
}

std::string scalar_summary(const Scalar& s) {
    switch (s.index()) {
        case 0: return std::to_string(std::get<long long>(s));
        case 1: return "\"" + std::get<std::string>(s) + "\"";
        case 2: return fmt_degrees(std::get<Orientation>(s).degrees) + " degrees";
        case 3: return pos_text(std::get<GridPos>(s));
        default: return truth_name(std::get<Truth>(s));
    }
}

Json scalar_json(const Scalar& s) {
    switch (s.index()) {
        case 0: return std::get<long long>(s);
        case 1: return std::get<std::string>(s);
        case 2: {
            Json j;
            j["degrees"] = std::get<Orientation>(s).degrees;
            return j;
        }
        case 3: {
            Json j;
            j["row"] = std::get<GridPos>(s).row;
            j["col"] = std::get<GridPos>(s).col;
            return j;
        }
        default: return truth_name(std::get<Truth>(s));
    }
}

Value scalar_value(const Scalar& s) {
    return std::visit([](const auto& v) -> Value { return v; }, s);
}

bool is_order_cmp(Comparator c) {
    return c == Comparator::lt || c == Comparator::gt || c == Comparator::le ||
           c == Comparator::ge;
}

Truth ordered(Comparator cmp, int sign) {
    switch (cmp) {
        case Comparator::eq: return truth_of(sign == 0);
        case Comparator::ne: return truth_of(sign != 0);
        case Comparator::lt: return truth_of(sign < 0);
        case Comparator::gt: return truth_of(sign > 0);
        case Comparator::le: return truth_of(sign <= 0);
        case Comparator::ge: return truth_of(sign >= 0);
    }
    return Truth::unknown;
}

// ==/!= across any same-type pair; ordering only where numeric. Mismatched
// types are never equal; their ordering is unknowable.
Truth compare_values(const Value& a, Comparator cmp, const Value& b) {
    const long long* an = std::get_if<long long>(&a);
    const long long* bn = std::get_if<long long>(&b);
    if (an && bn) return ordered(cmp, *an < *bn ? -1 : (*an > *bn ? 1 : 0));

    const Orientation* ao = std::get_if<Orientation>(&a);
    const Orientation* bo = std::get_if<Orientation>(&b);
    if ((ao || an) && (bo || bn)) {
        if (is_order_cmp(cmp)) return Truth::unknown;
        double da = ao ? ao->degrees : static_cast<double>(*an);
        double db = bo ? bo->degrees : static_cast<double>(*bn);
        return truth_of(cmp == Comparator::eq ? da == db : da != db);
    }

    if (a.index() == b.index()) {
        if (is_order_cmp(cmp)) return Truth::unknown;
        return truth_of(cmp == Comparator::eq ? a == b : !(a == b));
    }
    if (cmp == Comparator::eq) return Truth::false_;
    if (cmp == Comparator::ne) return Truth::true_;
    return Truth::unknown;
}

struct ElementCtx {
    const std::string* var = nullptr;
    const SceneObject* obj = nullptr;
};

struct SearchOutcome {
    ObjectSet set;
    int excluded_unknown = 0;
};

int max_multiplicity(std::vector<int> values) {
    std::sort(values.begin(), values.end());
    int best = 0;
    int run = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        run = (i > 0 && values[i] == values[i - 1]) ? run + 1 : 1;
        best = std::max(best, run);
    }
    return best;
}

class Exec {
public:
    Exec(const Scene& scene, const ExecOptions& opts) : opts_(opts), scene_(scene) {}

    Env& env() { return env_; }

    ExecutionResult run(const Script& script) {
        VerifyReport report = verify(script);
        if (!report.valid) {
            std::string what = "execute requires a script that passes verification";
            for (const Diagnostic& d : report.diagnostics) {
                if (d.warning) continue;
                what += ": ";
                what += diag_code_name(d.code);
                what += " ";
                what += d.message;
                break;
            }
            throw ContractViolation(what);
        }
        exec_block(script.statements);

        ExecutionResult res;
        if (!actions_.empty()) {
            res.answer = actions_.back();
        } else if (!last_located_.empty()) {
            Action a;
            a.kind = ActionKind::click;
            a.object_id = last_located_;
            res.answer = a;
        }
        res.final_env = std::move(env_);
        res.actions = std::move(actions_);
        res.trace = std::move(trace_);
        res.final_scene = std::move(scene_);
        return res;
    }

    Truth predicate(const Predicate& p, const ElementCtx& el) { return eval_pred(p, el); }

private:
    ExecOptions opts_;
    Scene scene_;
    Env env_;
    std::vector<Action> actions_;
    std::vector<StepRecord> trace_;
    std::vector<std::string> notes_;
    int step_ = 0;
    std::string last_located_;

    [[noreturn]] void fail(RuntimeErrorKind kind, SourceSpan span, std::string msg) {
        msg += " (line ";
        msg += std::to_string(span.line);
        msg += ")";
        throw RuntimeError(kind, span, msg);
    }

    [[noreturn]] void broken(SourceSpan span, std::string msg) {
        msg += " (line ";
        msg += std::to_string(span.line);
        msg += ")";
        throw ContractViolation(msg);
    }

    const Value& lookup(const std::string& name, SourceSpan span) {
        auto it = env_.find(name);
        if (it == env_.end()) broken(span, "unbound identifier '" + name + "'");
        return it->second;
    }

    std::vector<std::string> resolve_ids(const std::string& name, SourceSpan span) {
        const Value& v = lookup(name, span);
        if (const ObjectSet* set = std::get_if<ObjectSet>(&v)) return set->ids;
        if (const ObjectRef* ref = std::get_if<ObjectRef>(&v)) return {ref->id};
        broken(span, "'" + name + "' does not name objects");
    }

    std::string resolve_single(const std::string& name, SourceSpan span) {
        std::vector<std::string> ids = resolve_ids(name, span);
        if (ids.empty())
            fail(RuntimeErrorKind::empty_set_where_one_required, span,
                 "'" + name + "' is empty where exactly one object is required");
        if (ids.size() > 1)
            fail(RuntimeErrorKind::empty_set_where_one_required, span,
                 "'" + name + "' holds " + std::to_string(ids.size()) +
                     " objects where exactly one is required");
        return ids[0];
    }

    const SceneObject& object_by_id(const std::string& id, SourceSpan span) {
        const SceneObject* obj = find_object(scene_, id);
        if (!obj) broken(span, "object '" + id + "' is not in the scene");
        return *obj;
    }

    Scalar attr_scalar(const AttrValue& v, SourceSpan span) {
        if (const std::string* s = std::get_if<std::string>(&v)) return *s;
        if (const long long* n = std::get_if<long long>(&v)) return *n;
        if (const Orientation* o = std::get_if<Orientation>(&v)) return *o;
        if (const GridPos* p = std::get_if<GridPos>(&v)) return *p;
        broken(span, "point-valued attributes have no script representation");
    }

    // x/y read through the grid position when not stored explicitly
    std::optional<Scalar> read_attr(const SceneObject& obj, const std::string& name,
                                    SourceSpan span) {
        if (const AttrValue* v = attr(obj, name)) return attr_scalar(*v, span);
        if (name == "x" || name == "y") {
            if (std::optional<GridPos> pos = position_of(obj))
                return static_cast<long long>(name == "x" ? pos->col : pos->row);
        }
        return std::nullopt;
    }

    Scalar read_attr_required(const SceneObject& obj, const std::string& name, SourceSpan span) {
        std::optional<Scalar> s = read_attr(obj, name, span);
        if (!s)
            fail(RuntimeErrorKind::no_such_attribute, span,
                 "object '" + obj.id + "' has no attribute '" + name + "'");
        return *s;
    }

    const SceneObject& access_object(const std::string& name, const ElementCtx& el,
                                     SourceSpan span) {
        if (el.var && name == *el.var) return *el.obj;
        return object_by_id(resolve_single(name, span), span);
    }

    // soft: a missing attribute yields nullopt (comparisons read it as
    // unknown); otherwise it raises NoSuchAttribute.
    std::optional<Value> eval(const Expr& e, const ElementCtx& el, bool soft) {
        if (const Literal* lit = std::get_if<Literal>(&e.node)) {
            if (lit->is_string) return Value(lit->string_value);
            return Value(lit->number_value);
        }
        if (const VarRef* var = std::get_if<VarRef>(&e.node)) return lookup(var->name, var->span);
        if (const AttributeAccess* aa = std::get_if<AttributeAccess>(&e.node)) {
            const SceneObject& obj = access_object(aa->object, el, aa->span);
            std::optional<Scalar> s = read_attr(obj, aa->attribute, aa->span);
            if (!s) {
                if (soft) return std::nullopt;
                fail(RuntimeErrorKind::no_such_attribute, aa->span,
                     "object '" + obj.id + "' has no attribute '" + aa->attribute + "'");
            }
            return scalar_value(*s);
        }
        if (const SearchExpr* se = std::get_if<SearchExpr>(&e.node)) return Value(search(*se).set);
        if (const ReasonExpr* re = std::get_if<ReasonExpr>(&e.node))
            return describe(re->description, re->span);
        if (const LocateExpr* le = std::get_if<LocateExpr>(&e.node)) return locate(*le);
        if (const Comprehension* co = std::get_if<Comprehension>(&e.node))
            return Value(project(co->source, co->projection.attribute, co->span));
        if (const CallExpr* call = std::get_if<CallExpr>(&e.node)) return call_fn(*call, el);
        throw ContractViolation("unhandled expression node");
    }

    Value eval_value(const Expr& e, const ElementCtx& el) { return *eval(e, el, false); }

    SearchOutcome search(const SearchExpr& se) {
        std::vector<std::string> pool;
        if (se.source_is_captcha) {
            pool.reserve(scene_.objects.size());
            for (const SceneObject& obj : scene_.objects) pool.push_back(obj.id);
        } else {
            pool = resolve_ids(se.source, se.span);
        }
        SearchOutcome out;
        for (const std::string& id : pool) {
            const SceneObject& obj = object_by_id(id, se.span);
            if (se.where.empty()) {
                out.set.ids.push_back(id);
                continue;
            }
            ElementCtx el{&se.element_var, &obj};
            Truth t = eval_pred(se.where[0], el);
            if (t == Truth::true_) out.set.ids.push_back(id);
            else if (t == Truth::unknown) ++out.excluded_unknown;
        }
        if (out.excluded_unknown > 0)
            notes_.push_back(std::to_string(out.excluded_unknown) + " excluded as unknown");
        return out;
    }

    ListValue project(const std::string& source, const std::string& attr_name, SourceSpan span) {
        ListValue list;
        for (const std::string& id : resolve_ids(source, span))
            list.items.push_back(read_attr_required(object_by_id(id, span), attr_name, span));
        return list;
    }

    long long count_where(const Description& d, SourceSpan span) {
        long long n = 0;
        for (const std::string& id : resolve_ids(d.source, span)) {
            const SceneObject& obj = object_by_id(id, span);
            if (d.count_pred.empty()) {
                ++n;
                continue;
            }
            ElementCtx el{&d.element_var, &obj};
            if (eval_pred(d.count_pred[0], el) == Truth::true_) ++n;
        }
        return n;
    }

    Scalar pick_mode(const std::vector<Scalar>& items, SourceSpan span) {
        if (items.empty())
            fail(RuntimeErrorKind::empty_set_where_one_required, span, "MODE of an empty list");
        std::vector<std::pair<Scalar, int>> counts;
        for (const Scalar& item : items) {
            bool found = false;
            for (auto& [value, n] : counts) {
                if (value == item) {
                    ++n;
                    found = true;
                    break;
                }
            }
            if (!found) counts.emplace_back(item, 1);
        }
        int best = 0;
        for (const auto& [value, n] : counts) best = std::max(best, n);
        std::vector<Scalar> leaders;
        for (const auto& [value, n] : counts)
            if (n == best) leaders.push_back(value);
        if (leaders.size() > 1) {
            if (opts_.strict)
                fail(RuntimeErrorKind::ambiguous_mode, span,
                     "MODE is ambiguous: " + std::to_string(leaders.size()) + " values tie at " +
                         std::to_string(best) + " occurrence(s)");
            std::sort(leaders.begin(), leaders.end(), scalar_less);
            notes_.push_back("mode tie broken toward " + scalar_summary(leaders.front()));
        }
        return leaders.front();
    }

    Value describe(const Description& d, SourceSpan span) {
        switch (d.form) {
            case DescriptionForm::attr_read: {
                const AttributeAccess& aa = *d.attr;
                const SceneObject& obj = access_object(aa.object, ElementCtx{}, aa.span);
                return scalar_value(read_attr_required(obj, aa.attribute, aa.span));
            }
            case DescriptionForm::comprehension:
                return Value(project(d.source, d.attr->attribute, span));
            case DescriptionForm::mode:
                return scalar_value(pick_mode(project(d.source, d.attr->attribute, span).items,
                                              span));
            case DescriptionForm::count_compare: {
                long long n = count_where(d, span);
                int sign = n < d.count_rhs ? -1 : (n > d.count_rhs ? 1 : 0);
                return Value(ordered(d.count_cmp, sign));
            }
            case DescriptionForm::free_text:
                if (opts_.reasoner) {
                    if (std::optional<Value> v = opts_.reasoner(d.raw)) return *std::move(v);
                }
                notes_.push_back("free-text description evaluated as unknown");
                return Value(Truth::unknown);
        }
        throw ContractViolation("unhandled description form");
    }

    Value locate(const LocateExpr& le) {
        std::vector<std::string> ids = resolve_ids(le.target, le.span);
        if (ids.empty())
            fail(RuntimeErrorKind::empty_set_where_one_required, le.span,
                 "'" + le.target + "' is empty where exactly one object is required");
        if (ids.size() == 1) {
            const SceneObject& obj = object_by_id(ids[0], le.span);
            std::optional<GridPos> pos = position_of(obj);
            if (!pos)
                fail(RuntimeErrorKind::no_such_attribute, le.span,
                     "object '" + ids[0] + "' has no grid position");
            last_located_ = ids[0];
            return Value(*pos);
        }
        ListValue list;
        for (const std::string& id : ids) {
            const SceneObject& obj = object_by_id(id, le.span);
            std::optional<GridPos> pos = position_of(obj);
            if (!pos)
                fail(RuntimeErrorKind::no_such_attribute, le.span,
                     "object '" + id + "' has no grid position");
            list.items.push_back(*pos);
        }
        return Value(list);
    }

    Value call_fn(const CallExpr& call, const ElementCtx& el) {
        if (call.args.size() != 1) broken(call.span, "builtin takes exactly one argument");
        Value v = eval_value(call.args[0], el);
        if (call.function == BuiltinFn::mode) {
            const ListValue* list = std::get_if<ListValue>(&v);
            if (!list) broken(call.span, "MODE needs a list of values");
            return scalar_value(pick_mode(list->items, call.span));
        }
        if (const ObjectSet* set = std::get_if<ObjectSet>(&v))
            return Value(static_cast<long long>(set->ids.size()));
        if (const ListValue* list = std::get_if<ListValue>(&v))
            return Value(static_cast<long long>(list->items.size()));
        if (std::get_if<ObjectRef>(&v)) return Value(static_cast<long long>(1));
        broken(call.span, "COUNT needs objects or a list");
    }

    Truth eval_pred(const Predicate& p, const ElementCtx& el) {
        switch (p.kind) {
            case Predicate::Kind::comparison: return comparison(p.comparison[0], el);
            case Predicate::Kind::atom: {
                Value v = eval_value(p.atom[0], el);
                if (const Truth* t = std::get_if<Truth>(&v)) return *t;
                broken(span_of(p.atom[0]), "condition is not a truth value");
            }
            case Predicate::Kind::and_:
                return truth_and(eval_pred(p.children[0], el), eval_pred(p.children[1], el));
            case Predicate::Kind::or_:
                return truth_or(eval_pred(p.children[0], el), eval_pred(p.children[1], el));
            case Predicate::Kind::not_: return truth_not(eval_pred(p.children[0], el));
        }
        throw ContractViolation("unhandled predicate node");
    }

    Truth comparison(const Comparison& c, const ElementCtx& el) {
        std::optional<Value> lhs;
        if (const AttributeAccess* aa = std::get_if<AttributeAccess>(&c.lhs)) {
            Expr e{*aa};
            lhs = eval(e, el, true);
        } else {
            lhs = lookup(std::get<VarRef>(c.lhs).name, std::get<VarRef>(c.lhs).span);
        }
        std::optional<Value> rhs = eval(c.operand[0], el, true);
        if (!lhs || !rhs) return Truth::unknown;
        return compare_values(*lhs, c.cmp, *rhs);
    }

    // ---- statements ----

    void record(const SourceSpan& span, std::string summary,
                std::optional<Value> value = std::nullopt) {
        ++step_;
        for (const std::string& note : notes_) {
            summary += "; ";
            summary += note;
        }
        notes_.clear();
        trace_.push_back(StepRecord{span.line, step_, std::move(summary), std::move(value)});
    }

    void exec_block(const std::vector<Statement>& stmts) {
        for (const Statement& st : stmts) {
            if (const Assignment* a = std::get_if<Assignment>(&st.node)) do_assign(*a);
            else if (const ForLoop* f = std::get_if<ForLoop>(&st.node)) do_for(*f);
            else if (const IfStmt* i = std::get_if<IfStmt>(&st.node)) do_if(*i);
            else if (const OperateStmt* o = std::get_if<OperateStmt>(&st.node)) do_operate(*o);
            // comments are not executed
        }
    }

    void do_assign(const Assignment& a) {
        Value v = eval_value(a.value[0], ElementCtx{});
        std::string names;
        for (std::size_t i = 0; i < a.targets.size(); ++i) {
            if (i) names += ", ";
            names += a.targets[i];
            env_[a.targets[i]] = v;
        }
        record(a.span, names + " = " + value_summary(v), v);
    }

    void do_for(const ForLoop& f) {
        Value iterable = lookup(f.iterable, f.span);  // snapshot
        std::vector<Value> items;
        if (const ListValue* list = std::get_if<ListValue>(&iterable)) {
            for (const Scalar& s : list->items) items.push_back(scalar_value(s));
        } else if (const ObjectSet* set = std::get_if<ObjectSet>(&iterable)) {
            for (const std::string& id : set->ids) items.push_back(Value(ObjectRef{id}));
        } else if (const ObjectRef* ref = std::get_if<ObjectRef>(&iterable)) {
            items.push_back(Value(*ref));
        } else {
            broken(f.span, "'" + f.iterable + "' is not iterable");
        }
        record(f.span, "for " + f.var + " in " + f.iterable + ": " +
                           std::to_string(items.size()) +
                           (items.size() == 1 ? " iteration" : " iterations"));
        for (Value& item : items) {
            env_[f.var] = std::move(item);
            exec_block(f.body);
        }
    }

    void do_if(const IfStmt& s) {
        int taken = -1;
        for (std::size_t i = 0; i < s.branches.size(); ++i) {
            Truth t = eval_pred(s.branches[i].condition, ElementCtx{});
            if (t == Truth::true_) {
                taken = static_cast<int>(i);
                break;
            }
            if (t == Truth::unknown) {
                if (opts_.strict)
                    fail(RuntimeErrorKind::unknown_condition_strict, s.branches[i].span,
                         "condition is unknown under strict evaluation");
                notes_.push_back("condition " + std::to_string(i + 1) +
                                 " unknown (treated as false)");
            }
        }
        const std::vector<Statement>* body = nullptr;
        std::string summary;
        if (taken >= 0) {
            summary = "if: branch " + std::to_string(taken + 1) + " taken";
            body = &s.branches[taken].body;
        } else if (!s.else_body.empty()) {
            summary = "if: else taken";
            body = &s.else_body;
        } else {
            summary = "if: no branch taken";
        }
        record(s.span, std::move(summary));
        if (body) exec_block(*body);
    }

    long long coord_value(const CellCoord& c) {
        if (c.is_number) return c.number;
        const Value& v = lookup(c.name, c.span);
        if (const long long* n = std::get_if<long long>(&v)) return *n;
        broken(c.span, "cell coordinate '" + c.name + "' is not a number");
    }

    long long axis_mode(const std::vector<int>& values, SourceSpan span) {
        std::vector<Scalar> items;
        items.reserve(values.size());
        for (int v : values) items.emplace_back(static_cast<long long>(v));
        return std::get<long long>(pick_mode(items, span));
    }

    GridPos align_target(const std::string& subject_id, const AlignDest& align, SourceSpan span) {
        const SceneObject& subject = object_by_id(subject_id, span);
        std::optional<GridPos> spos = position_of(subject);
        if (!spos)
            fail(RuntimeErrorKind::no_such_attribute, span,
                 "object '" + subject_id + "' has no grid position");

        // the subject takes part in the majority vote even when the set
        // binding predates its membership
        std::vector<std::string> ids = resolve_ids(align.set, align.span);
        if (std::find(ids.begin(), ids.end(), subject_id) == ids.end())
            ids.push_back(subject_id);
        std::vector<int> rows, cols;
        for (const std::string& id : ids) {
            const SceneObject& obj = object_by_id(id, align.span);
            std::optional<GridPos> pos = position_of(obj);
            if (!pos)
                fail(RuntimeErrorKind::no_such_attribute, align.span,
                     "object '" + id + "' has no grid position");
            rows.push_back(pos->row);
            cols.push_back(pos->col);
        }
        std::string axis = align.axis;
        if (axis == "common_axis") {
            int row_mult = max_multiplicity(rows);
            int col_mult = max_multiplicity(cols);
            if (row_mult == col_mult)
                fail(RuntimeErrorKind::ambiguous_mode, align.span,
                     "common axis is ambiguous: row and column multiplicities tie");
            axis = row_mult > col_mult ? "y" : "x";
        }
        if (axis == "x")
            return GridPos{spos->row, static_cast<int>(axis_mode(cols, align.span))};
        return GridPos{static_cast<int>(axis_mode(rows, align.span)), spos->col};
    }

    double rotate_degrees(const OperateStmt& op) {
        Value v = eval_value(op.rotate_target[0], ElementCtx{});
        if (const long long* n = std::get_if<long long>(&v)) return static_cast<double>(*n);
        if (const Orientation* o = std::get_if<Orientation>(&v)) return o->degrees;
        broken(op.span, "rotation target is neither degrees nor an orientation");
    }

    void do_operate(const OperateStmt& op) {
        std::string id = resolve_single(op.subject, op.span);
        Action a;
        a.object_id = id;
        switch (op.op) {
            case OperateKind::click: {
                a.kind = ActionKind::click;
                actions_.push_back(a);
                record(op.span, "click " + id, Value(ObjectRef{id}));
                return;
            }
            case OperateKind::rotate: {
                Orientation norm = normalized(rotate_degrees(op));
                find_object(scene_, id)->attrs["orientation"] = norm;
                a.kind = ActionKind::rotate;
                a.degrees = norm.degrees;
                actions_.push_back(a);
                record(op.span, "rotate " + id + " to " + fmt_degrees(norm.degrees) + " degrees",
                       Value(norm));
                return;
            }
            case OperateKind::move: {
                GridPos to = op.cell ? GridPos{static_cast<int>(coord_value(op.cell->row)),
                                               static_cast<int>(coord_value(op.cell->col))}
                                     : align_target(id, *op.align, op.span);
                std::string why;
                if (!apply_move(scene_, id, to, &why))
                    fail(RuntimeErrorKind::illegal_move, op.span, why);
                a.kind = ActionKind::move;
                a.to = to;
                actions_.push_back(a);
                record(op.span, "move " + id + " to " + pos_text(to),
                       Value(ListValue{{Scalar(id), Scalar(to)}}));
                return;
            }
        }
    }
};

}  // namespace

std::string value_summary(const Value& v) {
    if (const ObjectSet* set = std::get_if<ObjectSet>(&v)) {
        std::string out = "{";
        for (std::size_t i = 0; i < set->ids.size(); ++i) {
            if (i) out += ", ";
            out += set->ids[i];
        }
        return out + "}";
    }
    if (const ObjectRef* ref = std::get_if<ObjectRef>(&v)) return ref->id;
    if (const Truth* t = std::get_if<Truth>(&v)) return truth_name(*t);
    if (const Orientation* o = std::get_if<Orientation>(&v))
        return fmt_degrees(o->degrees) + " degrees";
    if (const long long* n = std::get_if<long long>(&v)) return std::to_string(*n);
    if (const std::string* s = std::get_if<std::string>(&v)) return "\"" + *s + "\"";
    if (const GridPos* p = std::get_if<GridPos>(&v)) return pos_text(*p);
    const ListValue& list = std::get<ListValue>(v);
    std::string out = "[";
    for (std::size_t i = 0; i < list.items.size(); ++i) {
        if (i) out += ", ";
        out += scalar_summary(list.items[i]);
    }
    return out + "]";
}

Json value_to_json(const Value& v) {
    if (const ObjectSet* set = std::get_if<ObjectSet>(&v)) {
        Json arr = Json::array();
        for (const std::string& id : set->ids) arr.push_back(id);
        return arr;
    }
    if (const ObjectRef* ref = std::get_if<ObjectRef>(&v)) return ref->id;
    if (const Truth* t = std::get_if<Truth>(&v)) return truth_name(*t);
    if (const Orientation* o = std::get_if<Orientation>(&v)) return scalar_json(Scalar{*o});
    if (const long long* n = std::get_if<long long>(&v)) return *n;
    if (const std::string* s = std::get_if<std::string>(&v)) return *s;
    if (const GridPos* p = std::get_if<GridPos>(&v)) return scalar_json(Scalar{*p});
    const ListValue& list = std::get<ListValue>(v);
    Json arr = Json::array();
    for (const Scalar& s : list.items) arr.push_back(scalar_json(s));
    return arr;
}

Json trace_to_json(const std::vector<StepRecord>& trace) {
    Json arr = Json::array();
    for (const StepRecord& r : trace) {
        Json j;
        j["line"] = r.line;
        j["step"] = r.step;
        j["summary"] = r.summary;
        arr.push_back(std::move(j));
    }
    return arr;
}

ExecutionResult execute(const Script& script, const Scene& scene, const ExecOptions& opts) {
    Exec ex(scene, opts);
    return ex.run(script);
}

Truth eval_predicate(const Scene& scene, const Env& env, const Predicate& pred,
                     const std::string& element_var, const SceneObject& object,
                     const ExecOptions& opts) {
    Exec ex(scene, opts);
    ex.env() = env;
    return ex.predicate(pred, ElementCtx{&element_var, &object});
}

std::vector<Action> diff_scenes(const Scene& before, const Scene& after) {
    std::vector<std::string> b_ids, a_ids;
    for (const SceneObject& obj : before.objects) b_ids.push_back(obj.id);
    for (const SceneObject& obj : after.objects) a_ids.push_back(obj.id);
    std::sort(b_ids.begin(), b_ids.end());
    std::sort(a_ids.begin(), a_ids.end());
    if (b_ids != a_ids) {
        std::string msg = "object id sets differ:";
        for (const std::string& id : b_ids)
            if (!std::binary_search(a_ids.begin(), a_ids.end(), id)) msg += " -" + id;
        for (const std::string& id : a_ids)
            if (!std::binary_search(b_ids.begin(), b_ids.end(), id)) msg += " +" + id;
        throw IdSetMismatch(msg);
    }

    auto orientation_of = [](const SceneObject& obj) -> std::optional<double> {
        if (const AttrValue* v = attr(obj, "orientation"))
            if (const Orientation* o = std::get_if<Orientation>(v)) return o->degrees;
        return std::nullopt;
    };

    std::vector<Action> out;
    for (const SceneObject& obj : before.objects) {
        const SceneObject* now = find_object(after, obj.id);
        std::optional<GridPos> p0 = position_of(obj);
        std::optional<GridPos> p1 = position_of(*now);
        if (p0 && p1 && !(*p0 == *p1)) {
            Action a;
            a.kind = ActionKind::move;
            a.object_id = obj.id;
            a.to = *p1;
            out.push_back(a);
        }
        std::optional<double> d0 = orientation_of(obj);
        std::optional<double> d1 = orientation_of(*now);
        if (d1 && (!d0 || *d0 != *d1)) {
            Action a;
            a.kind = ActionKind::rotate;
            a.object_id = obj.id;
            a.degrees = *d1;
            out.push_back(a);
        }
    }
    return out;
}

}  // namespace cdsl
