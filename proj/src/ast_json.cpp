#include "cdsl/ast_json.hpp"

namespace cdsl {

namespace {

Json span_json(const SourceSpan& s) {
    return Json{{"line", s.line}, {"col", s.col}, {"endLine", s.end_line}, {"endCol", s.end_col}};
}

struct Dumper {
    bool spans;

    Json node(const char* kind, const SourceSpan& s) const {
        Json j;
        j["kind"] = kind;
        if (spans) j["span"] = span_json(s);
        return j;
    }

    Json script(const Script& sc) const {
        Json j = node("Script", sc.span);
        Json stmts = Json::array();
        for (const Statement& st : sc.statements) stmts.push_back(statement(st));
        j["statements"] = std::move(stmts);
        return j;
    }

    Json statement(const Statement& st) const {
        return std::visit([&](const auto& n) { return stmt(n); }, st.node);
    }

    Json stmt(const Assignment& a) const {
        Json j = node("Assignment", a.span);
        j["targets"] = a.targets;
        j["bracketed"] = a.bracketed;
        j["value"] = expr(a.value.front());
        return j;
    }

    Json stmt(const ForLoop& f) const {
        Json j = node("ForLoop", f.span);
        j["var"] = f.var;
        j["iterable"] = f.iterable;
        Json body = Json::array();
        for (const Statement& st : f.body) body.push_back(statement(st));
        j["body"] = std::move(body);
        return j;
    }

    Json stmt(const IfStmt& s) const {
        Json j = node("IfStmt", s.span);
        Json branches = Json::array();
        for (const IfBranch& b : s.branches) {
            Json bj;
            bj["condition"] = pred(b.condition);
            Json body = Json::array();
            for (const Statement& st : b.body) body.push_back(statement(st));
            bj["body"] = std::move(body);
            branches.push_back(std::move(bj));
        }
        j["branches"] = std::move(branches);
        if (!s.else_body.empty()) {
            Json body = Json::array();
            for (const Statement& st : s.else_body) body.push_back(statement(st));
            j["elseBody"] = std::move(body);
        }
        return j;
    }

    Json stmt(const OperateStmt& op) const {
        Json j = node("OperateStmt", op.span);
        j["op"] = op.op == OperateKind::move    ? "move"
                  : op.op == OperateKind::rotate ? "rotate"
                                                 : "click";
        j["subject"] = op.subject;
        if (op.cell) {
            Json dest;
            dest["kind"] = "cell";
            dest["row"] = coord(op.cell->row);
            dest["col"] = coord(op.cell->col);
            j["destination"] = std::move(dest);
        } else if (op.align) {
            Json dest;
            dest["kind"] = "align";
            dest["set"] = op.align->set;
            dest["axis"] = op.align->axis;
            j["destination"] = std::move(dest);
        }
        if (!op.rotate_target.empty()) j["target"] = expr(op.rotate_target.front());
        return j;
    }

    Json stmt(const Comment& c) const {
        Json j = node("Comment", c.span);
        j["text"] = c.text;
        return j;
    }

    Json coord(const CellCoord& c) const {
        if (c.is_number) return Json(c.number);
        return Json(c.name);
    }

    Json expr(const Expr& e) const {
        return std::visit([&](const auto& n) { return expr_node(n); }, e.node);
    }

    Json expr_node(const SearchExpr& s) const {
        Json j = node("SearchExpr", s.span);
        j["elementVar"] = s.element_var;
        j["source"] = s.source_is_captcha ? Json{{"kind", "captcha"}}
                                          : Json{{"kind", "binding"}, {"name", s.source}};
        if (!s.where.empty()) j["where"] = pred(s.where.front());
        return j;
    }

    Json expr_node(const ReasonExpr& r) const {
        Json j = node("ReasonExpr", r.span);
        Json d;
        d["raw"] = r.description.raw;
        d["form"] = description_form_name(r.description.form);
        d["embeddedRefs"] = r.description.embedded_refs;
        j["description"] = std::move(d);
        return j;
    }

    Json expr_node(const LocateExpr& l) const {
        Json j = node("LocateExpr", l.span);
        j["target"] = l.target;
        return j;
    }

    Json expr_node(const AttributeAccess& a) const {
        Json j = node("AttributeAccess", a.span);
        j["object"] = a.object;
        j["attribute"] = a.attribute;
        return j;
    }

    Json expr_node(const Comprehension& c) const {
        Json j = node("Comprehension", c.span);
        j["projection"] = expr_node(c.projection);
        j["elementVar"] = c.element_var;
        j["source"] = c.source;
        return j;
    }

    Json expr_node(const CallExpr& c) const {
        Json j = node("CallExpr", c.span);
        j["function"] = c.function == BuiltinFn::mode ? "MODE" : "COUNT";
        Json args = Json::array();
        for (const Expr& a : c.args) args.push_back(expr(a));
        j["args"] = std::move(args);
        return j;
    }

    Json expr_node(const Literal& l) const {
        Json j = node("Literal", l.span);
        if (l.is_string) {
            j["valueType"] = "string";
            j["value"] = l.string_value;
        } else {
            j["valueType"] = "number";
            j["value"] = l.number_value;
        }
        return j;
    }

    Json expr_node(const VarRef& v) const {
        Json j = node("VarRef", v.span);
        j["name"] = v.name;
        return j;
    }

    Json pred(const Predicate& p) const {
        switch (p.kind) {
            case Predicate::Kind::comparison: {
                const Comparison& c = p.comparison.front();
                Json j = node("Comparison", p.span);
                j["lhs"] = std::holds_alternative<AttributeAccess>(c.lhs)
                               ? expr_node(std::get<AttributeAccess>(c.lhs))
                               : expr_node(std::get<VarRef>(c.lhs));
                j["cmp"] = comparator_text(c.cmp);
                j["operand"] = expr(c.operand.front());
                return j;
            }
            case Predicate::Kind::atom:
                return expr(p.atom.front());
            case Predicate::Kind::and_:
            case Predicate::Kind::or_:
            case Predicate::Kind::not_: {
                Json j = node(p.kind == Predicate::Kind::and_  ? "And"
                              : p.kind == Predicate::Kind::or_ ? "Or"
                                                               : "Not",
                              p.span);
                Json children = Json::array();
                for (const Predicate& c : p.children) children.push_back(pred(c));
                j["children"] = std::move(children);
                return j;
            }
        }
        return Json();
    }
};

}  // namespace

Json ast_to_json(const Script& script, bool include_spans) {
    return Dumper{include_spans}.script(script);
}
Json ast_to_json(const Statement& stmt, bool include_spans) {
    return Dumper{include_spans}.statement(stmt);
}
Json ast_to_json(const Expr& expr, bool include_spans) {
    return Dumper{include_spans}.expr(expr);
}
Json ast_to_json(const Predicate& pred, bool include_spans) {
    return Dumper{include_spans}.pred(pred);
}

bool ast_equal(const Script& a, const Script& b) {
    return ast_to_json(a, false) == ast_to_json(b, false);
}

}  // namespace cdsl
