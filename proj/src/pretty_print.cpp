#include "cdsl/pretty_print.hpp"

#include <sstream>

namespace cdsl {

namespace {

std::string encode_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

class Printer {
public:
    std::string script(const Script& s) {
        for (const Statement& st : s.statements) statement(st, 0);
        return std::move(out_).str();
    }

    std::string expr_text(const Expr& e) {
        expr(e);
        return std::move(out_).str();
    }

    std::string pred_text(const Predicate& p) {
        pred(p);
        return std::move(out_).str();
    }

private:
    std::ostringstream out_;

    void indent(int depth) {
        for (int i = 0; i < depth; ++i) out_ << "    ";
    }

    void statement(const Statement& st, int depth) {
        std::visit([&](const auto& node) { stmt(node, depth); }, st.node);
    }

    void stmt(const Assignment& a, int depth) {
        indent(depth);
        if (a.bracketed || a.targets.size() > 1) {
            out_ << '[';
            for (std::size_t i = 0; i < a.targets.size(); ++i)
                out_ << (i ? ", " : "") << a.targets[i];
            out_ << ']';
        } else {
            out_ << a.targets.front();
        }
        out_ << " = ";
        expr(a.value.front());
        out_ << '\n';
    }

    void stmt(const ForLoop& f, int depth) {
        indent(depth);
        out_ << "FOR " << f.var << " IN " << f.iterable << ":\n";
        for (const Statement& st : f.body) statement(st, depth + 1);
    }

    void stmt(const IfStmt& s, int depth) {
        for (std::size_t i = 0; i < s.branches.size(); ++i) {
            indent(depth);
            out_ << (i == 0 ? "IF " : "ELIF ");
            pred(s.branches[i].condition);
            out_ << ":\n";
            for (const Statement& st : s.branches[i].body) statement(st, depth + 1);
        }
        if (!s.else_body.empty()) {
            indent(depth);
            out_ << "ELSE:\n";
            for (const Statement& st : s.else_body) statement(st, depth + 1);
        }
    }

    void stmt(const OperateStmt& op, int depth) {
        indent(depth);
        switch (op.op) {
            case OperateKind::move:
                out_ << "MOVE " << op.subject << " TO ";
                if (op.align) {
                    out_ << "ALIGN WITH " << op.align->set << " ON " << op.align->axis;
                } else {
                    out_ << '(';
                    coord(op.cell->row);
                    out_ << ", ";
                    coord(op.cell->col);
                    out_ << ')';
                }
                break;
            case OperateKind::rotate:
                out_ << "ROTATE " << op.subject << " TO ";
                expr(op.rotate_target.front());
                break;
            case OperateKind::click:
                out_ << "CLICK " << op.subject;
                break;
        }
        out_ << '\n';
    }

    void stmt(const Comment& c, int depth) {
        indent(depth);
        out_ << c.text << '\n';
    }

    void coord(const CellCoord& c) {
        if (c.is_number)
            out_ << c.number;
        else
            out_ << c.name;
    }

    void expr(const Expr& e) {
        std::visit([&](const auto& node) { expr_node(node); }, e.node);
    }

    void expr_node(const SearchExpr& s) {
        out_ << "SEARCH " << s.element_var << " IN "
             << (s.source_is_captcha ? std::string("CAPTCHA") : s.source);
        if (!s.where.empty()) {
            out_ << " WHERE ";
            pred(s.where.front());
        }
    }

    void expr_node(const ReasonExpr& r) { out_ << "REASON{" << r.description.raw << '}'; }

    void expr_node(const LocateExpr& l) { out_ << "LOCATE " << l.target; }

    void expr_node(const AttributeAccess& a) { out_ << a.object << '.' << a.attribute; }

    // The paper's listings spell comprehension keywords in lowercase; the
    // canonical form keeps that, unlike statement-level keywords.
    void expr_node(const Comprehension& c) {
        out_ << '[' << c.projection.object << '.' << c.projection.attribute << " for "
             << c.element_var << " in " << c.source << ']';
    }

    void expr_node(const CallExpr& c) {
        out_ << (c.function == BuiltinFn::mode ? "MODE(" : "COUNT(");
        for (std::size_t i = 0; i < c.args.size(); ++i) {
            if (i) out_ << ", ";
            expr(c.args[i]);
        }
        out_ << ')';
    }

    void expr_node(const Literal& l) {
        if (l.is_string)
            out_ << encode_string(l.string_value);
        else
            out_ << l.number_value;
    }

    void expr_node(const VarRef& v) { out_ << v.name; }

    // Minimal parentheses: OR children under AND are wrapped; NOT wraps any
    // compound child.
    void pred(const Predicate& p) {
        switch (p.kind) {
            case Predicate::Kind::comparison: {
                const Comparison& c = p.comparison.front();
                if (std::holds_alternative<AttributeAccess>(c.lhs)) {
                    const auto& a = std::get<AttributeAccess>(c.lhs);
                    out_ << a.object << '.' << a.attribute;
                } else {
                    out_ << std::get<VarRef>(c.lhs).name;
                }
                out_ << ' ' << comparator_text(c.cmp) << ' ';
                expr(c.operand.front());
                break;
            }
            case Predicate::Kind::atom:
                expr(p.atom.front());
                break;
            case Predicate::Kind::and_: {
                pred_child(p.children[0], /*needs_parens=*/p.children[0].kind == Predicate::Kind::or_);
                out_ << " AND ";
                pred_child(p.children[1], p.children[1].kind == Predicate::Kind::or_);
                break;
            }
            case Predicate::Kind::or_: {
                pred_child(p.children[0], false);
                out_ << " OR ";
                pred_child(p.children[1], false);
                break;
            }
            case Predicate::Kind::not_: {
                out_ << "NOT ";
                bool compound = p.children[0].kind == Predicate::Kind::and_ ||
                                p.children[0].kind == Predicate::Kind::or_;
                pred_child(p.children[0], compound);
                break;
            }
        }
    }

    void pred_child(const Predicate& p, bool needs_parens) {
        if (needs_parens) out_ << '(';
        pred(p);
        if (needs_parens) out_ << ')';
    }
};

}  // namespace

std::string pretty_print(const Script& script) { return Printer().script(script); }
std::string pretty_print(const Expr& expr) { return Printer().expr_text(expr); }
std::string pretty_print(const Predicate& pred) { return Printer().pred_text(pred); }

}  // namespace cdsl
