#include "cdsl/parser.hpp"

#include <cctype>
#include <utility>

namespace cdsl {

namespace {

bool kw_is(const Token& t, std::string_view name) {
    return t.kind == TokenKind::keyword && to_upper(t.text) == name;
}

bool punct_is(const Token& t, std::string_view text) {
    return t.kind == TokenKind::punctuation && t.text == text;
}

bool op_is(const Token& t, std::string_view text) {
    return t.kind == TokenKind::op && t.text == text;
}

std::optional<Comparator> comparator_of(const Token& t) {
    if (t.kind != TokenKind::op) return std::nullopt;
    if (t.text == "==") return Comparator::eq;
    if (t.text == "!=") return Comparator::ne;
    if (t.text == "<") return Comparator::lt;
    if (t.text == ">") return Comparator::gt;
    if (t.text == "<=") return Comparator::le;
    if (t.text == ">=") return Comparator::ge;
    return std::nullopt;
}

std::string decode_string(std::string_view text) {
    // text includes the surrounding quotes; the only escapes are \" and \\.
    std::string out;
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
        if (text[i] == '\\' && i + 2 < text.size() + 1 &&
            (text[i + 1] == '"' || text[i + 1] == '\\')) {
            out.push_back(text[i + 1]);
            ++i;
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

// Thrown internally after a diagnostic is recorded; parsing resumes at the
// next statement boundary.
struct Fail {};

// Collects, in walk order, the object names of attribute-access leaves and
// the outward references (plain names or dotted accesses) of a predicate.
void collect_pred_names(const Predicate& p, std::vector<std::string>& attr_objs,
                        std::vector<std::string>& refs) {
    switch (p.kind) {
        case Predicate::Kind::comparison: {
            const Comparison& c = p.comparison.front();
            if (std::holds_alternative<AttributeAccess>(c.lhs))
                attr_objs.push_back(std::get<AttributeAccess>(c.lhs).object);
            else
                refs.push_back(std::get<VarRef>(c.lhs).name);
            const Expr& operand = c.operand.front();
            if (std::holds_alternative<VarRef>(operand.node))
                refs.push_back(std::get<VarRef>(operand.node).name);
            else if (std::holds_alternative<AttributeAccess>(operand.node)) {
                const auto& a = std::get<AttributeAccess>(operand.node);
                refs.push_back(a.object + "." + a.attribute);
            }
            break;
        }
        case Predicate::Kind::atom:
            break;
        default:
            for (const Predicate& child : p.children) collect_pred_names(child, attr_objs, refs);
    }
}

class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

    ParseResult run() {
        Script script;
        bool any = false;
        while (!at_end()) {
            skip_newlines();
            if (at_end()) break;
            if (peek().kind == TokenKind::dedent) {  // defensive; lexer keeps these balanced
                error("statement", "dedent");
                advance();
                continue;
            }
            try {
                parse_statement_into(script.statements);
            } catch (const Fail&) {
                synchronize();
            }
            if (!any && !script.statements.empty()) {
                script.span = span_of(script.statements.front());
                any = true;
            }
            if (any && !script.statements.empty())
                script.span = join(script.span, span_of(script.statements.back()));
        }
        ParseResult result;
        result.diagnostics = std::move(diags_);
        if (result.diagnostics.empty()) result.script = std::move(script);
        return result;
    }

    // Entry points reused by the description analyzer.
    std::optional<Predicate> try_predicate() {
        try {
            Predicate p = parse_predicate(/*allow_atoms=*/false);
            return p;
        } catch (const Fail&) {
            return std::nullopt;
        }
    }

    bool at_end() const { return i_ >= toks_.size(); }
    std::size_t cursor() const { return i_; }
    const Token& peek(std::size_t ahead = 0) const {
        // A keyword with empty text matches no parser branch (keywords are
        // matched by spelling), so past-the-end lookups satisfy nothing.
        static const Token eof{TokenKind::keyword, {}, {}};
        return i_ + ahead < toks_.size() ? toks_[i_ + ahead] : eof;
    }

private:
    const std::vector<Token>& toks_;
    std::size_t i_ = 0;
    std::vector<ParseDiagnostic> diags_;

    const Token& advance() { return toks_[i_++]; }

    std::string describe(const Token& t) const {
        if (i_ >= toks_.size() || t.kind == TokenKind::newline) return "end of line";
        if (t.kind == TokenKind::indent) return "indent";
        if (t.kind == TokenKind::dedent) return "dedent";
        return std::string("'") + t.text + "'";
    }

    [[noreturn]] void error(const std::string& expected, const std::string& found_override = "") {
        ParseDiagnostic d;
        d.span = at_end() ? (toks_.empty() ? SourceSpan{} : toks_.back().span) : peek().span;
        d.expected = expected;
        d.found = found_override.empty() ? describe(peek()) : found_override;
        d.message = "expected " + d.expected + ", found " + d.found;
        diags_.push_back(std::move(d));
        throw Fail{};
    }

    void skip_newlines() {
        while (!at_end() && peek().kind == TokenKind::newline) advance();
    }

    // After an error: drop tokens to the end of the line, then any indented
    // block that would have belonged to the broken statement.
    void synchronize() {
        while (!at_end() && peek().kind != TokenKind::newline) advance();
        if (!at_end()) advance();  // the newline
        skip_newlines();
        if (!at_end() && peek().kind == TokenKind::indent) {
            int depth = 0;
            do {
                if (peek().kind == TokenKind::indent) ++depth;
                if (peek().kind == TokenKind::dedent) --depth;
                advance();
            } while (!at_end() && depth > 0);
        }
    }

    const Token& expect_kw(std::string_view name) {
        if (!kw_is(peek(), name)) error(std::string(name));
        return advance();
    }

    const Token& expect_punct(std::string_view text) {
        if (!punct_is(peek(), text)) error(std::string("'") + std::string(text) + "'");
        return advance();
    }

    std::string expect_ident(const char* what = "identifier") {
        if (peek().kind != TokenKind::identifier) error(what);
        return advance().text;
    }

    // ---- statements ----

    void parse_statement_into(std::vector<Statement>& out) {
        const Token& t = peek();
        if (t.kind == TokenKind::comment) {
            Comment c{advance().text, t.span};
            require_line_end();
            out.push_back(Statement{std::move(c)});
            return;
        }
        if (kw_is(t, "FOR")) {
            out.push_back(Statement{parse_for()});
            return;
        }
        if (kw_is(t, "IF")) {
            out.push_back(Statement{parse_if()});
            return;
        }
        if (kw_is(t, "ELIF") || kw_is(t, "ELSE"))
            error("statement", "'" + t.text + "' without a matching IF");
        if (kw_is(t, "MOVE") || kw_is(t, "ROTATE") || kw_is(t, "CLICK")) {
            OperateStmt op = parse_operate();
            finish_simple_statement(op.span, out, Statement{std::move(op)});
            return;
        }
        if (punct_is(t, "[") || t.kind == TokenKind::identifier) {
            Assignment a = parse_assignment();
            finish_simple_statement(a.span, out, Statement{std::move(a)});
            return;
        }
        error("statement");
    }

    // Consumes the optional ';', an optional trailing comment, and the line
    // terminator. The trailing comment becomes its own statement.
    void finish_simple_statement(SourceSpan& span, std::vector<Statement>& out, Statement stmt) {
        if (punct_is(peek(), ";")) span = join(span, advance().span);
        std::optional<Comment> trailing;
        if (peek().kind == TokenKind::comment) {
            trailing = Comment{peek().text, peek().span};
            advance();
        }
        require_line_end();
        out.push_back(std::move(stmt));
        if (trailing) out.push_back(Statement{std::move(*trailing)});
    }

    void require_line_end() {
        if (at_end() || peek().kind == TokenKind::dedent) return;
        if (peek().kind == TokenKind::newline) {
            advance();
            return;
        }
        error("end of line");
    }

    Assignment parse_assignment() {
        Assignment a;
        a.span = peek().span;
        if (punct_is(peek(), "[")) {
            a.bracketed = true;
            advance();
            a.targets.push_back(expect_ident("assignment target"));
            while (punct_is(peek(), ",")) {
                advance();
                a.targets.push_back(expect_ident("assignment target"));
            }
            expect_punct("]");
        } else {
            a.targets.push_back(expect_ident("assignment target"));
        }
        if (!op_is(peek(), "=")) error("'='");
        advance();
        Expr value = parse_expr();
        a.span = join(a.span, span_of(value));
        a.value.push_back(std::move(value));
        return a;
    }

    ForLoop parse_for() {
        ForLoop f;
        f.span = expect_kw("FOR").span;
        f.var = expect_ident("loop variable");
        expect_kw("IN");
        f.iterable = expect_ident("iterable binding");
        expect_punct(":");
        f.body = parse_block();
        if (!f.body.empty()) f.span = join(f.span, span_of(f.body.back()));
        return f;
    }

    IfStmt parse_if() {
        IfStmt s;
        s.span = peek().span;
        bool first = true;
        while (true) {
            IfBranch b;
            b.span = first ? expect_kw("IF").span : expect_kw("ELIF").span;
            first = false;
            b.condition = parse_predicate(/*allow_atoms=*/true);
            expect_punct(":");
            b.body = parse_block();
            if (!b.body.empty()) b.span = join(b.span, span_of(b.body.back()));
            s.span = join(s.span, b.span);
            s.branches.push_back(std::move(b));
            if (!kw_is(peek(), "ELIF")) break;
        }
        if (kw_is(peek(), "ELSE")) {
            advance();
            expect_punct(":");
            s.else_body = parse_block();
            if (!s.else_body.empty()) s.span = join(s.span, span_of(s.else_body.back()));
        }
        return s;
    }

    std::vector<Statement> parse_block() {
        if (at_end()) error("an indented block");
        if (peek().kind == TokenKind::comment)
            error("a newline (comments inside a block go on their own lines)");
        if (peek().kind != TokenKind::newline) error("end of line after ':'");
        advance();
        skip_newlines();
        if (peek().kind != TokenKind::indent) error("an indented block");
        advance();
        std::vector<Statement> body;
        while (true) {
            skip_newlines();
            if (at_end()) error("dedent to close the block");
            if (peek().kind == TokenKind::dedent) {
                advance();
                break;
            }
            parse_statement_into(body);
        }
        if (body.empty()) error("at least one statement in the block");
        return body;
    }

    OperateStmt parse_operate() {
        OperateStmt op;
        const Token& verb = advance();
        op.span = verb.span;
        if (kw_is(verb, "MOVE")) {
            op.op = OperateKind::move;
            op.subject = expect_ident("object binding to move");
            expect_kw("TO");
            if (kw_is(peek(), "ALIGN")) {
                AlignDest align;
                align.span = advance().span;
                expect_kw("WITH");
                align.set = expect_ident("object-set binding");
                expect_kw("ON");
                if (peek().kind != TokenKind::identifier) error("axis (x, y or common_axis)");
                const Token& axis = advance();
                align.axis = axis.text;
                align.span = join(align.span, axis.span);
                op.span = join(op.span, align.span);
                op.align = std::move(align);
            } else {
                GridCellDest cell;
                cell.span = expect_punct("(").span;
                cell.row = parse_cell_coord();
                expect_punct(",");
                cell.col = parse_cell_coord();
                cell.span = join(cell.span, expect_punct(")").span);
                op.span = join(op.span, cell.span);
                op.cell = std::move(cell);
            }
        } else if (kw_is(verb, "ROTATE")) {
            op.op = OperateKind::rotate;
            op.subject = expect_ident("object binding to rotate");
            expect_kw("TO");
            Expr target = parse_rotate_target();
            op.span = join(op.span, span_of(target));
            op.rotate_target.push_back(std::move(target));
        } else {
            op.op = OperateKind::click;
            SourceSpan subj = peek().span;
            op.subject = expect_ident("object binding to click");
            op.span = join(op.span, subj);
        }
        return op;
    }

    CellCoord parse_cell_coord() {
        CellCoord c;
        if (peek().kind == TokenKind::number_literal) {
            c.is_number = true;
            c.span = peek().span;
            c.number = std::stoll(advance().text);
        } else if (peek().kind == TokenKind::identifier) {
            c.is_number = false;
            c.span = peek().span;
            c.name = advance().text;
        } else {
            error("cell coordinate (number or binding)");
        }
        return c;
    }

    Expr parse_rotate_target() {
        if (peek().kind == TokenKind::number_literal) {
            Literal lit;
            lit.is_string = false;
            lit.span = peek().span;
            lit.number_value = std::stoll(advance().text);
            return Expr{std::move(lit)};
        }
        if (peek().kind == TokenKind::identifier) return parse_name_expr();
        error("rotation target (degrees or orientation binding)");
    }

    // ---- expressions ----

    Expr parse_expr() {
        const Token& t = peek();
        if (kw_is(t, "SEARCH")) return Expr{parse_search()};
        if (kw_is(t, "REASON")) return Expr{parse_reason()};
        if (kw_is(t, "LOCATE")) {
            LocateExpr loc;
            loc.span = advance().span;
            SourceSpan tgt = peek().span;
            loc.target = expect_ident("binding to locate");
            loc.span = join(loc.span, tgt);
            return Expr{std::move(loc)};
        }
        if (kw_is(t, "MODE") || kw_is(t, "COUNT")) return Expr{parse_call()};
        if (punct_is(t, "[")) return Expr{parse_comprehension()};
        if (t.kind == TokenKind::string_literal) {
            Literal lit;
            lit.is_string = true;
            lit.span = t.span;
            lit.string_value = decode_string(advance().text);
            return Expr{std::move(lit)};
        }
        if (t.kind == TokenKind::number_literal) {
            Literal lit;
            lit.is_string = false;
            lit.span = t.span;
            lit.number_value = std::stoll(advance().text);
            return Expr{std::move(lit)};
        }
        if (t.kind == TokenKind::identifier) return parse_name_expr();
        error("expression");
    }

    Expr parse_name_expr() {
        const Token& name = advance();
        if (punct_is(peek(), ".")) {
            advance();
            AttributeAccess a;
            a.object = name.text;
            a.span = name.span;
            SourceSpan attr_span = peek().span;
            a.attribute = expect_ident("attribute name");
            a.span = join(a.span, attr_span);
            return Expr{std::move(a)};
        }
        return Expr{VarRef{name.text, name.span}};
    }

    SearchExpr parse_search() {
        SearchExpr s;
        s.span = expect_kw("SEARCH").span;
        s.element_var = expect_ident("element variable");
        expect_kw("IN");
        if (kw_is(peek(), "CAPTCHA")) {
            s.source_is_captcha = true;
            s.span = join(s.span, advance().span);
        } else {
            SourceSpan src = peek().span;
            s.source = expect_ident("CAPTCHA or an object-set binding");
            s.span = join(s.span, src);
        }
        if (kw_is(peek(), "WHERE")) {
            advance();
            Predicate p = parse_predicate(/*allow_atoms=*/false);
            s.span = join(s.span, p.span);
            s.where.push_back(std::move(p));
        }
        return s;
    }

    ReasonExpr parse_reason() {
        ReasonExpr r;
        r.span = expect_kw("REASON").span;
        expect_punct("{");
        std::string raw;
        SourceSpan raw_span = peek().span;
        if (peek().kind == TokenKind::description) raw = advance().text;
        r.span = join(r.span, expect_punct("}").span);
        r.description = analyze_description(raw, raw_span);
        return r;
    }

    CallExpr parse_call() {
        CallExpr c;
        const Token& fn = advance();
        c.function = to_upper(fn.text) == "MODE" ? BuiltinFn::mode : BuiltinFn::count;
        c.span = fn.span;
        expect_punct("(");
        c.args.push_back(parse_expr());
        while (punct_is(peek(), ",")) {
            advance();
            c.args.push_back(parse_expr());
        }
        c.span = join(c.span, expect_punct(")").span);
        return c;
    }

    Comprehension parse_comprehension() {
        Comprehension c;
        c.span = expect_punct("[").span;
        const Token& obj = peek();
        std::string object = expect_ident("projection (element.attribute)");
        expect_punct(".");
        c.projection.object = object;
        c.projection.span = obj.span;
        SourceSpan attr_span = peek().span;
        c.projection.attribute = expect_ident("attribute name");
        c.projection.span = join(c.projection.span, attr_span);
        expect_kw("FOR");
        c.element_var = expect_ident("element variable");
        if (c.element_var != c.projection.object)
            error("projection over the comprehension's own element variable",
                  "'" + c.projection.object + "." + c.projection.attribute + " for " +
                      c.element_var + "'");
        expect_kw("IN");
        c.source = expect_ident("source binding");
        c.span = join(c.span, expect_punct("]").span);
        return c;
    }

    // ---- predicates / conditions ----

    Predicate parse_predicate(bool allow_atoms) {
        Predicate left = parse_and(allow_atoms);
        while (kw_is(peek(), "OR")) {
            advance();
            Predicate right = parse_and(allow_atoms);
            Predicate node;
            node.kind = Predicate::Kind::or_;
            node.span = join(left.span, right.span);
            node.children.push_back(std::move(left));
            node.children.push_back(std::move(right));
            left = std::move(node);
        }
        return left;
    }

    Predicate parse_and(bool allow_atoms) {
        Predicate left = parse_unary(allow_atoms);
        while (kw_is(peek(), "AND")) {
            advance();
            Predicate right = parse_unary(allow_atoms);
            Predicate node;
            node.kind = Predicate::Kind::and_;
            node.span = join(left.span, right.span);
            node.children.push_back(std::move(left));
            node.children.push_back(std::move(right));
            left = std::move(node);
        }
        return left;
    }

    Predicate parse_unary(bool allow_atoms) {
        if (kw_is(peek(), "NOT")) {
            SourceSpan start = advance().span;
            Predicate inner = parse_unary(allow_atoms);
            Predicate node;
            node.kind = Predicate::Kind::not_;
            node.span = join(start, inner.span);
            node.children.push_back(std::move(inner));
            return node;
        }
        if (punct_is(peek(), "(")) {
            advance();
            Predicate inner = parse_predicate(allow_atoms);
            expect_punct(")");
            return inner;
        }
        return parse_leaf(allow_atoms);
    }

    Predicate parse_leaf(bool allow_atoms) {
        if (allow_atoms && kw_is(peek(), "REASON")) {
            ReasonExpr r = parse_reason();
            Predicate node;
            node.kind = Predicate::Kind::atom;
            node.span = r.span;
            node.atom.push_back(Expr{std::move(r)});
            return node;
        }
        if (peek().kind != TokenKind::identifier)
            error(allow_atoms ? "condition" : "comparison");
        const Token& name = advance();
        std::variant<AttributeAccess, VarRef> lhs;
        SourceSpan span = name.span;
        if (punct_is(peek(), ".")) {
            advance();
            AttributeAccess a;
            a.object = name.text;
            a.span = name.span;
            SourceSpan attr_span = peek().span;
            a.attribute = expect_ident("attribute name");
            a.span = join(a.span, attr_span);
            span = a.span;
            lhs = std::move(a);
        } else {
            lhs = VarRef{name.text, name.span};
        }
        std::optional<Comparator> cmp = comparator_of(peek());
        if (!cmp) {
            if (allow_atoms && std::holds_alternative<VarRef>(lhs)) {
                Predicate node;
                node.kind = Predicate::Kind::atom;
                node.span = span;
                node.atom.push_back(Expr{std::get<VarRef>(lhs)});
                return node;
            }
            error("comparator (==, !=, <, >, <=, >=)");
        }
        advance();
        Expr operand = parse_operand();
        Comparison c;
        c.lhs = std::move(lhs);
        c.cmp = *cmp;
        c.span = join(span, span_of(operand));
        c.operand.push_back(std::move(operand));
        Predicate node;
        node.kind = Predicate::Kind::comparison;
        node.span = c.span;
        node.comparison.push_back(std::move(c));
        return node;
    }

    Expr parse_operand() {
        const Token& t = peek();
        if (t.kind == TokenKind::string_literal || t.kind == TokenKind::number_literal)
            return parse_expr();
        if (t.kind == TokenKind::identifier) return parse_name_expr();
        if (kw_is(t, "REASON")) return Expr{parse_reason()};
        error("comparison operand");
    }

    // ---- description analysis ----

    Description analyze_description(const std::string& raw, SourceSpan span);
};

// Scans free text for identifier-shaped words and dotted accesses. Keywords
// and numbers are skipped; the verifier intersects the result with actual
// bindings, so prose words are harmless here.
std::vector<std::string> scan_free_refs(const std::string& raw) {
    std::vector<std::string> refs;
    std::size_t i = 0;
    auto word_at = [&](std::size_t& p) {
        std::size_t start = p;
        while (p < raw.size() &&
               (std::isalnum(static_cast<unsigned char>(raw[p])) || raw[p] == '_'))
            ++p;
        return raw.substr(start, p - start);
    };
    while (i < raw.size()) {
        char c = raw[i];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string word = word_at(i);
            if (i < raw.size() && raw[i] == '.' && i + 1 < raw.size() &&
                (std::isalpha(static_cast<unsigned char>(raw[i + 1])) || raw[i + 1] == '_')) {
                ++i;
                std::string attr = word_at(i);
                refs.push_back(word + "." + attr);
            } else if (!is_keyword(word)) {
                refs.push_back(word);
            }
        } else {
            ++i;
        }
    }
    return refs;
}

Description Parser::analyze_description(const std::string& raw, SourceSpan span) {
    Description d;
    d.raw = raw;
    d.form = DescriptionForm::free_text;

    std::vector<Token> raw_tokens;
    try {
        raw_tokens = tokenize(raw);
    } catch (const LexError&) {
        d.embedded_refs = scan_free_refs(raw);
        return d;
    }
    // Descriptions sit on one line, so shifting sub-token spans into file
    // coordinates is a straight offset from the description token's span.
    for (Token& t : raw_tokens) {
        t.span.line = t.span.end_line = span.line;
        t.span.col = span.col + t.span.col - 1;
        t.span.end_col = span.col + t.span.end_col - 1;
        t.span.begin += span.begin;
        t.span.end += span.begin;
    }

    // attr_read: exactly ident '.' ident
    if (raw_tokens.size() == 3 && raw_tokens[0].kind == TokenKind::identifier &&
        punct_is(raw_tokens[1], ".") && raw_tokens[2].kind == TokenKind::identifier) {
        d.form = DescriptionForm::attr_read;
        AttributeAccess a;
        a.object = raw_tokens[0].text;
        a.attribute = raw_tokens[2].text;
        a.span = join(raw_tokens[0].span, raw_tokens[2].span);
        d.attr = std::move(a);
        d.embedded_refs.push_back(d.attr->object + "." + d.attr->attribute);
        return d;
    }

    // comprehension: '[' ident '.' ident FOR ident IN ident ']'
    auto match_comprehension = [&](std::size_t at) -> std::optional<std::size_t> {
        if (at + 8 > raw_tokens.size()) return std::nullopt;
        if (!punct_is(raw_tokens[at], "[") || raw_tokens[at + 1].kind != TokenKind::identifier ||
            !punct_is(raw_tokens[at + 2], ".") ||
            raw_tokens[at + 3].kind != TokenKind::identifier || !kw_is(raw_tokens[at + 4], "FOR") ||
            raw_tokens[at + 5].kind != TokenKind::identifier || !kw_is(raw_tokens[at + 6], "IN") ||
            raw_tokens[at + 7].kind != TokenKind::identifier ||
            raw_tokens[at + 1].text != raw_tokens[at + 5].text)
            return std::nullopt;
        if (at + 8 >= raw_tokens.size() || !punct_is(raw_tokens[at + 8], "]")) return std::nullopt;
        return at + 9;
    };
    auto fill_comprehension = [&](std::size_t at) {
        d.attr = AttributeAccess{raw_tokens[at + 1].text, raw_tokens[at + 3].text,
                                 join(raw_tokens[at + 1].span, raw_tokens[at + 3].span)};
        d.element_var = raw_tokens[at + 5].text;
        d.source = raw_tokens[at + 7].text;
        d.embedded_refs.push_back(d.source);
    };

    if (auto end = match_comprehension(0); end && *end == raw_tokens.size()) {
        d.form = DescriptionForm::comprehension;
        fill_comprehension(0);
        return d;
    }

    // mode: MODE '(' comprehension ')'
    if (raw_tokens.size() >= 2 && kw_is(raw_tokens[0], "MODE") && punct_is(raw_tokens[1], "(")) {
        if (auto end = match_comprehension(2);
            end && *end + 1 == raw_tokens.size() && punct_is(raw_tokens[*end], ")")) {
            d.form = DescriptionForm::mode;
            fill_comprehension(2);
            return d;
        }
    }

    // count_compare: COUNT '(' ident WHERE predicate ')' cmp number
    if (raw_tokens.size() >= 8 && kw_is(raw_tokens[0], "COUNT") && punct_is(raw_tokens[1], "(") &&
        raw_tokens[2].kind == TokenKind::identifier && kw_is(raw_tokens[3], "WHERE")) {
        // Predicate runs to the matching ')'; after it, expect cmp number.
        int depth = 1;
        std::size_t close = 4;
        for (; close < raw_tokens.size(); ++close) {
            if (punct_is(raw_tokens[close], "(")) ++depth;
            if (punct_is(raw_tokens[close], ")") && --depth == 0) break;
        }
        if (close + 2 < raw_tokens.size() && comparator_of(raw_tokens[close + 1]) &&
            raw_tokens[close + 2].kind == TokenKind::number_literal &&
            close + 3 == raw_tokens.size()) {
            std::vector<Token> pred_tokens(raw_tokens.begin() + 4, raw_tokens.begin() + close);
            Parser sub(pred_tokens);
            if (auto pred = sub.try_predicate(); pred && sub.at_end()) {
                d.form = DescriptionForm::count_compare;
                d.source = raw_tokens[2].text;
                d.count_pred.push_back(std::move(*pred));
                d.count_cmp = *comparator_of(raw_tokens[close + 1]);
                d.count_rhs = std::stoll(raw_tokens[close + 2].text);
                // The element variable is the object of the first attribute
                // access; other names are outward references.
                std::vector<std::string> attrs_objs;
                std::vector<std::string> refs;
                collect_pred_names(d.count_pred.front(), attrs_objs, refs);
                d.element_var = attrs_objs.empty() ? std::string() : attrs_objs.front();
                d.embedded_refs.push_back(d.source);
                for (const auto& obj : attrs_objs)
                    if (obj != d.element_var) d.embedded_refs.push_back(obj);
                for (const auto& r : refs) d.embedded_refs.push_back(r);
                return d;
            }
        }
    }

    d.embedded_refs = scan_free_refs(raw);
    return d;
}

}  // namespace

SourceSpan span_of(const Expr& e) {
    return std::visit([](const auto& n) { return n.span; }, e.node);
}

SourceSpan span_of(const Statement& s) {
    return std::visit([](const auto& n) { return n.span; }, s.node);
}

const char* comparator_text(Comparator c) {
    switch (c) {
        case Comparator::eq: return "==";
        case Comparator::ne: return "!=";
        case Comparator::lt: return "<";
        case Comparator::gt: return ">";
        case Comparator::le: return "<=";
        case Comparator::ge: return ">=";
    }
    return "?";
}

const char* description_form_name(DescriptionForm f) {
    switch (f) {
        case DescriptionForm::attr_read: return "attrRead";
        case DescriptionForm::comprehension: return "comprehension";
        case DescriptionForm::mode: return "mode";
        case DescriptionForm::count_compare: return "countCompare";
        case DescriptionForm::free_text: return "freeText";
    }
    return "?";
}

ParseResult parse(const std::vector<Token>& tokens) { return Parser(tokens).run(); }

ParseResult parse_source(std::string_view source) {
    try {
        return parse(tokenize(source));
    } catch (const LexError& e) {
        ParseResult r;
        ParseDiagnostic d;
        d.span = e.span();
        d.expected = "well-formed tokens";
        d.found = e.reason();
        d.message = "lex error: " + e.reason();
        r.diagnostics.push_back(std::move(d));
        return r;
    }
}

Script parse_or_throw(std::string_view source) {
    ParseResult r = parse_source(source);
    if (!r.script)
        throw ContractViolation("script does not parse: " +
                                (r.diagnostics.empty() ? std::string("unknown error")
                                                       : r.diagnostics.front().message));
    return std::move(*r.script);
}

}  // namespace cdsl
