#include <doctest.h>

#include <functional>
#include <string>
#include <vector>

#include "cdsl/ast_json.hpp"
#include "cdsl/parser.hpp"
#include "cdsl/pretty_print.hpp"
#include "test_util.hpp"

using namespace cdsl;

namespace {

std::string pretty_diags(const ParseResult& r) {
    std::string out;
    for (const auto& d : r.diagnostics)
        out += "line " + std::to_string(d.span.line) + ": " + d.message + "\n";
    return out;
}

Script parse_ok(const std::string& src) {
    ParseResult r = parse_source(src);
    REQUIRE_MESSAGE(r.script.has_value(), pretty_diags(r));
    return std::move(*r.script);
}

// Non-comment statements of a block.
std::vector<const Statement*> stmts_of(const std::vector<Statement>& body) {
    std::vector<const Statement*> out;
    for (const auto& s : body)
        if (!is_comment(s)) out.push_back(&s);
    return out;
}

template <class T>
const T& as(const Statement& s) {
    REQUIRE(std::holds_alternative<T>(s.node));
    return std::get<T>(s.node);
}

}  // namespace

TEST_CASE("all corpus listings parse without diagnostics") {
    for (const char* name : {"same_orientation_zero.cdsl", "same_orientation_zero_faulty.cdsl",
                             "bingo_color_lines.cdsl"}) {
        CAPTURE(name);
        ParseResult r = parse_source(test::corpus(name));
        CHECK_MESSAGE(r.script.has_value(), pretty_diags(r));
    }
}

TEST_CASE("bingo listing has the expected statement shape") {
    Script s = parse_ok(test::corpus("bingo_color_lines.cdsl"));
    auto top = stmts_of(s.statements);
    REQUIRE(top.size() == 3);
    CHECK(std::holds_alternative<Assignment>(top[0]->node));
    CHECK(std::holds_alternative<Assignment>(top[1]->node));
    const ForLoop& loop = as<ForLoop>(*top[2]);
    CHECK(loop.var == "c");
    CHECK(loop.iterable == "colors");

    auto body = stmts_of(loop.body);
    REQUIRE(body.size() == 5);
    CHECK(std::holds_alternative<Assignment>(body[0]->node));
    CHECK(std::holds_alternative<Assignment>(body[1]->node));
    CHECK(std::holds_alternative<Assignment>(body[2]->node));
    const IfStmt& branch = as<IfStmt>(*body[3]);
    CHECK(branch.branches.size() == 2);
    CHECK(branch.else_body.empty());
    const OperateStmt& move = as<OperateStmt>(*body[4]);
    CHECK(move.op == OperateKind::move);
    CHECK(move.subject == "outlier");
    REQUIRE(move.align.has_value());
    CHECK(move.align->set == "candidate_objs");
    CHECK(move.align->axis == "common_axis");
}

TEST_CASE("the multi-attribute search line is syntactically fine") {
    // Rejecting it is the verifier's job, not the parser's.
    ParseResult r = parse_source(test::corpus("same_orientation_zero_faulty.cdsl"));
    REQUIRE(r.script.has_value());
    auto top = stmts_of(r.script->statements);
    CHECK(top.size() == 7);
}

TEST_CASE("truncated assignment reports expected expression") {
    ParseResult r = parse_source("x =");
    REQUIRE(!r.script.has_value());
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].expected == "expression");
    CHECK(r.diagnostics[0].found == "end of line");
}

TEST_CASE("parser recovers at statement boundaries") {
    ParseResult r = parse_source("x =\ny = SEARCH obj IN\nz = 1\n");
    REQUIRE(!r.script.has_value());
    CHECK(r.diagnostics.size() == 2);
}

TEST_CASE("lex error surfaces as a single diagnostic") {
    ParseResult r = parse_source("x = \"abc");
    REQUIRE(!r.script.has_value());
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].message.find("lex error") == 0);
}

TEST_CASE("semicolons are accepted and ignored") {
    Script a = parse_ok("x = LOCATE target;");
    Script b = parse_ok("x = LOCATE target");
    CHECK(ast_equal(a, b));
}

TEST_CASE("a trailing comment becomes its own statement") {
    Script s = parse_ok("x = LOCATE target; // done");
    REQUIRE(s.statements.size() == 2);
    CHECK(!is_comment(s.statements[0]));
    CHECK(is_comment(s.statements[1]));
}

TEST_CASE("lowercase keywords parse") {
    Script s = parse_ok("for c in colors:\n    click c\n");
    const ForLoop& f = as<ForLoop>(s.statements[0]);
    REQUIRE(f.body.size() == 1);
    CHECK(as<OperateStmt>(f.body[0]).op == OperateKind::click);
}

TEST_CASE("elif without if is a diagnostic") {
    ParseResult r = parse_source("ELIF a == 1:\n    x = 1\n");
    REQUIRE(!r.script.has_value());
    CHECK(r.diagnostics[0].found.find("without a matching IF") != std::string::npos);
}

TEST_CASE("empty block is a diagnostic") {
    ParseResult r = parse_source("IF a == 1:\n");
    CHECK(!r.script.has_value());
}

TEST_CASE("comment on the same line as a colon is rejected") {
    ParseResult r = parse_source("IF a == 1: // no\n    x = 1\n");
    REQUIRE(!r.script.has_value());
    CHECK(r.diagnostics[0].expected.find("own lines") != std::string::npos);
}

TEST_CASE("multi-target assignment keeps its targets in order") {
    Script s = parse_ok("[a, b] = LOCATE thing");
    const Assignment& asg = as<Assignment>(s.statements[0]);
    REQUIRE(asg.targets.size() == 2);
    CHECK(asg.targets[0] == "a");
    CHECK(asg.targets[1] == "b");
    CHECK(asg.bracketed);
}

TEST_CASE("search without where has an empty predicate") {
    Script s = parse_ok("[objs] = SEARCH object IN CAPTCHA");
    const Assignment& asg = as<Assignment>(s.statements[0]);
    const SearchExpr& se = std::get<SearchExpr>(asg.value.front().node);
    CHECK(se.element_var == "object");
    CHECK(se.source_is_captcha);
    CHECK(se.where.empty());
}

TEST_CASE("description forms are classified") {
    auto form_of = [](const std::string& raw) {
        Script s = parse_or_throw("x = REASON{" + raw + "}");
        const Assignment& asg = std::get<Assignment>(s.statements[0].node);
        return std::get<ReasonExpr>(asg.value.front().node).description.form;
    };
    CHECK(form_of("letter_W.orientation") == DescriptionForm::attr_read);
    CHECK(form_of("[obj.color for obj in objs]") == DescriptionForm::comprehension);
    CHECK(form_of("MODE([obj.x for obj in candidate_objs])") == DescriptionForm::mode);
    CHECK(form_of("COUNT(candidate_objs WHERE obj.x == common_x) > 1") ==
          DescriptionForm::count_compare);
    CHECK(form_of("is the sky blue in this picture") == DescriptionForm::free_text);
}

TEST_CASE("free text references are filtered to identifier-shaped words") {
    Script s = parse_or_throw("x = REASON{whether box_a.size exceeds the small one}");
    const Assignment& asg = std::get<Assignment>(s.statements[0].node);
    const Description& d = std::get<ReasonExpr>(asg.value.front().node).description;
    CHECK(d.form == DescriptionForm::free_text);
    // Dotted access is captured as a single dotted reference.
    bool found = false;
    for (const auto& r : d.embedded_refs)
        if (r == "box_a.size") found = true;
    CHECK(found);
}

TEST_CASE("count-compare descriptions expose their pieces") {
    Script s = parse_or_throw("x = REASON{COUNT(candidate_objs WHERE obj.x == common_x) > 1}");
    const Assignment& asg = std::get<Assignment>(s.statements[0].node);
    const Description& d = std::get<ReasonExpr>(asg.value.front().node).description;
    REQUIRE(d.form == DescriptionForm::count_compare);
    CHECK(d.source == "candidate_objs");
    CHECK(d.element_var == "obj");
    CHECK(d.count_cmp == Comparator::gt);
    CHECK(d.count_rhs == 1);
    REQUIRE(d.count_pred.size() == 1);
}

TEST_CASE("rotate accepts a degree literal or an attribute target") {
    Script s = parse_ok("ROTATE piece TO 90\nROTATE piece TO reference.orientation\n");
    const OperateStmt& a = as<OperateStmt>(s.statements[0]);
    REQUIRE(a.rotate_target.size() == 1);
    CHECK(std::holds_alternative<Literal>(a.rotate_target.front().node));
    const OperateStmt& b = as<OperateStmt>(s.statements[1]);
    CHECK(std::holds_alternative<AttributeAccess>(b.rotate_target.front().node));
}

TEST_CASE("move to an absolute cell parses row and column") {
    Script s = parse_ok("MOVE piece TO (2, 3)");
    const OperateStmt& op = as<OperateStmt>(s.statements[0]);
    REQUIRE(op.cell.has_value());
    CHECK(op.cell->row.is_number);
    CHECK(op.cell->row.number == 2);
    CHECK(op.cell->col.number == 3);
}

TEST_CASE("round trip preserves structure for every corpus listing") {
    for (const char* name : {"same_orientation_zero.cdsl", "same_orientation_zero_faulty.cdsl",
                             "bingo_color_lines.cdsl"}) {
        CAPTURE(name);
        Script first = parse_ok(test::corpus(name));
        Script second = parse_ok(pretty_print(first));
        CHECK(ast_equal(first, second));
    }
}

TEST_CASE("every node's span sits inside its parent's span") {
    for (const char* name : {"same_orientation_zero.cdsl", "bingo_color_lines.cdsl"}) {
        CAPTURE(name);
        Script s = parse_ok(test::corpus(name));
        Json root = ast_to_json(s, /*include_spans=*/true);
        std::function<void(const Json&, const Json&)> walk = [&](const Json& node,
                                                                 const Json& parent_span) {
            if (node.is_object() && node.contains("span") && !parent_span.is_null()) {
                const Json& sp = node["span"];
                long long b = sp["line"].get<long long>() * 100000 + sp["col"].get<long long>();
                long long e = sp["endLine"].get<long long>() * 100000 + sp["endCol"].get<long long>();
                long long pb = parent_span["line"].get<long long>() * 100000 +
                               parent_span["col"].get<long long>();
                long long pe = parent_span["endLine"].get<long long>() * 100000 +
                               parent_span["endCol"].get<long long>();
                CHECK(b >= pb);
                CHECK(e <= pe);
            }
            const Json& next_span = node.is_object() && node.contains("span") ? node["span"]
                                                                              : parent_span;
            if (node.is_structured())
                for (const auto& child : node)
                    walk(child, next_span);
        };
        walk(root, Json());
    }
}

TEST_CASE("a one-token corruption is reported on its own line") {
    struct Case {
        std::string before, after;
        int line;
    };
    std::string src = test::corpus("same_orientation_zero.cdsl");
    const Case cases[] = {
        {"SEARCH object", "SEARCHX object", 2},
        {"REASON{letter_W.orientation}", "REASON letter_W.orientation}", 9},
        {"LOCATE same_direction_zero", "LOCATE 77", 15},
    };
    for (const Case& c : cases) {
        CAPTURE(c.line);
        std::string broken = src;
        auto at = broken.find(c.before);
        REQUIRE(at != std::string::npos);
        broken.replace(at, c.before.size(), c.after);
        ParseResult r = parse_source(broken);
        REQUIRE(!r.script.has_value());
        bool on_line = false;
        for (const auto& d : r.diagnostics)
            if (d.span.line == c.line) on_line = true;
        CHECK(on_line);
    }
}
