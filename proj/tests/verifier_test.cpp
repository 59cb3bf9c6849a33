#include <doctest.h>

#include <map>
#include <string>

#include "cdsl/parser.hpp"
#include "cdsl/pretty_print.hpp"
#include "cdsl/verifier.hpp"
#include "test_util.hpp"

using namespace cdsl;

namespace {

VerifyReport verify_src(const std::string& src) { return verify(parse_or_throw(src)); }

int errors(const VerifyReport& r) {
    int n = 0;
    for (const auto& d : r.diagnostics)
        if (!d.warning) ++n;
    return n;
}

int count_code(const VerifyReport& r, DiagCode c) {
    int n = 0;
    for (const auto& d : r.diagnostics)
        if (d.code == c) ++n;
    return n;
}

}  // namespace

TEST_CASE("the faulty listing yields exactly one diagnostic, a V002 on its line") {
    VerifyReport r = verify_src(test::corpus("same_orientation_zero_faulty.cdsl"));
    CHECK(!r.valid);
    REQUIRE(r.diagnostics.size() == 1);
    const Diagnostic& d = r.diagnostics[0];
    CHECK(d.code == DiagCode::V002);
    CHECK(!d.warning);
    CHECK(d.span.line == 9);
    CHECK(d.message.find("orientation") != std::string::npos);
    CHECK(d.message.find("value") != std::string::npos);
}

TEST_CASE("the corrected listing verifies clean") {
    VerifyReport r = verify_src(test::corpus("same_orientation_zero.cdsl"));
    CHECK(r.valid);
    CHECK(r.diagnostics.empty());
}

TEST_CASE("the bingo listing verifies clean") {
    VerifyReport r = verify_src(test::corpus("bingo_color_lines.cdsl"));
    CHECK(r.valid);
    CHECK(r.diagnostics.empty());
}

TEST_CASE("use before definition is V001 and names the identifier") {
    VerifyReport r = verify_src("y = LOCATE q");
    REQUIRE(errors(r) == 1);
    CHECK(r.diagnostics[0].code == DiagCode::V001);
    CHECK(r.diagnostics[0].message.find("'q'") != std::string::npos);
}

TEST_CASE("boolean combinations over the same attribute pass the search rule") {
    VerifyReport r = verify_src(
        "[objs] = SEARCH obj IN CAPTCHA WHERE obj.x == 1 OR obj.x == 2\n"
        "CLICK objs\n");
    CHECK(r.valid);
    CHECK(count_code(r, DiagCode::V002) == 0);
}

TEST_CASE("two distinct attributes in one search predicate are V002") {
    VerifyReport r = verify_src(
        "[objs] = SEARCH obj IN CAPTCHA WHERE obj.x == 1 AND obj.color == \"red\"\n"
        "CLICK objs\n");
    CHECK(!r.valid);
    CHECK(count_code(r, DiagCode::V002) == 1);
}

TEST_CASE("an operand attribute on another binding does not count toward search arity") {
    VerifyReport r = verify_src(
        "[ws] = SEARCH obj IN CAPTCHA WHERE obj.value == \"W\"\n"
        "[objs] = SEARCH obj IN CAPTCHA WHERE obj.orientation == ws.orientation\n"
        "CLICK objs\n");
    CHECK(r.valid);
}

TEST_CASE("a reason result used as a grid coordinate is V003") {
    VerifyReport r = verify_src(
        "[objs] = SEARCH obj IN CAPTCHA\n"
        "n = REASON{MODE([obj.x for obj in objs])}\n"
        "MOVE objs TO (n, 1)\n");
    REQUIRE(errors(r) == 1);
    CHECK(r.diagnostics[0].code == DiagCode::V003);
    CHECK(r.diagnostics[0].span.line == 3);
}

TEST_CASE("a truth-valued reason result may be a condition and compared for equality") {
    VerifyReport r = verify_src(
        "[objs] = SEARCH obj IN CAPTCHA\n"
        "t = REASON{COUNT(objs WHERE obj.x == 1) > 1}\n"
        "IF t:\n"
        "    CLICK objs\n");
    CHECK(r.valid);
}

TEST_CASE("a mode result may only meet equality comparisons") {
    std::string prefix =
        "[objs] = SEARCH obj IN CAPTCHA\n"
        "m = REASON{MODE([obj.x for obj in objs])}\n";
    CHECK(verify_src(prefix + "[picked] = SEARCH obj IN objs WHERE obj.x == m\nCLICK picked\n")
              .valid);
    VerifyReport bad =
        verify_src(prefix + "[picked] = SEARCH obj IN objs WHERE obj.x < m\nCLICK picked\n");
    CHECK(!bad.valid);
    CHECK(count_code(bad, DiagCode::V003) == 1);
}

TEST_CASE("a value-form reason result cannot be a condition") {
    VerifyReport r = verify_src(
        "[objs] = SEARCH obj IN CAPTCHA\n"
        "m = REASON{MODE([obj.x for obj in objs])}\n"
        "IF m:\n"
        "    CLICK objs\n");
    CHECK(!r.valid);
    CHECK(count_code(r, DiagCode::V003) == 1);
}

TEST_CASE("an orientation reason result can be a rotate target") {
    VerifyReport r = verify_src(
        "[ws] = SEARCH obj IN CAPTCHA WHERE obj.value == \"W\"\n"
        "o = REASON{ws.orientation}\n"
        "ROTATE ws TO o\n");
    CHECK(r.valid);
}

TEST_CASE("a truth reason result cannot be a rotate target") {
    VerifyReport r = verify_src(
        "[objs] = SEARCH obj IN CAPTCHA\n"
        "t = REASON{COUNT(objs WHERE obj.x == 1) > 1}\n"
        "ROTATE objs TO t\n");
    CHECK(!r.valid);
    CHECK(count_code(r, DiagCode::V003) == 1);
}

TEST_CASE("a comprehension reason result may drive a loop") {
    VerifyReport r = verify_src(
        "[objs] = SEARCH object IN CAPTCHA\n"
        "colors = REASON{[obj.color for obj in objs]}\n"
        "FOR c IN colors:\n"
        "    CLICK objs\n");
    CHECK(r.valid);
}

TEST_CASE("a truth reason result cannot drive a loop") {
    VerifyReport r = verify_src(
        "[objs] = SEARCH obj IN CAPTCHA\n"
        "t = REASON{COUNT(objs WHERE obj.x == 1) > 1}\n"
        "FOR c IN t:\n"
        "    CLICK objs\n");
    CHECK(!r.valid);
    CHECK(count_code(r, DiagCode::V003) == 1);
}

TEST_CASE("unknown attributes are V004, extension attributes are accepted") {
    VerifyReport bad = verify_src("[objs] = SEARCH obj IN CAPTCHA WHERE obj.weight == 3\nCLICK objs\n");
    CHECK(!bad.valid);
    CHECK(count_code(bad, DiagCode::V004) == 1);

    // `role` ships registered by default.
    CHECK(verify_src("[objs] = SEARCH obj IN CAPTCHA WHERE obj.role == \"target\"\nCLICK objs\n")
              .valid);

    VerifyOptions opts;
    opts.extra_attributes.push_back("weight");
    VerifyReport ok = verify(
        parse_or_throw("[objs] = SEARCH obj IN CAPTCHA WHERE obj.weight == 3\nCLICK objs\n"), opts);
    CHECK(ok.valid);
}

TEST_CASE("alignment axis must be x, y, or a resolved common_axis") {
    std::string search = "[objs] = SEARCH obj IN CAPTCHA\n";
    CHECK(verify_src(search + "MOVE objs TO ALIGN WITH objs ON x\n").valid);
    CHECK(verify_src(search + "MOVE objs TO ALIGN WITH objs ON y\n").valid);

    VerifyReport bad_axis = verify_src(search + "MOVE objs TO ALIGN WITH objs ON diagonal\n");
    CHECK(!bad_axis.valid);
    CHECK(count_code(bad_axis, DiagCode::V005) == 1);

    VerifyReport unresolved = verify_src(search + "MOVE objs TO ALIGN WITH objs ON common_axis\n");
    CHECK(!unresolved.valid);
    CHECK(count_code(unresolved, DiagCode::V005) == 1);

    VerifyReport resolved = verify_src(
        search +
        "common_x = REASON{MODE([obj.x for obj in objs])}\n"
        "common_y = REASON{MODE([obj.y for obj in objs])}\n"
        "MOVE objs TO ALIGN WITH objs ON common_axis\n");
    CHECK(resolved.valid);
}

TEST_CASE("an unused binding is a warning that keeps the script valid") {
    VerifyReport r = verify_src(
        "[objs] = SEARCH obj IN CAPTCHA\n"
        "[extra] = SEARCH obj IN CAPTCHA\n"
        "CLICK objs\n");
    CHECK(r.valid);
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].code == DiagCode::V006);
    CHECK(r.diagnostics[0].warning);
    CHECK(r.diagnostics[0].span.line == 2);
}

TEST_CASE("the final statement's binding is exempt from the unused warning") {
    VerifyReport r = verify_src(
        "[objs] = SEARCH obj IN CAPTCHA\n"
        "[pos] = LOCATE objs\n");
    CHECK(r.valid);
    CHECK(r.diagnostics.empty());
}

TEST_CASE("bindings of statements that already carry an error get no unused warning") {
    VerifyReport r = verify_src(
        "[objs] = SEARCH obj IN CAPTCHA WHERE obj.x == 1 AND obj.y == 2\n"
        "CLICK objs\n");
    CHECK(count_code(r, DiagCode::V002) == 1);
    CHECK(count_code(r, DiagCode::V006) == 0);
}

TEST_CASE("loop body bindings do not escape the loop") {
    VerifyReport r = verify_src(
        "[objs] = SEARCH object IN CAPTCHA\n"
        "colors = REASON{[obj.color for obj in objs]}\n"
        "FOR c IN colors:\n"
        "    inner = SEARCH obj IN objs WHERE obj.color == c\n"
        "    CLICK inner\n"
        "CLICK inner\n");
    CHECK(!r.valid);
    REQUIRE(errors(r) == 1);
    CHECK(r.diagnostics.back().code == DiagCode::V001);
    CHECK(r.diagnostics.back().span.line == 6);
}

TEST_CASE("branch bindings are visible after the branch") {
    // Mirrors the bingo listing: outlier is bound inside IF/ELIF and moved
    // after the branch closes.
    VerifyReport r = verify_src(
        "[objs] = SEARCH object IN CAPTCHA\n"
        "IF REASON{COUNT(objs WHERE obj.x == 1) > 1}:\n"
        "    pick = SEARCH obj IN objs WHERE obj.x == 1\n"
        "ELIF REASON{COUNT(objs WHERE obj.y == 1) > 1}:\n"
        "    pick = SEARCH obj IN objs WHERE obj.y == 1\n"
        "CLICK pick\n");
    CHECK(r.valid);
    CHECK(r.diagnostics.empty());
}

TEST_CASE("reassignment is allowed") {
    VerifyReport r = verify_src(
        "x = 1\n"
        "x = 2\n"
        "MOVE_TARGET = SEARCH obj IN CAPTCHA WHERE obj.x == x\n"
        "CLICK MOVE_TARGET\n");
    CHECK(r.valid);
}

TEST_CASE("one diagnostic per faulty statement, lowest check first") {
    // The line is both use-before-definition (q) and multi-attribute; only
    // V001 may surface.
    VerifyReport r = verify_src(
        "[objs] = SEARCH obj IN q WHERE obj.x == 1 AND obj.y == 2\n"
        "CLICK objs\n");
    REQUIRE(errors(r) == 1);
    CHECK(r.diagnostics[0].code == DiagCode::V001);
}

TEST_CASE("free text in a description never causes use-before-definition") {
    VerifyReport r = verify_src(
        "[objs] = SEARCH obj IN CAPTCHA\n"
        "t = REASON{does the picture show more circles than squares}\n"
        "IF t:\n"
        "    CLICK objs\n");
    CHECK(r.valid);
}

TEST_CASE("recognized description forms do check their references") {
    VerifyReport r = verify_src("o = REASON{missing_thing.orientation}\nIF o == 1:\n    x = 1\n");
    CHECK(!r.valid);
    CHECK(count_code(r, DiagCode::V001) == 1);
}

TEST_CASE("verification is deterministic") {
    std::string src = test::corpus("bingo_color_lines.cdsl");
    Json a = report_to_json(verify_src(src));
    Json b = report_to_json(verify_src(src));
    CHECK(a == b);
}

TEST_CASE("pretty-printing does not change the diagnosis") {
    for (const char* name : {"same_orientation_zero.cdsl", "same_orientation_zero_faulty.cdsl",
                             "bingo_color_lines.cdsl"}) {
        CAPTURE(name);
        Script s = parse_or_throw(test::corpus(name));
        VerifyReport before = verify(s);
        VerifyReport after = verify(parse_or_throw(pretty_print(s)));
        std::map<DiagCode, int> ca, cb;
        for (const auto& d : before.diagnostics) ++ca[d.code];
        for (const auto& d : after.diagnostics) ++cb[d.code];
        CHECK(ca == cb);
        CHECK(before.valid == after.valid);
    }
}

TEST_CASE("deleting a clean statement introduces no new non-definition errors") {
    // Drop the W_orientation line; its user must fall to V001, nothing else.
    std::string src = test::corpus("same_orientation_zero.cdsl");
    std::string needle = "[W_orientation] = REASON{letter_W.orientation};\n";
    auto at = src.find(needle);
    REQUIRE(at != std::string::npos);
    src.erase(at, needle.size());
    VerifyReport r = verify_src(src);
    CHECK(count_code(r, DiagCode::V001) == 1);
    CHECK(count_code(r, DiagCode::V002) == 0);
    CHECK(count_code(r, DiagCode::V003) == 0);
    CHECK(count_code(r, DiagCode::V004) == 0);
    CHECK(count_code(r, DiagCode::V005) == 0);
}

TEST_CASE("explain text is a usable repair instruction") {
    VerifyReport v002 = verify_src(test::corpus("same_orientation_zero_faulty.cdsl"));
    REQUIRE(!v002.diagnostics.empty());
    std::string text = explain(v002.diagnostics[0]);
    CHECK(text.find("split") != std::string::npos);
    CHECK(text.find("orientation") != std::string::npos);
    CHECK(text.find("value") != std::string::npos);

    VerifyReport v001 = verify_src("y = LOCATE q");
    std::string t1 = explain(v001.diagnostics[0]);
    CHECK(t1.find("'q'") != std::string::npos);
    CHECK(t1.find("define") != std::string::npos);

    VerifyReport v006 = verify_src("x = 1\ny = 2\nCLICK_TARGET = SEARCH obj IN CAPTCHA\nCLICK CLICK_TARGET\n");
    REQUIRE(count_code(v006, DiagCode::V006) == 2);
    CHECK(explain(v006.diagnostics[0]).rfind("warning", 0) == 0);
}

TEST_CASE("diagnostics sort by position then code") {
    VerifyReport r = verify_src(
        "a = 1\n"
        "[objs] = SEARCH obj IN CAPTCHA WHERE obj.x == 1 AND obj.y == 2\n"
        "CLICK missing\n");
    REQUIRE(r.diagnostics.size() >= 3);  // V006(a), V002, V001
    for (std::size_t i = 1; i < r.diagnostics.size(); ++i) {
        const auto& prev = r.diagnostics[i - 1];
        const auto& cur = r.diagnostics[i];
        bool ordered = prev.span.line < cur.span.line ||
                       (prev.span.line == cur.span.line && prev.span.col <= cur.span.col);
        CHECK(ordered);
    }
}

TEST_CASE("report json carries the documented fields") {
    VerifyReport r = verify_src(test::corpus("same_orientation_zero_faulty.cdsl"));
    Json j = report_to_json(r);
    CHECK(j["valid"] == false);
    REQUIRE(j["diagnostics"].size() == 1);
    const Json& d = j["diagnostics"][0];
    CHECK(d["code"] == "V002");
    CHECK(d["severity"] == "error");
    CHECK(d["line"] == 9);
    CHECK(d.contains("col"));
    CHECK(d.contains("message"));
    CHECK(d.contains("hint"));
}
