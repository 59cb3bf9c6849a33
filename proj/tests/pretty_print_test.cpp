#include <doctest.h>

#include <string>

#include "cdsl/ast_json.hpp"
#include "cdsl/parser.hpp"
#include "cdsl/pretty_print.hpp"
#include "test_util.hpp"

using namespace cdsl;

TEST_CASE("empty script prints as the empty string") {
    Script s;
    CHECK(pretty_print(s) == "");
}

TEST_CASE("canonical form normalizes spacing, case and semicolons") {
    Script s = parse_or_throw("x   =   search  obj  in  captcha  ;");
    CHECK(pretty_print(s) == "x = SEARCH obj IN CAPTCHA\n");
}

TEST_CASE("two-target assignment prints in bracketed form") {
    Script s = parse_or_throw("[a, b] = LOCATE thing");
    CHECK(pretty_print(s) == "[a, b] = LOCATE thing\n");
}

TEST_CASE("blocks print with four-space indentation") {
    Script s = parse_or_throw("for c in colors:\n  if c == \"red\":\n   click c\n  else:\n   x = 1\n");
    CHECK(pretty_print(s) ==
          "FOR c IN colors:\n"
          "    IF c == \"red\":\n"
          "        CLICK c\n"
          "    ELSE:\n"
          "        x = 1\n");
}

TEST_CASE("comprehension keywords stay lowercase") {
    Script s = parse_or_throw("colors = REASON{[obj.color for obj in objs]}");
    CHECK(pretty_print(s) == "colors = REASON{[obj.color for obj in objs]}\n");
}

TEST_CASE("description text is preserved verbatim") {
    Script s = parse_or_throw("x = REASON{ Is this  weirdly-spaced   text kept? }");
    CHECK(pretty_print(s) == "x = REASON{ Is this  weirdly-spaced   text kept? }\n");
}

TEST_CASE("string escapes survive a print and re-parse") {
    Script s = parse_or_throw(R"(x = SEARCH obj IN objs WHERE obj.value == "say \"hi\" \\ bye")");
    std::string printed = pretty_print(s);
    Script again = parse_or_throw(printed);
    CHECK(ast_equal(s, again));
    CHECK(printed.find(R"("say \"hi\" \\ bye")") != std::string::npos);
}

TEST_CASE("or under and keeps its parentheses") {
    Script s = parse_or_throw(
        "x = SEARCH obj IN objs WHERE (obj.color == \"red\" OR obj.color == \"blue\") AND NOT (obj.size == 1 AND obj.size == 2)");
    std::string printed = pretty_print(s);
    Script again = parse_or_throw(printed);
    CHECK(ast_equal(s, again));
    CHECK(printed.find("(obj.color == \"red\" OR obj.color == \"blue\") AND") != std::string::npos);
    CHECK(printed.find("NOT (obj.size == 1 AND obj.size == 2)") != std::string::npos);
}

TEST_CASE("redundant parentheses do not survive the round trip") {
    Script a = parse_or_throw("x = SEARCH obj IN objs WHERE ((obj.size == 1)) OR obj.size == 2");
    Script b = parse_or_throw("x = SEARCH obj IN objs WHERE obj.size == 1 OR obj.size == 2");
    CHECK(ast_equal(a, b));
    CHECK(pretty_print(a) == pretty_print(b));
}

TEST_CASE("printing the corpus is idempotent") {
    for (const char* name : {"same_orientation_zero.cdsl", "same_orientation_zero_faulty.cdsl",
                             "bingo_color_lines.cdsl"}) {
        CAPTURE(name);
        Script s = parse_or_throw(test::corpus(name));
        std::string once = pretty_print(s);
        std::string twice = pretty_print(parse_or_throw(once));
        CHECK(once == twice);
    }
}
