// Source positions and the error types shared by the lexer, parser and interpreter.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cdsl {

// Half-open span over the source text. line/col are 1-based and count bytes,
// not display columns; end_line/end_col point one past the last byte of the
// token or node. begin/end are byte offsets into the original buffer so the
// exact source slice can always be recovered.
struct SourceSpan {
    int line = 1;
    int col = 1;
    int end_line = 1;
    int end_col = 1;
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Extends `a` so it also covers `b`. Assumes both belong to the same buffer.
inline SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
    SourceSpan s = a;
    if (b.begin < s.begin) {
        s.begin = b.begin;
        s.line = b.line;
        s.col = b.col;
    }
    if (b.end > s.end) {
        s.end = b.end;
        s.end_line = b.end_line;
        s.end_col = b.end_col;
    }
    return s;
}

// Raised on malformed raw input: tabs in indentation, unterminated string
// literals or descriptions, dedents to a column that was never pushed.
class LexError : public std::runtime_error {
public:
    LexError(SourceSpan span, std::string reason)
        : std::runtime_error("lex error at line " + std::to_string(span.line) + ", col " +
                             std::to_string(span.col) + ": " + reason),
          span_(span),
          reason_(std::move(reason)) {}

    const SourceSpan& span() const { return span_; }
    const std::string& reason() const { return reason_; }

private:
    SourceSpan span_;
    std::string reason_;
};

// Raised when a caller breaks a documented precondition (e.g. executing a
// script that was never verified). Not part of any normal control flow.
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace cdsl
