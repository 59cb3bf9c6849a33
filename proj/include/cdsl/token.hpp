// Token stream produced by the indentation-sensitive lexer.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cdsl/source.hpp"

namespace cdsl {

enum class TokenKind {
    keyword,
    identifier,
    string_literal,
    number_literal,
    op,
    punctuation,
    comment,
    newline,
    indent,       // synthetic, zero width
    dedent,       // synthetic, zero width
    description,  // raw text between REASON braces, kept verbatim
};

struct Token {
    TokenKind kind = TokenKind::keyword;
    std::string text;  // exact source slice; empty for indent/dedent
    SourceSpan span;
};

const char* token_kind_name(TokenKind kind);

// True if `text` spells a reserved word, ignoring case. CAPTCHA, MODE and
// COUNT are reserved alongside the statement keywords so the parser never has
// to disambiguate them from user identifiers.
bool is_keyword(std::string_view text);

// Uppercases ASCII; used to canonicalize keyword spellings.
std::string to_upper(std::string_view text);

// Splits source into tokens. Indentation changes on non-blank lines emit
// indent/dedent pairs; blank lines are transparent. Comment lines take part
// in indentation like any statement. At end of input, open indents are closed
// with dedents but no newline is synthesized. Throws LexError.
std::vector<Token> tokenize(std::string_view source);

}  // namespace cdsl
