#include "cdsl/token.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace cdsl {

namespace {

const std::array<std::string_view, 21> kKeywords = {
    "SEARCH", "REASON", "LOCATE", "IN",   "WHERE", "FOR",  "IF",
    "ELIF",   "ELSE",   "MOVE",   "ROTATE", "CLICK", "TO",   "ALIGN",
    "WITH",   "ON",     "AND",    "OR",   "NOT",   "MODE", "COUNT",
};
// CAPTCHA is reserved too but kept out of kKeywords so the list above stays
// exactly the statement/operator vocabulary; see is_keyword.

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        indent_stack_.push_back(0);
        while (pos_ < src_.size()) {
            if (at_line_start_) {
                lex_line_start();
                continue;
            }
            char c = src_[pos_];
            if (c == ' ') {
                advance();
            } else if (c == '\n' || c == '\r') {
                lex_newline();
            } else if (c == '/' && peek(1) == '/') {
                lex_comment();
            } else if (c == '"') {
                lex_string();
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                lex_number();
            } else if (is_ident_start(c)) {
                lex_word();
            } else if (c == '{' && after_reason_) {
                lex_description();
            } else {
                lex_symbol();
            }
        }
        // Close any open blocks. No newline is synthesized at end of input.
        while (indent_stack_.back() > 0) {
            indent_stack_.pop_back();
            push_synthetic(TokenKind::dedent);
        }
        return std::move(tokens_);
    }

private:
    std::string_view src_;
    std::vector<Token> tokens_;
    std::vector<int> indent_stack_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    bool at_line_start_ = true;
    bool after_reason_ = false;  // last significant token was the REASON keyword

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    SourceSpan here() const {
        SourceSpan s;
        s.line = s.end_line = line_;
        s.col = s.end_col = col_;
        s.begin = s.end = pos_;
        return s;
    }

    Token& push(TokenKind kind, SourceSpan start) {
        Token t;
        t.kind = kind;
        t.span = start;
        t.span.end_line = line_;
        t.span.end_col = col_;
        t.span.end = pos_;
        t.text = std::string(src_.substr(start.begin, pos_ - start.begin));
        tokens_.push_back(std::move(t));
        return tokens_.back();
    }

    void push_synthetic(TokenKind kind) {
        Token t;
        t.kind = kind;
        t.span = here();
        tokens_.push_back(std::move(t));
    }

    void lex_line_start() {
        SourceSpan start = here();
        int indent = 0;
        while (pos_ < src_.size() && src_[pos_] == ' ') {
            advance();
            ++indent;
        }
        if (pos_ < src_.size() && src_[pos_] == '\t')
            throw LexError(here(), "tab character in indentation");
        at_line_start_ = false;
        if (pos_ >= src_.size() || src_[pos_] == '\n' || src_[pos_] == '\r')
            return;  // blank line: indentation-transparent
        if (indent > indent_stack_.back()) {
            indent_stack_.push_back(indent);
            Token t;
            t.kind = TokenKind::indent;
            t.span = start;
            t.span.end = start.begin;
            tokens_.push_back(std::move(t));
        } else {
            while (indent < indent_stack_.back()) {
                indent_stack_.pop_back();
                push_synthetic(TokenKind::dedent);
            }
            if (indent != indent_stack_.back())
                throw LexError(here(), "dedent to an indentation level that was never opened");
        }
    }

    void lex_newline() {
        SourceSpan start = here();
        if (src_[pos_] == '\r') {
            advance();
            if (pos_ >= src_.size() || src_[pos_] != '\n')
                throw LexError(start, "carriage return not followed by line feed");
        }
        advance();
        push(TokenKind::newline, start);
        at_line_start_ = true;
        after_reason_ = false;
    }

    void lex_comment() {
        SourceSpan start = here();
        while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') advance();
        push(TokenKind::comment, start);
    }

    void lex_string() {
        SourceSpan start = here();
        advance();  // opening quote
        while (true) {
            if (pos_ >= src_.size() || src_[pos_] == '\n' || src_[pos_] == '\r')
                throw LexError(start, "unterminated string literal");
            char c = src_[pos_];
            if (c == '\\' && (peek(1) == '"' || peek(1) == '\\')) {
                advance();
                advance();
                continue;
            }
            advance();
            if (c == '"') break;
        }
        push(TokenKind::string_literal, start);
    }

    void lex_number() {
        SourceSpan start = here();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        push(TokenKind::number_literal, start);
        after_reason_ = false;
    }

    void lex_word() {
        SourceSpan start = here();
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
        Token& t = push(is_keyword(src_.substr(start.begin, pos_ - start.begin))
                            ? TokenKind::keyword
                            : TokenKind::identifier,
                        start);
        after_reason_ = t.kind == TokenKind::keyword && to_upper(t.text) == "REASON";
    }

    // Raw description payload between REASON braces. The text is kept verbatim
    // (including any backslash escapes); escaping only decides where the
    // description ends. Descriptions must stay on one line.
    void lex_description() {
        SourceSpan brace = here();
        advance();  // '{'
        push(TokenKind::punctuation, brace);
        SourceSpan start = here();
        while (true) {
            if (pos_ >= src_.size() || src_[pos_] == '\n' || src_[pos_] == '\r')
                throw LexError(brace, "unterminated description (missing '}')");
            char c = src_[pos_];
            if (c == '\\' && (peek(1) == '{' || peek(1) == '}' || peek(1) == '\\')) {
                advance();
                advance();
                continue;
            }
            if (c == '{') throw LexError(here(), "unescaped '{' inside description");
            if (c == '}') break;
            advance();
        }
        push(TokenKind::description, start);
        SourceSpan close = here();
        advance();  // '}'
        push(TokenKind::punctuation, close);
        after_reason_ = false;
    }

    void lex_symbol() {
        SourceSpan start = here();
        char c = src_[pos_];
        switch (c) {
            case '=':
                advance();
                if (peek() == '=') advance();
                push(TokenKind::op, start);
                break;
            case '!':
            case '<':
            case '>':
                advance();
                if (pos_ < src_.size() && src_[pos_] == '=') advance();
                else if (c == '!')
                    throw LexError(start, "expected '=' after '!'");
                push(TokenKind::op, start);
                break;
            case '.':
            case ';':
            case ',':
            case ':':
            case '[':
            case ']':
            case '(':
            case ')':
            case '{':
            case '}':
                advance();
                push(TokenKind::punctuation, start);
                break;
            default:
                throw LexError(start, std::string("unexpected character '") + c + "'");
        }
        after_reason_ = false;
    }
};

}  // namespace

const char* token_kind_name(TokenKind kind) {
    switch (kind) {
        case TokenKind::keyword: return "keyword";
        case TokenKind::identifier: return "identifier";
        case TokenKind::string_literal: return "string-literal";
        case TokenKind::number_literal: return "number-literal";
        case TokenKind::op: return "operator";
        case TokenKind::punctuation: return "punctuation";
        case TokenKind::comment: return "comment";
        case TokenKind::newline: return "newline";
        case TokenKind::indent: return "indent";
        case TokenKind::dedent: return "dedent";
        case TokenKind::description: return "description";
    }
    return "?";
}

std::string to_upper(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

bool is_keyword(std::string_view text) {
    std::string up = to_upper(text);
    if (up == "CAPTCHA") return true;
    return std::find(kKeywords.begin(), kKeywords.end(), up) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace cdsl
