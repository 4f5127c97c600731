#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "fsapprox/errors.hpp"

namespace fsapprox::detail {

enum class TokKind {
    Ident,        // lowercase- or digit-initial word, maybe with #f=v suffixes
    Variable,     // uppercase-initial word
    Terminal,     // `tok
    Dot,          // .
    Comma,        // ,
    Bar,          // |
    Arrow,        // =>
    LBracket,     // [
    RBracket,     // ]
    HashBracket,  // #[
    LParen,       // (
    RParen,       // )
    Equals,       // =
    Bang,         // !
    End,
};

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    int line = 1;
    int col = 1;
};

inline const char* tok_kind_name(TokKind k) {
    switch (k) {
        case TokKind::Ident: return "name";
        case TokKind::Variable: return "variable";
        case TokKind::Terminal: return "terminal";
        case TokKind::Dot: return "'.'";
        case TokKind::Comma: return "','";
        case TokKind::Bar: return "'|'";
        case TokKind::Arrow: return "'=>'";
        case TokKind::LBracket: return "'['";
        case TokKind::RBracket: return "']'";
        case TokKind::HashBracket: return "'#['";
        case TokKind::LParen: return "'('";
        case TokKind::RParen: return "')'";
        case TokKind::Equals: return "'='";
        case TokKind::Bang: return "'!'";
        case TokKind::End: return "end of input";
    }
    return "?";
}

/// Tokenizer for the grammar dialect shared by the plain CFG format and
/// the feature-annotated APSG format. `%` starts a comment that runs to
/// end of line; whitespace is insignificant.
class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_(text) { cur_ = lex(); }

    const Token& peek() const { return cur_; }

    Token next() {
        Token t = cur_;
        cur_ = lex();
        return t;
    }

    Token expect(TokKind kind) {
        if (cur_.kind != kind) {
            throw ParseError(std::string("expected ") + tok_kind_name(kind) +
                                 ", found " + describe(cur_),
                             cur_.line, cur_.col);
        }
        return next();
    }

    static std::string describe(const Token& t) {
        if (t.kind == TokKind::Ident || t.kind == TokKind::Variable)
            return "'" + t.text + "'";
        if (t.kind == TokKind::Terminal) return "'`" + t.text + "'";
        return tok_kind_name(t.kind);
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, cur_.line, cur_.col);
    }

  private:
    static bool is_word_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }
    static bool is_terminal_char(char c) { return is_word_char(c) || c == '\''; }

    char at(size_t i) const { return i < text_.size() ? text_[i] : '\0'; }

    void advance() {
        if (at(pos_) == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_blanks() {
        for (;;) {
            char c = at(pos_);
            if (c == '%') {
                while (at(pos_) != '\n' && at(pos_) != '\0') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                return;
            }
        }
    }

    std::string read_word() {
        std::string w;
        while (is_word_char(at(pos_))) {
            w += at(pos_);
            advance();
        }
        return w;
    }

    Token lex() {
        skip_blanks();
        Token t;
        t.line = line_;
        t.col = col_;
        char c = at(pos_);
        switch (c) {
            case '\0': t.kind = TokKind::End; return t;
            case '.': advance(); t.kind = TokKind::Dot; return t;
            case ',': advance(); t.kind = TokKind::Comma; return t;
            case '|': advance(); t.kind = TokKind::Bar; return t;
            case '[': advance(); t.kind = TokKind::LBracket; return t;
            case ']': advance(); t.kind = TokKind::RBracket; return t;
            case '(': advance(); t.kind = TokKind::LParen; return t;
            case ')': advance(); t.kind = TokKind::RParen; return t;
            case '!': advance(); t.kind = TokKind::Bang; return t;
            case '=':
                advance();
                if (at(pos_) == '>') {
                    advance();
                    t.kind = TokKind::Arrow;
                } else {
                    t.kind = TokKind::Equals;
                }
                return t;
            case '#':
                // '#[' opens a feature-constraint list; a bare '#' only
                // occurs inside instantiated names, handled below.
                if (at(pos_ + 1) == '[') {
                    advance();
                    advance();
                    t.kind = TokKind::HashBracket;
                    return t;
                }
                throw ParseError("unexpected '#'", t.line, t.col);
            case '`': {
                advance();
                std::string w;
                while (is_terminal_char(at(pos_))) {
                    w += at(pos_);
                    advance();
                }
                if (w.empty())
                    throw ParseError("empty terminal after '`'", t.line, t.col);
                t.kind = TokKind::Terminal;
                t.text = std::move(w);
                return t;
            }
            default: break;
        }
        if (std::isupper(static_cast<unsigned char>(c))) {
            t.kind = TokKind::Variable;
            t.text = read_word();
            return t;
        }
        if (is_word_char(c)) {
            std::string w = read_word();
            // Instantiated nonterminals carry '#feature=value' suffixes,
            // e.g. np#n=s#p=3. '#[' never continues a name.
            while (at(pos_) == '#' && at(pos_ + 1) != '[') {
                advance();
                std::string feat = read_word();
                if (feat.empty() || at(pos_) != '=')
                    throw ParseError("malformed '#feature=value' name suffix",
                                     t.line, t.col);
                advance();
                std::string val = read_word();
                if (val.empty())
                    throw ParseError("malformed '#feature=value' name suffix",
                                     t.line, t.col);
                w += '#';
                w += feat;
                w += '=';
                w += val;
            }
            t.kind = TokKind::Ident;
            t.text = std::move(w);
            return t;
        }
        throw ParseError(std::string("unexpected character '") + c + "'",
                         t.line, t.col);
    }

    std::string_view text_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token cur_;
};

}  // namespace fsapprox::detail
