#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fsapprox/errors.hpp"
#include "fsapprox/lexer.hpp"

namespace fsapprox {

enum class SymbolKind { Terminal, Nonterminal };

/// A grammar symbol. Terminals order before nonterminals, which fixes the
/// exploration order of every downstream construction.
struct Symbol {
    SymbolKind kind;
    std::string name;

    auto operator<=>(const Symbol&) const = default;
};

inline Symbol terminal(std::string name) {
    return {SymbolKind::Terminal, std::move(name)};
}
inline Symbol nonterminal(std::string name) {
    return {SymbolKind::Nonterminal, std::move(name)};
}

struct Rule {
    std::string lhs;
    std::vector<Symbol> rhs;

    auto operator<=>(const Rule&) const = default;
};

/// A context-free grammar. Immutable by convention once built; rule order
/// is preserved from the input so that downstream state numbering is
/// reproducible.
struct Grammar {
    std::set<std::string> terminals;
    std::set<std::string> nonterminals;
    std::string start;
    std::vector<Rule> rules;

    bool operator==(const Grammar&) const = default;

    bool is_terminal(const std::string& name) const {
        return terminals.count(name) != 0;
    }
    bool is_nonterminal(const std::string& name) const {
        return nonterminals.count(name) != 0;
    }

    std::vector<std::string> alphabet() const {
        return {terminals.begin(), terminals.end()};
    }
};

/// Checks the Grammar invariants, throwing Error on violation. Intended
/// for grammars assembled programmatically; parse_cfg validates as it goes.
inline void validate(const Grammar& g) {
    if (g.start.empty() || !g.is_nonterminal(g.start))
        throw Error("start symbol '" + g.start + "' is not a nonterminal");
    if (g.terminals.count("eps"))
        throw Error("'eps' is reserved and cannot be a terminal");
    for (const auto& t : g.terminals)
        if (g.nonterminals.count(t))
            throw Error("'" + t + "' is declared both terminal and nonterminal");
    std::set<std::pair<std::string, std::vector<Symbol>>> seen;
    for (const auto& r : g.rules) {
        if (!g.is_nonterminal(r.lhs))
            throw Error("rule head '" + r.lhs + "' is not a nonterminal");
        for (const auto& s : r.rhs) {
            bool known = s.kind == SymbolKind::Terminal ? g.is_terminal(s.name)
                                                        : g.is_nonterminal(s.name);
            if (!known)
                throw Error("rule for '" + r.lhs + "' uses unknown symbol '" +
                            s.name + "'");
        }
        if (!seen.insert({r.lhs, r.rhs}).second)
            throw Error("duplicate rule for '" + r.lhs + "'");
    }
}

namespace detail {

inline bool valid_name(const std::string& s) {
    if (s.empty() || !std::islower(static_cast<unsigned char>(s[0])))
        return false;
    return true;
}

struct CfgBuilder {
    Grammar g;
    std::map<std::string, Token> terminal_uses;
    std::map<std::string, Token> nonterminal_uses;
    bool have_start = false;
    Token start_tok;

    void use_terminal(const Token& t) {
        if (t.text == "eps")
            throw ParseError("'eps' is reserved and cannot be a terminal",
                             t.line, t.col);
        auto hit = nonterminal_uses.find(t.text);
        if (hit != nonterminal_uses.end())
            throw ParseError("'" + t.text +
                                 "' is already used as a category name",
                             t.line, t.col);
        terminal_uses.emplace(t.text, t);
        g.terminals.insert(t.text);
    }

    void use_nonterminal(const Token& t) {
        if (!valid_name(t.text))
            throw ParseError("category name must start with a lowercase letter",
                             t.line, t.col);
        auto hit = terminal_uses.find(t.text);
        if (hit != terminal_uses.end())
            throw ParseError("'" + t.text + "' is already used as a terminal",
                             t.line, t.col);
        nonterminal_uses.emplace(t.text, t);
        g.nonterminals.insert(t.text);
    }

    void add_rule(Rule r, const Token& at) {
        for (const auto& prev : g.rules)
            if (prev == r)
                throw ParseError("duplicate rule for '" + r.lhs + "'", at.line,
                                 at.col);
        g.rules.push_back(std::move(r));
    }

    Grammar finish(const Lexer& lx) {
        if (!have_start) lx.fail("missing 'start' declaration");
        bool defined = std::any_of(g.rules.begin(), g.rules.end(),
                                   [&](const Rule& r) { return r.lhs == g.start; });
        if (!defined)
            throw ParseError("start symbol '" + g.start +
                                 "' is never defined by any rule",
                             start_tok.line, start_tok.col);
        return std::move(g);
    }
};

}  // namespace detail

/// Parses the plain CFG text format:
///
///   start s.
///   s => a, `b.
///   a => a, `a | [].
///
/// Categories are bare names, terminals are backquoted, '[]' is the empty
/// sequence, '%' starts a comment. Duplicate rules are rejected.
inline Grammar parse_cfg(std::string_view text) {
    using detail::Token;
    using detail::TokKind;
    detail::Lexer lx(text);
    detail::CfgBuilder b;

    while (lx.peek().kind != TokKind::End) {
        Token head = lx.expect(TokKind::Ident);
        if (head.text == "start") {
            if (b.have_start)
                throw ParseError("duplicate 'start' declaration", head.line,
                                 head.col);
            Token name = lx.expect(TokKind::Ident);
            lx.expect(TokKind::Dot);
            b.have_start = true;
            b.start_tok = name;
            b.g.start = name.text;
            b.use_nonterminal(name);
            continue;
        }
        b.use_nonterminal(head);
        Token arrow = lx.expect(TokKind::Arrow);
        for (;;) {
            std::vector<Symbol> rhs;
            if (lx.peek().kind == TokKind::LBracket) {
                lx.next();
                lx.expect(TokKind::RBracket);
            } else {
                for (;;) {
                    Token item = lx.next();
                    if (item.kind == TokKind::Terminal) {
                        b.use_terminal(item);
                        rhs.push_back(terminal(item.text));
                    } else if (item.kind == TokKind::Ident) {
                        b.use_nonterminal(item);
                        rhs.push_back(nonterminal(item.text));
                    } else {
                        throw ParseError("expected category or terminal, found " +
                                             detail::Lexer::describe(item),
                                         item.line, item.col);
                    }
                    if (lx.peek().kind != TokKind::Comma) break;
                    lx.next();
                }
            }
            b.add_rule({head.text, std::move(rhs)}, arrow);
            if (lx.peek().kind != TokKind::Bar) break;
            lx.next();
        }
        lx.expect(TokKind::Dot);
    }
    return b.finish(lx);
}

/// Renders a grammar back into the CFG text format, one rule per line.
/// parse_cfg(format_cfg(g)) == g.
inline std::string format_cfg(const Grammar& g) {
    std::string out = "start " + g.start + ".\n";
    for (const auto& r : g.rules) {
        out += r.lhs + " => ";
        if (r.rhs.empty()) {
            out += "[]";
        } else {
            for (size_t i = 0; i < r.rhs.size(); ++i) {
                if (i) out += ", ";
                if (r.rhs[i].kind == SymbolKind::Terminal) out += '`';
                out += r.rhs[i].name;
            }
        }
        out += ".\n";
    }
    return out;
}

/// Removes nonterminals that are unproductive or unreachable from the
/// start symbol, along with every rule mentioning them. The language is
/// unchanged. If the start symbol itself is unproductive the result is
/// the empty-language grammar (no rules) and a warning is emitted.
inline Grammar prune(const Grammar& g,
                     std::vector<std::string>* warnings = nullptr) {
    std::set<std::string> productive;
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& r : g.rules) {
            if (productive.count(r.lhs)) continue;
            bool ok = std::all_of(r.rhs.begin(), r.rhs.end(), [&](const Symbol& s) {
                return s.kind == SymbolKind::Terminal || productive.count(s.name);
            });
            if (ok) {
                productive.insert(r.lhs);
                changed = true;
            }
        }
    }

    Grammar out;
    out.start = g.start;
    out.nonterminals.insert(g.start);
    if (!productive.count(g.start)) {
        if (warnings)
            warnings->push_back("start symbol '" + g.start +
                                "' derives no terminal string; the language is empty");
        return out;
    }

    std::set<std::string> reachable{g.start};
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& r : g.rules) {
            if (!reachable.count(r.lhs) || !productive.count(r.lhs)) continue;
            bool usable = std::all_of(r.rhs.begin(), r.rhs.end(), [&](const Symbol& s) {
                return s.kind == SymbolKind::Terminal || productive.count(s.name);
            });
            if (!usable) continue;
            for (const auto& s : r.rhs)
                if (s.kind == SymbolKind::Nonterminal && reachable.insert(s.name).second)
                    changed = true;
        }
    }

    for (const auto& r : g.rules) {
        if (!reachable.count(r.lhs) || !productive.count(r.lhs)) continue;
        bool keep = std::all_of(r.rhs.begin(), r.rhs.end(), [&](const Symbol& s) {
            return s.kind == SymbolKind::Terminal ||
                   (reachable.count(s.name) && productive.count(s.name));
        });
        if (!keep) continue;
        out.rules.push_back(r);
        out.nonterminals.insert(r.lhs);
        for (const auto& s : r.rhs) {
            if (s.kind == SymbolKind::Terminal)
                out.terminals.insert(s.name);
            else
                out.nonterminals.insert(s.name);
        }
    }
    return out;
}

}  // namespace fsapprox
