#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fsapprox/errors.hpp"
#include "fsapprox/grammar.hpp"
#include "fsapprox/lexer.hpp"

namespace fsapprox {

/// Declared features of one category, in declaration order, each with
/// its ordered, duplicate-free value set.
struct FeatureDecl {
    std::string category;
    std::vector<std::pair<std::string, std::vector<std::string>>> features;
};

/// One constraint `f = spec` attached to a category occurrence.
struct FeatureConstraint {
    enum class Kind { Variable, Value, ValueSet, Inherit };

    std::string feature;
    Kind kind = Kind::Value;
    std::string name;                 // variable name or single value
    std::vector<std::string> values;  // ValueSet members
    int line = 0, col = 0;
};

struct CategoryTerm {
    std::string name;
    std::vector<FeatureConstraint> constraints;
    int line = 0, col = 0;
};

/// A right-hand-side item: either a terminal or a category occurrence.
struct ApsgItem {
    bool is_terminal = false;
    std::string terminal;
    CategoryTerm category;
};

struct ApsgRule {
    CategoryTerm lhs;
    std::vector<ApsgItem> rhs;
};

struct ApsgGrammar {
    std::vector<FeatureDecl> declarations;
    std::string start;
    std::vector<ApsgRule> rules;

    const FeatureDecl* find_decl(const std::string& category) const {
        for (const auto& d : declarations)
            if (d.category == category) return &d;
        return nullptr;
    }
};

namespace detail {

inline CategoryTerm parse_category_term(Lexer& lx, Token name) {
    CategoryTerm term;
    term.name = name.text;
    term.line = name.line;
    term.col = name.col;
    if (lx.peek().kind != TokKind::HashBracket) return term;
    lx.next();
    for (;;) {
        Token feat = lx.expect(TokKind::Ident);
        FeatureConstraint c;
        c.feature = feat.text;
        c.line = feat.line;
        c.col = feat.col;
        for (const auto& prev : term.constraints)
            if (prev.feature == c.feature)
                throw ParseError("duplicate constraint for feature '" +
                                     c.feature + "'",
                                 feat.line, feat.col);
        lx.expect(TokKind::Equals);
        Token spec = lx.next();
        switch (spec.kind) {
            case TokKind::Bang:
                c.kind = FeatureConstraint::Kind::Inherit;
                break;
            case TokKind::Variable:
                c.kind = FeatureConstraint::Kind::Variable;
                c.name = spec.text;
                break;
            case TokKind::Ident:
                c.kind = FeatureConstraint::Kind::Value;
                c.name = spec.text;
                break;
            case TokKind::LParen: {
                c.kind = FeatureConstraint::Kind::ValueSet;
                for (;;) {
                    Token v = lx.expect(TokKind::Ident);
                    c.values.push_back(v.text);
                    if (lx.peek().kind != TokKind::Comma) break;
                    lx.next();
                }
                lx.expect(TokKind::RParen);
                break;
            }
            default:
                throw ParseError(
                    "expected a value, value set, variable, or '!', found " +
                        Lexer::describe(spec),
                    spec.line, spec.col);
        }
        term.constraints.push_back(std::move(c));
        if (lx.peek().kind != TokKind::Comma) break;
        lx.next();
    }
    lx.expect(TokKind::RBracket);
    return term;
}

inline void check_constraints(const ApsgGrammar& g, const CategoryTerm& term,
                              const CategoryTerm* lhs) {
    const FeatureDecl* decl = g.find_decl(term.name);
    for (const auto& c : term.constraints) {
        const std::vector<std::string>* domain = nullptr;
        if (decl)
            for (const auto& [f, vals] : decl->features)
                if (f == c.feature) domain = &vals;
        if (!domain)
            throw SemanticError("category '" + term.name +
                                    "' does not declare feature '" + c.feature +
                                    "'",
                                c.line, c.col);
        auto check_value = [&](const std::string& v) {
            if (std::find(domain->begin(), domain->end(), v) == domain->end())
                throw SemanticError("'" + v +
                                        "' is not a declared value of feature '" +
                                        c.feature + "' of category '" +
                                        term.name + "'",
                                    c.line, c.col);
        };
        switch (c.kind) {
            case FeatureConstraint::Kind::Value:
                check_value(c.name);
                break;
            case FeatureConstraint::Kind::ValueSet:
                for (const auto& v : c.values) check_value(v);
                break;
            case FeatureConstraint::Kind::Inherit: {
                if (!lhs)
                    throw SemanticError(
                        "'!' may only appear on right-hand-side categories",
                        c.line, c.col);
                const FeatureDecl* ld = g.find_decl(lhs->name);
                bool found = false;
                if (ld)
                    for (const auto& [f, vals] : ld->features)
                        if (f == c.feature) found = true;
                if (!found)
                    throw SemanticError("'!' inherits feature '" + c.feature +
                                            "' but category '" + lhs->name +
                                            "' does not declare it",
                                        c.line, c.col);
                break;
            }
            case FeatureConstraint::Kind::Variable:
                break;
        }
    }
}

}  // namespace detail

/// Parses the feature-annotated grammar notation: `cat` declarations,
/// a `start` declaration, and rules whose categories may carry
/// `#[f=v, ...]` constraint lists with values, value sets, capitalized
/// variables, and `!` (inherit from the left-hand side).
inline ApsgGrammar parse_apsg(std::string_view text) {
    using detail::Token;
    using detail::TokKind;
    detail::Lexer lx(text);
    ApsgGrammar g;
    bool have_start = false;

    while (lx.peek().kind != TokKind::End) {
        Token head = lx.expect(TokKind::Ident);
        if (head.text == "start") {
            if (have_start)
                throw ParseError("duplicate 'start' declaration", head.line,
                                 head.col);
            Token name = lx.expect(TokKind::Ident);
            lx.expect(TokKind::Dot);
            have_start = true;
            g.start = name.text;
            continue;
        }
        if (head.text == "cat") {
            Token name = lx.expect(TokKind::Ident);
            if (g.find_decl(name.text))
                throw ParseError("duplicate declaration for category '" +
                                     name.text + "'",
                                 name.line, name.col);
            FeatureDecl decl;
            decl.category = name.text;
            lx.expect(TokKind::HashBracket);
            for (;;) {
                Token feat = lx.expect(TokKind::Ident);
                for (const auto& [f, vals] : decl.features)
                    if (f == feat.text)
                        throw ParseError("duplicate feature '" + feat.text +
                                             "' in declaration",
                                         feat.line, feat.col);
                lx.expect(TokKind::Equals);
                lx.expect(TokKind::LParen);
                std::vector<std::string> values;
                for (;;) {
                    Token v = lx.expect(TokKind::Ident);
                    if (std::find(values.begin(), values.end(), v.text) !=
                        values.end())
                        throw ParseError("duplicate value '" + v.text +
                                             "' for feature '" + feat.text + "'",
                                         v.line, v.col);
                    values.push_back(v.text);
                    if (lx.peek().kind != TokKind::Comma) break;
                    lx.next();
                }
                lx.expect(TokKind::RParen);
                decl.features.emplace_back(feat.text, std::move(values));
                if (lx.peek().kind != TokKind::Comma) break;
                lx.next();
            }
            lx.expect(TokKind::RBracket);
            lx.expect(TokKind::Dot);
            g.declarations.push_back(std::move(decl));
            continue;
        }

        ApsgRule rule;
        rule.lhs = detail::parse_category_term(lx, head);
        lx.expect(TokKind::Arrow);
        for (;;) {
            std::vector<ApsgItem> rhs;
            if (lx.peek().kind == TokKind::LBracket) {
                lx.next();
                lx.expect(TokKind::RBracket);
            } else {
                for (;;) {
                    Token item = lx.next();
                    if (item.kind == TokKind::Terminal) {
                        ApsgItem it;
                        it.is_terminal = true;
                        it.terminal = item.text;
                        rhs.push_back(std::move(it));
                    } else if (item.kind == TokKind::Ident) {
                        ApsgItem it;
                        it.category = detail::parse_category_term(lx, item);
                        rhs.push_back(std::move(it));
                    } else {
                        throw ParseError("expected category or terminal, found " +
                                             detail::Lexer::describe(item),
                                         item.line, item.col);
                    }
                    if (lx.peek().kind != TokKind::Comma) break;
                    lx.next();
                }
            }
            g.rules.push_back({rule.lhs, std::move(rhs)});
            if (lx.peek().kind != TokKind::Bar) break;
            lx.next();
        }
        lx.expect(TokKind::Dot);
    }

    if (!have_start) lx.fail("missing 'start' declaration");
    for (const auto& r : g.rules) {
        detail::check_constraints(g, r.lhs, nullptr);
        for (const auto& item : r.rhs)
            if (!item.is_terminal)
                detail::check_constraints(g, item.category, &r.lhs);
    }
    bool start_known = g.find_decl(g.start) != nullptr;
    for (const auto& r : g.rules) {
        if (r.lhs.name == g.start) start_known = true;
        for (const auto& item : r.rhs)
            if (!item.is_terminal && item.category.name == g.start)
                start_known = true;
    }
    if (!start_known)
        throw SemanticError("start category '" + g.start +
                                "' is never declared or used",
                            1, 1);
    return g;
}

namespace detail {

/// One slot of a rule under instantiation: the lhs category (slot 0) or
/// a rhs category, with one chosen value per declared feature.
struct Slot {
    const CategoryTerm* term = nullptr;
    const FeatureDecl* decl = nullptr;
    std::vector<std::string> chosen;
};

inline std::string render_instance(const Slot& slot) {
    std::string name = slot.term->name;
    if (!slot.decl) return name;
    for (size_t i = 0; i < slot.decl->features.size(); ++i) {
        name += '#';
        name += slot.decl->features[i].first;
        name += '=';
        name += slot.chosen[i];
    }
    return name;
}

}  // namespace detail

/// Expands the feature grammar into a plain CFG. Every category
/// occurrence is specialized to one value per declared feature
/// (unconstrained features range over their whole domain); nonterminals
/// render as `name#f1=v1#f2=v2` in declaration order. When the start
/// category has features, a fresh start nonterminal (the bare category
/// name) is added with one rule per start-category instance. Rules are
/// emitted per source rule in order, assignments enumerated with the
/// last feature varying fastest and values in declared order; duplicates
/// are dropped silently.
inline Grammar instantiate(const ApsgGrammar& g) {
    Grammar out;
    std::set<std::pair<std::string, std::vector<Symbol>>> seen;
    auto emit = [&](std::string lhs, std::vector<Symbol> rhs) {
        if (!seen.emplace(lhs, rhs).second) return;
        out.nonterminals.insert(lhs);
        for (const auto& s : rhs) {
            if (s.kind == SymbolKind::Terminal)
                out.terminals.insert(s.name);
            else
                out.nonterminals.insert(s.name);
        }
        out.rules.push_back({std::move(lhs), std::move(rhs)});
    };

    std::vector<Rule> body;
    for (const auto& rule : g.rules) {
        // Slot 0 is the lhs; the remaining slots follow the rhs category
        // occurrences in order.
        std::vector<detail::Slot> slots;
        auto add_slot = [&](const CategoryTerm& t) {
            detail::Slot s;
            s.term = &t;
            s.decl = g.find_decl(t.name);
            s.chosen.resize(s.decl ? s.decl->features.size() : 0);
            slots.push_back(s);
        };
        add_slot(rule.lhs);
        for (const auto& item : rule.rhs)
            if (!item.is_terminal) add_slot(item.category);

        // Flat list of (slot, feature) positions, instantiated in order
        // by a recursive odometer; variables bind at first occurrence.
        struct Position {
            int slot;
            int feature;
            const FeatureConstraint* constraint;  // null = unconstrained
        };
        std::vector<Position> positions;
        for (int si = 0; si < static_cast<int>(slots.size()); ++si) {
            if (!slots[si].decl) continue;
            const auto& feats = slots[si].decl->features;
            for (int fi = 0; fi < static_cast<int>(feats.size()); ++fi) {
                const FeatureConstraint* c = nullptr;
                for (const auto& cand : slots[si].term->constraints)
                    if (cand.feature == feats[fi].first) c = &cand;
                positions.push_back({si, fi, c});
            }
        }

        std::map<std::string, std::string> bindings;
        auto lhs_value = [&](const std::string& feature) -> const std::string& {
            const auto& feats = slots[0].decl->features;
            for (size_t i = 0; i < feats.size(); ++i)
                if (feats[i].first == feature) return slots[0].chosen[i];
            throw Error("internal: inherited feature vanished");  // unreachable
        };
        auto emit_current = [&]() {
            std::vector<Symbol> rhs;
            int slot_index = 1;
            for (const auto& item : rule.rhs) {
                if (item.is_terminal)
                    rhs.push_back(terminal(item.terminal));
                else
                    rhs.push_back(nonterminal(
                        detail::render_instance(slots[slot_index++])));
            }
            emit(detail::render_instance(slots[0]), std::move(rhs));
        };
        auto assign = [&](auto&& self, size_t pi) -> void {
            if (pi == positions.size()) {
                emit_current();
                return;
            }
            const Position& pos = positions[pi];
            detail::Slot& slot = slots[pos.slot];
            const auto& domain = slot.decl->features[pos.feature].second;
            auto try_value = [&](const std::string& v) {
                if (std::find(domain.begin(), domain.end(), v) == domain.end())
                    return;
                slot.chosen[pos.feature] = v;
                self(self, pi + 1);
            };
            if (!pos.constraint) {
                for (const auto& v : domain) try_value(v);
                return;
            }
            switch (pos.constraint->kind) {
                case FeatureConstraint::Kind::Value:
                    try_value(pos.constraint->name);
                    break;
                case FeatureConstraint::Kind::ValueSet:
                    for (const auto& v : pos.constraint->values) try_value(v);
                    break;
                case FeatureConstraint::Kind::Inherit:
                    try_value(lhs_value(pos.constraint->feature));
                    break;
                case FeatureConstraint::Kind::Variable: {
                    auto bound = bindings.find(pos.constraint->name);
                    if (bound != bindings.end()) {
                        try_value(bound->second);
                        break;
                    }
                    for (const auto& v : domain) {
                        bindings.emplace(pos.constraint->name, v);
                        try_value(v);
                        bindings.erase(pos.constraint->name);
                    }
                    break;
                }
            }
        };
        assign(assign, 0);
    }
    body = std::move(out.rules);
    out.rules.clear();

    // Start handling: a featureless start category is already a plain
    // nonterminal; a featured one gets a fresh wrapper named after it
    // (instances always carry '#', so the bare name is free).
    const FeatureDecl* start_decl = g.find_decl(g.start);
    std::vector<Rule> wrappers;
    if (!start_decl || start_decl->features.empty()) {
        out.start = g.start;
        out.nonterminals.insert(g.start);
    } else {
        std::string wrapper = g.start;
        while (out.terminals.count(wrapper)) wrapper += '_';
        out.start = wrapper;
        CategoryTerm bare;
        bare.name = g.start;
        detail::Slot slot;
        slot.term = &bare;
        slot.decl = start_decl;
        slot.chosen.resize(start_decl->features.size());
        auto expand = [&](auto&& self, size_t fi) -> void {
            if (fi == start_decl->features.size()) {
                wrappers.push_back(
                    {wrapper, {nonterminal(detail::render_instance(slot))}});
                return;
            }
            for (const auto& v : start_decl->features[fi].second) {
                slot.chosen[fi] = v;
                self(self, fi + 1);
            }
        };
        expand(expand, 0);
        out.nonterminals.insert(wrapper);
        for (const auto& r : wrappers)
            out.nonterminals.insert(r.rhs[0].name);
    }

    out.rules = std::move(wrappers);
    out.rules.insert(out.rules.end(), body.begin(), body.end());
    for (const auto& t : out.terminals)
        if (out.nonterminals.count(t))
            throw SemanticError("'" + t +
                                    "' is used both as a terminal and as a "
                                    "category instance",
                                1, 1);
    return out;
}

}  // namespace fsapprox
