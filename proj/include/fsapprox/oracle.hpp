#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fsapprox/errors.hpp"
#include "fsapprox/grammar.hpp"

namespace fsapprox::oracle {

namespace detail {

struct EarleyItem {
    int rule;
    int dot;
    int origin;

    auto operator<=>(const EarleyItem&) const = default;
};

}  // namespace detail

/// Earley membership test. Completely independent of the LR-based
/// pipeline: used as the ground truth that approximations are checked
/// against. Handles empty rules by recording, per position, which
/// nonterminals have completed an empty parse there, so predictions that
/// arrive after such a completion still advance.
inline bool member(const Grammar& g, const std::vector<std::string>& word) {
    using detail::EarleyItem;
    std::map<std::string, std::vector<int>> by_lhs;
    for (int i = 0; i < static_cast<int>(g.rules.size()); ++i)
        by_lhs[g.rules[i].lhs].push_back(i);
    for (const auto& tok : word)
        if (!g.terminals.count(tok)) return false;

    int n = static_cast<int>(word.size());
    std::vector<std::vector<EarleyItem>> chart(n + 1);
    std::vector<std::set<EarleyItem>> seen(n + 1);
    std::vector<std::set<std::string>> completed_empty(n + 1);
    auto add = [&](int pos, EarleyItem item) {
        if (seen[pos].insert(item).second) chart[pos].push_back(item);
    };
    for (int r : by_lhs[g.start]) add(0, {r, 0, 0});

    for (int pos = 0; pos <= n; ++pos) {
        // Index-based loops: chart rows grow while being scanned.
        for (size_t idx = 0; idx < chart[pos].size(); ++idx) {
            EarleyItem item = chart[pos][idx];
            const Rule& rule = g.rules[item.rule];
            if (item.dot < static_cast<int>(rule.rhs.size())) {
                const Symbol& sym = rule.rhs[item.dot];
                if (sym.kind == SymbolKind::Nonterminal) {
                    auto rit = by_lhs.find(sym.name);
                    if (rit != by_lhs.end())
                        for (int r : rit->second) add(pos, {r, 0, pos});
                    if (completed_empty[pos].count(sym.name))
                        add(pos, {item.rule, item.dot + 1, item.origin});
                } else if (pos < n && word[pos] == sym.name) {
                    add(pos + 1, {item.rule, item.dot + 1, item.origin});
                }
            } else {
                if (item.origin == pos) completed_empty[pos].insert(rule.lhs);
                for (size_t j = 0; j < chart[item.origin].size(); ++j) {
                    EarleyItem wait = chart[item.origin][j];
                    const Rule& wr = g.rules[wait.rule];
                    if (wait.dot < static_cast<int>(wr.rhs.size()) &&
                        wr.rhs[wait.dot] == nonterminal(rule.lhs))
                        add(pos, {wait.rule, wait.dot + 1, wait.origin});
                }
            }
        }
    }
    for (const auto& item : chart[n]) {
        const Rule& rule = g.rules[item.rule];
        if (rule.lhs == g.start && item.origin == 0 &&
            item.dot == static_cast<int>(rule.rhs.size()))
            return true;
    }
    return false;
}

/// All words of length <= max_len in the grammar's language, in
/// length-then-lexicographic order, computed by a per-nonterminal
/// bottom-up fixpoint. Throws ResourceLimitError when some nonterminal
/// accumulates more than `max_words` words.
inline std::vector<std::vector<std::string>> enumerate_language(
    const Grammar& g, int max_len, size_t max_words = 1'000'000) {
    using Word = std::vector<std::string>;
    std::map<std::string, std::set<Word>> lang;
    for (const auto& nt : g.nonterminals) lang[nt];

    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& r : g.rules) {
            std::set<Word> partial{Word{}};
            for (const auto& sym : r.rhs) {
                std::set<Word> next;
                if (sym.kind == SymbolKind::Terminal) {
                    for (const auto& p : partial) {
                        if (static_cast<int>(p.size()) + 1 > max_len) continue;
                        Word w = p;
                        w.push_back(sym.name);
                        next.insert(std::move(w));
                    }
                } else {
                    for (const auto& p : partial)
                        for (const auto& w : lang[sym.name]) {
                            if (static_cast<int>(p.size() + w.size()) > max_len)
                                continue;
                            Word pw = p;
                            pw.insert(pw.end(), w.begin(), w.end());
                            next.insert(std::move(pw));
                        }
                }
                partial = std::move(next);
                if (partial.empty()) break;
            }
            auto& dst = lang[r.lhs];
            for (const auto& w : partial) {
                if (static_cast<int>(w.size()) > max_len) continue;
                if (dst.insert(w).second) {
                    changed = true;
                    if (dst.size() > max_words)
                        throw ResourceLimitError(
                            "language enumeration exceeded the word cap",
                            static_cast<long>(max_words));
                }
            }
        }
    }

    const auto& words = lang[g.start];
    std::vector<Word> out(words.begin(), words.end());
    std::sort(out.begin(), out.end(), [](const Word& a, const Word& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

}  // namespace fsapprox::oracle
