#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "fsapprox/errors.hpp"

namespace fsapprox {

inline constexpr long default_subset_cap = 1'000'000;

/// Nondeterministic finite automaton with epsilon transitions. The
/// alphabet is sorted and unique; transition labels are indices into it.
/// Target lists are kept sorted so construction order never leaks into
/// the result.
struct Nfa {
    std::vector<std::string> alphabet;
    int start = 0;
    std::set<int> finals;
    std::vector<std::map<int, std::vector<int>>> trans;
    std::vector<std::vector<int>> eps;

    bool operator==(const Nfa&) const = default;

    int add_state() {
        trans.emplace_back();
        eps.emplace_back();
        return static_cast<int>(trans.size()) - 1;
    }

    int num_states() const { return static_cast<int>(trans.size()); }

    int label_index(std::string_view name) const {
        auto it = std::lower_bound(alphabet.begin(), alphabet.end(), name);
        if (it == alphabet.end() || *it != name) return -1;
        return static_cast<int>(it - alphabet.begin());
    }

    void add_transition(int src, int label, int dst) {
        auto& v = trans[src][label];
        auto it = std::lower_bound(v.begin(), v.end(), dst);
        if (it == v.end() || *it != dst) v.insert(it, dst);
    }

    void add_eps(int src, int dst) {
        if (src == dst) return;
        auto& v = eps[src];
        auto it = std::lower_bound(v.begin(), v.end(), dst);
        if (it == v.end() || *it != dst) v.insert(it, dst);
    }

    long num_transitions() const {
        long n = 0;
        for (const auto& m : trans)
            for (const auto& [label, ts] : m) n += static_cast<long>(ts.size());
        for (const auto& e : eps) n += static_cast<long>(e.size());
        return n;
    }
};

/// Deterministic finite automaton with the same sorted-alphabet
/// convention. Transitions are partial: a missing entry is the implicit
/// dead state. Always has at least one state.
struct Dfa {
    std::vector<std::string> alphabet;
    int start = 0;
    std::set<int> finals;
    std::vector<std::map<int, int>> trans;

    bool operator==(const Dfa&) const = default;

    int num_states() const { return static_cast<int>(trans.size()); }

    int label_index(std::string_view name) const {
        auto it = std::lower_bound(alphabet.begin(), alphabet.end(), name);
        if (it == alphabet.end() || *it != name) return -1;
        return static_cast<int>(it - alphabet.begin());
    }

    int step(int state, int label) const {
        if (state < 0) return -1;
        auto it = trans[state].find(label);
        return it == trans[state].end() ? -1 : it->second;
    }

    long num_transitions() const {
        long n = 0;
        for (const auto& m : trans) n += static_cast<long>(m.size());
        return n;
    }
};

inline std::set<int> eps_closure(const Nfa& n, std::set<int> states) {
    std::vector<int> work(states.begin(), states.end());
    while (!work.empty()) {
        int s = work.back();
        work.pop_back();
        for (int t : n.eps[s])
            if (states.insert(t).second) work.push_back(t);
    }
    return states;
}

inline bool accepts(const Nfa& n, const std::vector<std::string>& word) {
    if (n.num_states() == 0) return false;
    std::set<int> cur = eps_closure(n, {n.start});
    for (const auto& tok : word) {
        int label = n.label_index(tok);
        if (label < 0) return false;
        std::set<int> next;
        for (int s : cur) {
            auto it = n.trans[s].find(label);
            if (it != n.trans[s].end())
                next.insert(it->second.begin(), it->second.end());
        }
        if (next.empty()) return false;
        cur = eps_closure(n, std::move(next));
    }
    return std::any_of(cur.begin(), cur.end(),
                       [&](int s) { return n.finals.count(s) != 0; });
}

inline bool accepts(const Dfa& d, const std::vector<std::string>& word) {
    int s = d.start;
    for (const auto& tok : word) {
        int label = d.label_index(tok);
        if (label < 0) return false;
        s = d.step(s, label);
        if (s < 0) return false;
    }
    return d.finals.count(s) != 0;
}

/// Subset construction. Throws ResourceLimitError when more than
/// `max_states` subsets appear.
inline Dfa determinize(const Nfa& n, long max_states = default_subset_cap) {
    Dfa d;
    d.alphabet = n.alphabet;
    if (n.num_states() == 0) {
        d.trans.emplace_back();
        return d;
    }
    std::map<std::vector<int>, int> index;
    std::vector<std::vector<int>> subsets;
    auto intern = [&](const std::set<int>& s) {
        std::vector<int> key(s.begin(), s.end());
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        if (static_cast<long>(subsets.size()) >= max_states)
            throw ResourceLimitError("determinization exceeded the state cap",
                                     max_states);
        int id = static_cast<int>(subsets.size());
        index.emplace(std::move(key), id);
        subsets.push_back({s.begin(), s.end()});
        d.trans.emplace_back();
        return id;
    };
    intern(eps_closure(n, {n.start}));
    for (int cur = 0; cur < static_cast<int>(subsets.size()); ++cur) {
        for (int label = 0; label < static_cast<int>(n.alphabet.size());
             ++label) {
            std::set<int> move;
            for (int s : subsets[cur]) {
                auto it = n.trans[s].find(label);
                if (it != n.trans[s].end())
                    move.insert(it->second.begin(), it->second.end());
            }
            if (move.empty()) continue;
            int dst = intern(eps_closure(n, std::move(move)));
            d.trans[cur][label] = dst;
        }
    }
    for (int i = 0; i < static_cast<int>(subsets.size()); ++i)
        for (int s : subsets[i])
            if (n.finals.count(s)) {
                d.finals.insert(i);
                break;
            }
    return d;
}

namespace detail {

inline Dfa canonical_empty(std::vector<std::string> alphabet) {
    Dfa d;
    d.alphabet = std::move(alphabet);
    d.trans.emplace_back();
    return d;
}

}  // namespace detail

/// Moore minimization of a partial DFA. The result is trimmed (only
/// states both reachable and co-reachable survive) and canonically
/// numbered by breadth-first search in label order, so equal languages
/// over equal alphabets yield identical Dfa values. The empty language
/// canonically becomes one non-final state with no transitions.
inline Dfa minimize(const Dfa& d) {
    int n = d.num_states();
    if (n == 0) return detail::canonical_empty(d.alphabet);
    std::vector<char> reach(n, 0);
    std::vector<int> work{d.start};
    reach[d.start] = 1;
    while (!work.empty()) {
        int s = work.back();
        work.pop_back();
        for (auto [label, t] : d.trans[s])
            if (!reach[t]) {
                reach[t] = 1;
                work.push_back(t);
            }
    }
    std::vector<std::vector<int>> rev(n);
    for (int s = 0; s < n; ++s)
        for (auto [label, t] : d.trans[s]) rev[t].push_back(s);
    std::vector<char> colive(n, 0);
    for (int f : d.finals)
        if (!colive[f]) {
            colive[f] = 1;
            work.push_back(f);
        }
    while (!work.empty()) {
        int s = work.back();
        work.pop_back();
        for (int p : rev[s])
            if (!colive[p]) {
                colive[p] = 1;
                work.push_back(p);
            }
    }
    std::vector<char> live(n);
    for (int i = 0; i < n; ++i) live[i] = reach[i] && colive[i];
    if (!live[d.start]) return detail::canonical_empty(d.alphabet);

    // Partition refinement; the implicit dead state absorbs transitions
    // into non-live states, which simply vanish from the signatures.
    std::vector<int> cls(n, -1);
    size_t count = 1;
    bool has_nonfinal = false;
    for (int i = 0; i < n; ++i)
        if (live[i]) {
            cls[i] = d.finals.count(i) ? 0 : 1;
            if (cls[i] == 1) has_nonfinal = true;
        }
    if (has_nonfinal) count = 2;
    for (;;) {
        std::map<std::vector<int>, int> sig_index;
        std::vector<int> next(n, -1);
        for (int i = 0; i < n; ++i) {
            if (!live[i]) continue;
            std::vector<int> sig{cls[i]};
            for (auto [label, t] : d.trans[i]) {
                if (!live[t]) continue;
                sig.push_back(label);
                sig.push_back(cls[t]);
            }
            auto [it, fresh] =
                sig_index.emplace(std::move(sig), static_cast<int>(sig_index.size()));
            next[i] = it->second;
        }
        size_t m = sig_index.size();
        cls = std::move(next);
        if (m == count) break;
        count = m;
    }

    int k = static_cast<int>(count);
    std::vector<int> rep(k, -1);
    for (int i = 0; i < n; ++i)
        if (live[i] && rep[cls[i]] < 0) rep[cls[i]] = i;
    std::vector<int> order(k, -1);
    std::vector<int> bfs{cls[d.start]};
    order[cls[d.start]] = 0;
    int assigned = 1;
    for (size_t qi = 0; qi < bfs.size(); ++qi) {
        for (auto [label, t] : d.trans[rep[bfs[qi]]]) {
            if (!live[t]) continue;
            int tc = cls[t];
            if (order[tc] < 0) {
                order[tc] = assigned++;
                bfs.push_back(tc);
            }
        }
    }

    Dfa out;
    out.alphabet = d.alphabet;
    out.trans.resize(k);
    for (int c = 0; c < k; ++c) {
        int s = rep[c];
        int id = order[c];
        if (d.finals.count(s)) out.finals.insert(id);
        for (auto [label, t] : d.trans[s])
            if (live[t]) out.trans[id][label] = order[cls[t]];
    }
    return out;
}

inline Nfa to_nfa(const Dfa& d) {
    Nfa n;
    n.alphabet = d.alphabet;
    n.start = d.start;
    n.finals = d.finals;
    for (int i = 0; i < d.num_states(); ++i) n.add_state();
    for (int s = 0; s < d.num_states(); ++s)
        for (auto [label, t] : d.trans[s]) n.trans[s][label] = {t};
    return n;
}

inline std::vector<std::string> merge_alphabets(
    const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::string> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                   std::back_inserter(out));
    return out;
}

/// A word in the symmetric difference of two languages. `in_first` tells
/// which automaton accepts it.
struct DifferenceWitness {
    std::vector<std::string> word;
    bool in_first = false;
};

namespace detail {

inline Dfa remap_alphabet(const Dfa& d, const std::vector<std::string>& alpha) {
    std::vector<int> to_new(d.alphabet.size());
    for (size_t i = 0; i < d.alphabet.size(); ++i) {
        auto it = std::lower_bound(alpha.begin(), alpha.end(), d.alphabet[i]);
        to_new[i] = static_cast<int>(it - alpha.begin());
    }
    Dfa out;
    out.alphabet = alpha;
    out.start = d.start;
    out.finals = d.finals;
    out.trans.resize(d.trans.size());
    for (size_t s = 0; s < d.trans.size(); ++s)
        for (auto [label, t] : d.trans[s]) out.trans[s][to_new[label]] = t;
    return out;
}

/// Breadth-first search of the product automaton over the union
/// alphabet, expanding labels in sorted order, so the first difference
/// found is the length-then-lexicographically least one. max_len < 0
/// searches the whole (finite) product. one_sided restricts the search
/// to words of L(a) \ L(b).
inline std::optional<DifferenceWitness> product_witness(const Dfa& a0,
                                                        const Dfa& b0,
                                                        long max_len,
                                                        bool one_sided) {
    auto alpha = merge_alphabets(a0.alphabet, b0.alphabet);
    Dfa a = remap_alphabet(a0, alpha);
    Dfa b = remap_alphabet(b0, alpha);
    struct Node {
        int pa, pb, parent, label;
        long depth;
    };
    std::map<std::pair<int, int>, int> seen;
    std::vector<Node> nodes;
    std::deque<int> queue;
    auto push = [&](int pa, int pb, int parent, int label, long depth) {
        if (pa < 0 && pb < 0) return;
        if (!seen.emplace(std::make_pair(pa, pb), static_cast<int>(nodes.size()))
                 .second)
            return;
        nodes.push_back({pa, pb, parent, label, depth});
        queue.push_back(static_cast<int>(nodes.size()) - 1);
    };
    push(a.start, b.start, -1, -1, 0);
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        Node nd = nodes[id];
        bool fa = nd.pa >= 0 && a.finals.count(nd.pa) != 0;
        bool fb = nd.pb >= 0 && b.finals.count(nd.pb) != 0;
        if (one_sided ? (fa && !fb) : (fa != fb)) {
            DifferenceWitness w;
            w.in_first = fa;
            for (int cur = id; nodes[cur].parent >= 0; cur = nodes[cur].parent)
                w.word.push_back(alpha[nodes[cur].label]);
            std::reverse(w.word.begin(), w.word.end());
            return w;
        }
        if (max_len >= 0 && nd.depth >= max_len) continue;
        for (int label = 0; label < static_cast<int>(alpha.size()); ++label)
            push(a.step(nd.pa, label), b.step(nd.pb, label), id, label,
                 nd.depth + 1);
    }
    return std::nullopt;
}

}  // namespace detail

/// Exact language equivalence via the product automaton.
inline bool equivalent(const Dfa& a, const Dfa& b) {
    return !detail::product_witness(a, b, -1, false).has_value();
}

/// Shortest witness separating the two languages among words of length
/// <= max_len, or nullopt when they agree on all such words.
inline std::optional<DifferenceWitness> bounded_equivalent(const Dfa& a,
                                                           const Dfa& b,
                                                           long max_len) {
    return detail::product_witness(a, b, max_len, false);
}

/// Shortest word of length <= max_len in L(a) \ L(b), if any.
inline std::optional<std::vector<std::string>> bounded_difference(
    const Dfa& a, const Dfa& b, long max_len) {
    auto hit = detail::product_witness(a, b, max_len, true);
    if (!hit) return std::nullopt;
    return std::move(hit->word);
}

/// All accepted words of length <= max_len in length-then-lexicographic
/// order. States that cannot finish a word within the remaining budget
/// are pruned. Throws ResourceLimitError beyond `max_words` results.
inline std::vector<std::vector<std::string>> enumerate_accepted(
    const Dfa& d, int max_len, size_t max_words = 1'000'000) {
    std::vector<std::vector<std::string>> out;
    if (max_len < 0) return out;
    int n = d.num_states();
    std::vector<std::vector<int>> rev(n);
    for (int s = 0; s < n; ++s)
        for (auto [label, t] : d.trans[s]) rev[t].push_back(s);
    std::vector<int> dist(n, -1);
    std::deque<int> bfs;
    for (int f : d.finals) {
        dist[f] = 0;
        bfs.push_back(f);
    }
    while (!bfs.empty()) {
        int s = bfs.front();
        bfs.pop_front();
        for (int p : rev[s])
            if (dist[p] < 0) {
                dist[p] = dist[s] + 1;
                bfs.push_back(p);
            }
    }
    if (dist[d.start] < 0 || dist[d.start] > max_len) return out;

    struct Node {
        int state, parent, label;
    };
    std::vector<Node> nodes{{d.start, -1, -1}};
    std::vector<int> frontier{0};
    auto emit = [&](int id) {
        std::vector<std::string> word;
        for (int cur = id; nodes[cur].parent >= 0; cur = nodes[cur].parent)
            word.push_back(d.alphabet[nodes[cur].label]);
        std::reverse(word.begin(), word.end());
        out.push_back(std::move(word));
        if (out.size() > max_words)
            throw ResourceLimitError("enumeration exceeded the word cap",
                                     static_cast<long>(max_words));
    };
    if (d.finals.count(d.start)) emit(0);
    for (int len = 1; len <= max_len && !frontier.empty(); ++len) {
        std::vector<int> next_frontier;
        for (int id : frontier) {
            for (auto [label, t] : d.trans[nodes[id].state]) {
                if (dist[t] < 0 || len + dist[t] > max_len) continue;
                nodes.push_back({t, id, label});
                int nid = static_cast<int>(nodes.size()) - 1;
                next_frontier.push_back(nid);
                if (d.finals.count(t)) emit(nid);
            }
        }
        frontier = std::move(next_frontier);
    }
    return out;
}

/// The trie automaton accepting exactly the given words. The alphabet is
/// the sorted union of the word tokens and `extra_alphabet`.
inline Dfa dfa_from_strings(const std::vector<std::vector<std::string>>& words,
                            const std::vector<std::string>& extra_alphabet = {}) {
    std::set<std::string> alpha(extra_alphabet.begin(), extra_alphabet.end());
    for (const auto& w : words) alpha.insert(w.begin(), w.end());
    Dfa d;
    d.alphabet.assign(alpha.begin(), alpha.end());
    d.trans.emplace_back();
    for (const auto& w : words) {
        int s = 0;
        for (const auto& tok : w) {
            int label = d.label_index(tok);
            int t = d.step(s, label);
            if (t < 0) {
                d.trans.emplace_back();
                t = d.num_states() - 1;
                d.trans[s][label] = t;
            }
            s = t;
        }
        d.finals.insert(s);
    }
    return d;
}

/// Renders the automaton in the plain text format:
///
///   fsa 1
///   alphabet a b
///   states 2
///   start 0
///   final 1
///   trans 0 a 0
///   trans 0 b 1
///
/// Transition lines are sorted by (source, label, target) with epsilon
/// written as "eps"; the output is byte-for-byte reproducible.
inline std::string format_fsa(const Nfa& n) {
    std::string out = "fsa 1\n";
    out += "alphabet";
    for (const auto& t : n.alphabet) {
        out += ' ';
        out += t;
    }
    out += "\nstates " + std::to_string(n.num_states());
    out += "\nstart " + std::to_string(n.start);
    out += "\nfinal";
    for (int f : n.finals) out += ' ' + std::to_string(f);
    out += '\n';
    std::vector<std::tuple<int, std::string, int>> lines;
    for (int s = 0; s < n.num_states(); ++s) {
        for (const auto& [label, ts] : n.trans[s])
            for (int t : ts) lines.emplace_back(s, n.alphabet[label], t);
        for (int t : n.eps[s]) lines.emplace_back(s, "eps", t);
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& [s, label, t] : lines)
        out += "trans " + std::to_string(s) + ' ' + label + ' ' +
               std::to_string(t) + '\n';
    return out;
}

inline std::string format_fsa(const Dfa& d) { return format_fsa(to_nfa(d)); }

/// Parses the plain text format produced by format_fsa.
inline Nfa parse_fsa(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    auto fields = [&]() {
        std::vector<std::string> out;
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) out.push_back(tok);
        return out;
    };
    auto fail = [&](const std::string& msg) -> void {
        throw ParseError(msg, lineno, 1);
    };
    auto parse_int = [&](const std::string& s, long lo, long hi) {
        size_t used = 0;
        long v = 0;
        try {
            v = std::stol(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || v < lo || v > hi)
            fail("expected a number in [" + std::to_string(lo) + ", " +
                 std::to_string(hi) + "], found '" + s + "'");
        return static_cast<int>(v);
    };

    Nfa n;
    if (!next_line() || fields() != std::vector<std::string>{"fsa", "1"})
        fail("expected 'fsa 1' header");

    if (!next_line()) fail("expected 'alphabet' line");
    auto f = fields();
    if (f.empty() || f[0] != "alphabet") fail("expected 'alphabet' line");
    for (size_t i = 1; i < f.size(); ++i) {
        if (f[i] == "eps") fail("'eps' cannot be an alphabet symbol");
        if (i > 1 && !(f[i - 1] < f[i]))
            fail("alphabet symbols must be sorted and unique");
        n.alphabet.push_back(f[i]);
    }

    if (!next_line()) fail("expected 'states' line");
    f = fields();
    if (f.size() != 2 || f[0] != "states") fail("expected 'states <count>'");
    int count = parse_int(f[1], 1, 100'000'000);
    for (int i = 0; i < count; ++i) n.add_state();

    if (!next_line()) fail("expected 'start' line");
    f = fields();
    if (f.size() != 2 || f[0] != "start") fail("expected 'start <state>'");
    n.start = parse_int(f[1], 0, count - 1);

    if (!next_line()) fail("expected 'final' line");
    f = fields();
    if (f.empty() || f[0] != "final") fail("expected 'final' line");
    for (size_t i = 1; i < f.size(); ++i) {
        int v = parse_int(f[i], 0, count - 1);
        if (i > 1 && v <= parse_int(f[i - 1], 0, count - 1))
            fail("final states must be sorted and unique");
        n.finals.insert(v);
    }

    while (next_line()) {
        f = fields();
        if (f.size() != 4 || f[0] != "trans")
            fail("expected 'trans <src> <label> <dst>'");
        int src = parse_int(f[1], 0, count - 1);
        int dst = parse_int(f[3], 0, count - 1);
        if (f[2] == "eps") {
            n.add_eps(src, dst);
        } else {
            int label = n.label_index(f[2]);
            if (label < 0) fail("label '" + f[2] + "' is not in the alphabet");
            n.add_transition(src, label, dst);
        }
    }
    return n;
}

/// Graphviz rendering; state order and edge order match format_fsa.
inline std::string to_dot(const Nfa& n) {
    std::string out = "digraph fsa {\n  rankdir=LR;\n  node [shape=circle];\n";
    out += "  __start [shape=point];\n";
    for (int f : n.finals)
        out += "  s" + std::to_string(f) + " [shape=doublecircle];\n";
    out += "  __start -> s" + std::to_string(n.start) + ";\n";
    std::vector<std::tuple<int, std::string, int, bool>> lines;
    for (int s = 0; s < n.num_states(); ++s) {
        for (const auto& [label, ts] : n.trans[s])
            for (int t : ts) lines.emplace_back(s, n.alphabet[label], t, false);
        for (int t : n.eps[s]) lines.emplace_back(s, "eps", t, true);
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& [s, label, t, is_eps] : lines)
        out += "  s" + std::to_string(s) + " -> s" + std::to_string(t) +
               " [label=\"" + (is_eps ? "\xce\xb5" : label) + "\"];\n";
    out += "}\n";
    return out;
}

inline std::string to_dot(const Dfa& d) { return to_dot(to_nfa(d)); }

}  // namespace fsapprox
