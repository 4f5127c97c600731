#pragma once

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fsapprox/errors.hpp"
#include "fsapprox/flatten.hpp"
#include "fsapprox/fsa.hpp"
#include "fsapprox/grammar.hpp"
#include "fsapprox/lr0.hpp"
#include "fsapprox/unfold.hpp"

namespace fsapprox {

/// One strongly connected component of the grammar's dependency graph
/// (an edge X -> Y for every Y on the right-hand side of a rule for X).
struct Component {
    int id = 0;
    std::vector<std::string> members;          // sorted
    std::vector<int> rules;                    // indices into g.rules, in order
    std::vector<std::string> pseudoterminals;  // rhs nonterminals outside members
};

/// Tarjan's algorithm over the dependency graph. Components come out
/// dependencies-first (reverse topological order of the component DAG).
/// Root visiting order and successor order are sorted by name, so the
/// result is reproducible.
inline std::vector<Component> components(const Grammar& g) {
    std::vector<std::string> nodes(g.nonterminals.begin(), g.nonterminals.end());
    std::map<std::string, int> id;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) id[nodes[i]] = i;
    std::vector<std::set<int>> succ(nodes.size());
    for (const auto& r : g.rules) {
        int from = id.at(r.lhs);
        for (const auto& s : r.rhs)
            if (s.kind == SymbolKind::Nonterminal) succ[from].insert(id.at(s.name));
    }

    int n = static_cast<int>(nodes.size());
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    int counter = 0;
    std::vector<std::vector<int>> sccs;
    auto strongconnect = [&](auto&& self, int v) -> void {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = 1;
        for (int w : succ[v]) {
            if (index[w] < 0) {
                self(self, w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<int> scc;
            for (;;) {
                int w = stack.back();
                stack.pop_back();
                on_stack[w] = 0;
                scc.push_back(w);
                if (w == v) break;
            }
            sccs.push_back(std::move(scc));
        }
    };
    for (int v = 0; v < n; ++v)
        if (index[v] < 0) strongconnect(strongconnect, v);

    std::vector<Component> out;
    std::map<std::string, int> member_of;
    for (const auto& scc : sccs) {
        Component c;
        c.id = static_cast<int>(out.size());
        for (int v : scc) c.members.push_back(nodes[v]);
        std::sort(c.members.begin(), c.members.end());
        for (const auto& m : c.members) member_of[m] = c.id;
        out.push_back(std::move(c));
    }
    for (int i = 0; i < static_cast<int>(g.rules.size()); ++i) {
        const Rule& r = g.rules[i];
        Component& c = out[member_of.at(r.lhs)];
        c.rules.push_back(i);
        for (const auto& s : r.rhs)
            if (s.kind == SymbolKind::Nonterminal &&
                member_of.at(s.name) != c.id) {
                auto& v = c.pseudoterminals;
                auto it = std::lower_bound(v.begin(), v.end(), s.name);
                if (it == v.end() || *it != s.name) v.insert(it, s.name);
            }
    }
    return out;
}

/// The defining subgrammar def(x): start x, nonterminals = the
/// component's members, rules = the component's rules, with nonterminals
/// from other components (pseudoterminals) demoted to terminals.
inline Grammar defining_subgrammar(const Grammar& g, const Component& c,
                                   const std::string& x) {
    Grammar out;
    out.start = x;
    out.terminals = g.terminals;
    out.terminals.insert(c.pseudoterminals.begin(), c.pseudoterminals.end());
    out.nonterminals.insert(c.members.begin(), c.members.end());
    for (int i : c.rules) {
        Rule r = g.rules[i];
        for (auto& s : r.rhs)
            if (s.kind == SymbolKind::Nonterminal &&
                !out.nonterminals.count(s.name))
                s.kind = SymbolKind::Terminal;
        out.rules.push_back(std::move(r));
    }
    return out;
}

enum class Linearity { left_linear, right_linear, neither };

/// Classifies a grammar whose rules have at most the regular-language
/// shapes: right_linear when every rule's single nonterminal (if any) is
/// rightmost, left_linear when leftmost, neither otherwise. A grammar
/// with no nonterminal on any right-hand side is both; right_linear is
/// reported so that the unfolding exemption applies.
inline Linearity classify_linearity(const Grammar& g) {
    bool left_ok = true, right_ok = true;
    for (const auto& r : g.rules) {
        int nts = 0;
        for (const auto& s : r.rhs)
            if (s.kind == SymbolKind::Nonterminal) ++nts;
        if (nts == 0) continue;
        if (nts > 1) {
            left_ok = right_ok = false;
            break;
        }
        if (r.rhs.front().kind != SymbolKind::Nonterminal) left_ok = false;
        if (r.rhs.back().kind != SymbolKind::Nonterminal) right_ok = false;
    }
    if (right_ok) return Linearity::right_linear;
    if (left_ok) return Linearity::left_linear;
    return Linearity::neither;
}

struct ApproxOptions {
    bool unfold = true;
    long max_unfolded_states = default_stack_cap;
    long max_subset_states = default_subset_cap;
};

/// A minimized DFA approximating one defining subgrammar; its alphabet
/// may contain pseudoterminals to be spliced away by recombine.
struct SubAutomaton {
    std::string owner;
    Dfa fsa;
};

struct ComponentInfo {
    long lr0_states = 0;
    long unfolded_states = 0;
    bool unfolded = false;  // nontrivial congruence actually computed
    Linearity linearity = Linearity::neither;
};

/// Approximates one defining subgrammar: characteristic machine, stack
/// unfolding (skipped for right-linear grammars, where it provably adds
/// nothing), flattening, determinization, minimization.
inline SubAutomaton approximate_component(const Grammar& sub,
                                          const ApproxOptions& opt = {},
                                          ComponentInfo* info = nullptr) {
    CharacteristicMachine m = build_machine(sub);
    Linearity lin = classify_linearity(sub);
    bool do_unfold = opt.unfold && lin != Linearity::right_linear;
    UnfoldedMachine u;
    if (do_unfold) {
        try {
            u = unfold(m, opt.max_unfolded_states);
        } catch (const ResourceLimitError& e) {
            throw ResourceLimitError("unfolding '" + sub.start +
                                         "': " + e.what(),
                                     e.limit);
        }
    } else {
        u = unfold_trivial(m);
    }
    if (info) {
        info->lr0_states = m.num_states();
        info->unfolded_states = u.num_states();
        info->unfolded = do_unfold;
        info->linearity = lin;
    }
    Nfa flat = flatten(u);
    return {sub.start, minimize(determinize(flat, opt.max_subset_states))};
}

/// Splices subautomata together: every pseudoterminal-labeled transition
/// of the root automaton is replaced by a fresh copy of that
/// pseudoterminal's automaton, connected with epsilon transitions, and
/// so on recursively. `sigma` is the set of real terminals; the result
/// is an NFA over sigma only. Terminates because the component DAG is
/// acyclic.
inline Nfa recombine(const std::map<std::string, SubAutomaton>& subs,
                     const std::string& root,
                     const std::set<std::string>& sigma) {
    std::map<std::string, Nfa> memo;
    auto splice = [](Nfa& host, const Nfa& child, int src, int dst) {
        int off = host.num_states();
        for (int i = 0; i < child.num_states(); ++i) host.add_state();
        for (int s = 0; s < child.num_states(); ++s) {
            for (const auto& [label, ts] : child.trans[s])
                for (int t : ts) host.add_transition(off + s, label, off + t);
            for (int t : child.eps[s]) host.add_eps(off + s, off + t);
        }
        host.add_eps(src, off + child.start);
        for (int f : child.finals) host.add_eps(off + f, dst);
    };
    auto build = [&](auto&& self, const std::string& name) -> const Nfa& {
        auto hit = memo.find(name);
        if (hit != memo.end()) return hit->second;
        auto sit = subs.find(name);
        if (sit == subs.end())
            throw Error("internal: no subautomaton for '" + name + "'");
        const Dfa& d = sit->second.fsa;
        Nfa out;
        out.alphabet.assign(sigma.begin(), sigma.end());
        for (int i = 0; i < d.num_states(); ++i) out.add_state();
        out.start = d.start;
        out.finals = d.finals;
        for (int s = 0; s < d.num_states(); ++s) {
            for (const auto& [label, t] : d.trans[s]) {
                const std::string& lab = d.alphabet[label];
                if (sigma.count(lab)) {
                    out.add_transition(s, out.label_index(lab), t);
                } else {
                    const Nfa& child = self(self, lab);
                    splice(out, child, s, t);
                }
            }
        }
        return memo.emplace(name, std::move(out)).first->second;
    };
    return build(build, root);
}

struct CompileOptions {
    bool decompose = true;
    bool unfold = true;
    bool minimize_final = true;
    long max_unfolded_states = default_stack_cap;
    long max_subset_states = default_subset_cap;
};

struct CompileStats {
    long pruned_nonterminals = 0;
    long pruned_rules = 0;
    long components = 0;
    long automata_built = 0;
    long components_unfolded = 0;
    long lr0_states = 0;       // summed over built machines
    long unfolded_states = 0;  // summed over built machines
    long nfa_states = 0;       // flattened (and recombined) NFA
    long nfa_transitions = 0;
    long dfa_states = 0;  // final result
    long dfa_transitions = 0;
    std::vector<std::pair<std::string, double>> stage_seconds;
    std::vector<std::string> warnings;
};

/// The whole pipeline: prune, decompose into strongly connected
/// components, approximate each needed defining subgrammar, recombine,
/// determinize, minimize. With decompose = false the decomposition and
/// recombination collapse into a single whole-grammar approximation.
/// With minimize_final = false the final minimization is skipped (the
/// per-component ones still run). An empty-language grammar compiles to
/// the one-state DFA with no finals.
inline Dfa compile(const Grammar& g, const CompileOptions& opt = {},
                   CompileStats* stats = nullptr) {
    using clock = std::chrono::steady_clock;
    auto mark = clock::now();
    auto record = [&](const char* stage) {
        auto now = clock::now();
        if (stats)
            stats->stage_seconds.emplace_back(
                stage, std::chrono::duration<double>(now - mark).count());
        mark = now;
    };

    std::vector<std::string> warnings;
    Grammar pg = prune(g, &warnings);
    if (stats) {
        stats->warnings = warnings;
        stats->pruned_nonterminals = static_cast<long>(pg.nonterminals.size());
        stats->pruned_rules = static_cast<long>(pg.rules.size());
    }
    record("prune");
    if (pg.rules.empty()) {
        if (stats) stats->dfa_states = 1;
        return detail::canonical_empty(
            {pg.terminals.begin(), pg.terminals.end()});
    }

    ApproxOptions aopt{opt.unfold, opt.max_unfolded_states,
                       opt.max_subset_states};
    Nfa combined;
    if (!opt.decompose) {
        CharacteristicMachine m = build_machine(pg);
        Linearity lin = classify_linearity(pg);
        bool do_unfold = opt.unfold && lin != Linearity::right_linear;
        UnfoldedMachine u;
        if (do_unfold) {
            try {
                u = unfold(m, opt.max_unfolded_states);
            } catch (const ResourceLimitError& e) {
                throw ResourceLimitError(
                    "unfolding '" + pg.start + "': " + e.what(), e.limit);
            }
        } else {
            u = unfold_trivial(m);
        }
        if (stats) {
            stats->components = 1;
            stats->automata_built = 1;
            stats->components_unfolded = do_unfold ? 1 : 0;
            stats->lr0_states = m.num_states();
            stats->unfolded_states = u.num_states();
        }
        record("approximate");
        combined = flatten(u);
        record("flatten");
    } else {
        std::vector<Component> comps = components(pg);
        if (stats) stats->components = static_cast<long>(comps.size());
        record("decompose");

        // Dependents first, so the needed set is complete before each
        // component's automata are built.
        std::set<std::string> needed{pg.start};
        std::map<std::string, SubAutomaton> subs;
        for (auto it = comps.rbegin(); it != comps.rend(); ++it) {
            const Component& c = *it;
            bool any = false;
            for (const auto& x : c.members) {
                if (!needed.count(x)) continue;
                any = true;
                ComponentInfo info;
                SubAutomaton aut = approximate_component(
                    defining_subgrammar(pg, c, x), aopt, &info);
                if (stats) {
                    ++stats->automata_built;
                    if (info.unfolded) ++stats->components_unfolded;
                    stats->lr0_states += info.lr0_states;
                    stats->unfolded_states += info.unfolded_states;
                }
                subs.emplace(x, std::move(aut));
            }
            if (any)
                needed.insert(c.pseudoterminals.begin(),
                              c.pseudoterminals.end());
        }
        record("approximate");
        combined = recombine(subs, pg.start, pg.terminals);
        record("recombine");
    }
    if (stats) {
        stats->nfa_states = combined.num_states();
        stats->nfa_transitions = combined.num_transitions();
    }

    Dfa d = determinize(combined, opt.max_subset_states);
    record("determinize");
    if (opt.minimize_final) {
        d = minimize(d);
        record("minimize");
    }
    if (stats) {
        stats->dfa_states = d.num_states();
        stats->dfa_transitions = d.num_transitions();
    }
    return d;
}

}  // namespace fsapprox
