#pragma once

#include <algorithm>
#include <vector>

#include "fsapprox/fsa.hpp"
#include "fsapprox/unfold.hpp"

namespace fsapprox {

/// pop[p] is the set of unfolded states reachable from p by one reduce
/// move: p' is in pop[p] iff for some rule A -> alpha there is a state
/// p'' whose items predict A -> .alpha, reading alpha from p'' reaches p
/// (so p contains the completed item), and shifting A from p'' reaches
/// p'. Computed by forward walks, which sidesteps popping collapsed
/// stacks.
using PopTable = std::vector<std::vector<int>>;

inline PopTable pop_table(const UnfoldedMachine& u) {
    PopTable pop(u.num_states());
    const Grammar& g = u.machine.grammar;
    for (int src = 0; src < u.num_states(); ++src) {
        const Lr0State& items = u.items(src);
        for (int r = 0; r < static_cast<int>(g.rules.size()); ++r) {
            if (r == u.machine.augmented_rule) continue;
            if (!items.count({r, 0})) continue;
            int p = u.walk(src, g.rules[r].rhs);
            if (p < 0) continue;
            int target = u.step(src, nonterminal(g.rules[r].lhs));
            auto& v = pop[p];
            auto it = std::lower_bound(v.begin(), v.end(), target);
            if (it == v.end() || *it != target) v.insert(it, target);
        }
    }
    return pop;
}

/// Flattens the unfolded recognizer into an NFA over the terminals:
/// terminal shifts become labeled transitions, reduce moves become
/// epsilon transitions to their pop targets, and nonterminal shifts are
/// dropped. States, start, and finals carry over unchanged.
inline Nfa flatten(const UnfoldedMachine& u) {
    const Grammar& g = u.machine.grammar;
    Nfa out;
    out.alphabet.assign(g.terminals.begin(), g.terminals.end());
    for (int i = 0; i < u.num_states(); ++i) out.add_state();
    out.start = u.start;
    out.finals = u.finals;

    for (int p = 0; p < u.num_states(); ++p)
        for (const auto& [sym, t] : u.delta[p])
            if (sym.kind == SymbolKind::Terminal)
                out.add_transition(p, out.label_index(sym.name), t);

    PopTable pop = pop_table(u);
    for (int p = 0; p < u.num_states(); ++p)
        for (int target : pop[p]) out.add_eps(p, target);
    return out;
}

}  // namespace fsapprox
