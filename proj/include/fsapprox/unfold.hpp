#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <set>
#include <vector>

#include "fsapprox/errors.hpp"
#include "fsapprox/lr0.hpp"

namespace fsapprox {

inline constexpr long default_stack_cap = 100'000;

/// One frame of a recognizer stack: the state the recognizer was in and
/// the symbol it shifted to leave it. The state on top of the stack is
/// kept separately, so a configuration is a pair (state, stack).
struct StackEntry {
    int state;
    Symbol symbol;

    auto operator<=>(const StackEntry&) const = default;
};

using Stack = std::vector<StackEntry>;

/// Collapses loops in a stack that ends at state `arrival`. Scanning
/// left to right, the first position whose state already occurred closes
/// a loop; the loop is cut and the scan restarts, until all entry states
/// are pairwise distinct and none equals `arrival`. This is the
/// canonical-form map of the stack congruence: two stacks are congruent
/// iff they collapse to the same canonical stack.
inline Stack collapse(Stack entries, int arrival) {
    for (;;) {
        std::map<int, int> pos;
        int cut_from = -1, cut_to = -1;
        int m = static_cast<int>(entries.size());
        for (int j = 0; j <= m && cut_from < 0; ++j) {
            int state = j < m ? entries[j].state : arrival;
            auto hit = pos.find(state);
            if (hit != pos.end()) {
                cut_from = hit->second;
                cut_to = j;
            } else {
                pos.emplace(state, j);
            }
        }
        if (cut_from < 0) return entries;
        // Drop entries [cut_from, cut_to): the chain stays valid because
        // the entry at cut_to (or the arrival) carries the same state as
        // the entry at cut_from did.
        entries.erase(entries.begin() + cut_from, entries.begin() + cut_to);
    }
}

/// Validating form of collapse for stacks expressed over a concrete
/// machine: checks that the entries chain from the start state through
/// delta before collapsing. Throws Error on an unchained stack.
inline Stack collapse(const CharacteristicMachine& m, const Stack& entries) {
    int state = m.start_state;
    for (const StackEntry& e : entries) {
        if (e.state != state)
            throw Error("stack is not chained from the start state");
        state = m.step(e.state, e.symbol);
        if (state < 0)
            throw Error("stack entry has no transition in the machine");
    }
    return collapse(entries, state);
}

/// Computes, for every machine state, the set of canonical stacks with
/// which the shift-reduce recognizer can reach it: the least fixpoint of
/// extend-then-collapse starting from the empty stack at the start
/// state. Extending a canonical stack into a state it already passes
/// through just cuts the new loop back to an already-recorded prefix, so
/// this equals the guarded enumeration that skips such extensions.
/// Throws ResourceLimitError when the total number of stacks exceeds
/// `cap`.
inline std::vector<std::set<Stack>> enumerate_stacks(
    const CharacteristicMachine& m, long cap = default_stack_cap) {
    std::vector<std::set<Stack>> stacks(m.num_states());
    long total = 1;
    stacks[m.start_state].insert(Stack{});
    std::vector<std::pair<int, Stack>> work{{m.start_state, {}}};
    while (!work.empty()) {
        auto [s, sigma] = std::move(work.back());
        work.pop_back();
        for (const auto& [sym, t] : m.delta[s]) {
            Stack ext = sigma;
            ext.push_back({s, sym});
            Stack canon = collapse(std::move(ext), t);
            if (stacks[t].insert(canon).second) {
                if (++total > cap)
                    throw ResourceLimitError(
                        "stack enumeration exceeded the stack cap", cap);
                work.emplace_back(t, std::move(canon));
            }
        }
    }
    return stacks;
}

/// A state of the unfolded recognizer: a machine state paired with one
/// canonical stack class.
struct UnfoldedState {
    int base;
    Stack stack;

    auto operator<=>(const UnfoldedState&) const = default;
};

/// The unfolded recognizer: the characteristic machine with each state
/// split by stack congruence class. Transitions go
/// (s, sigma) --X--> (delta(s, X), collapse(sigma.(s, X))), and the
/// enumerated stack sets are closed under this, so every target exists.
struct UnfoldedMachine {
    CharacteristicMachine machine;
    std::vector<UnfoldedState> states;
    std::map<UnfoldedState, int> index;
    std::vector<std::map<Symbol, int>> delta;
    int start = 0;
    std::set<int> finals;

    int num_states() const { return static_cast<int>(states.size()); }

    int step(int state, const Symbol& sym) const {
        auto it = delta[state].find(sym);
        return it == delta[state].end() ? -1 : it->second;
    }

    int walk(int state, const std::vector<Symbol>& syms) const {
        for (const Symbol& s : syms) {
            if (state < 0) return -1;
            state = step(state, s);
        }
        return state;
    }

    const Lr0State& items(int state) const {
        return machine.states[states[state].base];
    }
};

namespace detail {

inline UnfoldedMachine index_unfolded(CharacteristicMachine m,
                                      std::vector<std::set<Stack>> stacks) {
    UnfoldedMachine u;
    u.machine = std::move(m);
    for (int s = 0; s < static_cast<int>(stacks.size()); ++s)
        for (const Stack& sigma : stacks[s])
            u.states.push_back({s, sigma});
    std::sort(u.states.begin(), u.states.end());
    for (int i = 0; i < u.num_states(); ++i) u.index.emplace(u.states[i], i);

    u.delta.resize(u.states.size());
    for (int i = 0; i < u.num_states(); ++i) {
        const auto& [s, sigma] = u.states[i];
        for (const auto& [sym, t] : u.machine.delta[s]) {
            Stack ext = sigma;
            ext.push_back({s, sym});
            u.delta[i][sym] = u.index.at({t, collapse(std::move(ext), t)});
        }
    }
    u.start = u.index.at({u.machine.start_state, {}});
    for (int i = 0; i < u.num_states(); ++i)
        if (u.machine.finals.count(u.states[i].base)) u.finals.insert(i);
    return u;
}

}  // namespace detail

/// Unfolds the machine by stack congruence.
inline UnfoldedMachine unfold(const CharacteristicMachine& m,
                              long cap = default_stack_cap) {
    return detail::index_unfolded(m, enumerate_stacks(m, cap));
}

/// The identity unfolding: one class per state (represented by the empty
/// stack), so the unfolded recognizer coincides with the machine itself.
/// Used when stack congruence is known to add nothing (right-linear
/// components) or when unfolding is disabled.
inline UnfoldedMachine unfold_trivial(const CharacteristicMachine& m) {
    UnfoldedMachine u;
    u.machine = m;
    for (int s = 0; s < m.num_states(); ++s) u.states.push_back({s, {}});
    for (int i = 0; i < u.num_states(); ++i) u.index.emplace(u.states[i], i);
    u.delta.resize(u.states.size());
    for (int s = 0; s < m.num_states(); ++s)
        for (const auto& [sym, t] : m.delta[s]) u.delta[s][sym] = t;
    u.start = m.start_state;
    u.finals = m.finals;
    return u;
}

}  // namespace fsapprox
