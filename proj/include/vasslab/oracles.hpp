#pragma once

// Independent reference implementations used to cross-check the
// constructions. None of them goes through compile() or explore().

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include "vasslab/program.hpp"
#include "vasslab/vass.hpp"

namespace vasslab::oracle {

/// Does some sub-multiset of `values` sum to `target`? Plain 2^n enumeration.
inline bool subset_sum(Counter target, const std::vector<Counter>& values)
{
    const std::size_t n = values.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        Counter s = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1)
                s += values[i];
        if (s == target)
            return true;
    }
    return false;
}

/// Graph isomorphism by backtracking over state bijections. Transitions are
/// compared as multisets of (from, effect, to); distinguished states must
/// correspond when both sides have them.
template <class TransitionT>
bool isomorphic(const basic_vass<TransitionT>& a, const basic_vass<TransitionT>& b)
{
    const std::size_t n = a.state_count();
    if (n != b.state_count() || a.dimension() != b.dimension() || a.transitions().size() != b.transitions().size())
        return false;
    using Key = std::pair<CounterVector, std::pair<StateId, StateId>>;
    std::multiset<Key> target;
    for (const auto& t : b.transitions())
        target.insert({t.effect, {t.from, t.to}});
    std::vector<StateId> map(n, 0);
    std::vector<bool> used(n, false);
    std::function<bool(std::size_t)> go = [&](std::size_t k) {
        if (k == n) {
            if (a.initial() && b.initial() && map[*a.initial()] != *b.initial())
                return false;
            if (a.final_state() && b.final_state() && map[*a.final_state()] != *b.final_state())
                return false;
            std::multiset<Key> mapped;
            for (const auto& t : a.transitions())
                mapped.insert({t.effect, {map[t.from], map[t.to]}});
            return mapped == target;
        }
        for (StateId s = 0; s < n; ++s) {
            if (used[s])
                continue;
            used[s] = true;
            map[k] = s;
            if (go(k + 1))
                return true;
            used[s] = false;
        }
        return false;
    };
    return go(0);
}

/// Set semantics of a ground program with zero-test markers read as exact
/// tests. Valuations exceeding `cap` on any counter are dropped.
class MarkerInterpreter {
public:
    using Valuations = std::set<CounterVector>;

    MarkerInterpreter(Counter cap) : cap_(cap) {}

    Valuations run(const core::Block& block, Valuations in) const
    {
        for (const auto& s : block)
            in = step(s, std::move(in));
        return in;
    }

private:
    Valuations step(const core::Stmt& s, Valuations in) const
    {
        switch (s.kind) {
        case core::Stmt::Kind::update: {
            Valuations out;
            for (auto v : in) {
                bool ok = true;
                for (const auto& [c, a] : s.updates) {
                    v[c] += a;
                    ok = ok && v[c] >= 0 && v[c] <= cap_;
                }
                if (ok)
                    out.insert(std::move(v));
            }
            return out;
        }
        case core::Stmt::Kind::loop: {
            Valuations all = in, frontier = std::move(in);
            while (!frontier.empty()) {
                Valuations next;
                for (auto& v : run(s.body, frontier))
                    if (all.insert(v).second)
                        next.insert(v);
                frontier = std::move(next);
            }
            return all;
        }
        case core::Stmt::Kind::choice: {
            auto out = run(s.body, in);
            out.merge(run(s.alt, std::move(in)));
            return out;
        }
        case core::Stmt::Kind::zero_test: {
            Valuations out;
            for (auto& v : in)
                if (v[s.counter] == 0)
                    out.insert(v);
            return out;
        }
        case core::Stmt::Kind::pair_final: return in;
        }
        return in;
    }

    Counter cap_;
};

/// Depth-first enumeration of simple accepting runs of a counter automaton
/// with counter sum below `bound` and at most `max_tests` zero tests.
inline bool ca_accepts(const CounterAutomaton& a, Counter bound, std::size_t max_tests)
{
    if (!a.initial() || !a.final_state() || bound <= 0)
        return false;
    const std::size_t d = a.dimension();
    using Node = std::pair<StateId, std::pair<CounterVector, std::size_t>>;
    std::set<Node> on_path;
    std::function<bool(const Node&)> dfs = [&](const Node& n) {
        const auto& [q, rest] = n;
        const auto& [x, tests] = rest;
        if (q == *a.final_state() && std::all_of(x.begin(), x.end(), [](Counter v) { return v == 0; }))
            return true;
        on_path.insert(n);
        for (const auto& t : a.transitions()) {
            if (t.from != q)
                continue;
            std::size_t used = tests;
            if (t.zero_test) {
                if (x[*t.zero_test] != 0 || used == max_tests)
                    continue;
                ++used;
            }
            CounterVector y(d);
            bool ok = true;
            for (std::size_t i = 0; i < d; ++i) {
                y[i] = x[i] + t.effect[i];
                ok = ok && y[i] >= 0;
            }
            if (!ok || std::accumulate(y.begin(), y.end(), Counter{0}) >= bound)
                continue;
            Node m{t.to, {std::move(y), used}};
            if (!on_path.count(m) && dfs(m)) {
                on_path.erase(n);
                return true;
            }
        }
        on_path.erase(n);
        return false;
    };
    return dfs(Node{*a.initial(), {CounterVector(d, 0), 0}});
}

/// True iff every configuration reachable from initial(0^d) under exact
/// zero-test semantics has counter sum strictly below `bound`.
inline bool ca_bounded(const CounterAutomaton& a, Counter bound)
{
    if (!a.initial())
        return true;
    const std::size_t d = a.dimension();
    std::set<std::pair<StateId, CounterVector>> seen{{*a.initial(), CounterVector(d, 0)}};
    std::vector<std::pair<StateId, CounterVector>> stack(seen.begin(), seen.end());
    if (bound <= 0)
        return false;
    while (!stack.empty()) {
        auto [q, x] = stack.back();
        stack.pop_back();
        for (const auto& t : a.transitions()) {
            if (t.from != q || (t.zero_test && x[*t.zero_test] != 0))
                continue;
            CounterVector y(d);
            bool ok = true;
            for (std::size_t i = 0; i < d; ++i) {
                y[i] = x[i] + t.effect[i];
                ok = ok && y[i] >= 0;
            }
            if (!ok)
                continue;
            if (std::accumulate(y.begin(), y.end(), Counter{0}) >= bound)
                return false;
            if (seen.insert({t.to, y}).second)
                stack.emplace_back(t.to, std::move(y));
        }
    }
    return true;
}

} // namespace vasslab::oracle
