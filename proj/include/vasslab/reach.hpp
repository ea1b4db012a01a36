#pragma once

// Bounded breadth-first exploration with witnesses.
//
// Configurations are packed into one arena (state followed by counters) and
// deduplicated by an open-addressing index. Each BFS level is expanded in
// parent order and transition declaration order; with several jobs the
// successors of a level are generated in parallel chunks and merged in the
// same order, so reports do not depend on the job count.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "vasslab/text.hpp"
#include "vasslab/vass.hpp"

namespace vasslab {

/// Finite bounds for exploration. Configurations exceeding a cap are pruned.
struct Caps {
    std::optional<CounterVector> per_counter;
    std::optional<Counter> sum;
    std::size_t node_budget = 10'000'000;

    [[nodiscard]] bool admits(const Counter* counters, std::size_t d) const
    {
        if (per_counter)
            for (std::size_t i = 0; i < d; ++i)
                if (counters[i] > (*per_counter)[i])
                    return false;
        if (sum) {
            Counter s = 0;
            for (std::size_t i = 0; i < d; ++i)
                s += counters[i];
            if (s > *sum)
                return false;
        }
        return true;
    }
};

struct ReachReport {
    std::size_t explored = 0;
    bool exhausted = false;
    std::vector<Configuration> hits;
    std::vector<Run> witnesses;  // aligned with hits when requested
};

struct ExploreOptions {
    std::optional<ConfigPattern> target;  // absent: every configuration is a hit
    bool witnesses = false;
    bool stop_at_first = false;
    unsigned jobs = 1;
};

namespace detail {

inline std::uint64_t mix(std::uint64_t h, std::uint64_t v)
{
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h * 0xff51afd7ed558ccdULL;
}

/// Generic level-synchronous BFS over fixed-width integer nodes.
class Explorer {
public:
    Explorer(std::size_t width, std::size_t budget) : width_(width), budget_(budget) { table_.assign(1024, 0); }

    [[nodiscard]] std::size_t size() const noexcept { return parent_.size(); }
    [[nodiscard]] const Counter* node(std::size_t i) const { return arena_.data() + i * width_; }
    [[nodiscard]] std::size_t parent(std::size_t i) const { return parent_[i]; }
    [[nodiscard]] std::size_t label(std::size_t i) const { return label_[i]; }

    static constexpr std::size_t none = static_cast<std::size_t>(-1);

    [[nodiscard]] bool contains(const Counter* n) const
    {
        std::size_t mask = table_.size() - 1;
        for (std::size_t i = hash(n) & mask;; i = (i + 1) & mask) {
            auto slot = table_[i];
            if (slot == 0)
                return false;
            if (std::equal(n, n + width_, node(slot - 1)))
                return true;
        }
    }

    /// Inserts a node; returns its index if new.
    std::optional<std::size_t> insert(const Counter* n, std::size_t parent, std::size_t label)
    {
        if ((size() + 1) * 2 > table_.size())
            grow();
        auto h = hash(n);
        std::size_t mask = table_.size() - 1;
        for (std::size_t i = h & mask;; i = (i + 1) & mask) {
            auto slot = table_[i];
            if (slot == 0) {
                auto id = size();
                table_[i] = static_cast<std::uint32_t>(id + 1);
                arena_.insert(arena_.end(), n, n + width_);
                parent_.push_back(parent);
                label_.push_back(label);
                return id;
            }
            if (std::equal(n, n + width_, node(slot - 1)))
                return std::nullopt;
        }
    }

    /// Runs BFS from the nodes already inserted. `succ(node, out)` appends
    /// (label, successor) pairs; `on_new(id)` returns true to stop early.
    template <typename Succ, typename OnNew>
    bool run(Succ&& succ, OnNew&& on_new, unsigned jobs)
    {
        std::size_t lo = 0;
        while (lo < size()) {
            std::size_t hi = size();
            if (jobs <= 1 || hi - lo < 64) {
                std::vector<std::pair<std::size_t, std::vector<Counter>>> out;
                for (std::size_t p = lo; p < hi; ++p) {
                    out.clear();
                    succ(node(p), out);
                    for (auto& [lab, n] : out) {
                        if (size() >= budget_ && !contains(n.data()))
                            return false;
                        if (auto id = insert(n.data(), p, lab); id && on_new(*id))
                            return true;
                    }
                }
            } else {
                std::size_t chunks = jobs;
                std::size_t per = (hi - lo + chunks - 1) / chunks;
                struct Item {
                    std::size_t parent, label;
                    std::vector<Counter> n;
                };
                std::vector<std::vector<Item>> results(chunks);
                std::vector<std::thread> pool;
                for (std::size_t k = 0; k < chunks; ++k) {
                    std::size_t a = lo + k * per, b = std::min(hi, a + per);
                    if (a >= b)
                        continue;
                    pool.emplace_back([&, k, a, b] {
                        std::vector<std::pair<std::size_t, std::vector<Counter>>> out;
                        for (std::size_t p = a; p < b; ++p) {
                            out.clear();
                            succ(node(p), out);
                            for (auto& [lab, n] : out)
                                results[k].push_back({p, lab, std::move(n)});
                        }
                    });
                }
                for (auto& t : pool)
                    t.join();
                for (auto& chunk : results)
                    for (auto& it : chunk) {
                        if (size() >= budget_ && !contains(it.n.data()))
                            return false;
                        if (auto id = insert(it.n.data(), it.parent, it.label); id && on_new(*id))
                            return true;
                    }
            }
            lo = hi;
        }
        return true;
    }

    /// Labels along the parent chain, root first.
    [[nodiscard]] std::vector<std::size_t> path(std::size_t id) const
    {
        std::vector<std::size_t> out;
        while (parent_[id] != none) {
            out.push_back(label_[id]);
            id = parent_[id];
        }
        std::reverse(out.begin(), out.end());
        return out;
    }

private:
    std::uint64_t hash(const Counter* n) const
    {
        std::uint64_t h = 0x243f6a8885a308d3ULL;
        for (std::size_t i = 0; i < width_; ++i)
            h = mix(h, static_cast<std::uint64_t>(n[i]));
        return h ^ (h >> 29);
    }

    void grow()
    {
        std::vector<std::uint32_t> t(table_.size() * 2, 0);
        std::size_t mask = t.size() - 1;
        for (std::size_t id = 0; id < size(); ++id) {
            std::size_t i = hash(node(id)) & mask;
            while (t[i] != 0)
                i = (i + 1) & mask;
            t[i] = static_cast<std::uint32_t>(id + 1);
        }
        table_ = std::move(t);
    }

    std::size_t width_;
    std::size_t budget_;
    std::vector<Counter> arena_;
    std::vector<std::size_t> parent_, label_;
    std::vector<std::uint32_t> table_;
};

inline Configuration unpack(const Counter* n, std::size_t d)
{
    return Configuration{static_cast<StateId>(n[0]), CounterVector(n + 1, n + 1 + d)};
}

inline void check_caps(const Caps& caps, std::size_t d)
{
    if (!caps.per_counter && !caps.sum)
        throw std::invalid_argument("exploration needs a per-counter cap or a sum cap");
    if (caps.per_counter && caps.per_counter->size() != d)
        throw std::invalid_argument("per-counter caps have the wrong dimension");
    if (caps.node_budget < 1)
        throw std::invalid_argument("node budget must be at least 1");
}

} // namespace detail

/// Capped breadth-first closure of {src}.
inline ReachReport explore(const Vass& v, const Configuration& src, const Caps& caps, const ExploreOptions& opt = {})
{
    const std::size_t d = v.dimension();
    detail::check_caps(caps, d);
    check_start(d, src);
    if (src.state >= v.state_count())
        throw ModelError("source state is undeclared");
    if (!caps.admits(src.counters.data(), d))
        throw std::invalid_argument("source configuration exceeds the caps");

    detail::Explorer ex(d + 1, caps.node_budget);
    std::vector<Counter> root{static_cast<Counter>(src.state)};
    root.insert(root.end(), src.counters.begin(), src.counters.end());
    ex.insert(root.data(), detail::Explorer::none, 0);

    ReachReport rep;
    std::vector<std::size_t> hit_ids;
    auto on_new = [&](std::size_t id) {
        auto c = detail::unpack(ex.node(id), d);
        if (!opt.target || opt.target->matches(c)) {
            hit_ids.push_back(id);
            return opt.stop_at_first;
        }
        return false;
    };
    auto succ = [&](const Counter* n, std::vector<std::pair<std::size_t, std::vector<Counter>>>& out) {
        auto state = static_cast<StateId>(n[0]);
        for (auto tid : v.outgoing(state)) {
            const auto& t = v.transition(tid);
            std::vector<Counter> next(d + 1);
            next[0] = t.to;
            bool ok = true;
            for (std::size_t i = 0; i < d && ok; ++i) {
                Counter r;
                if (__builtin_add_overflow(n[i + 1], t.effect[i], &r) || r < 0)
                    ok = false;
                next[i + 1] = r;
            }
            if (ok && caps.admits(next.data() + 1, d))
                out.emplace_back(tid, std::move(next));
        }
    };
    bool finished = on_new(0) ? true : ex.run(succ, on_new, opt.jobs);
    bool stopped_early = opt.stop_at_first && !hit_ids.empty();
    rep.exhausted = finished && !stopped_early;
    rep.explored = ex.size();

    std::vector<std::pair<Configuration, std::size_t>> hits;
    for (auto id : hit_ids)
        hits.emplace_back(detail::unpack(ex.node(id), d), id);
    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [c, id] : hits) {
        rep.hits.push_back(c);
        if (opt.witnesses)
            rep.witnesses.push_back(Run{src, ex.path(id)});
    }
    return rep;
}

struct FindResult {
    std::optional<Run> run;
    bool exhausted = false;
    std::size_t explored = 0;
};

/// A run from src to trg inside the caps, if one exists there.
inline FindResult find_run(const Vass& v, const Configuration& src, const Configuration& trg, const Caps& caps,
                           unsigned jobs = 1)
{
    if (!caps.admits(trg.counters.data(), std::min(trg.counters.size(), v.dimension())))
        throw std::invalid_argument("target configuration exceeds the caps");
    ExploreOptions opt;
    opt.target = ConfigPattern::exactly(trg);
    opt.witnesses = true;
    opt.stop_at_first = true;
    opt.jobs = jobs;
    auto rep = explore(v, src, caps, opt);
    FindResult out;
    out.explored = rep.explored;
    out.exhausted = rep.exhausted || !rep.hits.empty();
    if (!rep.witnesses.empty())
        out.run = rep.witnesses.front();
    return out;
}

/// Oracle for counter automata: a run from initial(0^d) to accepting(0^d)
/// keeping every configuration's counter sum strictly below `bound` and
/// firing at most `max_tests` zero tests. Caps may narrow the search.
inline FindResult ca_accepting_run_search(const CounterAutomaton& a, Counter bound, std::size_t max_tests,
                                          const Caps& caps = {std::nullopt, std::nullopt, 10'000'000})
{
    if (!a.initial() || !a.final_state())
        throw ModelError("counter automaton needs initial and accepting states");
    const std::size_t d = a.dimension();
    FindResult out;
    if (bound <= 0)
        return out;  // even the all-zero start violates the bound
    detail::Explorer ex(d + 2, caps.node_budget);
    std::vector<Counter> root(d + 2, 0);
    root[0] = *a.initial();
    ex.insert(root.data(), detail::Explorer::none, 0);
    const StateId acc = *a.final_state();
    std::optional<std::size_t> found;
    auto is_target = [&](const Counter* n) {
        if (static_cast<StateId>(n[0]) != acc)
            return false;
        for (std::size_t i = 0; i < d; ++i)
            if (n[i + 1] != 0)
                return false;
        return true;
    };
    auto on_new = [&](std::size_t id) {
        if (is_target(ex.node(id))) {
            found = id;
            return true;
        }
        return false;
    };
    auto succ = [&](const Counter* n, std::vector<std::pair<std::size_t, std::vector<Counter>>>& outv) {
        for (auto tid : a.outgoing(static_cast<StateId>(n[0]))) {
            const auto& t = a.transition(tid);
            Counter tests = n[d + 1];
            if (t.zero_test) {
                if (n[*t.zero_test + 1] != 0 || static_cast<std::size_t>(tests) >= max_tests)
                    continue;
                ++tests;
            }
            std::vector<Counter> next(d + 2);
            next[0] = t.to;
            Counter sum = 0;
            bool ok = true;
            for (std::size_t i = 0; i < d && ok; ++i) {
                Counter r = n[i + 1] + t.effect[i];
                if (r < 0)
                    ok = false;
                next[i + 1] = r;
                sum += r;
            }
            next[d + 1] = tests;
            if (ok && sum < bound && caps.admits(next.data() + 1, d))
                outv.emplace_back(tid, std::move(next));
        }
    };
    bool finished = on_new(0) ? true : ex.run(succ, on_new, 1);
    out.explored = ex.size();
    out.exhausted = finished;
    if (found)
        out.run = Run{Configuration{*a.initial(), CounterVector(d, 0)}, ex.path(*found)};
    return out;
}

} // namespace vasslab
