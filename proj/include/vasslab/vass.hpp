#pragma once

// Core value types for vector addition systems with states and counter
// automata: configurations, transitions, firing, run replay, flatness and
// size accounting.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace vasslab {

using Counter = std::int64_t;
using CounterVector = std::vector<Counter>;
using StateId = std::uint32_t;
using TransitionId = std::size_t;

enum class EncodingKind { unary, binary };

/// Raised for malformed objects: dangling states, dimension mismatches,
/// duplicate names, bad literals.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class FireError {
    none,
    wrong_state,
    negative_counter,
    zero_test_failed,
    bound_exceeded,
    overflow,
};

inline const char* to_string(FireError e)
{
    switch (e) {
    case FireError::none: return "ok";
    case FireError::wrong_state: return "WrongState";
    case FireError::negative_counter: return "NegativeCounter";
    case FireError::zero_test_failed: return "ZeroTestFailed";
    case FireError::bound_exceeded: return "BoundExceeded";
    case FireError::overflow: return "Overflow";
    }
    return "?";
}

/// A step of a run could not be replayed. `step` is 1-based; 0 means the
/// start configuration itself was rejected.
class RunError : public std::runtime_error {
public:
    RunError(FireError kind, std::size_t step)
        : std::runtime_error(std::string(to_string(kind)) + " at step " + std::to_string(step)),
          kind_(kind), step_(step)
    {
    }

    [[nodiscard]] FireError kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    FireError kind_;
    std::size_t step_;
};

struct Configuration {
    StateId state = 0;
    CounterVector counters;

    friend bool operator==(const Configuration&, const Configuration&) = default;
    friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

struct Transition {
    StateId from = 0;
    CounterVector effect;
    StateId to = 0;

    friend bool operator==(const Transition&, const Transition&) = default;
};

/// Counter-automaton transition: a plain update, or a zero test on
/// `zero_test` (0-based) that must hold in the source configuration.
struct GuardedTransition {
    StateId from = 0;
    CounterVector effect;
    StateId to = 0;
    std::optional<std::size_t> zero_test;

    friend bool operator==(const GuardedTransition&, const GuardedTransition&) = default;
};

struct Run {
    Configuration start;
    std::vector<TransitionId> steps;

    friend bool operator==(const Run&, const Run&) = default;
};

struct RunResult {
    Configuration final;
    CounterVector effect;
};

namespace detail {

inline bool checked_add(Counter a, Counter b, Counter& out)
{
    return !__builtin_add_overflow(a, b, &out);
}

} // namespace detail

/// States plus a transition list over a fixed dimension. Shared by plain
/// VASSes and counter automata through the transition type.
template <typename TransitionT>
class basic_vass {
public:
    using transition_type = TransitionT;

    basic_vass() = default;
    basic_vass(std::string name, std::size_t dimension)
        : name_(std::move(name)), dimension_(dimension)
    {
        if (dimension_ == 0)
            throw ModelError("dimension must be at least 1");
    }

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::size_t state_count() const noexcept { return states_.size(); }
    [[nodiscard]] const std::vector<std::string>& states() const noexcept { return states_; }
    [[nodiscard]] const std::vector<TransitionT>& transitions() const noexcept { return transitions_; }
    [[nodiscard]] const TransitionT& transition(TransitionId t) const { return transitions_.at(t); }
    [[nodiscard]] const std::string& state_name(StateId s) const { return states_.at(s); }

    [[nodiscard]] std::optional<StateId> find_state(std::string_view name) const
    {
        auto it = index_.find(std::string(name));
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    [[nodiscard]] StateId state(std::string_view name) const
    {
        if (auto s = find_state(name))
            return *s;
        throw ModelError("unknown state '" + std::string(name) + "'");
    }

    StateId add_state(std::string name)
    {
        if (index_.contains(name))
            throw ModelError("duplicate state '" + name + "'");
        auto id = static_cast<StateId>(states_.size());
        index_.emplace(name, id);
        states_.push_back(std::move(name));
        outgoing_.emplace_back();
        return id;
    }

    TransitionId add_transition(TransitionT t)
    {
        if (t.from >= states_.size() || t.to >= states_.size())
            throw ModelError("transition refers to an undeclared state");
        if (t.effect.size() != dimension_)
            throw ModelError("transition effect has dimension " + std::to_string(t.effect.size()) +
                             ", expected " + std::to_string(dimension_));
        if constexpr (requires { t.zero_test; }) {
            if (t.zero_test && *t.zero_test >= dimension_)
                throw ModelError("zero-tested counter index out of range");
        }
        auto id = transitions_.size();
        outgoing_[t.from].push_back(id);
        transitions_.push_back(std::move(t));
        return id;
    }

    TransitionId add_transition(StateId from, CounterVector effect, StateId to)
    {
        TransitionT t;
        t.from = from;
        t.effect = std::move(effect);
        t.to = to;
        return add_transition(std::move(t));
    }

    /// Outgoing transition ids of `s`, in declaration order.
    [[nodiscard]] const std::vector<TransitionId>& outgoing(StateId s) const { return outgoing_.at(s); }

    void set_initial(StateId s) { initial_ = checked(s); }
    void set_final(StateId s) { final_ = checked(s); }
    [[nodiscard]] std::optional<StateId> initial() const noexcept { return initial_; }
    [[nodiscard]] std::optional<StateId> final_state() const noexcept { return final_; }

    [[nodiscard]] Configuration config(std::string_view state_name, CounterVector counters) const
    {
        if (counters.size() != dimension_)
            throw ModelError("configuration has wrong dimension");
        return Configuration{state(state_name), std::move(counters)};
    }

    [[nodiscard]] CounterVector zero() const { return CounterVector(dimension_, 0); }

private:
    StateId checked(StateId s) const
    {
        if (s >= states_.size())
            throw ModelError("undeclared state id");
        return s;
    }

    std::string name_;
    std::size_t dimension_ = 1;
    std::vector<std::string> states_;
    std::unordered_map<std::string, StateId> index_;
    std::vector<TransitionT> transitions_;
    std::vector<std::vector<TransitionId>> outgoing_;
    std::optional<StateId> initial_;
    std::optional<StateId> final_;
};

using Vass = basic_vass<Transition>;
using CounterAutomaton = basic_vass<GuardedTransition>;

/// Applies `effect` to `counters` in place; leaves them untouched on failure.
inline FireError apply_effect(CounterVector& counters, const CounterVector& effect)
{
    const auto n = counters.size();
    for (std::size_t i = 0; i < n; ++i) {
        Counter r;
        if (!detail::checked_add(counters[i], effect[i], r))
            return FireError::overflow;
        if (r < 0)
            return FireError::negative_counter;
    }
    for (std::size_t i = 0; i < n; ++i)
        counters[i] += effect[i];
    return FireError::none;
}

/// Fires `t` on `c` in place. On failure `c` is unchanged.
template <typename TransitionT>
FireError try_fire(const TransitionT& t, Configuration& c)
{
    if (c.state != t.from)
        return FireError::wrong_state;
    if constexpr (requires { t.zero_test; }) {
        if (t.zero_test && c.counters[*t.zero_test] != 0)
            return FireError::zero_test_failed;
    }
    if (auto e = apply_effect(c.counters, t.effect); e != FireError::none)
        return e;
    c.state = t.to;
    return FireError::none;
}

inline Configuration fire(const Vass& vass, Configuration config, const Transition& t)
{
    if (config.counters.size() != vass.dimension())
        throw ModelError("configuration has wrong dimension");
    if (auto e = try_fire(t, config); e != FireError::none)
        throw RunError(e, 1);
    return config;
}

inline Configuration fire(const Vass& vass, Configuration config, TransitionId t)
{
    return fire(vass, std::move(config), vass.transition(t));
}

inline void check_start(std::size_t dimension, const Configuration& c)
{
    if (c.counters.size() != dimension)
        throw ModelError("configuration has wrong dimension");
    for (auto v : c.counters)
        if (v < 0)
            throw RunError(FireError::negative_counter, 0);
}

/// Replays `run`, returning the final configuration and the summed effect.
/// Throws RunError carrying the 1-based index of the first failing step.
inline RunResult validate_run(const Vass& vass, const Run& run)
{
    check_start(vass.dimension(), run.start);
    Configuration c = run.start;
    CounterVector effect(vass.dimension(), 0);
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        if (run.steps[i] >= vass.transitions().size())
            throw ModelError("run step " + std::to_string(i + 1) + " names an unknown transition");
        const auto& t = vass.transition(run.steps[i]);
        if (auto e = try_fire(t, c); e != FireError::none)
            throw RunError(e, i + 1);
        for (std::size_t k = 0; k < effect.size(); ++k)
            effect[k] += t.effect[k];
    }
    return {std::move(c), std::move(effect)};
}

/// Replays a counter-automaton run enforcing nonnegativity, zero-test
/// guards and the strict sum bound (sum of counters < bound) at every
/// configuration, the start included.
inline Configuration ca_validate_run(const CounterAutomaton& a, const Run& run, Counter bound)
{
    check_start(a.dimension(), run.start);
    auto sum = [](const CounterVector& v) {
        Counter s = 0;
        for (auto x : v)
            s += x;
        return s;
    };
    Configuration c = run.start;
    if (sum(c.counters) >= bound)
        throw RunError(FireError::bound_exceeded, 0);
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        if (run.steps[i] >= a.transitions().size())
            throw ModelError("run step " + std::to_string(i + 1) + " names an unknown transition");
        if (auto e = try_fire(a.transition(run.steps[i]), c); e != FireError::none)
            throw RunError(e, i + 1);
        if (sum(c.counters) >= bound)
            throw RunError(FireError::bound_exceeded, i + 1);
    }
    return c;
}

/// True iff every state lies on at most one cycle of the transition graph.
/// Parallel transitions and self-loops count as distinct cycles, so this
/// holds exactly when every strongly connected component is either trivial
/// or a single simple cycle (as many internal transitions as states).
template <typename TransitionT>
bool is_flat(const basic_vass<TransitionT>& v)
{
    const auto n = v.state_count();
    std::vector<std::vector<StateId>> succ(n);
    for (const auto& t : v.transitions())
        succ[t.from].push_back(t.to);

    // Iterative Tarjan.
    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(n, unset), low(n, 0), comp(n, unset);
    std::vector<bool> on_stack(n, false);
    std::vector<StateId> stack;
    std::size_t next_index = 0, comps = 0;
    struct Frame {
        StateId v;
        std::size_t edge;
    };
    for (StateId root = 0; root < n; ++root) {
        if (index[root] != unset)
            continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& f = call.back();
            if (f.edge < succ[f.v].size()) {
                StateId w = succ[f.v][f.edge++];
                if (index[w] == unset) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            StateId v_done = f.v;
            call.pop_back();
            if (!call.empty())
                low[call.back().v] = std::min(low[call.back().v], low[v_done]);
            if (low[v_done] == index[v_done]) {
                StateId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = comps;
                } while (w != v_done);
                ++comps;
            }
        }
    }
    std::vector<std::size_t> vertices(comps, 0), edges(comps, 0);
    for (StateId s = 0; s < n; ++s)
        ++vertices[comp[s]];
    for (const auto& t : v.transitions())
        if (comp[t.from] == comp[t.to])
            ++edges[comp[t.from]];
    for (std::size_t k = 0; k < comps; ++k)
        if (edges[k] != 0 && edges[k] != vertices[k])
            return false;
    return true;
}

namespace detail {

inline std::size_t bit_length(Counter v)
{
    auto u = static_cast<std::uint64_t>(v < 0 ? -v : v);
    std::size_t bits = 0;
    while (u) {
        ++bits;
        u >>= 1;
    }
    return bits;
}

} // namespace detail

/// Size measure: one unit per state and per transition endpoint, plus per
/// effect entry 1+|e| (unary) or 1+bitlength(|e|) (binary).
template <typename TransitionT>
std::size_t encoded_size(const basic_vass<TransitionT>& v, EncodingKind kind)
{
    std::size_t size = v.state_count();
    for (const auto& t : v.transitions()) {
        size += 2;
        for (auto e : t.effect) {
            auto mag = static_cast<std::size_t>(e < 0 ? -e : e);
            size += 1 + (kind == EncodingKind::unary ? mag : detail::bit_length(e));
        }
    }
    return size;
}

/// Largest absolute transition entry; 0 for a VASS without transitions.
template <typename TransitionT>
Counter max_abs_entry(const basic_vass<TransitionT>& v)
{
    Counter m = 0;
    for (const auto& t : v.transitions())
        for (auto e : t.effect)
            m = std::max(m, e < 0 ? -e : e);
    return m;
}

/// Zero-pads every effect to `dimension` entries.
inline Vass pad_dimension(const Vass& v, std::size_t dimension)
{
    if (dimension < v.dimension())
        throw ModelError("cannot pad to a smaller dimension");
    Vass out(v.name(), dimension);
    for (const auto& s : v.states())
        out.add_state(s);
    for (const auto& t : v.transitions()) {
        auto e = t.effect;
        e.resize(dimension, 0);
        out.add_transition(t.from, std::move(e), t.to);
    }
    if (v.initial())
        out.set_initial(*v.initial());
    if (v.final_state())
        out.set_final(*v.final_state());
    return out;
}

} // namespace vasslab
