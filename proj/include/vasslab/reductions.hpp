#pragma once

// Generators for the hardness constructions and the counter-automaton
// translations. Program-based constructions are written as counter programs,
// expanded, stripped of markers and compiled; the translations build their
// VASS directly around the automaton's control graph.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vasslab/compile.hpp"
#include "vasslab/expand.hpp"
#include "vasslab/gadgets.hpp"
#include "vasslab/print.hpp"
#include "vasslab/text.hpp"

namespace vasslab {

/// A generated VASS with its endpoint contract.
struct Construction {
    std::string id;
    std::vector<std::pair<std::string, std::string>> params;
    std::optional<ast::Program> program;  // surface program with markers
    CoreProgram core;                     // ground program after marker elimination
    Compiled compiled;                    // VASS, entry/exit, lowering
    EncodingKind encoding = EncodingKind::unary;
    Configuration source;
    ConfigPattern target;

    [[nodiscard]] const Vass& vass() const { return compiled.vass; }

    [[nodiscard]] Manifest manifest() const
    {
        const auto& v = vass();
        Manifest m{{"construction", id}};
        for (const auto& [k, val] : params)
            m.emplace_back("param." + k, val);
        m.emplace_back("encoding", encoding == EncodingKind::unary ? "unary" : "binary");
        m.emplace_back("init", v.state_name(*v.initial()));
        m.emplace_back("final", v.state_name(*v.final_state()));
        m.emplace_back("source", format_config(v, source));
        m.emplace_back("target", format_pattern(target));
        return m;
    }

    [[nodiscard]] std::string format_pattern(const ConfigPattern& p) const
    {
        std::string out = p.state ? vass().state_name(*p.state) : "*";
        out += '(';
        for (std::size_t i = 0; i < p.counters.size(); ++i) {
            if (i)
                out += ',';
            out += p.counters[i] ? std::to_string(*p.counters[i]) : "*";
        }
        return out + ')';
    }
};

namespace detail {

inline Counter mul_checked(Counter a, Counter b)
{
    Counter r;
    if (__builtin_mul_overflow(a, b, &r))
        throw std::overflow_error("value overflows a 64-bit counter");
    return r;
}

inline Counter pow_checked(Counter base, Counter exp)
{
    Counter r = 1;
    for (Counter i = 0; i < exp; ++i)
        r = mul_checked(r, base);
    return r;
}

inline std::vector<std::optional<Counter>> exact(const CounterVector& v)
{
    return {v.begin(), v.end()};
}

inline Construction finish(std::string id, std::vector<std::pair<std::string, std::string>> params,
                           ast::Program program, CoreProgram core, EncodingKind enc)
{
    Construction c;
    c.id = std::move(id);
    c.params = std::move(params);
    c.program = std::move(program);
    c.core = std::move(core);
    c.compiled = compile(c.core);
    c.encoding = enc;
    c.source = Configuration{c.compiled.entry, c.compiled.vass.zero()};
    c.target.state = c.compiled.exit;
    return c;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Subset sum

struct SubsetSumInstance {
    Counter s0 = 0;
    std::vector<Counter> values;
};

/// Bit width: at least 2, and enough bits for every value.
inline Counter subset_sum_width(const SubsetSumInstance& inst)
{
    std::size_t k = std::max<std::size_t>(2, detail::bit_length(inst.s0));
    for (auto v : inst.values)
        k = std::max(k, detail::bit_length(v));
    return static_cast<Counter>(k);
}

/// The four-counter program over (x, y, z, c): the generator for s0 followed
/// by a choice between subtracting s_i and skipping it, for each i. x and y
/// are zero-tested through the controlling counter c.
inline ast::Program subset_sum_program(const SubsetSumInstance& inst)
{
    if (inst.values.empty())
        throw ProgramError("subset sum needs at least one value");
    if (inst.s0 < 0 || std::any_of(inst.values.begin(), inst.values.end(), [](Counter v) { return v < 0; }))
        throw ProgramError("subset sum values must be natural numbers");
    const Counter k = subset_sum_width(inst);
    auto ctrl = ast::ctrl("c");
    auto bar = [&](Counter value, int sign) {
        auto bit = [&](Counter j) { return (value >> j) & 1; };
        ast::Block b{ast::update({{"x", bit(k - 1)}})};
        for (Counter j = k - 2; j >= 0; --j) {
            b.push_back(ast::loop({ast::update({{"x", -1}, {"y", 1}})}));
            b.push_back(ast::zero_test("x", ctrl));
            b.push_back(ast::loop({ast::update({{"x", 2}, {"y", -1}})}));
            b.push_back(ast::zero_test("y", ctrl));
            b.push_back(ast::update({{"x", bit(j)}}));
        }
        ast::Stmt drain = sign == 0 ? ast::update({{"x", -1}}) : ast::update({{"x", -1}, {"z", sign}});
        b.push_back(ast::loop({drain}));
        b.push_back(ast::zero_test("x", ctrl));
        return b;
    };
    ast::Program p{"subset_sum", {}, {"x", "y", "z", "c"}, bar(inst.s0, 1)};
    for (auto v : inst.values)
        p.body.push_back(ast::choice(bar(v, -1), bar(v, 0)));
    return p;
}

inline Construction subset_sum_to_vass(const SubsetSumInstance& inst)
{
    auto p = subset_sum_program(inst);
    auto core = instrument_ctrl(expand(p), CtrlSpec{"c", {"x", "y"}});
    std::string vals;
    for (auto v : inst.values)
        vals += (vals.empty() ? "" : ",") + std::to_string(v);
    auto c = detail::finish("subset-sum", {{"s0", std::to_string(inst.s0)}, {"values", vals}}, std::move(p),
                            std::move(core), EncodingKind::unary);
    c.target = ConfigPattern::exactly(Configuration{c.compiled.exit, c.vass().zero()});
    return c;
}

// ---------------------------------------------------------------------------
// Five-counter pump

struct PumpParams {
    Counter s = 1;
    Counter n = 1;
};

inline void check_pump(const PumpParams& p)
{
    if (p.s < 1 || p.n < 1)
        throw std::invalid_argument("pump parameters s and n must be at least 1");
}

/// x1 += 4s, x2 += 16s^2; then n times multiply x1 by 2 and x2 by 4 through
/// x3, all tests by the controlling counter x5. x4 is unused.
inline ast::Program pspace_program()
{
    using namespace ast;
    auto strategy = ast::ctrl("x5");
    Block body = emit_multiply("x1", "x3", 2, strategy);
    auto second = emit_multiply("x2", "x3", 4, strategy);
    body.insert(body.end(), second.begin(), second.end());
    return Program{"pspace",
                   {"s", "n"},
                   {"x1", "x2", "x3", "x4", "x5"},
                   {
                       ast::update({add("x1", lit(4) * var("s")), add("x2", lit(16) * var("s") * var("s"))}),
                       for_loop("i", lit(1), var("n"), std::move(body)),
                   }};
}

inline Construction pspace_pump(const PumpParams& p)
{
    check_pump(p);
    auto prog = pspace_program();
    auto core = instrument_ctrl(expand(prog, {{"s", p.s}, {"n", p.n}}), CtrlSpec{"x5", {"x1", "x2", "x3"}});
    auto c = detail::finish("pspace", {{"s", std::to_string(p.s)}, {"n", std::to_string(p.n)}}, std::move(prog),
                            std::move(core), EncodingKind::unary);
    try {
        Counter x1 = detail::mul_checked(4 * p.s, detail::pow_checked(2, p.n));
        Counter x2 = detail::mul_checked(16 * p.s * p.s, detail::pow_checked(4, p.n));
        c.target.counters = detail::exact({x1, x2, 0, 0, 0});
    } catch (const std::overflow_error&) {
        c.target.counters.assign(5, std::nullopt);
        c.target.counters[4] = 0;
    }
    return c;
}

/// Disjoint union of two VASSes, both zero-padded to `dimension`, joined by
/// one zero transition from v1's final state to v2's initial state.
inline Vass sequential_compose(const Vass& v1, const Vass& v2, std::size_t dimension)
{
    if (!v1.initial() || !v1.final_state() || !v2.initial() || !v2.final_state())
        throw ModelError("composition needs distinguished states on both sides");
    auto a = pad_dimension(v1, dimension);
    auto b = pad_dimension(v2, dimension);
    Vass out(v1.name() + "+" + v2.name(), dimension);
    for (const auto& s : a.states())
        out.add_state("1." + s);
    for (const auto& s : b.states())
        out.add_state("2." + s);
    auto shift = static_cast<StateId>(a.state_count());
    for (const auto& t : a.transitions())
        out.add_transition(t.from, t.effect, t.to);
    for (const auto& t : b.transitions())
        out.add_transition(t.from + shift, t.effect, t.to + shift);
    out.add_transition(*a.final_state(), out.zero(), *b.initial() + shift);
    out.set_initial(*a.initial());
    out.set_final(*b.final_state() + shift);
    return out;
}

// ---------------------------------------------------------------------------
// Six-counter pump

/// (x4, x5, x6) = (B, 8*2^n+2, (8*2^n+2)*B) for a guessed B; then x1 += 6s,
/// x2 += 36s^2 and a loop of multiplications by 4 and 16, with one final
/// test on x4. All tests use the triple (x4, x5, x6) over {x1, x2, x3};
/// family updates are paired with complement updates on x4.
inline ast::Program expspace_program(Counter n)
{
    using namespace ast;
    if (n < 0 || n > 58)
        throw std::invalid_argument("expspace parameter n out of range");
    const Counter budget = 8 * (Counter{1} << n) + 2;
    auto strategy = ast::triple("x4", "x5", "x6", {"x1", "x2", "x3"});
    Block main = emit_multiply("x1", "x3", 4, strategy);
    auto second = emit_multiply("x2", "x3", 16, strategy);
    main.insert(main.end(), second.begin(), second.end());
    Block body{
        ast::update({{"x5", budget}}),
        loop({ast::update({{"x4", 1}, {"x6", budget}})}, "guess"),
        ast::update({add("x1", lit(6) * var("s")), add("x2", lit(36) * var("s") * var("s"))}),
        loop(std::move(main), "main"),
    };
    maintain_complement(body, {"x1", "x2", "x3"}, "x4");
    body.push_back(zero_test("x4", strategy));
    return Program{"expspace", {"s"}, {"x1", "x2", "x3", "x4", "x5", "x6"}, std::move(body)};
}

inline Construction expspace_pump(const PumpParams& p)
{
    check_pump(p);
    auto prog = expspace_program(p.n);
    auto core = eliminate_markers(expand(prog, {{"s", p.s}}));
    auto c = detail::finish("expspace", {{"s", std::to_string(p.s)}, {"n", std::to_string(p.n)}}, std::move(prog),
                            std::move(core), EncodingKind::binary);
    c.target.counters.assign(6, std::nullopt);
    c.target.counters[5] = 0;
    try {
        Counter e = detail::pow_checked(2, p.n);
        Counter x1 = detail::mul_checked(6 * p.s, detail::pow_checked(4, e));
        Counter x2 = detail::mul_checked(36 * p.s * p.s, detail::pow_checked(16, e));
        c.target.counters = detail::exact({x1, x2, 0, 0, 0, 0});
    } catch (const std::overflow_error&) {
    }
    return c;
}

/// Guessed bound B of the six-counter pump's honest run.
inline Counter expspace_bound(const PumpParams& p)
{
    Counter e = detail::pow_checked(2, p.n);
    Counter x1 = detail::mul_checked(6 * p.s, detail::pow_checked(4, e));
    Counter x2 = detail::mul_checked(36 * p.s * p.s, detail::pow_checked(16, e));
    Counter b;
    if (__builtin_add_overflow(x1, x2, &b))
        throw std::overflow_error("value overflows a 64-bit counter");
    return b;
}

// ---------------------------------------------------------------------------
// Tower

struct TowerParams {
    Counter n = 1;
    Counter seed = 8;
};

/// Tower(0) = 1, Tower(k+1) = 2^Tower(k).
inline Counter tower(Counter k)
{
    Counter t = 1;
    for (Counter i = 0; i < k; ++i) {
        if (t >= 63)
            throw std::overflow_error("tower value overflows a 64-bit counter");
        t = Counter{1} << t;
    }
    return t;
}

/// x1 += seed and a guessed x2 with x3 = seed * x2; then n rounds of
/// amplifier, controlled tests on x1..x4, transfers x5..x7 -> x1..x3 and
/// controlled tests on x5..x7. x8 is the controlling counter.
inline ast::Program tower_program(const TowerParams& p)
{
    using namespace ast;
    if (p.n < 1)
        throw std::invalid_argument("tower parameter n must be at least 1");
    if (p.seed < 1 || (p.seed != 1 && p.seed % 8 != 0))
        throw std::invalid_argument("tower seed must be 1 or a positive multiple of 8");
    auto ctrl = ast::ctrl("x8");
    Block round = build_amplifier();
    for (const char* x : {"x1", "x2", "x3", "x4"})
        round.push_back(zero_test(x, ctrl));
    round.push_back(loop({ast::update({{"x5", -1}, {"x1", 1}})}));
    round.push_back(loop({ast::update({{"x6", -1}, {"x2", 1}})}));
    round.push_back(loop({ast::update({{"x7", -1}, {"x3", 1}})}));
    for (const char* x : {"x5", "x6", "x7"})
        round.push_back(zero_test(x, ctrl));
    return Program{"tower",
                   {"n", "seed"},
                   {"x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"},
                   {
                       ast::update({add("x1", var("seed"))}),
                       loop({ast::update({add("x2", lit(1)), add("x3", var("seed"))})}, "seed"),
                       for_loop("i", lit(1), var("n"), std::move(round)),
                   }};
}

inline Construction tower_pump(const TowerParams& p)
{
    auto prog = tower_program(p);
    auto core = eliminate_markers(expand(prog, {{"n", p.n}, {"seed", p.seed}}));
    auto c = detail::finish("tower", {{"n", std::to_string(p.n)}, {"seed", std::to_string(p.seed)}},
                            std::move(prog), std::move(core), EncodingKind::unary);
    c.target.counters.assign(8, std::nullopt);
    for (std::size_t i = 3; i < 8; ++i)
        c.target.counters[i] = 0;
    return c;
}

/// The amplifier alone over x1..x7, entered at q_in(B, C, BC, 0^4).
inline Construction amplifier()
{
    ast::Program prog{"amplifier", {}, {"x1", "x2", "x3", "x4", "x5", "x6", "x7"}, build_amplifier()};
    auto core = eliminate_markers(expand(prog));
    auto c = detail::finish("amplifier", {}, std::move(prog), std::move(core), EncodingKind::unary);
    c.target.counters.assign(7, std::nullopt);
    for (std::size_t i = 0; i < 4; ++i)
        c.target.counters[i] = 0;
    return c;
}

// ---------------------------------------------------------------------------
// Counter automata

namespace detail {

inline std::string automaton_counter_name(std::size_t i) { return "a" + std::to_string(i + 1); }

/// Copies the automaton's states into `v` and returns nothing; state ids
/// coincide.
inline void copy_states(const CounterAutomaton& a, Vass& v)
{
    for (const auto& s : a.states())
        v.add_state(s);
}

inline std::vector<std::size_t> automaton_family(std::size_t offset, std::size_t d)
{
    std::vector<std::size_t> f;
    for (std::size_t i = 0; i < d; ++i)
        f.push_back(offset + i);
    return f;
}

} // namespace detail

/// Counter layout (b, c, d, x1..xd). Plain transitions act on the x's with
/// the complement kept in b; increments of the sum pass through b - (a+1)
/// then b + 1 so the automaton's strict bound is respected. A zero test on
/// xk runs the triple test chain, then the transition's effect. The final
/// state pads the run to exactly C tests with artificial tests.
inline Construction ca_to_vass_triple(const CounterAutomaton& a, Counter B, Counter C)
{
    if (!a.initial() || !a.final_state())
        throw ModelError("counter automaton needs initial and accepting states");
    if (B < 1 || C < 0)
        throw std::invalid_argument("triple translation needs B >= 1 and C >= 0");
    const std::size_t d = a.dimension();
    const std::size_t b = 0, c = 1, dd = 2;
    const auto family = detail::automaton_family(3, d);
    Construction out;
    out.id = "ca-triple";
    out.params = {{"B", std::to_string(B)}, {"C", std::to_string(C)}};
    out.compiled.vass = Vass(a.name() + ".triple", d + 3);
    auto& v = out.compiled.vass;
    detail::copy_states(a, v);

    auto plain = [&](StateId from, const CounterVector& eff, StateId to, const std::string& prefix) {
        CounterVector e(d + 3, 0);
        Counter net = 0;
        for (std::size_t i = 0; i < d; ++i) {
            e[3 + i] = eff[i];
            net += eff[i];
        }
        if (net > 0) {
            e[b] = -(net + 1);
            StateId mid = v.add_state(prefix + "guard");
            v.add_transition(from, e, mid);
            CounterVector back(d + 3, 0);
            back[b] = 1;
            v.add_transition(mid, back, to);
        } else {
            e[b] = -net;
            v.add_transition(from, e, to);
        }
    };
    for (TransitionId id = 0; id < a.transitions().size(); ++id) {
        const auto& t = a.transition(id);
        std::string prefix = "t" + std::to_string(id) + "/";
        if (!t.zero_test) {
            plain(t.from, t.effect, t.to, prefix);
            continue;
        }
        StateId start = v.add_state(prefix + "test");
        v.add_transition(t.from, v.zero(), start);
        auto f = compile_fragment(v, start, triple_test(3 + *t.zero_test, b, c, dd, family), prefix);
        plain(f.exit, t.effect, t.to, prefix + "eff.");
    }
    StateId hub = v.add_state("final");
    v.add_transition(*a.final_state(), v.zero(), hub);
    auto pad = compile_fragment(v, hub, triple_test(family.front(), b, c, dd, family), "final/");
    v.add_transition(pad.exit, v.zero(), hub);
    v.set_initial(*a.initial());
    v.set_final(hub);
    out.compiled.entry = *a.initial();
    out.compiled.exit = hub;
    CounterVector src(d + 3, 0);
    src[b] = B;
    src[c] = detail::mul_checked(2, C);
    src[dd] = detail::mul_checked(detail::mul_checked(2, B), C);
    out.source = Configuration{*a.initial(), src};
    CounterVector trg(d + 3, 0);
    trg[b] = B;
    out.target = ConfigPattern::exactly(Configuration{hub, trg});
    return out;
}

/// Counter layout (b, c, x1..xd). Plain transitions act on the x's with the
/// complement kept in b; zero tests run the pair test chain then the
/// effect; the accepting state leads through the drain epilogue to q_F.
inline Construction ca_to_vass_pair(const CounterAutomaton& a, Counter B)
{
    if (!a.initial() || !a.final_state())
        throw ModelError("counter automaton needs initial and accepting states");
    if (B < 1)
        throw std::invalid_argument("pair translation needs B >= 1");
    const std::size_t d = a.dimension();
    const std::size_t b = 0, c = 1;
    const auto family = detail::automaton_family(2, d);
    Construction out;
    out.id = "ca-pair";
    out.params = {{"B", std::to_string(B)}};
    out.compiled.vass = Vass(a.name() + ".pair", d + 2);
    auto& v = out.compiled.vass;
    detail::copy_states(a, v);

    auto plain = [&](StateId from, const CounterVector& eff, StateId to) {
        CounterVector e(d + 2, 0);
        Counter net = 0;
        for (std::size_t i = 0; i < d; ++i) {
            e[2 + i] = eff[i];
            net += eff[i];
        }
        e[b] = -net;
        v.add_transition(from, e, to);
    };
    for (TransitionId id = 0; id < a.transitions().size(); ++id) {
        const auto& t = a.transition(id);
        if (!t.zero_test) {
            plain(t.from, t.effect, t.to);
            continue;
        }
        std::string prefix = "t" + std::to_string(id) + "/";
        StateId start = v.add_state(prefix + "test");
        v.add_transition(t.from, v.zero(), start);
        auto f = compile_fragment(v, start, pair_test(2 + *t.zero_test, b, c, family), prefix);
        plain(f.exit, t.effect, t.to);
    }
    StateId drain = v.add_state("drain");
    v.add_transition(*a.final_state(), v.zero(), drain);
    auto f = compile_fragment(v, drain, {pair_epilogue(b, c, family)}, "drain/");
    v.set_initial(*a.initial());
    v.set_final(f.exit);
    out.compiled.entry = *a.initial();
    out.compiled.exit = f.exit;
    CounterVector src(d + 2, 0);
    src[b] = detail::mul_checked(2, B);
    src[c] = detail::mul_checked(detail::mul_checked(4, B), B);
    out.source = Configuration{*a.initial(), src};
    out.target = ConfigPattern::exactly(Configuration{f.exit, CounterVector(d + 2, 0)});
    return out;
}

/// 2 * s * d * B^(d-1): enough quadratic-pair capacity for every accepting
/// run without repeated configurations.
inline Counter zero_test_budget(Counter s, Counter d, Counter B)
{
    if (s < 1 || d < 1 || B < 1)
        throw std::invalid_argument("zero_test_budget needs s, d, B >= 1");
    Counter r = detail::mul_checked(detail::mul_checked(2, s), d);
    for (Counter i = 1; i < d; ++i)
        r = detail::mul_checked(r, B);
    return r;
}

} // namespace vasslab
