#pragma once

// Zero-test elimination and macro emitters.
//
// Three ways to remove zero-test markers from a ground program:
//   - controlling counter: every update (x, a) on a controlled counter gains
//     (ctrl, a * Z) where Z counts ctrl markers on x strictly later in
//     program order; a final ctrl value of 0 certifies every marked zero.
//   - multiplication triple (b, c, d): a test is a chain of flushes through
//     the family and b, each unit charged to d, then c -= 2.
//   - quadratic pair (b, c): the same chain charged to c, then b -= 1,
//     c += 1; a final epilogue drains b and c by artificial tests.

#include <set>
#include <string>
#include <vector>

#include "vasslab/program.hpp"

namespace vasslab {

struct TripleSpec {
    std::string b, c, d;
    std::vector<std::string> family;
};

struct PairSpec {
    std::string b, c;
    std::vector<std::string> family;
};

struct CtrlSpec {
    std::string ctrl;
    std::vector<std::string> controlled;
};

namespace detail {

inline void require_distinct(const std::vector<std::string>& names, const char* what)
{
    std::set<std::string> seen;
    for (const auto& n : names)
        if (!seen.insert(n).second)
            throw ProgramError(std::string(what) + ": counter '" + n + "' used twice");
}

} // namespace detail

/// loop { x -= 1, y += 1, z -= 1 }
inline ast::Stmt emit_flush(const std::string& x, const std::string& y, const std::string& z)
{
    detail::require_distinct({x, y, z}, "flush");
    return ast::loop({ast::update({{x, -1}, {y, 1}, {z, -1}})});
}

/// Flush x into y, test x, refill x by c per unit of y, test y. Both markers
/// carry `strategy`.
inline ast::Block emit_multiply(const std::string& x, const std::string& y, Counter c, const ast::Strategy& strategy = {})
{
    if (x == y)
        throw ProgramError("multiply: source and buffer must differ");
    if (c < 1)
        throw ProgramError("multiply: factor must be positive");
    return {
        ast::loop({ast::update({{x, -1}, {y, 1}})}),
        ast::zero_test(x, strategy),
        ast::loop({ast::update({{x, c}, {y, -1}})}),
        ast::zero_test(y, strategy),
    };
}

/// Adds (b, -net) to every update in `block` (recursively) whose entries on
/// `family` sum to a nonzero net, so that b + sum(family) stays constant.
inline void maintain_complement(ast::Block& block, const std::vector<std::string>& family, const std::string& b)
{
    std::set<std::string> fam(family.begin(), family.end());
    for (auto& s : block) {
        maintain_complement(s.body, family, b);
        maintain_complement(s.alt, family, b);
        if (s.kind != ast::Stmt::Kind::update)
            continue;
        Counter folded = 0;
        std::optional<ast::Expr> symbolic;
        for (const auto& e : s.updates) {
            if (!fam.contains(e.counter))
                continue;
            if (e.amount.op == ast::Expr::Op::lit) {
                folded += e.minus ? -e.amount.value : e.amount.value;
            } else if (!symbolic) {
                symbolic = e.minus ? -e.amount : e.amount;
            } else {
                symbolic = e.minus ? *symbolic - e.amount : *symbolic + e.amount;
            }
        }
        if (symbolic) {
            ast::Expr net = folded == 0 ? *symbolic : *symbolic + ast::lit(folded);
            s.updates.push_back(ast::sub(b, std::move(net)));
        } else if (folded != 0) {
            s.updates.push_back(folded > 0 ? ast::sub(b, ast::lit(folded)) : ast::add(b, ast::lit(-folded)));
        }
    }
}

/// Counters carrying ctrl(ctrl) markers, in counter order.
inline CtrlSpec ctrl_spec_for(const CoreProgram& cp, const std::string& ctrl)
{
    auto ci = cp.index_of(ctrl);
    std::set<std::size_t> marked;
    for_each_stmt(cp.body, [&](const core::Stmt& s, int) {
        if (s.kind == core::Stmt::Kind::zero_test && s.strategy.kind == StrategyKind::ctrl && s.strategy.ctrl == ci)
            marked.insert(s.counter);
    });
    CtrlSpec out{ctrl, {}};
    for (auto i : marked)
        out.controlled.push_back(cp.counters[i]);
    return out;
}

namespace detail {

class CtrlInstrumenter {
public:
    CtrlInstrumenter(const CoreProgram& cp, const CtrlSpec& spec, bool strip)
        : ctrl_(cp.index_of(spec.ctrl)), controlled_(cp.counters.size(), false), strip_(strip)
    {
        for (const auto& n : spec.controlled) {
            auto i = cp.index_of(n);
            if (i == ctrl_)
                throw ProgramError("controlling counter '" + n + "' cannot control itself");
            controlled_[i] = true;
        }
        names_ = cp.counters;
    }

    void walk(core::Block& block, std::vector<Counter>& remaining, bool in_loop)
    {
        for (std::size_t k = block.size(); k-- > 0;) {
            auto& s = block[k];
            switch (s.kind) {
            case core::Stmt::Kind::zero_test:
                if (s.strategy.kind != StrategyKind::ctrl || s.strategy.ctrl != ctrl_)
                    break;
                if (in_loop)
                    throw ProgramError("zero test on '" + names_[s.counter] + "' inside a loop");
                if (!controlled_[s.counter])
                    throw ProgramError("zero test on uncontrolled counter '" + names_[s.counter] + "'");
                ++remaining[s.counter];
                if (strip_)
                    block.erase(block.begin() + static_cast<std::ptrdiff_t>(k));
                break;
            case core::Stmt::Kind::update: {
                Counter delta = 0;
                for (const auto& [c, a] : s.updates) {
                    if (!controlled_[c])
                        continue;
                    Counter term;
                    if (__builtin_mul_overflow(a, remaining[c], &term) || __builtin_add_overflow(delta, term, &delta))
                        throw ProgramError("controlling-counter coefficient overflows");
                }
                if (delta != 0)
                    core::add_entry(s, ctrl_, delta);
                break;
            }
            case core::Stmt::Kind::loop: walk(s.body, remaining, true); break;
            case core::Stmt::Kind::choice: {
                auto left = remaining, right = remaining;
                walk(s.body, left, in_loop);
                walk(s.alt, right, in_loop);
                if (left != right)
                    throw ProgramError("the branches of a choice schedule different zero tests");
                remaining = std::move(left);
                break;
            }
            case core::Stmt::Kind::pair_final: break;
            }
        }
    }

private:
    std::size_t ctrl_;
    std::vector<bool> controlled_;
    bool strip_;
    std::vector<std::string> names_;
};

} // namespace detail

/// Controlling-counter instrumentation that keeps the ctrl markers in place
/// (for analyses that need to know where the tests were).
inline CoreProgram augment_ctrl(CoreProgram cp, const CtrlSpec& spec)
{
    detail::CtrlInstrumenter ins(cp, spec, false);
    std::vector<Counter> remaining(cp.counters.size(), 0);
    ins.walk(cp.body, remaining, false);
    return cp;
}

/// Controlling-counter instrumentation; removes every ctrl(spec.ctrl)
/// marker. Markers of other strategies are left untouched. All controlled
/// counters and ctrl must start at 0.
inline CoreProgram instrument_ctrl(CoreProgram cp, const CtrlSpec& spec)
{
    detail::CtrlInstrumenter ins(cp, spec, true);
    std::vector<Counter> remaining(cp.counters.size(), 0);
    ins.walk(cp.body, remaining, false);
    return cp;
}

/// The flush chain of one simulated test. The chain is the family rotated
/// so the tested counter comes first, then b; when b itself is tested it is
/// [b, family...]. Every transferred unit is charged to `budget`.
inline core::Block test_chain(std::size_t tested, std::size_t b, std::size_t budget, const std::vector<std::size_t>& family)
{
    std::vector<std::size_t> chain;
    if (tested == b) {
        chain.push_back(b);
        chain.insert(chain.end(), family.begin(), family.end());
    } else {
        auto it = std::find(family.begin(), family.end(), tested);
        if (it == family.end())
            throw ProgramError("tested counter is not in the family");
        chain.insert(chain.end(), it, family.end());
        chain.insert(chain.end(), family.begin(), it);
        chain.push_back(b);
    }
    auto flush = [&](std::size_t from, std::size_t to) {
        return core::loop({core::update({{from, -1}, {to, 1}, {budget, -1}})});
    };
    core::Block out;
    for (std::size_t j = 1; j < chain.size(); ++j)
        out.push_back(flush(chain[j], chain[j - 1]));
    for (std::size_t j = chain.size() - 1; j-- > 0;)
        out.push_back(flush(chain[j], chain[j + 1]));
    return out;
}

inline core::Block triple_test(std::size_t tested, std::size_t b, std::size_t c, std::size_t d,
                               const std::vector<std::size_t>& family)
{
    auto out = test_chain(tested, b, d, family);
    out.push_back(core::update({{c, -2}}));
    return out;
}

inline core::Block pair_test(std::size_t tested, std::size_t b, std::size_t c, const std::vector<std::size_t>& family)
{
    auto out = test_chain(tested, b, c, family);
    out.push_back(core::update({{b, -1}, {c, 1}}));
    return out;
}

/// An artificial test on family[0]: same net effect as pair_test, but the
/// c += 1 comes first so the step (1, 1) -> (0, 0) can fire.
inline core::Block artificial_pair_test(std::size_t b, std::size_t c, const std::vector<std::size_t>& family)
{
    core::Block out{core::update({{c, 1}})};
    auto chain = test_chain(family.front(), b, c, family);
    out.insert(out.end(), chain.begin(), chain.end());
    out.push_back(core::update({{b, -1}}));
    return out;
}

/// Artificial tests interleaved with uncompensated decrements of family
/// counters; drains (b, c) from (S, S^2) to (0, 0) when every earlier test
/// was honest.
inline core::Stmt pair_epilogue(std::size_t b, std::size_t c, const std::vector<std::size_t>& family)
{
    if (family.empty())
        throw ProgramError("pair family must be nonempty");
    std::vector<core::Block> options;
    options.push_back(artificial_pair_test(b, c, family));
    for (auto x : family)
        options.push_back({core::update({{x, -1}})});
    core::Block folded = options.back();
    for (std::size_t k = options.size() - 1; k-- > 0;)
        folded = {core::choice(options[k], folded)};
    return core::loop(std::move(folded), "epilogue");
}

namespace detail {

struct ResolvedFamily {
    std::size_t b, c, d;
    std::vector<std::size_t> family;
};

inline ResolvedFamily resolve(const CoreProgram& cp, const std::string& b, const std::string& c, const std::string& d,
                              const std::vector<std::string>& family, bool with_d)
{
    std::vector<std::string> all{b, c};
    if (with_d)
        all.push_back(d);
    all.insert(all.end(), family.begin(), family.end());
    require_distinct(all, "zero-test family");
    if (family.empty())
        throw ProgramError("zero-test family must be nonempty");
    ResolvedFamily r{cp.index_of(b), cp.index_of(c), with_d ? cp.index_of(d) : 0, {}};
    for (const auto& f : family)
        r.family.push_back(cp.index_of(f));
    return r;
}

template <typename F>
void replace_markers(core::Block& block, F&& replacement)
{
    core::Block out;
    for (auto& s : block) {
        replace_markers(s.body, replacement);
        replace_markers(s.alt, replacement);
        if (auto r = replacement(s)) {
            for (auto& x : *r)
                out.push_back(std::move(x));
        } else {
            out.push_back(std::move(s));
        }
    }
    block = std::move(out);
}

} // namespace detail

/// Replaces every triple(spec) marker by its flush chain followed by c -= 2.
inline CoreProgram expand_triple_tests(CoreProgram cp, const TripleSpec& spec)
{
    auto r = detail::resolve(cp, spec.b, spec.c, spec.d, spec.family, true);
    detail::replace_markers(cp.body, [&](const core::Stmt& s) -> std::optional<core::Block> {
        if (s.kind != core::Stmt::Kind::zero_test || s.strategy.kind != StrategyKind::triple)
            return std::nullopt;
        const auto& st = s.strategy;
        if (st.b != r.b || st.c != r.c || st.d != r.d || st.family != r.family)
            return std::nullopt;
        if (s.counter != r.b && std::find(r.family.begin(), r.family.end(), s.counter) == r.family.end())
            throw ProgramError("triple test on '" + cp.counters[s.counter] + "', which is outside its family");
        return triple_test(s.counter, r.b, r.c, r.d, r.family);
    });
    return cp;
}

/// Replaces every pair(spec) marker by its flush chain followed by
/// (b -= 1, c += 1), and the matching pairfinal marker by the epilogue.
inline CoreProgram expand_pair_tests(CoreProgram cp, const PairSpec& spec)
{
    auto r = detail::resolve(cp, spec.b, spec.c, {}, spec.family, false);
    bool any_test = false, any_final = false;
    auto matches = [&](const core::Strategy& st) {
        return st.kind == StrategyKind::pair && st.b == r.b && st.c == r.c && st.family == r.family;
    };
    detail::replace_markers(cp.body, [&](const core::Stmt& s) -> std::optional<core::Block> {
        if (s.kind == core::Stmt::Kind::pair_final && matches(s.strategy)) {
            any_final = true;
            return core::Block{pair_epilogue(r.b, r.c, r.family)};
        }
        if (s.kind != core::Stmt::Kind::zero_test || !matches(s.strategy))
            return std::nullopt;
        if (std::find(r.family.begin(), r.family.end(), s.counter) == r.family.end())
            throw ProgramError("pair test on '" + cp.counters[s.counter] + "', which is outside its family");
        any_test = true;
        return pair_test(s.counter, r.b, r.c, r.family);
    });
    if (any_test && !any_final)
        throw ProgramError("pair tests present but no pairfinal marker");
    return cp;
}

/// Removes every marker: triples first, then pairs, then controlling
/// counters (whose coefficients must also cover the gadget updates).
inline CoreProgram eliminate_markers(CoreProgram cp)
{
    std::vector<TripleSpec> triples;
    std::vector<PairSpec> pairs;
    std::vector<std::string> ctrls;
    auto names = [&](const std::vector<std::size_t>& v) {
        std::vector<std::string> out;
        for (auto i : v)
            out.push_back(cp.counters[i]);
        return out;
    };
    for_each_stmt(cp.body, [&](const core::Stmt& s, int) {
        if (s.kind != core::Stmt::Kind::zero_test && s.kind != core::Stmt::Kind::pair_final)
            return;
        const auto& st = s.strategy;
        switch (st.kind) {
        case StrategyKind::unset:
            throw ProgramError("zero test on '" + cp.counters[s.counter] + "' has no strategy");
        case StrategyKind::ctrl:
            if (std::find(ctrls.begin(), ctrls.end(), cp.counters[st.ctrl]) == ctrls.end())
                ctrls.push_back(cp.counters[st.ctrl]);
            break;
        case StrategyKind::triple: {
            TripleSpec t{cp.counters[st.b], cp.counters[st.c], cp.counters[st.d], names(st.family)};
            if (std::none_of(triples.begin(), triples.end(), [&](const TripleSpec& x) {
                    return x.b == t.b && x.c == t.c && x.d == t.d && x.family == t.family;
                }))
                triples.push_back(t);
            break;
        }
        case StrategyKind::pair: {
            PairSpec p{cp.counters[st.b], cp.counters[st.c], names(st.family)};
            if (std::none_of(pairs.begin(), pairs.end(), [&](const PairSpec& x) {
                    return x.b == p.b && x.c == p.c && x.family == p.family;
                }))
                pairs.push_back(p);
            break;
        }
        }
    });
    for (const auto& t : triples)
        cp = expand_triple_tests(std::move(cp), t);
    for (const auto& p : pairs)
        cp = expand_pair_tests(std::move(cp), p);
    for (const auto& c : ctrls)
        cp = instrument_ctrl(std::move(cp), ctrl_spec_for(cp, c));
    return cp;
}

/// Counters of an amplifier: (x1, x2, x3) hold the input triple in the
/// roles (c, b, d); x4 is the multiplication buffer; x5..x7 receive the
/// output (2^B, C', 2^B * C').
struct AmplifierCounters {
    std::string x1 = "x1", x2 = "x2", x3 = "x3", x4 = "x4", x5 = "x5", x6 = "x6", x7 = "x7";
};

/// The amplifier body. Loops are tagged `amp_init` (guesses C'), `amp_main`
/// (B/8 rounds of x256) and `amp_drain`. Family updates are paired with
/// complement updates on x2 so that x2 + x4 + ... + x7 stays constant.
inline ast::Block build_amplifier(const AmplifierCounters& k = {})
{
    detail::require_distinct({k.x1, k.x2, k.x3, k.x4, k.x5, k.x6, k.x7}, "amplifier");
    auto strategy = ast::triple(k.x2, k.x1, k.x3, {k.x4, k.x5, k.x6, k.x7});
    ast::Block main = emit_multiply(k.x5, k.x4, 256, strategy);
    auto second = emit_multiply(k.x7, k.x4, 256, strategy);
    main.insert(main.end(), second.begin(), second.end());
    ast::Block out{
        ast::update({{k.x5, 1}}),
        ast::loop({ast::update({{k.x6, 1}, {k.x7, 1}})}, "amp_init"),
        ast::loop(std::move(main), "amp_main"),
    };
    maintain_complement(out, {k.x4, k.x5, k.x6, k.x7}, k.x2);
    out.push_back(ast::loop({ast::update({{k.x2, -1}})}, "amp_drain"));
    return out;
}

} // namespace vasslab
