#pragma once

// Macro expansion: binds parameters, unrolls for-loops and evaluates every
// expression, producing a ground CoreProgram.

#include <map>
#include <set>
#include <string>

#include "vasslab/program.hpp"

namespace vasslab {

using Env = std::map<std::string, Counter, std::less<>>;

namespace detail {

template <class F>
Counter checked(Counter a, Counter b, F op)
{
    Counter r;
    if (op(a, b, &r))
        throw ProgramError("arithmetic overflow while evaluating an expression");
    return r;
}

inline constexpr auto add_op = [](Counter a, Counter b, Counter* r) { return __builtin_add_overflow(a, b, r); };
inline constexpr auto sub_op = [](Counter a, Counter b, Counter* r) { return __builtin_sub_overflow(a, b, r); };
inline constexpr auto mul_op = [](Counter a, Counter b, Counter* r) { return __builtin_mul_overflow(a, b, r); };

inline Counter eval(const ast::Expr& e, const Env& env)
{
    using Op = ast::Expr::Op;
    switch (e.op) {
    case Op::lit: return e.value;
    case Op::var: {
        auto it = env.find(e.name);
        if (it == env.end())
            throw ProgramError("unbound name '" + e.name + "'");
        return it->second;
    }
    case Op::neg: return checked(0, eval(e.args[0], env), sub_op);
    case Op::add: return checked(eval(e.args[0], env), eval(e.args[1], env), add_op);
    case Op::sub: return checked(eval(e.args[0], env), eval(e.args[1], env), sub_op);
    case Op::mul: return checked(eval(e.args[0], env), eval(e.args[1], env), mul_op);
    }
    return 0;
}

class Expander {
public:
    Expander(const ast::Program& p, Env env) : p_(p), env_(std::move(env))
    {
        for (std::size_t i = 0; i < p.counters.size(); ++i)
            if (!index_.emplace(p.counters[i], i).second)
                throw ProgramError("duplicate counter '" + p.counters[i] + "'");
    }

    core::Block block(const ast::Block& in, int loop_depth)
    {
        core::Block out;
        for (const auto& s : in)
            stmt(s, loop_depth, out);
        return out;
    }

private:
    std::size_t counter(const std::string& n) const
    {
        auto it = index_.find(n);
        if (it == index_.end())
            throw ProgramError("unknown counter '" + n + "'");
        return it->second;
    }

    std::vector<std::size_t> counters(const std::vector<std::string>& names) const
    {
        std::vector<std::size_t> out;
        for (const auto& n : names)
            out.push_back(counter(n));
        return out;
    }

    core::Strategy strategy(const ast::Strategy& s) const
    {
        core::Strategy out;
        out.kind = s.kind;
        switch (s.kind) {
        case StrategyKind::unset: break;
        case StrategyKind::ctrl: out.ctrl = counter(s.ctrl); break;
        case StrategyKind::triple:
            out.b = counter(s.b);
            out.c = counter(s.c);
            out.d = counter(s.d);
            out.family = counters(s.family);
            break;
        case StrategyKind::pair:
            out.b = counter(s.b);
            out.c = counter(s.c);
            out.family = counters(s.family);
            break;
        }
        return out;
    }

    void stmt(const ast::Stmt& s, int loop_depth, core::Block& out)
    {
        using K = ast::Stmt::Kind;
        switch (s.kind) {
        case K::update: {
            core::Stmt u;
            u.kind = core::Stmt::Kind::update;
            for (const auto& e : s.updates) {
                Counter v = eval(e.amount, env_);
                if (e.minus)
                    v = checked(0, v, sub_op);
                core::add_entry(u, counter(e.counter), v);
            }
            out.push_back(std::move(u));
            return;
        }
        case K::loop: out.push_back(core::loop(block(s.body, loop_depth + 1), s.tag)); return;
        case K::choice: out.push_back(core::choice(block(s.body, loop_depth), block(s.alt, loop_depth))); return;
        case K::zero_test:
            if (loop_depth > 0 && marker_forbidden_in_loop(s.strategy.kind))
                throw ProgramError("zero test on '" + s.counter + "' inside a loop");
            out.push_back(core::zero_test(counter(s.counter), strategy(s.strategy)));
            return;
        case K::pair_final: {
            core::Stmt f;
            f.kind = core::Stmt::Kind::pair_final;
            f.strategy = strategy(s.strategy);
            out.push_back(std::move(f));
            return;
        }
        case K::for_loop: {
            if (index_.contains(s.var) || env_.contains(s.var))
                throw ProgramError("loop variable '" + s.var + "' shadows another name");
            Counter lo = eval(s.lo, env_);
            Counter hi = eval(s.hi, env_);
            Counter step = s.downto ? -1 : 1;
            for (Counter i = lo; s.downto ? i >= hi : i <= hi; i += step) {
                env_[s.var] = i;
                for (const auto& b : s.body)
                    stmt(b, loop_depth, out);
            }
            env_.erase(s.var);
            return;
        }
        }
    }

    const ast::Program& p_;
    Env env_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

} // namespace detail

/// Unrolls every for-macro and evaluates all expressions under `env`, which
/// must bind exactly the program's parameters.
inline CoreProgram expand(const ast::Program& p, const Env& env = {})
{
    std::set<std::string, std::less<>> params(p.params.begin(), p.params.end());
    for (const auto& name : p.params)
        if (!env.contains(name))
            throw ProgramError("parameter '" + name + "' is unbound");
    for (const auto& [name, v] : env)
        if (!params.contains(name))
            throw ProgramError("'" + name + "' is not a parameter of " + p.name);
    detail::Expander ex(p, env);
    return CoreProgram{p.name, p.counters, ex.block(p.body, 0)};
}

/// Ground programs are fixed points of expansion.
inline CoreProgram expand(const CoreProgram& cp)
{
    return expand(lift(cp));
}

/// Marker positions per counter, as pre-order statement indices in program
/// order. With `only`, markers of other strategies are skipped.
inline std::map<std::string, std::vector<std::size_t>> count_zero_tests(const CoreProgram& cp,
                                                                        std::optional<StrategyKind> only = {})
{
    std::map<std::string, std::vector<std::size_t>> out;
    std::size_t position = 0;
    for_each_stmt(cp.body, [&](const core::Stmt& s, int) {
        if (s.kind == core::Stmt::Kind::zero_test && (!only || s.strategy.kind == *only))
            out[cp.counters.at(s.counter)].push_back(position);
        ++position;
    });
    return out;
}

} // namespace vasslab
