#pragma once

// Counter-program syntax trees. `ast` is the surface language (parameters,
// for-macros, symbolic expressions); `core` is the ground form produced by
// expansion, with counters resolved to indices and all values evaluated.

#include <algorithm>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vasslab/vass.hpp"

namespace vasslab {

/// Static errors in counter programs: syntax, unknown names, misplaced
/// markers, unbound parameters. `line`/`column` are 1-based, 0 if unknown.
class ProgramError : public std::runtime_error {
public:
    explicit ProgramError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : std::runtime_error(line ? std::to_string(line) + ":" + std::to_string(column) + ": " + what : what),
          line_(line), column_(column)
    {
    }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

enum class StrategyKind { unset, ctrl, triple, pair };

namespace ast {

struct Expr {
    enum class Op { lit, var, add, sub, mul, neg };
    Op op = Op::lit;
    Counter value = 0;
    std::string name;
    std::vector<Expr> args;

    friend bool operator==(const Expr&, const Expr&) = default;
};

inline Expr lit(Counter v) { return Expr{Expr::Op::lit, v, {}, {}}; }
inline Expr var(std::string name) { return Expr{Expr::Op::var, 0, std::move(name), {}}; }
inline Expr binary(Expr::Op op, Expr a, Expr b) { return Expr{op, 0, {}, {std::move(a), std::move(b)}}; }
inline Expr operator+(Expr a, Expr b) { return binary(Expr::Op::add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return binary(Expr::Op::sub, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return binary(Expr::Op::mul, std::move(a), std::move(b)); }
inline Expr operator-(Expr a) { return Expr{Expr::Op::neg, 0, {}, {std::move(a)}}; }

/// How a zero-test marker is to be eliminated. `family` lists the counters
/// sharing a triple or pair; `ctrl` names the controlling counter.
struct Strategy {
    StrategyKind kind = StrategyKind::unset;
    std::string ctrl;
    std::string b, c, d;
    std::vector<std::string> family;

    friend bool operator==(const Strategy&, const Strategy&) = default;
};

inline Strategy ctrl(std::string c) { return Strategy{StrategyKind::ctrl, std::move(c), {}, {}, {}, {}}; }
inline Strategy triple(std::string b, std::string c, std::string d, std::vector<std::string> family)
{
    return Strategy{StrategyKind::triple, {}, std::move(b), std::move(c), std::move(d), std::move(family)};
}
inline Strategy pair(std::string b, std::string c, std::vector<std::string> family)
{
    return Strategy{StrategyKind::pair, {}, std::move(b), std::move(c), {}, std::move(family)};
}

struct UpdateEntry {
    std::string counter;
    bool minus = false;
    Expr amount;

    friend bool operator==(const UpdateEntry&, const UpdateEntry&) = default;
};

struct Stmt {
    enum class Kind { update, loop, for_loop, choice, zero_test, pair_final };
    Kind kind = Kind::update;
    std::vector<UpdateEntry> updates;
    std::vector<Stmt> body;
    std::vector<Stmt> alt;
    std::string var;
    Expr lo, hi;
    bool downto = false;
    std::string tag;
    std::string counter;
    Strategy strategy;

    friend bool operator==(const Stmt&, const Stmt&) = default;
};

using Block = std::vector<Stmt>;

inline Stmt update(std::vector<UpdateEntry> entries)
{
    Stmt s;
    s.kind = Stmt::Kind::update;
    s.updates = std::move(entries);
    return s;
}

inline UpdateEntry add(std::string counter, Expr e) { return {std::move(counter), false, std::move(e)}; }
inline UpdateEntry sub(std::string counter, Expr e) { return {std::move(counter), true, std::move(e)}; }

/// Literal update; negative amounts are written as `-=`.
inline Stmt update(std::initializer_list<std::pair<std::string, Counter>> entries)
{
    std::vector<UpdateEntry> out;
    for (const auto& [c, v] : entries)
        out.push_back(v < 0 ? sub(c, lit(-v)) : add(c, lit(v)));
    return update(std::move(out));
}

inline Stmt loop(Block body, std::string tag = {})
{
    Stmt s;
    s.kind = Stmt::Kind::loop;
    s.body = std::move(body);
    s.tag = std::move(tag);
    return s;
}

inline Stmt for_loop(std::string var, Expr lo, Expr hi, Block body, bool downto = false)
{
    Stmt s;
    s.kind = Stmt::Kind::for_loop;
    s.var = std::move(var);
    s.lo = std::move(lo);
    s.hi = std::move(hi);
    s.downto = downto;
    s.body = std::move(body);
    return s;
}

inline Stmt choice(Block left, Block right)
{
    Stmt s;
    s.kind = Stmt::Kind::choice;
    s.body = std::move(left);
    s.alt = std::move(right);
    return s;
}

inline Stmt zero_test(std::string counter, Strategy strategy = {})
{
    Stmt s;
    s.kind = Stmt::Kind::zero_test;
    s.counter = std::move(counter);
    s.strategy = std::move(strategy);
    return s;
}

inline Stmt pair_final(std::string b, std::string c, std::vector<std::string> family)
{
    Stmt s;
    s.kind = Stmt::Kind::pair_final;
    s.strategy = pair(std::move(b), std::move(c), std::move(family));
    return s;
}

struct Program {
    std::string name;
    std::vector<std::string> params;
    std::vector<std::string> counters;
    Block body;

    friend bool operator==(const Program&, const Program&) = default;
};

} // namespace ast

namespace core {

struct Strategy {
    StrategyKind kind = StrategyKind::unset;
    std::size_t ctrl = 0;
    std::size_t b = 0, c = 0, d = 0;
    std::vector<std::size_t> family;

    friend bool operator==(const Strategy&, const Strategy&) = default;
};

struct Stmt {
    enum class Kind { update, loop, choice, zero_test, pair_final };
    Kind kind = Kind::update;
    std::vector<std::pair<std::size_t, Counter>> updates;
    std::vector<Stmt> body;
    std::vector<Stmt> alt;
    std::string tag;
    std::size_t counter = 0;
    Strategy strategy;

    friend bool operator==(const Stmt&, const Stmt&) = default;

    [[nodiscard]] Counter amount(std::size_t counter_index) const
    {
        for (const auto& [c, v] : updates)
            if (c == counter_index)
                return v;
        return 0;
    }
};

using Block = std::vector<Stmt>;

inline Stmt update(std::vector<std::pair<std::size_t, Counter>> entries)
{
    Stmt s;
    s.kind = Stmt::Kind::update;
    s.updates = std::move(entries);
    return s;
}

inline Stmt loop(Block body, std::string tag = {})
{
    Stmt s;
    s.kind = Stmt::Kind::loop;
    s.body = std::move(body);
    s.tag = std::move(tag);
    return s;
}

inline Stmt choice(Block left, Block right)
{
    Stmt s;
    s.kind = Stmt::Kind::choice;
    s.body = std::move(left);
    s.alt = std::move(right);
    return s;
}

inline Stmt zero_test(std::size_t counter, Strategy strategy = {})
{
    Stmt s;
    s.kind = Stmt::Kind::zero_test;
    s.counter = counter;
    s.strategy = std::move(strategy);
    return s;
}

/// Adds `amount` to counter `c` in a core update, merging with an existing
/// entry for the same counter.
inline void add_entry(Stmt& s, std::size_t c, Counter amount)
{
    for (auto& [k, v] : s.updates)
        if (k == c) {
            v += amount;
            return;
        }
    s.updates.emplace_back(c, amount);
}

} // namespace core

/// A ground counter program: no parameters, no for-macros, integer updates.
struct CoreProgram {
    std::string name;
    std::vector<std::string> counters;
    core::Block body;

    friend bool operator==(const CoreProgram&, const CoreProgram&) = default;

    [[nodiscard]] std::optional<std::size_t> find_counter(std::string_view n) const
    {
        for (std::size_t i = 0; i < counters.size(); ++i)
            if (counters[i] == n)
                return i;
        return std::nullopt;
    }

    [[nodiscard]] std::size_t index_of(std::string_view n) const
    {
        if (auto i = find_counter(n))
            return *i;
        throw ProgramError("unknown counter '" + std::string(n) + "'");
    }
};

namespace detail {

template <typename StmtT, typename F>
void for_each_stmt(const std::vector<StmtT>& block, F&& f, int loop_depth = 0)
{
    for (const auto& s : block) {
        f(s, loop_depth);
        bool is_loop = s.kind == StmtT::Kind::loop;
        for_each_stmt(s.body, f, loop_depth + (is_loop ? 1 : 0));
        for_each_stmt(s.alt, f, loop_depth);
    }
}

} // namespace detail

/// Visits every statement in program order (pre-order), passing the number
/// of enclosing `loop` statements.
template <typename F>
void for_each_stmt(const core::Block& block, F&& f)
{
    detail::for_each_stmt(block, f);
}

template <typename F>
void for_each_stmt(const ast::Block& block, F&& f)
{
    detail::for_each_stmt(block, f);
}

/// Markers whose elimination cannot live under a loop: the controlling
/// counter needs a fixed number of future tests at every position.
inline bool marker_forbidden_in_loop(StrategyKind k)
{
    return k == StrategyKind::unset || k == StrategyKind::ctrl;
}

/// Converts a core program back to surface syntax with literal expressions.
inline ast::Program lift(const CoreProgram& cp)
{
    auto name = [&](std::size_t i) { return cp.counters.at(i); };
    auto names = [&](const std::vector<std::size_t>& v) {
        std::vector<std::string> out;
        for (auto i : v)
            out.push_back(name(i));
        return out;
    };
    auto strategy = [&](const core::Strategy& s) {
        ast::Strategy out;
        out.kind = s.kind;
        switch (s.kind) {
        case StrategyKind::unset: break;
        case StrategyKind::ctrl: out.ctrl = name(s.ctrl); break;
        case StrategyKind::triple:
            out.b = name(s.b);
            out.c = name(s.c);
            out.d = name(s.d);
            out.family = names(s.family);
            break;
        case StrategyKind::pair:
            out.b = name(s.b);
            out.c = name(s.c);
            out.family = names(s.family);
            break;
        }
        return out;
    };
    auto block = [&](auto&& self, const core::Block& in) -> ast::Block {
        ast::Block out;
        for (const auto& s : in) {
            switch (s.kind) {
            case core::Stmt::Kind::update: {
                std::vector<ast::UpdateEntry> e;
                for (const auto& [c, v] : s.updates)
                    e.push_back(v < 0 ? ast::sub(name(c), ast::lit(-v)) : ast::add(name(c), ast::lit(v)));
                out.push_back(ast::update(std::move(e)));
                break;
            }
            case core::Stmt::Kind::loop: out.push_back(ast::loop(self(self, s.body), s.tag)); break;
            case core::Stmt::Kind::choice:
                out.push_back(ast::choice(self(self, s.body), self(self, s.alt)));
                break;
            case core::Stmt::Kind::zero_test:
                out.push_back(ast::zero_test(name(s.counter), strategy(s.strategy)));
                break;
            case core::Stmt::Kind::pair_final: {
                ast::Stmt st;
                st.kind = ast::Stmt::Kind::pair_final;
                st.strategy = strategy(s.strategy);
                out.push_back(std::move(st));
                break;
            }
            }
        }
        return out;
    };
    return ast::Program{cp.name, {}, cp.counters, block(block, cp.body)};
}

} // namespace vasslab
