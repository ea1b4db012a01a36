#pragma once

// Pretty-printer for counter programs; output parses back to the same tree.

#include <sstream>
#include <string>

#include "vasslab/program.hpp"

namespace vasslab {

namespace detail {

inline int precedence(const ast::Expr& e)
{
    using Op = ast::Expr::Op;
    switch (e.op) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul: return 2;
    default: return 3;
    }
}

inline void print_expr(std::ostream& out, const ast::Expr& e)
{
    using Op = ast::Expr::Op;
    switch (e.op) {
    case Op::lit: out << e.value; return;
    case Op::var: out << e.name; return;
    case Op::neg:
        out << '-';
        if (precedence(e.args[0]) < 3) {
            out << '(';
            print_expr(out, e.args[0]);
            out << ')';
        } else {
            print_expr(out, e.args[0]);
        }
        return;
    default: break;
    }
    int p = precedence(e);
    const auto& a = e.args[0];
    const auto& b = e.args[1];
    bool pa = precedence(a) < p;
    bool pb = precedence(b) <= p;
    if (pa)
        out << '(';
    print_expr(out, a);
    if (pa)
        out << ')';
    out << (e.op == Op::add ? " + " : e.op == Op::sub ? " - " : " * ");
    if (pb)
        out << '(';
    print_expr(out, b);
    if (pb)
        out << ')';
}

inline void print_names(std::ostream& out, const std::vector<std::string>& names)
{
    for (std::size_t i = 0; i < names.size(); ++i)
        out << (i ? ", " : "") << names[i];
}

inline void print_strategy(std::ostream& out, const ast::Strategy& s)
{
    switch (s.kind) {
    case StrategyKind::unset: return;
    case StrategyKind::ctrl: out << " via ctrl(" << s.ctrl << ')'; return;
    case StrategyKind::triple:
        out << " via triple(" << s.b << ", " << s.c << ", " << s.d << " | ";
        print_names(out, s.family);
        out << ')';
        return;
    case StrategyKind::pair:
        out << " via pair(" << s.b << ", " << s.c << " | ";
        print_names(out, s.family);
        out << ')';
        return;
    }
}

inline void print_block(std::ostream& out, const ast::Block& block, int indent);

inline void print_stmt(std::ostream& out, const ast::Stmt& s, int indent)
{
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    using K = ast::Stmt::Kind;
    switch (s.kind) {
    case K::update:
        out << pad;
        for (std::size_t i = 0; i < s.updates.size(); ++i) {
            const auto& u = s.updates[i];
            out << (i ? ", " : "") << u.counter << (u.minus ? " -= " : " += ");
            print_expr(out, u.amount);
        }
        out << ";\n";
        return;
    case K::loop:
        out << pad << "loop ";
        if (!s.tag.empty())
            out << '@' << s.tag << ' ';
        print_block(out, s.body, indent);
        out << '\n';
        return;
    case K::for_loop:
        out << pad << "for " << s.var << " := ";
        print_expr(out, s.lo);
        out << (s.downto ? " downto " : " to ");
        print_expr(out, s.hi);
        out << ' ';
        print_block(out, s.body, indent);
        out << '\n';
        return;
    case K::choice:
        out << pad << "choice ";
        print_block(out, s.body, indent);
        out << " or ";
        print_block(out, s.alt, indent);
        out << '\n';
        return;
    case K::zero_test:
        out << pad << "zerotest " << s.counter;
        print_strategy(out, s.strategy);
        out << ";\n";
        return;
    case K::pair_final:
        out << pad << "pairfinal(" << s.strategy.b << ", " << s.strategy.c << " | ";
        print_names(out, s.strategy.family);
        out << ");\n";
        return;
    }
}

inline void print_block(std::ostream& out, const ast::Block& block, int indent)
{
    out << "{\n";
    for (const auto& s : block)
        print_stmt(out, s, indent + 1);
    out << std::string(static_cast<std::size_t>(indent) * 2, ' ') << '}';
}

} // namespace detail

inline std::string to_string(const ast::Expr& e)
{
    std::ostringstream os;
    detail::print_expr(os, e);
    return os.str();
}

inline std::string print(const ast::Program& p)
{
    std::ostringstream os;
    os << "program " << p.name << '(';
    detail::print_names(os, p.params);
    os << ")\ncounters";
    for (const auto& c : p.counters)
        os << ' ' << c;
    os << '\n';
    detail::print_block(os, p.body, 0);
    os << '\n';
    return os.str();
}

inline std::string print(const CoreProgram& cp)
{
    return print(lift(cp));
}

} // namespace vasslab
