#pragma once

// Recursive-descent parser for the counter-program language.
//
//   program  ::= "program" name "(" params? ")" "counters" id+ "{" stmt* "}"
//   stmt     ::= updates ";" | "loop" ("@" id)? block
//              | "for" id ":=" expr ("to" | "downto") expr block
//              | "choice" block "or" block
//              | "zerotest" id ("via" strategy)? ";"
//              | "pairfinal" "(" id "," id "|" ids ")" ";"
//   strategy ::= "ctrl" "(" id ")" | "triple" "(" id "," id "," id "|" ids ")"
//              | "pair" "(" id "," id "|" ids ")"
//   updates  ::= id ("+=" | "-=") expr ("," id ("+=" | "-=") expr)*
//   expr     ::= term (("+" | "-") term)*,  term ::= unary ("*" unary)*
//   unary    ::= "-" unary | int | id | "(" expr ")"
//
// Comments run from `#` or `//` to end of line.

#include <cctype>
#include <charconv>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vasslab/program.hpp"

namespace vasslab {

namespace detail {

struct Token {
    enum class Kind { ident, number, punct, end };
    Kind kind = Kind::end;
    std::string text;
    std::size_t line = 1, column = 1;
};

inline std::vector<Token> tokenize(std::string_view src)
{
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    static const char* const two_char[] = {"+=", "-=", ":="};
    while (i < src.size()) {
        char ch = src[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            advance(1);
            continue;
        }
        if (ch == '#' || (ch == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            t.kind = Token::Kind::ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
                ++j;
            t.kind = Token::Kind::number;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else {
            t.kind = Token::Kind::punct;
            bool matched = false;
            for (const char* op : two_char) {
                if (src.substr(i, 2) == op) {
                    t.text = op;
                    advance(2);
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                if (std::string_view("(){};,+-*|@").find(ch) == std::string_view::npos)
                    throw ProgramError(std::string("unexpected character '") + ch + "'", line, col);
                t.text = std::string(1, ch);
                advance(1);
            }
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

inline bool is_keyword(std::string_view s)
{
    static const std::set<std::string_view> kw = {"program", "counters", "loop",  "for",  "to",
                                                  "downto",  "choice",   "or",    "zerotest", "via",
                                                  "ctrl",    "triple",   "pair",  "pairfinal"};
    return kw.contains(s);
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

    ast::Program program()
    {
        ast::Program p;
        keyword("program");
        p.name = identifier("program name");
        expect("(");
        if (!peek(")")) {
            do {
                auto& t = cur();
                auto name = identifier("parameter");
                if (std::find(p.params.begin(), p.params.end(), name) != p.params.end())
                    fail("duplicate parameter '" + name + "'", t);
                p.params.push_back(name);
            } while (accept(","));
        }
        expect(")");
        keyword("counters");
        while (cur().kind == Token::Kind::ident && !is_keyword(cur().text)) {
            auto& t = cur();
            auto name = identifier("counter");
            if (std::find(p.counters.begin(), p.counters.end(), name) != p.counters.end())
                fail("duplicate counter '" + name + "'", t);
            if (std::find(p.params.begin(), p.params.end(), name) != p.params.end())
                fail("'" + name + "' is both a parameter and a counter", t);
            p.counters.push_back(name);
        }
        if (p.counters.empty())
            fail("a program needs at least one counter", cur());
        counters_ = {p.counters.begin(), p.counters.end()};
        params_ = {p.params.begin(), p.params.end()};
        p.body = block();
        if (cur().kind != Token::Kind::end)
            fail("trailing input after program", cur());
        return p;
    }

private:
    const Token& cur() const { return toks_[pos_]; }

    [[noreturn]] void fail(const std::string& what, const Token& t) const
    {
        throw ProgramError(what, t.line, t.column);
    }

    bool peek(std::string_view text) const
    {
        return cur().kind != Token::Kind::end && cur().kind != Token::Kind::number && cur().text == text;
    }

    bool accept(std::string_view text)
    {
        if (peek(text)) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(std::string_view text)
    {
        if (!accept(text))
            fail("expected '" + std::string(text) + "', got " + describe(cur()), cur());
    }

    void keyword(std::string_view kw) { expect(kw); }

    static std::string describe(const Token& t)
    {
        if (t.kind == Token::Kind::end)
            return "end of input";
        return "'" + t.text + "'";
    }

    std::string identifier(const char* what)
    {
        const auto& t = cur();
        if (t.kind != Token::Kind::ident || is_keyword(t.text))
            fail(std::string("expected ") + what + ", got " + describe(t), t);
        ++pos_;
        return t.text;
    }

    std::string counter_name()
    {
        const auto& t = cur();
        auto name = identifier("counter");
        if (!counters_.contains(name))
            fail("unknown counter '" + name + "'", t);
        return name;
    }

    std::vector<std::string> counter_list()
    {
        std::vector<std::string> out;
        do
            out.push_back(counter_name());
        while (accept(","));
        return out;
    }

    ast::Block block()
    {
        expect("{");
        ast::Block out;
        while (!peek("}")) {
            if (cur().kind == Token::Kind::end)
                fail("unterminated block", cur());
            out.push_back(statement());
        }
        expect("}");
        return out;
    }

    ast::Strategy strategy()
    {
        ast::Strategy s;
        if (accept("ctrl")) {
            s.kind = StrategyKind::ctrl;
            expect("(");
            s.ctrl = counter_name();
            expect(")");
        } else if (accept("triple")) {
            s.kind = StrategyKind::triple;
            expect("(");
            s.b = counter_name();
            expect(",");
            s.c = counter_name();
            expect(",");
            s.d = counter_name();
            expect("|");
            s.family = counter_list();
            expect(")");
        } else if (accept("pair")) {
            s.kind = StrategyKind::pair;
            expect("(");
            s.b = counter_name();
            expect(",");
            s.c = counter_name();
            expect("|");
            s.family = counter_list();
            expect(")");
        } else {
            fail("expected a strategy (ctrl, triple or pair), got " + describe(cur()), cur());
        }
        return s;
    }

    ast::Stmt statement()
    {
        const Token start = cur();
        if (accept("loop")) {
            std::string tag;
            if (accept("@"))
                tag = identifier("loop tag");
            ++loop_depth_;
            auto body = block();
            --loop_depth_;
            return ast::loop(std::move(body), std::move(tag));
        }
        if (accept("for")) {
            const auto& vt = cur();
            auto v = identifier("loop variable");
            if (counters_.contains(v) || params_.contains(v) || vars_.contains(v))
                fail("loop variable '" + v + "' shadows another name", vt);
            expect(":=");
            auto lo = expr();
            bool downto = false;
            if (accept("downto"))
                downto = true;
            else
                expect("to");
            auto hi = expr();
            vars_.insert(v);
            auto body = block();
            vars_.erase(v);
            return ast::for_loop(std::move(v), std::move(lo), std::move(hi), std::move(body), downto);
        }
        if (accept("choice")) {
            auto left = block();
            keyword("or");
            auto right = block();
            return ast::choice(std::move(left), std::move(right));
        }
        if (accept("zerotest")) {
            auto c = counter_name();
            ast::Strategy s;
            if (accept("via"))
                s = strategy();
            expect(";");
            if (loop_depth_ > 0 && marker_forbidden_in_loop(s.kind))
                fail("zero test on '" + c + "' inside a loop", start);
            return ast::zero_test(std::move(c), std::move(s));
        }
        if (accept("pairfinal")) {
            expect("(");
            auto b = counter_name();
            expect(",");
            auto c = counter_name();
            expect("|");
            auto fam = counter_list();
            expect(")");
            expect(";");
            return ast::pair_final(std::move(b), std::move(c), std::move(fam));
        }
        std::vector<ast::UpdateEntry> entries;
        do {
            auto c = counter_name();
            bool minus;
            if (accept("+="))
                minus = false;
            else if (accept("-="))
                minus = true;
            else
                fail("expected '+=' or '-=', got " + describe(cur()), cur());
            entries.push_back({std::move(c), minus, expr()});
        } while (accept(","));
        expect(";");
        return ast::update(std::move(entries));
    }

    ast::Expr expr()
    {
        auto e = term();
        while (true) {
            if (accept("+"))
                e = std::move(e) + term();
            else if (accept("-"))
                e = std::move(e) - term();
            else
                return e;
        }
    }

    ast::Expr term()
    {
        auto e = unary();
        while (accept("*"))
            e = std::move(e) * unary();
        return e;
    }

    ast::Expr unary()
    {
        const auto& t = cur();
        if (accept("-")) {
            auto inner = unary();
            if (inner.op == ast::Expr::Op::lit)
                return ast::lit(-inner.value);
            return -std::move(inner);
        }
        if (accept("(")) {
            auto e = expr();
            expect(")");
            return e;
        }
        if (t.kind == Token::Kind::number) {
            Counter v{};
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            if (ec != std::errc{})
                fail("integer literal out of range", t);
            ++pos_;
            return ast::lit(v);
        }
        auto name = identifier("expression");
        if (!params_.contains(name) && !vars_.contains(name))
            fail("'" + name + "' is not a parameter or loop variable", t);
        return ast::var(std::move(name));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int loop_depth_ = 0;
    std::set<std::string> counters_, params_, vars_;
};

} // namespace detail

/// Parses a counter program. Throws ProgramError with line and column.
inline ast::Program parse(std::string_view text)
{
    return detail::Parser(text).program();
}

} // namespace vasslab
