#pragma once

// Line-oriented text formats: VASS / counter-automaton files, configuration
// literals and patterns, runs and witness certificates, manifests, DOT.

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vasslab/vass.hpp"

namespace vasslab {

class FormatError : public std::runtime_error {
public:
    FormatError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

inline std::vector<std::string_view> words(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
            ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])))
            ++j;
        if (j > i)
            out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline std::optional<Counter> parse_int(std::string_view s)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    Counter v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

inline Counter parse_int_or_throw(std::string_view s, std::size_t line)
{
    if (auto v = parse_int(s))
        return *v;
    throw FormatError(line, "expected an integer, got '" + std::string(s) + "'");
}

// Parses "(a,b,...)" into entries; '*' becomes nullopt when allowed.
inline std::vector<std::optional<Counter>> parse_tuple(std::string_view s, std::size_t line, bool wildcards)
{
    s = trim(s);
    if (s.size() < 2 || s.front() != '(' || s.back() != ')')
        throw FormatError(line, "expected a parenthesised vector, got '" + std::string(s) + "'");
    std::vector<std::optional<Counter>> out;
    for (auto part : split(s.substr(1, s.size() - 2), ',')) {
        if (wildcards && part == "*")
            out.emplace_back(std::nullopt);
        else
            out.emplace_back(parse_int_or_throw(part, line));
    }
    return out;
}

inline CounterVector parse_vector(std::string_view s, std::size_t line)
{
    CounterVector v;
    for (auto e : parse_tuple(s, line, false))
        v.push_back(*e);
    return v;
}

} // namespace detail

inline std::string format_vector(const CounterVector& v)
{
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ',';
        out += std::to_string(v[i]);
    }
    return out + ")";
}

template <typename TransitionT>
std::string format_config(const basic_vass<TransitionT>& v, const Configuration& c)
{
    return v.state_name(c.state) + format_vector(c.counters);
}

/// Parses `<state>(n1,...,nd)`.
template <typename TransitionT>
Configuration parse_config(const basic_vass<TransitionT>& v, std::string_view text)
{
    text = detail::trim(text);
    auto open = text.find('(');
    if (open == std::string_view::npos || open == 0)
        throw FormatError(0, "bad configuration literal '" + std::string(text) + "'");
    auto state = v.find_state(text.substr(0, open));
    if (!state)
        throw FormatError(0, "unknown state in '" + std::string(text) + "'");
    auto counters = detail::parse_vector(text.substr(open), 0);
    if (counters.size() != v.dimension())
        throw FormatError(0, "configuration '" + std::string(text) + "' has wrong dimension");
    for (auto x : counters)
        if (x < 0)
            throw FormatError(0, "configuration '" + std::string(text) + "' has a negative counter");
    return {*state, std::move(counters)};
}

/// A configuration with optional wildcards: `q(8,*,0)`. A missing state
/// (`*(...)`) matches every state.
struct ConfigPattern {
    std::optional<StateId> state;
    std::vector<std::optional<Counter>> counters;

    [[nodiscard]] bool matches(const Configuration& c) const
    {
        if (state && *state != c.state)
            return false;
        for (std::size_t i = 0; i < counters.size(); ++i)
            if (counters[i] && *counters[i] != c.counters[i])
                return false;
        return true;
    }

    static ConfigPattern exactly(const Configuration& c)
    {
        ConfigPattern p;
        p.state = c.state;
        for (auto x : c.counters)
            p.counters.emplace_back(x);
        return p;
    }
};

template <typename TransitionT>
ConfigPattern parse_pattern(const basic_vass<TransitionT>& v, std::string_view text)
{
    text = detail::trim(text);
    auto open = text.find('(');
    if (open == std::string_view::npos || open == 0)
        throw FormatError(0, "bad configuration pattern '" + std::string(text) + "'");
    ConfigPattern p;
    auto name = text.substr(0, open);
    if (name != "*") {
        p.state = v.find_state(name);
        if (!p.state)
            throw FormatError(0, "unknown state in '" + std::string(text) + "'");
    }
    p.counters = detail::parse_tuple(text.substr(open), 0, true);
    if (p.counters.size() != v.dimension())
        throw FormatError(0, "pattern '" + std::string(text) + "' has wrong dimension");
    return p;
}

// ---------------------------------------------------------------------------
// VASS files

template <typename TransitionT>
void write_vass(std::ostream& out, const basic_vass<TransitionT>& v)
{
    out << "vass " << v.name() << " dim " << v.dimension() << '\n';
    for (const auto& s : v.states())
        out << "state " << s << '\n';
    if (v.initial())
        out << "init " << v.state_name(*v.initial()) << '\n';
    if (v.final_state())
        out << "final " << v.state_name(*v.final_state()) << '\n';
    for (const auto& t : v.transitions()) {
        bool zt = false;
        if constexpr (requires { t.zero_test; })
            zt = t.zero_test.has_value();
        if (zt) {
            if constexpr (requires { t.zero_test; })
                out << "ztrans " << v.state_name(t.from) << ' ' << format_vector(t.effect) << " zt="
                    << (*t.zero_test + 1) << ' ' << v.state_name(t.to) << '\n';
        } else {
            out << "trans " << v.state_name(t.from) << ' ' << format_vector(t.effect) << ' '
                << v.state_name(t.to) << '\n';
        }
    }
}

template <typename TransitionT>
std::string to_text(const basic_vass<TransitionT>& v)
{
    std::ostringstream os;
    write_vass(os, v);
    return os.str();
}

namespace detail {

template <typename TransitionT>
basic_vass<TransitionT> read_system(std::string_view text, bool allow_zero_tests)
{
    std::optional<basic_vass<TransitionT>> v;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        auto w = words(line);
        const auto& kw = w[0];
        if (kw == "vass") {
            if (v)
                throw FormatError(line_no, "duplicate header");
            if (w.size() != 4 || w[2] != "dim")
                throw FormatError(line_no, "expected 'vass <name> dim <d>'");
            auto d = parse_int_or_throw(w[3], line_no);
            if (d < 1)
                throw FormatError(line_no, "dimension must be at least 1");
            v.emplace(std::string(w[1]), static_cast<std::size_t>(d));
            continue;
        }
        if (!v)
            throw FormatError(line_no, "missing 'vass' header");
        try {
            if (kw == "state" && w.size() == 2) {
                v->add_state(std::string(w[1]));
            } else if (kw == "init" && w.size() == 2) {
                v->set_initial(v->state(w[1]));
            } else if (kw == "final" && w.size() == 2) {
                v->set_final(v->state(w[1]));
            } else if (kw == "trans" || kw == "ztrans") {
                auto open = line.find('(');
                auto close = line.find(')', open);
                if (open == std::string_view::npos || close == std::string_view::npos)
                    throw FormatError(line_no, "missing effect vector");
                auto head = words(line.substr(0, open));
                auto tail = words(line.substr(close + 1));
                if (head.size() != 2)
                    throw FormatError(line_no, "expected '" + std::string(kw) + " <from> (...)'");
                TransitionT t;
                t.from = v->state(head[1]);
                t.effect = parse_vector(line.substr(open, close - open + 1), line_no);
                if (kw == "ztrans") {
                    if (!allow_zero_tests)
                        throw FormatError(line_no, "zero-test transition in a plain VASS");
                    if (tail.size() != 2 || !tail[0].starts_with("zt="))
                        throw FormatError(line_no, "expected 'zt=<k> <to>'");
                    auto k = parse_int_or_throw(tail[0].substr(3), line_no);
                    if (k < 1)
                        throw FormatError(line_no, "zero-test index is 1-based");
                    if constexpr (requires { t.zero_test; })
                        t.zero_test = static_cast<std::size_t>(k - 1);
                    t.to = v->state(tail[1]);
                } else {
                    if (tail.size() != 1)
                        throw FormatError(line_no, "expected a single target state");
                    t.to = v->state(tail[0]);
                }
                v->add_transition(std::move(t));
            } else {
                throw FormatError(line_no, "unrecognised line '" + std::string(line) + "'");
            }
        } catch (const ModelError& e) {
            throw FormatError(line_no, e.what());
        }
    }
    if (!v)
        throw FormatError(line_no, "missing 'vass' header");
    return std::move(*v);
}

} // namespace detail

inline Vass read_vass(std::string_view text)
{
    return detail::read_system<Transition>(text, false);
}

inline CounterAutomaton read_counter_automaton(std::string_view text)
{
    return detail::read_system<GuardedTransition>(text, true);
}

// ---------------------------------------------------------------------------
// Manifests: `#! key=value` lines, kept in insertion order.

using Manifest = std::vector<std::pair<std::string, std::string>>;

inline std::string manifest_get(const Manifest& m, std::string_view key)
{
    for (const auto& [k, val] : m)
        if (k == key)
            return val;
    return {};
}

inline void write_manifest(std::ostream& out, const Manifest& m)
{
    for (const auto& [k, val] : m)
        out << "#! " << k << '=' << val << '\n';
}

inline Manifest read_manifest(std::string_view text)
{
    Manifest m;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        std::string_view l = detail::trim(line);
        if (!l.starts_with("#!"))
            continue;
        l = detail::trim(l.substr(2));
        auto eq = l.find('=');
        if (eq == std::string_view::npos)
            continue;
        m.emplace_back(std::string(l.substr(0, eq)), std::string(l.substr(eq + 1)));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Runs and certificates

/// A run plus the optional metadata carried by witness certificate files.
struct RunFile {
    std::string construction;
    std::vector<std::pair<std::string, std::string>> params;
    Run run;
    std::optional<Configuration> endpoint;
};

template <typename TransitionT>
void write_run(std::ostream& out, const basic_vass<TransitionT>& v, const RunFile& rf)
{
    if (!rf.construction.empty())
        out << "certificate " << rf.construction << '\n';
    for (const auto& [k, val] : rf.params)
        out << "param " << k << '=' << val << '\n';
    out << "start " << format_config(v, rf.run.start) << '\n';
    if (rf.endpoint)
        out << "endpoint " << format_config(v, *rf.endpoint) << '\n';
    for (auto id : rf.run.steps) {
        const auto& t = v.transition(id);
        out << "step " << v.state_name(t.from) << ' ' << format_vector(t.effect) << ' '
            << v.state_name(t.to) << '\n';
    }
}

template <typename TransitionT>
RunFile read_run(const basic_vass<TransitionT>& v, std::string_view text)
{
    RunFile rf;
    bool have_start = false;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        auto w = detail::words(line);
        try {
            if (w[0] == "certificate" && w.size() == 2) {
                rf.construction = std::string(w[1]);
            } else if (w[0] == "param" && w.size() == 2) {
                auto eq = w[1].find('=');
                if (eq == std::string_view::npos)
                    throw FormatError(line_no, "expected 'param k=v'");
                rf.params.emplace_back(std::string(w[1].substr(0, eq)), std::string(w[1].substr(eq + 1)));
            } else if (w[0] == "start" && w.size() == 2) {
                rf.run.start = parse_config(v, w[1]);
                have_start = true;
            } else if (w[0] == "endpoint" && w.size() == 2) {
                rf.endpoint = parse_config(v, w[1]);
            } else if (w[0] == "step") {
                auto open = line.find('(');
                auto close = line.find(')', open);
                if (open == std::string_view::npos || close == std::string_view::npos)
                    throw FormatError(line_no, "missing effect vector");
                auto head = detail::words(line.substr(0, open));
                auto tail = detail::words(line.substr(close + 1));
                if (head.size() != 2 || tail.size() != 1)
                    throw FormatError(line_no, "expected 'step <from> (...) <to>'");
                auto from = v.find_state(head[1]);
                auto to = v.find_state(tail[0]);
                if (!from || !to)
                    throw FormatError(line_no, "step names an unknown state");
                auto effect = detail::parse_vector(line.substr(open, close - open + 1), line_no);
                std::optional<TransitionId> found;
                for (auto id : v.outgoing(*from)) {
                    const auto& t = v.transition(id);
                    if (t.to == *to && t.effect == effect) {
                        found = id;
                        break;
                    }
                }
                if (!found)
                    throw FormatError(line_no, "step does not match any transition");
                rf.run.steps.push_back(*found);
            } else {
                throw FormatError(line_no, "unrecognised line '" + std::string(line) + "'");
            }
        } catch (const FormatError& e) {
            if (e.line() == 0)
                throw FormatError(line_no, e.what());
            throw;
        }
    }
    if (!have_start)
        throw FormatError(line_no, "run has no 'start' line");
    return rf;
}

// ---------------------------------------------------------------------------
// DOT

namespace detail {

inline std::string dot_quote(std::string_view s)
{
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\')
            out += '\\';
        out += ch;
    }
    return out + "\"";
}

} // namespace detail

/// One node per state, one edge per transition labelled with its effect.
template <typename TransitionT>
void write_dot(std::ostream& out, const basic_vass<TransitionT>& v)
{
    out << "digraph " << detail::dot_quote(v.name()) << " {\n";
    out << "  rankdir=LR;\n";
    for (StateId s = 0; s < v.state_count(); ++s) {
        out << "  " << detail::dot_quote(v.state_name(s));
        if (v.initial() == s || v.final_state() == s) {
            out << " [";
            if (v.final_state() == s)
                out << "shape=doublecircle";
            if (v.initial() == s)
                out << (v.final_state() == s ? "," : "") << "style=bold";
            out << ']';
        }
        out << ";\n";
    }
    for (const auto& t : v.transitions()) {
        std::string label = format_vector(t.effect);
        if constexpr (requires { t.zero_test; })
            if (t.zero_test)
                label += " zt=" + std::to_string(*t.zero_test + 1);
        out << "  " << detail::dot_quote(v.state_name(t.from)) << " -> " << detail::dot_quote(v.state_name(t.to))
            << " [label=" << detail::dot_quote(label) << "];\n";
    }
    out << "}\n";
}

} // namespace vasslab
