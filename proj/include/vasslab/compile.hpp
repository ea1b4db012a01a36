#pragma once

// Compilation of ground counter programs into VASSes.
//
// An update becomes one transition to a fresh state. A loop whose body is a
// single update becomes a self-loop (after a zero spacer edge if the current
// state already sits on a cycle). Other loops get a hub state: the body runs
// from the hub and returns to it, and a zero edge leaves it. A choice forks
// with zero edges and rejoins with zero edges.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vasslab/program.hpp"
#include "vasslab/vass.hpp"

namespace vasslab {

class ResidualZeroTest : public ProgramError {
public:
    using ProgramError::ProgramError;
};

/// Mirror of a compiled statement, recording which transitions implement it
/// so runs can be assembled statement by statement.
struct Lowered {
    core::Stmt::Kind kind = core::Stmt::Kind::update;
    TransitionId step = 0;                  // update, or the self-loop of a single-update loop
    bool self_loop = false;
    std::optional<TransitionId> enter;      // spacer before a loop; left fork of a choice
    std::optional<TransitionId> enter_alt;  // right fork of a choice
    std::optional<TransitionId> back;       // zero edge closing a hub loop body
    std::optional<TransitionId> exit;       // hub exit; left join of a choice
    std::optional<TransitionId> exit_alt;   // right join of a choice
    std::vector<Lowered> body, alt;
};

struct Fragment {
    StateId exit = 0;
    std::vector<Lowered> lowered;
};

struct Compiled {
    Vass vass;
    StateId entry = 0;
    StateId exit = 0;
    std::vector<Lowered> lowered;
};

namespace detail {

class Compiler {
public:
    explicit Compiler(Vass& v) : v_(v) {}

    struct Cursor {
        StateId state;
        bool on_cycle;
    };

    StateId fresh(const std::string& prefix)
    {
        for (;;) {
            auto name = prefix + "s" + std::to_string(next_[prefix]++);
            if (!v_.find_state(name))
                return v_.add_state(std::move(name));
        }
    }

    CounterVector effect(const core::Stmt& s) const
    {
        CounterVector e(v_.dimension(), 0);
        for (const auto& [c, a] : s.updates) {
            if (c >= e.size())
                throw ProgramError("update on counter index " + std::to_string(c) + " outside the program");
            e[c] += a;
        }
        return e;
    }

    TransitionId zero_edge(StateId from, StateId to) { return v_.add_transition(from, v_.zero(), to); }

    std::vector<Lowered> block(const core::Block& in, const std::string& prefix, Cursor& cur,
                               std::optional<StateId> last_update_to = {})
    {
        std::vector<Lowered> out;
        for (std::size_t k = 0; k < in.size(); ++k) {
            const auto& s = in[k];
            Lowered l;
            l.kind = s.kind;
            switch (s.kind) {
            case core::Stmt::Kind::update: {
                StateId to = (last_update_to && k + 1 == in.size()) ? *last_update_to : fresh(prefix);
                l.step = v_.add_transition(cur.state, effect(s), to);
                cur = {to, false};
                break;
            }
            case core::Stmt::Kind::loop: {
                if (s.body.empty())
                    break;
                if (s.body.size() == 1 && s.body[0].kind == core::Stmt::Kind::update) {
                    if (cur.on_cycle) {
                        StateId n = fresh(prefix);
                        l.enter = zero_edge(cur.state, n);
                        cur.state = n;
                    }
                    l.self_loop = true;
                    l.step = v_.add_transition(cur.state, effect(s.body[0]), cur.state);
                    cur.on_cycle = true;
                    break;
                }
                StateId hub = cur.state;
                if (cur.on_cycle) {
                    hub = fresh(prefix);
                    l.enter = zero_edge(cur.state, hub);
                }
                Cursor inner{hub, true};
                bool closes = s.body.back().kind == core::Stmt::Kind::update;
                l.body = block(s.body, prefix + "loop" + std::to_string(k) + ".", inner,
                               closes ? std::optional<StateId>(hub) : std::nullopt);
                if (!closes)
                    l.back = zero_edge(inner.state, hub);
                StateId out_state = fresh(prefix);
                l.exit = zero_edge(hub, out_state);
                cur = {out_state, false};
                break;
            }
            case core::Stmt::Kind::choice: {
                auto base = prefix + "ch" + std::to_string(k);
                StateId left = fresh(base + ".l.");
                StateId right = fresh(base + ".r.");
                l.enter = zero_edge(cur.state, left);
                l.enter_alt = zero_edge(cur.state, right);
                Cursor lc{left, false}, rc{right, false};
                l.body = block(s.body, base + ".l.", lc);
                l.alt = block(s.alt, base + ".r.", rc);
                StateId join = fresh(prefix);
                l.exit = zero_edge(lc.state, join);
                l.exit_alt = zero_edge(rc.state, join);
                cur = {join, false};
                break;
            }
            case core::Stmt::Kind::zero_test:
            case core::Stmt::Kind::pair_final:
                throw ResidualZeroTest("zero-test marker left in the program; eliminate it before compiling");
            }
            out.push_back(std::move(l));
        }
        return out;
    }

private:
    Vass& v_;
    std::map<std::string, std::size_t> next_;
};

} // namespace detail

/// Compiles `cp` into a fresh VASS of dimension |counters|, whose initial
/// and final states are the program's entry and exit.
inline Compiled compile(const CoreProgram& cp)
{
    Compiled out{Vass(cp.name, cp.counters.size()), 0, 0, {}};
    detail::Compiler c(out.vass);
    out.entry = c.fresh("");
    detail::Compiler::Cursor cur{out.entry, false};
    out.lowered = c.block(cp.body, "", cur);
    out.exit = cur.state;
    out.vass.set_initial(out.entry);
    out.vass.set_final(out.exit);
    return out;
}

/// Compiles statements into an existing VASS starting at `entry`, naming new
/// states under `prefix`. The entry is treated as lying on a cycle.
inline Fragment compile_fragment(Vass& v, StateId entry, const core::Block& stmts, const std::string& prefix)
{
    detail::Compiler c(v);
    detail::Compiler::Cursor cur{entry, true};
    Fragment f;
    f.lowered = c.block(stmts, prefix, cur);
    f.exit = cur.state;
    return f;
}

} // namespace vasslab
