#pragma once

// Canonical witness runs: the intended run of a construction, built
// statement by statement over the compiled VASS with every flush full,
// every multiplication exact and every test honest.

#include <deque>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "vasslab/reductions.hpp"
#include "vasslab/text.hpp"

namespace vasslab {

/// The requested witness does not exist for these parameters.
class InfeasibleParams : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct WitnessCertificate {
    std::string construction;
    std::vector<std::pair<std::string, std::string>> params;
    Run run;
    Configuration endpoint;

    [[nodiscard]] RunFile to_run_file() const { return RunFile{construction, params, run, endpoint}; }
};

/// Iteration counts for tagged loops, consumed in program order. Loops
/// without a scheduled count fire as often as they can.
using LoopSchedule = std::map<std::string, std::deque<Counter>>;

class RunBuilder {
public:
    RunBuilder(const Vass& v, Configuration start, LoopSchedule schedule = {})
        : v_(v), cur_(start), schedule_(std::move(schedule))
    {
        check_start(v.dimension(), start);
        run_.start = std::move(start);
    }

    void fire(TransitionId t)
    {
        if (auto e = try_fire(v_.transition(t), cur_); e != FireError::none)
            throw RunError(e, run_.steps.size() + 1);
        run_.steps.push_back(t);
    }

    void exec(const core::Block& stmts, const std::vector<Lowered>& low)
    {
        for (std::size_t k = 0; k < stmts.size(); ++k)
            exec(stmts[k], low.at(k));
    }

    [[nodiscard]] const Configuration& current() const noexcept { return cur_; }
    [[nodiscard]] const Run& run() const noexcept { return run_; }

    /// Choice resolution: returns true for the left branch. Default left.
    std::function<bool(const core::Stmt&)> choose = [](const core::Stmt&) { return true; };

private:
    std::optional<Counter> scheduled(const std::string& tag)
    {
        if (tag.empty())
            return std::nullopt;
        auto it = schedule_.find(tag);
        if (it == schedule_.end() || it->second.empty())
            return std::nullopt;
        Counter n = it->second.front();
        it->second.pop_front();
        return n;
    }

    void repeat(TransitionId t, Counter times)
    {
        const auto& eff = v_.transition(t).effect;
        if (v_.transition(t).from != cur_.state)
            throw RunError(FireError::wrong_state, run_.steps.size() + 1);
        // An affine path stays nonnegative iff both endpoints do.
        CounterVector end = cur_.counters;
        for (std::size_t i = 0; i < end.size(); ++i) {
            Counter step;
            if (__builtin_mul_overflow(eff[i], times, &step) || __builtin_add_overflow(end[i], step, &end[i]))
                throw RunError(FireError::overflow, run_.steps.size() + 1);
            if (end[i] < 0)
                throw RunError(FireError::negative_counter, run_.steps.size() + 1);
        }
        cur_.counters = std::move(end);
        run_.steps.insert(run_.steps.end(), static_cast<std::size_t>(times), t);
    }

    Counter greedy(TransitionId t) const
    {
        const auto& eff = v_.transition(t).effect;
        std::optional<Counter> best;
        bool grows = false;
        for (std::size_t i = 0; i < eff.size(); ++i) {
            if (eff[i] < 0) {
                Counter k = cur_.counters[i] / -eff[i];
                best = best ? std::min(*best, k) : k;
            } else if (eff[i] > 0) {
                grows = true;
            }
        }
        if (!best) {
            if (grows)
                throw InfeasibleParams("loop '" + v_.state_name(v_.transition(t).from) +
                                       "' only increases counters; it needs a scheduled count");
            return 0;
        }
        return *best;
    }

    void exec(const core::Stmt& s, const Lowered& l)
    {
        switch (s.kind) {
        case core::Stmt::Kind::update: fire(l.step); return;
        case core::Stmt::Kind::choice: {
            bool left = choose(s);
            fire(left ? *l.enter : *l.enter_alt);
            exec(left ? s.body : s.alt, left ? l.body : l.alt);
            fire(left ? *l.exit : *l.exit_alt);
            return;
        }
        case core::Stmt::Kind::loop: {
            if (s.body.empty())
                return;
            if (l.enter)
                fire(*l.enter);
            auto count = scheduled(s.tag);
            if (l.self_loop) {
                repeat(l.step, count ? *count : greedy(l.step));
                return;
            }
            if (count) {
                for (Counter i = 0; i < *count; ++i)
                    iterate(s, l);
            } else {
                for (;;) {
                    auto saved_cfg = cur_;
                    auto saved_len = run_.steps.size();
                    auto saved_schedule = schedule_;
                    try {
                        iterate(s, l);
                    } catch (const RunError&) {
                        cur_ = std::move(saved_cfg);
                        run_.steps.resize(saved_len);
                        schedule_ = std::move(saved_schedule);
                        break;
                    }
                    if (cur_ == saved_cfg)
                        break;
                }
            }
            fire(*l.exit);
            return;
        }
        case core::Stmt::Kind::zero_test:
        case core::Stmt::Kind::pair_final: throw ResidualZeroTest("cannot build a run through a zero-test marker");
        }
    }

    void iterate(const core::Stmt& s, const Lowered& l)
    {
        exec(s.body, l.body);
        if (l.back)
            fire(*l.back);
    }

    const Vass& v_;
    Configuration cur_;
    Run run_;
    LoopSchedule schedule_;
};

struct CanonicalWitness {
    Construction construction;
    WitnessCertificate certificate;
};

namespace detail {

inline Counter param(const std::map<std::string, Counter>& p, const std::string& key, Counter fallback)
{
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

inline CanonicalWitness replay(Construction c, const Configuration& start, LoopSchedule schedule)
{
    RunBuilder rb(c.vass(), start, std::move(schedule));
    try {
        rb.exec(c.core.body, c.compiled.lowered);
    } catch (const RunError& e) {
        throw InfeasibleParams(c.id + ": the intended run gets stuck (" + e.what() + ")");
    }
    WitnessCertificate cert{c.id, c.params, rb.run(), rb.current()};
    if (cert.endpoint.state != c.compiled.exit)
        throw InfeasibleParams(c.id + ": the intended run does not end in the final state");
    if (!c.target.matches(cert.endpoint))
        throw InfeasibleParams(c.id + ": the intended run misses the endpoint contract");
    return CanonicalWitness{std::move(c), std::move(cert)};
}

} // namespace detail

/// Builds and checks the intended run of a construction. Supported ids:
/// pspace (s, n), expspace (s, n, guess), tower (n, seed, c_out, rounds),
/// amplifier (B, c_out). `guess` and `rounds` override the honest choice of
/// the guessed bound and of the first amplifier's main-loop count. Throws
/// InfeasibleParams when no honest run exists.
inline CanonicalWitness canonical_witness(const std::string& id, const std::map<std::string, Counter>& params)
{
    using detail::param;
    if (id == "pspace") {
        auto c = pspace_pump({param(params, "s", 1), param(params, "n", 1)});
        auto src = c.source;
        return detail::replay(std::move(c), src, {});
    }
    if (id == "expspace") {
        PumpParams p{param(params, "s", 1), param(params, "n", 1)};
        Counter bound, rounds;
        try {
            bound = expspace_bound(p);
            rounds = detail::pow_checked(2, p.n);
        } catch (const std::overflow_error&) {
            throw InfeasibleParams("expspace: the honest run's values overflow 64-bit counters");
        }
        auto c = expspace_pump(p);
        auto src = c.source;
        bound = param(params, "guess", bound);
        return detail::replay(std::move(c), src, {{"guess", {bound}}, {"main", {rounds}}});
    }
    if (id == "tower") {
        TowerParams p{param(params, "n", 1), param(params, "seed", 8)};
        Counter c_out = param(params, "c_out", 1);
        if (p.seed % 8 != 0)
            throw InfeasibleParams("tower: seed " + std::to_string(p.seed) +
                                   " is not a multiple of 8, so the first amplifier cannot spend its budget "
                                   "in whole rounds of four tests");
        // Work backwards from the last stage: stage i turns (T, C, T*C) into
        // (2^T, C', 2^T*C') and needs C >= 257*C' + 256 with T/8 rounds,
        // i.e. C = (2^T + 1) * C' + 2^T in general.
        std::vector<Counter> towers{p.seed};
        std::vector<Counter> rounds;
        LoopSchedule sched;
        try {
            for (Counter i = 0; i < p.n; ++i) {
                Counter t = towers.back();
                if (t >= 62)
                    throw std::overflow_error("");
                rounds.push_back(i == 0 ? param(params, "rounds", t / 8) : t / 8);
                towers.push_back(Counter{1} << t);
            }
            std::vector<Counter> cs(static_cast<std::size_t>(p.n + 1));
            cs.back() = c_out;
            for (auto i = p.n; i-- > 0;) {
                Counter big = towers[static_cast<std::size_t>(i) + 1];
                Counter prod = detail::mul_checked(big + 1, cs[static_cast<std::size_t>(i) + 1]);
                if (__builtin_add_overflow(prod, big, &cs[static_cast<std::size_t>(i)]))
                    throw std::overflow_error("");
            }
            sched["seed"].push_back(cs[0]);
            for (Counter i = 0; i < p.n; ++i) {
                sched["amp_init"].push_back(cs[static_cast<std::size_t>(i) + 1]);
                sched["amp_main"].push_back(rounds[static_cast<std::size_t>(i)]);
            }
        } catch (const std::overflow_error&) {
            throw InfeasibleParams("tower: the honest run's values overflow 64-bit counters");
        }
        auto c = tower_pump(p);
        c.target.counters[0] = towers.back();
        auto src = c.source;
        return detail::replay(std::move(c), src, std::move(sched));
    }
    if (id == "amplifier") {
        Counter B = param(params, "B", 8);
        Counter c_out = param(params, "c_out", 1);
        if (B < 0 || B % 8 != 0)
            throw InfeasibleParams("amplifier: B must be a multiple of 8");
        if (B >= 62)
            throw InfeasibleParams("amplifier: 2^B overflows 64-bit counters");
        Counter big = Counter{1} << B;
        Counter C = detail::mul_checked(big + 1, c_out) + big;
        auto c = amplifier();
        c.params = {{"B", std::to_string(B)}, {"c_out", std::to_string(c_out)}};
        c.source.counters = {B, C, detail::mul_checked(B, C), 0, 0, 0, 0};
        c.target.counters[4] = big;
        c.target.counters[5] = c_out;
        c.target.counters[6] = detail::mul_checked(big, c_out);
        auto src = c.source;
        return detail::replay(std::move(c), src, {{"amp_init", {c_out}}, {"amp_main", {B / 8}}});
    }
    throw std::invalid_argument("no canonical witness for construction '" + id + "'");
}

struct MutationReport {
    std::size_t mutants = 0;
    std::size_t rejected = 0;           // failed replay
    std::size_t contract_violated = 0;  // replayed but missed the contract
    std::vector<std::string> survivors; // replayed and met the contract
};

/// Applies single-step deletions and truncations to the certificate's run;
/// every mutant should either fail replay or miss `contract`.
inline MutationReport mutate_and_check(const Vass& v, const WitnessCertificate& cert, const ConfigPattern& contract,
                                       std::size_t mutations, std::uint64_t seed = 1)
{
    MutationReport rep;
    std::mt19937_64 rng(seed);
    const auto& steps = cert.run.steps;
    for (std::size_t m = 0; m < mutations; ++m) {
        Run mutant{cert.run.start, {}};
        std::string what;
        if (steps.empty() || m % 4 == 3) {
            std::size_t keep = steps.empty() ? 0 : std::uniform_int_distribution<std::size_t>(0, steps.size() - 1)(rng);
            mutant.steps.assign(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(keep));
            what = "truncate to " + std::to_string(keep);
        } else {
            std::size_t at = std::uniform_int_distribution<std::size_t>(0, steps.size() - 1)(rng);
            mutant.steps = steps;
            mutant.steps.erase(mutant.steps.begin() + static_cast<std::ptrdiff_t>(at));
            what = "delete step " + std::to_string(at + 1);
        }
        ++rep.mutants;
        try {
            auto r = validate_run(v, mutant);
            if (contract.matches(r.final))
                rep.survivors.push_back(what);
            else
                ++rep.contract_violated;
        } catch (const RunError&) {
            ++rep.rejected;
        }
    }
    return rep;
}

} // namespace vasslab
