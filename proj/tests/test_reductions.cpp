#include "catch_amalgamated.hpp"

#include <fstream>
#include <sstream>

#include "vasslab/oracles.hpp"
#include "vasslab/reach.hpp"
#include "vasslab/reductions.hpp"
#include "vasslab/verify.hpp"
#include "vasslab/witness.hpp"

using namespace vasslab;

namespace {

bool subset_sum_reachable(const SubsetSumInstance& inst)
{
    auto c = subset_sum_to_vass(inst);
    const auto& v = c.vass();
    RunBuilder rb(v, c.source);
    rb.choose = [](const core::Stmt&) { return false; };
    rb.exec(c.core.body, c.compiled.lowered);
    auto m = detail::run_maxima(v, rb.run());
    CounterVector caps{2 * m[0], 2 * m[1], 2 * std::max<Counter>(inst.s0, 1), 2 * m[3]};
    bool exhausted = false;
    bool got = detail::reaches(c, Caps{caps, std::nullopt, 10'000'000}, 1, exhausted);
    REQUIRE(exhausted);
    return got;
}

// Two states over d counters: drain counter 0 by k0 in a, hop to b,
// drain counter 1 by k1 in b.
Vass drain_toy(Counter k0, Counter k1, std::size_t d)
{
    Vass v("toy", d);
    v.add_state("a");
    v.add_state("b");
    CounterVector e0(d, 0), e1(d, 0);
    e0[0] = -k0;
    e1[1] = -k1;
    v.add_transition(0, e0, 0);
    v.add_transition(0, CounterVector(d, 0), 1);
    v.add_transition(1, e1, 1);
    v.set_initial(0);
    v.set_final(1);
    return v;
}

CounterAutomaton inc_test_dec()
{
    std::ifstream in(std::string(VASSLAB_SAMPLES) + "/inc_test_dec.ca");
    std::stringstream ss;
    ss << in.rdbuf();
    return read_counter_automaton(ss.str());
}

} // namespace

TEST_CASE("subset sum examples")
{
    CHECK(subset_sum_reachable({3, {1, 2}}));
    CHECK_FALSE(subset_sum_reachable({4, {1, 2}}));
    CHECK(subset_sum_reachable({0, {5}}));
    CHECK_FALSE(subset_sum_reachable({6, {5}}));
    auto c = subset_sum_to_vass({3, {1, 2}});
    CHECK(c.vass().dimension() == 4);
    CHECK(is_flat(c.vass()));
    CHECK(c.encoding == EncodingKind::unary);
}

TEST_CASE("subset sum agrees with enumeration on a small sample")
{
    for (Counter s0 = 0; s0 <= 5; ++s0)
        for (std::vector<Counter> values : {std::vector<Counter>{1, 3}, {2, 2}, {4}, {3, 1, 1}}) {
            INFO("s0=" << s0);
            CHECK(subset_sum_reachable({s0, values}) == oracle::subset_sum(s0, values));
        }
}

TEST_CASE("instrumentation coefficients match the closed forms")
{
    auto r = run_suite("coefficients");
    INFO(format_report(r));
    CHECK(r.verdict == Verdict::pass);
}

TEST_CASE("five-counter pump contract and canonical witness")
{
    auto c = pspace_pump({1, 1});
    CHECK(c.vass().dimension() == 5);
    CHECK(c.format_pattern(c.target).ends_with("(8,64,0,0,0)"));
    auto w = canonical_witness("pspace", {{"s", 1}, {"n", 1}});
    CHECK(w.certificate.endpoint.counters == CounterVector{8, 64, 0, 0, 0});
    CHECK(validate_run(w.construction.vass(), w.certificate.run).final == w.certificate.endpoint);
    CHECK(canonical_witness("pspace", {{"s", 2}, {"n", 2}}).certificate.endpoint.counters ==
          CounterVector{32, 1024, 0, 0, 0});
    CHECK_THROWS_AS(pspace_pump({0, 1}), std::invalid_argument);
}

TEST_CASE("sequential composition glues the pump to a second VASS")
{
    auto pump = pspace_pump({1, 1});
    const CounterVector caps{16, 128, 64, 0, 80};
    for (Counter k0 = 1; k0 <= 3; ++k0)
        for (Counter k1 : {3, 4, 5}) {
            auto v2 = drain_toy(k0, k1, 4);
            auto composed = sequential_compose(pump.vass(), v2, 5);
            CHECK(composed.dimension() == 5);
            auto found = find_run(composed, Configuration{*composed.initial(), composed.zero()},
                                  Configuration{*composed.final_state(), composed.zero()},
                                  Caps{caps, std::nullopt, 5'000'000});
            REQUIRE(found.exhausted);
            auto direct = find_run(v2, v2.config("a", {8, 64, 0, 0}), v2.config("b", {0, 0, 0, 0}),
                                   Caps{CounterVector{8, 64, 0, 0}, std::nullopt, 100000});
            INFO("k0=" << k0 << " k1=" << k1);
            CHECK(found.run.has_value() == direct.run.has_value());
            CHECK(found.run.has_value() == (8 % k0 == 0 && 64 % k1 == 0));
        }

    Vass lone("lone", 4);
    lone.add_state("only");
    lone.set_initial(0);
    lone.set_final(0);
    auto composed = sequential_compose(pump.vass(), lone, 5);
    auto found = find_run(composed, Configuration{*composed.initial(), composed.zero()},
                          Configuration{*composed.final_state(), composed.zero()}, Caps{caps, std::nullopt, 5'000'000});
    CHECK(found.exhausted);
    CHECK_FALSE(found.run);

    auto padded = sequential_compose(drain_toy(1, 1, 4), lone, 5);
    for (const auto& t : padded.transitions())
        CHECK(t.effect[4] == 0);
}

TEST_CASE("six-counter pump witness and a wrong guess")
{
    auto w = canonical_witness("expspace", {{"s", 1}, {"n", 1}});
    CHECK(w.certificate.endpoint.counters == CounterVector{96, 9216, 0, 0, 0, 0});
    CHECK(w.construction.vass().dimension() == 6);
    CHECK(w.construction.encoding == EncodingKind::binary);
    CHECK(expspace_bound({1, 1}) == 9312);
    CHECK_THROWS_AS(canonical_witness("expspace", {{"s", 1}, {"n", 1}, {"guess", 9311}}), InfeasibleParams);
}

TEST_CASE("tower values and the tower witness")
{
    CHECK(tower(0) == 1);
    CHECK(tower(1) == 2);
    CHECK(tower(2) == 4);
    CHECK(tower(3) == 16);
    CHECK(tower(4) == 65536);
    CHECK_THROWS_AS(tower(5), std::overflow_error);

    auto w = canonical_witness("tower", {{"n", 1}, {"seed", 8}});
    const auto& e = w.certificate.endpoint.counters;
    CHECK(w.construction.vass().dimension() == 8);
    CHECK(e[0] == 256);
    CHECK(e[2] == 256 * e[1]);
    for (std::size_t i = 3; i < 8; ++i)
        CHECK(e[i] == 0);
    CHECK_THROWS_AS(canonical_witness("tower", {{"n", 1}, {"seed", 1}}), InfeasibleParams);
    CHECK_THROWS_AS(canonical_witness("tower", {{"n", 2}, {"seed", 8}}), InfeasibleParams);
    CHECK_THROWS_AS(tower_program({1, 12}), std::invalid_argument);
}

TEST_CASE("amplifier at B = 0 and B = 8")
{
    auto zero = canonical_witness("amplifier", {{"B", 0}, {"c_out", 3}});
    const auto& z = zero.certificate.endpoint.counters;
    CHECK(z[4] == 1);
    CHECK(z[5] == 3);
    CHECK(z[6] == 3);

    auto eight = canonical_witness("amplifier", {{"B", 8}, {"c_out", 2}});
    const auto& e = eight.certificate.endpoint.counters;
    CHECK(e == CounterVector{0, 0, 0, 0, 256, 2, 512});
    const auto& v = eight.construction.vass();
    CHECK(validate_run(v, eight.certificate.run).final == eight.certificate.endpoint);
    // Four tests per round at two units of x1 each: B = 8 is one round.
    std::size_t tests = 0;
    for (auto t : eight.certificate.run.steps)
        tests += v.transition(t).effect[0] == -2;
    CHECK(tests == 4);
    CHECK_THROWS_AS(canonical_witness("amplifier", {{"B", 4}}), InfeasibleParams);
}

TEST_CASE("zero-test budget")
{
    CHECK(zero_test_budget(3, 2, 4) == 48);
    CHECK(zero_test_budget(1, 1, 7) == 2);
    CHECK_THROWS_AS(zero_test_budget(0, 1, 1), std::invalid_argument);
}

TEST_CASE("counter-automaton translations start where the contracts say")
{
    auto a = inc_test_dec();
    auto t = ca_to_vass_triple(a, 4, 3);
    CHECK(t.source.counters == CounterVector{4, 6, 24, 0, 0});
    CHECK(t.vass().dimension() == 5);
    auto p = ca_to_vass_pair(a, 5);
    CHECK(p.source.counters == CounterVector{10, 100, 0, 0});
    CHECK(p.vass().dimension() == 4);
}

TEST_CASE("triple translation on tiny automata")
{
    // inc, then a zero test on the incremented counter: never accepting.
    CounterAutomaton stuck("stuck", 1);
    stuck.add_state("i");
    stuck.add_state("m");
    stuck.add_state("f");
    stuck.add_transition(0, {1}, 1);
    stuck.add_transition(GuardedTransition{1, {-1}, 2, 0});
    stuck.set_initial(0);
    stuck.set_final(2);
    CHECK_FALSE(oracle::ca_accepts(stuck, 3, 2));
    auto c = ca_to_vass_triple(stuck, 3, 2);
    bool exhausted = false;
    CHECK_FALSE(detail::reaches(c, Caps{CounterVector{3, 4, 12, 3}, std::nullopt, 1'000'000}, 1, exhausted));
    CHECK(exhausted);

    CounterAutomaton idle("idle", 1);
    idle.add_state("q");
    idle.set_initial(0);
    idle.set_final(0);
    auto ci = ca_to_vass_triple(idle, 3, 0);
    CHECK(ci.source.counters == CounterVector{3, 0, 0, 0});
    CHECK(detail::reaches(ci, Caps{CounterVector{3, 0, 0, 3}, std::nullopt, 1000}, 1, exhausted));

    auto itd = ca_to_vass_triple(inc_test_dec(), 3, 1);
    CHECK(detail::reaches(itd, Caps{CounterVector{3, 2, 6, 3, 3}, std::nullopt, 1'000'000}, 1, exhausted));
}

TEST_CASE("pair translation accepts the inc-test-dec automaton")
{
    auto c = ca_to_vass_pair(inc_test_dec(), 3);
    bool exhausted = false;
    CHECK(detail::reaches(c, Caps{CounterVector{6, 37, 6, 6}, std::nullopt, 5'000'000}, 1, exhausted));
}
