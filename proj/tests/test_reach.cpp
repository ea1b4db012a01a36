#include "catch_amalgamated.hpp"

#include <fstream>
#include <sstream>

#include "vasslab/compile.hpp"
#include "vasslab/oracles.hpp"
#include "vasslab/parse.hpp"
#include "vasslab/reach.hpp"
#include "vasslab/reductions.hpp"
#include "vasslab/verify.hpp"
#include "vasslab/witness.hpp"

using namespace vasslab;

namespace {

Compiled example1()
{
    return compile(expand(parse(example1_source)));
}

CounterAutomaton inc_test_dec()
{
    std::ifstream in(std::string(VASSLAB_SAMPLES) + "/inc_test_dec.ca");
    std::stringstream ss;
    ss << in.rdbuf();
    return read_counter_automaton(ss.str());
}

std::set<Configuration> reached(const Vass& v, const Configuration& src, CounterVector caps, unsigned jobs = 1)
{
    ExploreOptions eo;
    eo.jobs = jobs;
    auto rep = explore(v, src, Caps{std::move(caps), std::nullopt, 1'000'000}, eo);
    REQUIRE(rep.exhausted);
    return {rep.hits.begin(), rep.hits.end()};
}

} // namespace

TEST_CASE("explore without transitions returns the source alone")
{
    Vass v("still", 2);
    v.add_state("q");
    auto rep = explore(v, v.config("q", {1, 2}), Caps{CounterVector{5, 5}, std::nullopt, 10});
    CHECK(rep.exhausted);
    CHECK(rep.explored == 1);
    REQUIRE(rep.hits.size() == 1);
    CHECK(rep.hits.front() == v.config("q", {1, 2}));
}

TEST_CASE("Example 1 reaches q2(4,0)")
{
    auto c = example1();
    auto all = reached(c.vass, Configuration{c.entry, {0, 0}}, {8, 8});
    CHECK(all.contains(Configuration{c.exit, {4, 0}}));
    for (const auto& cfg : all)
        if (cfg.state == c.exit)
            CHECK(cfg.counters[0] + 2 * cfg.counters[1] <= 4);
}

TEST_CASE("find_run: trivial, reachable, unreachable")
{
    auto c = example1();
    const auto& v = c.vass;
    Caps caps{CounterVector{8, 8}, std::nullopt, 100000};
    auto same = find_run(v, Configuration{c.entry, {0, 0}}, Configuration{c.entry, {0, 0}}, caps);
    REQUIRE(same.run);
    CHECK(same.run->steps.empty());

    auto four = find_run(v, Configuration{c.entry, {0, 0}}, Configuration{c.exit, {4, 0}}, caps);
    REQUIRE(four.run);
    CHECK(validate_run(v, *four.run).final == Configuration{c.exit, {4, 0}});

    Vass dec("dec", 1);
    dec.add_state("a");
    dec.add_state("b");
    dec.add_transition(0, {-1}, 1);
    auto none = find_run(dec, dec.config("a", {0}), dec.config("b", {0}), Caps{CounterVector{3}, std::nullopt, 100});
    CHECK_FALSE(none.run);
    CHECK(none.exhausted);
}

TEST_CASE("subset-sum witness takes both subtract branches for 3 = 1 + 2")
{
    auto c = subset_sum_to_vass({3, {1, 2}});
    const auto& v = c.vass();
    auto found = find_run(v, c.source, c.source, Caps{CounterVector{64, 64, 6, 512}, std::nullopt, 5'000'000});
    REQUIRE(found.run);
    auto r = validate_run(v, *found.run);
    CHECK(r.final == c.source);

    // A run to the exit with z = 0 exists, and every one subtracts both
    // values: skipping either leaves z positive.
    ExploreOptions eo;
    eo.target = c.target;
    eo.witnesses = true;
    auto rep = explore(v, c.source, Caps{CounterVector{64, 64, 6, 512}, std::nullopt, 5'000'000}, eo);
    CHECK(rep.exhausted);
    REQUIRE_FALSE(rep.witnesses.empty());
    for (const auto& w : rep.witnesses) {
        Counter z_spent = 0;
        for (auto t : w.steps)
            z_spent += std::min<Counter>(0, v.transition(t).effect[2]);
        CHECK(z_spent == -3);
    }
}

TEST_CASE("larger caps never lose configurations")
{
    auto c = example1();
    auto small = reached(c.vass, Configuration{c.entry, {0, 0}}, {3, 3});
    auto big = reached(c.vass, Configuration{c.entry, {0, 0}}, {6, 6});
    CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
    CHECK(big.size() > small.size());

    auto p = pspace_pump({1, 1});
    auto ps = reached(p.vass(), p.source, {8, 32, 16, 0, 40});
    auto pb = reached(p.vass(), p.source, {16, 128, 64, 0, 80});
    CHECK(std::includes(pb.begin(), pb.end(), ps.begin(), ps.end()));
}

TEST_CASE("parallel exploration gives identical reports")
{
    auto c = subset_sum_to_vass({7, {7, 7, 7}});
    ExploreOptions eo;
    eo.target = parse_pattern(c.vass(), "*(0,0,*,*)");
    eo.witnesses = true;
    Caps caps{CounterVector{16, 8, 7, 100}, std::nullopt, 5'000'000};
    eo.jobs = 1;
    auto one = explore(c.vass(), c.source, caps, eo);
    eo.jobs = 4;
    auto four = explore(c.vass(), c.source, caps, eo);
    CHECK(one.explored > 64);
    CHECK(one.explored == four.explored);
    CHECK(one.exhausted == four.exhausted);
    CHECK(one.hits == four.hits);
    CHECK(one.witnesses == four.witnesses);
}

TEST_CASE("node budget makes exploration inconclusive")
{
    auto c = example1();
    auto rep = explore(c.vass, Configuration{c.entry, {0, 0}}, Caps{CounterVector{8, 8}, std::nullopt, 2});
    CHECK_FALSE(rep.exhausted);
    CHECK_THROWS_AS(explore(c.vass, Configuration{c.entry, {9, 0}}, Caps{CounterVector{8, 8}, std::nullopt, 2}),
                    std::invalid_argument);
}

TEST_CASE("accepting-run search on small automata")
{
    CounterAutomaton idle("idle", 1);
    idle.add_state("q");
    idle.set_initial(0);
    idle.set_final(0);
    auto e = ca_accepting_run_search(idle, 1, 0);
    REQUIRE(e.run);
    CHECK(e.run->steps.empty());

    auto a = inc_test_dec();
    auto w = ca_accepting_run_search(a, 3, 4);
    REQUIRE(w.run);
    CHECK(w.run->steps.size() == 3);
    CHECK(ca_validate_run(a, *w.run, 3) == a.config("q3", {0, 0}));
    CHECK_FALSE(ca_accepting_run_search(a, 3, 0).run);

    // Needs a counter sum of 2 on the way, which a bound of 2 forbids.
    CounterAutomaton two("two", 1);
    two.add_state("i");
    two.add_state("f");
    two.add_transition(0, {2}, 1);
    two.add_transition(1, {-2}, 1);
    two.set_initial(0);
    two.set_final(1);
    CHECK_FALSE(ca_accepting_run_search(two, 2, 0).run);
    CHECK(ca_accepting_run_search(two, 3, 0).run);
}

TEST_CASE("accepting-run search agrees with the path-enumeration oracle")
{
    auto grid = detail::automaton_grid();
    std::size_t yes = 0;
    for (std::size_t k = 0; k < grid.size(); k += 7) {
        for (Counter B : {1, 2, 3}) {
            for (std::size_t tests : {0, 1, 2}) {
                bool got = ca_accepting_run_search(grid[k], B, tests).run.has_value();
                CHECK(got == oracle::ca_accepts(grid[k], B, tests));
                yes += got;
            }
        }
    }
    CHECK(yes > 0);
}

TEST_CASE("mutated witnesses miss their contract")
{
    auto w = canonical_witness("pspace", {{"s", 1}, {"n", 1}});
    const auto& v = w.construction.vass();
    auto rep = mutate_and_check(v, w.certificate, w.construction.target, 60, 5);
    CHECK(rep.mutants == 60);
    CHECK(rep.survivors.empty());
    CHECK(rep.rejected + rep.contract_violated == 60);

    // Dropping any single flush step breaks the endpoint or the replay.
    for (std::size_t i = 0; i < w.certificate.run.steps.size(); ++i) {
        Run m = w.certificate.run;
        m.steps.erase(m.steps.begin() + static_cast<std::ptrdiff_t>(i));
        bool survives = false;
        try {
            survives = w.construction.target.matches(validate_run(v, m).final);
        } catch (const RunError&) {
        }
        CHECK_FALSE(survives);
    }

    Run empty{w.certificate.run.start, {}};
    auto r = validate_run(v, empty);
    CHECK(r.final == w.construction.source);
    CHECK_FALSE(w.construction.target.matches(r.final));
}
