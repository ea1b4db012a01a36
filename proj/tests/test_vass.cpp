#include "catch_amalgamated.hpp"

#include <functional>
#include <random>

#include "vasslab/reductions.hpp"
#include "vasslab/vass.hpp"

using namespace vasslab;

namespace {

Vass two_state()
{
    Vass v("t", 2);
    v.add_state("q");
    v.add_state("p");
    v.add_transition(0, {-1, 1}, 1);
    v.add_transition(0, {-1, 0}, 1);
    v.add_transition(1, {1, 0}, 0);
    return v;
}

// Example 1 drawn by hand: s -> p1 -> p2 -> p3 -> q2 with one self-loop on
// each of p1..p4.
Vass example1_by_hand()
{
    Vass v("ex1", 2);
    for (auto s : {"s", "p1", "p2", "p3", "q2"})
        v.add_state(s);
    v.add_transition(0, {1, 0}, 1);
    v.add_transition(1, {-1, 1}, 1);
    v.add_transition(1, {0, 0}, 2);
    v.add_transition(2, {2, -1}, 2);
    v.add_transition(2, {0, 0}, 3);
    v.add_transition(3, {-1, 1}, 3);
    v.add_transition(3, {0, 0}, 4);
    v.add_transition(4, {2, -1}, 4);
    v.set_initial(0);
    v.set_final(4);
    return v;
}

// Counts simple cycles through each state by brute force; flat iff no
// state lies on two of them. Parallel edges give distinct cycles.
bool flat_by_enumeration(std::size_t n, const std::vector<std::pair<StateId, StateId>>& edges)
{
    std::vector<int> through(n, 0);
    std::vector<bool> on(n, false);
    std::vector<StateId> path;
    std::function<void(StateId, StateId)> walk = [&](StateId root, StateId at) {
        for (const auto& [a, b] : edges) {
            if (a != at)
                continue;
            if (b == root) {
                for (auto s : path)
                    ++through[s];
            } else if (b > root && !on[b]) {
                on[b] = true;
                path.push_back(b);
                walk(root, b);
                path.pop_back();
                on[b] = false;
            }
        }
    };
    for (StateId r = 0; r < n; ++r) {
        path = {r};
        on.assign(n, false);
        on[r] = true;
        walk(r, r);
    }
    return std::all_of(through.begin(), through.end(), [](int c) { return c <= 1; });
}

} // namespace

TEST_CASE("fire applies the effect and guards at zero")
{
    auto v = two_state();
    auto c = fire(v, v.config("q", {2, 0}), 0);
    CHECK(c == v.config("p", {1, 1}));
    CHECK_THROWS_AS(fire(v, v.config("q", {0, 0}), 1), RunError);
    try {
        fire(v, v.config("q", {0, 0}), 1);
    } catch (const RunError& e) {
        CHECK(e.kind() == FireError::negative_counter);
    }
    try {
        fire(v, v.config("p", {1, 0}), 0);
        FAIL("fired from the wrong state");
    } catch (const RunError& e) {
        CHECK(e.kind() == FireError::wrong_state);
    }
}

TEST_CASE("first edge of Example 1")
{
    auto v = example1_by_hand();
    CHECK(fire(v, v.config("s", {0, 0}), 0) == v.config("p1", {1, 0}));
}

TEST_CASE("validate_run replays runs and reports the failing step")
{
    auto v = two_state();
    auto r = validate_run(v, Run{v.config("q", {3, 1}), {}});
    CHECK(r.final == v.config("q", {3, 1}));
    CHECK(r.effect == CounterVector{0, 0});

    // q -0-> p then a second step that starts in q again.
    try {
        validate_run(v, Run{v.config("q", {3, 1}), {0, 1}});
        FAIL("mismatch not detected");
    } catch (const RunError& e) {
        CHECK(e.step() == 2);
        CHECK(e.kind() == FireError::wrong_state);
    }

    auto e1 = example1_by_hand();
    Run full{e1.config("s", {0, 0}), {0, 1, 2, 3, 4, 5, 5, 6, 7, 7}};
    auto out = validate_run(e1, full);
    CHECK(out.final == e1.config("q2", {4, 0}));
    CHECK(out.effect == CounterVector{4, 0});
}

TEST_CASE("effect is additive over any split and replay is deterministic")
{
    auto e1 = example1_by_hand();
    Run full{e1.config("s", {0, 0}), {0, 1, 2, 3, 4, 5, 5, 6, 7, 7}};
    auto whole = validate_run(e1, full);
    for (std::size_t k = 0; k <= full.steps.size(); ++k) {
        Run a{full.start, {full.steps.begin(), full.steps.begin() + static_cast<long>(k)}};
        auto ra = validate_run(e1, a);
        Run b{ra.final, {full.steps.begin() + static_cast<long>(k), full.steps.end()}};
        auto rb = validate_run(e1, b);
        CHECK(rb.final == whole.final);
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(ra.effect[i] + rb.effect[i] == whole.effect[i]);
    }
    CHECK(validate_run(e1, full).final == whole.final);
}

TEST_CASE("validate_run succeeds iff every prefix fires")
{
    auto v = two_state();
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        Run r{v.config("q", {static_cast<Counter>(rng() % 3), static_cast<Counter>(rng() % 3)}), {}};
        std::size_t len = rng() % 6;
        for (std::size_t i = 0; i < len; ++i)
            r.steps.push_back(rng() % 3);
        bool by_fire = true;
        Configuration c = r.start;
        for (auto t : r.steps) {
            try {
                c = fire(v, c, t);
            } catch (const RunError&) {
                by_fire = false;
                break;
            }
        }
        bool by_validate = true;
        try {
            validate_run(v, r);
        } catch (const RunError&) {
            by_validate = false;
        }
        CHECK(by_fire == by_validate);
    }
}

TEST_CASE("ca_validate_run enforces zero tests and the strict bound")
{
    CounterAutomaton a("ca", 2);
    a.add_state("i");
    a.set_initial(0);
    a.add_transition(0, {1, 0}, 0);
    GuardedTransition z{0, {0, 0}, 0, 0};
    a.add_transition(z);

    CHECK(ca_validate_run(a, Run{a.config("i", {0, 0}), {}}, 1) == a.config("i", {0, 0}));
    try {
        ca_validate_run(a, Run{a.config("i", {2, 0}), {1}}, 10);
        FAIL("zero test on a nonzero counter fired");
    } catch (const RunError& e) {
        CHECK(e.kind() == FireError::zero_test_failed);
    }
    try {
        ca_validate_run(a, Run{a.config("i", {0, 0}), {0, 0}}, 2);
        FAIL("bound not enforced");
    } catch (const RunError& e) {
        CHECK(e.kind() == FireError::bound_exceeded);
        CHECK(e.step() == 2);
    }
    CHECK_THROWS_AS(a.add_transition(GuardedTransition{0, {0, 0}, 0, 2}), ModelError);
}

TEST_CASE("model errors for dangling states and bad dimensions")
{
    Vass v("m", 2);
    v.add_state("a");
    CHECK_THROWS_AS(v.add_transition(0, {1, 0}, 3), ModelError);
    CHECK_THROWS_AS(v.add_transition(0, {1}, 0), ModelError);
    CHECK_THROWS_AS(v.add_state("a"), ModelError);
    CHECK_THROWS_AS(Vass("z", 0), ModelError);
}

TEST_CASE("is_flat on small examples")
{
    CHECK(is_flat(example1_by_hand()));
    Vass two_loops("two", 1);
    two_loops.add_state("q");
    two_loops.add_transition(0, {1}, 0);
    two_loops.add_transition(0, {-1}, 0);
    CHECK_FALSE(is_flat(two_loops));
    CHECK(is_flat(subset_sum_to_vass({3, {1, 2}}).vass()));
}

TEST_CASE("is_flat agrees with cycle enumeration on graphs up to 4 states and 6 edges")
{
    std::mt19937_64 rng(11);
    int checked = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
        // Every multiset of up to 6 edges is too many for n = 4; cover
        // n <= 2 exhaustively and sample the rest heavily.
        const std::size_t pairs = n * n;
        for (std::size_t m = 0; m <= 6; ++m) {
            std::size_t total = 1;
            for (std::size_t k = 0; k < m; ++k)
                total *= pairs;
            const bool exhaustive = total <= 4096;
            std::size_t samples = exhaustive ? total : 3000;
            for (std::size_t code = 0; code < samples; ++code) {
                std::vector<std::pair<StateId, StateId>> edges;
                std::size_t x = exhaustive ? code : rng();
                for (std::size_t k = 0; k < m; ++k) {
                    auto e = x % pairs;
                    x /= pairs;
                    if (!exhaustive)
                        e = rng() % pairs;
                    edges.emplace_back(static_cast<StateId>(e / n), static_cast<StateId>(e % n));
                }
                Vass v("g", 1);
                for (std::size_t s = 0; s < n; ++s)
                    v.add_state("s" + std::to_string(s));
                for (const auto& [a, b] : edges)
                    v.add_transition(a, {0}, b);
                CHECK(is_flat(v) == flat_by_enumeration(n, edges));
                ++checked;
            }
        }
    }
    CHECK(checked > 10000);
}

TEST_CASE("encoded_size follows the stated accounting")
{
    Vass one("e", 1);
    one.add_state("q");
    CHECK(encoded_size(one, EncodingKind::unary) == 1);
    one.add_transition(0, {3}, 0);
    CHECK(encoded_size(one, EncodingKind::unary) == 1 + 2 + 4);
    CHECK(encoded_size(one, EncodingKind::binary) == 1 + 2 + 3);
    one.add_transition(0, {-8}, 0);
    CHECK(encoded_size(one, EncodingKind::unary) == 7 + 2 + 9);
    CHECK(encoded_size(one, EncodingKind::binary) == 6 + 2 + 5);
    CHECK(max_abs_entry(one) == 8);

    auto pump = pspace_pump({1, 1}).vass();
    auto u = encoded_size(pump, EncodingKind::unary);
    auto b = encoded_size(pump, EncodingKind::binary);
    CHECK(u >= b);
    CHECK(u < 10 * b * b);
}

TEST_CASE("pad_dimension keeps structure and appends zeros")
{
    auto v = example1_by_hand();
    auto p = pad_dimension(v, 4);
    CHECK(p.dimension() == 4);
    CHECK(p.transitions().size() == v.transitions().size());
    CHECK(p.transition(3).effect == CounterVector{2, -1, 0, 0});
    CHECK(p.initial() == v.initial());
    CHECK(p.final_state() == v.final_state());
    CHECK_THROWS_AS(pad_dimension(v, 1), ModelError);
}
