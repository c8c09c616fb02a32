#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "mmeq/bipartite.hpp"
#include "mmeq/core.hpp"
#include "mmeq/error.hpp"
#include "mmeq/onedlad.hpp"
#include "mmeq/verify.hpp"
#include "support.hpp"

using namespace mmeq;
using testsup::Q;

TEST_CASE("variable budgets: money, bang-per-buck and utility identities") {
    SUBCASE("no outside option") {
        auto vb = onedlad::agent_money(Q("0"), Q("2"));
        CHECK(vb.m == Q("1"));
        CHECK(vb.gamma == Q("1/2"));
        CHECK(vb.v == Q("1/2"));
    }
    SUBCASE("outside option 1/2 at level 4") {
        auto vb = onedlad::agent_money(Q("1/2"), Q("4"));
        CHECK(vb.m == Q("3"));
        CHECK(vb.gamma == Q("1/4"));
        CHECK(vb.v == Q("3/4"));
        CHECK(vb.m * vb.gamma == vb.v);
        CHECK(vb.m == vb.v / (vb.v - Q("1/2")));
    }
    SUBCASE("domain validation") {
        try {
            (void)onedlad::agent_money(Q("0"), Q("1/2"));
            FAIL("expected ThetaBelowOne");
        } catch (const Error& e) {
            CHECK(e.code() == "ThetaBelowOne");
        }
        try {
            (void)onedlad::agent_money(Q("1"), Q("2"));
            FAIL("expected DisagreementOutOfRange");
        } catch (const Error& e) {
            CHECK(e.code() == "DisagreementOutOfRange");
        }
        CHECK_THROWS_AS((void)onedlad::agent_money(Q("-1/10"), Q("2")), Error);
    }
}

TEST_CASE("first tight set of a residual market") {
    UtilityMatrix u = {{Q("1"), Q("0")}, {Q("1"), Q("0")}};
    graph::LikeGraph g = graph::LikeGraph::from_utilities(u);

    SUBCASE("one shared good, outside options 1/2 and 0: tight at 4") {
        onedlad::TightSet ts = onedlad::find_tight_set(g, {0, 1}, {0}, {Q("1/2"), Q("0")});
        CHECK(ts.theta == Q("4"));
        CHECK(ts.goods == std::vector<int>{0});
        CHECK(ts.agents == std::vector<int>{0, 1});
    }
    SUBCASE("a single no-option buyer makes the good tight immediately") {
        onedlad::TightSet ts = onedlad::find_tight_set(g, {1}, {0}, {Q("0"), Q("0")});
        CHECK(ts.theta == Q("1"));
        CHECK(ts.agents == std::vector<int>{1});
    }
    SUBCASE("goods outnumbering their buyers violate the entry condition") {
        UtilityMatrix wide = {{Q("1"), Q("1")}, {Q("0"), Q("0")}};
        graph::LikeGraph gw = graph::LikeGraph::from_utilities(wide);
        try {
            (void)onedlad::find_tight_set(gw, {0}, {0, 1}, {Q("0"), Q("0")});
            FAIL("expected HallViolation");
        } catch (const Error& e) {
            CHECK(e.code() == "HallViolation");
            CHECK(!e.witness.empty());
        }
    }
    SUBCASE("outside options adding to a whole unit never go tight") {
        try {
            (void)onedlad::find_tight_set(g, {0, 1}, {0}, {Q("2/3"), Q("2/3")});
            FAIL("expected Infeasible");
        } catch (const Error& e) {
            CHECK(e.code() == "Infeasible");
            CHECK(e.witness == std::vector<int>{0});
        }
    }
}

TEST_CASE("flow subroutine freezes stages at strictly increasing levels") {
    UtilityMatrix u = {{Q("1"), Q("0"), Q("0")},
                       {Q("1"), Q("0"), Q("0")},
                       {Q("0"), Q("1"), Q("0")}};
    graph::LikeGraph g = graph::LikeGraph::from_utilities(u);
    Vec c = {Q("0"), Q("0"), Q("0")};
    onedlad::FlowResult fr = onedlad::flow_subroutine(g, {0, 1, 2}, {0, 1}, c, 3);

    REQUIRE(fr.stages.size() == 2);
    CHECK(fr.stages[0].theta == Q("1"));
    CHECK(fr.stages[0].goods == std::vector<int>{1});
    CHECK(fr.stages[0].agents == std::vector<int>{2});
    CHECK(fr.stages[1].theta == Q("2"));
    CHECK(fr.stages[1].goods == std::vector<int>{0});
    CHECK(fr.stages[1].agents == std::vector<int>{0, 1});

    CHECK(fr.p == Vec{Q("2"), Q("1"), Q("0")});
    CHECK(fr.v == Vec{Q("1/2"), Q("1/2"), Q("1")});
    CHECK(fr.q == Vec{Q("0"), Q("0"), Q("0")});
    CHECK(fr.x[2][1] == Q("1"));
    CHECK(fr.x[0][0] == Q("1/2"));
    CHECK(fr.x[1][0] == Q("1/2"));
    CHECK(fr.x[0][2] == Q("0")); // no filler inside the subroutine
}

TEST_CASE("bargaining solver: hand-worked instances") {
    SUBCASE("one contested good, outside options (1/2, 0)") {
        NBInstance inst{{{Q("1"), Q("0")}, {Q("1"), Q("0")}}, {Q("1/2"), Q("0")}};
        onedlad::NBSolution sol = onedlad::solve_1dlad(inst);
        CHECK(sol.v == Vec{Q("3/4"), Q("1/4")});
        CHECK(sol.p == Vec{Q("4"), Q("0")});
        CHECK(sol.q == Vec{Q("0"), Q("0")});
        Mat want = {{Q("3/4"), Q("1/4")}, {Q("1/4"), Q("3/4")}};
        CHECK(sol.x == want);
        REQUIRE(sol.stages.size() == 1);
        CHECK(sol.stages[0].theta == Q("4"));
        CHECK(verify::verify_1dlad_kkt(inst, sol.x, sol.p, sol.q).pass());
    }
    SUBCASE("a strong outside option caps an agent at a whole unit") {
        NBInstance inst{{{Q("1"), Q("1"), Q("0")},
                         {Q("1"), Q("1"), Q("0")},
                         {Q("1"), Q("1"), Q("0")}},
                        {Q("4/5"), Q("0"), Q("0")}};
        onedlad::NBSolution sol = onedlad::solve_1dlad(inst);
        CHECK(sol.v == Vec{Q("1"), Q("1/2"), Q("1/2")});
        CHECK(sol.p == Vec{Q("2"), Q("2"), Q("0")});
        CHECK(sol.q == Vec{Q("3"), Q("0"), Q("0")});
        REQUIRE(sol.stages.size() == 1);
        CHECK(sol.stages[0].theta == Q("2"));
        CHECK(sol.stages[0].goods == std::vector<int>{0, 1});
        CHECK(sol.x[0][2] == Q("0")); // the capped agent holds only liked goods
        CHECK(core::utilities_of_allocation(inst.u, sol.x) == sol.v);
    }
    SUBCASE("perfectly matchable market: free goods, offsets carry the prices") {
        NBInstance inst{{{Q("1"), Q("0")}, {Q("0"), Q("1")}}, {Q("1/2"), Q("0")}};
        onedlad::NBSolution sol = onedlad::solve_1dlad(inst);
        CHECK(sol.v == Vec{Q("1"), Q("1")});
        CHECK(sol.p == Vec{Q("0"), Q("0")});
        CHECK(sol.q == Vec{Q("2"), Q("1")});
        Mat identity = {{Q("1"), Q("0")}, {Q("0"), Q("1")}};
        CHECK(sol.x == identity);
        CHECK(sol.stages.empty());
    }
    SUBCASE("two markets clear in two stages") {
        NBInstance inst{{{Q("1"), Q("0"), Q("0")},
                         {Q("1"), Q("0"), Q("0")},
                         {Q("0"), Q("1"), Q("0")}},
                        {Q("0"), Q("0"), Q("0")}};
        onedlad::NBSolution sol = onedlad::solve_1dlad(inst);
        CHECK(sol.v == Vec{Q("1/2"), Q("1/2"), Q("1")});
        CHECK(sol.p == Vec{Q("2"), Q("1"), Q("0")});
        CHECK(sol.q == Vec{Q("0"), Q("0"), Q("0")});
        REQUIRE(sol.stages.size() == 2);
        CHECK(sol.stages[0].theta < sol.stages[1].theta);
    }
    SUBCASE("an agent adjacent to everything joins the cover, not the flow") {
        NBInstance inst{{{Q("1"), Q("1"), Q("1")},
                         {Q("1"), Q("0"), Q("0")},
                         {Q("1"), Q("0"), Q("0")}},
                        {Q("1/2"), Q("0"), Q("0")}};
        onedlad::NBSolution sol = onedlad::solve_1dlad(inst);
        CHECK(sol.v == Vec{Q("1"), Q("1/2"), Q("1/2")});
        CHECK(sol.p == Vec{Q("2"), Q("0"), Q("0")});
        CHECK(sol.q == Vec{Q("2"), Q("0"), Q("0")});
        CHECK(verify::verify_1dlad_kkt(inst, sol.x, sol.p, sol.q).pass());
    }
    SUBCASE("outside options summing to the shared capacity are infeasible") {
        NBInstance inst{{{Q("1"), Q("0")}, {Q("1"), Q("0")}}, {Q("2/3"), Q("2/3")}};
        try {
            (void)onedlad::solve_1dlad(inst);
            FAIL("expected Infeasible");
        } catch (const Error& e) {
            CHECK(e.code() == "Infeasible");
            CHECK(e.witness == std::vector<int>{0});
        }
    }
    SUBCASE("validation: disagreement range and dichotomous likes") {
        CHECK_THROWS_AS(
            (void)onedlad::solve_1dlad(NBInstance{{{Q("1"), Q("0")}, {Q("0"), Q("1")}},
                                                  {Q("1"), Q("0")}}),
            Error);
        CHECK_THROWS_AS(
            (void)onedlad::solve_1dlad(NBInstance{{{Q("1"), Q("2")}, {Q("0"), Q("1")}},
                                                  {Q("0"), Q("0")}}),
            Error);
    }
}

TEST_CASE("random bargaining markets: certification, determinism, invariance") {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> nd(2, 6);
    for (int round = 0; round < 80; ++round) {
        const int n = nd(rng);
        NBInstance inst = testsup::random_feasible_nb(n, rng);
        onedlad::NBSolution sol = onedlad::solve_1dlad(inst);

        // independent certificate
        CHECK(verify::verify_1dlad_kkt(inst, sol.x, sol.p, sol.q).pass());
        CHECK(core::utilities_of_allocation(inst.u, sol.x) == sol.v);

        // determinism
        onedlad::NBSolution sol2 = onedlad::solve_1dlad(inst);
        CHECK(sol.x == sol2.x);
        CHECK(sol.p == sol2.p);
        CHECK(sol.q == sol2.q);

        // stage levels start at 1 and increase strictly
        for (std::size_t k = 0; k < sol.stages.size(); ++k) {
            CHECK(sol.stages[k].theta >= Q("1"));
            if (k > 0) CHECK(sol.stages[k].theta > sol.stages[k - 1].theta);
        }

        // denominators stay within the rationality budget
        for (const Rational& pj : sol.p) CHECK(pj.den_bits() <= std::size_t(64 * n));
        for (const Vec& row : sol.x)
            for (const Rational& xv : row) CHECK(xv.den_bits() <= std::size_t(64 * n));

        if (round % 4 == 0) {
            // agent relabeling permutes the utilities with the agents
            std::vector<int> perm = testsup::random_permutation(n, rng);
            NBInstance shuffled;
            shuffled.u.resize(n);
            shuffled.c.resize(n);
            for (int i = 0; i < n; ++i) {
                shuffled.u[perm[i]] = inst.u[i];
                shuffled.c[perm[i]] = inst.c[i];
            }
            onedlad::NBSolution ssol = onedlad::solve_1dlad(shuffled);
            for (int i = 0; i < n; ++i) CHECK(ssol.v[perm[i]] == sol.v[i]);
            CHECK(ssol.p == sol.p); // goods untouched
        }
    }
}
