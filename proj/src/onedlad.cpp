#include "mmeq/onedlad.hpp"

#include <algorithm>
#include <utility>

#include "mmeq/error.hpp"
#include "mmeq/flow.hpp"
#include "mmeq/verify.hpp"
#include "price_raise.hpp"

namespace mmeq::onedlad {

namespace {

// theta < 1/(1-c): the unit cap still binds — the agent buys one whole unit
// and keeps offset money; past that point the budget m = 1 + c*theta binds.
bool unit_capped(const Rational& c, const Rational& theta) {
    return theta * (Rational(1) - c) < Rational(1);
}

Rational money_at(const Rational& c, const Rational& theta) {
    Rational m = Rational(1) + c * theta;
    return m < theta ? m : theta;
}

} // namespace

VariableBudget agent_money(const Rational& c, const Rational& theta) {
    if (theta < Rational(1))
        fail("ThetaBelowOne", "price level " + theta.str() + " is below 1");
    if (c.sign() < 0 || c >= Rational(1))
        fail("DisagreementOutOfRange", "disagreement utility " + c.str() + " outside [0,1)");
    VariableBudget vb;
    vb.m = Rational(1) + c * theta;
    vb.gamma = Rational(1) / theta;
    vb.v = c + vb.gamma;
    internal_check(vb.m * vb.gamma == vb.v, "money identity m*gamma = v broken");
    return vb;
}

TightSet find_tight_set(const graph::LikeGraph& g, const std::vector<int>& agents,
                        const std::vector<int>& goods, const Vec& c) {
    internal_check(!goods.empty(), "tight-set search over no goods");
    {
        // Entry precondition: every good subset has at least as many adjacent
        // agents (otherwise some set is already past tight at level 1).
        std::vector<char> am(g.n, 0), gm(g.n, 0);
        for (int i : agents) am[i] = 1;
        for (int j : goods) gm[j] = 1;
        graph::Matching m = graph::max_matching(g, am, gm);
        if (m.size != (int)goods.size()) {
            std::vector<int> unmatched;
            for (int j : goods)
                if (m.agent_of_good[j] < 0) unmatched.push_back(j);
            fail("HallViolation", "goods outnumber their adjacent agents on entry", unmatched);
        }
    }
    std::vector<int> agent_pos(g.n, -1);
    for (int a = 0; a < (int)agents.size(); ++a) agent_pos[agents[a]] = a;

    detail::RaiseProblem prob;
    prob.good_count = (int)goods.size();
    prob.agent_count = (int)agents.size();
    for (int i : agents) prob.money.push_back(detail::MoneyCurve{Rational(1), c[i]});
    prob.agents_of_good.resize(goods.size());
    for (int k = 0; k < (int)goods.size(); ++k)
        for (int i : g.liked_by[goods[k]])
            if (agent_pos[i] >= 0) prob.agents_of_good[k].push_back(agent_pos[i]);
    prob.theta_start = Rational(1);
    prob.good_ids = goods;

    detail::TightSetEvent ev = detail::find_going_tight_set(prob);
    TightSet ts;
    ts.theta = ev.theta;
    for (int k : ev.goods) ts.goods.push_back(goods[k]);
    for (int a : ev.agents) ts.agents.push_back(agents[a]);
    std::sort(ts.goods.begin(), ts.goods.end());
    std::sort(ts.agents.begin(), ts.agents.end());
    return ts;
}

FlowResult flow_subroutine(const graph::LikeGraph& g, const std::vector<int>& A1,
                           const std::vector<int>& G1, const Vec& c, int n) {
    FlowResult res;
    res.x.assign(n, Vec(n, Rational(0)));
    res.p.assign(n, Rational(0));
    res.v.assign(n, Rational(0));
    res.q.assign(n, Rational(0));

    std::vector<int> resA = A1, resG = G1;
    Rational last_theta(0);
    while (!resG.empty()) {
        TightSet ts = find_tight_set(g, resA, resG, c);
        internal_check(ts.theta >= Rational(1), "tight level below 1");
        internal_check(ts.theta > last_theta, "tight levels must increase strictly");
        last_theta = ts.theta;

        Rational cN;
        for (int i : ts.agents) cN += c[i];
        internal_check(Rational((long)ts.goods.size()) > cN,
                       "tight set with non-positive price mass");
        bool anyCapped = false;
        for (int i : ts.agents) anyCapped = anyCapped || unit_capped(c[i], ts.theta);
        if (!anyCapped) {
            // classic tight-point formula theta = |N| / (|S| - c(N)), valid
            // exactly when every member is on the budget branch
            Rational expect =
                Rational((long)ts.agents.size()) / (Rational((long)ts.goods.size()) - cN);
            internal_check(ts.theta == expect, "tight level disagrees with the closed form");
        }

        // exact allocation flow at theta_l
        const int S = (int)ts.goods.size(), A = (int)ts.agents.size();
        graph::FlowSolver<Rational> fs(S + A + 2);
        const int src = 0, snk = S + A + 1;
        std::vector<int> apos(n, -1);
        for (int a = 0; a < A; ++a) apos[ts.agents[a]] = a;
        std::vector<std::vector<int>> arc(S);
        Rational money_total;
        for (int k = 0; k < S; ++k) {
            fs.add_arc(src, 1 + k, ts.theta);
            arc[k].assign(A, -1);
            for (int i : g.liked_by[ts.goods[k]])
                if (apos[i] >= 0) arc[k][apos[i]] = fs.add_infinite_arc(1 + k, 1 + S + apos[i]);
        }
        for (int a = 0; a < A; ++a) {
            Rational mu = money_at(c[ts.agents[a]], ts.theta);
            money_total += mu;
            fs.add_arc(1 + S + a, snk, mu);
        }
        fs.solve(src, snk);
        Rational revenue = ts.theta * Rational((long)S);
        internal_check(fs.value() == revenue && revenue == money_total,
                       "tight-set allocation flow failed to saturate both sides");

        for (int k = 0; k < S; ++k)
            for (int a = 0; a < A; ++a) {
                if (arc[k][a] < 0) continue;
                Rational f = fs.flow_on(arc[k][a]);
                if (!f.is_zero()) res.x[ts.agents[a]][ts.goods[k]] = f / ts.theta;
            }
        for (int k = 0; k < S; ++k) res.p[ts.goods[k]] = ts.theta;
        for (int i : ts.agents) {
            if (unit_capped(c[i], ts.theta)) {
                res.v[i] = Rational(1);
                res.q[i] = Rational(1) / (Rational(1) - c[i]) - ts.theta;
                internal_check(res.q[i].sign() > 0, "capped agent must keep a positive offset");
            } else {
                res.v[i] = c[i] + Rational(1) / ts.theta;
                res.q[i] = Rational(0);
            }
        }

        res.stages.push_back(ts);
        std::vector<char> dropG(n, 0), dropA(n, 0);
        for (int j : ts.goods) dropG[j] = 1;
        for (int i : ts.agents) dropA[i] = 1;
        std::vector<int> ng, na;
        for (int j : resG)
            if (!dropG[j]) ng.push_back(j);
        for (int i : resA)
            if (!dropA[i]) na.push_back(i);
        resG = std::move(ng);
        resA = std::move(na);
    }
    internal_check(resA.empty(), "agents left behind after all goods froze");
    return res;
}

NBSolution solve_1dlad(const NBInstance& inst) {
    core::validate_instance(inst);
    const int n = inst.n();
    graph::LikeGraph g = graph::LikeGraph::from_utilities(inst.u);

    NBSolution sol;
    sol.x.assign(n, Vec(n, Rational(0)));
    sol.p.assign(n, Rational(0));
    sol.q.assign(n, Rational(0));
    sol.v.assign(n, Rational(0));

    graph::Matching pm = graph::max_matching(g);
    if (pm.size == n) {
        // everyone can get a whole liked unit: all prices zero, offsets absorb
        // the bargaining weights
        for (int i = 0; i < n; ++i) {
            sol.x[i][pm.good_of_agent[i]] = Rational(1);
            sol.q[i] = Rational(1) / (Rational(1) - inst.c[i]);
            sol.v[i] = Rational(1);
        }
    } else {
        graph::CoverPartition cov = graph::min_vertex_cover_min_agents(g);
        internal_check(!cov.A1.empty() && !cov.G1.empty(), "degenerate cover partition");

        // covered agents match into free goods (Hall holds strictly there)
        std::vector<char> am(n, 0), gm(n, 0);
        for (int i : cov.A2) am[i] = 1;
        for (int j : cov.G2) gm[j] = 1;
        graph::Matching m2 = graph::max_matching(g, am, gm);
        internal_check(m2.size == (int)cov.A2.size(), "covered agents failed to match into free goods");
        for (int i : cov.A2) {
            sol.x[i][m2.good_of_agent[i]] = Rational(1);
            sol.q[i] = Rational(1) / (Rational(1) - inst.c[i]);
            sol.v[i] = Rational(1);
        }

        FlowResult fr = flow_subroutine(g, cov.A1, cov.G1, inst.c, n);
        for (int i : cov.A1) {
            sol.x[i] = fr.x[i];
            sol.v[i] = fr.v[i];
            sol.q[i] = fr.q[i];
        }
        for (int j : cov.G1) sol.p[j] = fr.p[j];
        sol.stages = std::move(fr.stages);

        // leftover capacity: pair partially served agents with the free goods
        // nobody matched, northwest-corner order (zero price, zero utility)
        std::vector<int> freeGoods;
        for (int j : cov.G2)
            if (m2.agent_of_good[j] < 0) freeGoods.push_back(j);
        Vec col_used(n, Rational(0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) col_used[j] += sol.x[i][j];
        std::size_t cursor = 0;
        for (int i : cov.A1) {
            Rational need(1);
            for (int j = 0; j < n; ++j) need -= sol.x[i][j];
            internal_check(need.sign() >= 0, "agent over-allocated before fill");
            while (need.sign() > 0) {
                internal_check(cursor < freeGoods.size(), "ran out of free goods during fill");
                int j = freeGoods[cursor];
                Rational room = Rational(1) - col_used[j];
                Rational take = min(need, room);
                sol.x[i][j] += take;
                col_used[j] += take;
                need -= take;
                if (col_used[j] == Rational(1)) ++cursor;
            }
        }
    }

    std::string why;
    internal_check(core::is_doubly_stochastic(sol.x, &why), "bargaining allocation not doubly stochastic");
    Vec check_v = core::utilities_of_allocation(inst.u, sol.x);
    internal_check(check_v == sol.v, "utility bookkeeping disagrees with the allocation");
    Verdict kkt = verify::verify_1dlad_kkt(inst, sol.x, sol.p, sol.q);
    if (!kkt.pass())
        fail("InternalError", "bargaining output failed KKT certification: " + kkt.summary());
    return sol;
}

} // namespace mmeq::onedlad
