#include "mmeq/hz.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "mmeq/bipartite.hpp"
#include "mmeq/error.hpp"
#include "mmeq/flow.hpp"
#include "mmeq/verify.hpp"
#include "price_raise.hpp"

namespace mmeq::hz {

namespace {

Rational cheapest_liked(const UtilityMatrix& u, const Vec& p, int i) {
    bool found = false;
    Rational best;
    for (int j = 0; j < (int)p.size(); ++j) {
        if (u[i][j].is_zero()) continue;
        if (!found || p[j] < best) best = p[j], found = true;
    }
    internal_check(found, "agent with no liked good reached price grouping");
    return best;
}

EquilibriumReport make_report(const HZInstance& inst, FractionalMatching x, Vec p, int iterations) {
    EquilibriumReport rep;
    rep.utilities = core::utilities_of_allocation(inst.u, x);
    rep.x = std::move(x);
    rep.prices.p = std::move(p);
    rep.prices.q.assign(inst.n(), Rational(0));
    rep.prices.b = inst.b;
    rep.iterations = iterations;
    rep.verdicts = verify::verify_hz_equilibrium(inst, rep.x, rep.prices.p);
    if (!rep.verdicts.pass())
        fail("InternalError", "solver output failed self-verification: " + rep.verdicts.summary());
    return rep;
}

// Raise the common price of `goods` from theta using the pooled budgets of the
// active `agents` (liked arcs only), freezing each maximal going-tight set at
// its exact tight point and removing it together with its adjacent agents.
// Writes final prices into p, returns the number of tight events.
int raise_and_freeze(const UtilityMatrix& u, const Vec& budgets, std::vector<int> goods,
                     std::vector<int> agents, Rational theta, Vec& p) {
    int events = 0;
    Rational prev = theta;
    while (!goods.empty()) {
        internal_check(!agents.empty(), "active goods left without any buyer money");
        detail::RaiseProblem prob;
        prob.good_count = (int)goods.size();
        prob.agent_count = (int)agents.size();
        prob.money.reserve(agents.size());
        for (int i : agents) prob.money.push_back(detail::MoneyCurve{budgets[i], Rational(0)});
        prob.agents_of_good.resize(goods.size());
        for (int k = 0; k < (int)goods.size(); ++k) {
            for (int a = 0; a < (int)agents.size(); ++a)
                if (!u[agents[a]][goods[k]].is_zero()) prob.agents_of_good[k].push_back(a);
        }
        prob.theta_start = theta;
        prob.good_ids = goods;

        detail::TightSetEvent ev = detail::find_going_tight_set(prob);
        internal_check(events == 0 ? ev.theta >= prev : ev.theta > prev,
                       "tight points must increase within a stage");
        prev = ev.theta;
        ++events;

        std::vector<char> dropGood((int)goods.size(), 0), dropAgent((int)agents.size(), 0);
        for (int k : ev.goods) {
            p[goods[k]] = ev.theta;
            dropGood[k] = 1;
        }
        for (int a : ev.agents) dropAgent[a] = 1;
        std::vector<int> g2, a2;
        for (int k = 0; k < (int)goods.size(); ++k)
            if (!dropGood[k]) g2.push_back(goods[k]);
        for (int a = 0; a < (int)agents.size(); ++a)
            if (!dropAgent[a]) a2.push_back(agents[a]);
        goods = std::move(g2);
        agents = std::move(a2);
        theta = ev.theta;
    }
    internal_check(agents.empty(), "every pooled agent must be adjacent to some frozen set");
    return events;
}

} // namespace

PriceClasses price_classes(const UtilityMatrix& u, const Vec& p) {
    const int n = (int)p.size();
    std::map<Rational, int> index;
    for (int j = 0; j < n; ++j) index.emplace(p[j], 0);
    PriceClasses cls;
    for (auto& [price, idx] : index) {
        idx = (int)cls.price.size();
        cls.price.push_back(price);
    }
    cls.goods.resize(cls.price.size());
    cls.agents.resize(cls.price.size());
    for (int j = 0; j < n; ++j) cls.goods[index[p[j]]].push_back(j);
    for (int i = 0; i < (int)u.size(); ++i) cls.agents[index[cheapest_liked(u, p, i)]].push_back(i);
    return cls;
}

Vec effective_budgets(const UtilityMatrix& u, const Vec& b, const Vec& p) {
    Vec beta(b.size());
    for (int i = 0; i < (int)b.size(); ++i) beta[i] = min(b[i], cheapest_liked(u, p, i));
    return beta;
}

FractionalMatching allocation_from_prices(const HZInstance& inst, const Vec& p) {
    core::validate_instance(inst);
    if (!core::is_dichotomous(inst.u))
        fail("NotDichotomous", "canonical allocations are defined for 0/1 likes");
    const int n = inst.n();
    if ((int)p.size() != n) fail("ShapeMismatch", "price vector length != n");
    for (int j = 0; j < n; ++j)
        if (p[j].sign() < 0) fail("InvalidInstance", "negative price for good " + std::to_string(j));

    PriceClasses cls = price_classes(inst.u, p);
    FractionalMatching x(n, Vec(n, Rational(0)));
    Vec row_used(n, Rational(0)), col_used(n, Rational(0));

    graph::LikeGraph g = graph::LikeGraph::from_utilities(inst.u);
    for (int k = 0; k < (int)cls.price.size(); ++k) {
        const Rational& rho = cls.price[k];
        const std::vector<int>& G = cls.goods[k];
        const std::vector<int>& A = cls.agents[k];
        if (rho.is_zero()) {
            // Zero class: its agents take one whole free liked good each.
            std::vector<char> am(n, 0), gm(n, 0);
            for (int i : A) am[i] = 1;
            for (int j : G) gm[j] = 1;
            graph::Matching m = graph::max_matching(g, am, gm);
            if (m.size != (int)A.size()) {
                std::vector<int> unmatched;
                for (int i : A)
                    if (m.good_of_agent[i] < 0) unmatched.push_back(i);
                fail("ZeroClassUncoverable",
                     "the free goods cannot give every zero-class agent a whole liked unit",
                     unmatched);
            }
            for (int i : A) {
                int j = m.good_of_agent[i];
                x[i][j] = Rational(1);
                row_used[i] = Rational(1);
                col_used[j] = Rational(1);
            }
            continue;
        }
        // Positive class: route each member's effective budget min(b_i, rho)
        // into the class goods; an equilibrium price vector saturates both the
        // goods side (revenue rho per good) and the agents side (everyone
        // spends their full effective budget).
        // nodes: 0 = source, 1..|A| agents, |A|+1..|A|+|G| goods, last = sink
        graph::FlowSolver<Rational> fs((int)A.size() + (int)G.size() + 2);
        const int s = 0, t = (int)A.size() + (int)G.size() + 1;
        Rational money_total;
        for (int a = 0; a < (int)A.size(); ++a) {
            Rational beta = min(inst.b[A[a]], rho);
            money_total += beta;
            fs.add_arc(s, 1 + a, beta);
        }
        std::vector<std::vector<int>> arc_id((int)A.size());
        for (int a = 0; a < (int)A.size(); ++a) {
            arc_id[a].assign((int)G.size(), -1);
            for (int gg = 0; gg < (int)G.size(); ++gg)
                if (!inst.u[A[a]][G[gg]].is_zero())
                    arc_id[a][gg] = fs.add_infinite_arc(1 + a, 1 + (int)A.size() + gg);
        }
        for (int gg = 0; gg < (int)G.size(); ++gg)
            fs.add_arc(1 + (int)A.size() + gg, t, rho);
        fs.solve(s, t);
        Rational goods_total = rho * Rational((long)G.size());
        if (fs.value() != goods_total || fs.value() != money_total) {
            std::string msg = "class at price " + rho.str() + " moves " + fs.value().str() +
                              " money, needs revenue " + goods_total.str() +
                              " and pooled effective budgets " + money_total.str();
            fail("FlowDeficit", msg, G);
        }
        for (int a = 0; a < (int)A.size(); ++a)
            for (int gg = 0; gg < (int)G.size(); ++gg) {
                if (arc_id[a][gg] < 0) continue;
                Rational f = fs.flow_on(arc_id[a][gg]);
                if (f.is_zero()) continue;
                Rational share = f / rho;
                x[A[a]][G[gg]] = share;
                row_used[A[a]] += share;
                col_used[G[gg]] += share;
            }
    }

    // Leftover agent capacity is absorbed by unallocated zero-priced goods
    // (they carry no utility and no cost): northwest-corner fill.
    std::vector<int> freeGoods;
    if (!cls.price.empty() && cls.price[0].is_zero())
        for (int j : cls.goods[0])
            if (col_used[j] < Rational(1)) freeGoods.push_back(j);
    std::size_t cursor = 0;
    for (int i = 0; i < n; ++i) {
        Rational need = Rational(1) - row_used[i];
        internal_check(need.sign() >= 0, "agent over-allocated before fill");
        while (need.sign() > 0) {
            internal_check(cursor < freeGoods.size(), "ran out of free goods during fill");
            int j = freeGoods[cursor];
            Rational room = Rational(1) - col_used[j];
            Rational take = min(need, room);
            x[i][j] += take;
            col_used[j] += take;
            need -= take;
            if (col_used[j] == Rational(1)) ++cursor;
        }
    }
    std::string why;
    internal_check(core::is_doubly_stochastic(x, &why), "canonical allocation is not doubly stochastic");
    return x;
}

EquilibriumReport solve_hz(const HZInstance& inst) {
    try {
        core::validate_instance(inst);
    } catch (const Error& e) {
        fail("InvalidInstance", e.what());
    }
    if (!core::is_dichotomous(inst.u))
        fail("InvalidInstance", "solver requires 0/1 likes; normalize bi-valued utilities first");
    const int n = inst.n();

    graph::LikeGraph g = graph::LikeGraph::from_utilities(inst.u);
    graph::CoverPartition cov = graph::min_vertex_cover_min_agents(g);
    // Goods outside the cover stay free; both cover sides are provably
    // nonempty (an all-agent cover always weighs more than the all-good one).
    internal_check(!cov.G1.empty() && !cov.A1.empty(), "degenerate cover partition");

    Vec p(n, Rational(0));
    Rational theta0 = inst.b[cov.A1[0]];
    for (int i : cov.A1) theta0 = min(theta0, inst.b[i]);
    int events = raise_and_freeze(inst.u, inst.b, cov.G1, cov.A1, theta0, p);

    FractionalMatching x = allocation_from_prices(inst, p);
    return make_report(inst, std::move(x), std::move(p), events);
}

EquilibriumReport reprice_warm_start(const UtilityMatrix& u, const Vec& b_old, const Vec& b_new,
                                     const FractionalMatching& x_old, const Vec& p_old) {
    const int n = (int)u.size();
    if ((int)b_old.size() != n || (int)b_new.size() != n || (int)x_old.size() != n ||
        (int)p_old.size() != n)
        fail("ShapeMismatch", "budget/allocation/price shapes must match the utility matrix");
    for (int i = 0; i < n; ++i)
        if (b_new[i] < b_old[i])
            fail("BudgetsDecreased",
                 "agent " + std::to_string(i) + ": " + b_new[i].str() + " < " + b_old[i].str(), {i});

    HZInstance old_inst{u, b_old};
    Verdict old_ok = verify::verify_hz_equilibrium(old_inst, x_old, p_old);
    if (!old_ok.pass())
        fail("NotAnEquilibrium",
             "the given pair is not an equilibrium for the old budgets: " + old_ok.summary());

    if (b_new == b_old) {
        EquilibriumReport rep;
        rep.x = x_old;
        rep.prices.p = p_old;
        rep.prices.q.assign(n, Rational(0));
        rep.prices.b = b_new;
        rep.utilities = core::utilities_of_allocation(u, x_old);
        rep.iterations = 0;
        rep.verdicts = old_ok;
        return rep;
    }

    // The warm start re-derives the allocation from the prices, so the prices
    // must carry the canonical class structure (class flows saturate, free
    // goods cover the zero class). Equilibria outside that family are valid
    // but not warm-startable.
    try {
        (void)allocation_from_prices(old_inst, p_old);
    } catch (const Error& e) {
        if (e.code() == "ZeroClassUncoverable" || e.code() == "FlowDeficit")
            fail("NotAnEquilibrium",
                 std::string("the old prices do not carry a canonical equilibrium: ") + e.what());
        throw;
    }

    // Price tiers: the positive price classes, lowest first. Raise the lowest
    // tier with the new budgets until a set goes tight (freeze it) or the tier
    // reaches the next tier's price (merge them). Zero-priced goods never rise:
    // their agents' cheapest liked price stays 0, so no money ever lands on them.
    struct Tier {
        Rational theta;
        std::vector<int> goods;
        std::vector<int> agents;
    };
    PriceClasses cls = price_classes(u, p_old);
    std::vector<Tier> tiers;
    for (int k = 0; k < (int)cls.price.size(); ++k)
        if (!cls.price[k].is_zero()) tiers.push_back({cls.price[k], cls.goods[k], cls.agents[k]});

    Vec p_new = p_old;
    int events = 0;
    while (!tiers.empty()) {
        Tier& L = tiers.front();
        internal_check(!L.goods.empty() && !L.agents.empty(),
                       "price tier lost its goods or its buyers");
        detail::RaiseProblem prob;
        prob.good_count = (int)L.goods.size();
        prob.agent_count = (int)L.agents.size();
        for (int i : L.agents) prob.money.push_back(detail::MoneyCurve{b_new[i], Rational(0)});
        prob.agents_of_good.resize(L.goods.size());
        for (int k = 0; k < (int)L.goods.size(); ++k)
            for (int a = 0; a < (int)L.agents.size(); ++a)
                if (!u[L.agents[a]][L.goods[k]].is_zero()) prob.agents_of_good[k].push_back(a);
        prob.theta_start = L.theta;
        prob.good_ids = L.goods;
        detail::TightSetEvent ev = detail::find_going_tight_set(prob);

        if (tiers.size() == 1 || ev.theta <= tiers[1].theta) {
            ++events;
            std::vector<char> dropGood(L.goods.size(), 0), dropAgent(L.agents.size(), 0);
            for (int k : ev.goods) {
                p_new[L.goods[k]] = ev.theta;
                dropGood[k] = 1;
            }
            for (int a : ev.agents) dropAgent[a] = 1;
            std::vector<int> gs, as;
            for (int k = 0; k < (int)L.goods.size(); ++k)
                if (!dropGood[k]) gs.push_back(L.goods[k]);
            for (int a = 0; a < (int)L.agents.size(); ++a)
                if (!dropAgent[a]) as.push_back(L.agents[a]);
            L.goods = std::move(gs);
            L.agents = std::move(as);
            L.theta = ev.theta;
            if (L.goods.empty()) {
                internal_check(L.agents.empty(), "tier agents must freeze with their goods");
                tiers.erase(tiers.begin());
            }
        } else {
            // No tight point below the next tier: lift the whole tier to that
            // price and merge the two money pools.
            Tier& T = tiers[1];
            T.goods.insert(T.goods.end(), L.goods.begin(), L.goods.end());
            T.agents.insert(T.agents.end(), L.agents.begin(), L.agents.end());
            std::sort(T.goods.begin(), T.goods.end());
            std::sort(T.agents.begin(), T.agents.end());
            tiers.erase(tiers.begin());
        }
    }

    for (int j = 0; j < n; ++j)
        internal_check(p_new[j] >= p_old[j], "warm start lowered a price");

    HZInstance new_inst{u, b_new};
    FractionalMatching x_new = allocation_from_prices(new_inst, p_new);
    EquilibriumReport rep;
    rep.utilities = core::utilities_of_allocation(u, x_new);
    rep.x = std::move(x_new);
    rep.prices.p = std::move(p_new);
    rep.prices.q.assign(n, Rational(0));
    rep.prices.b = b_new;
    rep.iterations = events;
    rep.verdicts = verify::verify_hz_equilibrium(new_inst, rep.x, rep.prices.p);
    if (!rep.verdicts.pass())
        fail("InternalError", "warm start failed self-verification: " + rep.verdicts.summary());
    return rep;
}

} // namespace mmeq::hz
