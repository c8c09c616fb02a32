#include "price_raise.hpp"

#include <algorithm>
#include <set>

#include "mmeq/error.hpp"
#include "mmeq/flow.hpp"

namespace mmeq::detail {

namespace {

// Agents adjacent to the given goods, ascending, deduplicated.
std::vector<int> neighbourhood(const RaiseProblem& p, const std::vector<int>& goods) {
    std::vector<char> seen(p.agent_count, 0);
    for (int g : goods)
        for (int i : p.agents_of_good[g]) seen[i] = 1;
    std::vector<int> out;
    for (int i = 0; i < p.agent_count; ++i)
        if (seen[i]) out.push_back(i);
    return out;
}

// Last root of h(theta) = sum_i mu_i(theta) - theta*|goods| on
// [theta_start, +inf), or nullopt if h never goes negative. h is concave
// piecewise-linear, so we walk its segments; breakpoints are the points where
// an agent's curve switches from the unit-cap branch (slope 1) to the budget
// branch (slope s_i).
std::optional<Rational> last_root(const RaiseProblem& p, const std::vector<int>& goods,
                                  const std::vector<int>& agents) {
    const Rational start = p.theta_start;
    Rational val;  // h at the walk position
    std::set<Rational> bps;
    for (int i : agents) {
        const MoneyCurve& mc = p.money[i];
        internal_check(mc.s < Rational(1), "money slope must stay below 1");
        internal_check(mc.a.sign() > 0, "money intercept must be positive");
        val += mc.eval(start);
        Rational bp = mc.breakpoint();
        if (bp > start) bps.insert(bp);
    }
    val -= start * Rational((long)goods.size());
    internal_check(val.sign() >= 0, "price raise started past a tight point");

    Rational cur = start;
    auto it = bps.begin();
    for (;;) {
        // Slope of h on (cur, next breakpoint).
        Rational slope = -Rational((long)goods.size());
        for (int i : agents) slope += p.money[i].right_slope(cur);

        if (it == bps.end()) {
            if (slope.sign() >= 0) return std::nullopt;  // h >= val >= 0 forever
            return cur + val / (-slope);
        }
        Rational next = *it;
        Rational nval = val + slope * (next - cur);
        if (nval.sign() < 0) {
            internal_check(slope.sign() < 0, "h decreased on a nonnegative slope");
            return cur + val / (-slope);
        }
        cur = next;
        val = nval;
        ++it;
    }
}

// Goods of `goods` on the maximal min-cut source side of the parametric
// network at theta + eta. The maximal side absorbs every going-tight set and
// any good whose neighbours are already swallowed, so the returned set is the
// largest minimiser of h_S(theta + eta).
std::vector<int> max_cut_goods(const RaiseProblem& p, const std::vector<int>& goods,
                               const std::vector<int>& agents, const Rational& theta) {
    const int G = (int)goods.size(), A = (int)agents.size();
    // nodes: 0 = source, 1..G goods, G+1..G+A agents, G+A+1 = sink
    graph::FlowSolver<EtaRational> fs(G + A + 2);
    const int s = 0, t = G + A + 1;
    std::vector<int> agent_node(p.agent_count, -1);
    for (int k = 0; k < A; ++k) agent_node[agents[k]] = G + 1 + k;
    for (int k = 0; k < G; ++k) {
        fs.add_arc(s, 1 + k, EtaRational(theta, Rational(1)));
        for (int i : p.agents_of_good[goods[k]]) {
            internal_check(agent_node[i] >= 0, "good adjacent to an agent outside the pool");
            fs.add_infinite_arc(1 + k, agent_node[i]);
        }
    }
    for (int k = 0; k < A; ++k)
        fs.add_arc(G + 1 + k, t, p.money[agents[k]].eval_eta(theta));
    fs.solve(s, t);
    std::vector<char> side = fs.min_cut_source_side_maximal(t);
    std::vector<int> out;
    for (int k = 0; k < G; ++k)
        if (side[1 + k]) out.push_back(goods[k]);
    return out;
}

} // namespace

TightSetEvent find_going_tight_set(const RaiseProblem& prob) {
    internal_check(prob.good_count > 0, "price raise needs at least one good");
    internal_check((int)prob.agents_of_good.size() == prob.good_count &&
                       (int)prob.money.size() == prob.agent_count,
                   "raise problem shape mismatch");
    internal_check(prob.theta_start.sign() > 0, "price raise must start at a positive level");

    std::vector<int> cur(prob.good_count);
    for (int k = 0; k < prob.good_count; ++k) cur[k] = k;

    bool top = true;
    for (;;) {
        std::vector<int> agents = neighbourhood(prob, cur);
        std::optional<Rational> root = last_root(prob, cur, agents);
        if (!root) {
            internal_check(top, "nested subset lost its tight point");
            std::vector<int> witness;
            for (int g : cur)
                witness.push_back(g < (int)prob.good_ids.size() ? prob.good_ids[g] : g);
            fail("Infeasible",
                 "no price level makes this good set tight: the adjacent agents' money grows "
                 "at least as fast as the prices",
                 witness);
        }
        std::vector<int> cut = max_cut_goods(prob, cur, agents, *root);
        internal_check(!cut.empty(), "tight point certified but the cut is empty");
        if (cut.size() == cur.size()) {
            TightSetEvent ev;
            ev.theta = *root;
            ev.goods = cur;
            ev.agents = agents;
            // Certification. (1) exact tightness: h_{S*}(theta*) = 0.
            Rational h = -ev.theta * Rational((long)cur.size());
            for (int i : agents) h += prob.money[i].eval(ev.theta);
            internal_check(h.is_zero(), "tight set does not balance exactly");
            // (2) the full problem agrees: the maximal min cut at theta* + eta
            // over all goods is exactly S*.
            if (!top) {
                std::vector<int> all(prob.good_count);
                for (int k = 0; k < prob.good_count; ++k) all[k] = k;
                std::vector<int> check = max_cut_goods(prob, all, neighbourhood(prob, all), ev.theta);
                internal_check(check == cur, "descent result disagrees with the full-network cut");
            }
            return ev;
        }
        internal_check(cut.size() < cur.size(), "min cut escaped the candidate set");
        cur = std::move(cut);
        top = false;
    }
}

} // namespace mmeq::detail
