#pragma once

#include <optional>
#include <vector>

#include "mmeq/rational.hpp"

namespace mmeq::detail {

// Money an agent can put on liked goods when their price level is theta:
//
//     mu(theta) = min(a + s * theta,  theta),        0 <= s < 1, a > 0.
//
// The second branch is the universal unit cap — nobody can spend more than
// the price of one whole unit. The first branch is the budget:
//   * fixed-budget markets:  a = b_i, s = 0      (mu = min(b_i, theta))
//   * bargaining markets:    a = 1,  s = c_i     (mu = min(1 + c_i*theta, theta))
// mu is concave piecewise-linear with a single breakpoint at a / (1 - s):
// below it the unit cap binds (slope 1), above it the budget binds (slope s).
struct MoneyCurve {
    Rational a;
    Rational s;

    Rational breakpoint() const { return a / (Rational(1) - s); }

    Rational eval(const Rational& theta) const {
        Rational budget = a + s * theta;
        return budget < theta ? budget : theta;
    }

    // Slope immediately to the right of theta.
    Rational right_slope(const Rational& theta) const {
        // theta < a/(1-s)  <=>  theta*(1-s) < a : unit-cap branch.
        return theta * (Rational(1) - s) < a ? Rational(1) : s;
    }

    // Value of mu at theta + eta, eta infinitesimal.
    EtaRational eval_eta(const Rational& theta) const {
        return EtaRational(eval(theta), right_slope(theta));
    }
};

// One same-price group of goods whose price is being raised uniformly,
// together with the agents whose money is trapped on them.
// agents_of_good[k] lists agent POSITIONS (indices into `money`); the engine
// never sees global ids except for diagnostics.
struct RaiseProblem {
    int good_count = 0;
    int agent_count = 0;
    std::vector<std::vector<int>> agents_of_good;
    std::vector<MoneyCurve> money;
    Rational theta_start;       // current common price; h_S(theta_start) >= 0 must hold
    std::vector<int> good_ids;  // optional, diagnostics only (Infeasible witness)
};

struct TightSetEvent {
    Rational theta;           // theta*: the last price level every subset can still afford
    std::vector<int> goods;   // S*: maximal going-tight set (positions, ascending)
    std::vector<int> agents;  // N(S*) (positions, ascending)
};

// Core of the price-raising algorithms. Let, for a good set S,
//     h_S(theta) = sum_{i in N(S)} mu_i(theta) - theta * |S|.
// All h_S are concave and h_S(theta_start) >= 0, theta_start > 0. The engine
// returns
//     theta* = max { theta : h_S(theta) >= 0 for every S }    (the last root)
// and S* = the largest minimiser of h_S(theta* + eta): the maximal set that is
// tight at theta* and dips steepest just after. Every steepest-dipping set is
// inside S*; flat-tight sets keep rising and are excluded unless a dipping
// superset absorbs them.
//
// Method: descend on maximal min cuts of the parametric network
// (source -> good at theta, liked good -> agent infinite, agent -> sink at
// mu_i(theta)) evaluated at theta + eta in Q[eta]; at most good_count
// max-flow calls plus one final certification flow.
//
// Throws Error("Infeasible") with the good ids as witness when the full set
// never goes tight (the adjacent agents' money grows at least as fast as the
// prices forever). Callers' curve families make that equivalent to no subset
// ever going tight: with fixed budgets (s = 0) every set eventually dips, and
// the bargaining stages freeze dipping subsets before the residue can hide
// one behind a rising total.
TightSetEvent find_going_tight_set(const RaiseProblem& prob);

} // namespace mmeq::detail
