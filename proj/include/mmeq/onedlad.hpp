#pragma once

#include <vector>

#include "mmeq/bipartite.hpp"
#include "mmeq/core.hpp"

namespace mmeq::onedlad {

// Price-level-dependent budget of a bargaining agent: at price level theta,
// gamma = 1/theta is the best attainable price-adjusted bang-per-buck,
// m = 1 + c*theta the money, v = c + 1/theta the utility.
// Identities: m * gamma = v and m = v/(v - c), exact.
struct VariableBudget {
    Rational m, gamma, v;
};
// Throws ThetaBelowOne (theta < 1), DisagreementOutOfRange (c outside [0,1)).
VariableBudget agent_money(const Rational& c, const Rational& theta);

// One freezing event: at level theta, goods S are exactly paid for by the
// money of their adjacent agents N(S); S is the maximal such set.
struct TightSet {
    Rational theta;
    std::vector<int> goods;   // S, ascending good ids
    std::vector<int> agents;  // N(S), ascending agent ids
};
using TightSetSequence = std::vector<TightSet>;

// First tight event when the residual market (agents A', goods G') has its
// common price raised from 1 with per-agent money min(1 + c_i*theta, theta).
// Requires Hall's condition |N(S) n A'| >= |S| on entry. Throws
// Infeasible(goods) when no set ever goes tight (the residual's disagreement
// mass c(N(G')) is at least |G'|).
TightSet find_tight_set(const graph::LikeGraph& g, const std::vector<int>& agents,
                        const std::vector<int>& goods, const Vec& c);

struct FlowResult {
    FractionalMatching x;  // n x n, nonzero only on A1 x G1
    Vec p;                 // n, nonzero only on G1
    Vec v, q;              // n, meaningful only on A1
    TightSetSequence stages;
};
// Successive tight sets: freeze p_j = theta_l on S_l, allocate by exact max
// flow at theta_l (x_ij = flow/theta_l), remove S_l and N(S_l), repeat until
// no goods remain. theta_l is strictly increasing and every theta_l >= 1.
FlowResult flow_subroutine(const graph::LikeGraph& g, const std::vector<int>& A1,
                           const std::vector<int>& G1, const Vec& c, int n);

struct NBSolution {
    FractionalMatching x;
    Vec p; // good prices
    Vec q; // agent price offsets
    Vec v; // utilities
    TightSetSequence stages;
};

// Nash-bargaining solution for dichotomous likes with disagreement utilities
// c in [0,1): maximizes sum_i log(v_i - c_i) over fractional perfect
// matchings. Perfectly matchable agents (whole market, or the cover side A2)
// get a whole liked unit and offset q_i = 1/(1 - c_i); the rest clear through
// flow_subroutine; leftovers are filled from unmatched free goods. The output
// is KKT-certified at runtime. Throws Infeasible (witness goods) plus
// validation errors.
NBSolution solve_1dlad(const NBInstance& inst);

} // namespace mmeq::onedlad
