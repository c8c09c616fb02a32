#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mmeq/core.hpp"

namespace mmeq::verify {

// Agent-side demand analysis at prices p with budget b for a dichotomous
// utility row. An optimal bundle needs at most two goods: a cheapest liked
// good (price rhoL) and a cheapest filler (price rho0).
struct BundleAssessment {
    Rational maxUtility;           // f*: the best achievable liked mass
    Rational minCostAtMaxUtility;  // price of the cheapest optimal bundle
    Rational cheapestLikedPrice;   // rhoL
    Rational cheapestOverallPrice; // rho0
};

// f* = 1 when rhoL <= b, else (b - rho0)/(rhoL - rho0); cost f*rhoL + (1-f*)rho0.
// Throws NoLikedGood, UnaffordableUnit (rho0 > b).
BundleAssessment optimal_bundle(const Vec& u_row, const Vec& p, const Rational& b);

// Exact equilibrium certificate, one named check per condition:
//   (a) x is a fractional perfect matching,
//   (b) spend_i <= b_i,
//   (c) utility_i equals the optimal-bundle utility at (p, b_i),
//   (d) spend_i equals the cheapest cost of an optimal bundle.
// Requires dichotomous utilities (NotDichotomous) and matching shapes.
Verdict verify_hz_equilibrium(const HZInstance& inst, const FractionalMatching& x, const Vec& p);

// The approximate-exchange certificate: (x, p) is an equilibrium for budgets b,
// every budget sits in the window (1-eps)*<p,e_i> <= b_i <= eps + <p,e_i>, and
// agents with identical endowment rows have identical budgets.
Verdict verify_eps_adhz(const ADHZInstance& inst, const FractionalMatching& x, const Vec& p,
                        const Vec& b, const Rational& eps);

// The six optimality conditions of the bargaining program, checked exactly
// with v_i = sum_j u_ij x_ij:
//   (1) q_i >= 0                (2) p_j >= 0
//   (3) q_i > 0 => row i sums to 1
//   (4) p_j > 0 => column j sums to 1
//   (5) p_j + q_i >= u_ij / (v_i - c_i)
//   (6) x_ij > 0 => equality in (5)
// plus a feasibility check that x is a fractional perfect matching.
// Throws DisagreementNotExceeded(i) when v_i <= c_i (objective undefined).
Verdict verify_1dlad_kkt(const NBInstance& inst, const FractionalMatching& x, const Vec& p,
                         const Vec& q);

// Agents with identical endowment rows must not envy each other's bundle.
Verdict verify_envy_free_equal_type(const ADHZInstance& inst, const FractionalMatching& x);

// Every agent keeps at least (1 - eps) times the utility of consuming their
// own endowment.
Verdict verify_individual_rationality_approx(const ADHZInstance& inst, const FractionalMatching& x,
                                             const Rational& eps);

// Exhaustive coalition check, n <= 12 (TooLarge otherwise): a coalition blocks
// if reallocating its pooled endowment can push EVERY member strictly above
// v_i/(1-eps). Each coalition is decided by one exact max flow with
// infinitesimally inflated lower bounds, so "strictly above" needs no
// numerical slack; improving to exactly v_i/(1-eps) does not block.
Verdict verify_weak_core_small(const ADHZInstance& inst, const FractionalMatching& x,
                               const Rational& eps);

// Floating-point reference maximizer of sum_i log(v_i - c_i) over the
// achievable-utility polytope {0 <= v <= 1, sum_{i in T} v_i <= |N(T)|},
// by a log-barrier Newton method; n <= 8. Feasibility (some v > c) is decided
// exactly first; throws Infeasible. Never used in production verdicts — it
// exists to cross-check the exact solver within 1e-6.
std::vector<double> nb_objective_oracle(const NBInstance& inst);

struct MisreportOutcome {
    Rational honest;                    // agent's true utility when reporting truthfully
    std::optional<Rational> misreport;  // true utility under the misreport; empty if skipped
    std::string note;                   // reason when skipped (e.g. misreport made the instance infeasible)
};

// Solves the bargaining mechanism twice — honest row vs reported row — and
// evaluates agent `agent`'s allocation under the TRUE utility row both times.
// Misreports that make the instance infeasible are reported as skipped.
MisreportOutcome misreport_audit(const NBInstance& inst, int agent, const Vec& reported_row);

} // namespace mmeq::verify
