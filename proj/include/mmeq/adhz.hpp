#pragma once

#include <vector>

#include "mmeq/core.hpp"

namespace mmeq::adhz {

// Snapshot of one iteration: the budgets fed in, and the equilibrium found.
struct IterationRecord {
    Vec b;
    Vec p;
    FractionalMatching x;
};
using IterationTrace = std::vector<IterationRecord>;

struct ApproxReport {
    EquilibriumReport report; // final (x, p), budgets in report.prices.b
    IterationTrace trace;     // one record per iteration, k = 1..K
    int iterations = 0;       // K
};

// b_i = eps/2 + (1 - eps/2) * <p, e_i>, exact.
Vec budget_update(const Mat& e, const Vec& p, const Rational& eps);

// Smallest K such that r^K >= (n/eps)^n for r = (1-eps/2)/(1-eps), plus one:
// the a-priori cap on the iteration count, computed by exact rational
// powering (no floating logs).
long iteration_bound(int n, const Rational& eps);

// The approximation scheme for exchange markets with dichotomous likes:
// start every budget at eps/2, alternate budget_update with warm-started
// re-equilibration, and stop at the first K >= 2 with
// p^(K) <= ((1-eps/2)/(1-eps)) * p^(K-1) componentwise (zero prices pass
// trivially). The result is an equilibrium whose budgets sit in the window
// (1-eps)*<p,e_i> <= b_i <= eps + <p,e_i>. Throws InvalidEpsilon unless
// 0 < eps < 1, InvalidInstance.
ApproxReport solve_eps_adhz(const ADHZInstance& inst, const Rational& eps);

} // namespace mmeq::adhz
