#pragma once

#include <vector>

#include "mmeq/core.hpp"

namespace mmeq::hz {

// Goods grouped by price, agents grouped by the cheapest price among their
// liked goods. Classes are sorted by price ascending. Every agent with at
// least one liked good lands in exactly one class.
struct PriceClasses {
    Vec price;                             // distinct prices, ascending
    std::vector<std::vector<int>> goods;   // goods priced price[k]
    std::vector<std::vector<int>> agents;  // agents whose cheapest liked price is price[k]
};
PriceClasses price_classes(const UtilityMatrix& u, const Vec& p);

// Effective budgets at a price vector: beta_i = min(b_i, cheapest liked price).
// An agent never needs more money than the price of one unit they like.
Vec effective_budgets(const UtilityMatrix& u, const Vec& b, const Vec& p);

// Rebuilds the canonical allocation supported by a price vector. Within each
// positive price class the class members' effective budgets are routed to the
// class goods by one exact max flow that must saturate both sides; zero-priced
// goods absorb the zero-class agents via a matching, then act as filler for
// everyone who stopped short of a full unit.
// Throws ZeroClassUncoverable, FlowDeficit(rho) when the prices do not carry a
// canonical equilibrium.
FractionalMatching allocation_from_prices(const HZInstance& inst, const Vec& p);

// Competitive equilibrium for dichotomous likes and arbitrary positive
// budgets. Deterministic, exact. Throws InvalidInstance.
EquilibriumReport solve_hz(const HZInstance& inst);

// Re-equilibrates after a componentwise budget increase, starting from a
// canonically supported equilibrium for the old budgets. Prices only rise;
// zero-priced goods stay free. Throws BudgetsDecreased, NotAnEquilibrium.
EquilibriumReport reprice_warm_start(const UtilityMatrix& u, const Vec& b_old, const Vec& b_new,
                                     const FractionalMatching& x_old, const Vec& p_old);

} // namespace mmeq::hz
