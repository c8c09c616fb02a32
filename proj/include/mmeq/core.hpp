#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mmeq/rational.hpp"

namespace mmeq {

using Vec = std::vector<Rational>;
using Mat = std::vector<std::vector<Rational>>;

// Square nonnegative utility matrix, one row per agent. Solvers require the
// dichotomous (0/1) or bi-valued (<= 2 distinct values per row) forms;
// verifiers accept arbitrary nonnegative rationals where stated.
using UtilityMatrix = Mat;

// Doubly stochastic allocation: row i is agent i's probability shares.
using FractionalMatching = Mat;

struct HZInstance {
    UtilityMatrix u;
    Vec b; // positive budget per agent
    int n() const { return static_cast<int>(u.size()); }
};

struct ADHZInstance {
    UtilityMatrix u;
    Mat e; // endowment shares; doubly stochastic
    int n() const { return static_cast<int>(u.size()); }
};

// Nash-bargaining instance over dichotomous utilities with per-agent
// disagreement utilities c in [0,1).
struct NBInstance {
    UtilityMatrix u;
    Vec c;
    int n() const { return static_cast<int>(u.size()); }
};

using AnyInstance = std::variant<HZInstance, ADHZInstance, NBInstance>;

struct PriceSystem {
    Vec p; // price per good
    Vec q; // price-offset per agent (zero outside Nash-bargaining solutions)
    Vec b; // budget per agent
};

// One named pass/fail check with an exact-arithmetic witness description.
struct Check {
    std::string name;
    bool pass = false;
    std::string detail; // on fail: the witness and the violated inequality
};

struct Verdict {
    std::vector<Check> checks;
    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    void add(std::string name, bool ok, std::string detail = "") {
        checks.push_back({std::move(name), ok, std::move(detail)});
    }
    std::string summary() const;
};

struct EquilibriumReport {
    FractionalMatching x;
    PriceSystem prices;
    Vec utilities; // v_i = sum_j u_ij * x_ij, exact
    int iterations = 0;
    Verdict verdicts;
};

namespace core {

// Enforce all type invariants; throws Error with one of
//   NonSquare, NegativeEntry, NotDoublyStochastic, AgentLikesNothing,
//   DisagreementOutOfRange, NonPositiveBudget, NotDichotomous
// naming the offending index. Returns its argument on success.
const HZInstance& validate_instance(const HZInstance& inst);
const ADHZInstance& validate_instance(const ADHZInstance& inst);
const NBInstance& validate_instance(const NBInstance& inst);
const AnyInstance& validate_instance(const AnyInstance& inst);

bool is_dichotomous(const UtilityMatrix& u);

// True doubly-stochastic test; on failure fills *why with a witness line.
bool is_doubly_stochastic(const Mat& x, std::string* why = nullptr);

// v_i = sum_j u[i][j] * x[i][j]. Throws ShapeMismatch.
Vec utilities_of_allocation(const UtilityMatrix& u, const FractionalMatching& x);

// Affine reduction of a bi-valued matrix to a dichotomous one:
// u_orig[i][j] = low[i] + (high[i] - low[i]) * u01[i][j]. Constant rows map to
// all-1 rows with low == high (the agent is indifferent, so "likes everything"
// keeps the likes-at-least-one-good invariant). Throws MoreThanTwoValues.
struct BivaluedNormalization {
    UtilityMatrix u01;
    Vec low;  // a_i: the value behind a 0 entry
    Vec high; // b_i: the value behind a 1 entry
};
BivaluedNormalization bivalued_normalize(const UtilityMatrix& u);

// p'_j = 1 + r * (p_j - 1), the equilibrium-preserving price rescaling.
// Throws NonPositiveScale when r <= 0.
Vec scale_prices(const Vec& p, const Rational& r);

// Unit-budget HZ instance -> exchange instance with the uniform endowment
// e[i][j] = 1/n. Throws NonUnitBudgets.
ADHZInstance hz_to_adhz(const HZInstance& hz);

// The 10-agent exchange instance whose demand graph is a strongly connected
// double-diamond cycle; it admits no exact equilibrium, only approximate ones.
// Agents own their namesake good (identity endowment).
ADHZInstance counterexample_instance();

} // namespace core
} // namespace mmeq
