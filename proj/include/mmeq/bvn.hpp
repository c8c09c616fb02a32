#pragma once

#include <cstdint>
#include <vector>

#include "mmeq/core.hpp"

namespace mmeq::bvn {

// One lottery outcome: play `perm` (good index per agent) with probability
// `weight`.
struct Term {
    Rational weight;       // > 0
    std::vector<int> perm; // perm[i] = good handed to agent i
};

// Convex combination of permutation matrices reconstructing a doubly
// stochastic allocation exactly: sum of weight * permutation-matrix == x,
// weights sum to 1, at most n^2 - 2n + 2 terms.
struct LotteryDecomposition {
    std::vector<Term> terms;
};

// Birkhoff-von Neumann peeling: repeatedly pick a perfect matching inside the
// support of the remainder (one exists by Hall as long as anything is left),
// subtract the minimum entry along it, record the matching with that weight.
// Deterministic: matchings come from the fixed augmenting order of the
// bipartite core. Throws NotDoublyStochastic when x is not.
LotteryDecomposition bvn_decompose(const FractionalMatching& x);

// Deterministic seeded draw. The seed runs through the splitmix64 finalizer
// (a fixed, documented 64-bit mixing function) to give z, the uniform draw is
// the exact rational z / 2^64 in [0,1), and term t wins iff the draw lands in
// t's half-open cumulative-weight interval, intervals taken in term order.
std::vector<int> sample_matching(const LotteryDecomposition& d, std::uint64_t seed);

} // namespace mmeq::bvn
