#include "mmeq/bvn.hpp"

#include <cstddef>

#include "mmeq/bipartite.hpp"
#include "mmeq/error.hpp"

namespace mmeq::bvn {

namespace {

// Support graph of the remainder: edge (i, j) iff r[i][j] > 0.
graph::LikeGraph support_graph(const Mat& r) {
    const int n = static_cast<int>(r.size());
    graph::LikeGraph g;
    g.n = n;
    g.liked.resize(n);
    g.liked_by.resize(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (r[i][j].sign() > 0) {
                g.liked[i].push_back(j);
                g.liked_by[j].push_back(i);
            }
    return g;
}

} // namespace

LotteryDecomposition bvn_decompose(const FractionalMatching& x) {
    std::string why;
    if (!core::is_doubly_stochastic(x, &why)) fail("NotDoublyStochastic", why);
    const int n = static_cast<int>(x.size());
    if (n == 0) fail("NotDoublyStochastic", "empty allocation has no lottery");

    Mat r = x; // remainder; stays c * doubly-stochastic with c = 1 - placed weight
    LotteryDecomposition d;
    Rational placed; // total weight extracted so far

    while (placed < Rational(1)) {
        graph::Matching m = graph::max_matching(support_graph(r));
        // Birkhoff: a positively scaled doubly-stochastic matrix has a perfect
        // matching in its support.
        internal_check(m.size == n, "support of doubly-stochastic remainder lost a perfect matching");

        Term t;
        t.perm.resize(n);
        for (int i = 0; i < n; ++i) {
            t.perm[i] = m.good_of_agent[i];
            const Rational& entry = r[i][t.perm[i]];
            if (i == 0 || entry < t.weight) t.weight = entry;
        }
        internal_check(t.weight.sign() > 0, "zero-weight lottery term");

        for (int i = 0; i < n; ++i) r[i][t.perm[i]] -= t.weight;
        placed += t.weight;
        d.terms.push_back(std::move(t));
    }

    internal_check(placed == Rational(1), "lottery weights do not sum to one");
    for (const auto& row : r)
        for (const Rational& e : row) internal_check(e.is_zero(), "lottery reconstruction residue");
    // Each extraction zeroes >= 1 support entry and the last zeroes n at once.
    internal_check(static_cast<long>(d.terms.size()) <= static_cast<long>(n) * n - 2L * n + 2,
                   "lottery term count exceeds n^2 - 2n + 2");
    return d;
}

std::vector<int> sample_matching(const LotteryDecomposition& d, std::uint64_t seed) {
    internal_check(!d.terms.empty(), "sampling from an empty lottery");

    // splitmix64 finalizer; fixed constants for cross-language reproducibility.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;

    const Rational draw(mpz_class(static_cast<unsigned long>(z)), mpz_class(1) << 64);

    Rational cum;
    for (const Term& t : d.terms) {
        cum += t.weight;
        if (draw < cum) return t.perm; // half-open [prev, cum)
    }
    internal_check(false, "uniform draw escaped the unit interval");
    return d.terms.back().perm;
}

} // namespace mmeq::bvn
