#pragma once

// Shared generators for the property tests. Everything is seeded mt19937_64
// so failures reproduce; all generated numbers are exact rationals.

#include <algorithm>
#include <random>
#include <vector>

#include "mmeq/core.hpp"

namespace testsup {

using mmeq::Mat;
using mmeq::Rational;
using mmeq::Vec;

inline Rational Q(const char* s) { return Rational::from_string(s); }

inline mmeq::UtilityMatrix random_dichotomous(int n, std::mt19937_64& rng) {
    std::uniform_int_distribution<unsigned long long> rows(1, (1ull << n) - 1);
    mmeq::UtilityMatrix u(n, Vec(n, Rational(0)));
    for (int i = 0; i < n; ++i) {
        unsigned long long mask = rows(rng);
        for (int j = 0; j < n; ++j)
            if (mask >> j & 1) u[i][j] = Rational(1);
    }
    return u;
}

inline std::vector<int> random_permutation(int n, std::mt19937_64& rng) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    return perm;
}

// Exact doubly-stochastic matrix: convex combination of `terms` random
// permutation matrices with small-integer weights.
inline Mat random_doubly_stochastic(int n, std::mt19937_64& rng, int terms = 3) {
    std::uniform_int_distribution<int> w(1, 9);
    std::vector<std::vector<int>> perms;
    std::vector<int> weights;
    int total = 0;
    for (int t = 0; t < terms; ++t) {
        perms.push_back(random_permutation(n, rng));
        weights.push_back(w(rng));
        total += weights.back();
    }
    Mat x(n, Vec(n, Rational(0)));
    for (int t = 0; t < terms; ++t)
        for (int i = 0; i < n; ++i) x[i][perms[t][i]] += Rational(weights[t], total);
    return x;
}

inline Vec random_budgets(int n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(1, 12), den(1, 6);
    Vec b(n);
    for (int i = 0; i < n; ++i) b[i] = Rational(num(rng), den(rng));
    return b;
}

inline mmeq::HZInstance random_hz(int n, std::mt19937_64& rng) {
    return {random_dichotomous(n, rng), random_budgets(n, rng)};
}

inline mmeq::ADHZInstance random_adhz(int n, std::mt19937_64& rng) {
    return {random_dichotomous(n, rng), random_doubly_stochastic(n, rng)};
}

// An adhz instance where some endowment rows are exact duplicates (equal-type
// agents): average pairs of rows, which keeps both row and column sums.
inline mmeq::ADHZInstance random_adhz_with_duplicates(int n, std::mt19937_64& rng) {
    mmeq::ADHZInstance inst = random_adhz(n, rng);
    std::uniform_int_distribution<int> pick(0, n - 1);
    int a = pick(rng), b = pick(rng);
    if (a != b) {
        for (int j = 0; j < n; ++j) {
            Rational avg = (inst.e[a][j] + inst.e[b][j]) / Rational(2);
            inst.e[a][j] = inst.e[b][j] = avg;
        }
        // equal types must report equal likes for the equal-budget clause to bite
        inst.u[b] = inst.u[a];
    }
    return inst;
}

// Feasibility of a bargaining instance, straight from the definition:
// sum_{i in T} c_i < |N(T)| for every nonempty coalition T (and 0 <= c < 1,
// which the generator guarantees). Exhaustive, for n <= ~16.
inline bool nb_feasible(const mmeq::NBInstance& inst) {
    const int n = inst.n();
    for (unsigned T = 1; T < (1u << n); ++T) {
        Rational csum;
        unsigned liked = 0;
        for (int i = 0; i < n; ++i)
            if (T >> i & 1) {
                csum += inst.c[i];
                for (int j = 0; j < n; ++j)
                    if (!inst.u[i][j].is_zero()) liked |= 1u << j;
            }
        int nb = 0;
        for (int j = 0; j < n; ++j) nb += liked >> j & 1;
        if (csum >= Rational(nb)) return false;
    }
    return true;
}

inline mmeq::NBInstance random_feasible_nb(int n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> cnum(0, 11);
    for (;;) {
        mmeq::NBInstance inst;
        inst.u = random_dichotomous(n, rng);
        inst.c.resize(n);
        for (int i = 0; i < n; ++i) inst.c[i] = Rational(cnum(rng), 16);
        if (nb_feasible(inst)) return inst;
    }
}

} // namespace testsup
