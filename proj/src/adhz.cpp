#include "mmeq/adhz.hpp"

#include <utility>

#include "mmeq/error.hpp"
#include "mmeq/hz.hpp"
#include "mmeq/verify.hpp"

namespace mmeq::adhz {

namespace {

Rational rational_pow(const Rational& base, unsigned long e) {
    Rational acc(1), sq = base;
    while (e) {
        if (e & 1UL) acc *= sq;
        e >>= 1UL;
        if (e) sq *= sq;
    }
    return acc;
}

void check_epsilon(const Rational& eps) {
    if (!(Rational(0) < eps && eps < Rational(1)))
        fail("InvalidEpsilon", "epsilon must lie strictly between 0 and 1, got " + eps.str());
}

} // namespace

Vec budget_update(const Mat& e, const Vec& p, const Rational& eps) {
    check_epsilon(eps);
    const int n = (int)e.size();
    if ((int)p.size() != n) fail("ShapeMismatch", "price vector length != n");
    Rational half = eps / Rational(2);
    Rational keep = Rational(1) - half;
    Vec b(n);
    for (int i = 0; i < n; ++i) {
        if ((int)e[i].size() != n) fail("ShapeMismatch", "endowment row length != n");
        Rational value;
        for (int j = 0; j < n; ++j) value += p[j] * e[i][j];
        b[i] = half + keep * value;
    }
    return b;
}

long iteration_bound(int n, const Rational& eps) {
    check_epsilon(eps);
    internal_check(n >= 1, "empty market");
    const Rational r = (Rational(1) - eps / Rational(2)) / (Rational(1) - eps);
    const Rational target = rational_pow(Rational(n) / eps, (unsigned long)n);
    // smallest M with r^M >= target, by doubling then binary search
    if (Rational(1) >= target) return 1;
    unsigned long hi = 1;
    while (rational_pow(r, hi) < target) {
        hi *= 2;
        internal_check(hi < (1UL << 40), "iteration bound blew up");
    }
    unsigned long lo = hi / 2; // r^lo < target (or lo == 0)
    while (lo + 1 < hi) {
        unsigned long mid = lo + (hi - lo) / 2;
        if (rational_pow(r, mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return (long)hi + 1;
}

ApproxReport solve_eps_adhz(const ADHZInstance& inst, const Rational& eps) {
    check_epsilon(eps);
    try {
        core::validate_instance(inst);
    } catch (const Error& e) {
        fail("InvalidInstance", e.what());
    }
    if (!core::is_dichotomous(inst.u))
        fail("InvalidInstance", "solver requires 0/1 likes; normalize bi-valued utilities first");

    const int n = inst.n();
    const Rational r = (Rational(1) - eps / Rational(2)) / (Rational(1) - eps);
    const long bound = iteration_bound(n, eps);

    ApproxReport out;
    Vec b(n, eps / Rational(2));
    out.report = hz::solve_hz(HZInstance{inst.u, b});
    out.iterations = 1;
    out.trace.push_back({b, out.report.prices.p, out.report.x});

    Vec p_prev;
    for (;;) {
        const Vec& p = out.report.prices.p;
        // running invariants: revenue <= money <= n, equal rows get equal budgets
        Rational sum_p, sum_b;
        for (const Rational& v : p) sum_p += v;
        for (const Rational& v : b) sum_b += v;
        internal_check(sum_p <= sum_b && sum_b <= Rational(n), "price/budget mass invariant broken");
        for (int i = 0; i < n; ++i)
            for (int k = i + 1; k < n; ++k)
                if (inst.e[i] == inst.e[k])
                    internal_check(b[i] == b[k], "equal endowments got unequal budgets");

        if (out.iterations >= 2) {
            bool done = true;
            for (int j = 0; j < n && done; ++j)
                if (p[j] > r * p_prev[j]) done = false;
            if (done) break;
        }
        internal_check(out.iterations + 1 <= bound, "iteration bound exceeded");

        Vec b_next = budget_update(inst.e, p, eps);
        for (int i = 0; i < n; ++i)
            internal_check(b_next[i] >= b[i], "budgets must be nondecreasing across iterations");
        EquilibriumReport next = hz::reprice_warm_start(inst.u, b, b_next, out.report.x, p);
        p_prev = p;
        b = std::move(b_next);
        out.report = std::move(next);
        ++out.iterations;
        out.trace.push_back({b, out.report.prices.p, out.report.x});
    }

    Verdict window =
        verify::verify_eps_adhz(inst, out.report.x, out.report.prices.p, out.report.prices.b, eps);
    if (!window.pass())
        fail("InternalError", "approximation failed self-verification: " + window.summary());
    out.report.verdicts = std::move(window); // subsumes the plain equilibrium checks
    out.report.iterations = out.iterations;  // the scheme's K, not the last re-solve's count
    return out;
}

} // namespace mmeq::adhz
