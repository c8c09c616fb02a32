#include "mmeq/verify.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>
#include <utility>

#include "mmeq/bipartite.hpp"
#include "mmeq/error.hpp"
#include "mmeq/flow.hpp"
#include "mmeq/onedlad.hpp"

namespace mmeq::verify {

namespace {

Rational dot(const Vec& a, const Vec& b) {
    internal_check(a.size() == b.size(), "dot-product length mismatch");
    Rational s;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

std::string agent_tag(int i) { return "agent " + std::to_string(i); }

void require_dichotomous_row(const Vec& row) {
    for (const Rational& u : row)
        if (!u.is_zero() && u != Rational(1))
            fail("NotDichotomous", "utility entry " + u.str() + " is neither 0 nor 1");
}

} // namespace

BundleAssessment optimal_bundle(const Vec& u_row, const Vec& p, const Rational& b) {
    if (u_row.size() != p.size()) fail("ShapeMismatch", "utility row and price vector differ");
    internal_check(!p.empty(), "empty market");
    require_dichotomous_row(u_row);

    bool liked = false;
    BundleAssessment out;
    out.cheapestOverallPrice = p[0];
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] < out.cheapestOverallPrice) out.cheapestOverallPrice = p[j];
        if (u_row[j].is_zero()) continue;
        if (!liked || p[j] < out.cheapestLikedPrice) out.cheapestLikedPrice = p[j];
        liked = true;
    }
    if (!liked) fail("NoLikedGood", "the agent likes no good");
    if (out.cheapestOverallPrice > b)
        fail("UnaffordableUnit", "cheapest good costs " + out.cheapestOverallPrice.str() +
                                     " against budget " + b.str());
    if (out.cheapestLikedPrice <= b) {
        out.maxUtility = Rational(1);
        out.minCostAtMaxUtility = out.cheapestLikedPrice;
    } else {
        // rhoL > b >= rho0, so the denominator is positive and f* < 1:
        // spend everything, split between the cheapest liked good and the
        // cheapest filler.
        out.maxUtility =
            (b - out.cheapestOverallPrice) / (out.cheapestLikedPrice - out.cheapestOverallPrice);
        out.minCostAtMaxUtility = b;
    }
    return out;
}

Verdict verify_hz_equilibrium(const HZInstance& inst, const FractionalMatching& x, const Vec& p) {
    const int n = inst.n();
    if ((int)inst.b.size() != n || (int)x.size() != n || (int)p.size() != n)
        fail("ShapeMismatch", "instance, allocation and price shapes must agree");
    for (int i = 0; i < n; ++i) {
        if ((int)x[i].size() != n || (int)inst.u[i].size() != n)
            fail("ShapeMismatch", "non-square row " + std::to_string(i));
        require_dichotomous_row(inst.u[i]);
    }

    Verdict v;
    std::string why;
    bool dsOk = core::is_doubly_stochastic(x, &why);
    v.add("allocation-is-fractional-matching", dsOk, dsOk ? "" : why);

    bool pricesOk = true;
    std::string priceWhy;
    for (int j = 0; j < n && pricesOk; ++j)
        if (p[j].sign() < 0) {
            pricesOk = false;
            priceWhy = "good " + std::to_string(j) + " priced " + p[j].str();
        }
    v.add("prices-nonnegative", pricesOk, priceWhy);

    bool budgetOk = true, utilOk = true, costOk = true;
    std::string budgetWhy, utilWhy, costWhy;
    for (int i = 0; i < n; ++i) {
        Rational spend = dot(p, x[i]);
        Rational util = dot(inst.u[i], x[i]);
        if (budgetOk && spend > inst.b[i]) {
            budgetOk = false;
            budgetWhy = agent_tag(i) + " spends " + spend.str() + " > budget " + inst.b[i].str();
        }
        try {
            BundleAssessment ob = optimal_bundle(inst.u[i], p, inst.b[i]);
            if (utilOk && util != ob.maxUtility) {
                utilOk = false;
                utilWhy = agent_tag(i) + " has utility " + util.str() + ", optimal is " +
                          ob.maxUtility.str();
            }
            if (costOk && spend != ob.minCostAtMaxUtility) {
                costOk = false;
                costWhy = agent_tag(i) + " spends " + spend.str() +
                          ", cheapest optimal bundle costs " + ob.minCostAtMaxUtility.str();
            }
        } catch (const Error& e) {
            if (utilOk) {
                utilOk = false;
                utilWhy = agent_tag(i) + ": " + e.what();
            }
            if (costOk) {
                costOk = false;
                costWhy = agent_tag(i) + ": " + e.what();
            }
        }
    }
    v.add("within-budget", budgetOk, budgetWhy);
    v.add("maximal-utility", utilOk, utilWhy);
    v.add("cheapest-optimal-bundle", costOk, costWhy);
    return v;
}

Verdict verify_eps_adhz(const ADHZInstance& inst, const FractionalMatching& x, const Vec& p,
                        const Vec& b, const Rational& eps) {
    const int n = inst.n();
    if ((int)b.size() != n) fail("ShapeMismatch", "budget vector length != n");
    if (!(Rational(0) < eps && eps < Rational(1)))
        fail("InvalidEpsilon", "epsilon must lie strictly between 0 and 1");

    Verdict v = verify_hz_equilibrium(HZInstance{inst.u, b}, x, p);

    bool loOk = true, hiOk = true, eqOk = true;
    std::string loWhy, hiWhy, eqWhy;
    Vec endow_value(n);
    for (int i = 0; i < n; ++i) endow_value[i] = dot(p, inst.e[i]);
    for (int i = 0; i < n; ++i) {
        if (loOk && (Rational(1) - eps) * endow_value[i] > b[i]) {
            loOk = false;
            loWhy = agent_tag(i) + ": (1-eps)*" + endow_value[i].str() + " > " + b[i].str();
        }
        if (hiOk && b[i] > eps + endow_value[i]) {
            hiOk = false;
            hiWhy = agent_tag(i) + ": " + b[i].str() + " > eps + " + endow_value[i].str();
        }
        for (int k = i + 1; k < n && eqOk; ++k)
            if (inst.e[i] == inst.e[k] && b[i] != b[k]) {
                eqOk = false;
                eqWhy = "agents " + std::to_string(i) + " and " + std::to_string(k) +
                        " share an endowment but have budgets " + b[i].str() + " and " +
                        b[k].str();
            }
    }
    v.add("budget-window-lower", loOk, loWhy);
    v.add("budget-window-upper", hiOk, hiWhy);
    v.add("equal-endowments-equal-budgets", eqOk, eqWhy);
    return v;
}

Verdict verify_1dlad_kkt(const NBInstance& inst, const FractionalMatching& x, const Vec& p,
                         const Vec& q) {
    const int n = inst.n();
    if ((int)x.size() != n || (int)p.size() != n || (int)q.size() != n)
        fail("ShapeMismatch", "allocation/price/offset shapes must agree");
    core::validate_instance(inst);
    Vec v = core::utilities_of_allocation(inst.u, x);
    for (int i = 0; i < n; ++i)
        if (v[i] <= inst.c[i])
            fail("DisagreementNotExceeded",
                 agent_tag(i) + " has utility " + v[i].str() +
                     " not exceeding its disagreement utility " + inst.c[i].str(),
                 {i});

    Verdict out;
    std::string why;
    bool dsOk = core::is_doubly_stochastic(x, &why);
    out.add("allocation-is-fractional-matching", dsOk, dsOk ? "" : why);

    bool ok1 = true, ok2 = true, ok3 = true, ok4 = true, ok5 = true, ok6 = true;
    std::string w1, w2, w3, w4, w5, w6;
    for (int i = 0; i < n && ok1; ++i)
        if (q[i].sign() < 0) {
            ok1 = false;
            w1 = agent_tag(i) + " has offset " + q[i].str();
        }
    for (int j = 0; j < n && ok2; ++j)
        if (p[j].sign() < 0) {
            ok2 = false;
            w2 = "good " + std::to_string(j) + " priced " + p[j].str();
        }
    for (int i = 0; i < n && ok3; ++i) {
        if (q[i].sign() <= 0) continue;
        Rational row;
        for (int j = 0; j < n; ++j) row += x[i][j];
        if (row != Rational(1)) {
            ok3 = false;
            w3 = agent_tag(i) + " has offset " + q[i].str() + " but row sum " + row.str();
        }
    }
    for (int j = 0; j < n && ok4; ++j) {
        if (p[j].sign() <= 0) continue;
        Rational col;
        for (int i = 0; i < n; ++i) col += x[i][j];
        if (col != Rational(1)) {
            ok4 = false;
            w4 = "good " + std::to_string(j) + " priced " + p[j].str() + " but column sum " +
                 col.str();
        }
    }
    for (int i = 0; i < n; ++i) {
        Rational gap = v[i] - inst.c[i]; // > 0, checked above
        for (int j = 0; j < n; ++j) {
            Rational rhs = inst.u[i][j] / gap;
            Rational lhs = p[j] + q[i];
            if (ok5 && lhs < rhs) {
                ok5 = false;
                w5 = "(" + agent_tag(i) + ", good " + std::to_string(j) + "): " + lhs.str() +
                     " < " + rhs.str();
            }
            if (ok6 && x[i][j].sign() > 0 && lhs != rhs) {
                ok6 = false;
                w6 = "(" + agent_tag(i) + ", good " + std::to_string(j) + "): x = " +
                     x[i][j].str() + " but " + lhs.str() + " != " + rhs.str();
            }
        }
    }
    out.add("kkt-1-offsets-nonnegative", ok1, w1);
    out.add("kkt-2-prices-nonnegative", ok2, w2);
    out.add("kkt-3-offset-implies-full-row", ok3, w3);
    out.add("kkt-4-price-implies-full-column", ok4, w4);
    out.add("kkt-5-no-undervalued-pair", ok5, w5);
    out.add("kkt-6-support-at-equality", ok6, w6);
    return out;
}

Verdict verify_envy_free_equal_type(const ADHZInstance& inst, const FractionalMatching& x) {
    const int n = inst.n();
    if ((int)x.size() != n) fail("ShapeMismatch", "allocation shape mismatch");
    Verdict out;
    bool ok = true;
    std::string why;
    for (int i = 0; i < n && ok; ++i)
        for (int k = 0; k < n && ok; ++k) {
            if (i == k || inst.e[i] != inst.e[k]) continue;
            Rational mine = dot(inst.u[i], x[i]);
            Rational theirs = dot(inst.u[i], x[k]);
            if (mine < theirs) {
                ok = false;
                why = agent_tag(i) + " gets " + mine.str() + " but values " + agent_tag(k) +
                      "'s bundle at " + theirs.str();
            }
        }
    out.add("equal-type-envy-free", ok, why);
    return out;
}

Verdict verify_individual_rationality_approx(const ADHZInstance& inst, const FractionalMatching& x,
                                             const Rational& eps) {
    const int n = inst.n();
    if ((int)x.size() != n) fail("ShapeMismatch", "allocation shape mismatch");
    if (eps.sign() < 0 || eps >= Rational(1))
        fail("InvalidEpsilon", "epsilon must lie in [0,1)");
    Verdict out;
    bool ok = true;
    std::string why;
    for (int i = 0; i < n && ok; ++i) {
        Rational got = dot(inst.u[i], x[i]);
        Rational kept = (Rational(1) - eps) * dot(inst.u[i], inst.e[i]);
        if (got < kept) {
            ok = false;
            why = agent_tag(i) + " gets " + got.str() + " below (1-eps) * endowment utility " +
                  kept.str();
        }
    }
    out.add("approx-individual-rationality", ok, why);
    return out;
}

Verdict verify_weak_core_small(const ADHZInstance& inst, const FractionalMatching& x,
                               const Rational& eps) {
    const int n = inst.n();
    if ((int)x.size() != n) fail("ShapeMismatch", "allocation shape mismatch");
    if (eps.sign() < 0 || eps >= Rational(1))
        fail("InvalidEpsilon", "epsilon must lie in [0,1)");
    if (n > 12) fail("TooLarge", "coalition enumeration capped at n = 12, got " + std::to_string(n),
                     {n});

    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = dot(inst.u[i], x[i]);
    const Rational one(1);
    const Rational blow = one / (one - eps);

    Verdict out;
    bool ok = true;
    std::string why;
    for (unsigned mask = 1; mask < (1u << n) && ok; ++mask) {
        std::vector<int> members;
        bool hopeless = false;
        for (int i = 0; i < n && !hopeless; ++i)
            if (mask & (1u << i)) {
                if (v[i] * blow >= one) hopeless = true; // cannot strictly beat utility 1
                members.push_back(i);
            }
        if (hopeless) continue;

        // One exact flow decides strict improvement: demand v_i/(1-eps) + eta
        // per member against the coalition's pooled endowment. Blocking iff
        // the flow saturates every demand.
        Vec supply(n, Rational(0));
        for (int i : members)
            for (int j = 0; j < n; ++j) supply[j] += inst.e[i][j];
        const int m = (int)members.size();
        graph::FlowSolver<EtaRational> fs(m + n + 2);
        const int s = 0, t = m + n + 1;
        EtaRational want;
        for (int a = 0; a < m; ++a) {
            EtaRational cap(v[members[a]] * blow, Rational(1));
            want += cap;
            fs.add_arc(s, 1 + a, cap);
            for (int j = 0; j < n; ++j)
                if (!inst.u[members[a]][j].is_zero() && supply[j].sign() > 0)
                    fs.add_infinite_arc(1 + a, 1 + m + j);
        }
        for (int j = 0; j < n; ++j)
            if (supply[j].sign() > 0) fs.add_arc(1 + m + j, t, EtaRational(supply[j], Rational(0)));
        fs.solve(s, t);
        if (fs.value() == want) {
            ok = false;
            std::ostringstream os;
            os << "coalition {";
            for (std::size_t k = 0; k < members.size(); ++k)
                os << (k ? "," : "") << members[k];
            os << "} can make every member strictly better off by factor > 1/(1-eps)";
            why = os.str();
        }
    }
    out.add("approx-weak-core", ok, why);
    return out;
}

// ---------------------------------------------------------------------------
// Floating-point reference optimizer. Deliberately foreign machinery: a
// log-barrier Newton method over the achievable-utility polytope
//   { v : c < v <= 1,  sum_{i in T} v_i <= |N(T)| for every agent set T },
// which is the exact projection of the fractional-matching polytope onto
// utility space for 0/1 likes (max-flow feasibility both ways).
// ---------------------------------------------------------------------------

namespace {

// Solve the symmetric system H d = g in place (tiny n), partial pivoting.
std::vector<double> solve_linear(std::vector<std::vector<double>> H, std::vector<double> g) {
    const int n = (int)g.size();
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(H[r][col]) > std::fabs(H[piv][col])) piv = r;
        std::swap(H[piv], H[col]);
        std::swap(g[piv], g[col]);
        internal_check(std::fabs(H[col][col]) > 1e-300, "singular Newton system");
        for (int r = col + 1; r < n; ++r) {
            double f = H[r][col] / H[col][col];
            if (f == 0.0) continue;
            for (int cc = col; cc < n; ++cc) H[r][cc] -= f * H[col][cc];
            g[r] -= f * g[col];
        }
    }
    std::vector<double> d(n);
    for (int r = n - 1; r >= 0; --r) {
        double acc = g[r];
        for (int cc = r + 1; cc < n; ++cc) acc -= H[r][cc] * d[cc];
        d[r] = acc / H[r][r];
    }
    return d;
}

} // namespace

std::vector<double> nb_objective_oracle(const NBInstance& inst) {
    core::validate_instance(inst);
    const int n = inst.n();
    if (n > 8) fail("TooLarge", "oracle capped at n = 8, got " + std::to_string(n), {n});

    graph::LikeGraph g = graph::LikeGraph::from_utilities(inst.u);
    const unsigned full = (1u << n) - 1;
    // neighbourhood sizes per agent subset
    std::vector<int> nhood(full + 1, 0);
    for (unsigned T = 1; T <= full; ++T) {
        unsigned low = T & (T - 1); // T without its lowest agent
        int i = __builtin_ctz(T);
        if (low == 0) {
            nhood[T] = (int)g.liked[i].size();
        } else {
            std::vector<char> seen(n, 0);
            int cnt = 0;
            for (int b = 0; b < n; ++b)
                if (T & (1u << b))
                    for (int j : g.liked[b])
                        if (!seen[j]) seen[j] = 1, ++cnt;
            nhood[T] = cnt;
        }
    }

    // exact feasibility: some v with c < v is achievable iff every subset has
    // slack |N(T)| - c(T) > 0 and every c_i < 1 (validated already)
    Rational delta;
    bool first = true;
    std::vector<int> worst;
    for (unsigned T = 1; T <= full; ++T) {
        Rational cT;
        int sz = 0;
        for (int i = 0; i < n; ++i)
            if (T & (1u << i)) cT += inst.c[i], ++sz;
        Rational d = (Rational(nhood[T]) - cT) / Rational(sz);
        if (first || d < delta) {
            delta = d;
            worst.clear();
            for (int i = 0; i < n; ++i)
                if (T & (1u << i)) worst.push_back(i);
            first = false;
        }
    }
    for (int i = 0; i < n; ++i) delta = min(delta, Rational(1) - inst.c[i]);
    if (delta.sign() <= 0)
        fail("Infeasible", "no utility vector strictly dominates the disagreement point", worst);

    std::vector<double> c(n), v(n);
    for (int i = 0; i < n; ++i) {
        c[i] = inst.c[i].to_double();
        v[i] = c[i] + delta.to_double() / 2.0; // strictly interior start
    }

    // maximize t*sum log(v-c) + sum_T log(|N(T)| - v(T)) + sum_i log(1 - v_i)
    auto value = [&](const std::vector<double>& w, double t) {
        double f = 0;
        for (int i = 0; i < n; ++i) {
            if (w[i] - c[i] <= 0 || 1.0 - w[i] <= 0) return -1e300;
            f += t * std::log(w[i] - c[i]) + std::log(1.0 - w[i]);
        }
        for (unsigned T = 1; T <= full; ++T) {
            double slack = nhood[T];
            for (int i = 0; i < n; ++i)
                if (T & (1u << i)) slack -= w[i];
            if (slack <= 0) return -1e300;
            f += std::log(slack);
        }
        return f;
    };

    for (double t = n; t <= 1e13; t *= 8) {
        for (int iter = 0; iter < 200; ++iter) {
            std::vector<double> grad(n, 0.0);
            std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
            for (int i = 0; i < n; ++i) {
                grad[i] += t / (v[i] - c[i]) - 1.0 / (1.0 - v[i]);
                H[i][i] += t / ((v[i] - c[i]) * (v[i] - c[i])) +
                           1.0 / ((1.0 - v[i]) * (1.0 - v[i]));
            }
            for (unsigned T = 1; T <= full; ++T) {
                double slack = nhood[T];
                for (int i = 0; i < n; ++i)
                    if (T & (1u << i)) slack -= v[i];
                double inv = 1.0 / slack;
                for (int i = 0; i < n; ++i) {
                    if (!(T & (1u << i))) continue;
                    grad[i] -= inv;
                    for (int k = 0; k < n; ++k)
                        if (T & (1u << k)) H[i][k] += inv * inv;
                }
            }
            std::vector<double> d = solve_linear(H, grad); // ascent direction
            double dec = 0;
            for (int i = 0; i < n; ++i) dec += grad[i] * d[i];
            if (dec < 1e-18 * (1.0 + t)) break; // scale-aware: decrement grows with t
            double base = value(v, t), step = 1.0;
            std::vector<double> trial(n);
            for (int bt = 0; bt < 60; ++bt, step /= 2) {
                for (int i = 0; i < n; ++i) trial[i] = v[i] + step * d[i];
                if (value(trial, t) > base - 1e-9 * (1.0 + std::fabs(base))) break;
            }
            v = trial;
        }
    }
    return v;
}

MisreportOutcome misreport_audit(const NBInstance& inst, int agent, const Vec& reported_row) {
    core::validate_instance(inst);
    const int n = inst.n();
    if (agent < 0 || agent >= n)
        fail("IndexOutOfRange", "agent index " + std::to_string(agent) + " outside 0.." +
                                    std::to_string(n - 1));
    NBInstance lied = inst;
    lied.u[agent] = reported_row;
    core::validate_instance(lied); // rejects all-zero or non-0/1 misreports

    onedlad::NBSolution honest = onedlad::solve_1dlad(inst);
    MisreportOutcome out;
    out.honest = dot(inst.u[agent], honest.x[agent]);
    try {
        onedlad::NBSolution mis = onedlad::solve_1dlad(lied);
        out.misreport = dot(inst.u[agent], mis.x[agent]);
    } catch (const Error& e) {
        if (e.code() == "Infeasible") {
            out.note = std::string("misreport skipped: ") + e.what();
            return out;
        }
        throw;
    }
    return out;
}

} // namespace mmeq::verify
