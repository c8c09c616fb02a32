#include "mmeq/core.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "mmeq/error.hpp"

namespace mmeq {

std::string Verdict::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.pass ? "pass " : "FAIL ") << c.name;
        if (!c.detail.empty()) os << " (" << c.detail << ")";
        os << "\n";
    }
    return os.str();
}

namespace core {

namespace {

void check_square_nonneg(const Mat& m, const char* what) {
    const std::size_t n = m.size();
    if (n == 0) fail("NonSquare", std::string(what) + " is empty");
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i].size() != n)
            fail("NonSquare", std::string(what) + " row " + std::to_string(i) + " has " +
                                  std::to_string(m[i].size()) + " entries, expected " +
                                  std::to_string(n),
                 {static_cast<int>(i)});
        for (std::size_t j = 0; j < n; ++j)
            if (m[i][j].sign() < 0)
                fail("NegativeEntry", std::string(what) + "[" + std::to_string(i) + "][" +
                                          std::to_string(j) + "] = " + m[i][j].str(),
                     {static_cast<int>(i), static_cast<int>(j)});
    }
}

void check_utilities(const UtilityMatrix& u) {
    check_square_nonneg(u, "utilities");
    if (!is_dichotomous(u)) return; // bi-valued rows get their likes from normalization
    for (std::size_t i = 0; i < u.size(); ++i) {
        bool likes_some = false;
        for (const auto& v : u[i])
            if (v.sign() > 0) { likes_some = true; break; }
        if (!likes_some)
            fail("AgentLikesNothing", "agent " + std::to_string(i) + " has an all-zero utility row",
                 {static_cast<int>(i)});
    }
}

} // namespace

bool is_dichotomous(const UtilityMatrix& u) {
    for (const auto& row : u)
        for (const auto& v : row)
            if (!v.is_zero() && v != Rational(1)) return false;
    return true;
}

bool is_doubly_stochastic(const Mat& x, std::string* why) {
    const std::size_t n = x.size();
    const Rational one(1);
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i].size() != n) {
            if (why) *why = "row " + std::to_string(i) + " has wrong length";
            return false;
        }
        Rational s(0);
        for (std::size_t j = 0; j < n; ++j) {
            if (x[i][j].sign() < 0) {
                if (why)
                    *why = "entry [" + std::to_string(i) + "][" + std::to_string(j) +
                           "] = " + x[i][j].str() + " < 0";
                return false;
            }
            s += x[i][j];
        }
        if (s != one) {
            if (why) *why = "row " + std::to_string(i) + " sums " + s.str();
            return false;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        Rational s(0);
        for (std::size_t i = 0; i < n; ++i) s += x[i][j];
        if (s != one) {
            if (why) *why = "col " + std::to_string(j) + " sums " + s.str();
            return false;
        }
    }
    return true;
}

const HZInstance& validate_instance(const HZInstance& inst) {
    check_utilities(inst.u);
    if (inst.b.size() != inst.u.size())
        fail("NonSquare", "budget vector has " + std::to_string(inst.b.size()) +
                              " entries, expected " + std::to_string(inst.u.size()));
    for (std::size_t i = 0; i < inst.b.size(); ++i)
        if (inst.b[i].sign() <= 0)
            fail("NonPositiveBudget",
                 "agent " + std::to_string(i) + " has budget " + inst.b[i].str(),
                 {static_cast<int>(i)});
    return inst;
}

const ADHZInstance& validate_instance(const ADHZInstance& inst) {
    check_utilities(inst.u);
    if (inst.e.size() != inst.u.size())
        fail("NonSquare", "endowment matrix has " + std::to_string(inst.e.size()) +
                              " rows, expected " + std::to_string(inst.u.size()));
    check_square_nonneg(inst.e, "endowments");
    std::string why;
    if (!is_doubly_stochastic(inst.e, &why)) fail("NotDoublyStochastic", "endowments: " + why);
    return inst;
}

const NBInstance& validate_instance(const NBInstance& inst) {
    check_square_nonneg(inst.u, "utilities");
    if (!is_dichotomous(inst.u)) {
        for (std::size_t i = 0; i < inst.u.size(); ++i)
            for (std::size_t j = 0; j < inst.u.size(); ++j)
                if (!inst.u[i][j].is_zero() && inst.u[i][j] != Rational(1))
                    fail("NotDichotomous",
                         "utilities[" + std::to_string(i) + "][" + std::to_string(j) + "] = " +
                             inst.u[i][j].str() + "; 1dlad requires a 0/1 matrix",
                         {static_cast<int>(i), static_cast<int>(j)});
    }
    check_utilities(inst.u); // dichotomous here, so likes-at-least-one applies
    if (inst.c.size() != inst.u.size())
        fail("NonSquare", "disagreement vector has " + std::to_string(inst.c.size()) +
                              " entries, expected " + std::to_string(inst.u.size()));
    for (std::size_t i = 0; i < inst.c.size(); ++i)
        if (inst.c[i].sign() < 0 || inst.c[i] >= Rational(1))
            fail("DisagreementOutOfRange",
                 "agent " + std::to_string(i) + " has c = " + inst.c[i].str() +
                     ", required 0 <= c < 1",
                 {static_cast<int>(i)});
    return inst;
}

const AnyInstance& validate_instance(const AnyInstance& inst) {
    std::visit([](const auto& x) { validate_instance(x); }, inst);
    return inst;
}

Vec utilities_of_allocation(const UtilityMatrix& u, const FractionalMatching& x) {
    const std::size_t n = u.size();
    if (x.size() != n) fail("ShapeMismatch", "allocation has wrong number of rows");
    Vec v(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
        if (u[i].size() != n || x[i].size() != n)
            fail("ShapeMismatch", "row " + std::to_string(i) + " has wrong length");
        for (std::size_t j = 0; j < n; ++j) v[i] += u[i][j] * x[i][j];
    }
    return v;
}

BivaluedNormalization bivalued_normalize(const UtilityMatrix& u) {
    const std::size_t n = u.size();
    BivaluedNormalization out;
    out.u01.assign(n, Vec(n, Rational(0)));
    out.low.resize(n);
    out.high.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::set<Rational> distinct(u[i].begin(), u[i].end());
        if (distinct.size() > 2)
            fail("MoreThanTwoValues",
                 "agent " + std::to_string(i) + " has " + std::to_string(distinct.size()) +
                     " distinct utility values",
                 {static_cast<int>(i)});
        if (distinct.size() == 1) {
            // Constant row: the agent is indifferent, so every good counts as
            // liked; the affine map is degenerate (low == high).
            out.low[i] = out.high[i] = *distinct.begin();
            for (std::size_t j = 0; j < n; ++j) out.u01[i][j] = Rational(1);
        } else {
            out.low[i] = *distinct.begin();
            out.high[i] = *std::next(distinct.begin());
            for (std::size_t j = 0; j < n; ++j)
                out.u01[i][j] = (u[i][j] == out.high[i]) ? Rational(1) : Rational(0);
        }
    }
    return out;
}

Vec scale_prices(const Vec& p, const Rational& r) {
    if (r.sign() <= 0) fail("NonPositiveScale", "scale factor " + r.str() + " must be positive");
    Vec out(p.size());
    const Rational one(1);
    for (std::size_t j = 0; j < p.size(); ++j) out[j] = one + r * (p[j] - one);
    return out;
}

ADHZInstance hz_to_adhz(const HZInstance& hz) {
    const int n = hz.n();
    for (int i = 0; i < n; ++i)
        if (hz.b[i] != Rational(1))
            fail("NonUnitBudgets",
                 "agent " + std::to_string(i) + " has budget " + hz.b[i].str() +
                     "; the reduction requires unit budgets",
                 {i});
    ADHZInstance out;
    out.u = hz.u;
    out.e.assign(n, Vec(n, Rational(1, n)));
    return out;
}

ADHZInstance counterexample_instance() {
    // Ten agents on a directed cycle with two parallel "diamonds" spliced in;
    // index order: s, a, b, c, d, f, g, e, h, t. Every agent owns its namesake
    // good, and an edge i -> j below means agent i likes agent j's good. The
    // demand graph is strongly connected but the market has no exact
    // equilibrium; the FPTAS still finds approximate ones.
    const int n = 10;
    ADHZInstance out;
    out.u.assign(n, Vec(n, Rational(0)));
    auto like = [&](int i, int j) { out.u[i][j] = Rational(1); };
    like(0, 1); like(0, 2); // s -> a, b
    like(1, 3); like(1, 4); // a -> c, d
    like(2, 5); like(2, 6); // b -> f, g
    like(3, 7);             // c -> e
    like(4, 7);             // d -> e
    like(5, 8);             // f -> h
    like(6, 8);             // g -> h
    like(7, 9);             // e -> t
    like(8, 9);             // h -> t
    like(9, 0);             // t -> s
    out.e.assign(n, Vec(n, Rational(0)));
    for (int i = 0; i < n; ++i) out.e[i][i] = Rational(1);
    return out;
}

} // namespace core
} // namespace mmeq
