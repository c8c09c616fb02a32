#include "mmeq/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "mmeq/adhz.hpp"
#include "mmeq/bvn.hpp"
#include "mmeq/core.hpp"
#include "mmeq/error.hpp"
#include "mmeq/hz.hpp"
#include "mmeq/json_io.hpp"
#include "mmeq/onedlad.hpp"
#include "mmeq/verify.hpp"

namespace mmeq::cli {

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2, kInfeasible = 3;

std::string slurp(const std::string& path) {
    std::ostringstream ss;
    if (path == "-") {
        ss << std::cin.rdbuf();
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in) fail("IOError", "cannot open '" + path + "' for reading");
        ss << in.rdbuf();
    }
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IOError", "cannot open '" + path + "' for writing");
    out << text;
}

Rational rational_arg(const std::string& s, const char* flag) {
    try {
        return Rational::from_string(s);
    } catch (const Error&) {
        fail("UsageError", std::string(flag) + " wants a rational like 1/10, got '" + s + "'");
    }
}

Rational epsilon_arg(const std::string& s) {
    Rational eps = rational_arg(s, "--epsilon");
    if (eps.sign() <= 0 || eps >= Rational(1))
        fail("InvalidEpsilon", "epsilon must satisfy 0 < eps < 1, got " + eps.str());
    return eps;
}

int print_verdict(const Verdict& v) {
    int fails = 0;
    for (const Check& c : v.checks) {
        if (c.pass) {
            std::cout << "PASS " << c.name << "\n";
        } else {
            ++fails;
            std::cout << "FAIL " << c.name << (c.detail.empty() ? "" : " -- " + c.detail) << "\n";
        }
    }
    if (fails == 0)
        std::cout << "VERDICT: all " << v.checks.size() << " checks pass\n";
    else
        std::cout << "VERDICT: " << fails << " of " << v.checks.size() << " checks fail\n";
    return fails == 0 ? kPass : kFail;
}

Vec denormalize(const core::BivaluedNormalization& norm, const Vec& v01) {
    Vec v(v01.size());
    for (std::size_t i = 0; i < v01.size(); ++i)
        v[i] = norm.low[i] + (norm.high[i] - norm.low[i]) * v01[i];
    return v;
}

// 1dlad agent money: spend plus offset (equals v_i/(v_i - c_i) at the optimum).
Vec onedlad_budgets(const onedlad::NBSolution& sol) {
    const std::size_t n = sol.p.size();
    Vec m(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rational spend;
        for (std::size_t j = 0; j < n; ++j) spend += sol.x[i][j] * sol.p[j];
        m[i] = spend + sol.q[i];
    }
    return m;
}

struct SolveArgs {
    std::string kind, input, output, epsilon;
    bool trace = false;
};

int do_solve(const SolveArgs& a) {
    AnyInstance inst = io::parse_instance(slurp(a.input));
    if (a.kind != io::kind_of(inst))
        fail("KindMismatch",
             "--kind " + a.kind + " but the instance file says " + io::kind_of(inst));

    io::ResultDocument doc;
    if (const auto* hzi = std::get_if<HZInstance>(&inst)) {
        auto norm = core::bivalued_normalize(hzi->u);
        EquilibriumReport rep = hz::solve_hz(HZInstance{norm.u01, hzi->b});
        rep.utilities = denormalize(norm, rep.utilities);
        doc = io::make_result(inst, rep);
    } else if (const auto* adi = std::get_if<ADHZInstance>(&inst)) {
        if (a.epsilon.empty()) fail("UsageError", "solve --kind adhz requires --epsilon");
        auto norm = core::bivalued_normalize(adi->u);
        adhz::ApproxReport rep =
            adhz::solve_eps_adhz(ADHZInstance{norm.u01, adi->e}, epsilon_arg(a.epsilon));
        rep.report.utilities = denormalize(norm, rep.report.utilities);
        doc = io::make_result(inst, rep.report, a.trace ? &rep.trace : nullptr);
    } else {
        const auto& nb = std::get<NBInstance>(inst);
        onedlad::NBSolution sol = onedlad::solve_1dlad(nb);
        EquilibriumReport rep;
        rep.x = sol.x;
        rep.prices = PriceSystem{sol.p, sol.q, onedlad_budgets(sol)};
        rep.utilities = sol.v;
        rep.iterations = static_cast<int>(sol.stages.size());
        rep.verdicts = verify::verify_1dlad_kkt(nb, sol.x, sol.p, sol.q);
        doc = io::make_result(inst, rep);
    }
    spill(a.output, io::write_result(doc));
    return kPass;
}

struct VerifyArgs {
    std::string kind, instance, result, epsilon;
    bool weak_core = false;
};

void check_document_shape(const io::ResultDocument& doc, int n) {
    if (static_cast<int>(doc.allocation.size()) != n)
        fail("ShapeMismatch", "result allocation is " + std::to_string(doc.allocation.size()) +
                                  "x" + std::to_string(doc.allocation.size()) + ", instance has n = " +
                                  std::to_string(n));
}

bool all_zero(const Vec& v) {
    for (const Rational& r : v)
        if (!r.is_zero()) return false;
    return true;
}

int do_verify(const VerifyArgs& a) {
    AnyInstance inst = io::parse_instance(slurp(a.instance));
    io::ResultDocument doc = io::parse_result(slurp(a.result));
    if (a.kind != io::kind_of(inst))
        fail("KindMismatch",
             "--kind " + a.kind + " but the instance file says " + io::kind_of(inst));
    if (doc.kind != a.kind)
        fail("KindMismatch", "result document says kind " + doc.kind + ", expected " + a.kind);
    if (doc.instance_digest != io::instance_digest(inst))
        fail("DigestMismatch", "result was produced for a different instance (digest " +
                                   doc.instance_digest + ", this instance hashes to " +
                                   io::instance_digest(inst) + ")");

    Verdict v;
    if (const auto* hzi = std::get_if<HZInstance>(&inst)) {
        check_document_shape(doc, hzi->n());
        auto norm = core::bivalued_normalize(hzi->u);
        v = verify::verify_hz_equilibrium(HZInstance{norm.u01, hzi->b}, doc.allocation, doc.prices);
        Vec got = core::utilities_of_allocation(hzi->u, doc.allocation);
        v.add("document-utilities-consistent", got == doc.utilities,
              got == doc.utilities ? "" : "recomputed utilities disagree with the document");
        v.add("document-budgets-match-instance", doc.budgets == hzi->b,
              doc.budgets == hzi->b ? "" : "document budgets differ from the instance budgets");
        v.add("document-offsets-zero", all_zero(doc.offsets),
              all_zero(doc.offsets) ? "" : "hz results must carry zero offsets");
    } else if (const auto* adi = std::get_if<ADHZInstance>(&inst)) {
        if (a.epsilon.empty()) fail("UsageError", "verify --kind adhz requires --epsilon");
        Rational eps = epsilon_arg(a.epsilon);
        check_document_shape(doc, adi->n());
        auto norm = core::bivalued_normalize(adi->u);
        ADHZInstance work{norm.u01, adi->e};
        v = verify::verify_eps_adhz(work, doc.allocation, doc.prices, doc.budgets, eps);
        Vec got = core::utilities_of_allocation(adi->u, doc.allocation);
        v.add("document-utilities-consistent", got == doc.utilities,
              got == doc.utilities ? "" : "recomputed utilities disagree with the document");
        v.add("document-offsets-zero", all_zero(doc.offsets),
              all_zero(doc.offsets) ? "" : "adhz results must carry zero offsets");
        if (a.weak_core) {
            Verdict wc = verify::verify_weak_core_small(work, doc.allocation, eps);
            for (Check& c : wc.checks) v.checks.push_back(std::move(c));
        }
    } else {
        const auto& nb = std::get<NBInstance>(inst);
        check_document_shape(doc, nb.n());
        v = verify::verify_1dlad_kkt(nb, doc.allocation, doc.prices, doc.offsets);
        Vec got = core::utilities_of_allocation(nb.u, doc.allocation);
        v.add("document-utilities-consistent", got == doc.utilities,
              got == doc.utilities ? "" : "recomputed utilities disagree with the document");
    }
    return print_verdict(v);
}

int do_lottery(const std::string& result_path, std::uint64_t seed) {
    io::ResultDocument doc = io::parse_result(slurp(result_path));
    bvn::LotteryDecomposition d = bvn::bvn_decompose(doc.allocation);
    std::vector<int> pick = bvn::sample_matching(d, seed);

    nlohmann::json out;
    out["seed"] = seed;
    nlohmann::json terms = nlohmann::json::array();
    for (const bvn::Term& t : d.terms)
        terms.push_back({{"weight", t.weight.str()}, {"permutation", t.perm}});
    out["decomposition"] = std::move(terms);
    out["sampled"] = pick;
    std::cout << out.dump(2) << "\n";
    return kPass;
}

int do_gen_counterexample(const std::string& output) {
    spill(output, io::write_instance(core::counterexample_instance()));
    return kPass;
}

int do_scale_prices(const std::string& result_path, const std::string& factor) {
    io::ResultDocument doc = io::parse_result(slurp(result_path));
    doc.prices = core::scale_prices(doc.prices, rational_arg(factor, "--factor"));
    std::cout << io::write_result(doc);
    return kPass;
}

int do_reduce(const std::string& input, const std::string& output) {
    AnyInstance inst = io::parse_instance(slurp(input));
    const auto* hzi = std::get_if<HZInstance>(&inst);
    if (!hzi) fail("KindMismatch", "reduce hz-to-adhz expects an hz instance");
    spill(output, io::write_instance(core::hz_to_adhz(*hzi)));
    return kPass;
}

std::string row_bits(const Vec& row) {
    std::string s;
    for (const Rational& r : row) s += r.is_zero() ? '0' : '1';
    return s;
}

int do_audit(const std::string& input, bool exhaustive) {
    AnyInstance any = io::parse_instance(slurp(input));
    const auto* nb = std::get_if<NBInstance>(&any);
    if (!nb) fail("KindMismatch", "audit misreports expects a 1dlad instance");
    const int n = nb->n();
    if (exhaustive && n > 8)
        fail("TooLarge", "--exhaustive enumerates all 2^n - 1 rows per agent; capped at n = 8");

    std::vector<Vec> lies;
    if (exhaustive) {
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            Vec row(n);
            for (int j = 0; j < n; ++j) row[j] = Rational(static_cast<int>((mask >> j) & 1u));
            lies.push_back(std::move(row));
        }
    } else {
        for (int j = 0; j < n; ++j) {
            Vec row(n, Rational(0));
            row[j] = Rational(1);
            lies.push_back(std::move(row));
        }
        lies.push_back(Vec(n, Rational(1)));
    }

    long tried = 0, skipped = 0, violations = 0;
    for (int i = 0; i < n; ++i) {
        for (const Vec& row : lies) {
            if (row == nb->u[i]) continue;
            verify::MisreportOutcome out = verify::misreport_audit(*nb, i, row);
            ++tried;
            if (!out.misreport) {
                ++skipped;
                continue;
            }
            if (*out.misreport > out.honest) {
                ++violations;
                std::cout << "PROFITABLE agent " << i << " row " << row_bits(row) << ": truthful "
                          << out.honest.str() << " -> " << out.misreport->str() << "\n";
            }
        }
    }
    std::cout << "audited " << tried << " misreports over " << n << " agents: " << violations
              << " profitable, " << skipped << " skipped (infeasible)\n";
    return violations == 0 ? kPass : kFail;
}

} // namespace

int run_command(std::vector<std::string> args) {
    CLI::App app{"exact equilibria for one-sided matching markets"};
    app.name("mmeq");
    app.require_subcommand(1);

    SolveArgs sa;
    CLI::App* solve = app.add_subcommand("solve", "compute an equilibrium and write the result document");
    solve->add_option("--kind", sa.kind, "hz | adhz | 1dlad")
        ->required()
        ->check(CLI::IsMember({"hz", "adhz", "1dlad"}));
    solve->add_option("--input", sa.input, "instance JSON file, or - for stdin")->required();
    solve->add_option("--epsilon", sa.epsilon, "approximation parameter as a rational, e.g. 1/10");
    solve->add_flag("--trace", sa.trace, "embed the per-iteration budget/price trace");
    solve->add_option("--output", sa.output, "result file, or - for stdout")->required();

    VerifyArgs va;
    CLI::App* verify_cmd = app.add_subcommand("verify", "re-check a result document against its instance");
    verify_cmd->add_option("--kind", va.kind, "hz | adhz | 1dlad")
        ->required()
        ->check(CLI::IsMember({"hz", "adhz", "1dlad"}));
    verify_cmd->add_option("--instance", va.instance, "instance JSON file")->required();
    verify_cmd->add_option("--result", va.result, "result JSON file")->required();
    verify_cmd->add_option("--epsilon", va.epsilon, "window parameter for adhz verification");
    verify_cmd->add_flag("--weak-core", va.weak_core,
                         "also run the exhaustive weak-core coalition check (n <= 12)");

    std::string lottery_result;
    std::uint64_t lottery_seed = 0;
    CLI::App* lottery = app.add_subcommand("lottery", "decompose an allocation and sample one matching");
    lottery->add_option("--result", lottery_result, "result JSON file")->required();
    lottery->add_option("--seed", lottery_seed, "64-bit sampling seed")->required();

    std::string gen_output;
    CLI::App* gen = app.add_subcommand("gen", "emit built-in instances");
    gen->require_subcommand(1);
    CLI::App* gen_cx = gen->add_subcommand(
        "counterexample", "the 10-agent exchange market with no exact equilibrium");
    gen_cx->add_option("--output", gen_output, "instance file, or - for stdout")->required();

    std::string scale_result, scale_factor;
    CLI::App* scale = app.add_subcommand("scale-prices", "rescale result prices around 1 (p' = 1 + r(p-1))");
    scale->add_option("--result", scale_result, "result JSON file")->required();
    scale->add_option("--factor", scale_factor, "positive rational scale r")->required();

    std::string reduce_input, reduce_output;
    CLI::App* reduce = app.add_subcommand("reduce", "instance-to-instance reductions");
    reduce->require_subcommand(1);
    CLI::App* reduce_hz = reduce->add_subcommand("hz-to-adhz",
                                                 "unit-budget hz to uniform-endowment exchange");
    reduce_hz->add_option("--input", reduce_input, "hz instance file")->required();
    reduce_hz->add_option("--output", reduce_output, "adhz instance file, or - for stdout")->required();

    std::string audit_input;
    bool audit_exhaustive = false;
    CLI::App* audit = app.add_subcommand("audit", "adversarial property audits");
    audit->require_subcommand(1);
    CLI::App* audit_mr = audit->add_subcommand("misreports",
                                               "search single-agent utility misreports for profit");
    audit_mr->add_option("--input", audit_input, "1dlad instance file")->required();
    audit_mr->add_flag("--exhaustive", audit_exhaustive, "try every nonzero 0/1 row (n <= 8)");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        int native = app.exit(e); // prints help or the parse diagnostic
        return native == 0 ? kPass : kUsage;
    }

    try {
        if (solve->parsed()) return do_solve(sa);
        if (verify_cmd->parsed()) return do_verify(va);
        if (lottery->parsed()) return do_lottery(lottery_result, lottery_seed);
        if (gen->parsed() && gen_cx->parsed()) return do_gen_counterexample(gen_output);
        if (scale->parsed()) return do_scale_prices(scale_result, scale_factor);
        if (reduce->parsed() && reduce_hz->parsed()) return do_reduce(reduce_input, reduce_output);
        if (audit->parsed() && audit_mr->parsed()) return do_audit(audit_input, audit_exhaustive);
        fail("UsageError", "no subcommand selected");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (!e.witness.empty()) {
            std::cerr << "witness:";
            for (int w : e.witness) std::cerr << ' ' << w;
            std::cerr << "\n";
        }
        return e.code() == "Infeasible" ? kInfeasible : kUsage;
    }
}

} // namespace mmeq::cli
