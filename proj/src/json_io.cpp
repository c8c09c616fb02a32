#include "mmeq/json_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>

#include "mmeq/error.hpp"

using nlohmann::json;

namespace mmeq::io {

namespace {

Rational rat(const json& v, const std::string& where) {
    if (!v.is_string()) fail("SchemaError", where + ": expected a rational-string");
    try {
        return Rational::from_string(v.get<std::string>());
    } catch (const Error& e) {
        fail("SchemaError", where + ": " + e.what());
    }
}

Vec vec_of(const json& v, std::size_t n, const std::string& where) {
    if (!v.is_array() || v.size() != n)
        fail("SchemaError", where + ": expected an array of " + std::to_string(n) + " rational-strings");
    Vec out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        out.push_back(rat(v[k], where + "[" + std::to_string(k) + "]"));
    return out;
}

Mat mat_of(const json& v, std::size_t n, const std::string& where) {
    if (!v.is_array() || v.size() != n)
        fail("SchemaError", where + ": expected " + std::to_string(n) + " rows");
    Mat out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(vec_of(v[i], n, where + "[" + std::to_string(i) + "]"));
    return out;
}

json to_json(const Vec& v) {
    json a = json::array();
    for (const Rational& r : v) a.push_back(r.str());
    return a;
}

json to_json(const Mat& m) {
    json a = json::array();
    for (const Vec& row : m) a.push_back(to_json(row));
    return a;
}

void require_keys(const json& obj, const std::set<std::string>& required,
                  const std::set<std::string>& optional, const std::string& where) {
    for (const std::string& k : required)
        if (!obj.contains(k)) fail("SchemaError", where + ": missing field '" + k + "'");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!required.count(it.key()) && !optional.count(it.key()))
            fail("SchemaError", where + ": unexpected field '" + it.key() + "'");
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
        fail("SyntaxError", "line " + std::to_string(line) + ": " + e.what());
    }
}

std::string fnv1a64_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int k = 15; k >= 0; --k, h >>= 4) out[static_cast<std::size_t>(k)] = hex[h & 0xf];
    return out;
}

} // namespace

AnyInstance parse_instance(const std::string& text) {
    json j = parse_text(text);
    if (!j.is_object()) fail("SchemaError", "top level: expected an object");
    if (!j.contains("kind") || !j["kind"].is_string())
        fail("SchemaError", "kind: expected \"hz\", \"adhz\" or \"1dlad\"");
    const std::string kind = j["kind"].get<std::string>();

    const char* payload_key = kind == "hz"      ? "budgets"
                              : kind == "adhz"  ? "endowments"
                              : kind == "1dlad" ? "disagreement"
                                                : nullptr;
    if (!payload_key) fail("SchemaError", "kind: unknown value '" + kind + "'");
    require_keys(j, {"kind", "n", "utilities", payload_key}, {"comment"}, "instance");

    if (!j["n"].is_number_integer() || j["n"].get<long>() < 1)
        fail("SchemaError", "n: expected a positive integer");
    const auto n = static_cast<std::size_t>(j["n"].get<long>());

    UtilityMatrix u = mat_of(j["utilities"], n, "utilities");

    AnyInstance inst;
    if (kind == "hz")
        inst = HZInstance{std::move(u), vec_of(j["budgets"], n, "budgets")};
    else if (kind == "adhz")
        inst = ADHZInstance{std::move(u), mat_of(j["endowments"], n, "endowments")};
    else
        inst = NBInstance{std::move(u), vec_of(j["disagreement"], n, "disagreement")};

    core::validate_instance(inst);
    return inst;
}

const char* kind_of(const AnyInstance& inst) {
    switch (inst.index()) {
        case 0: return "hz";
        case 1: return "adhz";
        default: return "1dlad";
    }
}

std::string write_instance(const AnyInstance& inst) {
    json j;
    j["kind"] = kind_of(inst);
    if (const auto* hz = std::get_if<HZInstance>(&inst)) {
        j["n"] = hz->n();
        j["utilities"] = to_json(hz->u);
        j["budgets"] = to_json(hz->b);
    } else if (const auto* ad = std::get_if<ADHZInstance>(&inst)) {
        j["n"] = ad->n();
        j["utilities"] = to_json(ad->u);
        j["endowments"] = to_json(ad->e);
    } else {
        const auto& nb = std::get<NBInstance>(inst);
        j["n"] = nb.n();
        j["utilities"] = to_json(nb.u);
        j["disagreement"] = to_json(nb.c);
    }
    return j.dump(2) + "\n"; // nlohmann objects iterate key-sorted: canonical
}

std::string instance_digest(const AnyInstance& inst) { return fnv1a64_hex(write_instance(inst)); }

std::string write_result(const ResultDocument& doc) {
    json j;
    j["kind"] = doc.kind;
    j["instance_digest"] = doc.instance_digest;
    j["prices"] = to_json(doc.prices);
    j["offsets"] = to_json(doc.offsets);
    j["budgets"] = to_json(doc.budgets);
    j["allocation"] = to_json(doc.allocation);
    j["utilities"] = to_json(doc.utilities);
    j["iterations"] = doc.iterations;
    json checks = json::array();
    for (const Check& c : doc.verdicts.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["verdicts"] = std::move(checks);
    if (!doc.trace.empty()) {
        json t = json::array();
        for (const adhz::IterationRecord& r : doc.trace)
            t.push_back({{"budgets", to_json(r.b)},
                         {"prices", to_json(r.p)},
                         {"allocation", to_json(r.x)}});
        j["trace"] = std::move(t);
    }
    return j.dump(2) + "\n";
}

ResultDocument parse_result(const std::string& text) {
    json j = parse_text(text);
    if (!j.is_object()) fail("SchemaError", "top level: expected an object");
    require_keys(j,
                 {"kind", "instance_digest", "prices", "offsets", "budgets", "allocation",
                  "utilities", "iterations", "verdicts"},
                 {"trace", "comment"}, "result");

    ResultDocument doc;
    if (!j["kind"].is_string()) fail("SchemaError", "kind: expected a string");
    doc.kind = j["kind"].get<std::string>();
    if (doc.kind != "hz" && doc.kind != "adhz" && doc.kind != "1dlad")
        fail("SchemaError", "kind: unknown value '" + doc.kind + "'");

    if (!j["instance_digest"].is_string()) fail("SchemaError", "instance_digest: expected a string");
    doc.instance_digest = j["instance_digest"].get<std::string>();
    if (doc.instance_digest.size() != 16 ||
        doc.instance_digest.find_first_not_of("0123456789abcdef") != std::string::npos)
        fail("SchemaError", "instance_digest: expected 16 lowercase hex characters");

    if (!j["allocation"].is_array() || j["allocation"].empty())
        fail("SchemaError", "allocation: expected a nonempty square matrix");
    const std::size_t n = j["allocation"].size();

    doc.prices = vec_of(j["prices"], n, "prices");
    doc.offsets = vec_of(j["offsets"], n, "offsets");
    doc.budgets = vec_of(j["budgets"], n, "budgets");
    doc.allocation = mat_of(j["allocation"], n, "allocation");
    doc.utilities = vec_of(j["utilities"], n, "utilities");

    if (!j["iterations"].is_number_integer() || j["iterations"].get<long>() < 0)
        fail("SchemaError", "iterations: expected a nonnegative integer");
    doc.iterations = static_cast<int>(j["iterations"].get<long>());

    if (!j["verdicts"].is_array()) fail("SchemaError", "verdicts: expected an array");
    for (const json& c : j["verdicts"]) {
        if (!c.is_object()) fail("SchemaError", "verdicts: expected objects");
        require_keys(c, {"name", "pass", "detail"}, {}, "verdicts entry");
        if (!c["name"].is_string() || !c["pass"].is_boolean() || !c["detail"].is_string())
            fail("SchemaError", "verdicts entry: wrong field type");
        doc.verdicts.add(c["name"].get<std::string>(), c["pass"].get<bool>(),
                         c["detail"].get<std::string>());
    }

    if (j.contains("trace")) {
        if (!j["trace"].is_array()) fail("SchemaError", "trace: expected an array");
        for (const json& r : j["trace"]) {
            if (!r.is_object()) fail("SchemaError", "trace: expected objects");
            require_keys(r, {"budgets", "prices", "allocation"}, {}, "trace entry");
            adhz::IterationRecord rec;
            rec.b = vec_of(r["budgets"], n, "trace budgets");
            rec.p = vec_of(r["prices"], n, "trace prices");
            rec.x = mat_of(r["allocation"], n, "trace allocation");
            doc.trace.push_back(std::move(rec));
        }
    }
    return doc;
}

ResultDocument make_result(const AnyInstance& inst, const EquilibriumReport& report,
                           const adhz::IterationTrace* trace) {
    ResultDocument doc;
    doc.kind = kind_of(inst);
    doc.instance_digest = instance_digest(inst);
    doc.prices = report.prices.p;
    doc.offsets = report.prices.q;
    doc.budgets = report.prices.b;
    doc.allocation = report.x;
    doc.utilities = report.utilities;
    doc.iterations = report.iterations;
    doc.verdicts = report.verdicts;
    if (trace) doc.trace = *trace;
    return doc;
}

} // namespace mmeq::io
