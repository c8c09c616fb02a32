#pragma once

#include <string>

#include "mmeq/adhz.hpp"
#include "mmeq/core.hpp"

namespace mmeq::io {

// On-disk result document: everything a verifier needs to re-check a solve,
// plus the digest of the instance it certifies. All numerics are
// rational-strings; no floating point appears in any document.
struct ResultDocument {
    std::string kind;            // "hz" | "adhz" | "1dlad"
    std::string instance_digest; // 16 hex chars: 64-bit FNV-1a of the canonical instance text
    Vec prices;
    Vec offsets; // per-agent price offsets; all-zero outside 1dlad
    Vec budgets;
    FractionalMatching allocation;
    Vec utilities;
    int iterations = 0;
    Verdict verdicts;
    adhz::IterationTrace trace; // empty = field absent
};

// Strict parse + validate_instance. Throws SyntaxError (with the line),
// SchemaError (with the field), or any validation error. Every number in a
// document is a rational-string; the only tolerated extra key is "comment".
AnyInstance parse_instance(const std::string& text);

// Canonical serialization: sorted keys, 2-space indent, lowest-term
// rational-strings, trailing newline. parse_instance(write_instance(i))
// reproduces i; comments do not survive (so they never affect digests).
std::string write_instance(const AnyInstance& inst);

// FNV-1a 64 over the canonical instance text, lowercase hex, zero-padded.
std::string instance_digest(const AnyInstance& inst);

std::string write_result(const ResultDocument& doc);
ResultDocument parse_result(const std::string& text);

const char* kind_of(const AnyInstance& inst);

// Document assembly for the solve paths. `trace` may be null.
ResultDocument make_result(const AnyInstance& inst, const EquilibriumReport& report,
                           const adhz::IterationTrace* trace = nullptr);

} // namespace mmeq::io
