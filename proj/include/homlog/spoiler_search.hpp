#pragma once

#include <optional>

#include "homlog/bounded.hpp"
#include "homlog/hom.hpp"

namespace homlog {

// A concrete witness against homclosedness: a model, a non-model, and a
// homomorphism from the former into the latter.
struct SpoilerWitness {
    Structure model;
    Structure non_model;
    Hom hom;
};

// Canonical key of a structure up to isomorphism (minimum serialization over
// all domain permutations); intended for small structures.
std::string iso_invariant_key(const Structure& s);

// Keeps one representative per isomorphism class, preserving first-seen order.
std::vector<Structure> dedup_up_to_iso(const std::vector<Structure>& xs);

// Is some member of `models` homomorphically mappable into b?
bool in_bounded_homclosure(const std::vector<Structure>& models, const Structure& b);

// Exhaustive finite-spoiler search: scans every pair of a model and a
// non-model with domains up to `bound` for a homomorphism between them.
// Internally the per-size universe is swept once with an upward closure over
// relation supersets, so the scan is exact, not sampled.
std::optional<SpoilerWitness> bounded_spoiler_search(const FormulaPtr& f, const Signature& sig,
                                                     int bound, const EvalLimits& lim = {});

}  // namespace homlog
