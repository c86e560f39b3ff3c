#pragma once

#include <optional>

#include "homlog/structure.hpp"

namespace homlog {

// Side conditions for homomorphism search. An injective strong homomorphism
// is an embedding.
struct HomConstraint {
    bool injective = false;
    bool surjective = false;
    bool strong = false;
};

// A concrete homomorphism; flags are recomputed from the map, never trusted.
struct Hom {
    Structure source;
    Structure target;
    std::map<int, int> map;  // total on source.domain

    bool is_valid() const;       // constants preserved, tuples mapped into target
    bool is_injective() const;
    bool is_surjective() const;
    bool is_strong() const;      // membership reflected
    bool satisfies(const HomConstraint& c) const;
};

// Backtracking search for a homomorphism satisfying the requested flags.
// Deterministic: source elements by descending relational degree, candidate
// targets by ascending id; first solution in that order wins. Absence means
// exhaustive search proved none exists.
std::optional<Hom> find_hom(const Structure& a, const Structure& b, const HomConstraint& c = {});

// Splits h into an injective h1: A -> C and a strong surjective h2: C -> B
// with h2 o h1 = h; C has domain A + B and carries the h2-preimages of B's
// relations.
struct Decomposition {
    Hom h1;  // injective
    Hom h2;  // strong surjective
    Structure c;
};
Decomposition decompose(const Hom& h);

// Merges src into tgt (quotient structure); returned hom maps src -> tgt and
// is the identity elsewhere. `strong` reports whether the merge map is a
// strong homomorphism (i.e. a monomerge in the strict sense).
struct MonomergeResult {
    Structure quotient;
    Hom hom;
    bool strong = false;
};
MonomergeResult monomerge(const Structure& a, int src, int tgt);

// Factors a strong surjective h into a sequence of monomerges followed by an
// isomorphism; composing the pieces reproduces h.
struct Factorization {
    std::vector<MonomergeResult> merges;  // all strong
    Hom iso;                              // bijective strong
};
Factorization factor_strong_surjective(const Hom& h);

}  // namespace homlog
