#pragma once

#include "homlog/structure.hpp"

namespace homlog {

// An n-labeling of a structure: lam maps every element into {1..n}.
struct Labeling {
    Structure base;
    int n = 1;
    std::map<int, int> lam;  // element -> label in 1..n

    // lambda(c^A) = 1 for every constant.
    bool constant_sole() const;
    void check_valid() const;
};

// Number of Bit predicates used for n labels: ceil(log2 n). Labels are
// encoded by the binary representation of (label - 1), bit i stored in
// __Bit{i}; n = 1 needs no Bit predicates.
int bit_count(int n);

// Name of the i-th Bit predicate.
std::string bit_pred_name(int i);

// Unfolding A^lambda: domain {(a,i) | 1 <= i <= lambda(a)}, a tuple of copies
// is in P iff the projected tuple is in P^A; requires a constant-sole
// labeling. Returns the unfolded structure together with the projection map
// (unfolded element -> base element), a strong surjective homomorphism.
std::pair<Structure, std::map<int, int>> unfold(const Labeling& l);

// Implicit representation A_lambda: expands the base by the Bit predicates
// encoding (lambda(a) - 1) in binary.
Structure implicit_representation(const Labeling& l);

}  // namespace homlog
