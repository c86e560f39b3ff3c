#pragma once

#include <map>
#include <set>
#include <vector>

#include "homlog/formula.hpp"
#include "homlog/signature.hpp"

namespace homlog {

// Finite relational structure. Elements are opaque small integers; the domain
// is kept sorted. Every constant must be interpreted and every tuple must
// match its predicate's arity ("structures have non-empty domains").
struct Structure {
    Signature sig;
    std::vector<int> domain;                              // sorted, non-empty
    std::map<std::string, int> const_interp;              // constant -> element
    std::map<std::string, std::set<std::vector<int>>> relations;  // predicate -> tuples

    bool has_element(int e) const;
    size_t size() const { return domain.size(); }
    bool holds(const std::string& pred, const std::vector<int>& tuple) const;

    // Checks all invariants; throws HomlogError on violation.
    void check_valid() const;

    bool operator==(const Structure& o) const {
        return sig == o.sig && domain == o.domain && const_interp == o.const_interp &&
               relations == o.relations;
    }
    bool operator<(const Structure& o) const;
};

// Convenience builder: domain {0..n-1}, empty relations, constants must be
// assigned afterwards (or use `consts`).
Structure make_structure(const Signature& sig, int n,
                         const std::map<std::string, int>& consts = {});

// sigma-reduct: same domain, keeps only sigma's symbols. sigma must be a
// subsignature.
Structure reduct(const Structure& a, const Signature& sigma);

enum class ExpandMode { Full, Empty };

// Expands by fresh constant-free predicates, interpreted full or empty.
Structure expand(const Structure& a, const std::vector<std::pair<std::string, int>>& preds,
                 ExpandMode mode);

enum class CanonicalKind { Initial, Final };

// Initial structure I_tau (constants separate, empty relations) and final
// structure F_tau (one element, full relations). A constant-free signature
// still gets a single anonymous element.
Structure canonical(const Signature& sig, CanonicalKind kind);

// Tagged disjoint union; relations are unioned componentwise. Constants
// resolve to the left operand's interpretations.
Structure disjoint_union(const Structure& a, const Structure& b);

// Canonical (Boolean conjunctive) query of a finite structure.
FormulaPtr canonical_query(const Structure& a);

// Substructure induced by s; s must be non-empty and contain all constant
// interpretations.
Structure induced_substructure(const Structure& a, const std::set<int>& s);

// Renames the domain to 0..n-1 preserving order; returns the renaming map.
Structure normalize_domain(const Structure& a, std::map<int, int>* old_to_new = nullptr);

}  // namespace homlog
