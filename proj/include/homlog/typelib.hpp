#pragma once

#include <optional>

#include "homlog/bounded.hpp"
#include "homlog/structure.hpp"

namespace homlog {

// A literal of a type: a predicate atom over pool variables and constants
// with a polarity. Eligible types are rigid, so no equality literals occur.
struct TypeLiteral {
    bool positive = true;
    std::string pred;
    std::vector<Term> terms;

    bool operator<(const TypeLiteral& o) const {
        if (pred != o.pred) return pred < o.pred;
        if (terms != o.terms) return terms < o.terms;
        return positive < o.positive;
    }
    bool operator==(const TypeLiteral& o) const {
        return positive == o.positive && pred == o.pred && terms == o.terms;
    }
};

// Maximal consistent literal set over an ordered subsequence of the dedicated
// variable pool (plus all constants).
struct TypeDescriptor {
    std::vector<std::string> vars;       // v_t, subsequence of the pool
    std::vector<TypeLiteral> literals;   // sorted; one polarity per atom
    bool guarded = false;
    int guard_literal = -1;              // index of a covering positive literal

    int order() const { return (int)vars.size(); }
    std::string key() const;             // canonical encoding
    std::string tp_pred_name() const;    // "__Tp" + stable hash
    std::string neg_tp_pred_name() const;  // complement predicate name
    FormulaPtr conjunction() const;       // formula over Term::var(vars)
};

// The i-th pool variable (1-based), "v1", "v2", ...
std::string pool_var(int i);

enum class TypeMode { AllRigid, GuardedRigid, Fo2 };

// All rigid types of order <= width over sig, optionally filtered to guarded
// ones; Fo2 means all rigid 1- and 2-types (width forced to 2). The result is
// closed under variable permutations and ordered canonically.
std::vector<TypeDescriptor> eligible_types(const Signature& sig, int width, TypeMode mode);

struct TypeSummary {
    std::set<size_t> plus;  // indices into the eligible set: realized
    std::set<size_t> bang;  // realized exactly once

    bool operator<(const TypeSummary& o) const {
        if (plus != o.plus) return plus < o.plus;
        return bang < o.bang;
    }
    bool operator==(const TypeSummary& o) const { return plus == o.plus && bang == o.bang; }
};

// Does tuple `a` realize type t in A?
bool realizes(const Structure& a, const TypeDescriptor& t, const std::vector<int>& tuple);

// Enumerates all order-length tuples and records which types are realized
// (exactly once).
TypeSummary type_summary(const Structure& a, const std::vector<TypeDescriptor>& types);

// Expands A by one Tp predicate per type, holding the realizing tuples.
Structure adorn(const Structure& a, const std::vector<TypeDescriptor>& types);

// Transfers the sigma-part of an adornment along a homomorphism h: A -> B,
// i.e. the structure B . h(A.E|sigma).
Structure adorned_transfer(const Structure& a, const Structure& b, const std::map<int, int>& h,
                           const std::vector<TypeDescriptor>& types);

// {type_summary(A) | A in bounded_models(phi, bound)} -- a bounded
// under-approximation of the true model summary, deterministic order.
std::vector<TypeSummary> model_summary(const FormulaPtr& f, const Signature& sig,
                                       const std::vector<TypeDescriptor>& types, int size_bound,
                                       const EvalLimits& lim = {});

// Index of the subtype of types[t] induced by the variable subset `keep`
// (positions into types[t].vars), if it is eligible.
std::optional<size_t> subtype_index(const std::vector<TypeDescriptor>& types, size_t t,
                                    const std::vector<int>& keep);

// Index of the permutation image kappa(types[t]) together with the argument
// rearrangement: out_args[i] = position in v_t feeding position i of the
// image's variable tuple.
struct PermImage {
    size_t image;
    std::vector<int> arg_of;
};
std::optional<PermImage> perm_image(const std::vector<TypeDescriptor>& types, size_t t,
                                    const std::map<std::string, std::string>& kappa);

}  // namespace homlog
