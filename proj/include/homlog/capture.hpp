#pragma once

#include "homlog/typelib.hpp"

namespace homlog {

// forall x. (alpha => theta), alpha a guard atom, theta a disjunction of
// literals (possibly empty = falsity).
struct GfoUnivRule {
    FormulaPtr guard;
    std::vector<FormulaPtr> literals;
};

// forall z. (beta => exists y. gamma), beta/gamma atoms, gamma containing all
// of beta's variables.
struct GfoExistsRule {
    FormulaPtr guard;
    FormulaPtr head;
    std::vector<std::string> z_vars;
    std::vector<std::string> y_vars;
};

struct GfoNormalForm {
    Signature base_sig;
    Signature ext_sig;
    std::string universal_guard;  // "__D" (unary) or "__Univ" (binary, TGF)
    bool tgf = false;
    std::vector<GfoUnivRule> univ_rules;
    std::vector<GfoExistsRule> exists_rules;

    FormulaPtr universal_conjunct() const;  // forall x. D(x) / forall x y. Univ(x,y)
    FormulaPtr to_formula() const;
    int width() const;  // max arity of a predicate occurring in the rules
};

// Normal form for guarded sentences: every model of the input expands to a
// model of the output, and every model of the output restricts (to the base
// signature) to a model of the input. Sentences already built from rule-like
// guarded conjuncts pass through without auxiliary predicates; everything
// else goes through definitional unnesting over lifted copies.
GfoNormalForm gfo_normal_form(const FormulaPtr& f, const Signature& sig);

// Triguarded variant: unguarded quantification is first guarded by the
// universal binary predicate, then the guarded pipeline runs.
GfoNormalForm tgf_normal_form(const FormulaPtr& f, const Signature& sig);

// Scott normal form for two-variable sentences:
//   forall x y. phi0  and  conjuncts forall x exists y. psi_i
struct ScottNormalForm {
    Signature base_sig;
    Signature ext_sig;
    FormulaPtr universal_matrix;            // phi0(x,y), quantifier-free
    std::vector<FormulaPtr> exists_matrices;  // psi_i(x,y), quantifier-free
    FormulaPtr to_formula() const;
};
ScottNormalForm scott_normal_form(const FormulaPtr& f, const Signature& sig);

enum class CaptureFragment { Gfo, Tgf, Fo2 };

// Everything build_capture produces: the capture sentence plus the structured
// data that the membership test and the LFP translation reuse.
struct CaptureArtifact {
    CaptureFragment fragment = CaptureFragment::Gfo;
    Signature base_sig;   // tau
    Signature ext_sig;    // normal-form signature tau'
    Signature full_sig;   // tau' plus type predicates
    FormulaPtr normal_form;
    int width = 1;
    std::vector<TypeDescriptor> types;   // the eligible set E
    std::vector<TypeSummary> summaries;  // bounded model summary of the normal form
    FormulaPtr psi;                      // Psi_hom and the summary disjunction
    FormulaPtr psi_hom;                  // the homomorphism-compatibility conjunct alone
    std::vector<FormulaPtr> psi_disjuncts;  // one per summary, aligned with `summaries`

    // subtype closure: super restricted to `positions` equals sub
    struct SubtypePair {
        size_t super, sub;
        std::vector<int> positions;
    };
    std::vector<SubtypePair> subtype_pairs;

    // permutation closure: eta-image of t under a pool permutation
    struct PermPair {
        size_t t, image;
        std::vector<int> arg_of;
    };
    std::vector<PermPair> perm_pairs;

    // guard machinery, per exists-rule: (t, nu) in B_j with its fitting
    // extension types
    struct GuardEntry {
        size_t rule;              // index into exists_rules
        size_t t;                 // guarded type
        std::vector<size_t> fitting;  // extension types t' (v_t a subsequence)
    };
    std::vector<GuardEntry> guard_entries;

    // normal-form rules (gfo/tgf)
    std::vector<GfoExistsRule> exists_rules;
    // Scott parts (fo2)
    std::vector<FormulaPtr> scott_exists_matrices;
};

// The homcapture pipeline: normalize per fragment, enumerate eligible types,
// compute the bounded model summary, and assemble Psi. The true (unbounded)
// model summary is approximated from below by size_bound; the stabilization
// of the summary set between consecutive bounds is heuristic evidence only.
CaptureArtifact build_capture(const FormulaPtr& f, const Signature& sig, CaptureFragment frag,
                              int size_bound, const EvalLimits& lim = {});

// Membership of a base-signature structure in the projection of the capture's
// models, decided by the maximal-expansion type-elimination process (the
// conjunct families of the guarded capture are closed under unions of type
// interpretations, so a greatest candidate expansion exists). Guarded
// fragments only.
bool capture_member(const Structure& b, const CaptureArtifact& art);

// The least-fixed-point characterization of the homclosure of a guarded
// sentence: complement type predicates accumulate "cannot carry this type",
// and each summary demands a surviving tuple per realized type. Evaluates on
// plain base-signature structures.
FormulaPtr lfp_translate(const FormulaPtr& f, const Signature& sig, int size_bound,
                         const EvalLimits& lim = {});
FormulaPtr lfp_translate_from(const CaptureArtifact& art);

// Bernays-Schoenfinkel homclosure: skolemize the existential prefix into
// constants, collect the small induced submodels over constant-denoted
// elements by bounded enumeration, and return the disjunction of their
// canonical queries over the base signature.
FormulaPtr eafo_homclosure(const FormulaPtr& f, const Signature& sig, const EvalLimits& lim = {});

}  // namespace homlog
