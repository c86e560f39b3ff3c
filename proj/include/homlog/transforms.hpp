#pragma once

#include "homlog/formula.hpp"
#include "homlog/labeling.hpp"
#include "homlog/structure.hpp"

namespace homlog {

// U-relativization: rewrites quantifiers to range over U, conjoins U(c) for
// every constant of sig; for constant-free signatures a conjunct
// "exists x. U(x)" keeps the induced substructure non-empty. U must be fresh.
// D |= rel(Phi, U) iff the substructure induced by U^D is a model of Phi.
FormulaPtr relativize(const FormulaPtr& f, const std::string& u, const Signature& sig);

enum class LabelCmp { Eq, Geq };

// The Bit-predicate comparison formulas [lambda(t) = m] and
// [lambda(t) >= m], encoded over the binary representation of m-1 with
// ceil(log2 n) bits (predicates __Bit0..). 1 <= m <= n.
FormulaPtr label_formula(const Term& t, int m, int n, LabelCmp cmp);

// tr^n: rewrites an FO= sentence (internally brought to NNF) for evaluation
// over implicit representations of unfoldings: A^lambda |= Phi iff
// A_lambda |= tr^n(Phi). Output may be exponentially larger than the input.
FormulaPtr tr_n(const FormulaPtr& f, int n);

enum class ColoringMode { Ext, Int };

// chi^P_A(t): P(t) and the disjunction over P^A-tuples of label equations.
FormulaPtr coloring_chi(const std::string& pred, const std::vector<Term>& terms,
                        const Structure& a);

// Omega_A: every predicate's tuples carry consistent labels into A.
FormulaPtr coloring_omega(const Structure& a);

// Extrinsic (Phi and Omega_A) or intrinsic (atoms replaced by chi) coloring.
// A's domain is renamed to 0..n-1 first; label m corresponds to element m-1.
FormulaPtr coloring(const FormulaPtr& f, const Structure& a, ColoringMode mode);

// Signature of the coloring output (adds the Bit predicates for |A| labels).
Signature coloring_signature(const Signature& sig, const Structure& a);

enum class SpoilerKind { Injective, StrongSurjective, Monomerge, CombinedArb, CombinedFin };

struct SpoilerFormula {
    FormulaPtr formula;
    Signature sig;  // extended signature the formula lives over
};

// The spoiler-detecting sentences:
//   Injective         !Phi  and  (Phi^-)^rel(U)  over tau + primed copies + U
//   StrongSurjective  !Phi  and  tr^n(Phi), n the quantifier rank (falsity if
//                     Phi is equality-free)
//   Monomerge         Phi and relativized !Phi and the c_s/c_t congruence
//                     (falsity if Phi is equality-free)
//   CombinedArb       Injective or StrongSurjective
//   CombinedFin       Injective or Monomerge
SpoilerFormula spoiler_formula(const FormulaPtr& f, const Signature& sig, SpoilerKind kind);

// Names used by the spoiler constructions.
std::string primed_name(const std::string& pred);
inline const char* kSpoilerU = "__U";
inline const char* kSpoilerUdot = "__Udot";
inline const char* kMergeSource = "__cs";
inline const char* kMergeTarget = "__ct";

// Phi^- : every atom P(t) becomes P(t) & P'(t).
FormulaPtr primed_conjunction(const FormulaPtr& f, const Signature& sig);

// SO normal forms.
//   sup:  exists Udot. Psi^rel(Udot)          (superstructure closure)
//   shom: forall U forall tau'. (...)         (surjective-hom closure)
SpoilerFormula so_sup(const FormulaPtr& f, const Signature& sig);
SpoilerFormula so_shom(const FormulaPtr& f, const Signature& sig);

// eta^tau(z, z'): z and z' participate in exactly the same tau-relations
// (tau = sig's predicates).
FormulaPtr eta_formula(const Signature& sig, const Term& z, const Term& zp);

// exists^{<omega} U. Psi^rel(U).
SpoilerFormula eso_fin_wrap(const FormulaPtr& f, const Signature& sig, const std::string& u);

}  // namespace homlog
