#pragma once

#include "homlog/formula.hpp"

namespace homlog {

// Sound syntactic fragment membership flags, computed after the trivial
// normalizations the fragment definitions permit (implication sugar is
// already expanded at parse time; guards may carry extra conjuncts; a
// quantification over a subformula with at most one free variable counts as
// guarded).
struct FragmentReport {
    bool ex_pos = false;     // existential positive FO with equality (bottom allowed)
    bool cq = false;         // conjunctive query
    bool ucq = false;        // union of conjunctive queries
    bool gfo_eq = false;     // guarded fragment of FO=
    bool gnfo_eq = false;    // guarded negation fragment of FO=
    bool tgf = false;        // triguarded fragment (equality-free)
    bool fo2 = false;        // two-variable fragment, equality-free
    bool fo2_eq = false;     // two-variable fragment with equality
    bool tgd = false;        // conjunction of tuple-generating dependencies
    bool mdtgd = false;      // mildly disjunctive: TGD or (TGD or-ed with a CQ)
    bool dtgd = false;       // disjunctive TGD sentence
    std::string prefix;      // prenex quantifier word over {A,E}; empty if not prenex
    bool equality_free = false;
    bool constant_free = false;
};

FragmentReport classify(const FormulaPtr& f, const Signature& sig);

}  // namespace homlog
