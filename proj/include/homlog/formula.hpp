#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "homlog/signature.hpp"

namespace homlog {

// A term is either a variable or a constant symbol.
struct Term {
    enum class Kind { Variable, Constant };
    Kind kind = Kind::Variable;
    std::string name;

    static Term var(std::string n) { return Term{Kind::Variable, std::move(n)}; }
    static Term cons(std::string n) { return Term{Kind::Constant, std::move(n)}; }
    bool is_var() const { return kind == Kind::Variable; }

    bool operator==(const Term& o) const { return kind == o.kind && name == o.name; }
    bool operator<(const Term& o) const {
        if (kind != o.kind) return kind < o.kind;
        return name < o.name;
    }
};

enum class Fk {
    Atom,
    Equals,
    True,
    False,
    Not,
    And,
    Or,
    Exists,
    Forall,
    ExistsSO,
    ForallSO,
    ExistsFinSO,
    Lfp,
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// One component of a simultaneous least-fixed-point block.
struct LfpDef {
    std::string pred;
    int arity = 0;
    std::vector<std::string> params;  // parameter variables of the body
    FormulaPtr body;
};

// Immutable formula tree. Which fields are meaningful depends on kind:
//   Atom          pred, terms
//   Equals        terms[0], terms[1]
//   Not           kids[0]
//   And/Or        kids (n-ary, possibly empty: empty And = truth, empty Or = falsity
//                 -- but builders normalize those to True/False nodes)
//   Exists/Forall var, kids[0]
//   *SO           so_pred, so_arity, kids[0]
//   Lfp           defs, goal_pred, goal_terms
struct Formula {
    Fk kind = Fk::True;
    std::string pred;
    std::vector<Term> terms;
    std::string var;
    std::string so_pred;
    int so_arity = 0;
    std::vector<FormulaPtr> kids;
    // Shared so that sibling Lfp nodes over the same system can share one
    // definition block (the evaluator memoizes fixpoints per block).
    std::shared_ptr<const std::vector<LfpDef>> defs;
    std::string goal_pred;
    std::vector<Term> goal_terms;

    const std::vector<LfpDef>& def_list() const {
        static const std::vector<LfpDef> none;
        return defs ? *defs : none;
    }
};

// Builders. land/lor flatten nothing and normalize empty lists to True/False
// ("empty disjunction = falsity, empty conjunction = truth").
FormulaPtr atom(std::string pred, std::vector<Term> terms);
FormulaPtr eq(Term a, Term b);
FormulaPtr neq(Term a, Term b);  // Not(Equals)
FormulaPtr tru();
FormulaPtr fal();
FormulaPtr lnot(FormulaPtr f);
FormulaPtr land(std::vector<FormulaPtr> kids);
FormulaPtr lor(std::vector<FormulaPtr> kids);
FormulaPtr implies(FormulaPtr a, FormulaPtr b);  // sugar: !a | b
FormulaPtr iff(FormulaPtr a, FormulaPtr b);      // sugar: (a->b) & (b->a)
FormulaPtr exists(std::string var, FormulaPtr f);
FormulaPtr forall(std::string var, FormulaPtr f);
FormulaPtr exists_many(const std::vector<std::string>& vars, FormulaPtr f);
FormulaPtr forall_many(const std::vector<std::string>& vars, FormulaPtr f);
FormulaPtr exists_so(std::string pred, int arity, FormulaPtr f);
FormulaPtr forall_so(std::string pred, int arity, FormulaPtr f);
FormulaPtr exists_fin_so(std::string pred, int arity, FormulaPtr f);
FormulaPtr lfp(std::vector<LfpDef> defs, std::string goal_pred, std::vector<Term> goal_terms);
FormulaPtr lfp_shared(std::shared_ptr<const std::vector<LfpDef>> defs, std::string goal_pred,
                      std::vector<Term> goal_terms);

bool struct_equal(const FormulaPtr& a, const FormulaPtr& b);

// Concrete-syntax renderer; parse(to_text(f)) is structurally equal to f.
std::string to_text(const FormulaPtr& f);

// Free first-order variables.
std::set<std::string> free_vars(const FormulaPtr& f);
// All variable names occurring (free or bound).
std::set<std::string> all_vars(const FormulaPtr& f);
// Constant symbols occurring.
std::set<std::string> constants_of(const FormulaPtr& f);
// Predicate symbols occurring in atoms (not SO-bound occurrences filtered;
// includes every atom's predicate).
std::set<std::string> predicates_of(const FormulaPtr& f);

bool is_first_order(const FormulaPtr& f);  // no SO quantifiers, no Lfp
bool is_sentence(const FormulaPtr& f);     // no free first-order variables

// Validates f against sig: arities match, constants declared, SO-bound
// predicates shadow correctly, Lfp bodies use defined predicates only
// positively (checked after NNF of the bodies). Throws HomlogError.
void validate(const FormulaPtr& f, const Signature& sig);

// Negation normal form. Requires a first-order input; negations end up only
// on atoms and equalities (x != y stays a negated-equality leaf).
FormulaPtr nnf(const FormulaPtr& f);

// Maximal quantifier nesting depth (FO quantifiers; SO quantifiers and Lfp
// are rejected).
int quantifier_rank(const FormulaPtr& f);

// Capture-avoiding substitution of free variable `v` by term `t`.
FormulaPtr substitute_var(const FormulaPtr& f, const std::string& v, const Term& t);

// Renames every atom P(...) with P in `renaming` to the mapped name. SO/Lfp
// bound predicates are not followed through if shadowed.
FormulaPtr rename_predicates(const FormulaPtr& f, const std::map<std::string, std::string>& renaming);

// Fresh-name helpers. Reserved names start with "__"; user signatures may not
// use that prefix.
bool is_reserved_name(const std::string& name);
std::string fresh_name(const std::string& stem, const Signature& sig,
                       const std::set<std::string>& also_avoid = {});

}  // namespace homlog
