#include "homlog/fragments.hpp"

#include <algorithm>
#include <functional>

namespace homlog {

namespace {

bool uses_equality(const FormulaPtr& f) {
    if (f->kind == Fk::Equals) return true;
    for (const auto& d : f->def_list())
        if (uses_equality(d.body)) return true;
    for (const auto& k : f->kids)
        if (uses_equality(k)) return true;
    return false;
}

bool kinds_within(const FormulaPtr& f, std::initializer_list<Fk> allowed) {
    if (std::find(allowed.begin(), allowed.end(), f->kind) == allowed.end()) return false;
    for (const auto& k : f->kids)
        if (!kinds_within(k, allowed)) return false;
    return true;
}

bool is_conj_of_atoms(const FormulaPtr& f) {
    switch (f->kind) {
        case Fk::Atom:
        case Fk::Equals:
        case Fk::True:
            return true;
        case Fk::And:
            for (const auto& k : f->kids)
                if (!is_conj_of_atoms(k)) return false;
            return true;
        default:
            return false;
    }
}

bool is_cq_shape(const FormulaPtr& f) {
    const Formula* cur = f.get();
    while (cur->kind == Fk::Exists) cur = cur->kids[0].get();
    FormulaPtr core(f, cur);  // aliasing constructor
    return is_conj_of_atoms(core);
}

// Flattened conjunct list (nested conjunctions flattened through).
void conjuncts_rec(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
    if (f->kind == Fk::And) {
        for (const auto& k : f->kids) conjuncts_rec(k, out);
    } else {
        out.push_back(f);
    }
}

std::vector<FormulaPtr> conjuncts(const FormulaPtr& f) {
    std::vector<FormulaPtr> out;
    conjuncts_rec(f, out);
    return out;
}

// --- guardedness -----------------------------------------------------------

// Set of variables covered by some positive predicate atom among `gs`.
bool has_guard_atom(const std::vector<FormulaPtr>& gs, const std::set<std::string>& need) {
    for (const auto& g : gs) {
        if (g->kind != Fk::Atom) continue;
        std::set<std::string> vars;
        for (const auto& t : g->terms)
            if (t.is_var()) vars.insert(t.name);
        if (std::includes(vars.begin(), vars.end(), need.begin(), need.end())) return true;
    }
    return false;
}

void flatten_conj(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
    if (f->kind == Fk::And) {
        for (const auto& k : f->kids) flatten_conj(k, out);
    } else {
        out.push_back(f);
    }
}

// Guarded-fragment check: every quantification over a subformula with more
// than `free_allowance` free variables must carry a positive guard atom
// covering them; guards may carry extra conjuncts. The guarded fragment
// tolerates one unguarded free variable, the triguarded fragment two (which
// is what places the two-variable fragment and the Goedel class inside it).
bool guarded_ok(const FormulaPtr& f, size_t free_allowance) {
    switch (f->kind) {
        case Fk::Atom:
        case Fk::Equals:
        case Fk::True:
        case Fk::False:
            return true;
        case Fk::Not:
        case Fk::And:
        case Fk::Or:
            for (const auto& k : f->kids)
                if (!guarded_ok(k, free_allowance)) return false;
            return true;
        case Fk::Exists:
        case Fk::Forall: {
            Fk q = f->kind;
            const Formula* cur = f.get();
            while (cur->kind == q) cur = cur->kids[0].get();
            FormulaPtr core(f, cur);
            std::set<std::string> need = free_vars(core);
            if (need.size() > free_allowance) {
                std::vector<FormulaPtr> candidates;
                if (q == Fk::Exists) {
                    // exists x. (G & ...) with G covering all free vars of the core
                    flatten_conj(core, candidates);
                } else {
                    // forall x. (!G | ...); a lone !G means G => false
                    std::vector<FormulaPtr> disjs =
                        core->kind == Fk::Or ? core->kids : std::vector<FormulaPtr>{core};
                    for (const auto& k : disjs)
                        if (k->kind == Fk::Not) flatten_conj(k->kids[0], candidates);
                }
                if (!has_guard_atom(candidates, need)) return false;
            }
            return guarded_ok(core, free_allowance);
        }
        default:
            return false;
    }
}

// Guarded-negation check: forall disallowed, every negation with free
// variables must be conjoined with a covering positive atom.
bool gnfo_ok(const FormulaPtr& f) {
    switch (f->kind) {
        case Fk::Atom:
        case Fk::Equals:
        case Fk::True:
        case Fk::False:
            return true;
        case Fk::Forall:
            return false;
        case Fk::Exists:
            return gnfo_ok(f->kids[0]);
        case Fk::Or:
            for (const auto& k : f->kids) {
                if (k->kind == Fk::Not && !free_vars(k).empty()) return false;
                if (!gnfo_ok(k)) return false;
            }
            return true;
        case Fk::And: {
            for (const auto& k : f->kids) {
                if (k->kind == Fk::Not) {
                    std::set<std::string> need = free_vars(k);
                    if (!need.empty() && !has_guard_atom(f->kids, need)) return false;
                    if (!gnfo_ok(k->kids[0])) return false;
                } else if (!gnfo_ok(k)) {
                    return false;
                }
            }
            return true;
        }
        case Fk::Not:
            // Unguarded negation: only allowed when closed.
            if (!free_vars(f).empty()) return false;
            return gnfo_ok(f->kids[0]);
        default:
            return false;
    }
}

// --- TGD shapes --------------------------------------------------------------

// A single TGD rule: forall x. (body => exists y. head), body a possibly
// empty conjunction of atoms, head a nonempty conjunction of atoms. The
// implication arrives expanded: Or([Not(body), exists-part]). Degenerate
// shapes (no universal prefix, no implication, no existentials) are accepted
// when they fit the grammar with empty parts.
bool head_ok(const FormulaPtr& f) {
    const Formula* cur = f.get();
    while (cur->kind == Fk::Exists) cur = cur->kids[0].get();
    FormulaPtr core(f, cur);
    if (core->kind == Fk::True || core->kind == Fk::Equals) return false;
    return is_conj_of_atoms(core) && !uses_equality(core);
}

bool body_ok(const FormulaPtr& f) {
    if (f->kind == Fk::True) return true;
    return is_conj_of_atoms(f) && !uses_equality(f);
}

bool is_tgd_rule(const FormulaPtr& f) {
    const Formula* cur = f.get();
    while (cur->kind == Fk::Forall) cur = cur->kids[0].get();
    FormulaPtr matrix(f, cur);
    if (matrix->kind == Fk::Or) {
        if (matrix->kids.size() != 2) return false;
        // one side Not(body), other the head
        for (int i = 0; i < 2; ++i) {
            const FormulaPtr& a = matrix->kids[i];
            const FormulaPtr& b = matrix->kids[1 - i];
            if (a->kind == Fk::Not && body_ok(a->kids[0]) && head_ok(b)) return true;
        }
        return false;
    }
    return head_ok(matrix);  // empty body
}

bool is_tgd_sentence(const FormulaPtr& f) {
    if (!is_sentence(f)) return false;
    for (const auto& c : conjuncts(f))
        if (!is_tgd_rule(c)) return false;
    return true;
}

// Disjunctive TGD: head is a nonempty disjunction of conjunctions of atoms.
bool dtgd_head_ok(const FormulaPtr& f) {
    const Formula* cur = f.get();
    while (cur->kind == Fk::Exists) cur = cur->kids[0].get();
    FormulaPtr core(f, cur);
    if (core->kind == Fk::Or) {
        for (const auto& k : core->kids)
            if (!head_ok(k) && !is_cq_shape(k)) return false;
        return true;
    }
    return head_ok(core);
}

bool is_dtgd_rule(const FormulaPtr& f) {
    const Formula* cur = f.get();
    while (cur->kind == Fk::Forall) cur = cur->kids[0].get();
    FormulaPtr matrix(f, cur);
    if (matrix->kind == Fk::Or) {
        for (size_t i = 0; i < matrix->kids.size(); ++i) {
            const FormulaPtr& a = matrix->kids[i];
            if (a->kind != Fk::Not || !body_ok(a->kids[0])) continue;
            std::vector<FormulaPtr> rest;
            for (size_t j = 0; j < matrix->kids.size(); ++j)
                if (j != i) rest.push_back(matrix->kids[j]);
            if (dtgd_head_ok(lor(rest))) return true;
        }
        return dtgd_head_ok(matrix);
    }
    return dtgd_head_ok(matrix);
}

bool is_dtgd_sentence(const FormulaPtr& f) {
    if (!is_sentence(f)) return false;
    for (const auto& c : conjuncts(f))
        if (!is_dtgd_rule(c)) return false;
    return true;
}

bool is_mdtgd_sentence(const FormulaPtr& f) {
    if (is_tgd_sentence(f)) return true;
    if (f->kind != Fk::Or || f->kids.size() != 2) return false;
    for (int i = 0; i < 2; ++i)
        if (is_tgd_sentence(f->kids[i]) && is_cq_shape(f->kids[1 - i]) && is_sentence(f->kids[1 - i]))
            return true;
    return false;
}

std::string prenex_prefix(const FormulaPtr& f) {
    std::string out;
    const Formula* cur = f.get();
    while (cur->kind == Fk::Exists || cur->kind == Fk::Forall) {
        out += cur->kind == Fk::Forall ? 'A' : 'E';
        cur = cur->kids[0].get();
    }
    // matrix must be quantifier-free
    std::function<bool(const Formula*)> qf = [&](const Formula* g) {
        if (g->kind == Fk::Exists || g->kind == Fk::Forall || g->kind == Fk::Lfp ||
            g->kind == Fk::ExistsSO || g->kind == Fk::ForallSO || g->kind == Fk::ExistsFinSO)
            return false;
        for (const auto& k : g->kids)
            if (!qf(k.get())) return false;
        return true;
    };
    if (!qf(cur)) return "";
    return out;
}

}  // namespace

FragmentReport classify(const FormulaPtr& f, const Signature& sig) {
    (void)sig;
    FragmentReport r;
    r.equality_free = !uses_equality(f);
    r.constant_free = constants_of(f).empty();
    bool fo = is_first_order(f);
    if (!fo) return r;  // only the two syntactic flags apply to SO/Lfp input

    r.prefix = prenex_prefix(f);
    r.ex_pos = kinds_within(f, {Fk::Atom, Fk::Equals, Fk::True, Fk::False, Fk::And, Fk::Or, Fk::Exists});
    r.cq = r.ex_pos && kinds_within(f, {Fk::Atom, Fk::Equals, Fk::True, Fk::And, Fk::Exists}) &&
           is_cq_shape(f);
    if (r.cq) {
        r.ucq = true;
    } else if (f->kind == Fk::False) {
        r.ucq = true;
    } else if (f->kind == Fk::Or) {
        r.ucq = true;
        for (const auto& k : f->kids)
            if (!(is_cq_shape(k) && kinds_within(k, {Fk::Atom, Fk::Equals, Fk::True, Fk::And, Fk::Exists})))
                r.ucq = false;
    }

    size_t distinct_vars = all_vars(f).size();
    r.fo2_eq = distinct_vars <= 2;
    r.fo2 = r.fo2_eq && r.equality_free;

    r.gfo_eq = guarded_ok(f, 1);
    r.gnfo_eq = gnfo_ok(f);
    r.tgf = r.equality_free && guarded_ok(f, 2);

    r.tgd = is_tgd_sentence(f);
    r.mdtgd = r.tgd || is_mdtgd_sentence(f);
    // Every MDTGD sentence rewrites to DTGD, so the flag chain is monotone.
    r.dtgd = r.mdtgd || is_dtgd_sentence(f);
    return r;
}

}  // namespace homlog
