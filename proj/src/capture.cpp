#include "homlog/capture.hpp"

#include <algorithm>
#include <functional>

#include "homlog/fragments.hpp"
#include "homlog/spoiler_search.hpp"

namespace homlog {

namespace {

std::vector<FormulaPtr> flatten_and(const FormulaPtr& f) {
    if (f->kind == Fk::And) {
        std::vector<FormulaPtr> out;
        for (const auto& k : f->kids) {
            auto sub = flatten_and(k);
            out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
    }
    return {f};
}

bool is_literal(const FormulaPtr& f) {
    if (f->kind == Fk::Atom || f->kind == Fk::Equals) return true;
    return f->kind == Fk::Not &&
           (f->kids[0]->kind == Fk::Atom || f->kids[0]->kind == Fk::Equals);
}

bool is_qf(const FormulaPtr& f) {
    switch (f->kind) {
        case Fk::Exists:
        case Fk::Forall:
        case Fk::ExistsSO:
        case Fk::ForallSO:
        case Fk::ExistsFinSO:
        case Fk::Lfp:
            return false;
        default:
            for (const auto& k : f->kids)
                if (!is_qf(k)) return false;
            return true;
    }
}

using Clause = std::vector<FormulaPtr>;  // disjunction of literals

// CNF of a quantifier-free formula (inputs here are small).
std::vector<Clause> cnf_clauses(const FormulaPtr& f) {
    FormulaPtr n = nnf(f);
    std::function<std::vector<Clause>(const FormulaPtr&)> rec =
        [&](const FormulaPtr& g) -> std::vector<Clause> {
        switch (g->kind) {
            case Fk::True:
                return {};
            case Fk::False:
                return {Clause{}};
            case Fk::And: {
                std::vector<Clause> out;
                for (const auto& k : g->kids) {
                    auto sub = rec(k);
                    out.insert(out.end(), sub.begin(), sub.end());
                }
                return out;
            }
            case Fk::Or: {
                std::vector<Clause> acc{Clause{}};
                for (const auto& k : g->kids) {
                    auto sub = rec(k);
                    if (sub.empty()) return {};  // truth absorbs the disjunction
                    std::vector<Clause> next;
                    for (const auto& a : acc)
                        for (const auto& b : sub) {
                            Clause c = a;
                            c.insert(c.end(), b.begin(), b.end());
                            next.push_back(std::move(c));
                        }
                    acc = std::move(next);
                }
                return acc;
            }
            default:
                return {Clause{g}};
        }
    };
    return rec(n);
}

std::set<std::string> clause_vars(const Clause& c) {
    std::set<std::string> out;
    for (const auto& l : c) {
        auto vs = free_vars(l);
        out.insert(vs.begin(), vs.end());
    }
    return out;
}

std::vector<std::string> atom_vars(const FormulaPtr& a) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& t : a->terms)
        if (t.is_var() && seen.insert(t.name).second) out.push_back(t.name);
    return out;
}

// ---------------------------------------------------------------------------
// Guarded normal form

struct NfBuilder {
    Signature ext;
    std::vector<GfoUnivRule> univ_rules;
    std::vector<GfoExistsRule> exists_rules;
    std::string d_pred;
    std::string anchor;  // fresh constant naming closed subformulas; lazy
    int fresh_counter = 0;

    const std::string& anchor_const() {
        if (anchor.empty()) {
            anchor = fresh_name("__c0", ext);
            ext.add_constant(anchor);
        }
        return anchor;
    }

    std::string fresh_pred(const std::string& stem, int arity) {
        std::string name;
        do {
            name = "__" + stem + std::to_string(fresh_counter++);
        } while (ext.has_predicate(name));
        ext.add_predicate(name, arity);
        return name;
    }

    void add_univ(FormulaPtr guard, Clause theta) {
        univ_rules.push_back(GfoUnivRule{std::move(guard), std::move(theta)});
    }

    // forall z.(beta => exists y. gamma); gamma must contain beta's variables.
    void add_exists(FormulaPtr beta, FormulaPtr gamma) {
        GfoExistsRule r;
        r.guard = beta;
        r.head = gamma;
        r.z_vars = atom_vars(beta);
        std::set<std::string> zs(r.z_vars.begin(), r.z_vars.end());
        for (const auto& v : atom_vars(gamma))
            if (!zs.count(v)) r.y_vars.push_back(v);
        exists_rules.push_back(std::move(r));
    }

    // Decomposes forall z.(beta => exists ys. core) with a quantifier-free
    // core into normal-form rules, bridging through a fresh predicate when the
    // core is not a single covering atom.
    void add_exists_general(const FormulaPtr& beta, const std::vector<std::string>& ys,
                            const FormulaPtr& core) {
        std::vector<std::string> zs = atom_vars(beta);
        std::set<std::string> zset(zs.begin(), zs.end());
        if (core->kind == Fk::Atom) {
            std::set<std::string> cv;
            for (const auto& v : atom_vars(core)) cv.insert(v);
            if (std::includes(cv.begin(), cv.end(), zset.begin(), zset.end())) {
                add_exists(beta, core);
                return;
            }
        }
        // bridge predicate over the used existential variables plus z
        std::set<std::string> used = free_vars(core);
        std::vector<std::string> ys_used;
        for (const auto& y : ys)
            if (used.count(y)) ys_used.push_back(y);
        std::vector<Term> qterms;
        std::vector<std::string> qvars;
        for (const auto& y : ys_used) qvars.push_back(y);
        for (const auto& z : zs) qvars.push_back(z);
        for (const auto& v : qvars) qterms.push_back(Term::var(v));
        std::string q = fresh_pred("Q", (int)qvars.size());
        FormulaPtr q_atom = atom(q, qterms);
        add_exists(beta, q_atom);
        for (auto& clause : cnf_clauses(core)) add_univ(q_atom, clause);
    }
};

// Strips a maximal same-kind quantifier prefix.
const Formula* strip_block(const FormulaPtr& f, Fk kind, std::vector<std::string>& vars) {
    const Formula* cur = f.get();
    while (cur->kind == kind) {
        vars.push_back(cur->var);
        cur = cur->kids[0].get();
    }
    return cur;
}

// Lean path: recognize rule-like conjuncts directly.
bool try_lean(NfBuilder& b, const FormulaPtr& c) {
    std::vector<std::string> xs;
    FormulaPtr matrix(c, strip_block(c, Fk::Forall, xs));

    auto d_guard = [&](const std::string& v) { return atom(b.d_pred, {Term::var(v)}); };

    // forall* exists* core
    {
        std::vector<std::string> ys;
        FormulaPtr core(matrix, strip_block(matrix, Fk::Exists, ys));
        if (!ys.empty() && is_qf(core)) {
            if (xs.size() > 1) return false;
            std::string w;
            if (xs.empty()) {
                w = "w";
                std::set<std::string> avoid = all_vars(c);
                while (avoid.count(w)) w += "'";
            } else {
                w = xs[0];
                if (std::find(ys.begin(), ys.end(), w) != ys.end()) return false;  // shadowed
            }
            if (core->kind == Fk::True) return true;  // vacuous
            if (!is_first_order(core)) return false;
            b.add_exists_general(d_guard(w), ys, core);
            return true;
        }
        if (!ys.empty()) return false;  // nested quantifiers: general path
    }

    if (is_qf(matrix)) {
        auto clauses = cnf_clauses(matrix);
        if (xs.size() <= 1) {
            std::string w = xs.empty() ? std::string("x") : xs[0];
            for (auto& clause : clauses) b.add_univ(d_guard(w), clause);
            return true;
        }
        // multi-variable: each clause needs a negative guard atom covering it
        std::vector<std::pair<FormulaPtr, Clause>> out;
        for (auto& clause : clauses) {
            auto vars = clause_vars(clause);
            FormulaPtr guard;
            Clause rest;
            for (size_t i = 0; i < clause.size(); ++i) {
                const auto& l = clause[i];
                if (!guard && l->kind == Fk::Not && l->kids[0]->kind == Fk::Atom) {
                    std::set<std::string> gv;
                    for (const auto& v : atom_vars(l->kids[0])) gv.insert(v);
                    if (std::includes(gv.begin(), gv.end(), vars.begin(), vars.end())) {
                        guard = l->kids[0];
                        continue;
                    }
                }
                rest.push_back(l);
            }
            if (!guard) return false;
            out.push_back({guard, rest});
        }
        for (auto& [g, rest] : out) b.add_univ(g, rest);
        return true;
    }

    // forall xs. (!beta | tail) with tail an exists-chain
    if (matrix->kind == Fk::Or) {
        FormulaPtr beta;
        std::vector<FormulaPtr> rest;
        for (const auto& k : matrix->kids) {
            if (!beta && k->kind == Fk::Not && k->kids[0]->kind == Fk::Atom) {
                std::set<std::string> gv;
                for (const auto& v : atom_vars(k->kids[0])) gv.insert(v);
                auto fv = free_vars(matrix);
                if (std::includes(gv.begin(), gv.end(), fv.begin(), fv.end())) {
                    beta = k->kids[0];
                    continue;
                }
            }
            rest.push_back(k);
        }
        if (beta && rest.size() == 1 && (rest[0]->kind == Fk::Exists)) {
            std::vector<std::string> ys;
            FormulaPtr core(rest[0], strip_block(rest[0], Fk::Exists, ys));
            if (is_qf(core) && is_first_order(core)) {
                b.add_exists_general(beta, ys, core);
                return true;
            }
            return false;
        }
        if (beta && !rest.empty()) {
            bool all_qf = true;
            for (const auto& r : rest)
                if (!is_qf(r)) all_qf = false;
            if (all_qf) {
                for (auto& clause : cnf_clauses(lor(rest))) b.add_univ(beta, clause);
                return true;
            }
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// General path: D-guarding, lifting, definitional unnesting.

// Wraps unguarded quantifier blocks over at most one free variable with the
// universal unary guard.
FormulaPtr pre_guard_single(const FormulaPtr& f, const std::string& d) {
    switch (f->kind) {
        case Fk::Atom:
        case Fk::Equals:
        case Fk::True:
        case Fk::False:
            return f;
        case Fk::Not:
            return lnot(pre_guard_single(f->kids[0], d));
        case Fk::And:
        case Fk::Or: {
            std::vector<FormulaPtr> kids;
            for (const auto& k : f->kids) kids.push_back(pre_guard_single(k, d));
            return f->kind == Fk::And ? land(std::move(kids)) : lor(std::move(kids));
        }
        case Fk::Exists:
        case Fk::Forall: {
            FormulaPtr body = pre_guard_single(f->kids[0], d);
            if (body->kind == f->kind)  // same-kind block continues inward
                return f->kind == Fk::Exists ? exists(f->var, body) : forall(f->var, body);
            // Does the block already carry a covering guard?
            std::set<std::string> need = free_vars(body);
            bool guarded = false;
            if (f->kind == Fk::Exists) {
                for (const auto& k : flatten_and(body))
                    if (k->kind == Fk::Atom) {
                        std::set<std::string> gv;
                        for (const auto& v : atom_vars(k)) gv.insert(v);
                        if (std::includes(gv.begin(), gv.end(), need.begin(), need.end()))
                            guarded = true;
                    }
            } else {
                std::vector<FormulaPtr> disjs =
                    body->kind == Fk::Or ? body->kids : std::vector<FormulaPtr>{body};
                for (const auto& k : disjs)
                    if (k->kind == Fk::Not)
                        for (const auto& g : flatten_and(k->kids[0]))
                            if (g->kind == Fk::Atom) {
                                std::set<std::string> gv;
                                for (const auto& v : atom_vars(g)) gv.insert(v);
                                if (std::includes(gv.begin(), gv.end(), need.begin(), need.end()))
                                    guarded = true;
                            }
            }
            if (!guarded) {
                if (need.size() > 1)
                    throw HomlogError("normal form: unguarded multi-variable quantification");
                FormulaPtr g = atom(d, {Term::var(f->var)});
                body = f->kind == Fk::Exists ? land({g, body}) : lor({lnot(g), body});
            }
            return f->kind == Fk::Exists ? exists(f->var, body) : forall(f->var, body);
        }
        default:
            throw HomlogError("normal form requires a first-order sentence");
    }
}

// Definitional unnesting of an NNF guarded formula in which every quantified
// block has at least one free variable; emits rules and returns a
// quantifier-free equivalent built from naming atoms.
FormulaPtr unnest(NfBuilder& b, const FormulaPtr& f) {
    switch (f->kind) {
        case Fk::Atom:
        case Fk::Equals:
        case Fk::True:
        case Fk::False:
        case Fk::Not:
            return f;  // NNF: negation sits on literals
        case Fk::And:
        case Fk::Or: {
            std::vector<FormulaPtr> kids;
            for (const auto& k : f->kids) kids.push_back(unnest(b, k));
            return f->kind == Fk::And ? land(std::move(kids)) : lor(std::move(kids));
        }
        case Fk::Exists: {
            std::vector<std::string> ys;
            FormulaPtr body(f, strip_block(f, Fk::Exists, ys));
            FormulaPtr core = unnest(b, body);
            std::set<std::string> zset = free_vars(f);
            // Closed blocks are named by a unary predicate at the anchor
            // constant; naming atoms occur only positively in the NNF input,
            // so the one-directional axioms below suffice.
            std::vector<Term> zterms;
            if (zset.empty()) {
                zterms.push_back(Term::cons(b.anchor_const()));
            } else {
                for (const auto& z : zset) zterms.push_back(Term::var(z));
            }
            std::string r = b.fresh_pred("R", (int)zterms.size());
            FormulaPtr r_atom = atom(r, zterms);
            b.add_exists_general(r_atom, ys, core);
            return r_atom;
        }
        case Fk::Forall: {
            std::vector<std::string> xs;
            FormulaPtr body(f, strip_block(f, Fk::Forall, xs));
            FormulaPtr core = unnest(b, body);
            std::set<std::string> zset = free_vars(f);
            std::vector<Term> zterms;
            if (zset.empty()) {
                zterms.push_back(Term::cons(b.anchor_const()));
            } else {
                for (const auto& z : zset) zterms.push_back(Term::var(z));
            }
            std::string r = b.fresh_pred("R", (int)zterms.size());
            FormulaPtr r_atom = atom(r, zterms);
            FormulaPtr neg_r = lnot(r_atom);
            for (auto& clause : cnf_clauses(core)) {
                // every clause of a guarded block contains its negated guard
                std::set<std::string> need = clause_vars(clause);
                need.insert(zset.begin(), zset.end());
                FormulaPtr guard;
                Clause rest;
                for (const auto& l : clause) {
                    if (!guard && l->kind == Fk::Not && l->kids[0]->kind == Fk::Atom) {
                        std::set<std::string> gv;
                        for (const auto& v : atom_vars(l->kids[0])) gv.insert(v);
                        if (std::includes(gv.begin(), gv.end(), need.begin(), need.end())) {
                            guard = l->kids[0];
                            continue;
                        }
                    }
                    rest.push_back(l);
                }
                if (!guard)
                    throw HomlogError("normal form: universal block clause without a guard");
                rest.push_back(neg_r);
                b.add_univ(guard, rest);
            }
            return r_atom;
        }
        default:
            throw HomlogError("normal form requires a first-order sentence");
    }
}

// Does any quantified subformula strictly inside f bind a closed piece?
bool has_closed_proper_block(const FormulaPtr& f, bool top) {
    switch (f->kind) {
        case Fk::Exists:
        case Fk::Forall: {
            if (!top && free_vars(f).empty()) return true;
            Fk q = f->kind;
            const Formula* cur = f.get();
            while (cur->kind == q) cur = cur->kids[0].get();
            return has_closed_proper_block(FormulaPtr(f, cur), false);
        }
        default:
            for (const auto& k : f->kids)
                if (has_closed_proper_block(k, false)) return true;
            return false;
    }
}

// Definitional unnesting without predicate lifting: works for conjuncts that
// are single quantified blocks with no closed proper subformula.
bool try_no_lift(NfBuilder& b, const FormulaPtr& c) {
    if (c->kind != Fk::Forall && c->kind != Fk::Exists) return false;
    if (has_closed_proper_block(c, true)) return false;
    NfBuilder scratch = b;
    try {
        if (c->kind == Fk::Forall) {
            std::vector<std::string> xs;
            FormulaPtr body(c, strip_block(c, Fk::Forall, xs));
            FormulaPtr core = unnest(scratch, body);
            for (auto& clause : cnf_clauses(core)) {
                auto vars = clause_vars(clause);
                FormulaPtr guard;
                Clause rest;
                for (const auto& l : clause) {
                    if (!guard && l->kind == Fk::Not && l->kids[0]->kind == Fk::Atom) {
                        std::set<std::string> gv;
                        for (const auto& v : atom_vars(l->kids[0])) gv.insert(v);
                        if (std::includes(gv.begin(), gv.end(), vars.begin(), vars.end())) {
                            guard = l->kids[0];
                            continue;
                        }
                    }
                    rest.push_back(l);
                }
                if (guard) {
                    scratch.add_univ(guard, rest);
                } else if (vars.size() <= 1) {
                    std::string w = vars.empty() ? (xs.empty() ? std::string("x") : xs[0])
                                                 : *vars.begin();
                    scratch.add_univ(atom(scratch.d_pred, {Term::var(w)}), clause);
                } else {
                    throw HomlogError("clause without guard");
                }
            }
        } else {
            std::vector<std::string> ys;
            FormulaPtr body(c, strip_block(c, Fk::Exists, ys));
            FormulaPtr core = unnest(scratch, body);
            std::string w = "w";
            std::set<std::string> avoid = all_vars(c);
            while (avoid.count(w)) w += "'";
            scratch.add_exists_general(atom(scratch.d_pred, {Term::var(w)}), ys, core);
        }
    } catch (const HomlogError&) {
        return false;
    }
    b = std::move(scratch);
    return true;
}

void general_path(NfBuilder& b, const FormulaPtr& piece) {
    FormulaPtr guarded = pre_guard_single(nnf(piece), b.d_pred);
    FormulaPtr core = unnest(b, guarded);
    // the residual is a boolean combination of closed literals
    for (auto& clause : cnf_clauses(core)) {
        if (!clause_vars(clause).empty())
            throw HomlogError("internal: open clause at the top of a sentence");
        b.add_univ(atom(b.d_pred, {Term::var("x")}), clause);
    }
}

}  // namespace

FormulaPtr GfoNormalForm::universal_conjunct() const {
    if (tgf)
        return forall_many({"x", "y"},
                           atom(universal_guard, {Term::var("x"), Term::var("y")}));
    return forall("x", atom(universal_guard, {Term::var("x")}));
}

FormulaPtr GfoNormalForm::to_formula() const {
    std::vector<FormulaPtr> conj{universal_conjunct()};
    for (const auto& r : univ_rules) {
        std::vector<FormulaPtr> disj{lnot(r.guard)};
        disj.insert(disj.end(), r.literals.begin(), r.literals.end());
        conj.push_back(forall_many(atom_vars(r.guard), lor(std::move(disj))));
    }
    for (const auto& r : exists_rules) {
        FormulaPtr head = exists_many(r.y_vars, r.head);
        conj.push_back(forall_many(r.z_vars, lor({lnot(r.guard), head})));
    }
    return land(std::move(conj));
}

int GfoNormalForm::width() const {
    int w = 1;
    auto widen = [&](const FormulaPtr& a) {
        if (a->kind == Fk::Atom) w = std::max(w, (int)a->terms.size());
        if (a->kind == Fk::Not && a->kids[0]->kind == Fk::Atom)
            w = std::max(w, (int)a->kids[0]->terms.size());
    };
    for (const auto& r : univ_rules) {
        widen(r.guard);
        for (const auto& l : r.literals) widen(l);
    }
    for (const auto& r : exists_rules) {
        widen(r.guard);
        widen(r.head);
    }
    if (tgf) w = std::max(w, 2);
    return w;
}

GfoNormalForm gfo_normal_form(const FormulaPtr& f, const Signature& sig) {
    FragmentReport rep = classify(f, sig);
    if (!rep.gfo_eq) throw HomlogError("gfo_normal_form requires a guarded sentence");
    NfBuilder b;
    b.ext = sig;
    b.d_pred = fresh_name("__D", sig);
    b.ext.add_predicate(b.d_pred, 1);

    std::vector<FormulaPtr> leftovers;
    std::vector<FormulaPtr> queue = flatten_and(f);
    for (size_t i = 0; i < queue.size(); ++i) {
        const FormulaPtr& c = queue[i];
        if (try_lean(b, c)) continue;
        FormulaPtr n = nnf(c);
        if (n->kind == Fk::And) {  // re-examine the pieces separately
            for (const auto& k : flatten_and(n)) queue.push_back(k);
            continue;
        }
        if (!struct_equal(n, c) && try_lean(b, n)) continue;
        if (try_no_lift(b, n)) continue;
        leftovers.push_back(n);
    }
    if (!leftovers.empty()) general_path(b, land(leftovers));

    GfoNormalForm out;
    out.base_sig = sig;
    out.ext_sig = b.ext;
    out.universal_guard = b.d_pred;
    out.univ_rules = std::move(b.univ_rules);
    out.exists_rules = std::move(b.exists_rules);
    return out;
}

namespace {

// Guards unguarded quantifier blocks with the universal binary predicate, in
// the triguarded style (one or two free variables).
FormulaPtr pre_guard_univ(const FormulaPtr& f, const std::string& univ) {
    switch (f->kind) {
        case Fk::Atom:
        case Fk::Equals:
        case Fk::True:
        case Fk::False:
            return f;
        case Fk::Not:
            return lnot(pre_guard_univ(f->kids[0], univ));
        case Fk::And:
        case Fk::Or: {
            std::vector<FormulaPtr> kids;
            for (const auto& k : f->kids) kids.push_back(pre_guard_univ(k, univ));
            return f->kind == Fk::And ? land(std::move(kids)) : lor(std::move(kids));
        }
        case Fk::Exists:
        case Fk::Forall: {
            FormulaPtr body = pre_guard_univ(f->kids[0], univ);
            if (body->kind == f->kind)
                return f->kind == Fk::Exists ? exists(f->var, body) : forall(f->var, body);
            std::set<std::string> need = free_vars(body);
            bool guarded = false;
            if (f->kind == Fk::Exists) {
                for (const auto& k : flatten_and(body))
                    if (k->kind == Fk::Atom && k->pred != univ) {
                        std::set<std::string> gv;
                        for (const auto& v : atom_vars(k)) gv.insert(v);
                        if (std::includes(gv.begin(), gv.end(), need.begin(), need.end()))
                            guarded = true;
                    }
            } else {
                std::vector<FormulaPtr> disjs =
                    body->kind == Fk::Or ? body->kids : std::vector<FormulaPtr>{body};
                for (const auto& k : disjs)
                    if (k->kind == Fk::Not)
                        for (const auto& g : flatten_and(k->kids[0]))
                            if (g->kind == Fk::Atom) {
                                std::set<std::string> gv;
                                for (const auto& v : atom_vars(g)) gv.insert(v);
                                if (std::includes(gv.begin(), gv.end(), need.begin(), need.end()))
                                    guarded = true;
                            }
            }
            if (!guarded) {
                if (need.size() > 2)
                    throw HomlogError("triguarded normal form: quantification over three or more "
                                      "free variables must be guarded");
                std::vector<std::string> vs(need.begin(), need.end());
                Term t1 = Term::var(vs.empty() ? f->var : vs[0]);
                Term t2 = vs.size() == 2 ? Term::var(vs[1]) : t1;
                FormulaPtr g = atom(univ, {t1, t2});
                body = f->kind == Fk::Exists ? land({g, body}) : lor({lnot(g), body});
            }
            return f->kind == Fk::Exists ? exists(f->var, body) : forall(f->var, body);
        }
        default:
            throw HomlogError("normal form requires a first-order sentence");
    }
}

FormulaPtr replace_d_by_univ(const FormulaPtr& f, const std::string& d, const std::string& univ) {
    if (f->kind == Fk::Atom && f->pred == d) return atom(univ, {f->terms[0], f->terms[0]});
    Formula g = *f;
    for (auto& k : g.kids) k = replace_d_by_univ(k, d, univ);
    return std::make_shared<const Formula>(std::move(g));
}

}  // namespace

GfoNormalForm tgf_normal_form(const FormulaPtr& f, const Signature& sig) {
    FragmentReport rep = classify(f, sig);
    if (!rep.tgf) throw HomlogError("tgf_normal_form requires a triguarded sentence");
    std::string univ = fresh_name("__Univ", sig);
    Signature with_univ = sig;
    with_univ.add_predicate(univ, 2);
    FormulaPtr guarded = pre_guard_univ(nnf(f), univ);
    GfoNormalForm nf = gfo_normal_form(guarded, with_univ);
    // substitute D(t) by Univ(t,t) everywhere and drop D
    std::string d = nf.universal_guard;
    for (auto& r : nf.univ_rules) {
        r.guard = replace_d_by_univ(r.guard, d, univ);
        for (auto& l : r.literals) l = replace_d_by_univ(l, d, univ);
    }
    for (auto& r : nf.exists_rules) {
        r.guard = replace_d_by_univ(r.guard, d, univ);
        r.head = replace_d_by_univ(r.head, d, univ);
    }
    Signature ext;
    for (const auto& [p, ar] : nf.ext_sig.predicates())
        if (p != d) ext.add_predicate(p, ar);
    for (const auto& c : nf.ext_sig.constants()) ext.add_constant(c);
    nf.ext_sig = ext;
    nf.base_sig = sig;
    nf.universal_guard = univ;
    nf.tgf = true;
    return nf;
}

// ---------------------------------------------------------------------------
// Scott normal form (two-variable fragment)

namespace {

struct ScottBuilder {
    Signature ext;
    std::vector<FormulaPtr> univ_matrices;    // over x, y
    std::vector<FormulaPtr> exists_matrices;  // over x, y
    int fresh_counter = 0;

    std::string fresh_pred() {
        std::string name;
        do {
            name = "__S" + std::to_string(fresh_counter++);
        } while (ext.has_predicate(name));
        ext.add_predicate(name, 1);
        return name;
    }
};

// Renames the (at most two) variables of a quantifier-free formula.
FormulaPtr qf_rename(const FormulaPtr& f, const std::map<std::string, std::string>& m) {
    switch (f->kind) {
        case Fk::Atom:
        case Fk::Equals: {
            Formula g = *f;
            for (auto& t : g.terms)
                if (t.is_var()) {
                    auto it = m.find(t.name);
                    if (it != m.end()) t.name = it->second;
                }
            return std::make_shared<const Formula>(std::move(g));
        }
        case Fk::True:
        case Fk::False:
            return f;
        default: {
            Formula g = *f;
            for (auto& k : g.kids) k = qf_rename(k, m);
            return std::make_shared<const Formula>(std::move(g));
        }
    }
}

// Bottom-up definitional pass: replaces every quantified block by a fresh
// unary naming predicate; `scope` is an in-scope variable for closed pieces.
FormulaPtr scott_rec(ScottBuilder& b, const FormulaPtr& f, const std::string& scope) {
    switch (f->kind) {
        case Fk::Atom:
        case Fk::Equals:
        case Fk::True:
        case Fk::False:
            return f;
        case Fk::Not:
            return lnot(scott_rec(b, f->kids[0], scope));
        case Fk::And:
        case Fk::Or: {
            std::vector<FormulaPtr> kids;
            for (const auto& k : f->kids) kids.push_back(scott_rec(b, k, scope));
            return f->kind == Fk::And ? land(std::move(kids)) : lor(std::move(kids));
        }
        case Fk::Exists:
        case Fk::Forall: {
            std::string v = f->var;
            FormulaPtr body = scott_rec(b, f->kids[0], v);
            std::set<std::string> frees = free_vars(body);
            frees.erase(v);
            if (frees.size() > 1)
                throw HomlogError("scott_normal_form: more than two variables in scope");
            bool closed = frees.empty();
            std::string w = closed ? scope : *frees.begin();
            std::string r = b.fresh_pred();
            // definitional conjuncts with the matrix renamed to x (outer), y (inner)
            std::map<std::string, std::string> ren;
            ren[v] = "y";
            if (!closed) ren[w] = "x";
            FormulaPtr chi = qf_rename(body, ren);
            FormulaPtr rx = atom(r, {Term::var("x")});
            if (f->kind == Fk::Exists) {
                b.univ_matrices.push_back(lor({lnot(chi), rx}));      // chi => R(x)
                b.exists_matrices.push_back(lor({lnot(rx), chi}));    // R(x) => exists y. chi
            } else {
                b.exists_matrices.push_back(lor({lnot(chi), rx}));    // (forall y.chi) => R(x)
                b.univ_matrices.push_back(lor({lnot(rx), chi}));      // R(x) => chi
            }
            if (closed) {
                // all-or-nothing naming predicate
                b.univ_matrices.push_back(
                    lor({lnot(atom(r, {Term::var("x")})), atom(r, {Term::var("y")})}));
            }
            return atom(r, {Term::var(w)});
        }
        default:
            throw HomlogError("scott_normal_form requires a first-order sentence");
    }
}

}  // namespace

FormulaPtr ScottNormalForm::to_formula() const {
    std::vector<FormulaPtr> conj{forall_many({"x", "y"}, universal_matrix)};
    for (const auto& m : exists_matrices) conj.push_back(forall("x", exists("y", m)));
    return land(std::move(conj));
}

ScottNormalForm scott_normal_form(const FormulaPtr& f, const Signature& sig) {
    FragmentReport rep = classify(f, sig);
    if (!rep.fo2_eq) throw HomlogError("scott_normal_form requires a two-variable sentence");
    ScottBuilder b;
    b.ext = sig;
    FormulaPtr top = scott_rec(b, f, "x");
    // the residual is quantifier-free over at most x; universally close it
    b.univ_matrices.push_back(qf_rename(top, {}));
    ScottNormalForm out;
    out.base_sig = sig;
    out.ext_sig = b.ext;
    out.universal_matrix = land(b.univ_matrices);
    out.exists_matrices = b.exists_matrices;
    return out;
}

// ---------------------------------------------------------------------------
// Capture assembly

namespace {

std::vector<Term> vars_as_terms(const std::vector<std::string>& vs) {
    std::vector<Term> out;
    for (const auto& v : vs) out.push_back(Term::var(v));
    return out;
}

// All permutations of the pool 1..width as variable renamings.
std::vector<std::map<std::string, std::string>> pool_permutations(int width) {
    std::vector<int> idx(width);
    for (int i = 0; i < width; ++i) idx[i] = i + 1;
    std::vector<std::map<std::string, std::string>> out;
    std::sort(idx.begin(), idx.end());
    do {
        std::map<std::string, std::string> m;
        bool identity = true;
        for (int i = 0; i < width; ++i) {
            m[pool_var(i + 1)] = pool_var(idx[i]);
            if (idx[i] != i + 1) identity = false;
        }
        if (!identity) out.push_back(std::move(m));
    } while (std::next_permutation(idx.begin(), idx.end()));
    return out;
}

// nu candidates: maps from the rule's z variables into v_t union constants
// covering v_t with nu(beta) a positive literal of t.
std::vector<std::map<std::string, Term>> guard_witnesses(const GfoExistsRule& rule,
                                                         const TypeDescriptor& t,
                                                         const Signature& sig) {
    std::vector<Term> targets;
    for (const auto& v : t.vars) targets.push_back(Term::var(v));
    for (const auto& c : sig.constants()) targets.push_back(Term::cons(c));
    std::vector<std::map<std::string, Term>> out;
    size_t nz = rule.z_vars.size();
    std::vector<size_t> idx(nz, 0);
    while (true) {
        std::map<std::string, Term> nu;
        for (size_t i = 0; i < nz; ++i) nu[rule.z_vars[i]] = targets[idx[i]];
        // coverage of v_t
        std::set<std::string> covered;
        for (const auto& [z, term] : nu)
            if (term.is_var()) covered.insert(term.name);
        bool covers = true;
        for (const auto& v : t.vars)
            if (!covered.count(v)) covers = false;
        if (covers) {
            TypeLiteral lit;
            lit.positive = true;
            lit.pred = rule.guard->pred;
            for (const auto& term : rule.guard->terms)
                lit.terms.push_back(term.is_var() ? nu.at(term.name) : term);
            if (std::find(t.literals.begin(), t.literals.end(), lit) != t.literals.end())
                out.push_back(std::move(nu));
        }
        if (nz == 0) break;
        size_t i = nz;
        bool done = false;
        while (i > 0) {
            --i;
            if (++idx[i] < targets.size()) break;
            idx[i] = 0;
            if (i == 0) done = true;
        }
        if (done) break;
    }
    return out;
}

// positions of sub.vars inside super.vars (sub a variable subset)
std::optional<std::vector<int>> embed_positions(const TypeDescriptor& sub,
                                                const TypeDescriptor& super) {
    std::vector<int> out;
    for (const auto& v : sub.vars) {
        auto it = std::find(super.vars.begin(), super.vars.end(), v);
        if (it == super.vars.end()) return std::nullopt;
        out.push_back((int)(it - super.vars.begin()));
    }
    return out;
}

// Is t' a fitting extension for (rule, t, nu)? Requires t = t'|_{v_t} and a
// guard witness of gamma extending nu.
bool fitting_extension(const GfoExistsRule& rule, const std::vector<TypeDescriptor>& types,
                       size_t t_idx, const std::map<std::string, Term>& nu, size_t tp_idx,
                       const Signature& sig) {
    const TypeDescriptor& t = types[t_idx];
    const TypeDescriptor& tp = types[tp_idx];
    auto pos = embed_positions(t, tp);
    if (!pos) return false;
    auto sub = subtype_index(types, tp_idx, *pos);
    if (!sub || *sub != t_idx) return false;

    // nu' assigns the y variables into v_{t'} union constants, covering
    // v_{t'} and sending gamma to a positive literal of t'.
    std::vector<Term> targets;
    for (const auto& v : tp.vars) targets.push_back(Term::var(v));
    for (const auto& c : sig.constants()) targets.push_back(Term::cons(c));
    size_t ny = rule.y_vars.size();
    std::vector<size_t> idx(ny, 0);
    while (true) {
        std::map<std::string, Term> nup = nu;
        for (size_t i = 0; i < ny; ++i) nup[rule.y_vars[i]] = targets[idx[i]];
        std::set<std::string> covered;
        for (const auto& [z, term] : nup)
            if (term.is_var()) covered.insert(term.name);
        bool covers = true;
        for (const auto& v : tp.vars)
            if (!covered.count(v)) covers = false;
        if (covers) {
            TypeLiteral lit;
            lit.positive = true;
            lit.pred = rule.head->pred;
            bool ok = true;
            for (const auto& term : rule.head->terms) {
                if (term.is_var()) {
                    auto it = nup.find(term.name);
                    if (it == nup.end()) {
                        ok = false;
                        break;
                    }
                    lit.terms.push_back(it->second);
                } else {
                    lit.terms.push_back(term);
                }
            }
            if (ok &&
                std::find(tp.literals.begin(), tp.literals.end(), lit) != tp.literals.end())
                return true;
        }
        if (ny == 0) break;
        size_t i = ny;
        bool done = false;
        while (i > 0) {
            --i;
            if (++idx[i] < targets.size()) break;
            idx[i] = 0;
            if (i == 0) done = true;
        }
        if (done) break;
    }
    return false;
}

FormulaPtr tp_atom(const TypeDescriptor& t) { return atom(t.tp_pred_name(), vars_as_terms(t.vars)); }

// Positive literals of t as a conjunction (optionally restricted to a
// signature's predicates).
FormulaPtr positive_part(const TypeDescriptor& t, const Signature* restrict_to) {
    std::vector<FormulaPtr> conj;
    for (const auto& l : t.literals) {
        if (!l.positive) continue;
        if (restrict_to && !restrict_to->has_predicate(l.pred)) continue;
        conj.push_back(atom(l.pred, l.terms));
    }
    return land(std::move(conj));
}

// Evaluates a quantifier-free two-variable formula under a type's literal
// polarities (x -> v1, y -> v2; equality of distinct pool variables reads
// false -- rigid types are realized by distinct elements here).
bool type_entails(const TypeDescriptor& t, const FormulaPtr& f,
                  const std::map<std::string, std::string>& varmap) {
    switch (f->kind) {
        case Fk::True:
            return true;
        case Fk::False:
            return false;
        case Fk::Atom: {
            TypeLiteral lit;
            lit.positive = true;
            lit.pred = f->pred;
            for (const auto& term : f->terms)
                lit.terms.push_back(term.is_var() ? Term::var(varmap.at(term.name)) : term);
            for (const auto& l : t.literals)
                if (l.pred == lit.pred && l.terms == lit.terms) return l.positive;
            return false;
        }
        case Fk::Equals: {
            auto resolve = [&](const Term& term) {
                return term.is_var() ? Term::var(varmap.at(term.name)) : term;
            };
            return resolve(f->terms[0]) == resolve(f->terms[1]);
        }
        case Fk::Not:
            return !type_entails(t, f->kids[0], varmap);
        case Fk::And:
            for (const auto& k : f->kids)
                if (!type_entails(t, k, varmap)) return false;
            return true;
        case Fk::Or:
            for (const auto& k : f->kids)
                if (type_entails(t, k, varmap)) return true;
            return false;
        default:
            throw HomlogError("type entailment expects a quantifier-free formula");
    }
}

}  // namespace

CaptureArtifact build_capture(const FormulaPtr& f, const Signature& sig, CaptureFragment frag,
                              int size_bound, const EvalLimits& lim) {
    CaptureArtifact art;
    art.fragment = frag;
    art.base_sig = sig;

    if (frag == CaptureFragment::Gfo || frag == CaptureFragment::Tgf) {
        GfoNormalForm nf =
            frag == CaptureFragment::Gfo ? gfo_normal_form(f, sig) : tgf_normal_form(f, sig);
        art.ext_sig = nf.ext_sig;
        art.normal_form = nf.to_formula();
        art.width = nf.width();
        art.exists_rules = nf.exists_rules;
        art.types = eligible_types(art.ext_sig, art.width, TypeMode::GuardedRigid);
    } else {
        ScottNormalForm nf = scott_normal_form(f, sig);
        art.ext_sig = nf.ext_sig;
        art.normal_form = nf.to_formula();
        art.width = 2;
        art.scott_exists_matrices = nf.exists_matrices;
        art.types = eligible_types(art.ext_sig, 2, TypeMode::Fo2);
    }

    art.full_sig = art.ext_sig;
    for (const auto& t : art.types) art.full_sig.add_predicate(t.tp_pred_name(), t.order());

    art.summaries = model_summary(art.normal_form, art.ext_sig, art.types, size_bound, lim);

    // subtype closure pairs
    for (size_t i = 0; i < art.types.size(); ++i) {
        int n = art.types[i].order();
        for (int mask = 1; mask < (1 << n) - 1; ++mask) {
            std::vector<int> keep;
            for (int j = 0; j < n; ++j)
                if ((mask >> j) & 1) keep.push_back(j);
            auto sub = subtype_index(art.types, i, keep);
            if (sub) art.subtype_pairs.push_back({i, *sub, keep});
        }
    }
    // permutation closure pairs
    for (const auto& kappa : pool_permutations(art.width)) {
        for (size_t i = 0; i < art.types.size(); ++i) {
            auto img = perm_image(art.types, i, kappa);
            if (!img) continue;
            bool identity_action = img->image == i;
            for (size_t k = 0; k < img->arg_of.size() && identity_action; ++k)
                if (img->arg_of[k] != (int)k) identity_action = false;
            if (!identity_action) art.perm_pairs.push_back({i, img->image, img->arg_of});
        }
    }
    // guard entries (guarded fragments)
    if (frag != CaptureFragment::Fo2) {
        for (const auto& rule : art.exists_rules)
            if (rule.z_vars.empty())
                throw HomlogError(
                    "capture: the input's closed existential subformulas produce variable-free "
                    "guards, which the type machinery does not cover");
        for (size_t j = 0; j < art.exists_rules.size(); ++j) {
            const auto& rule = art.exists_rules[j];
            for (size_t ti = 0; ti < art.types.size(); ++ti) {
                for (const auto& nu : guard_witnesses(rule, art.types[ti], art.ext_sig)) {
                    CaptureArtifact::GuardEntry entry;
                    entry.rule = j;
                    entry.t = ti;
                    for (size_t tj = 0; tj < art.types.size(); ++tj)
                        if (fitting_extension(rule, art.types, ti, nu, tj, art.ext_sig))
                            entry.fitting.push_back(tj);
                    art.guard_entries.push_back(std::move(entry));
                }
            }
        }
        // drop exact duplicates
        std::sort(art.guard_entries.begin(), art.guard_entries.end(),
                  [](const auto& a, const auto& b) {
                      return std::tie(a.rule, a.t, a.fitting) < std::tie(b.rule, b.t, b.fitting);
                  });
        art.guard_entries.erase(
            std::unique(art.guard_entries.begin(), art.guard_entries.end(),
                        [](const auto& a, const auto& b) {
                            return a.rule == b.rule && a.t == b.t && a.fitting == b.fitting;
                        }),
            art.guard_entries.end());
    }

    // ---- assemble Psi ----
    const auto& types = art.types;
    std::vector<FormulaPtr> hom_conj;
    for (const auto& t : types)
        hom_conj.push_back(
            forall_many(t.vars, lor({lnot(tp_atom(t)), positive_part(t, nullptr)})));
    FormulaPtr psi_hom = land(std::move(hom_conj));

    std::vector<FormulaPtr> disjuncts;
    for (const auto& summary : art.summaries) {
        std::vector<FormulaPtr> conj;
        // gen 1: realized types are present
        for (size_t i : summary.plus)
            conj.push_back(exists_many(types[i].vars, tp_atom(types[i])));
        // gen 2: unrealized types are empty
        for (size_t i = 0; i < types.size(); ++i)
            if (!summary.plus.count(i))
                conj.push_back(forall_many(types[i].vars, lnot(tp_atom(types[i]))));
        // gen 3: subtype closure
        for (const auto& sp : art.subtype_pairs) {
            if (!summary.plus.count(sp.super) || !summary.plus.count(sp.sub)) continue;
            std::vector<Term> sub_terms;
            for (int pos : sp.positions) sub_terms.push_back(Term::var(types[sp.super].vars[pos]));
            conj.push_back(forall_many(
                types[sp.super].vars,
                lor({lnot(tp_atom(types[sp.super])),
                     atom(types[sp.sub].tp_pred_name(), sub_terms)})));
        }
        // gen 3+: permutation closure
        for (const auto& pp : art.perm_pairs) {
            std::vector<Term> img_terms;
            for (int pos : pp.arg_of) img_terms.push_back(Term::var(types[pp.t].vars[pos]));
            conj.push_back(forall_many(
                types[pp.t].vars,
                lor({lnot(tp_atom(types[pp.t])),
                     atom(types[pp.image].tp_pred_name(), img_terms)})));
        }
        if (art.fragment != CaptureFragment::Fo2) {
            // guard conjuncts
            for (const auto& ge : art.guard_entries) {
                if (!summary.plus.count(ge.t)) continue;
                std::vector<FormulaPtr> options;
                for (size_t tp : ge.fitting) {
                    if (!summary.plus.count(tp)) continue;
                    std::vector<std::string> extra;
                    for (const auto& v : types[tp].vars)
                        if (std::find(types[ge.t].vars.begin(), types[ge.t].vars.end(), v) ==
                            types[ge.t].vars.end())
                            extra.push_back(v);
                    options.push_back(exists_many(extra, tp_atom(types[tp])));
                }
                std::vector<FormulaPtr> disj{lnot(tp_atom(types[ge.t]))};
                disj.push_back(lor(std::move(options)));
                conj.push_back(forall_many(types[ge.t].vars, lor(std::move(disj))));
            }
            if (art.fragment == CaptureFragment::Tgf) {
                // every pair of realized 1-types extends to a realized 2-type
                for (size_t t1 : summary.plus) {
                    if (types[t1].order() != 1 || types[t1].vars[0] != pool_var(1)) continue;
                    for (size_t t2 : summary.plus) {
                        if (types[t2].order() != 1 || types[t2].vars[0] != pool_var(2)) continue;
                        std::vector<FormulaPtr> options;
                        for (size_t tt : summary.plus) {
                            if (types[tt].order() != 2) continue;
                            auto s1 = subtype_index(types, tt, {0});
                            auto s2 = subtype_index(types, tt, {1});
                            if (s1 && s2 && *s1 == t1 && *s2 == t2)
                                options.push_back(atom(types[tt].tp_pred_name(),
                                                       vars_as_terms(types[tt].vars)));
                        }
                        conj.push_back(forall_many(
                            {pool_var(1), pool_var(2)},
                            lor({lnot(atom(types[t1].tp_pred_name(), {Term::var(pool_var(1))})),
                                 lnot(atom(types[t2].tp_pred_name(), {Term::var(pool_var(2))})),
                                 lor(std::move(options))})));
                    }
                }
            }
        } else {
            // FO2 conjuncts: kings, pair completion, Scott witnesses
            auto canon1 = [&](size_t i) -> std::optional<size_t> {
                // 1-type normalized onto v1
                if (types[i].order() != 1) return std::nullopt;
                if (types[i].vars[0] == pool_var(1)) return i;
                for (const auto& pp : art.perm_pairs)
                    if (pp.t == i && types[pp.image].vars[0] == pool_var(1)) return pp.image;
                return std::nullopt;
            };
            for (size_t i : summary.bang) {
                if (types[i].order() != 1 || types[i].vars[0] != pool_var(1)) continue;
                FormulaPtr tx = atom(types[i].tp_pred_name(), {Term::var("x")});
                FormulaPtr ty = atom(types[i].tp_pred_name(), {Term::var("y")});
                conj.push_back(forall_many(
                    {"x", "y"},
                    lor({lnot(tx), lnot(ty), eq(Term::var("x"), Term::var("y"))})));
            }
            for (size_t t1 : summary.plus) {
                if (types[t1].order() != 1 || types[t1].vars[0] != pool_var(1)) continue;
                for (size_t t2 : summary.plus) {
                    if (types[t2].order() != 1 || types[t2].vars[0] != pool_var(1)) continue;
                    std::vector<FormulaPtr> options;
                    for (size_t tt : summary.plus) {
                        if (types[tt].order() != 2) continue;
                        auto s1 = subtype_index(types, tt, {0});
                        auto s2 = subtype_index(types, tt, {1});
                        if (!s1 || !s2) continue;
                        auto c1 = canon1(*s1);
                        auto c2 = canon1(*s2);
                        if (c1 && c2 && *c1 == t1 && *c2 == t2)
                            options.push_back(atom(types[tt].tp_pred_name(),
                                                   {Term::var("x"), Term::var("y")}));
                    }
                    conj.push_back(forall_many(
                        {"x", "y"},
                        lor({lnot(atom(types[t1].tp_pred_name(), {Term::var("x")})),
                             lnot(atom(types[t2].tp_pred_name(), {Term::var("y")})),
                             lor(std::move(options))})));
                }
            }
            for (const auto& psi_i : art.scott_exists_matrices) {
                std::vector<FormulaPtr> ones;
                for (size_t i : summary.plus)
                    if (types[i].order() == 1 && types[i].vars[0] == pool_var(1))
                        ones.push_back(atom(types[i].tp_pred_name(), {Term::var("x")}));
                std::vector<FormulaPtr> wits;
                for (size_t tt : summary.plus) {
                    if (types[tt].order() != 2) continue;
                    if (type_entails(types[tt], psi_i, {{"x", pool_var(1)}, {"y", pool_var(2)}}))
                        wits.push_back(
                            atom(types[tt].tp_pred_name(), {Term::var("x"), Term::var("y")}));
                }
                conj.push_back(forall(
                    "x", exists("y", lor({lnot(lor(std::move(ones))), lor(std::move(wits))}))));
            }
        }
        disjuncts.push_back(land(std::move(conj)));
    }
    art.psi_hom = psi_hom;
    art.psi_disjuncts = disjuncts;
    art.psi = land({psi_hom, lor(std::move(disjuncts))});
    return art;
}

// ---------------------------------------------------------------------------
// Membership by type elimination (guarded captures)

namespace {

std::vector<std::vector<int>> tuples_over(const Structure& b, int arity) {
    std::vector<std::vector<int>> out;
    std::vector<int> t(arity, 0);
    std::function<void(int)> rec = [&](int i) {
        if (i == arity) {
            out.push_back(t);
            return;
        }
        for (int e : b.domain) {
            t[i] = e;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

}  // namespace

bool capture_member(const Structure& b, const CaptureArtifact& art) {
    if (art.fragment == CaptureFragment::Fo2)
        throw HomlogError("capture_member: type elimination applies to guarded captures only "
                          "(the two-variable conjuncts are not union-closed)");
    if (art.fragment == CaptureFragment::Tgf)
        throw HomlogError("capture_member: the triguarded pair-completion conjunct is not "
                          "union-closed; use the constructive transfer check");
    if (!(b.sig == art.base_sig)) throw HomlogError("capture_member: wrong signature");

    // Expand by the auxiliary predicates, interpreted full: they occur only
    // positively in Psi, so the full expansion is the best candidate. Any
    // auxiliary constants (closed-subformula anchors) are quantified
    // projectively, so every interpretation is tried.
    std::vector<std::pair<std::string, int>> aux;
    for (const auto& [p, ar] : art.ext_sig.predicates())
        if (!art.base_sig.has_predicate(p)) aux.push_back({p, ar});
    std::vector<std::string> aux_consts;
    for (const auto& c : art.ext_sig.constants())
        if (!art.base_sig.has_constant(c)) aux_consts.push_back(c);
    if (!aux_consts.empty()) {
        std::vector<size_t> idx(aux_consts.size(), 0);
        while (true) {
            Structure bc = b;
            for (size_t i = 0; i < aux_consts.size(); ++i) {
                bc.sig.add_constant(aux_consts[i]);
                bc.const_interp[aux_consts[i]] = b.domain[idx[i]];
            }
            CaptureArtifact pinned = art;
            pinned.base_sig = bc.sig;
            if (capture_member(bc, pinned)) return true;
            size_t i = aux_consts.size();
            bool more = false;
            while (i > 0) {
                --i;
                if (++idx[i] < b.domain.size()) {
                    std::fill(idx.begin() + i + 1, idx.end(), 0);
                    more = true;
                    break;
                }
            }
            if (!more) return false;
        }
    }
    Structure bx = expand(b, aux, ExpandMode::Full);

    const auto& types = art.types;
    // Static per-type admissible tuples: positive literals hold in bx.
    std::vector<std::vector<std::vector<int>>> admissible(types.size());
    for (size_t i = 0; i < types.size(); ++i) {
        for (const auto& tuple : tuples_over(bx, types[i].order())) {
            bool ok = true;
            std::map<std::string, int> env;
            for (size_t k = 0; k < types[i].vars.size(); ++k) env[types[i].vars[k]] = tuple[k];
            for (const auto& l : types[i].literals) {
                if (!l.positive) continue;
                std::vector<int> args;
                for (const auto& term : l.terms)
                    args.push_back(term.is_var() ? env.at(term.name)
                                                 : bx.const_interp.at(term.name));
                if (!bx.holds(l.pred, args)) {
                    ok = false;
                    break;
                }
            }
            if (ok) admissible[i].push_back(tuple);
        }
    }

    for (const auto& summary : art.summaries) {
        std::vector<std::set<std::vector<int>>> tp(types.size());
        for (size_t i : summary.plus)
            tp[i] = std::set<std::vector<int>>(admissible[i].begin(), admissible[i].end());

        bool changed = true;
        while (changed) {
            changed = false;
            // subtype closure
            for (const auto& sp : art.subtype_pairs) {
                if (!summary.plus.count(sp.super)) continue;
                for (auto it = tp[sp.super].begin(); it != tp[sp.super].end();) {
                    std::vector<int> sub;
                    for (int pos : sp.positions) sub.push_back((*it)[pos]);
                    if (!tp[sp.sub].count(sub)) {
                        it = tp[sp.super].erase(it);
                        changed = true;
                    } else {
                        ++it;
                    }
                }
            }
            // permutation closure
            for (const auto& pp : art.perm_pairs) {
                if (!summary.plus.count(pp.t)) continue;
                for (auto it = tp[pp.t].begin(); it != tp[pp.t].end();) {
                    std::vector<int> img;
                    for (int pos : pp.arg_of) img.push_back((*it)[pos]);
                    if (!tp[pp.image].count(img)) {
                        it = tp[pp.t].erase(it);
                        changed = true;
                    } else {
                        ++it;
                    }
                }
            }
            // guard extensions
            for (const auto& ge : art.guard_entries) {
                if (!summary.plus.count(ge.t)) continue;
                for (auto it = tp[ge.t].begin(); it != tp[ge.t].end();) {
                    bool extendable = false;
                    for (size_t tpi : ge.fitting) {
                        if (!summary.plus.count(tpi)) continue;
                        auto pos = embed_positions(types[ge.t], types[tpi]);
                        for (const auto& cand : tp[tpi]) {
                            bool match = true;
                            for (size_t k = 0; k < pos->size(); ++k)
                                if (cand[(*pos)[k]] != (*it)[k]) {
                                    match = false;
                                    break;
                                }
                            if (match) {
                                extendable = true;
                                break;
                            }
                        }
                        if (extendable) break;
                    }
                    if (!extendable) {
                        it = tp[ge.t].erase(it);
                        changed = true;
                    } else {
                        ++it;
                    }
                }
            }
        }

        bool ok = true;
        for (size_t i : summary.plus)
            if (tp[i].empty()) {
                ok = false;
                break;
            }
        if (ok) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// LFP translation

FormulaPtr lfp_translate_from(const CaptureArtifact& art) {
    if (art.fragment != CaptureFragment::Gfo)
        throw HomlogError("lfp_translate applies to guarded captures");
    const auto& types = art.types;
    std::vector<FormulaPtr> disjuncts;
    for (const auto& summary : art.summaries) {
        auto defs = std::make_shared<std::vector<LfpDef>>();
        for (size_t i = 0; i < types.size(); ++i) {
            LfpDef def;
            def.pred = types[i].neg_tp_pred_name();
            def.arity = types[i].order();
            def.params = types[i].vars;
            std::vector<FormulaPtr> body;
            if (!summary.plus.count(i)) {
                body.push_back(tru());
            } else {
                // complement of a subtype forces the complement of the supertype
                for (const auto& sp : art.subtype_pairs) {
                    if (sp.super != i || !summary.plus.count(sp.sub)) continue;
                    std::vector<Term> sub_terms;
                    for (int pos : sp.positions)
                        sub_terms.push_back(Term::var(types[i].vars[pos]));
                    body.push_back(atom(types[sp.sub].neg_tp_pred_name(), sub_terms));
                }
                for (const auto& pp : art.perm_pairs) {
                    if (pp.t != i) continue;
                    std::vector<Term> img_terms;
                    for (int pos : pp.arg_of) img_terms.push_back(Term::var(types[i].vars[pos]));
                    body.push_back(atom(types[pp.image].neg_tp_pred_name(), img_terms));
                }
                for (const auto& ge : art.guard_entries) {
                    if (ge.t != i) continue;
                    std::vector<FormulaPtr> all_blocked;
                    for (size_t tpi : ge.fitting) {
                        if (!summary.plus.count(tpi)) continue;
                        std::vector<std::string> extra;
                        for (const auto& v : types[tpi].vars)
                            if (std::find(types[i].vars.begin(), types[i].vars.end(), v) ==
                                types[i].vars.end())
                                extra.push_back(v);
                        all_blocked.push_back(forall_many(
                            extra, atom(types[tpi].neg_tp_pred_name(),
                                        vars_as_terms(types[tpi].vars))));
                    }
                    body.push_back(land(std::move(all_blocked)));
                }
                // failure of a positive base-signature literal
                std::vector<FormulaPtr> neg;
                for (const auto& l : types[i].literals) {
                    if (!l.positive || !art.base_sig.has_predicate(l.pred)) continue;
                    neg.push_back(lnot(atom(l.pred, l.terms)));
                }
                body.push_back(lor(std::move(neg)));
            }
            def.body = lor(std::move(body));
            defs->push_back(std::move(def));
        }
        std::vector<FormulaPtr> conj;
        for (size_t i : summary.plus)
            conj.push_back(exists_many(
                types[i].vars,
                lnot(lfp_shared(defs, types[i].neg_tp_pred_name(), vars_as_terms(types[i].vars)))));
        disjuncts.push_back(land(std::move(conj)));
    }
    return lor(std::move(disjuncts));
}

FormulaPtr lfp_translate(const FormulaPtr& f, const Signature& sig, int size_bound,
                         const EvalLimits& lim) {
    CaptureArtifact art = build_capture(f, sig, CaptureFragment::Gfo, size_bound, lim);
    return lfp_translate_from(art);
}

// ---------------------------------------------------------------------------
// Bernays-Schoenfinkel homclosure

FormulaPtr eafo_homclosure(const FormulaPtr& f, const Signature& sig, const EvalLimits& lim) {
    // exists* forall* with quantifier-free matrix
    std::vector<std::string> es, as;
    const Formula* cur = f.get();
    while (cur->kind == Fk::Exists) {
        es.push_back(cur->var);
        cur = cur->kids[0].get();
    }
    while (cur->kind == Fk::Forall) {
        as.push_back(cur->var);
        cur = cur->kids[0].get();
    }
    FormulaPtr matrix(f, cur);
    if (!is_qf(matrix) || !is_first_order(matrix))
        throw HomlogError("eafo_homclosure requires an exists*forall* sentence");

    Signature sk_sig = sig;
    FormulaPtr body = matrix;
    for (size_t i = 0; i < es.size(); ++i) {
        std::string c = fresh_name("__sk" + std::to_string(i), sk_sig);
        sk_sig.add_constant(c);
        body = substitute_var(body, es[i], Term::cons(c));
    }
    FormulaPtr phi_sk = forall_many(as, body);

    int bound = std::max<int>(1, (int)sk_sig.constants().size());
    std::vector<Structure> small;
    for_each_bounded_model(phi_sk, sk_sig, bound, lim, [&](const Structure& m) {
        // keep models whose every element is denoted by a constant (the small
        // induced submodels); a constant-free signature admits any 1-element
        // model
        if (sk_sig.constants().empty()) {
            if (m.domain.size() == 1) small.push_back(m);
            return true;
        }
        std::set<int> denoted;
        for (const auto& [c, e] : m.const_interp) denoted.insert(e);
        if (denoted.size() == m.domain.size()) small.push_back(m);
        return true;
    });

    // tau-reducts, one disjunct per isomorphism class
    std::vector<Structure> reducts;
    for (const auto& m : small) reducts.push_back(normalize_domain(reduct(m, sig)));
    std::vector<FormulaPtr> disj;
    for (const auto& r : dedup_up_to_iso(reducts)) disj.push_back(canonical_query(r));
    return lor(std::move(disj));
}

}  // namespace homlog
