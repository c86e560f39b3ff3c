#include "homlog/formula.hpp"

#include <algorithm>

namespace homlog {

namespace {
FormulaPtr make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }
}  // namespace

FormulaPtr atom(std::string pred, std::vector<Term> terms) {
    Formula f;
    f.kind = Fk::Atom;
    f.pred = std::move(pred);
    f.terms = std::move(terms);
    return make(std::move(f));
}

FormulaPtr eq(Term a, Term b) {
    Formula f;
    f.kind = Fk::Equals;
    f.terms = {std::move(a), std::move(b)};
    return make(std::move(f));
}

FormulaPtr neq(Term a, Term b) { return lnot(eq(std::move(a), std::move(b))); }

FormulaPtr tru() {
    static FormulaPtr t = make(Formula{});
    return t;
}

FormulaPtr fal() {
    Formula f;
    f.kind = Fk::False;
    static FormulaPtr ff = make(std::move(f));
    return ff;
}

FormulaPtr lnot(FormulaPtr f) {
    Formula g;
    g.kind = Fk::Not;
    g.kids = {std::move(f)};
    return make(std::move(g));
}

FormulaPtr land(std::vector<FormulaPtr> kids) {
    if (kids.empty()) return tru();
    if (kids.size() == 1) return kids[0];
    Formula f;
    f.kind = Fk::And;
    f.kids = std::move(kids);
    return make(std::move(f));
}

FormulaPtr lor(std::vector<FormulaPtr> kids) {
    if (kids.empty()) return fal();
    if (kids.size() == 1) return kids[0];
    Formula f;
    f.kind = Fk::Or;
    f.kids = std::move(kids);
    return make(std::move(f));
}

FormulaPtr implies(FormulaPtr a, FormulaPtr b) { return lor({lnot(std::move(a)), std::move(b)}); }

FormulaPtr iff(FormulaPtr a, FormulaPtr b) {
    return land({implies(a, b), implies(b, a)});
}

FormulaPtr exists(std::string var, FormulaPtr f) {
    Formula g;
    g.kind = Fk::Exists;
    g.var = std::move(var);
    g.kids = {std::move(f)};
    return make(std::move(g));
}

FormulaPtr forall(std::string var, FormulaPtr f) {
    Formula g;
    g.kind = Fk::Forall;
    g.var = std::move(var);
    g.kids = {std::move(f)};
    return make(std::move(g));
}

FormulaPtr exists_many(const std::vector<std::string>& vars, FormulaPtr f) {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) f = exists(*it, std::move(f));
    return f;
}

FormulaPtr forall_many(const std::vector<std::string>& vars, FormulaPtr f) {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) f = forall(*it, std::move(f));
    return f;
}

static FormulaPtr so_quant(Fk kind, std::string pred, int arity, FormulaPtr f) {
    Formula g;
    g.kind = kind;
    g.so_pred = std::move(pred);
    g.so_arity = arity;
    g.kids = {std::move(f)};
    return make(std::move(g));
}

FormulaPtr exists_so(std::string pred, int arity, FormulaPtr f) {
    return so_quant(Fk::ExistsSO, std::move(pred), arity, std::move(f));
}
FormulaPtr forall_so(std::string pred, int arity, FormulaPtr f) {
    return so_quant(Fk::ForallSO, std::move(pred), arity, std::move(f));
}
FormulaPtr exists_fin_so(std::string pred, int arity, FormulaPtr f) {
    return so_quant(Fk::ExistsFinSO, std::move(pred), arity, std::move(f));
}

FormulaPtr lfp(std::vector<LfpDef> defs, std::string goal_pred, std::vector<Term> goal_terms) {
    return lfp_shared(std::make_shared<const std::vector<LfpDef>>(std::move(defs)),
                      std::move(goal_pred), std::move(goal_terms));
}

FormulaPtr lfp_shared(std::shared_ptr<const std::vector<LfpDef>> defs, std::string goal_pred,
                      std::vector<Term> goal_terms) {
    Formula f;
    f.kind = Fk::Lfp;
    f.defs = std::move(defs);
    f.goal_pred = std::move(goal_pred);
    f.goal_terms = std::move(goal_terms);
    return make(std::move(f));
}

bool struct_equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Fk::True:
        case Fk::False:
            return true;
        case Fk::Atom:
            return a->pred == b->pred && a->terms == b->terms;
        case Fk::Equals:
            return a->terms == b->terms;
        case Fk::Not:
            return struct_equal(a->kids[0], b->kids[0]);
        case Fk::And:
        case Fk::Or: {
            if (a->kids.size() != b->kids.size()) return false;
            for (size_t i = 0; i < a->kids.size(); ++i)
                if (!struct_equal(a->kids[i], b->kids[i])) return false;
            return true;
        }
        case Fk::Exists:
        case Fk::Forall:
            return a->var == b->var && struct_equal(a->kids[0], b->kids[0]);
        case Fk::ExistsSO:
        case Fk::ForallSO:
        case Fk::ExistsFinSO:
            return a->so_pred == b->so_pred && a->so_arity == b->so_arity &&
                   struct_equal(a->kids[0], b->kids[0]);
        case Fk::Lfp: {
            if (a->goal_pred != b->goal_pred || !(a->goal_terms == b->goal_terms)) return false;
            if (a->def_list().size() != b->def_list().size()) return false;
            for (size_t i = 0; i < a->def_list().size(); ++i) {
                const auto& da = a->def_list()[i];
                const auto& db = b->def_list()[i];
                if (da.pred != db.pred || da.arity != db.arity || da.params != db.params ||
                    !struct_equal(da.body, db.body))
                    return false;
            }
            return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string term_text(const Term& t) { return t.name; }

std::string terms_text(const std::vector<Term>& ts) {
    std::string s = "(";
    for (size_t i = 0; i < ts.size(); ++i) {
        if (i) s += ",";
        s += term_text(ts[i]);
    }
    s += ")";
    return s;
}

bool is_atomic_like(const FormulaPtr& f) {
    switch (f->kind) {
        case Fk::Atom:
        case Fk::Equals:
        case Fk::True:
        case Fk::False:
        case Fk::Lfp:
            return true;
        case Fk::Not: {
            Fk inner = f->kids[0]->kind;
            // != leaves and negated atomic pieces need no parentheses.
            return inner == Fk::Equals || inner == Fk::Atom || inner == Fk::True ||
                   inner == Fk::False;
        }
        default:
            return false;
    }
}

std::string render(const FormulaPtr& f);

std::string render_child(const FormulaPtr& f) {
    if (is_atomic_like(f)) return render(f);
    return "(" + render(f) + ")";
}

std::string render(const FormulaPtr& f) {
    switch (f->kind) {
        case Fk::True:
            return "true";
        case Fk::False:
            return "false";
        case Fk::Atom:
            return f->pred + terms_text(f->terms);
        case Fk::Equals:
            return term_text(f->terms[0]) + " = " + term_text(f->terms[1]);
        case Fk::Not:
            if (f->kids[0]->kind == Fk::Equals) {
                const auto& e = f->kids[0];
                return term_text(e->terms[0]) + " != " + term_text(e->terms[1]);
            }
            return "!" + render_child(f->kids[0]);
        case Fk::And:
        case Fk::Or: {
            const char* op = f->kind == Fk::And ? " & " : " | ";
            std::string s;
            for (size_t i = 0; i < f->kids.size(); ++i) {
                if (i) s += op;
                s += render_child(f->kids[i]);
            }
            return s;
        }
        case Fk::Exists:
        case Fk::Forall: {
            // Collect a run of equal quantifiers: "forall x y. ...".
            std::string s = f->kind == Fk::Exists ? "exists" : "forall";
            Fk k = f->kind;
            const Formula* cur = f.get();
            while (true) {
                s += " " + cur->var;
                const Formula* next = cur->kids[0].get();
                if (next->kind == k) {
                    cur = next;
                } else {
                    break;
                }
            }
            const FormulaPtr& body = cur->kids[0];
            s += ". " + render_child(body);
            return s;
        }
        case Fk::ExistsSO:
        case Fk::ForallSO:
        case Fk::ExistsFinSO: {
            const char* kw = f->kind == Fk::ExistsSO    ? "existsSO"
                             : f->kind == Fk::ForallSO  ? "forallSO"
                                                        : "existsFin";
            return std::string(kw) + " " + f->so_pred + "/" + std::to_string(f->so_arity) +
                   ". " + render_child(f->kids[0]);
        }
        case Fk::Lfp: {
            std::string s = "lfp {";
            for (size_t i = 0; i < f->def_list().size(); ++i) {
                const auto& d = f->def_list()[i];
                if (i) s += " ;";
                s += " " + d.pred + "(";
                for (size_t j = 0; j < d.params.size(); ++j) {
                    if (j) s += ",";
                    s += d.params[j];
                }
                s += ") <- " + render_child(d.body);
            }
            s += " } in " + f->goal_pred + terms_text(f->goal_terms);
            return s;
        }
    }
    return "?";
}

}  // namespace

std::string to_text(const FormulaPtr& f) { return render(f); }

// ---------------------------------------------------------------------------
// Variable / symbol collection

namespace {

void walk_free(const FormulaPtr& f, std::set<std::string>& bound, std::set<std::string>& out) {
    switch (f->kind) {
        case Fk::Atom:
        case Fk::Equals:
            for (const auto& t : f->terms)
                if (t.is_var() && !bound.count(t.name)) out.insert(t.name);
            break;
        case Fk::Exists:
        case Fk::Forall: {
            bool had = bound.count(f->var) != 0;
            bound.insert(f->var);
            walk_free(f->kids[0], bound, out);
            if (!had) bound.erase(f->var);
            break;
        }
        case Fk::Lfp: {
            for (const auto& t : f->goal_terms)
                if (t.is_var() && !bound.count(t.name)) out.insert(t.name);
            for (const auto& d : f->def_list()) {
                std::set<std::string> b2 = bound;
                for (const auto& p : d.params) b2.insert(p);
                walk_free(d.body, b2, out);
            }
            break;
        }
        default:
            for (const auto& k : f->kids) walk_free(k, bound, out);
    }
}

}  // namespace

std::set<std::string> free_vars(const FormulaPtr& f) {
    std::set<std::string> bound, out;
    walk_free(f, bound, out);
    return out;
}

std::set<std::string> all_vars(const FormulaPtr& f) {
    std::set<std::string> out;
    std::vector<const Formula*> stack{f.get()};
    while (!stack.empty()) {
        const Formula* cur = stack.back();
        stack.pop_back();
        for (const auto& t : cur->terms)
            if (t.is_var()) out.insert(t.name);
        for (const auto& t : cur->goal_terms)
            if (t.is_var()) out.insert(t.name);
        if (cur->kind == Fk::Exists || cur->kind == Fk::Forall) out.insert(cur->var);
        for (const auto& d : cur->def_list()) {
            for (const auto& p : d.params) out.insert(p);
            stack.push_back(d.body.get());
        }
        for (const auto& k : cur->kids) stack.push_back(k.get());
    }
    return out;
}

std::set<std::string> constants_of(const FormulaPtr& f) {
    std::set<std::string> out;
    std::vector<const Formula*> stack{f.get()};
    while (!stack.empty()) {
        const Formula* cur = stack.back();
        stack.pop_back();
        for (const auto& t : cur->terms)
            if (!t.is_var()) out.insert(t.name);
        for (const auto& t : cur->goal_terms)
            if (!t.is_var()) out.insert(t.name);
        for (const auto& d : cur->def_list()) stack.push_back(d.body.get());
        for (const auto& k : cur->kids) stack.push_back(k.get());
    }
    return out;
}

std::set<std::string> predicates_of(const FormulaPtr& f) {
    std::set<std::string> out;
    std::vector<const Formula*> stack{f.get()};
    while (!stack.empty()) {
        const Formula* cur = stack.back();
        stack.pop_back();
        if (cur->kind == Fk::Atom) out.insert(cur->pred);
        if (cur->kind == Fk::Lfp) {
            out.insert(cur->goal_pred);
            for (const auto& d : cur->def_list()) stack.push_back(d.body.get());
        }
        for (const auto& k : cur->kids) stack.push_back(k.get());
    }
    return out;
}

bool is_first_order(const FormulaPtr& f) {
    switch (f->kind) {
        case Fk::ExistsSO:
        case Fk::ForallSO:
        case Fk::ExistsFinSO:
        case Fk::Lfp:
            return false;
        default:
            for (const auto& k : f->kids)
                if (!is_first_order(k)) return false;
            return true;
    }
}

bool is_sentence(const FormulaPtr& f) { return free_vars(f).empty(); }

// ---------------------------------------------------------------------------
// Validation

namespace {

struct ValidateCtx {
    const Signature* sig;
    // SO-bound / Lfp-defined predicates visible here, name -> arity.
    std::map<std::string, int> extra;
};

void validate_rec(const FormulaPtr& f, ValidateCtx& ctx) {
    switch (f->kind) {
        case Fk::Atom: {
            int want;
            auto it = ctx.extra.find(f->pred);
            if (it != ctx.extra.end()) {
                want = it->second;
            } else {
                auto ar = ctx.sig->arity_of(f->pred);
                if (!ar) throw HomlogError("unknown predicate: " + f->pred);
                want = *ar;
            }
            if ((int)f->terms.size() != want)
                throw HomlogError("arity mismatch for " + f->pred + ": expected " +
                                  std::to_string(want) + ", got " + std::to_string(f->terms.size()));
            for (const auto& t : f->terms)
                if (!t.is_var() && !ctx.sig->has_constant(t.name))
                    throw HomlogError("unknown constant: " + t.name);
            break;
        }
        case Fk::Equals:
            for (const auto& t : f->terms)
                if (!t.is_var() && !ctx.sig->has_constant(t.name))
                    throw HomlogError("unknown constant: " + t.name);
            break;
        case Fk::ExistsSO:
        case Fk::ForallSO:
        case Fk::ExistsFinSO: {
            if (f->so_arity < 1) throw HomlogError("SO predicate arity must be >= 1");
            auto saved = ctx.extra;
            ctx.extra[f->so_pred] = f->so_arity;
            validate_rec(f->kids[0], ctx);
            ctx.extra = saved;
            break;
        }
        case Fk::Lfp: {
            auto saved = ctx.extra;
            for (const auto& d : f->def_list()) {
                if (d.arity < 1 || (int)d.params.size() != d.arity)
                    throw HomlogError("lfp definition arity mismatch for " + d.pred);
                ctx.extra[d.pred] = d.arity;
            }
            bool goal_known = ctx.extra.count(f->goal_pred) != 0;
            if (!goal_known) throw HomlogError("lfp goal predicate not defined: " + f->goal_pred);
            if ((int)f->goal_terms.size() != ctx.extra[f->goal_pred])
                throw HomlogError("lfp goal arity mismatch");
            for (const auto& t : f->goal_terms)
                if (!t.is_var() && !ctx.sig->has_constant(t.name))
                    throw HomlogError("unknown constant: " + t.name);
            for (const auto& d : f->def_list()) validate_rec(d.body, ctx);
            // Positivity of defined predicates in all bodies, after NNF.
            for (const auto& d : f->def_list()) {
                if (!is_first_order(d.body))
                    throw HomlogError("lfp bodies must be first-order over the defined predicates");
                FormulaPtr n = nnf(d.body);
                std::vector<std::pair<const Formula*, bool>> stack{{n.get(), true}};
                while (!stack.empty()) {
                    auto [cur, pos] = stack.back();
                    stack.pop_back();
                    if (cur->kind == Fk::Not) {
                        stack.push_back({cur->kids[0].get(), !pos});
                        continue;
                    }
                    if (cur->kind == Fk::Atom && !pos) {
                        for (const auto& dd : f->def_list())
                            if (dd.pred == cur->pred)
                                throw HomlogError("non-positive occurrence of lfp predicate " +
                                                  cur->pred);
                    }
                    for (const auto& k : cur->kids) stack.push_back({k.get(), pos});
                }
            }
            ctx.extra = saved;
            break;
        }
        default:
            for (const auto& k : f->kids) validate_rec(k, ctx);
    }
}

}  // namespace

void validate(const FormulaPtr& f, const Signature& sig) {
    ValidateCtx ctx{&sig, {}};
    validate_rec(f, ctx);
}

// ---------------------------------------------------------------------------
// NNF

namespace {

FormulaPtr nnf_pos(const FormulaPtr& f);
FormulaPtr nnf_neg(const FormulaPtr& f);

FormulaPtr nnf_pos(const FormulaPtr& f) {
    switch (f->kind) {
        case Fk::Atom:
        case Fk::Equals:
        case Fk::True:
        case Fk::False:
            return f;
        case Fk::Not:
            return nnf_neg(f->kids[0]);
        case Fk::And:
        case Fk::Or: {
            std::vector<FormulaPtr> kids;
            kids.reserve(f->kids.size());
            for (const auto& k : f->kids) kids.push_back(nnf_pos(k));
            return f->kind == Fk::And ? land(std::move(kids)) : lor(std::move(kids));
        }
        case Fk::Exists:
            return exists(f->var, nnf_pos(f->kids[0]));
        case Fk::Forall:
            return forall(f->var, nnf_pos(f->kids[0]));
        default:
            throw HomlogError("nnf requires a first-order formula");
    }
}

FormulaPtr nnf_neg(const FormulaPtr& f) {
    switch (f->kind) {
        case Fk::Atom:
        case Fk::Equals:
            return lnot(f);
        case Fk::True:
            return fal();
        case Fk::False:
            return tru();
        case Fk::Not:
            return nnf_pos(f->kids[0]);
        case Fk::And:
        case Fk::Or: {
            std::vector<FormulaPtr> kids;
            kids.reserve(f->kids.size());
            for (const auto& k : f->kids) kids.push_back(nnf_neg(k));
            return f->kind == Fk::And ? lor(std::move(kids)) : land(std::move(kids));
        }
        case Fk::Exists:
            return forall(f->var, nnf_neg(f->kids[0]));
        case Fk::Forall:
            return exists(f->var, nnf_neg(f->kids[0]));
        default:
            throw HomlogError("nnf requires a first-order formula");
    }
}

}  // namespace

FormulaPtr nnf(const FormulaPtr& f) {
    if (!is_first_order(f)) throw HomlogError("nnf requires a first-order formula");
    return nnf_pos(f);
}

int quantifier_rank(const FormulaPtr& f) {
    switch (f->kind) {
        case Fk::Atom:
        case Fk::Equals:
        case Fk::True:
        case Fk::False:
            return 0;
        case Fk::Exists:
        case Fk::Forall:
            return 1 + quantifier_rank(f->kids[0]);
        case Fk::Not:
        case Fk::And:
        case Fk::Or: {
            int m = 0;
            for (const auto& k : f->kids) m = std::max(m, quantifier_rank(k));
            return m;
        }
        default:
            throw HomlogError("quantifier_rank requires a first-order formula");
    }
}

// ---------------------------------------------------------------------------
// Substitution / renaming

FormulaPtr substitute_var(const FormulaPtr& f, const std::string& v, const Term& t) {
    switch (f->kind) {
        case Fk::Atom:
        case Fk::Equals: {
            bool hit = false;
            for (const auto& x : f->terms)
                if (x.is_var() && x.name == v) hit = true;
            if (!hit) return f;
            Formula g = *f;
            for (auto& x : g.terms)
                if (x.is_var() && x.name == v) x = t;
            return std::make_shared<const Formula>(std::move(g));
        }
        case Fk::True:
        case Fk::False:
            return f;
        case Fk::Exists:
        case Fk::Forall: {
            if (f->var == v) return f;  // v is shadowed
            // Inputs in this codebase never substitute a term whose variable
            // is captured; guard anyway.
            if (t.is_var() && t.name == f->var)
                throw HomlogError("substitution would capture variable " + t.name);
            auto body = substitute_var(f->kids[0], v, t);
            return f->kind == Fk::Exists ? exists(f->var, body) : forall(f->var, body);
        }
        case Fk::Lfp: {
            Formula g = *f;
            for (auto& x : g.goal_terms)
                if (x.is_var() && x.name == v) x = t;
            auto defs = std::make_shared<std::vector<LfpDef>>(f->def_list());
            for (auto& d : *defs) {
                bool shadowed = std::find(d.params.begin(), d.params.end(), v) != d.params.end();
                if (!shadowed) d.body = substitute_var(d.body, v, t);
            }
            g.defs = std::move(defs);
            return std::make_shared<const Formula>(std::move(g));
        }
        default: {
            Formula g = *f;
            for (auto& k : g.kids) k = substitute_var(k, v, t);
            return std::make_shared<const Formula>(std::move(g));
        }
    }
}

FormulaPtr rename_predicates(const FormulaPtr& f, const std::map<std::string, std::string>& renaming) {
    switch (f->kind) {
        case Fk::Atom: {
            auto it = renaming.find(f->pred);
            if (it == renaming.end()) return f;
            Formula g = *f;
            g.pred = it->second;
            return std::make_shared<const Formula>(std::move(g));
        }
        case Fk::Equals:
        case Fk::True:
        case Fk::False:
            return f;
        case Fk::ExistsSO:
        case Fk::ForallSO:
        case Fk::ExistsFinSO: {
            Formula g = *f;
            if (renaming.count(f->so_pred)) {
                // Bound SO predicate shadows the renaming inside.
                auto inner = renaming;
                inner.erase(f->so_pred);
                g.kids = {rename_predicates(f->kids[0], inner)};
            } else {
                g.kids = {rename_predicates(f->kids[0], renaming)};
            }
            return std::make_shared<const Formula>(std::move(g));
        }
        case Fk::Lfp: {
            Formula g = *f;
            auto inner = renaming;
            for (const auto& d : f->def_list()) inner.erase(d.pred);
            auto defs = std::make_shared<std::vector<LfpDef>>(f->def_list());
            for (auto& d : *defs) d.body = rename_predicates(d.body, inner);
            g.defs = std::move(defs);
            return std::make_shared<const Formula>(std::move(g));
        }
        default: {
            Formula g = *f;
            for (auto& k : g.kids) k = rename_predicates(k, renaming);
            return std::make_shared<const Formula>(std::move(g));
        }
    }
}

bool is_reserved_name(const std::string& name) { return name.rfind("__", 0) == 0; }

std::string fresh_name(const std::string& stem, const Signature& sig,
                       const std::set<std::string>& also_avoid) {
    auto taken = [&](const std::string& n) {
        return sig.has_predicate(n) || sig.has_constant(n) || also_avoid.count(n) != 0;
    };
    if (!taken(stem)) return stem;
    for (int i = 0;; ++i) {
        std::string cand = stem + "_" + std::to_string(i);
        if (!taken(cand)) return cand;
    }
}

}  // namespace homlog
