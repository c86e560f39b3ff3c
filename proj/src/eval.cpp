#include "homlog/eval.hpp"

#include <functional>

namespace homlog {

namespace {

using Rel = std::set<std::vector<int>>;
using Overlay = std::map<std::string, Rel>;

struct Ctx {
    const Structure* a;
    EvalLimits lim;
    Overlay overlay;  // SO-bound and Lfp-defined predicate interpretations
    LfpCache* cache = nullptr;
};

int term_value(const Ctx& ctx, const Env& env, const Term& t) {
    if (t.is_var()) {
        auto it = env.find(t.name);
        if (it == env.end()) throw HomlogError("unbound variable: " + t.name);
        return it->second;
    }
    auto it = ctx.a->const_interp.find(t.name);
    if (it == ctx.a->const_interp.end()) throw HomlogError("uninterpreted constant: " + t.name);
    return it->second;
}

bool atom_holds(const Ctx& ctx, const std::string& pred, const std::vector<int>& tuple) {
    auto ov = ctx.overlay.find(pred);
    if (ov != ctx.overlay.end()) return ov->second.count(tuple) != 0;
    auto it = ctx.a->relations.find(pred);
    if (it != ctx.a->relations.end()) return it->second.count(tuple) != 0;
    if (!ctx.a->sig.has_predicate(pred)) throw HomlogError("unknown predicate: " + pred);
    return false;
}

std::uint64_t cells_for(const Ctx& ctx, int arity) {
    std::uint64_t c = 1;
    for (int i = 0; i < arity; ++i) c *= ctx.a->domain.size();
    return c;
}

std::vector<std::vector<int>> tuple_space(const Structure& a, int arity) {
    std::vector<std::vector<int>> out;
    std::vector<int> t(arity, 0);
    std::function<void(int)> rec = [&](int i) {
        if (i == arity) {
            out.push_back(t);
            return;
        }
        for (int e : a.domain) {
            t[i] = e;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

bool eval_rec(Ctx& ctx, const FormulaPtr& f, Env& env);

std::map<std::string, Rel> run_lfp(Ctx& ctx, const Formula& node, Env& env);

bool eval_rec(Ctx& ctx, const FormulaPtr& f, Env& env) {
    switch (f->kind) {
        case Fk::True:
            return true;
        case Fk::False:
            return false;
        case Fk::Atom: {
            std::vector<int> tuple(f->terms.size());
            for (size_t i = 0; i < f->terms.size(); ++i) tuple[i] = term_value(ctx, env, f->terms[i]);
            return atom_holds(ctx, f->pred, tuple);
        }
        case Fk::Equals:
            return term_value(ctx, env, f->terms[0]) == term_value(ctx, env, f->terms[1]);
        case Fk::Not:
            return !eval_rec(ctx, f->kids[0], env);
        case Fk::And:
            for (const auto& k : f->kids)
                if (!eval_rec(ctx, k, env)) return false;
            return true;
        case Fk::Or:
            for (const auto& k : f->kids)
                if (eval_rec(ctx, k, env)) return true;
            return false;
        case Fk::Exists:
        case Fk::Forall: {
            bool want = f->kind == Fk::Exists;
            auto prev = env.find(f->var);
            std::pair<bool, int> saved{false, 0};
            if (prev != env.end()) saved = {true, prev->second};
            bool result = !want;
            for (int e : ctx.a->domain) {
                env[f->var] = e;
                if (eval_rec(ctx, f->kids[0], env) == want) {
                    result = want;
                    break;
                }
            }
            if (saved.first)
                env[f->var] = saved.second;
            else
                env.erase(f->var);
            return result;
        }
        case Fk::ExistsSO:
        case Fk::ForallSO:
        case Fk::ExistsFinSO: {
            // Every relation on a finite structure is finite, so the finite-
            // relation quantifier evaluates as a plain existential.
            bool want = f->kind != Fk::ForallSO;
            std::uint64_t cells = cells_for(ctx, f->so_arity);
            if (cells > (std::uint64_t)ctx.lim.so_cell_budget)
                throw BudgetExceeded("SO quantifier over " + std::to_string(cells) +
                                     " cells exceeds budget of " +
                                     std::to_string(ctx.lim.so_cell_budget));
            auto space = tuple_space(*ctx.a, f->so_arity);
            auto saved = ctx.overlay.find(f->so_pred) != ctx.overlay.end()
                             ? std::optional<Rel>(ctx.overlay[f->so_pred])
                             : std::nullopt;
            bool result = !want;
            for (std::uint64_t mask = 0; mask < (1ull << cells); ++mask) {
                Rel rel;
                for (std::uint64_t i = 0; i < cells; ++i)
                    if ((mask >> i) & 1) rel.insert(space[i]);
                ctx.overlay[f->so_pred] = std::move(rel);
                if (eval_rec(ctx, f->kids[0], env) == want) {
                    result = want;
                    break;
                }
            }
            if (saved)
                ctx.overlay[f->so_pred] = *saved;
            else
                ctx.overlay.erase(f->so_pred);
            return result;
        }
        case Fk::Lfp: {
            auto fix = run_lfp(ctx, *f, env);
            std::vector<int> tuple(f->goal_terms.size());
            for (size_t i = 0; i < f->goal_terms.size(); ++i)
                tuple[i] = term_value(ctx, env, f->goal_terms[i]);
            return fix.at(f->goal_pred).count(tuple) != 0;
        }
    }
    return false;
}

std::map<std::string, Rel> run_lfp(Ctx& ctx, const Formula& node, Env& env) {
    if (ctx.cache) {
        auto key = std::make_pair((const void*)ctx.a, (const void*)node.defs.get());
        auto it = ctx.cache->memo.find(key);
        if (it != ctx.cache->memo.end()) return it->second;
    }
    const auto& defs = node.def_list();
    std::map<std::string, Rel> interp;
    for (const auto& d : defs) interp[d.pred];

    // Save and install overlay entries for the defined predicates.
    std::map<std::string, std::optional<Rel>> saved;
    for (const auto& d : defs) {
        auto it = ctx.overlay.find(d.pred);
        saved[d.pred] = it != ctx.overlay.end() ? std::optional<Rel>(it->second) : std::nullopt;
    }

    std::map<std::string, std::vector<std::vector<int>>> spaces;
    for (const auto& d : defs) spaces[d.pred] = tuple_space(*ctx.a, d.arity);

    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& d : defs) ctx.overlay[d.pred] = interp[d.pred];
        for (const auto& d : defs) {
            for (const auto& tuple : spaces[d.pred]) {
                if (interp[d.pred].count(tuple)) continue;
                Env benv = env;
                for (size_t i = 0; i < d.params.size(); ++i) benv[d.params[i]] = tuple[i];
                if (eval_rec(ctx, d.body, benv)) {
                    interp[d.pred].insert(tuple);
                    changed = true;
                }
            }
        }
    }

    for (const auto& [p, val] : saved) {
        if (val)
            ctx.overlay[p] = *val;
        else
            ctx.overlay.erase(p);
    }

    if (ctx.cache) {
        auto key = std::make_pair((const void*)ctx.a, (const void*)node.defs.get());
        ctx.cache->memo[key] = interp;
    }
    return interp;
}

}  // namespace

bool eval(const Structure& a, const FormulaPtr& f, const Env& env, const EvalLimits& lim,
          LfpCache* cache) {
    Ctx ctx{&a, lim, {}, cache};
    Env e = env;
    return eval_rec(ctx, f, e);
}

bool eval_fo(const Structure& a, const FormulaPtr& f, const Env& env) {
    if (!is_first_order(f)) throw HomlogError("eval_fo requires a first-order formula");
    return eval(a, f, env);
}

bool eval_so(const Structure& a, const FormulaPtr& f, const EvalLimits& lim) {
    return eval(a, f, {}, lim);
}

bool eval_lfp(const Structure& a, const FormulaPtr& f, LfpCache* cache) {
    return eval(a, f, {}, {}, cache);
}

std::map<std::string, std::set<std::vector<int>>> lfp_fixpoint(const Structure& a,
                                                               const FormulaPtr& lfp_node,
                                                               const Env& env) {
    if (lfp_node->kind != Fk::Lfp) throw HomlogError("lfp_fixpoint expects an Lfp node");
    Ctx ctx{&a, {}, {}, nullptr};
    Env e = env;
    return run_lfp(ctx, *lfp_node, e);
}

// ---------------------------------------------------------------------------
// Naive grounding evaluator (independent oracle).

namespace {

// Ground boolean value of a quantifier-free formula under a total assignment
// in which every variable was replaced by a concrete element id.
bool ground_eval(const Structure& a, const FormulaPtr& f, const Env& env);

FormulaPtr ground_subst(const FormulaPtr& f, const std::string& v, int element,
                        std::map<std::string, int>& pseudo) {
    // Represent a grounded element by a pseudo-variable "#k"; ground_eval
    // resolves those without touching the environment machinery.
    std::string pseudo_name = "#" + std::to_string(element);
    pseudo[pseudo_name] = element;
    return substitute_var(f, v, Term::var(pseudo_name));
}

bool ground_eval(const Structure& a, const FormulaPtr& f, const Env& env) {
    switch (f->kind) {
        case Fk::True:
            return true;
        case Fk::False:
            return false;
        case Fk::Atom: {
            std::vector<int> t;
            for (const auto& x : f->terms) {
                if (x.is_var())
                    t.push_back(env.at(x.name));
                else
                    t.push_back(a.const_interp.at(x.name));
            }
            return a.holds(f->pred, t);
        }
        case Fk::Equals: {
            auto val = [&](const Term& x) {
                return x.is_var() ? env.at(x.name) : a.const_interp.at(x.name);
            };
            return val(f->terms[0]) == val(f->terms[1]);
        }
        case Fk::Not:
            return !ground_eval(a, f->kids[0], env);
        case Fk::And:
            for (const auto& k : f->kids)
                if (!ground_eval(a, k, env)) return false;
            return true;
        case Fk::Or:
            for (const auto& k : f->kids)
                if (ground_eval(a, k, env)) return true;
            return false;
        default:
            throw HomlogError("naive evaluator reached a non-ground node");
    }
}

FormulaPtr expand_quantifiers(const Structure& a, const FormulaPtr& f,
                              std::map<std::string, int>& pseudo) {
    switch (f->kind) {
        case Fk::True:
        case Fk::False:
        case Fk::Atom:
        case Fk::Equals:
            return f;
        case Fk::Not:
            return lnot(expand_quantifiers(a, f->kids[0], pseudo));
        case Fk::And:
        case Fk::Or: {
            std::vector<FormulaPtr> kids;
            for (const auto& k : f->kids) kids.push_back(expand_quantifiers(a, k, pseudo));
            return f->kind == Fk::And ? land(std::move(kids)) : lor(std::move(kids));
        }
        case Fk::Exists:
        case Fk::Forall: {
            std::vector<FormulaPtr> kids;
            for (int e : a.domain) {
                FormulaPtr inst = ground_subst(f->kids[0], f->var, e, pseudo);
                kids.push_back(expand_quantifiers(a, inst, pseudo));
            }
            return f->kind == Fk::Exists ? lor(std::move(kids)) : land(std::move(kids));
        }
        default:
            throw HomlogError("eval_fo_naive requires a first-order formula");
    }
}

}  // namespace

bool eval_fo_naive(const Structure& a, const FormulaPtr& f, const Env& env) {
    if (!is_first_order(f)) throw HomlogError("eval_fo_naive requires a first-order formula");
    std::map<std::string, int> pseudo = env;
    FormulaPtr ground = expand_quantifiers(a, f, pseudo);
    return ground_eval(a, ground, pseudo);
}

}  // namespace homlog
