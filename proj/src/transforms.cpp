#include "homlog/transforms.hpp"

#include <algorithm>
#include <optional>

namespace homlog {

namespace {

FormulaPtr relativize_guard(const FormulaPtr& f, const std::string& u) {
    switch (f->kind) {
        case Fk::Atom:
        case Fk::Equals:
        case Fk::True:
        case Fk::False:
            return f;
        case Fk::Not:
            return lnot(relativize_guard(f->kids[0], u));
        case Fk::And:
        case Fk::Or: {
            std::vector<FormulaPtr> kids;
            for (const auto& k : f->kids) kids.push_back(relativize_guard(k, u));
            return f->kind == Fk::And ? land(std::move(kids)) : lor(std::move(kids));
        }
        case Fk::Exists:
            return exists(f->var, land({atom(u, {Term::var(f->var)}),
                                        relativize_guard(f->kids[0], u)}));
        case Fk::Forall:
            return forall(f->var, lor({lnot(atom(u, {Term::var(f->var)})),
                                       relativize_guard(f->kids[0], u)}));
        case Fk::ExistsSO:
        case Fk::ForallSO:
        case Fk::ExistsFinSO: {
            Formula g = *f;
            g.kids = {relativize_guard(f->kids[0], u)};
            return std::make_shared<const Formula>(std::move(g));
        }
        case Fk::Lfp:
            throw HomlogError("relativize does not support Lfp blocks");
    }
    return f;
}

}  // namespace

FormulaPtr relativize(const FormulaPtr& f, const std::string& u, const Signature& sig) {
    if (sig.has_predicate(u) || predicates_of(f).count(u))
        throw HomlogError("relativization predicate must be fresh: " + u);
    std::vector<FormulaPtr> conj{relativize_guard(f, u)};
    if (sig.constants().empty()) {
        // No constants force non-emptiness of U, so add the guard directly.
        conj.push_back(exists("x", atom(u, {Term::var("x")})));
    } else {
        for (const auto& c : sig.constants()) conj.push_back(atom(u, {Term::cons(c)}));
    }
    return land(std::move(conj));
}

FormulaPtr label_formula(const Term& t, int m, int n, LabelCmp cmp) {
    if (m < 1 || m > n) throw HomlogError("label_formula needs 1 <= m <= n");
    int bits = bit_count(n);
    int code = m - 1;
    std::vector<FormulaPtr> conj;
    if (cmp == LabelCmp::Eq) {
        for (int i = bits - 1; i >= 0; --i) {
            FormulaPtr b = atom(bit_pred_name(i), {t});
            conj.push_back(((code >> i) & 1) ? b : lnot(b));
        }
        return land(std::move(conj));
    }
    // [lambda(t) >= m]: for every 1-bit of m-1 (msb first), either the label
    // shares it or has a more significant 1 where m-1 has 0.
    for (int j = bits - 1; j >= 0; --j) {
        if (!((code >> j) & 1)) continue;
        std::vector<FormulaPtr> disj{atom(bit_pred_name(j), {t})};
        for (int i = bits - 1; i > j; --i)
            if (!((code >> i) & 1)) disj.push_back(atom(bit_pred_name(i), {t}));
        conj.push_back(lor(std::move(disj)));
    }
    return land(std::move(conj));
}

namespace {

int as_plus(const std::map<std::string, int>& as, const Term& t) {
    if (!t.is_var()) return 1;  // constant-sole labelings pin constants to 1
    auto it = as.find(t.name);
    if (it == as.end()) throw HomlogError("tr^n: unbound variable " + t.name);
    return it->second;
}

FormulaPtr tr_rec(const FormulaPtr& f, int n, std::map<std::string, int>& as) {
    switch (f->kind) {
        case Fk::True:
        case Fk::False:
        case Fk::Atom:
            return f;
        case Fk::Not: {
            const FormulaPtr& inner = f->kids[0];
            if (inner->kind == Fk::Atom) return f;
            if (inner->kind == Fk::Equals) {
                // tr(t1 != t2): keep when the labels agree, truth otherwise.
                if (as_plus(as, inner->terms[0]) == as_plus(as, inner->terms[1])) return f;
                return tru();
            }
            throw HomlogError("tr^n expects NNF input");
        }
        case Fk::Equals:
            if (as_plus(as, f->terms[0]) == as_plus(as, f->terms[1])) return f;
            return fal();
        case Fk::And:
        case Fk::Or: {
            std::vector<FormulaPtr> kids;
            for (const auto& k : f->kids) kids.push_back(tr_rec(k, n, as));
            return f->kind == Fk::And ? land(std::move(kids)) : lor(std::move(kids));
        }
        case Fk::Exists: {
            std::vector<FormulaPtr> disj;
            auto saved = as.find(f->var) != as.end() ? std::optional<int>(as[f->var]) : std::nullopt;
            for (int i = 1; i <= n; ++i) {
                as[f->var] = i;
                disj.push_back(exists(
                    f->var, land({label_formula(Term::var(f->var), i, n, LabelCmp::Geq),
                                  tr_rec(f->kids[0], n, as)})));
            }
            if (saved)
                as[f->var] = *saved;
            else
                as.erase(f->var);
            return lor(std::move(disj));
        }
        case Fk::Forall: {
            std::vector<FormulaPtr> conj;
            auto saved = as.find(f->var) != as.end() ? std::optional<int>(as[f->var]) : std::nullopt;
            for (int i = 1; i <= n; ++i) {
                as[f->var] = i;
                conj.push_back(forall(
                    f->var, lor({lnot(label_formula(Term::var(f->var), i, n, LabelCmp::Geq)),
                                 tr_rec(f->kids[0], n, as)})));
            }
            if (saved)
                as[f->var] = *saved;
            else
                as.erase(f->var);
            return land(std::move(conj));
        }
        default:
            throw HomlogError("tr^n requires a first-order formula");
    }
}

}  // namespace

FormulaPtr tr_n(const FormulaPtr& f, int n) {
    if (!is_first_order(f)) throw HomlogError("tr^n requires a first-order formula");
    if (n < 1) throw HomlogError("tr^n needs n >= 1");
    std::map<std::string, int> as;
    FormulaPtr normal = nnf(f);
    return tr_rec(normal, n, as);
}

// ---------------------------------------------------------------------------
// Colorings

FormulaPtr coloring_chi(const std::string& pred, const std::vector<Term>& terms,
                        const Structure& a) {
    int n = (int)a.domain.size();
    std::vector<FormulaPtr> disj;
    auto it = a.relations.find(pred);
    if (it != a.relations.end()) {
        for (const auto& tuple : it->second) {
            std::vector<FormulaPtr> conj;
            for (size_t i = 0; i < tuple.size(); ++i)
                conj.push_back(label_formula(terms[i], tuple[i] + 1, n, LabelCmp::Eq));
            disj.push_back(land(std::move(conj)));
        }
    }
    // Empty relation: the disjunction is empty, i.e. falsity.
    return land({atom(pred, terms), lor(std::move(disj))});
}

FormulaPtr coloring_omega(const Structure& a) {
    std::vector<FormulaPtr> conj;
    for (const auto& [p, ar] : a.sig.predicates()) {
        std::vector<std::string> vars;
        std::vector<Term> terms;
        for (int i = 0; i < ar; ++i) {
            vars.push_back("x" + std::to_string(i + 1));
            terms.push_back(Term::var(vars.back()));
        }
        conj.push_back(forall_many(
            vars, lor({lnot(atom(p, terms)), coloring_chi(p, terms, a)})));
    }
    return land(std::move(conj));
}

namespace {

FormulaPtr replace_atoms_by_chi(const FormulaPtr& f, const Structure& a) {
    switch (f->kind) {
        case Fk::Atom:
            if (a.sig.has_predicate(f->pred)) return coloring_chi(f->pred, f->terms, a);
            return f;
        case Fk::Equals:
        case Fk::True:
        case Fk::False:
            return f;
        case Fk::ExistsSO:
        case Fk::ForallSO:
        case Fk::ExistsFinSO: {
            if (a.sig.has_predicate(f->so_pred))
                throw HomlogError("coloring: SO-bound predicate shadows a signature symbol");
            Formula g = *f;
            g.kids = {replace_atoms_by_chi(f->kids[0], a)};
            return std::make_shared<const Formula>(std::move(g));
        }
        case Fk::Lfp:
            throw HomlogError("coloring does not support Lfp blocks");
        default: {
            Formula g = *f;
            for (auto& k : g.kids) k = replace_atoms_by_chi(k, a);
            return std::make_shared<const Formula>(std::move(g));
        }
    }
}

}  // namespace

FormulaPtr coloring(const FormulaPtr& f, const Structure& a, ColoringMode mode) {
    Structure norm = normalize_domain(a);
    if (mode == ColoringMode::Ext) return land({f, coloring_omega(norm)});
    return replace_atoms_by_chi(f, norm);
}

Signature coloring_signature(const Signature& sig, const Structure& a) {
    Signature out = sig;
    int bits = bit_count((int)a.domain.size());
    for (int i = 0; i < bits; ++i) out.add_predicate(bit_pred_name(i), 1);
    return out;
}

// ---------------------------------------------------------------------------
// Spoilers

std::string primed_name(const std::string& pred) { return pred + "'"; }

FormulaPtr primed_conjunction(const FormulaPtr& f, const Signature& sig) {
    switch (f->kind) {
        case Fk::Atom:
            if (sig.has_predicate(f->pred))
                return land({f, atom(primed_name(f->pred), f->terms)});
            return f;
        case Fk::Equals:
        case Fk::True:
        case Fk::False:
            return f;
        default: {
            Formula g = *f;
            for (auto& k : g.kids) k = primed_conjunction(k, sig);
            return std::make_shared<const Formula>(std::move(g));
        }
    }
}

namespace {

bool uses_eq(const FormulaPtr& f) {
    if (f->kind == Fk::Equals) return true;
    for (const auto& k : f->kids)
        if (uses_eq(k)) return true;
    return false;
}

SpoilerFormula spoiler_injective(const FormulaPtr& f, const Signature& sig) {
    Signature ext = sig;
    for (const auto& [p, ar] : sig.predicates()) ext.add_predicate(primed_name(p), ar);
    ext.add_predicate(kSpoilerU, 1);
    FormulaPtr minus = primed_conjunction(f, sig);
    FormulaPtr out = land({lnot(f), relativize(minus, kSpoilerU, sig)});
    return {out, ext};
}

SpoilerFormula spoiler_strong_surjective(const FormulaPtr& f, const Signature& sig) {
    if (!uses_eq(f)) return {fal(), sig};
    int n = std::max(1, quantifier_rank(f));
    Signature ext = sig;
    for (int i = 0; i < bit_count(n); ++i) ext.add_predicate(bit_pred_name(i), 1);
    return {land({lnot(f), tr_n(f, n)}), ext};
}

}  // namespace

SpoilerFormula spoiler_formula(const FormulaPtr& f, const Signature& sig, SpoilerKind kind) {
    if (!is_first_order(f)) throw HomlogError("spoiler_formula requires a first-order sentence");
    switch (kind) {
        case SpoilerKind::Injective:
            return spoiler_injective(f, sig);
        case SpoilerKind::StrongSurjective:
            return spoiler_strong_surjective(f, sig);
        case SpoilerKind::Monomerge: {
            if (!uses_eq(f)) return {fal(), sig};
            Signature ext = sig;
            ext.add_predicate(kSpoilerUdot, 1);
            ext.add_constant(kMergeSource);
            ext.add_constant(kMergeTarget);
            // Omega_{c_s ~= c_t}: c_s and c_t participate in the same tuples.
            // Merge source and target must differ -- the witness of a
            // monomerge encodes a genuine two-element merge.
            FormulaPtr omega =
                eta_formula(sig, Term::cons(kMergeSource), Term::cons(kMergeTarget));
            FormulaPtr udot_def = forall(
                "x", iff(eq(Term::var("x"), Term::cons(kMergeSource)),
                         lnot(atom(kSpoilerUdot, {Term::var("x")}))));
            FormulaPtr distinct = neq(Term::cons(kMergeSource), Term::cons(kMergeTarget));
            FormulaPtr out =
                land({f, relativize(lnot(f), kSpoilerUdot, sig), omega, udot_def, distinct});
            return {out, ext};
        }
        case SpoilerKind::CombinedArb: {
            SpoilerFormula inj = spoiler_formula(f, sig, SpoilerKind::Injective);
            SpoilerFormula ss = spoiler_formula(f, sig, SpoilerKind::StrongSurjective);
            Signature ext = Signature::merged(inj.sig, ss.sig);
            return {lor({inj.formula, ss.formula}), ext};
        }
        case SpoilerKind::CombinedFin: {
            SpoilerFormula inj = spoiler_formula(f, sig, SpoilerKind::Injective);
            SpoilerFormula mm = spoiler_formula(f, sig, SpoilerKind::Monomerge);
            Signature ext = Signature::merged(inj.sig, mm.sig);
            return {lor({inj.formula, mm.formula}), ext};
        }
    }
    throw HomlogError("unknown spoiler kind");
}

// eta^tau(z, z'): for every predicate and position, swapping z for z' in that
// position preserves membership both ways.
FormulaPtr eta_formula(const Signature& sig, const Term& tz, const Term& tzp) {
    std::vector<FormulaPtr> conj;
    for (const auto& [p, ar] : sig.predicates()) {
        for (int i = 0; i < ar; ++i) {
            std::vector<std::string> vars;
            std::vector<Term> with_z, with_zp;
            for (int j = 0; j < ar; ++j) {
                if (j == i) {
                    with_z.push_back(tz);
                    with_zp.push_back(tzp);
                } else {
                    std::string v = "u" + std::to_string(j + 1);
                    vars.push_back(v);
                    with_z.push_back(Term::var(v));
                    with_zp.push_back(Term::var(v));
                }
            }
            conj.push_back(forall_many(vars, iff(atom(p, with_z), atom(p, with_zp))));
        }
    }
    return land(std::move(conj));
}

// ---------------------------------------------------------------------------
// SO normal forms

SpoilerFormula so_sup(const FormulaPtr& f, const Signature& sig) {
    std::string u = fresh_name(kSpoilerUdot, sig, predicates_of(f));
    return {exists_so(u, 1, relativize(f, u, sig)), sig};
}

SpoilerFormula so_shom(const FormulaPtr& f, const Signature& sig) {
    // forall U forall tau'. ((Theta_U^{tau'} & tau <= tau') => Psi_{tau->tau'}^{rel(U)})
    std::map<std::string, std::string> to_primed;
    for (const auto& [p, ar] : sig.predicates()) to_primed[p] = primed_name(p);
    Signature primed_sig;
    for (const auto& [p, ar] : sig.predicates()) primed_sig.add_predicate(primed_name(p), ar);
    for (const auto& c : sig.constants()) primed_sig.add_constant(c);

    std::string u = fresh_name(kSpoilerU, sig, predicates_of(f));
    // Theta over the primed copies: every element has a U-representative with
    // identical primed-relation rows.
    FormulaPtr theta = forall(
        "x", exists("y", land({atom(u, {Term::var("y")}),
                               eta_formula(primed_sig, Term::var("x"), Term::var("y"))})));
    std::vector<FormulaPtr> incl;
    for (const auto& [p, ar] : sig.predicates()) {
        std::vector<std::string> vars;
        std::vector<Term> terms;
        for (int i = 0; i < ar; ++i) {
            vars.push_back("x" + std::to_string(i + 1));
            terms.push_back(Term::var(vars.back()));
        }
        incl.push_back(forall_many(vars, lor({lnot(atom(p, terms)),
                                              atom(primed_name(p), terms)})));
    }
    FormulaPtr renamed = rename_predicates(relativize(f, u, sig), to_primed);
    FormulaPtr body = lor({lnot(land({theta, land(incl)})), renamed});
    // Quantify: forall U forall tau'.
    for (auto it = sig.predicates().rbegin(); it != sig.predicates().rend(); ++it)
        body = forall_so(primed_name(it->first), it->second, body);
    body = forall_so(u, 1, body);
    return {body, sig};
}

SpoilerFormula eso_fin_wrap(const FormulaPtr& f, const Signature& sig, const std::string& u) {
    return {exists_fin_so(u, 1, relativize(f, u, sig)), sig};
}

}  // namespace homlog
