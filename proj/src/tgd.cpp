#include "homlog/tgd.hpp"

#include <algorithm>
#include <functional>

#include "homlog/eval.hpp"
#include "homlog/fragments.hpp"
#include "homlog/hom.hpp"

namespace homlog {

FormulaPtr TgdRule::to_formula() const {
    FormulaPtr head = exists_many(exist_vars, land(head_atoms));
    FormulaPtr matrix =
        body_atoms.empty() ? head : lor({lnot(land(body_atoms)), head});
    return forall_many(frontier, matrix);
}

namespace {

void collect_atoms(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
    if (f->kind == Fk::Atom) {
        out.push_back(f);
        return;
    }
    if (f->kind == Fk::True) return;
    if (f->kind == Fk::And) {
        for (const auto& k : f->kids) collect_atoms(k, out);
        return;
    }
    throw HomlogError("expected a conjunction of atoms");
}

struct RawRule {
    std::vector<std::string> frontier;
    std::vector<FormulaPtr> body;
    std::vector<std::string> exist_vars;
    std::vector<FormulaPtr> head;
};

RawRule split_rule(const FormulaPtr& f) {
    RawRule r;
    const Formula* cur = f.get();
    while (cur->kind == Fk::Forall) {
        r.frontier.push_back(cur->var);
        cur = cur->kids[0].get();
    }
    FormulaPtr matrix(f, cur);
    FormulaPtr head_part;
    if (matrix->kind == Fk::Or) {
        if (matrix->kids.size() != 2) throw HomlogError("not a TGD rule");
        const FormulaPtr& a = matrix->kids[0];
        const FormulaPtr& b = matrix->kids[1];
        if (a->kind == Fk::Not) {
            collect_atoms(a->kids[0], r.body);
            head_part = b;
        } else if (b->kind == Fk::Not) {
            collect_atoms(b->kids[0], r.body);
            head_part = a;
        } else {
            throw HomlogError("not a TGD rule");
        }
    } else {
        head_part = matrix;
    }
    const Formula* h = head_part.get();
    while (h->kind == Fk::Exists) {
        r.exist_vars.push_back(h->var);
        h = h->kids[0].get();
    }
    collect_atoms(FormulaPtr(head_part, h), r.head);
    if (r.head.empty()) throw HomlogError("TGD heads must be non-empty");
    return r;
}

}  // namespace

std::vector<TgdRule> tgd_normalize(const FormulaPtr& f, const Signature& sig) {
    FragmentReport rep = classify(f, sig);
    if (!rep.tgd) throw HomlogError("tgd_normalize requires a TGD sentence");

    std::vector<FormulaPtr> conj;
    {
        std::function<void(const FormulaPtr&)> flat = [&](const FormulaPtr& g) {
            if (g->kind == Fk::And) {
                for (const auto& k : g->kids) flat(k);
            } else {
                conj.push_back(g);
            }
        };
        flat(f);
    }
    std::vector<TgdRule> out;
    for (const auto& c : conj) {
        RawRule raw = split_rule(c);
        std::set<std::string> evars(raw.exist_vars.begin(), raw.exist_vars.end());

        // Union-find over head atoms: alpha ~ alpha' when they share an
        // existential variable.
        size_t n = raw.head.size();
        std::vector<size_t> parent(n);
        for (size_t i = 0; i < n; ++i) parent[i] = i;
        std::function<size_t(size_t)> find = [&](size_t i) {
            return parent[i] == i ? i : parent[i] = find(parent[i]);
        };
        auto unite = [&](size_t i, size_t j) { parent[find(i)] = find(j); };
        std::map<std::string, size_t> owner;
        for (size_t i = 0; i < n; ++i) {
            for (const auto& t : raw.head[i]->terms) {
                if (!t.is_var() || !evars.count(t.name)) continue;
                auto it = owner.find(t.name);
                if (it == owner.end())
                    owner[t.name] = i;
                else
                    unite(i, it->second);
            }
        }
        std::map<size_t, std::vector<FormulaPtr>> classes;
        for (size_t i = 0; i < n; ++i) classes[find(i)].push_back(raw.head[i]);

        for (auto& [root, atoms] : classes) {
            TgdRule rule;
            rule.frontier = raw.frontier;
            rule.body_atoms = raw.body;
            rule.head_atoms = std::move(atoms);
            std::set<std::string> used;
            for (const auto& a : rule.head_atoms)
                for (const auto& t : a->terms)
                    if (t.is_var()) used.insert(t.name);
            for (const auto& y : raw.exist_vars)
                if (used.count(y)) rule.exist_vars.push_back(y);
            rule.connected = false;
            for (const auto& v : used)
                if (!evars.count(v)) rule.connected = true;
            out.push_back(std::move(rule));
        }
    }
    return out;
}

std::optional<std::map<std::string, Term>> redundancy_witness(const TgdRule& r) {
    // Candidate targets: frontier variables, plus constants occurring in the
    // body (mapping an existential onto either makes the head a consequence
    // of the body).
    std::vector<Term> targets;
    for (const auto& x : r.frontier) targets.push_back(Term::var(x));
    std::set<std::string> body_consts;
    for (const auto& a : r.body_atoms)
        for (const auto& t : a->terms)
            if (!t.is_var()) body_consts.insert(t.name);
    for (const auto& c : body_consts) targets.push_back(Term::cons(c));

    std::set<std::string> body_keys;
    for (const auto& a : r.body_atoms) body_keys.insert(to_text(a));

    size_t ny = r.exist_vars.size();
    if (ny == 0) {
        for (const auto& h : r.head_atoms)
            if (!body_keys.count(to_text(h))) return std::nullopt;
        return std::map<std::string, Term>{};
    }
    if (targets.empty()) return std::nullopt;

    std::vector<size_t> idx(ny, 0);
    while (true) {
        std::map<std::string, Term> sub;
        for (size_t i = 0; i < ny; ++i) sub[r.exist_vars[i]] = targets[idx[i]];
        bool ok = true;
        for (const auto& h : r.head_atoms) {
            FormulaPtr mapped = h;
            for (const auto& [y, t] : sub) mapped = substitute_var(mapped, y, t);
            if (!body_keys.count(to_text(mapped))) {
                ok = false;
                break;
            }
        }
        if (ok) return sub;
        size_t i = ny;
        while (i > 0) {
            --i;
            if (++idx[i] < targets.size()) break;
            idx[i] = 0;
            if (i == 0) return std::nullopt;
        }
    }
}

Structure body_canonical_structure(const TgdRule& r, const Signature& sig) {
    // One fresh element per frontier variable (the canonical structure of
    // exists-closed phi(x) over the full frontier: variables absent from the
    // body become isolated elements, which is what spoils heads that mention
    // them); every constant its own element.
    std::set<std::string> vars(r.frontier.begin(), r.frontier.end());
    for (const auto& a : r.body_atoms)
        for (const auto& t : a->terms)
            if (t.is_var()) vars.insert(t.name);
    Structure s;
    s.sig = sig;
    std::map<std::string, int> var_id;
    int next = 0;
    for (const auto& c : sig.constants()) {
        s.const_interp[c] = next;
        s.domain.push_back(next++);
    }
    for (const auto& v : vars) {
        var_id[v] = next;
        s.domain.push_back(next++);
    }
    if (s.domain.empty()) s.domain.push_back(next++);  // non-empty domain
    for (const auto& [p, ar] : sig.predicates()) s.relations[p];
    for (const auto& a : r.body_atoms) {
        std::vector<int> tuple;
        for (const auto& t : a->terms)
            tuple.push_back(t.is_var() ? var_id.at(t.name) : s.const_interp.at(t.name));
        s.relations[a->pred].insert(std::move(tuple));
    }
    return s;
}

ChaseResult chase_universal(const std::vector<TgdRule>& rules, const Signature& sig) {
    for (const auto& r : rules)
        if (r.connected)
            throw HomlogError("internal: chase_universal expects disconnected rules only");

    ChaseResult out;
    out.universal = canonical(sig, CanonicalKind::Initial);
    std::vector<bool> fired(rules.size(), false);

    bool progress = true;
    while (progress) {
        progress = false;
        for (size_t i = 0; i < rules.size(); ++i) {
            if (fired[i]) continue;
            const TgdRule& r = rules[i];
            Structure body = body_canonical_structure(r, sig);
            auto trigger = find_hom(body, out.universal);
            if (!trigger) continue;
            // fire: fresh elements for the existential variables, head atoms
            ChaseStep step;
            step.rule_index = i;
            step.trigger = trigger->map;
            int next = out.universal.domain.empty() ? 0 : out.universal.domain.back() + 1;
            for (const auto& y : r.exist_vars) {
                step.created[y] = next;
                out.universal.domain.push_back(next++);
            }
            for (const auto& h : r.head_atoms) {
                std::vector<int> tuple;
                for (const auto& t : h->terms) {
                    if (t.is_var())
                        tuple.push_back(step.created.at(t.name));
                    else
                        tuple.push_back(out.universal.const_interp.at(t.name));
                }
                out.universal.relations[h->pred].insert(std::move(tuple));
            }
            fired[i] = true;
            out.fired.push_back(i);
            out.trace.push_back(std::move(step));
            progress = true;
        }
    }
    return out;
}

namespace {

// Search for a map from the rule's existential variables into M sending every
// head atom to a semantic atom of M.
std::optional<std::map<std::string, int>> discharge_witness(const TgdRule& r,
                                                            const Structure& m) {
    size_t ny = r.exist_vars.size();
    std::vector<size_t> idx(ny, 0);
    while (true) {
        std::map<std::string, int> sub;
        for (size_t i = 0; i < ny; ++i) sub[r.exist_vars[i]] = m.domain[idx[i]];
        bool ok = true;
        for (const auto& h : r.head_atoms) {
            std::vector<int> tuple;
            for (const auto& t : h->terms) {
                if (t.is_var())
                    tuple.push_back(sub.at(t.name));
                else
                    tuple.push_back(m.const_interp.at(t.name));
            }
            if (!m.holds(h->pred, tuple)) {
                ok = false;
                break;
            }
        }
        if (ok) return sub;
        if (ny == 0) return std::nullopt;
        size_t i = ny;
        while (i > 0) {
            --i;
            if (++idx[i] < m.domain.size()) break;
            idx[i] = 0;
            if (i == 0) return std::nullopt;
        }
    }
}

}  // namespace

TgdVerdict tgd_homclosed(const FormulaPtr& f, const Signature& sig) {
    TgdVerdict v;
    v.rules = tgd_normalize(f, sig);

    TgdCertificate cert;
    cert.self_redundant.resize(v.rules.size());
    cert.redundancy.resize(v.rules.size());
    for (size_t i = 0; i < v.rules.size(); ++i) {
        cert.redundancy[i] = redundancy_witness(v.rules[i]);
        cert.self_redundant[i] = cert.redundancy[i].has_value();
    }

    // Case (i): a connected rule that is not self-redundant spoils via
    // (F, F + A_body).
    for (size_t i = 0; i < v.rules.size(); ++i) {
        if (v.rules[i].connected && !cert.self_redundant[i]) {
            Structure fstr = canonical(sig, CanonicalKind::Final);
            Structure spoiled = disjoint_union(fstr, body_canonical_structure(v.rules[i], sig));
            v.homclosed = false;
            v.sketch = TgdSpoilerSketch{std::move(fstr), std::move(spoiled)};
            return v;
        }
    }

    // Chase the self-irredundant (necessarily disconnected) rules.
    std::vector<TgdRule> irredundant;
    std::vector<size_t> irredundant_idx;
    for (size_t i = 0; i < v.rules.size(); ++i)
        if (!cert.self_redundant[i]) {
            irredundant.push_back(v.rules[i]);
            irredundant_idx.push_back(i);
        }
    ChaseResult chase = chase_universal(irredundant, sig);
    // restore original rule indices in the trace
    for (auto& step : chase.trace) step.rule_index = irredundant_idx[step.rule_index];
    for (auto& i : chase.fired) i = irredundant_idx[i];
    cert.derivation = chase;

    // Case (iii): discharge every self-irredundant rule against M.
    for (size_t i = 0; i < v.rules.size(); ++i) {
        if (cert.self_redundant[i]) continue;
        auto w = discharge_witness(v.rules[i], cert.derivation.universal);
        if (!w) {
            Structure m = cert.derivation.universal;
            Structure spoiled = disjoint_union(m, body_canonical_structure(v.rules[i], sig));
            v.homclosed = false;
            v.sketch = TgdSpoilerSketch{std::move(m), std::move(spoiled)};
            return v;
        }
        cert.discharge[i] = *w;
    }

    v.homclosed = true;
    v.certificate = std::move(cert);
    return v;
}

std::optional<std::string> verify_tgd_verdict(const FormulaPtr& f, const Signature& sig,
                                              const TgdVerdict& v) {
    // The normalized rule set must be equivalent to the input on small
    // structures is too costly to check here; instead every artifact is
    // replayed independently.
    if (!v.homclosed) {
        if (!v.sketch) return "NO verdict without a sketch";
        if (!eval_fo(v.sketch->model, f)) return "sketch model does not satisfy the sentence";
        if (eval_fo(v.sketch->non_model, f)) return "sketch non-model satisfies the sentence";
        if (!find_hom(v.sketch->model, v.sketch->non_model))
            return "no homomorphism from sketch model into non-model";
        return std::nullopt;
    }
    if (!v.certificate) return "YES verdict without a certificate";
    const TgdCertificate& c = *v.certificate;
    if (c.self_redundant.size() != v.rules.size()) return "partition size mismatch";

    for (size_t i = 0; i < v.rules.size(); ++i) {
        const TgdRule& r = v.rules[i];
        if (c.self_redundant[i]) {
            if (!c.redundancy[i]) return "missing redundancy witness";
            // re-apply the substitution syntactically
            std::set<std::string> body_keys;
            for (const auto& a : r.body_atoms) body_keys.insert(to_text(a));
            for (const auto& h : r.head_atoms) {
                FormulaPtr mapped = h;
                for (const auto& [y, t] : *c.redundancy[i]) mapped = substitute_var(mapped, y, t);
                if (!body_keys.count(to_text(mapped))) return "redundancy witness fails";
            }
        } else if (r.connected) {
            return "connected rule classified self-irredundant in a YES certificate";
        }
    }

    // Replay the derivation.
    Structure m = canonical(sig, CanonicalKind::Initial);
    std::set<size_t> fired;
    for (const auto& step : c.derivation.trace) {
        if (step.rule_index >= v.rules.size()) return "trace references unknown rule";
        if (!fired.insert(step.rule_index).second) return "rule fired twice";
        const TgdRule& r = v.rules[step.rule_index];
        if (c.self_redundant[step.rule_index]) return "trace fires a self-redundant rule";
        Structure body = body_canonical_structure(r, sig);
        Hom trig{body, m, step.trigger};
        if (!trig.is_valid()) return "trigger does not revalidate";
        for (const auto& [y, e] : step.created) {
            if (m.has_element(e)) return "created element already present";
            m.domain.push_back(e);
            std::sort(m.domain.begin(), m.domain.end());
        }
        for (const auto& h : r.head_atoms) {
            std::vector<int> tuple;
            for (const auto& t : h->terms)
                tuple.push_back(t.is_var() ? step.created.at(t.name)
                                           : m.const_interp.at(t.name));
            m.relations[h->pred].insert(tuple);
        }
    }
    if (!(m == c.derivation.universal)) return "derivation replay mismatch";
    if (!eval_fo(m, f)) return "universal model does not satisfy the sentence";

    // Discharges.
    for (size_t i = 0; i < v.rules.size(); ++i) {
        if (c.self_redundant[i]) continue;
        auto it = c.discharge.find(i);
        if (it == c.discharge.end()) return "missing discharge witness";
        for (const auto& h : v.rules[i].head_atoms) {
            std::vector<int> tuple;
            for (const auto& t : h->terms)
                tuple.push_back(t.is_var() ? it->second.at(t.name) : m.const_interp.at(t.name));
            if (!m.holds(h->pred, tuple)) return "discharge witness fails";
        }
    }
    return std::nullopt;
}

FormulaPtr cq_implication(const Structure& a, const Structure& b) {
    if (!a.const_interp.empty() || !b.const_interp.empty())
        throw HomlogError("cq_implication expects constant-free structures");
    auto var_of = [](const char* stem, int e) { return std::string(stem) + std::to_string(e); };
    std::vector<FormulaPtr> body, head;
    std::vector<std::string> xs, ys;
    for (int e : a.domain) xs.push_back(var_of("x", e));
    for (int e : b.domain) ys.push_back(var_of("y", e));
    for (const auto& [p, tuples] : a.relations)
        for (const auto& t : tuples) {
            std::vector<Term> ts;
            for (int e : t) ts.push_back(Term::var(var_of("x", e)));
            body.push_back(atom(p, std::move(ts)));
        }
    for (const auto& [p, tuples] : b.relations)
        for (const auto& t : tuples) {
            std::vector<Term> ts;
            for (int e : t) ts.push_back(Term::var(var_of("y", e)));
            head.push_back(atom(p, std::move(ts)));
        }
    FormulaPtr head_f = exists_many(ys, land(std::move(head)));
    FormulaPtr matrix = body.empty() ? head_f : lor({lnot(land(std::move(body))), head_f});
    return forall_many(xs, matrix);
}

}  // namespace homlog
