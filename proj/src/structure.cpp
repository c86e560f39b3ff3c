#include "homlog/structure.hpp"

#include <algorithm>
#include <functional>

namespace homlog {

bool Structure::has_element(int e) const {
    return std::binary_search(domain.begin(), domain.end(), e);
}

bool Structure::holds(const std::string& pred, const std::vector<int>& tuple) const {
    auto it = relations.find(pred);
    return it != relations.end() && it->second.count(tuple) != 0;
}

bool Structure::operator<(const Structure& o) const {
    if (domain != o.domain) return domain < o.domain;
    if (const_interp != o.const_interp) return const_interp < o.const_interp;
    return relations < o.relations;
}

void Structure::check_valid() const {
    if (domain.empty()) throw HomlogError("structure domain must be non-empty");
    if (!std::is_sorted(domain.begin(), domain.end()) ||
        std::adjacent_find(domain.begin(), domain.end()) != domain.end())
        throw HomlogError("structure domain must be sorted and duplicate-free");
    for (const auto& c : sig.constants()) {
        auto it = const_interp.find(c);
        if (it == const_interp.end()) throw HomlogError("constant not interpreted: " + c);
        if (!has_element(it->second)) throw HomlogError("constant maps outside domain: " + c);
    }
    for (const auto& [c, e] : const_interp)
        if (!sig.has_constant(c)) throw HomlogError("interpretation for undeclared constant: " + c);
    for (const auto& [p, tuples] : relations) {
        auto ar = sig.arity_of(p);
        if (!ar) throw HomlogError("relation for undeclared predicate: " + p);
        for (const auto& t : tuples) {
            if ((int)t.size() != *ar) throw HomlogError("tuple arity mismatch in " + p);
            for (int e : t)
                if (!has_element(e)) throw HomlogError("tuple element outside domain in " + p);
        }
    }
}

Structure make_structure(const Signature& sig, int n, const std::map<std::string, int>& consts) {
    Structure s;
    s.sig = sig;
    for (int i = 0; i < n; ++i) s.domain.push_back(i);
    s.const_interp = consts;
    for (const auto& [p, ar] : sig.predicates()) s.relations[p];  // empty sets
    return s;
}

Structure reduct(const Structure& a, const Signature& sigma) {
    if (!sigma.subsignature_of(a.sig)) throw HomlogError("reduct: not a subsignature");
    Structure out;
    out.sig = sigma;
    out.domain = a.domain;
    for (const auto& c : sigma.constants()) out.const_interp[c] = a.const_interp.at(c);
    for (const auto& [p, ar] : sigma.predicates()) {
        auto it = a.relations.find(p);
        out.relations[p] = it == a.relations.end() ? std::set<std::vector<int>>{} : it->second;
    }
    return out;
}

namespace {

void all_tuples(const std::vector<int>& domain, int arity,
                const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> t(arity, 0);
    std::function<void(int)> rec = [&](int i) {
        if (i == arity) {
            fn(t);
            return;
        }
        for (int e : domain) {
            t[i] = e;
            rec(i + 1);
        }
    };
    rec(0);
}

}  // namespace

Structure expand(const Structure& a, const std::vector<std::pair<std::string, int>>& preds,
                 ExpandMode mode) {
    Structure out = a;
    for (const auto& [p, ar] : preds) {
        if (a.sig.has_predicate(p) || a.sig.has_constant(p))
            throw HomlogError("expand: symbol already present: " + p);
        out.sig.add_predicate(p, ar);
        auto& rel = out.relations[p];
        if (mode == ExpandMode::Full)
            all_tuples(out.domain, ar, [&](const std::vector<int>& t) { rel.insert(t); });
    }
    return out;
}

Structure canonical(const Signature& sig, CanonicalKind kind) {
    Structure out;
    out.sig = sig;
    const auto& consts = sig.constants();
    if (kind == CanonicalKind::Initial) {
        int n = consts.empty() ? 1 : (int)consts.size();
        for (int i = 0; i < n; ++i) out.domain.push_back(i);
        for (size_t i = 0; i < consts.size(); ++i) out.const_interp[consts[i]] = (int)i;
        for (const auto& [p, ar] : sig.predicates()) out.relations[p];
    } else {
        out.domain = {0};
        for (const auto& c : consts) out.const_interp[c] = 0;
        for (const auto& [p, ar] : sig.predicates()) {
            auto& rel = out.relations[p];
            rel.insert(std::vector<int>(ar, 0));
        }
    }
    return out;
}

Structure disjoint_union(const Structure& a, const Structure& b) {
    if (!(a.sig == b.sig)) throw HomlogError("disjoint_union: signature mismatch");
    // Left elements keep their ids' order slot; ids are renumbered 0..n-1.
    std::map<int, int> la, lb;
    Structure out;
    out.sig = a.sig;
    int next = 0;
    for (int e : a.domain) la[e] = next++;
    for (int e : b.domain) lb[e] = next++;
    for (int i = 0; i < next; ++i) out.domain.push_back(i);
    for (const auto& [c, e] : a.const_interp) out.const_interp[c] = la[e];
    for (const auto& [p, tuples] : a.relations) {
        auto& rel = out.relations[p];
        for (const auto& t : tuples) {
            std::vector<int> u(t.size());
            for (size_t i = 0; i < t.size(); ++i) u[i] = la[t[i]];
            rel.insert(std::move(u));
        }
    }
    for (const auto& [p, tuples] : b.relations) {
        auto& rel = out.relations[p];
        for (const auto& t : tuples) {
            std::vector<int> u(t.size());
            for (size_t i = 0; i < t.size(); ++i) u[i] = lb[t[i]];
            rel.insert(std::move(u));
        }
    }
    return out;
}

FormulaPtr canonical_query(const Structure& a) {
    // One variable x_e per element; conjuncts c = x_{c^A} for constants and
    // P(x_{a1},...,x_{ak}) for every tuple; existentially closed.
    auto var_of = [](int e) { return "x" + std::to_string(e); };
    std::vector<FormulaPtr> conj;
    for (const auto& c : a.sig.constants())
        conj.push_back(eq(Term::cons(c), Term::var(var_of(a.const_interp.at(c)))));
    for (const auto& [p, tuples] : a.relations) {
        for (const auto& t : tuples) {
            std::vector<Term> ts;
            for (int e : t) ts.push_back(Term::var(var_of(e)));
            conj.push_back(atom(p, std::move(ts)));
        }
    }
    FormulaPtr body = land(std::move(conj));
    std::vector<std::string> vars;
    for (int e : a.domain) vars.push_back(var_of(e));
    return exists_many(vars, body);
}

Structure induced_substructure(const Structure& a, const std::set<int>& s) {
    if (s.empty()) throw HomlogError("induced_substructure: empty element set");
    for (const auto& [c, e] : a.const_interp)
        if (!s.count(e)) throw HomlogError("induced_substructure: misses constant " + c);
    Structure out;
    out.sig = a.sig;
    out.domain.assign(s.begin(), s.end());
    out.const_interp = a.const_interp;
    for (const auto& [p, tuples] : a.relations) {
        auto& rel = out.relations[p];
        for (const auto& t : tuples) {
            bool inside = true;
            for (int e : t)
                if (!s.count(e)) {
                    inside = false;
                    break;
                }
            if (inside) rel.insert(t);
        }
    }
    return out;
}

Structure normalize_domain(const Structure& a, std::map<int, int>* old_to_new) {
    std::map<int, int> m;
    int next = 0;
    for (int e : a.domain) m[e] = next++;
    Structure out;
    out.sig = a.sig;
    for (int i = 0; i < next; ++i) out.domain.push_back(i);
    for (const auto& [c, e] : a.const_interp) out.const_interp[c] = m[e];
    for (const auto& [p, tuples] : a.relations) {
        auto& rel = out.relations[p];
        for (const auto& t : tuples) {
            std::vector<int> u(t.size());
            for (size_t i = 0; i < t.size(); ++i) u[i] = m[t[i]];
            rel.insert(std::move(u));
        }
    }
    if (old_to_new) *old_to_new = std::move(m);
    return out;
}

}  // namespace homlog
