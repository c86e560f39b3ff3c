#include "homlog/hom.hpp"

#include <algorithm>
#include <functional>

namespace homlog {

bool Hom::is_valid() const {
    for (int e : source.domain)
        if (!map.count(e)) return false;
    for (const auto& [e, v] : map)
        if (!source.has_element(e) || !target.has_element(v)) return false;
    for (const auto& [c, e] : source.const_interp) {
        auto it = target.const_interp.find(c);
        if (it == target.const_interp.end() || map.at(e) != it->second) return false;
    }
    for (const auto& [p, tuples] : source.relations) {
        for (const auto& t : tuples) {
            std::vector<int> u(t.size());
            for (size_t i = 0; i < t.size(); ++i) u[i] = map.at(t[i]);
            if (!target.holds(p, u)) return false;
        }
    }
    return true;
}

bool Hom::is_injective() const {
    std::set<int> seen;
    for (const auto& [e, v] : map)
        if (!seen.insert(v).second) return false;
    return true;
}

bool Hom::is_surjective() const {
    std::set<int> seen;
    for (const auto& [e, v] : map) seen.insert(v);
    return seen.size() == target.domain.size();
}

bool Hom::is_strong() const {
    // Membership must be reflected: image tuple present implies source tuple
    // present, for every source tuple position choice.
    for (const auto& [p, ar] : source.sig.predicates()) {
        std::vector<int> t(ar, 0);
        std::function<bool(int)> rec = [&](int i) -> bool {
            if (i == ar) {
                std::vector<int> u(ar);
                for (int j = 0; j < ar; ++j) u[j] = map.at(t[j]);
                return source.holds(p, t) == target.holds(p, u);
            }
            for (int e : source.domain) {
                t[i] = e;
                if (!rec(i + 1)) return false;
            }
            return true;
        };
        if (!rec(0)) return false;
    }
    return true;
}

bool Hom::satisfies(const HomConstraint& c) const {
    if (!is_valid()) return false;
    if (c.injective && !is_injective()) return false;
    if (c.surjective && !is_surjective()) return false;
    if (c.strong && !is_strong()) return false;
    return true;
}

namespace {

struct SearchState {
    const Structure* a;
    const Structure* b;
    HomConstraint c;
    std::vector<int> order;        // source elements, search order
    std::map<int, int> assign;     // partial map
    std::set<int> used;            // targets used (for injectivity)
    std::map<int, std::set<int>> candidates;  // per-element allowed targets
};

// Checks all source tuples fully assigned under the partial map; for strong
// search additionally rejects assignments that would force an image tuple
// whose preimage is absent (full check happens at completion).
bool partial_ok(const SearchState& st) {
    for (const auto& [p, tuples] : st.a->relations) {
        for (const auto& t : tuples) {
            std::vector<int> u(t.size());
            bool complete = true;
            for (size_t i = 0; i < t.size(); ++i) {
                auto it = st.assign.find(t[i]);
                if (it == st.assign.end()) {
                    complete = false;
                    break;
                }
                u[i] = it->second;
            }
            if (complete && !st.b->holds(p, u)) return false;
        }
    }
    return true;
}

bool complete_ok(const SearchState& st) {
    Hom h{*st.a, *st.b, st.assign};
    return h.satisfies(st.c);
}

bool search(SearchState& st, size_t idx, std::map<int, int>& out) {
    if (idx == st.order.size()) {
        if (complete_ok(st)) {
            out = st.assign;
            return true;
        }
        return false;
    }
    int e = st.order[idx];
    size_t remaining = st.order.size() - idx;
    for (int v : st.candidates.at(e)) {
        if (st.c.injective && st.used.count(v)) continue;
        if (st.c.surjective) {
            // Remaining sources must be able to cover the uncovered targets.
            size_t covered = st.used.size() + (st.used.count(v) ? 0 : 1);
            size_t uncovered = st.b->domain.size() - covered;
            if (uncovered > remaining - 1) continue;
        }
        st.assign[e] = v;
        bool newly = st.used.insert(v).second;
        if (partial_ok(st) && search(st, idx + 1, out)) return true;
        st.assign.erase(e);
        if (newly) st.used.erase(v);
    }
    return false;
}

}  // namespace

std::optional<Hom> find_hom(const Structure& a, const Structure& b, const HomConstraint& c) {
    if (!(a.sig == b.sig)) throw HomlogError("find_hom: signature mismatch");
    if (c.injective && a.domain.size() > b.domain.size()) return std::nullopt;
    if (c.surjective && a.domain.size() < b.domain.size()) return std::nullopt;

    SearchState st;
    st.a = &a;
    st.b = &b;
    st.c = c;

    // Constant pins.
    std::map<int, int> pinned;
    for (const auto& [cn, e] : a.const_interp) {
        auto it = b.const_interp.find(cn);
        if (it == b.const_interp.end()) return std::nullopt;
        auto prev = pinned.find(e);
        if (prev != pinned.end() && prev->second != it->second) return std::nullopt;
        pinned[e] = it->second;
    }

    // Arc-consistency on unary predicates: candidate targets must carry every
    // unary fact the source element carries (purely a pruning step; the
    // completion check is the authority).
    for (int e : a.domain) {
        std::set<int> cand;
        if (pinned.count(e)) {
            cand.insert(pinned.at(e));
        } else {
            for (int v : b.domain) cand.insert(v);
        }
        for (const auto& [p, ar] : a.sig.predicates()) {
            if (ar != 1) continue;
            if (a.holds(p, {e})) {
                for (auto it = cand.begin(); it != cand.end();)
                    it = b.holds(p, {*it}) ? std::next(it) : cand.erase(it);
            } else if (c.strong) {
                for (auto it = cand.begin(); it != cand.end();)
                    it = !b.holds(p, {*it}) ? std::next(it) : cand.erase(it);
            }
        }
        if (cand.empty()) return std::nullopt;
        st.candidates[e] = std::move(cand);
    }

    // Source order: descending relational degree, ties by ascending id.
    std::map<int, int> degree;
    for (int e : a.domain) degree[e] = 0;
    for (const auto& [p, tuples] : a.relations)
        for (const auto& t : tuples)
            for (int e : t) degree[e]++;
    st.order = a.domain;
    std::stable_sort(st.order.begin(), st.order.end(),
                     [&](int x, int y) { return degree[x] > degree[y]; });

    std::map<int, int> result;
    if (!search(st, 0, result)) return std::nullopt;
    return Hom{a, b, std::move(result)};
}

Decomposition decompose(const Hom& h) {
    if (!h.is_valid()) throw HomlogError("decompose: invalid homomorphism");
    // C has domain A + B; h2 = h on the A side and the identity on the B
    // side; relations of C are the h2-preimages of B's relations.
    Structure c;
    c.sig = h.source.sig;
    std::map<int, int> la, lb;
    int next = 0;
    for (int e : h.source.domain) la[e] = next++;
    for (int e : h.target.domain) lb[e] = next++;
    for (int i = 0; i < next; ++i) c.domain.push_back(i);
    for (const auto& [cn, e] : h.source.const_interp) c.const_interp[cn] = la[e];

    std::map<int, int> h2map;
    for (int e : h.source.domain) h2map[la[e]] = h.map.at(e);
    for (int e : h.target.domain) h2map[lb[e]] = e;

    for (const auto& [p, ar] : c.sig.predicates()) {
        auto& rel = c.relations[p];
        std::vector<int> t(ar, 0);
        std::function<void(int)> rec = [&](int i) {
            if (i == ar) {
                std::vector<int> u(ar);
                for (int j = 0; j < ar; ++j) u[j] = h2map.at(t[j]);
                if (h.target.holds(p, u)) rel.insert(t);
                return;
            }
            for (int e : c.domain) {
                t[i] = e;
                rec(i + 1);
            }
        };
        rec(0);
    }

    std::map<int, int> h1map;
    for (int e : h.source.domain) h1map[e] = la[e];

    Decomposition out{Hom{h.source, c, std::move(h1map)}, Hom{c, h.target, std::move(h2map)}, c};
    return out;
}

MonomergeResult monomerge(const Structure& a, int src, int tgt) {
    if (src == tgt) throw HomlogError("monomerge: source equals target");
    if (!a.has_element(src) || !a.has_element(tgt)) throw HomlogError("monomerge: unknown element");
    for (const auto& [cn, e] : a.const_interp)
        if (e == src)
            throw HomlogError("monomerge: source interprets constant " + cn +
                              "; merge only non-constant-critical pairs");

    Structure q;
    q.sig = a.sig;
    for (int e : a.domain)
        if (e != src) q.domain.push_back(e);
    q.const_interp = a.const_interp;
    std::map<int, int> m;
    for (int e : a.domain) m[e] = e == src ? tgt : e;
    for (const auto& [p, tuples] : a.relations) {
        auto& rel = q.relations[p];
        for (const auto& t : tuples) {
            std::vector<int> u(t.size());
            for (size_t i = 0; i < t.size(); ++i) u[i] = m[t[i]];
            rel.insert(std::move(u));
        }
    }
    Hom h{a, q, std::move(m)};
    MonomergeResult out{std::move(q), h, false};
    out.strong = out.hom.is_strong();
    return out;
}

Factorization factor_strong_surjective(const Hom& h) {
    if (!h.is_valid() || !h.is_strong() || !h.is_surjective())
        throw HomlogError("factor_strong_surjective requires a strong surjective homomorphism");

    Factorization out;
    Structure cur = h.source;
    std::map<int, int> comp = h.map;  // current structure -> target

    while (true) {
        // Smallest collapsing pair (src > tgt with equal images).
        int src = -1, tgt = -1;
        for (size_t i = 0; i < cur.domain.size() && src < 0; ++i)
            for (size_t j = i + 1; j < cur.domain.size(); ++j)
                if (comp.at(cur.domain[i]) == comp.at(cur.domain[j])) {
                    tgt = cur.domain[i];
                    src = cur.domain[j];
                    break;
                }
        if (src < 0) break;
        MonomergeResult step = monomerge(cur, src, tgt);
        if (!step.strong)
            throw HomlogError("internal: merge of fiber-equal elements must be strong");
        std::map<int, int> next_comp;
        for (int e : step.quotient.domain) next_comp[e] = comp.at(e);
        cur = step.quotient;
        comp = std::move(next_comp);
        out.merges.push_back(std::move(step));
    }

    Hom iso{cur, h.target, comp};
    if (!iso.satisfies(HomConstraint{true, true, true}))
        throw HomlogError("internal: residual map must be an isomorphism");
    out.iso = std::move(iso);
    return out;
}

}  // namespace homlog
