#include "homlog/spoiler_search.hpp"

#include <algorithm>

#include "homlog/compiled.hpp"
#include "homlog/serialize.hpp"

namespace homlog {

std::string iso_invariant_key(const Structure& s) {
    Structure norm = normalize_domain(s);
    int n = (int)norm.domain.size();
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::string best;
    do {
        Structure img;
        img.sig = norm.sig;
        img.domain = norm.domain;
        for (const auto& [c, e] : norm.const_interp) img.const_interp[c] = perm[e];
        for (const auto& [p, tuples] : norm.relations) {
            auto& rel = img.relations[p];
            for (const auto& t : tuples) {
                std::vector<int> u(t.size());
                for (size_t i = 0; i < t.size(); ++i) u[i] = perm[t[i]];
                rel.insert(std::move(u));
            }
        }
        std::string key = structure_to_json(img);
        if (best.empty() || key < best) best = key;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

std::vector<Structure> dedup_up_to_iso(const std::vector<Structure>& xs) {
    std::vector<Structure> out;
    std::set<std::string> seen;
    for (const auto& s : xs)
        if (seen.insert(iso_invariant_key(s)).second) out.push_back(s);
    return out;
}

bool in_bounded_homclosure(const std::vector<Structure>& models, const Structure& b) {
    for (const auto& a : models)
        if (a.domain.size() <= b.domain.size() * 4 && find_hom(a, b).has_value()) return true;
    // size is no obstacle for homomorphisms; retry without the cheap filter
    for (const auto& a : models)
        if (a.domain.size() > b.domain.size() * 4 && find_hom(a, b).has_value()) return true;
    return false;
}

namespace {

// Seeds the reachability table with the minimal homomorphic images of a model
// inside the universe over kb elements with the given constant assignment.
void seed_images(const Structure& a, const PackedLayout& layout,
                 const std::vector<int>& const_vals, std::vector<char>& reach) {
    int kb = layout.n;
    size_t na = a.domain.size();
    // constant pins
    std::map<int, int> pinned;
    for (const auto& [c, e] : a.const_interp) {
        auto it = std::lower_bound(layout.consts.begin(), layout.consts.end(), c);
        int target = const_vals[it - layout.consts.begin()];
        auto prev = pinned.find(e);
        if (prev != pinned.end() && prev->second != target) return;
        pinned[e] = target;
    }
    std::vector<int> map(na, 0);
    std::vector<int> order(a.domain);
    std::function<void(size_t)> rec = [&](size_t idx) {
        if (idx == na) {
            std::uint64_t mask = 0;
            std::map<int, int> m;
            for (size_t i = 0; i < na; ++i) m[order[i]] = map[i];
            for (const auto& [p, tuples] : a.relations) {
                int pi = layout.pred_index(p);
                for (const auto& t : tuples) {
                    int img[8];
                    for (size_t i = 0; i < t.size(); ++i) img[i] = m[t[i]];
                    mask |= 1ull << layout.cell_of(pi, img);
                }
            }
            reach[mask] = 1;
            return;
        }
        int e = order[idx];
        auto pin = pinned.find(e);
        if (pin != pinned.end()) {
            map[idx] = pin->second;
            rec(idx + 1);
            return;
        }
        for (int v = 0; v < kb; ++v) {
            map[idx] = v;
            rec(idx + 1);
        }
    };
    rec(0);
}

}  // namespace

std::optional<SpoilerWitness> bounded_spoiler_search(const FormulaPtr& f, const Signature& sig,
                                                     int bound, const EvalLimits& lim) {
    // Phase 1: models up to the bound, one representative per iso class
    // (homomorphic reachability is isomorphism-invariant).
    std::vector<Structure> models;
    {
        std::set<std::string> seen;
        for_each_bounded_model(f, sig, bound, lim, [&](const Structure& s) {
            if (seen.insert(iso_invariant_key(s)).second) models.push_back(s);
            return true;
        });
    }
    if (models.empty()) return std::nullopt;

    bool compilable = CompiledFormula::compilable(f);

    // Phase 2: per universe (size, constant assignment), mark all structures
    // receiving a homomorphism from some model, then look for non-models.
    for (int kb = 1; kb <= bound; ++kb) {
        PackedLayout layout = PackedLayout::make(sig, kb);
        if (layout.total_cells > 24)
            throw BudgetExceeded("spoiler search universe too large: " +
                                 std::to_string(layout.total_cells) + " cells");
        std::unique_ptr<CompiledFormula> compiled;
        if (compilable) compiled = CompiledFormula::compile(f, layout);

        size_t nc = layout.consts.size();
        std::vector<int> const_vals(nc, 0);
        while (true) {
            std::vector<char> reach(1ull << layout.total_cells, 0);
            for (const auto& a : models) seed_images(a, layout, const_vals, reach);
            // upward closure over relation supersets
            for (std::uint64_t b = 0; b < layout.total_cells; ++b)
                for (std::uint64_t mask = 0; mask < reach.size(); ++mask)
                    if ((mask >> b) & 1)
                        if (reach[mask ^ (1ull << b)]) reach[mask] = 1;

            PackedModel pm(&layout);
            pm.const_vals = const_vals;
            for (std::uint64_t mask = 0; mask < reach.size(); ++mask) {
                if (!reach[mask]) continue;
                for (std::uint64_t c = 0; c < layout.total_cells; ++c)
                    pm.set(c, (mask >> c) & 1);
                bool is_model;
                if (compiled) {
                    is_model = compiled->tri_eval(pm) == 1;
                } else {
                    is_model = eval(pm.to_structure(), f, {}, lim);
                }
                if (!is_model) {
                    Structure b = pm.to_structure();
                    for (const auto& a : models) {
                        auto h = find_hom(a, b);
                        if (h) return SpoilerWitness{a, b, *h};
                    }
                    throw HomlogError("internal: reachable non-model without a hom source");
                }
            }

            // next constant assignment
            size_t i = nc;
            bool more = false;
            while (i > 0) {
                --i;
                if (const_vals[i] + 1 < kb) {
                    ++const_vals[i];
                    std::fill(const_vals.begin() + i + 1, const_vals.end(), 0);
                    more = true;
                    break;
                }
            }
            if (!more) break;
        }
    }
    return std::nullopt;
}

}  // namespace homlog
