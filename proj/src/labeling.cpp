#include "homlog/labeling.hpp"

namespace homlog {

bool Labeling::constant_sole() const {
    for (const auto& [c, e] : base.const_interp)
        if (lam.at(e) != 1) return false;
    return true;
}

void Labeling::check_valid() const {
    base.check_valid();
    if (n < 1) throw HomlogError("labeling needs n >= 1");
    for (int e : base.domain) {
        auto it = lam.find(e);
        if (it == lam.end()) throw HomlogError("labeling misses an element");
        if (it->second < 1 || it->second > n) throw HomlogError("label out of range");
    }
}

int bit_count(int n) {
    int l = 0;
    while ((1 << l) < n) ++l;
    return l;
}

std::string bit_pred_name(int i) { return "__Bit" + std::to_string(i); }

std::pair<Structure, std::map<int, int>> unfold(const Labeling& l) {
    l.check_valid();
    if (!l.constant_sole()) throw HomlogError("unfold requires a constant-sole labeling");
    // Element ids: copy i of base element a gets a fresh id; copies ordered
    // by (a, i) so ids are deterministic.
    std::map<std::pair<int, int>, int> id_of;
    int next = 0;
    for (int a : l.base.domain)
        for (int i = 1; i <= l.lam.at(a); ++i) id_of[{a, i}] = next++;

    Structure out;
    out.sig = l.base.sig;
    for (int i = 0; i < next; ++i) out.domain.push_back(i);
    for (const auto& [c, e] : l.base.const_interp) out.const_interp[c] = id_of.at({e, 1});
    // A tuple of copies is in P exactly when the projected base tuple is;
    // this is the reading under which the projection is a strong surjective
    // homomorphism.
    for (const auto& [p, tuples] : l.base.relations) {
        auto& rel = out.relations[p];
        for (const auto& t : tuples) {
            std::vector<std::pair<int, int>> choices;  // flattened copies per position
            std::vector<int> counts;
            for (int a : t) counts.push_back(l.lam.at(a));
            std::vector<int> idx(t.size(), 1);
            while (true) {
                std::vector<int> u(t.size());
                for (size_t i = 0; i < t.size(); ++i) u[i] = id_of.at({t[i], idx[i]});
                rel.insert(std::move(u));
                size_t i = 0;
                for (; i < t.size(); ++i) {
                    if (idx[i] < counts[i]) {
                        ++idx[i];
                        break;
                    }
                    idx[i] = 1;
                }
                if (i == t.size()) break;
            }
        }
    }

    std::map<int, int> projection;
    for (const auto& [key, id] : id_of) projection[id] = key.first;
    return {std::move(out), std::move(projection)};
}

Structure implicit_representation(const Labeling& l) {
    l.check_valid();
    int bits = bit_count(l.n);
    std::vector<std::pair<std::string, int>> preds;
    for (int i = 0; i < bits; ++i) preds.emplace_back(bit_pred_name(i), 1);
    Structure out = expand(l.base, preds, ExpandMode::Empty);
    for (int a : l.base.domain) {
        int code = l.lam.at(a) - 1;
        for (int i = 0; i < bits; ++i)
            if ((code >> i) & 1) out.relations[bit_pred_name(i)].insert({a});
    }
    return out;
}

}  // namespace homlog
