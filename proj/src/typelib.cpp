#include "homlog/typelib.hpp"

#include <algorithm>
#include <functional>

namespace homlog {

std::string pool_var(int i) { return "v" + std::to_string(i); }

std::string TypeDescriptor::key() const {
    std::string s = "[";
    for (const auto& v : vars) s += v + ",";
    s += "]";
    for (const auto& l : literals) {
        s += l.positive ? "+" : "-";
        s += l.pred + "(";
        for (const auto& t : l.terms) s += (t.is_var() ? "v:" : "c:") + t.name + ",";
        s += ")";
    }
    return s;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

}  // namespace

std::string TypeDescriptor::tp_pred_name() const { return "__Tp" + hex16(fnv1a(key())); }
std::string TypeDescriptor::neg_tp_pred_name() const { return "__NTp" + hex16(fnv1a(key())); }

FormulaPtr TypeDescriptor::conjunction() const {
    std::vector<FormulaPtr> conj;
    for (const auto& l : literals) {
        FormulaPtr a = atom(l.pred, l.terms);
        conj.push_back(l.positive ? a : lnot(a));
    }
    return land(std::move(conj));
}

namespace {

// All atoms over terms from vs (as variables) and the signature's constants.
std::vector<TypeLiteral> atom_space(const Signature& sig, const std::vector<std::string>& vs) {
    std::vector<Term> terms;
    for (const auto& v : vs) terms.push_back(Term::var(v));
    for (const auto& c : sig.constants()) terms.push_back(Term::cons(c));
    std::vector<TypeLiteral> out;
    for (const auto& [p, ar] : sig.predicates()) {
        std::vector<size_t> idx(ar, 0);
        while (true) {
            TypeLiteral lit;
            lit.pred = p;
            for (int i = 0; i < ar; ++i) lit.terms.push_back(terms[idx[i]]);
            out.push_back(std::move(lit));
            size_t i = ar;
            bool done = ar == 0;
            while (i > 0) {
                --i;
                if (++idx[i] < terms.size()) break;
                idx[i] = 0;
                if (i == 0) done = true;
            }
            if (done) break;
        }
    }
    return out;
}

void find_guard(TypeDescriptor& t) {
    t.guarded = false;
    t.guard_literal = -1;
    std::set<std::string> need(t.vars.begin(), t.vars.end());
    for (size_t i = 0; i < t.literals.size(); ++i) {
        const auto& l = t.literals[i];
        if (!l.positive) continue;
        std::set<std::string> have;
        for (const auto& term : l.terms)
            if (term.is_var()) have.insert(term.name);
        if (have == need) {
            t.guarded = true;
            t.guard_literal = (int)i;
            return;
        }
    }
}

}  // namespace

std::vector<TypeDescriptor> eligible_types(const Signature& sig, int width, TypeMode mode) {
    if (mode == TypeMode::Fo2) width = 2;
    if (width < 1) throw HomlogError("eligible_types needs width >= 1");
    std::vector<TypeDescriptor> out;
    // ordered subsequences of the pool v1..v_width
    for (int mask = 1; mask < (1 << width); ++mask) {
        std::vector<std::string> vs;
        for (int i = 0; i < width; ++i)
            if ((mask >> i) & 1) vs.push_back(pool_var(i + 1));
        auto atoms = atom_space(sig, vs);
        if (atoms.size() > 22)
            throw BudgetExceeded("type space too large: " + std::to_string(atoms.size()) +
                                 " atoms over " + std::to_string(vs.size()) + " variables");
        std::uint64_t combos = 1ull << atoms.size();
        for (std::uint64_t polarity = 0; polarity < combos; ++polarity) {
            TypeDescriptor t;
            t.vars = vs;
            t.literals = atoms;
            for (size_t i = 0; i < atoms.size(); ++i)
                t.literals[i].positive = (polarity >> i) & 1;
            std::sort(t.literals.begin(), t.literals.end());
            find_guard(t);
            if (mode == TypeMode::GuardedRigid && !t.guarded) continue;
            out.push_back(std::move(t));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const TypeDescriptor& a, const TypeDescriptor& b) { return a.key() < b.key(); });
    return out;
}

bool realizes(const Structure& a, const TypeDescriptor& t, const std::vector<int>& tuple) {
    std::map<std::string, int> env;
    for (size_t i = 0; i < t.vars.size(); ++i) env[t.vars[i]] = tuple[i];
    for (const auto& l : t.literals) {
        std::vector<int> args;
        for (const auto& term : l.terms)
            args.push_back(term.is_var() ? env.at(term.name) : a.const_interp.at(term.name));
        if (a.holds(l.pred, args) != l.positive) return false;
    }
    return true;
}

namespace {

void for_each_tuple(const Structure& a, int arity,
                    const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> t(arity, 0);
    std::function<void(int)> rec = [&](int i) {
        if (i == arity) {
            fn(t);
            return;
        }
        for (int e : a.domain) {
            t[i] = e;
            rec(i + 1);
        }
    };
    rec(0);
}

}  // namespace

TypeSummary type_summary(const Structure& a, const std::vector<TypeDescriptor>& types) {
    TypeSummary out;
    for (size_t i = 0; i < types.size(); ++i) {
        int count = 0;
        for_each_tuple(a, types[i].order(), [&](const std::vector<int>& tuple) {
            if (count < 2 && realizes(a, types[i], tuple)) ++count;
        });
        if (count >= 1) out.plus.insert(i);
        if (count == 1) out.bang.insert(i);
    }
    return out;
}

Structure adorn(const Structure& a, const std::vector<TypeDescriptor>& types) {
    Structure out = a;
    for (const auto& t : types) {
        std::string name = t.tp_pred_name();
        out.sig.add_predicate(name, t.order());
        auto& rel = out.relations[name];
        for_each_tuple(a, t.order(), [&](const std::vector<int>& tuple) {
            if (realizes(a, t, tuple)) rel.insert(tuple);
        });
    }
    return out;
}

Structure adorned_transfer(const Structure& a, const Structure& b, const std::map<int, int>& h,
                           const std::vector<TypeDescriptor>& types) {
    Structure out = b;
    for (const auto& t : types) {
        std::string name = t.tp_pred_name();
        out.sig.add_predicate(name, t.order());
        auto& rel = out.relations[name];
        for_each_tuple(a, t.order(), [&](const std::vector<int>& tuple) {
            if (!realizes(a, t, tuple)) return;
            std::vector<int> img(tuple.size());
            for (size_t i = 0; i < tuple.size(); ++i) img[i] = h.at(tuple[i]);
            rel.insert(std::move(img));
        });
    }
    return out;
}

std::vector<TypeSummary> model_summary(const FormulaPtr& f, const Signature& sig,
                                       const std::vector<TypeDescriptor>& types, int size_bound,
                                       const EvalLimits& lim) {
    std::set<TypeSummary> seen;
    for_each_bounded_model(f, sig, size_bound, lim, [&](const Structure& m) {
        seen.insert(type_summary(m, types));
        return true;
    });
    return std::vector<TypeSummary>(seen.begin(), seen.end());
}

std::optional<size_t> subtype_index(const std::vector<TypeDescriptor>& types, size_t t,
                                    const std::vector<int>& keep) {
    const TypeDescriptor& base = types[t];
    std::set<std::string> kept;
    TypeDescriptor sub;
    for (int pos : keep) {
        sub.vars.push_back(base.vars[pos]);
        kept.insert(base.vars[pos]);
    }
    for (const auto& l : base.literals) {
        bool inside = true;
        for (const auto& term : l.terms)
            if (term.is_var() && !kept.count(term.name)) inside = false;
        if (inside) sub.literals.push_back(l);
    }
    std::sort(sub.literals.begin(), sub.literals.end());
    std::string k = sub.key();
    for (size_t i = 0; i < types.size(); ++i)
        if (types[i].key() == k) return i;
    return std::nullopt;
}

std::optional<PermImage> perm_image(const std::vector<TypeDescriptor>& types, size_t t,
                                    const std::map<std::string, std::string>& kappa) {
    const TypeDescriptor& base = types[t];
    TypeDescriptor img;
    // image variable set, sorted back into pool order
    std::vector<std::pair<int, std::string>> ordered;  // (pool index, image var)
    std::map<std::string, int> source_pos;
    for (size_t i = 0; i < base.vars.size(); ++i) {
        const std::string& iv = kappa.at(base.vars[i]);
        int pool_idx = std::stoi(iv.substr(1));
        ordered.push_back({pool_idx, iv});
        source_pos[iv] = (int)i;
    }
    std::sort(ordered.begin(), ordered.end());
    PermImage out;
    out.image = 0;
    for (const auto& [idx, v] : ordered) {
        img.vars.push_back(v);
        out.arg_of.push_back(source_pos.at(v));
    }
    for (const auto& l : base.literals) {
        TypeLiteral nl = l;
        for (auto& term : nl.terms)
            if (term.is_var()) term.name = kappa.at(term.name);
        img.literals.push_back(std::move(nl));
    }
    std::sort(img.literals.begin(), img.literals.end());
    std::string k = img.key();
    for (size_t i = 0; i < types.size(); ++i)
        if (types[i].key() == k) {
            out.image = i;
            return out;
        }
    return std::nullopt;
}

}  // namespace homlog
