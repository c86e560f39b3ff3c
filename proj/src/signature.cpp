#include "homlog/signature.hpp"

#include <algorithm>

namespace homlog {

void Signature::add_predicate(const std::string& name, int arity) {
    if (arity < 1) throw HomlogError("predicate arity must be >= 1: " + name);
    if (preds_.count(name) || has_constant(name))
        throw HomlogError("duplicate symbol in signature: " + name);
    preds_[name] = arity;
}

void Signature::add_constant(const std::string& name) {
    if (preds_.count(name) || has_constant(name))
        throw HomlogError("duplicate symbol in signature: " + name);
    consts_.insert(std::lower_bound(consts_.begin(), consts_.end(), name), name);
}

bool Signature::has_constant(const std::string& name) const {
    return std::binary_search(consts_.begin(), consts_.end(), name);
}

std::optional<int> Signature::arity_of(const std::string& name) const {
    auto it = preds_.find(name);
    if (it == preds_.end()) return std::nullopt;
    return it->second;
}

bool Signature::subsignature_of(const Signature& other) const {
    for (const auto& [p, ar] : preds_) {
        auto o = other.arity_of(p);
        if (!o || *o != ar) return false;
    }
    for (const auto& c : consts_)
        if (!other.has_constant(c)) return false;
    return true;
}

Signature Signature::merged(const Signature& a, const Signature& b) {
    Signature out = a;
    for (const auto& [p, ar] : b.preds_) {
        auto existing = out.arity_of(p);
        if (existing) {
            if (*existing != ar) throw HomlogError("arity clash on merge: " + p);
        } else {
            out.add_predicate(p, ar);
        }
    }
    for (const auto& c : b.consts_)
        if (!out.has_constant(c)) out.add_constant(c);
    return out;
}

std::string Signature::to_text() const {
    std::string s = "sig {";
    bool first = true;
    for (const auto& [p, ar] : preds_) {
        s += first ? " " : " ";
        s += p + "/" + std::to_string(ar) + ";";
        first = false;
    }
    for (const auto& c : consts_) s += " const " + c + ";";
    s += " }";
    return s;
}

}  // namespace homlog
