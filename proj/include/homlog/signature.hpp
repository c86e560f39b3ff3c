#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace homlog {

// Thrown by any operation whose preconditions are violated or whose input
// fails validation. Budget overruns use BudgetExceeded instead.
struct HomlogError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetExceeded : HomlogError {
    using HomlogError::HomlogError;
};

// Finite relational vocabulary: predicate symbols with arities >= 1 plus
// constant symbols. Names are unique across both kinds. Predicates are kept
// sorted by name so that every iteration order derived from a signature is
// canonical.
class Signature {
public:
    Signature() = default;

    void add_predicate(const std::string& name, int arity);
    void add_constant(const std::string& name);

    bool has_predicate(const std::string& name) const { return preds_.count(name) != 0; }
    bool has_constant(const std::string& name) const;
    std::optional<int> arity_of(const std::string& name) const;

    // Sorted by name.
    const std::map<std::string, int>& predicates() const { return preds_; }
    // Sorted.
    const std::vector<std::string>& constants() const { return consts_; }

    bool subsignature_of(const Signature& other) const;

    // Union of two signatures; arities must agree on shared predicates.
    static Signature merged(const Signature& a, const Signature& b);

    bool operator==(const Signature& other) const {
        return preds_ == other.preds_ && consts_ == other.consts_;
    }

    std::string to_text() const;  // "sig { P/2; Q/1; const c; }"

private:
    std::map<std::string, int> preds_;
    std::vector<std::string> consts_;  // sorted
};

}  // namespace homlog
