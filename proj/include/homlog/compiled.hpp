#pragma once

#include <cstdint>
#include <memory>

#include "homlog/structure.hpp"

namespace homlog {

// Flat cell layout for all relations of a signature over a fixed domain size.
// Cells are ordered predicate-major (predicates sorted by name), tuples
// row-major with the first coordinate most significant; that order is the
// canonical enumeration order of bounded model search.
struct PackedLayout {
    Signature sig;
    int n = 1;
    struct Pred {
        std::string name;
        int arity;
        std::uint64_t offset;
        std::uint64_t cells;
    };
    std::vector<Pred> preds;
    std::vector<std::string> consts;  // sorted
    std::uint64_t total_cells = 0;

    static PackedLayout make(const Signature& sig, int n);
    int pred_index(const std::string& name) const;
    std::uint64_t cell_of(int pred_idx, const int* tuple) const;
};

// Tri-state relational content over a layout: each cell is 0, 1 or unknown.
struct PackedModel {
    const PackedLayout* layout = nullptr;
    std::vector<int> const_vals;          // by layout->consts index
    std::vector<std::uint64_t> bits;
    std::vector<std::uint64_t> known;

    explicit PackedModel(const PackedLayout* l);
    int get(std::uint64_t cell) const {  // 0, 1, or 2 = unknown
        std::uint64_t w = cell >> 6, b = cell & 63;
        if (!((known[w] >> b) & 1)) return 2;
        return (bits[w] >> b) & 1;
    }
    void set(std::uint64_t cell, bool value) {
        std::uint64_t w = cell >> 6, b = cell & 63;
        known[w] |= 1ull << b;
        if (value)
            bits[w] |= 1ull << b;
        else
            bits[w] &= ~(1ull << b);
    }
    void forget(std::uint64_t cell) {
        std::uint64_t w = cell >> 6, b = cell & 63;
        known[w] &= ~(1ull << b);
    }
    Structure to_structure() const;  // requires all cells known
};

// Compiled first-order sentence over a fixed layout: predicate names interned
// to indices, variables to dense slots. Only the FO language (with equality)
// compiles; SO quantifiers and Lfp do not.
class CompiledFormula {
public:
    // Throws HomlogError if f is not compilable or not a sentence.
    static std::unique_ptr<CompiledFormula> compile(const FormulaPtr& f, const PackedLayout& layout);
    static bool compilable(const FormulaPtr& f);

    // Kleene evaluation: 0 false, 1 true, 2 unknown. Exact on fully-known
    // models.
    int tri_eval(const PackedModel& m) const;

    ~CompiledFormula();

    // Top-level conjunct access for incremental search (empty if the root is
    // not a conjunction; then the root is the single conjunct). When
    // `unknown_cell` is given and the result is unknown, it receives some
    // undecided cell the verdict depends on.
    size_t conjunct_count() const;
    int tri_eval_conjunct(const PackedModel& m, size_t idx,
                          std::uint64_t* unknown_cell = nullptr) const;

    struct Node;

private:
    std::unique_ptr<Node> root_;
    std::vector<const Node*> conjuncts_;
    const PackedLayout* layout_;
    mutable std::vector<int> slots_;
    mutable std::uint64_t watched_cell_ = 0;
    mutable bool have_watched_ = false;

    CompiledFormula() = default;
    int eval_node(const Node& node, const PackedModel& m) const;
};

}  // namespace homlog
