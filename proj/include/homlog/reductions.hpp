#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "homlog/formula.hpp"
#include "homlog/structure.hpp"

namespace homlog {

// Margin-constrained domino system: tile set D, bottom-margin tiles B,
// left-margin tiles L, horizontal/vertical compatibility H, V.
struct DominoSystem {
    std::vector<std::string> tiles;                       // D
    std::set<std::string> bottom;                         // B
    std::set<std::string> left;                           // L
    std::set<std::pair<std::string, std::string>> horizontal;  // H
    std::set<std::pair<std::string, std::string>> vertical;    // V

    void check_valid() const;
    std::set<std::string> h_succ(const std::string& d) const;
    std::set<std::string> v_succ(const std::string& d) const;
    std::set<std::string> seeds() const;  // B intersect L

    // Copy with margins dropped (B = L = D), the reading under which A_D
    // homomorphism targets correspond to tilings.
    DominoSystem margin_relaxed() const;
};

struct DeterminismReport {
    bool deterministic = true;
    std::string violation;  // first violated condition, human-readable
};

// The four determinism conditions, checked exhaustively; reports the first
// violation.
DeterminismReport check_deterministic(const DominoSystem& d);

struct PeriodicTilingSpec {
    int k_init = 0, k_period = 1, l_init = 0, l_period = 1;
};

// The grid TGD sentence over {H/2, V/2}.
FormulaPtr grid_sentence();
Signature grid_signature();

// The k x k induced piece of the N x N grid; element (i,j) with i column,
// j row gets id i + k*j.
Structure grid_fragment(int k);

// A_D over {H,V}: domain = tiles, relations = the compatibility relations.
Structure domino_structure(const DominoSystem& d);

// Phi_{D-tiling} = Phi_grid and the tile rules, with unary predicates for the
// empty set and the singletons only; requires a deterministic system.
FormulaPtr tiling_sentence(const DominoSystem& d, Signature* sig_out = nullptr);

// The mildly disjunctive variant Phi_{D-tiling} v exists x. T_empty(x).
FormulaPtr mdtgd_variant(const DominoSystem& d, Signature* sig_out = nullptr);

// Names of the tile predicates used by tiling_sentence.
std::string tile_pred_name(const std::string& tile);
std::string empty_tile_pred_name();

// k x k tiling respecting margins (left column in L, bottom row in B) and the
// H/V constraints; row-major backtracking, first solution in tile order.
// Result indexed [row][col] (row 0 = bottom).
std::optional<std::vector<std::vector<std::string>>> bounded_tiling(const DominoSystem& d, int k);

struct PeriodicTiling {
    std::vector<std::vector<std::string>> prefix;  // (l_init+l_period) rows x (k_init+k_period) cols
    PeriodicTilingSpec spec;
};

// Searches small (k_init, k_period, l_init, l_period) combinations for a
// tiling of the wrap-around fragment, certifying an ultimately periodic
// tiling of the full grid.
std::optional<PeriodicTiling> periodic_tiling(const DominoSystem& d, int max_init = 4,
                                              int max_period = 4);

// The wrapped finite model of Phi_grid induced by a periodic tiling prefix
// (columns k_init+k_period wrap to k_init+1, rows likewise).
Structure wrap_structure(const PeriodicTilingSpec& spec);

// 3SAT gadget: clauses are triples of literals; literal = (variable index
// >= 1, positive?). Returns the structure A_S and the sentence Phi_3SAT.
struct Sat3Literal {
    int var = 1;
    bool positive = true;
};
using Sat3Clause = std::array<Sat3Literal, 3>;

struct Sat3Gadget {
    Structure a_s;
    FormulaPtr phi;
    Signature sig;
};
Sat3Gadget sat3_gadget(const std::vector<Sat3Clause>& clauses);

}  // namespace homlog
