#pragma once

#include <cstdint>
#include <map>

#include "homlog/structure.hpp"

namespace homlog {

struct EvalLimits {
    // Max relation cells (|A|^arity) a single SO quantifier may enumerate.
    int so_cell_budget = 24;
    // Max search nodes / candidates for bounded model finding.
    std::uint64_t candidate_budget = 10'000'000;
};

// Memoizes least-fixed-point interpretations per (structure, definition
// block). Optional; safe to drop between calls.
struct LfpCache {
    std::map<std::pair<const void*, const void*>,
             std::map<std::string, std::set<std::vector<int>>>>
        memo;
};

using Env = std::map<std::string, int>;

// Tarskian evaluation. Handles the full language: FO connectives and
// quantifiers, second-order quantifiers by relation enumeration (budgeted),
// ExistsFinSO as plain ExistsSO (relations on finite structures are finite),
// and Lfp blocks by bottom-up simultaneous fixpoint iteration.
bool eval(const Structure& a, const FormulaPtr& f, const Env& env = {},
          const EvalLimits& lim = {}, LfpCache* cache = nullptr);

// Restriction wrappers matching the operation contracts.
bool eval_fo(const Structure& a, const FormulaPtr& f, const Env& env = {});
bool eval_so(const Structure& a, const FormulaPtr& f, const EvalLimits& lim = {});
bool eval_lfp(const Structure& a, const FormulaPtr& f, LfpCache* cache = nullptr);

// Independent oracle: evaluates by grounding every quantifier into an
// explicit conjunction/disjunction over the domain and reducing the ground
// formula. First-order inputs only.
bool eval_fo_naive(const Structure& a, const FormulaPtr& f, const Env& env = {});

// Computes the simultaneous least fixpoint of an Lfp node on a structure
// (exposed so tests can probe monotonicity and pre-fixpoint minimality).
std::map<std::string, std::set<std::vector<int>>> lfp_fixpoint(const Structure& a,
                                                               const FormulaPtr& lfp_node,
                                                               const Env& env = {});

}  // namespace homlog
