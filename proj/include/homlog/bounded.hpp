#pragma once

#include <functional>
#include <optional>

#include "homlog/eval.hpp"
#include "homlog/structure.hpp"

namespace homlog {

// Enumerates all structures over domains {0..k-1}, k <= max_size, in the
// canonical total order (size ascending; constant assignments lexicographic;
// then relation cell vectors lexicographic, predicate-major / row-major, 0
// before 1), invoking fn on exactly those satisfying f. fn returns false to
// stop early. Search and enumeration work toward lim.candidate_budget;
// exceeding it raises BudgetExceeded.
//
// Pure first-order sentences run on a branch-and-prune search that visits the
// models in the same canonical order as plain enumeration; sentences with SO
// quantifiers or Lfp blocks fall back to plain enumeration with the general
// evaluator.
void for_each_bounded_model(const FormulaPtr& f, const Signature& sig, int max_size,
                            const EvalLimits& lim,
                            const std::function<bool(const Structure&)>& fn);

// Materialized prefix of the stream (up to max_count models).
std::vector<Structure> bounded_models(const FormulaPtr& f, const Signature& sig, int max_size,
                                      const EvalLimits& lim = {},
                                      size_t max_count = (size_t)-1);

// First model in canonical order, or absence -- which only means "no model up
// to max_size".
std::optional<Structure> bounded_sat(const FormulaPtr& f, const Signature& sig, int max_size,
                                     const EvalLimits& lim = {});

// Independent oracle: plain odometer enumeration with the general evaluator,
// no search pruning. Used to cross-check the search path.
std::vector<Structure> bounded_models_naive(const FormulaPtr& f, const Signature& sig,
                                            int max_size, const EvalLimits& lim = {},
                                            size_t max_count = (size_t)-1);

}  // namespace homlog
