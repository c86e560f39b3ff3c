#include "homlog/bounded.hpp"

#include "homlog/compiled.hpp"

namespace homlog {

namespace {

struct StopSearch {};

// Splits top-level conjunctions and grounds their universal prefixes over the
// domain 0..n-1 (pseudo-variables "#k"), so the search caches satisfaction at
// the granularity of ground conjuncts. Equivalent to the input on every
// structure of size n.
void ground_conjuncts(const FormulaPtr& f, int n, std::vector<FormulaPtr>& out) {
    if (f->kind == Fk::And) {
        for (const auto& k : f->kids) ground_conjuncts(k, n, out);
        return;
    }
    if (f->kind == Fk::Forall) {
        for (int e = 0; e < n; ++e)
            ground_conjuncts(substitute_var(f->kids[0], f->var, Term::var("#" + std::to_string(e))),
                             n, out);
        return;
    }
    out.push_back(f);
}

class Search {
public:
    Search(const FormulaPtr& f, const Signature& sig, int max_size, const EvalLimits& lim,
           const std::function<bool(const Structure&)>& fn, bool existence_only)
        : f_(f), sig_(sig), max_size_(max_size), lim_(lim), fn_(fn),
          existence_only_(existence_only) {}

    void run() {
        bool compilable = CompiledFormula::compilable(f_);
        try {
            for (int k = 1; k <= max_size_; ++k) {
                layout_ = PackedLayout::make(sig_, k);
                model_ = std::make_unique<PackedModel>(&layout_);
                if (compilable) {
                    std::vector<FormulaPtr> ground;
                    ground_conjuncts(f_, k, ground);
                    compiled_ = CompiledFormula::compile(land(std::move(ground)), layout_);
                    status_.assign(compiled_->conjunct_count(), 2);
                    // Fail-first ordering keeps large existence checks
                    // tractable; the canonical order is kept whenever the
                    // stream order is observable.
                    bool smart = existence_only_ && layout_.total_cells > 24;
                    for_each_const_assignment([&] {
                        std::fill(status_.begin(), status_.end(), 2);
                        if (smart)
                            search_smart();
                        else
                            search(0);
                    });
                } else {
                    compiled_.reset();
                    for_each_const_assignment([&] { enumerate_all_cells(); });
                }
            }
        } catch (const StopSearch&) {
        }
    }

private:
    void charge(std::uint64_t amount = 1) {
        used_ += amount;
        if (used_ > lim_.candidate_budget)
            throw BudgetExceeded("bounded search exceeded candidate budget of " +
                                 std::to_string(lim_.candidate_budget));
    }

    void for_each_const_assignment(const std::function<void()>& body) {
        size_t nc = layout_.consts.size();
        std::vector<int>& vals = model_->const_vals;
        std::fill(vals.begin(), vals.end(), 0);
        while (true) {
            body();
            // lexicographic odometer, last constant fastest
            size_t i = nc;
            while (i > 0) {
                --i;
                if (vals[i] + 1 < layout_.n) {
                    ++vals[i];
                    std::fill(vals.begin() + i + 1, vals.end(), 0);
                    break;
                }
                if (i == 0) return;
            }
            if (nc == 0) return;
        }
    }

    // Re-evaluates the undecided conjuncts, recording changes on a trail so
    // the caller can undo them. Returns 0 (some conjunct false), 1 (all
    // true), or 2 with an undecided cell to branch on.
    int revisit_conjuncts(std::vector<std::pair<size_t, int>>& trail, std::uint64_t* pick) {
        bool unknown = false;
        for (size_t i = 0; i < status_.size(); ++i) {
            if (status_[i] != 2) continue;
            std::uint64_t cell = 0;
            int v = compiled_->tri_eval_conjunct(*model_, i, &cell);
            if (v != 2) {
                trail.push_back({i, status_[i]});
                status_[i] = v;
            }
            if (v == 0) return 0;
            if (v == 2 && !unknown) {
                unknown = true;
                if (pick) *pick = cell;
            }
        }
        return unknown ? 2 : 1;
    }

    void undo(const std::vector<std::pair<size_t, int>>& trail) {
        for (auto it = trail.rbegin(); it != trail.rend(); ++it) status_[it->first] = it->second;
    }

    // Branch over the cells in canonical order; status_ caches the Kleene
    // value of each top-level conjunct on the current partial model.
    void search(std::uint64_t cell) {
        charge();
        std::vector<std::pair<size_t, int>> trail;
        int verdict = revisit_conjuncts(trail, nullptr);
        if (verdict == 1) {
            // True regardless of the undecided cells: every completion is a
            // model; yield them in lexicographic order.
            yield_completions(cell);
        } else if (verdict == 2) {
            if (cell >= layout_.total_cells)
                throw HomlogError("internal: undecided formula on a complete model");
            for (int v = 0; v <= 1; ++v) {
                model_->set(cell, v == 1);
                search(cell + 1);
            }
            model_->forget(cell);
        }
        undo(trail);
    }

    // Fail-first exhaustive search: decide a cell some undecided conjunct
    // watches. Deterministic; visits models in search order, not canonical
    // order.
    void search_smart() {
        charge();
        std::vector<std::pair<size_t, int>> trail;
        std::uint64_t pick = 0;
        int verdict = revisit_conjuncts(trail, &pick);
        if (verdict == 1) {
            // all conjuncts definitely true: complete with zeros
            std::vector<std::uint64_t> filled;
            for (std::uint64_t c = 0; c < layout_.total_cells; ++c)
                if (model_->get(c) == 2) {
                    model_->set(c, false);
                    filled.push_back(c);
                }
            charge();
            bool cont = fn_(model_->to_structure());
            for (std::uint64_t c : filled) model_->forget(c);
            if (!cont) {
                undo(trail);
                throw StopSearch{};
            }
        } else if (verdict == 2) {
            for (int v = 0; v <= 1; ++v) {
                model_->set(pick, v == 1);
                search_smart();
            }
            model_->forget(pick);
        }
        undo(trail);
    }

    void yield_completions(std::uint64_t cell) {
        if (cell == layout_.total_cells) {
            charge();
            if (!fn_(model_->to_structure())) throw StopSearch{};
            return;
        }
        if (model_->get(cell) != 2) {
            yield_completions(cell + 1);
            return;
        }
        for (int v = 0; v <= 1; ++v) {
            model_->set(cell, v == 1);
            yield_completions(cell + 1);
        }
        model_->forget(cell);
    }

    void enumerate_all_cells() {
        // Plain odometer over all cell vectors (general-evaluator fallback).
        for (std::uint64_t c = 0; c < layout_.total_cells; ++c) model_->set(c, false);
        while (true) {
            charge();
            Structure s = model_->to_structure();
            if (eval(s, f_, {}, lim_))
                if (!fn_(s)) throw StopSearch{};
            std::uint64_t i = layout_.total_cells;
            bool done = layout_.total_cells == 0;
            while (i > 0) {
                --i;
                if (model_->get(i) == 0) {
                    model_->set(i, true);
                    for (std::uint64_t j = i + 1; j < layout_.total_cells; ++j)
                        model_->set(j, false);
                    break;
                }
                if (i == 0) done = true;
            }
            if (done) return;
        }
    }

    FormulaPtr f_;
    Signature sig_;
    int max_size_;
    EvalLimits lim_;
    const std::function<bool(const Structure&)>& fn_;
    bool existence_only_ = false;
    PackedLayout layout_;
    std::unique_ptr<PackedModel> model_;
    std::unique_ptr<CompiledFormula> compiled_;
    std::vector<int> status_;
    std::uint64_t used_ = 0;
};

}  // namespace

void for_each_bounded_model(const FormulaPtr& f, const Signature& sig, int max_size,
                            const EvalLimits& lim,
                            const std::function<bool(const Structure&)>& fn) {
    if (max_size < 1) throw HomlogError("bounded search needs max_size >= 1");
    if (!is_sentence(f)) throw HomlogError("bounded search requires a sentence");
    Search s(f, sig, max_size, lim, fn, /*existence_only=*/false);
    s.run();
}

std::vector<Structure> bounded_models(const FormulaPtr& f, const Signature& sig, int max_size,
                                      const EvalLimits& lim, size_t max_count) {
    std::vector<Structure> out;
    for_each_bounded_model(f, sig, max_size, lim, [&](const Structure& s) {
        out.push_back(s);
        return out.size() < max_count;
    });
    return out;
}

std::optional<Structure> bounded_sat(const FormulaPtr& f, const Signature& sig, int max_size,
                                     const EvalLimits& lim) {
    if (max_size < 1) throw HomlogError("bounded search needs max_size >= 1");
    if (!is_sentence(f)) throw HomlogError("bounded search requires a sentence");
    std::optional<Structure> out;
    std::function<bool(const Structure&)> take = [&](const Structure& s) {
        out = s;
        return false;
    };
    Search s(f, sig, max_size, lim, take, /*existence_only=*/true);
    s.run();
    return out;
}

std::vector<Structure> bounded_models_naive(const FormulaPtr& f, const Signature& sig,
                                            int max_size, const EvalLimits& lim,
                                            size_t max_count) {
    if (max_size < 1) throw HomlogError("bounded search needs max_size >= 1");
    std::vector<Structure> out;
    std::uint64_t used = 0;
    auto charge = [&]() {
        if (++used > lim.candidate_budget)
            throw BudgetExceeded("naive enumeration exceeded candidate budget");
    };
    for (int k = 1; k <= max_size && out.size() < max_count; ++k) {
        PackedLayout layout = PackedLayout::make(sig, k);
        PackedModel m(&layout);
        size_t nc = layout.consts.size();
        std::fill(m.const_vals.begin(), m.const_vals.end(), 0);
        bool more_consts = true;
        while (more_consts && out.size() < max_count) {
            for (std::uint64_t c = 0; c < layout.total_cells; ++c) m.set(c, false);
            bool more_cells = true;
            while (more_cells && out.size() < max_count) {
                charge();
                Structure s = m.to_structure();
                if (eval(s, f, {}, lim)) out.push_back(s);
                std::uint64_t i = layout.total_cells;
                more_cells = false;
                while (i > 0) {
                    --i;
                    if (m.get(i) == 0) {
                        m.set(i, true);
                        for (std::uint64_t j = i + 1; j < layout.total_cells; ++j) m.set(j, false);
                        more_cells = true;
                        break;
                    }
                }
            }
            size_t i = nc;
            more_consts = false;
            while (i > 0) {
                --i;
                if (m.const_vals[i] + 1 < k) {
                    ++m.const_vals[i];
                    std::fill(m.const_vals.begin() + i + 1, m.const_vals.end(), 0);
                    more_consts = true;
                    break;
                }
            }
        }
    }
    return out;
}

}  // namespace homlog
