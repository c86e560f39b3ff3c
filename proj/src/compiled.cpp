#include "homlog/compiled.hpp"

#include <algorithm>

namespace homlog {

PackedLayout PackedLayout::make(const Signature& sig, int n) {
    PackedLayout l;
    l.sig = sig;
    l.n = n;
    std::uint64_t offset = 0;
    for (const auto& [p, ar] : sig.predicates()) {
        std::uint64_t cells = 1;
        for (int i = 0; i < ar; ++i) cells *= n;
        l.preds.push_back({p, ar, offset, cells});
        offset += cells;
    }
    l.consts = sig.constants();
    l.total_cells = offset;
    return l;
}

int PackedLayout::pred_index(const std::string& name) const {
    for (size_t i = 0; i < preds.size(); ++i)
        if (preds[i].name == name) return (int)i;
    return -1;
}

std::uint64_t PackedLayout::cell_of(int pred_idx, const int* tuple) const {
    const Pred& p = preds[pred_idx];
    std::uint64_t idx = 0;
    for (int i = 0; i < p.arity; ++i) idx = idx * n + tuple[i];
    return p.offset + idx;
}

PackedModel::PackedModel(const PackedLayout* l)
    : layout(l),
      const_vals(l->consts.size(), 0),
      bits((l->total_cells + 63) / 64, 0),
      known((l->total_cells + 63) / 64, 0) {}

Structure PackedModel::to_structure() const {
    Structure s;
    s.sig = layout->sig;
    for (int i = 0; i < layout->n; ++i) s.domain.push_back(i);
    for (size_t i = 0; i < layout->consts.size(); ++i) s.const_interp[layout->consts[i]] = const_vals[i];
    for (const auto& p : layout->preds) {
        auto& rel = s.relations[p.name];
        std::vector<int> t(p.arity, 0);
        for (std::uint64_t c = 0; c < p.cells; ++c) {
            std::uint64_t rest = c;
            for (int i = p.arity - 1; i >= 0; --i) {
                t[i] = (int)(rest % layout->n);
                rest /= layout->n;
            }
            int v = get(p.offset + c);
            if (v == 2) throw HomlogError("to_structure on a partial model");
            if (v == 1) rel.insert(t);
        }
    }
    return s;
}

// ---------------------------------------------------------------------------

struct CompiledFormula::Node {
    Fk kind;
    int pred = -1;
    std::vector<int> args;  // >= 0 variable slot; < 0 encodes constant index as -1-idx
    int slot = -1;
    std::vector<std::unique_ptr<Node>> kids;
};

namespace {

struct CompileCtx {
    const PackedLayout* layout;
    std::vector<std::pair<std::string, int>> scope;  // var name -> slot
    int max_slots = 0;
};

int lookup_var(CompileCtx& ctx, const std::string& name) {
    for (auto it = ctx.scope.rbegin(); it != ctx.scope.rend(); ++it)
        if (it->first == name) return it->second;
    throw HomlogError("compile: unbound variable " + name);
}

constexpr int kGroundBase = -1'000'000;

int encode_term(CompileCtx& ctx, const Term& t) {
    if (t.is_var()) {
        // pseudo-variables "#k" denote domain element k (grounded prefixes)
        if (!t.name.empty() && t.name[0] == '#')
            return kGroundBase - std::stoi(t.name.substr(1));
        return lookup_var(ctx, t.name);
    }
    auto& cs = ctx.layout->consts;
    auto it = std::lower_bound(cs.begin(), cs.end(), t.name);
    if (it == cs.end() || *it != t.name) throw HomlogError("compile: unknown constant " + t.name);
    return -1 - (int)(it - cs.begin());
}

}  // namespace

bool CompiledFormula::compilable(const FormulaPtr& f) {
    switch (f->kind) {
        case Fk::ExistsSO:
        case Fk::ForallSO:
        case Fk::ExistsFinSO:
        case Fk::Lfp:
            return false;
        default:
            for (const auto& k : f->kids)
                if (!compilable(k)) return false;
            return true;
    }
}

namespace {

std::unique_ptr<CompiledFormula::Node> compile_rec(CompileCtx& ctx, const FormulaPtr& f);

}  // namespace

std::unique_ptr<CompiledFormula> CompiledFormula::compile(const FormulaPtr& f,
                                                          const PackedLayout& layout) {
    if (!compilable(f)) throw HomlogError("formula contains SO/Lfp nodes; cannot compile");
    CompileCtx ctx{&layout, {}, 0};
    auto cf = std::unique_ptr<CompiledFormula>(new CompiledFormula());
    cf->layout_ = &layout;
    cf->root_ = compile_rec(ctx, f);
    cf->slots_.assign(ctx.max_slots, 0);
    if (cf->root_->kind == Fk::And) {
        for (const auto& k : cf->root_->kids) cf->conjuncts_.push_back(k.get());
    } else {
        cf->conjuncts_.push_back(cf->root_.get());
    }
    return cf;
}

namespace {

std::unique_ptr<CompiledFormula::Node> compile_rec(CompileCtx& ctx, const FormulaPtr& f) {
    auto node = std::make_unique<CompiledFormula::Node>();
    node->kind = f->kind;
    switch (f->kind) {
        case Fk::True:
        case Fk::False:
            break;
        case Fk::Atom: {
            node->pred = ctx.layout->pred_index(f->pred);
            if (node->pred < 0) throw HomlogError("compile: unknown predicate " + f->pred);
            for (const auto& t : f->terms) node->args.push_back(encode_term(ctx, t));
            break;
        }
        case Fk::Equals:
            for (const auto& t : f->terms) node->args.push_back(encode_term(ctx, t));
            break;
        case Fk::Exists:
        case Fk::Forall: {
            node->slot = (int)ctx.scope.size();
            ctx.max_slots = std::max(ctx.max_slots, node->slot + 1);
            ctx.scope.emplace_back(f->var, node->slot);
            node->kids.push_back(compile_rec(ctx, f->kids[0]));
            ctx.scope.pop_back();
            break;
        }
        default:
            for (const auto& k : f->kids) node->kids.push_back(compile_rec(ctx, k));
    }
    return node;
}

}  // namespace

int CompiledFormula::eval_node(const Node& node, const PackedModel& m) const {
    switch (node.kind) {
        case Fk::True:
            return 1;
        case Fk::False:
            return 0;
        case Fk::Atom: {
            int tuple[8];
            for (size_t i = 0; i < node.args.size(); ++i) {
                int a = node.args[i];
                if (a >= 0)
                    tuple[i] = slots_[a];
                else if (a <= -1'000'000)
                    tuple[i] = -1'000'000 - a;
                else
                    tuple[i] = m.const_vals[-1 - a];
            }
            std::uint64_t cell = layout_->cell_of(node.pred, tuple);
            int v = m.get(cell);
            if (v == 2 && !have_watched_) {
                watched_cell_ = cell;
                have_watched_ = true;
            }
            return v;
        }
        case Fk::Equals: {
            auto val = [&](int a) {
                if (a >= 0) return slots_[a];
                if (a <= -1'000'000) return -1'000'000 - a;
                return m.const_vals[-1 - a];
            };
            return val(node.args[0]) == val(node.args[1]) ? 1 : 0;
        }
        case Fk::Not: {
            int v = eval_node(*node.kids[0], m);
            return v == 2 ? 2 : 1 - v;
        }
        case Fk::And: {
            bool unknown = false;
            for (const auto& k : node.kids) {
                int v = eval_node(*k, m);
                if (v == 0) return 0;
                if (v == 2) unknown = true;
            }
            return unknown ? 2 : 1;
        }
        case Fk::Or: {
            bool unknown = false;
            for (const auto& k : node.kids) {
                int v = eval_node(*k, m);
                if (v == 1) return 1;
                if (v == 2) unknown = true;
            }
            return unknown ? 2 : 0;
        }
        case Fk::Exists:
        case Fk::Forall: {
            bool want = node.kind == Fk::Exists;
            bool unknown = false;
            for (int e = 0; e < layout_->n; ++e) {
                slots_[node.slot] = e;
                int v = eval_node(*node.kids[0], m);
                if (v == (want ? 1 : 0)) return want ? 1 : 0;
                if (v == 2) unknown = true;
            }
            return unknown ? 2 : (want ? 0 : 1);
        }
        default:
            throw HomlogError("compiled eval reached an unsupported node");
    }
}

CompiledFormula::~CompiledFormula() = default;

int CompiledFormula::tri_eval(const PackedModel& m) const { return eval_node(*root_, m); }

size_t CompiledFormula::conjunct_count() const { return conjuncts_.size(); }

int CompiledFormula::tri_eval_conjunct(const PackedModel& m, size_t idx,
                                        std::uint64_t* unknown_cell) const {
    have_watched_ = false;
    int v = eval_node(*conjuncts_[idx], m);
    if (unknown_cell && v == 2 && have_watched_) *unknown_cell = watched_cell_;
    return v;
}

}  // namespace homlog
