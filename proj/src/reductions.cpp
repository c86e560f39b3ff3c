#include "homlog/reductions.hpp"

#include <algorithm>
#include <functional>

#include "homlog/parser.hpp"

namespace homlog {

void DominoSystem::check_valid() const {
    std::set<std::string> seen(tiles.begin(), tiles.end());
    if (seen.size() != tiles.size()) throw HomlogError("duplicate tiles");
    auto known = [&](const std::string& t) { return seen.count(t) != 0; };
    for (const auto& t : bottom)
        if (!known(t)) throw HomlogError("B mentions unknown tile " + t);
    for (const auto& t : left)
        if (!known(t)) throw HomlogError("L mentions unknown tile " + t);
    for (const auto& [x, y] : horizontal)
        if (!known(x) || !known(y)) throw HomlogError("H mentions unknown tile");
    for (const auto& [x, y] : vertical)
        if (!known(x) || !known(y)) throw HomlogError("V mentions unknown tile");
}

std::set<std::string> DominoSystem::h_succ(const std::string& d) const {
    std::set<std::string> out;
    for (const auto& [x, y] : horizontal)
        if (x == d) out.insert(y);
    return out;
}

std::set<std::string> DominoSystem::v_succ(const std::string& d) const {
    std::set<std::string> out;
    for (const auto& [x, y] : vertical)
        if (x == d) out.insert(y);
    return out;
}

std::set<std::string> DominoSystem::seeds() const {
    std::set<std::string> out;
    for (const auto& t : bottom)
        if (left.count(t)) out.insert(t);
    return out;
}

DominoSystem DominoSystem::margin_relaxed() const {
    DominoSystem out = *this;
    out.bottom = std::set<std::string>(tiles.begin(), tiles.end());
    out.left = out.bottom;
    return out;
}

DeterminismReport check_deterministic(const DominoSystem& d) {
    d.check_valid();
    if (d.seeds().size() > 1) return {false, "more than one seed domino"};
    for (const auto& t : d.bottom) {
        auto succ = d.h_succ(t);
        if (succ.size() > 1)
            return {false, "bottom tile " + t + " has several horizontal successors"};
        if (succ.size() == 1 && !d.bottom.count(*succ.begin()))
            return {false, "horizontal successor of bottom tile " + t + " leaves B"};
    }
    for (const auto& t : d.left) {
        auto succ = d.v_succ(t);
        if (succ.size() > 1) return {false, "left tile " + t + " has several vertical successors"};
        if (succ.size() == 1 && !d.left.count(*succ.begin()))
            return {false, "vertical successor of left tile " + t + " leaves L"};
    }
    for (const auto& d1 : d.tiles)
        for (const auto& d2 : d.tiles) {
            auto h = d.h_succ(d1);
            auto v = d.v_succ(d2);
            std::vector<std::string> common;
            std::set_intersection(h.begin(), h.end(), v.begin(), v.end(),
                                  std::back_inserter(common));
            if (common.size() > 1)
                return {false, "tiles " + d1 + "," + d2 + " admit several diagonal completions"};
        }
    return {};
}

Signature grid_signature() {
    Signature s;
    s.add_predicate("H", 2);
    s.add_predicate("V", 2);
    return s;
}

FormulaPtr grid_sentence() {
    Signature sig = grid_signature();
    return parse_sentence(
        "(forall x exists y. H(x,y)) & (forall x exists y. V(x,y)) & "
        "(forall x y z v. (H(x,y) & V(x,z) & V(y,v) -> H(z,v)))",
        sig);
}

Structure grid_fragment(int k) {
    if (k < 1) throw HomlogError("grid_fragment needs k >= 1");
    Structure s = make_structure(grid_signature(), k * k);
    auto id = [&](int x, int y) { return x + k * y; };
    for (int y = 0; y < k; ++y)
        for (int x = 0; x < k; ++x) {
            if (x + 1 < k) s.relations["H"].insert({id(x, y), id(x + 1, y)});
            if (y + 1 < k) s.relations["V"].insert({id(x, y), id(x, y + 1)});
        }
    return s;
}

Structure domino_structure(const DominoSystem& d) {
    d.check_valid();
    Structure s;
    s.sig = grid_signature();
    std::map<std::string, int> id;
    for (const auto& t : d.tiles) {
        id[t] = (int)s.domain.size();
        s.domain.push_back((int)s.domain.size());
    }
    s.relations["H"];
    s.relations["V"];
    for (const auto& [x, y] : d.horizontal) s.relations["H"].insert({id[x], id[y]});
    for (const auto& [x, y] : d.vertical) s.relations["V"].insert({id[x], id[y]});
    return s;
}

std::string tile_pred_name(const std::string& tile) { return "T_" + tile; }
std::string empty_tile_pred_name() { return "TEmpty"; }

namespace {

// T_{S}(v) for a set S of at most one tile; the empty set maps to TEmpty.
FormulaPtr tile_set_atom(const std::set<std::string>& s, const Term& v) {
    if (s.empty()) return atom(empty_tile_pred_name(), {v});
    if (s.size() == 1) return atom(tile_pred_name(*s.begin()), {v});
    throw HomlogError("tile-set predicates exist only for the empty set and singletons; "
                      "the system must be deterministic");
}

Signature tiling_signature(const DominoSystem& d) {
    Signature sig = grid_signature();
    sig.add_predicate(empty_tile_pred_name(), 1);
    for (const auto& t : d.tiles) sig.add_predicate(tile_pred_name(t), 1);
    return sig;
}

}  // namespace

FormulaPtr tiling_sentence(const DominoSystem& d, Signature* sig_out) {
    auto det = check_deterministic(d);
    if (!det.deterministic)
        throw HomlogError("tiling_sentence requires a deterministic system: " + det.violation);
    Signature sig = tiling_signature(d);
    if (sig_out) *sig_out = sig;

    Term x = Term::var("x"), y = Term::var("y"), z = Term::var("z");
    std::vector<FormulaPtr> rules;
    rules.push_back(exists("v", tile_set_atom(d.seeds(), Term::var("v"))));
    for (const auto& t : d.left)
        rules.push_back(forall_many(
            {"x", "y"}, implies(land({atom(tile_pred_name(t), {x}), atom("V", {x, y})}),
                                tile_set_atom(d.v_succ(t), y))));
    for (const auto& t : d.bottom)
        rules.push_back(forall_many(
            {"x", "y"}, implies(land({atom(tile_pred_name(t), {x}), atom("H", {x, y})}),
                                tile_set_atom(d.h_succ(t), y))));
    for (const auto& d1 : d.tiles)
        for (const auto& d2 : d.tiles) {
            auto h = d.h_succ(d1);
            auto vs = d.v_succ(d2);
            std::set<std::string> common;
            std::set_intersection(h.begin(), h.end(), vs.begin(), vs.end(),
                                  std::inserter(common, common.begin()));
            rules.push_back(forall_many(
                {"x", "y", "z"},
                implies(land({atom(tile_pred_name(d1), {x}), atom("H", {x, z}),
                              atom(tile_pred_name(d2), {y}), atom("V", {y, z})}),
                        tile_set_atom(common, z))));
        }
    for (const auto& d1 : d.tiles)
        for (const auto& d2 : d.tiles)
            if (d1 != d2)
                rules.push_back(
                    forall("x", implies(land({atom(tile_pred_name(d1), {x}),
                                              atom(tile_pred_name(d2), {x})}),
                                        atom(empty_tile_pred_name(), {x}))));
    std::vector<FormulaPtr> all{grid_sentence()};
    all.insert(all.end(), rules.begin(), rules.end());
    return land(std::move(all));
}

FormulaPtr mdtgd_variant(const DominoSystem& d, Signature* sig_out) {
    FormulaPtr phi = tiling_sentence(d, sig_out);
    return lor({phi, exists("x", atom(empty_tile_pred_name(), {Term::var("x")}))});
}

std::optional<std::vector<std::vector<std::string>>> bounded_tiling(const DominoSystem& d, int k) {
    if (k < 1) throw HomlogError("bounded_tiling needs k >= 1");
    d.check_valid();
    std::vector<std::vector<std::string>> grid(k, std::vector<std::string>(k));
    // Row-major fill from the bottom row, respecting margins and H/V.
    std::function<bool(int)> fill = [&](int pos) -> bool {
        if (pos == k * k) return true;
        int row = pos / k, col = pos % k;
        for (const auto& t : d.tiles) {
            if (col == 0 && !d.left.count(t)) continue;
            if (row == 0 && !d.bottom.count(t)) continue;
            if (col > 0 && !d.horizontal.count({grid[row][col - 1], t})) continue;
            if (row > 0 && !d.vertical.count({grid[row - 1][col], t})) continue;
            grid[row][col] = t;
            if (fill(pos + 1)) return true;
        }
        return false;
    };
    if (!fill(0)) return std::nullopt;
    return grid;
}

namespace {

// Tiles the wrap-around fragment: column w-1 H-continues into column k_init,
// row h-1 V-continues into row l_init.
std::optional<std::vector<std::vector<std::string>>> wrap_tiling(const DominoSystem& d,
                                                                 const PeriodicTilingSpec& spec) {
    int w = spec.k_init + spec.k_period;
    int h = spec.l_init + spec.l_period;
    std::vector<std::vector<std::string>> grid(h, std::vector<std::string>(w));
    std::function<bool(int)> fill = [&](int pos) -> bool {
        if (pos == w * h) return true;
        int row = pos / w, col = pos % w;
        for (const auto& t : d.tiles) {
            if (col == 0 && !d.left.count(t)) continue;
            if (row == 0 && !d.bottom.count(t)) continue;
            if (col > 0 && !d.horizontal.count({grid[row][col - 1], t})) continue;
            if (row > 0 && !d.vertical.count({grid[row - 1][col], t})) continue;
            grid[row][col] = t;
            bool ok = true;
            if (col == w - 1 && !d.horizontal.count({t, grid[row][spec.k_init]})) ok = false;
            if (ok && row == h - 1 && !d.vertical.count({t, grid[spec.l_init][col]})) ok = false;
            if (ok && fill(pos + 1)) return true;
        }
        return false;
    };
    if (!fill(0)) return std::nullopt;
    return grid;
}

}  // namespace

std::optional<PeriodicTiling> periodic_tiling(const DominoSystem& d, int max_init,
                                              int max_period) {
    d.check_valid();
    // Smallest fragments first.
    for (int total = 2; total <= 2 * (max_init + max_period); ++total)
        for (int ki = 0; ki <= max_init; ++ki)
            for (int kp = 1; kp <= max_period; ++kp)
                for (int li = 0; li <= max_init; ++li)
                    for (int lp = 1; lp <= max_period; ++lp) {
                        if (ki + kp + li + lp != total) continue;
                        PeriodicTilingSpec spec{ki, kp, li, lp};
                        auto grid = wrap_tiling(d, spec);
                        if (grid) return PeriodicTiling{*grid, spec};
                    }
    return std::nullopt;
}

Structure wrap_structure(const PeriodicTilingSpec& spec) {
    int w = spec.k_init + spec.k_period;
    int h = spec.l_init + spec.l_period;
    Structure s = make_structure(grid_signature(), w * h);
    auto id = [&](int x, int y) { return x + w * y; };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int hx = x + 1 < w ? x + 1 : spec.k_init;
            int vy = y + 1 < h ? y + 1 : spec.l_init;
            s.relations["H"].insert({id(x, y), id(hx, y)});
            s.relations["V"].insert({id(x, y), id(x, vy)});
        }
    return s;
}

Sat3Gadget sat3_gadget(const std::vector<Sat3Clause>& clauses) {
    int n = (int)clauses.size();
    int m = 0;
    for (const auto& cl : clauses)
        for (const auto& lit : cl) {
            if (lit.var < 1) throw HomlogError("3SAT variables are numbered from 1");
            m = std::max(m, lit.var);
        }

    Signature sig;
    sig.add_predicate("CLst", 1);
    sig.add_predicate("Cmp", 2);
    sig.add_predicate("First", 1);
    sig.add_predicate("Lit", 2);
    sig.add_predicate("Next", 2);
    sig.add_predicate("Nil", 1);
    sig.add_predicate("Sel", 1);

    // elements: a_1..a_{n+1}, then b_i, b'_i interleaved per variable
    Structure a = make_structure(sig, (n + 1) + 2 * m);
    auto ai = [&](int i) { return i - 1; };
    auto bi = [&](int i) { return (n + 1) + 2 * (i - 1); };
    auto bni = [&](int i) { return (n + 1) + 2 * (i - 1) + 1; };

    a.relations["First"].insert({ai(1)});
    for (int i = 1; i <= n; ++i) a.relations["CLst"].insert({ai(i)});
    a.relations["Nil"].insert({ai(n + 1)});
    for (int i = 1; i <= n; ++i) a.relations["Next"].insert({ai(i), ai(i + 1)});
    for (int i = 1; i <= n; ++i)
        for (const auto& lit : clauses[i - 1])
            a.relations["Lit"].insert({ai(i), lit.positive ? bi(lit.var) : bni(lit.var)});
    for (int i = 1; i <= m; ++i) {
        a.relations["Sel"].insert({bi(i)});
        a.relations["Sel"].insert({bni(i)});
    }
    // every selector pair is compatible except opposite literals of a variable
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j) {
            a.relations["Cmp"].insert({bi(i), bi(j)});
            a.relations["Cmp"].insert({bni(i), bni(j)});
            if (i != j) {
                a.relations["Cmp"].insert({bi(i), bni(j)});
                a.relations["Cmp"].insert({bni(i), bi(j)});
            }
        }

    FormulaPtr phi = parse_sentence(
        "(exists x. First(x)) & "
        "(forall x. (First(x) -> CLst(x))) & "
        "(forall x. (CLst(x) -> exists y. (Next(x,y) & (CLst(y) | Nil(y))))) & "
        "(forall x. (CLst(x) -> exists y. (Lit(x,y) & Sel(y)))) & "
        "(forall x y. (Sel(x) & Sel(y) -> Cmp(x,y)))",
        sig);
    return Sat3Gadget{std::move(a), phi, sig};
}

}  // namespace homlog
