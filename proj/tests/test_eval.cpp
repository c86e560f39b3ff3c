#include <doctest.h>

#include "homlog/bounded.hpp"
#include "homlog/parser.hpp"

using namespace homlog;

namespace {

Signature p2_sig() {
    Signature s;
    s.add_predicate("P", 2);
    return s;
}

Signature qp_sig() {
    Signature s;
    s.add_predicate("P", 2);
    s.add_predicate("Q", 1);
    return s;
}

Structure p_loop() {
    Structure s = make_structure(p2_sig(), 1);
    s.relations["P"].insert({0, 0});
    return s;
}

Structure p_edge() {
    Structure s = make_structure(p2_sig(), 2);
    s.relations["P"].insert({0, 1});
    return s;
}

FormulaPtr phi_inf() {
    static Signature sig = p2_sig();
    return parse_sentence("forall x exists y. P(x,y)", sig);
}

FormulaPtr culdesac() {
    // some element is not a cul-de-sac, i.e. a directed cycle is reachable
    static Signature sig = p2_sig();
    return parse_sentence(
        "exists x. !(lfp { Cds(y) <- forall z. (!P(y,z) | Cds(z)) } in Cds(x))", sig);
}

}  // namespace

TEST_CASE("eval_fo basics") {
    CHECK(eval_fo(p_loop(), phi_inf()));
    CHECK(!eval_fo(p_edge(), phi_inf()));
    Structure loop = p_loop();
    CHECK(eval_fo(loop, canonical_query(loop)));
    CHECK_THROWS_AS(eval_fo(loop, atom("P", {Term::var("x"), Term::var("x")})), HomlogError);
}

TEST_CASE("eval_fo agrees with the naive grounding evaluator") {
    Signature sig = qp_sig();
    std::vector<FormulaPtr> corpus = {
        parse_sentence("forall x exists y. P(x,y)", sig),
        parse_sentence("exists x y. x != y", sig),
        parse_sentence("forall x. (Q(x) -> exists y. (P(x,y) & !Q(y)))", sig),
        parse_sentence("exists x. (Q(x) & forall y. (P(y,x) | y = x))", sig),
        parse_sentence("!(exists x y. (P(x,y) & P(y,x)))", sig),
    };
    for (int n = 1; n <= 2; ++n) {
        int pc = n * n, qc = n;
        for (int pm = 0; pm < (1 << pc); ++pm)
            for (int qm = 0; qm < (1 << qc); ++qm) {
                Structure s = make_structure(sig, n);
                for (int c = 0; c < pc; ++c)
                    if ((pm >> c) & 1) s.relations["P"].insert({c / n, c % n});
                for (int c = 0; c < qc; ++c)
                    if ((qm >> c) & 1) s.relations["Q"].insert({c});
                for (const auto& f : corpus) REQUIRE(eval_fo(s, f) == eval_fo_naive(s, f));
            }
    }
}

TEST_CASE("eval_so") {
    Signature sig = qp_sig();
    Structure s = make_structure(sig, 2);
    s.relations["Q"].insert({0});
    // exists U. forall x. U(x) is true anywhere (take the full relation)
    CHECK(eval_so(s, parse_sentence("existsSO U/1. forall x. U(x)", sig)));
    // forall U. exists x. U(x) fails on the empty choice of U
    CHECK(!eval_so(s, parse_sentence("forallSO U/1. exists x. U(x)", sig)));
    // existsFin behaves as exists on finite structures
    CHECK(eval_so(s, parse_sentence("existsFin U/1. (exists x. (U(x) & Q(x)))", sig)));

    EvalLimits tight;
    tight.so_cell_budget = 2;
    CHECK_THROWS_AS(eval_so(make_structure(sig, 2),
                            parse_sentence("existsSO W/2. exists x. W(x,x)", sig), tight),
                    BudgetExceeded);
}

TEST_CASE("eval_lfp examples") {
    // directed 2-cycle: no element is well-founded -> sentence true
    Structure c2 = make_structure(p2_sig(), 2);
    c2.relations["P"].insert({0, 1});
    c2.relations["P"].insert({1, 0});
    CHECK(eval_lfp(c2, culdesac()));

    // 2-path: all elements become Cds -> sentence false
    CHECK(!eval_lfp(p_edge(), culdesac()));

    // empty fixpoint: body false everywhere
    Signature sig = p2_sig();
    FormulaPtr empty = parse_sentence("exists x. lfp { D(y) <- false } in D(x)", sig);
    CHECK(!eval_lfp(c2, empty));
}

TEST_CASE("lfp fixpoint is a pre-fixpoint and least among probes") {
    Signature sig = p2_sig();
    Structure path = make_structure(p2_sig(), 3);
    path.relations["P"].insert({0, 1});
    path.relations["P"].insert({1, 2});
    FormulaPtr node = parse_sentence(
        "exists x. lfp { Cds(y) <- forall z. (!P(y,z) | Cds(z)) } in Cds(x)", sig);
    // dig out the Lfp node (the un-negated goal is enough to probe the fixpoint)
    FormulaPtr lfp_node = node->kids[0];
    REQUIRE(lfp_node->kind == Fk::Lfp);
    auto fix = lfp_fixpoint(path, lfp_node, {{"x", 0}});
    const auto& cds = fix.at("Cds");
    CHECK(cds.size() == 3);  // every element of a finite DAG is a cul-de-sac

    // pre-fixpoint: applying the body once adds nothing
    for (int e : path.domain) {
        Env env{{"y", e}};
        Structure probe = expand(path, {{"Cds", 1}}, ExpandMode::Empty);
        for (const auto& t : cds) probe.relations["Cds"].insert(t);
        FormulaPtr body = parse_sentence("forall z. (!P(y,z) | Cds(z))", probe.sig);
        bool derivable = eval(probe, body, env);
        CHECK(derivable == (cds.count({e}) != 0));
    }
}

TEST_CASE("lfp leastness under random subset probes") {
    Signature sig = p2_sig();
    Structure mix = make_structure(sig, 3);
    mix.relations["P"].insert({0, 1});
    mix.relations["P"].insert({1, 0});
    mix.relations["P"].insert({1, 2});
    FormulaPtr node = parse_sentence(
        "exists x. lfp { Cds(y) <- forall z. (!P(y,z) | Cds(z)) } in Cds(x)", sig);
    FormulaPtr lfp_node = node->kids[0];
    auto fix = lfp_fixpoint(mix, lfp_node, {{"x", 0}});
    const auto& cds = fix.at("Cds");

    // every pre-fixpoint among all subsets contains the fixpoint
    auto body = parse_sentence("forall z. (!P(y,z) | Cds(z))", [&] {
        Signature s2 = sig;
        s2.add_predicate("Cds", 1);
        return s2;
    }());
    for (int mask = 0; mask < 8; ++mask) {
        Structure probe = expand(mix, {{"Cds", 1}}, ExpandMode::Empty);
        std::set<std::vector<int>> sset;
        for (int e = 0; e < 3; ++e)
            if ((mask >> e) & 1) {
                probe.relations["Cds"].insert({e});
                sset.insert({e});
            }
        bool prefix = true;  // body consequences stay inside the set
        for (int e = 0; e < 3; ++e)
            if (eval_fo(probe, body, {{"y", e}}) && !sset.count({e})) prefix = false;
        if (prefix)
            for (const auto& t : cds) CHECK(sset.count(t) == 1);
    }
}

TEST_CASE("bounded_models basics") {
    Signature sig = p2_sig();
    // exists x y. x != y: empty at size 1, non-empty at size 2
    FormulaPtr neq = parse_sentence("exists x y. x != y", sig);
    CHECK(bounded_models(neq, sig, 1).empty());
    CHECK(!bounded_models(neq, sig, 2).empty());

    // unsat at any bound
    FormulaPtr unsat = parse_sentence("exists x. (P(x,x) & !P(x,x))", sig);
    CHECK(!bounded_sat(unsat, sig, 3).has_value());

    // phi_inf finds the loop at bound 1
    auto m = bounded_sat(phi_inf(), sig, 1);
    REQUIRE(m.has_value());
    CHECK(m->relations.at("P").count({0, 0}) == 1);
}

TEST_CASE("bounded_models matches naive enumeration and is duplicate-free") {
    Signature sig = qp_sig();
    std::vector<FormulaPtr> corpus = {
        parse_sentence("forall x exists y. P(x,y)", sig),
        parse_sentence("exists x y. x != y", sig),
        parse_sentence("exists x. Q(x)", sig),
        parse_sentence("forall x. (Q(x) -> P(x,x))", sig),
        parse_sentence("true", sig),
    };
    for (const auto& f : corpus) {
        auto fast = bounded_models(f, sig, 2);
        auto slow = bounded_models_naive(f, sig, 2);
        REQUIRE(fast.size() == slow.size());
        for (size_t i = 0; i < fast.size(); ++i) REQUIRE(fast[i] == slow[i]);
        std::set<Structure> dedup(fast.begin(), fast.end());
        CHECK(dedup.size() == fast.size());
    }
}

TEST_CASE("bounded search budget errors are explicit") {
    Signature sig = p2_sig();
    EvalLimits tight;
    tight.candidate_budget = 10;
    CHECK_THROWS_AS(bounded_models(parse_sentence("true", sig), sig, 3, tight), BudgetExceeded);
}

TEST_CASE("bounded_models with SO and Lfp sentences") {
    Signature sig = p2_sig();
    // Lfp sentence: cycle-containing structures at size <= 2
    auto models = bounded_models(culdesac(), sig, 2);
    for (const auto& m : models) {
        bool has_cycle = false;
        // size <= 2: cycle iff a loop or a 2-cycle
        for (int i : m.domain) {
            if (m.holds("P", {i, i})) has_cycle = true;
            for (int j : m.domain)
                if (i != j && m.holds("P", {i, j}) && m.holds("P", {j, i})) has_cycle = true;
        }
        CHECK(has_cycle);
    }
    CHECK(!models.empty());
}
