#include <doctest.h>

#include "homlog/eval.hpp"
#include "homlog/fragments.hpp"
#include "homlog/parser.hpp"

using namespace homlog;

namespace {

Signature qp_sig() {
    Signature s;
    s.add_predicate("P", 2);
    s.add_predicate("Q", 1);
    return s;
}

}  // namespace

TEST_CASE("parse basic sentences") {
    Signature sig = qp_sig();
    FormulaPtr inf = parse_sentence("forall x exists y. P(x,y)", sig);
    CHECK(inf->kind == Fk::Forall);
    CHECK(inf->kids[0]->kind == Fk::Exists);
    CHECK(inf->kids[0]->kids[0]->kind == Fk::Atom);

    FormulaPtr t = parse_sentence("true", sig);
    CHECK(t->kind == Fk::True);

    CHECK_THROWS_AS(parse_sentence("exists x. Q(x,x)", sig), HomlogError);
    CHECK_THROWS_AS(parse_sentence("exists x. R(x)", sig), HomlogError);
    CHECK_THROWS_AS(parse_sentence("exists x. P(x", sig), ParseError);
}

TEST_CASE("round trip on a corpus") {
    Signature sig = qp_sig();
    std::vector<std::string> corpus = {
        "forall x exists y. P(x,y)",
        "exists x y. x != y",
        "exists x. (Q(x) & forall y. (P(x,y) | x = y))",
        "!(exists x. Q(x))",
        "forall x. (Q(x) -> exists y. (P(x,y) & !(Q(y))))",
        "existsSO U/1. forall x. (!(Q(x)) | P(x,x))",
        "existsFin W/2. exists x. W(x,x)",
        "lfp { Cds(y) <- forall z. (!(P(y,z)) | Cds(z)) } in Cds(x)",
        "true & false | Q(c)",
    };
    Signature sig_c = sig;
    sig_c.add_constant("c");
    for (const auto& text : corpus) {
        FormulaPtr f = text.find("Cds") != std::string::npos
                           ? [&] {
                                 // the lfp example has a free variable; wrap it
                                 FormulaPtr body = parse_sentence(
                                     "exists x. " + text, sig_c);
                                 return body;
                             }()
                           : parse_sentence(text, sig_c);
        std::string printed = to_text(f);
        FormulaPtr again = parse_sentence(printed, sig_c);
        CHECK_MESSAGE(struct_equal(f, again), "round trip failed for: ", printed);
    }
}

TEST_CASE("nnf examples") {
    Signature sig = qp_sig();
    FormulaPtr a = parse_sentence("!(exists x. (Q(x) & P(x,x)))", sig);
    FormulaPtr n = nnf(a);
    CHECK(to_text(n) == "forall x. (!Q(x) | !P(x,x))");

    FormulaPtr b = parse_sentence("!(forall x. Q(x))", sig);
    CHECK(to_text(nnf(b)) == "exists x. !Q(x)");

    // negated equality stays a leaf
    FormulaPtr c = parse_sentence("exists x y. !(x = y)", sig);
    FormulaPtr nc = nnf(c);
    CHECK(to_text(nc) == "exists x y. x != y");
}

TEST_CASE("quantifier rank") {
    Signature sig = qp_sig();
    CHECK(quantifier_rank(parse_sentence("forall x exists y. P(x,y)", sig)) == 2);
    Signature sigc = sig;
    sigc.add_constant("c");
    CHECK(quantifier_rank(parse_sentence("Q(c)", sigc)) == 0);
    CHECK(quantifier_rank(parse_sentence("exists x. (Q(x) & forall y. Q(y))", sig)) == 2);
}

TEST_CASE("classify flags") {
    Signature sig = qp_sig();
    FormulaPtr inf = parse_sentence("forall x exists y. P(x,y)", sig);
    FragmentReport r = classify(inf, sig);
    CHECK(r.gfo_eq);
    CHECK(r.fo2);
    CHECK(r.fo2_eq);
    CHECK(r.tgd);
    CHECK(r.mdtgd);
    CHECK(r.dtgd);
    CHECK(r.prefix == "AE");
    CHECK(r.equality_free);
    CHECK(!r.ex_pos);

    FormulaPtr cq = parse_sentence("exists x y. (P(x,y) & Q(x))", sig);
    FragmentReport rc = classify(cq, sig);
    CHECK(rc.cq);
    CHECK(rc.ex_pos);
    CHECK(rc.ucq);
    CHECK(rc.tgd);  // empty-body rule

    FormulaPtr neq = parse_sentence("exists x y. x != y", sig);
    FragmentReport rn = classify(neq, sig);
    CHECK(!rn.equality_free);
    CHECK(!rn.ex_pos);
    CHECK(rn.prefix == "EE");
}

TEST_CASE("classify monotone chains on random-ish corpus") {
    Signature sig = qp_sig();
    std::vector<std::string> corpus = {
        "forall x exists y. P(x,y)",
        "exists x. Q(x)",
        "exists x y. (P(x,y) & Q(y))",
        "forall x y. (P(x,y) -> exists z. P(y,z))",
        "(forall x y. (P(x,y) -> P(y,x))) | exists x. Q(x)",
        "false",
        "true",
    };
    for (const auto& text : corpus) {
        FormulaPtr f = parse_sentence(text, sig);
        FragmentReport r = classify(f, sig);
        if (r.cq) CHECK(r.ex_pos);
        if (r.tgd) CHECK(r.mdtgd);
        if (r.mdtgd) CHECK(r.dtgd);
    }
}

TEST_CASE("nnf preserves truth on small structures") {
    Signature sig = qp_sig();
    std::vector<FormulaPtr> corpus = {
        parse_sentence("!(forall x. (Q(x) -> exists y. P(x,y)))", sig),
        parse_sentence("!(exists x y. (P(x,y) & !(x = y)))", sig),
        parse_sentence("forall x. !(Q(x) & !Q(x))", sig),
    };
    for (int n = 1; n <= 2; ++n) {
        int pc = n * n, qc = n;
        for (int pm = 0; pm < (1 << pc); ++pm)
            for (int qm = 0; qm < (1 << qc); ++qm) {
                Structure s;
                s.sig = sig;
                for (int i = 0; i < n; ++i) s.domain.push_back(i);
                s.relations["P"];
                s.relations["Q"];
                for (int c = 0; c < pc; ++c)
                    if ((pm >> c) & 1) s.relations["P"].insert({c / n, c % n});
                for (int c = 0; c < qc; ++c)
                    if ((qm >> c) & 1) s.relations["Q"].insert({c});
                for (const auto& f : corpus) REQUIRE(eval_fo(s, f) == eval_fo(s, nnf(f)));
            }
    }
}

TEST_CASE("validation catches lfp positivity breaches") {
    Signature sig = qp_sig();
    // Cds used negatively inside its own body.
    std::vector<LfpDef> defs{{"Cds", 1, {"y"}, lnot(atom("Cds", {Term::var("y")}))}};
    FormulaPtr bad = exists("x", lfp(defs, "Cds", {Term::var("x")}));
    CHECK_THROWS_AS(validate(bad, sig), HomlogError);
}
