// Command-line front door: parsing, model checking, homomorphism search,
// bounded satisfiability, the sentence constructions, and the decision
// workflows (homclosure membership, homclosedness, characterization
// checking, TGD certificates, tilings, the 3SAT gadget).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "homlog/bounded.hpp"
#include "homlog/capture.hpp"
#include "homlog/cli_core.hpp"
#include "homlog/fragments.hpp"
#include "homlog/hom.hpp"
#include "homlog/parser.hpp"
#include "homlog/reductions.hpp"
#include "homlog/serialize.hpp"
#include "homlog/tgd.hpp"
#include "homlog/transforms.hpp"

#include <json.hpp>

using namespace homlog;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw HomlogError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Problem {
    Signature sig;
    FormulaPtr formula;
};

Problem load_problem(const std::string& path) {
    auto [sig, f] = parse_problem(slurp(path));
    return {std::move(sig), std::move(f)};
}

int emit_result(const CmdResult& r, bool as_json) {
    if (as_json)
        std::cout << r.json << "\n";
    else
        std::cout << r.verdict << ": " << r.detail << "\n";
    return r.exit_code;
}

int run(int argc, char** argv) {
    CLI::App app{"finite-model toolkit for homomorphism closures"};
    app.require_subcommand(1);

    bool as_json = false;
    app.add_flag("--json", as_json, "emit canonical JSON");

    auto* parse_cmd = app.add_subcommand("parse", "parse and reprint a sentence file");
    std::string parse_file;
    parse_cmd->add_option("file", parse_file)->required();

    auto* check_cmd = app.add_subcommand("check", "validate and classify a sentence file");
    std::string check_file;
    check_cmd->add_option("file", check_file)->required();

    auto* hom_cmd = app.add_subcommand("hom", "find a homomorphism between two structures");
    std::string hom_sig, hom_a, hom_b;
    bool hom_inj = false, hom_sur = false, hom_strong = false;
    hom_cmd->add_option("--sig", hom_sig, "sentence file providing the signature")->required();
    hom_cmd->add_option("source", hom_a)->required();
    hom_cmd->add_option("target", hom_b)->required();
    hom_cmd->add_flag("--injective", hom_inj);
    hom_cmd->add_flag("--surjective", hom_sur);
    hom_cmd->add_flag("--strong", hom_strong);

    auto* sat_cmd = app.add_subcommand("sat", "bounded model search");
    std::string sat_file;
    int sat_max = 3;
    std::uint64_t budget = 10'000'000;
    sat_cmd->add_option("file", sat_file)->required();
    sat_cmd->add_option("--max-size", sat_max);
    sat_cmd->add_option("--budget", budget);

    auto* emit_cmd = app.add_subcommand("emit", "print a sentence construction");
    std::string emit_file, emit_op = "relativize";
    int emit_n = 2;
    std::string emit_target;
    emit_cmd->add_option("file", emit_file)->required();
    emit_cmd
        ->add_option("--op", emit_op,
                     "relativize|trn|coloring-int|coloring-ext|spoiler-inj|spoiler-ss|"
                     "spoiler-merge|spoiler-arb|spoiler-fin|sup|shom|esofin|eafo|nnf")
        ->required();
    emit_cmd->add_option("--n", emit_n, "n for trn");
    emit_cmd->add_option("--target", emit_target, "structure file for colorings");

    auto* in_cmd = app.add_subcommand("inhomcl", "homclosure membership at a bound");
    std::string in_phi, in_a;
    int in_bound = 3;
    bool in_verify = false;
    in_cmd->add_option("phi", in_phi)->required();
    in_cmd->add_option("structure", in_a)->required();
    in_cmd->add_option("--max-size", in_bound);
    in_cmd->add_option("--budget", budget);
    in_cmd->add_flag("--verify", in_verify);

    auto* hc_cmd = app.add_subcommand("homclosed", "homclosedness check");
    std::string hc_phi, hc_engine = "spoiler";
    int hc_bound = 3;
    bool hc_verify = false;
    hc_cmd->add_option("phi", hc_phi)->required();
    hc_cmd->add_option("--engine", hc_engine, "spoiler|tgd|search");
    hc_cmd->add_option("--max-size", hc_bound);
    hc_cmd->add_option("--budget", budget);
    hc_cmd->add_flag("--verify", hc_verify);

    auto* tgd_cmd = app.add_subcommand("tgd-homclosed", "exact TGD homclosedness with certificate");
    std::string tgd_phi;
    bool tgd_verify = false;
    tgd_cmd->add_option("phi", tgd_phi)->required();
    tgd_cmd->add_flag("--verify", tgd_verify);

    auto* cc_cmd = app.add_subcommand("charcheck", "characterization workflow at a bound");
    std::string cc_phi, cc_psi;
    int cc_bound = 3;
    cc_cmd->add_option("phi", cc_phi)->required();
    cc_cmd->add_option("psi", cc_psi)->required();
    cc_cmd->add_option("--max-size", cc_bound);
    cc_cmd->add_option("--budget", budget);

    auto* cap_cmd =
        app.add_subcommand("capture", "homcapture sentence of a guarded/two-variable sentence");
    std::string cap_phi, cap_frag = "gfo";
    int cap_bound = 3;
    bool cap_lfp = false;
    cap_cmd->add_option("phi", cap_phi)->required();
    cap_cmd->add_option("--fragment", cap_frag, "gfo|tgf|fo2");
    cap_cmd->add_option("--bound", cap_bound);
    cap_cmd->add_option("--budget", budget);
    cap_cmd->add_flag("--lfp", cap_lfp, "emit the least-fixed-point characterization instead");

    auto* til_cmd = app.add_subcommand("tiling", "domino system workflows");
    std::string til_mode, til_file;
    int til_k = 4;
    til_cmd->add_option("mode", til_mode, "check|solve|sentence|periodic")->required();
    til_cmd->add_option("file", til_file)->required();
    til_cmd->add_option("--k", til_k);

    auto* sat3_cmd = app.add_subcommand("reduce-3sat", "emit the 3SAT gadget");
    std::string sat3_file;
    sat3_cmd->add_option("clauses", sat3_file, "lines of three integers, negation by sign")
        ->required();

    CLI11_PARSE(app, argc, argv);
    EvalLimits lim;
    lim.candidate_budget = budget;

    if (*parse_cmd) {
        Problem p = load_problem(parse_file);
        std::cout << p.sig.to_text() << "\n" << to_text(p.formula) << "\n";
        return 0;
    }
    if (*check_cmd) {
        Problem p = load_problem(check_file);
        FragmentReport r = classify(p.formula, p.sig);
        nlohmann::json j;
        j["cq"] = r.cq;
        j["constant_free"] = r.constant_free;
        j["dtgd"] = r.dtgd;
        j["equality_free"] = r.equality_free;
        j["ex_pos"] = r.ex_pos;
        j["fo2"] = r.fo2;
        j["fo2_eq"] = r.fo2_eq;
        j["gfo_eq"] = r.gfo_eq;
        j["gnfo_eq"] = r.gnfo_eq;
        j["mdtgd"] = r.mdtgd;
        j["prefix"] = r.prefix;
        j["tgd"] = r.tgd;
        j["tgf"] = r.tgf;
        j["ucq"] = r.ucq;
        std::cout << j.dump() << "\n";
        return 0;
    }
    if (*hom_cmd) {
        Problem p = load_problem(hom_sig);
        Structure a = structure_from_json(slurp(hom_a), p.sig);
        Structure b = structure_from_json(slurp(hom_b), p.sig);
        auto h = find_hom(a, b, HomConstraint{hom_inj, hom_sur, hom_strong});
        if (!h) {
            std::cout << "no\n";
            return 1;
        }
        std::cout << hom_to_json(*h) << "\n";
        return 0;
    }
    if (*sat_cmd) {
        Problem p = load_problem(sat_file);
        auto m = bounded_sat(p.formula, p.sig, sat_max, lim);
        if (!m) {
            std::cout << "no-at-bound\n";
            return 1;
        }
        std::cout << structure_to_json(*m) << "\n";
        return 0;
    }
    if (*emit_cmd) {
        Problem p = load_problem(emit_file);
        FormulaPtr out;
        if (emit_op == "relativize")
            out = relativize(p.formula, kSpoilerU, p.sig);
        else if (emit_op == "trn")
            out = tr_n(p.formula, emit_n);
        else if (emit_op == "nnf")
            out = nnf(p.formula);
        else if (emit_op == "coloring-int" || emit_op == "coloring-ext") {
            Structure a = structure_from_json(slurp(emit_target), p.sig);
            out = coloring(p.formula, a,
                           emit_op == "coloring-int" ? ColoringMode::Int : ColoringMode::Ext);
        } else if (emit_op == "spoiler-inj")
            out = spoiler_formula(p.formula, p.sig, SpoilerKind::Injective).formula;
        else if (emit_op == "spoiler-ss")
            out = spoiler_formula(p.formula, p.sig, SpoilerKind::StrongSurjective).formula;
        else if (emit_op == "spoiler-merge")
            out = spoiler_formula(p.formula, p.sig, SpoilerKind::Monomerge).formula;
        else if (emit_op == "spoiler-arb")
            out = spoiler_formula(p.formula, p.sig, SpoilerKind::CombinedArb).formula;
        else if (emit_op == "spoiler-fin")
            out = spoiler_formula(p.formula, p.sig, SpoilerKind::CombinedFin).formula;
        else if (emit_op == "sup")
            out = so_sup(p.formula, p.sig).formula;
        else if (emit_op == "shom")
            out = so_shom(p.formula, p.sig).formula;
        else if (emit_op == "esofin")
            out = eso_fin_wrap(p.formula, p.sig, kSpoilerU).formula;
        else if (emit_op == "eafo")
            out = eafo_homclosure(p.formula, p.sig, lim);
        else
            throw HomlogError("unknown emit op: " + emit_op);
        std::cout << to_text(out) << "\n";
        return 0;
    }
    if (*in_cmd) {
        Problem p = load_problem(in_phi);
        Structure a = structure_from_json(slurp(in_a), p.sig);
        return emit_result(cmd_inhomcl(p.formula, p.sig, a, in_bound, lim, in_verify), as_json);
    }
    if (*hc_cmd) {
        Problem p = load_problem(hc_phi);
        HomclosedEngine engine = hc_engine == "tgd"      ? HomclosedEngine::Tgd
                                 : hc_engine == "search" ? HomclosedEngine::Search
                                                         : HomclosedEngine::Spoiler;
        return emit_result(cmd_homclosed(p.formula, p.sig, hc_bound, engine, lim, hc_verify),
                           as_json);
    }
    if (*tgd_cmd) {
        Problem p = load_problem(tgd_phi);
        return emit_result(
            cmd_homclosed(p.formula, p.sig, 3, HomclosedEngine::Tgd, lim, tgd_verify), as_json);
    }
    if (*cc_cmd) {
        Problem p = load_problem(cc_phi);
        Problem q = load_problem(cc_psi);
        if (!(p.sig == q.sig)) throw HomlogError("charcheck inputs must share a signature");
        return emit_result(cmd_charcheck(p.formula, q.formula, p.sig, cc_bound, lim), as_json);
    }
    if (*cap_cmd) {
        Problem p = load_problem(cap_phi);
        CaptureFragment frag = cap_frag == "tgf"   ? CaptureFragment::Tgf
                               : cap_frag == "fo2" ? CaptureFragment::Fo2
                                                   : CaptureFragment::Gfo;
        CaptureArtifact art = build_capture(p.formula, p.sig, frag, cap_bound, lim);
        if (cap_lfp)
            std::cout << to_text(lfp_translate_from(art)) << "\n";
        else
            std::cout << to_text(art.psi) << "\n";
        return 0;
    }
    if (*til_cmd) {
        DominoSystem d = domino_from_json(slurp(til_file));
        if (til_mode == "check") {
            auto rep = check_deterministic(d);
            if (rep.deterministic) {
                std::cout << "deterministic\n";
                return 0;
            }
            std::cout << "not-deterministic: " << rep.violation << "\n";
            return 1;
        }
        if (til_mode == "solve") {
            auto t = bounded_tiling(d, til_k);
            if (!t) {
                std::cout << "no\n";
                return 1;
            }
            for (auto row = t->rbegin(); row != t->rend(); ++row) {
                for (size_t i = 0; i < row->size(); ++i)
                    std::cout << (i ? " " : "") << (*row)[i];
                std::cout << "\n";
            }
            return 0;
        }
        if (til_mode == "periodic") {
            auto t = periodic_tiling(d);
            if (!t) {
                std::cout << "no\n";
                return 1;
            }
            std::cout << "k_init=" << t->spec.k_init << " k_period=" << t->spec.k_period
                      << " l_init=" << t->spec.l_init << " l_period=" << t->spec.l_period << "\n";
            return 0;
        }
        if (til_mode == "sentence") {
            Signature sig;
            FormulaPtr phi = tiling_sentence(d, &sig);
            std::cout << sig.to_text() << "\n" << to_text(phi) << "\n";
            return 0;
        }
        throw HomlogError("unknown tiling mode: " + til_mode);
    }
    if (*sat3_cmd) {
        std::istringstream in(slurp(sat3_file));
        std::vector<Sat3Clause> clauses;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            Sat3Clause cl;
            for (int i = 0; i < 3; ++i) {
                int lit;
                if (!(ls >> lit)) throw HomlogError("clause lines need three literals");
                cl[i] = Sat3Literal{std::abs(lit), lit > 0};
            }
            clauses.push_back(cl);
        }
        Sat3Gadget g = sat3_gadget(clauses);
        std::cout << g.sig.to_text() << "\n"
                  << to_text(g.phi) << "\n"
                  << structure_to_json(g.a_s) << "\n";
        return 0;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
