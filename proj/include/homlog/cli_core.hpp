#pragma once

#include <string>

#include "homlog/eval.hpp"
#include "homlog/structure.hpp"

namespace homlog {

// Exit codes: 0 yes, 1 no / no-at-bound, 2 error. Bound-limited negatives are
// labeled "no-at-bound" (and the bound-limited positive of homclosedness
// "homclosed-at-bound"); only the exact TGD engine says plain yes/no.
struct CmdResult {
    int exit_code = 2;
    std::string verdict;
    std::string detail;  // human-readable lines
    std::string json;    // canonical one-line JSON payload
};

enum class HomclosedEngine { Spoiler, Tgd, Search };

// Is A in the homclosure of phi's bounded models? Runs bounded_sat on the
// intrinsic coloring; a YES decodes the witness model and the label
// homomorphism and revalidates both.
CmdResult cmd_inhomcl(const FormulaPtr& phi, const Signature& sig, const Structure& a, int bound,
                      const EvalLimits& lim = {}, bool verify = false);

// Homclosedness of phi. The spoiler engine searches bounded models of the
// finite-spoiler sentence and decodes witnesses; the tgd engine is exact; the
// search engine scans model/non-model pairs exhaustively up to the bound.
CmdResult cmd_homclosed(const FormulaPtr& phi, const Signature& sig, int bound,
                        HomclosedEngine engine, const EvalLimits& lim = {}, bool verify = false);

// The three bound-limited checks of the characterization workflow:
// (1) phi entails psi, (2) psi is homclosed, (3) every bounded model of psi
// has a homomorphic origin among phi's bounded models.
CmdResult cmd_charcheck(const FormulaPtr& phi, const FormulaPtr& psi, const Signature& sig,
                        int bound, const EvalLimits& lim = {});

}  // namespace homlog
