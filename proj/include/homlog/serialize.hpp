#pragma once

#include <string>

#include "homlog/structure.hpp"

namespace homlog {

struct Hom;          // hom.hpp
struct DominoSystem; // reductions.hpp

// Canonical one-line JSON: sorted keys, sorted tuples; reading back what was
// written reproduces the input bit-exactly.
std::string structure_to_json(const Structure& s);

// Reads a structure; the signature fixes predicate arities (relations absent
// from the record are empty).
Structure structure_from_json(const std::string& text, const Signature& sig);

std::string hom_to_json(const Hom& h);

std::string domino_to_json(const DominoSystem& d);
DominoSystem domino_from_json(const std::string& text);

}  // namespace homlog
