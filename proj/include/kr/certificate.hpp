#pragma once

#include <string>

#include "kr/lattice.hpp"

namespace kr {

enum class Relation { LessEqual, GreaterEqual, Equal };

std::string relation_symbol(Relation r);

/// A pointwise (in)equality between two lattice elements, with both sides
/// kept verbatim so reports can be audited without re-running.
struct Certificate {
    std::string name;
    LatticeElement lhs;
    Relation relation = Relation::LessEqual;
    LatticeElement rhs;
    bool holds = false;
};

/// Evaluates lhs `relation` rhs exactly.
Certificate certify(std::string name, LatticeElement lhs, Relation relation, LatticeElement rhs);

}  // namespace kr
