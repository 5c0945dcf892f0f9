#include "kr/certificate.hpp"

namespace kr {

std::string relation_symbol(Relation r) {
    switch (r) {
        case Relation::LessEqual: return "<=";
        case Relation::GreaterEqual: return ">=";
        case Relation::Equal: return "==";
    }
    return "?";
}

Certificate certify(std::string name, LatticeElement lhs, Relation relation, LatticeElement rhs) {
    bool holds = false;
    switch (relation) {
        case Relation::LessEqual: holds = leq(lhs, rhs); break;
        case Relation::GreaterEqual: holds = leq(rhs, lhs); break;
        case Relation::Equal: holds = lhs == rhs; break;
    }
    return Certificate{std::move(name), std::move(lhs), relation, std::move(rhs), holds};
}

}  // namespace kr
