#pragma once

#include "doctest.h"
#include "kr/lattice.hpp"

namespace doctest {

template <>
struct StringMaker<kr::LatticeElement> {
    static String convert(const kr::LatticeElement& f) { return f.str().c_str(); }
};

template <>
struct StringMaker<kr::Component> {
    static String convert(const kr::Component& c) { return c.str().c_str(); }
};

template <>
struct StringMaker<kr::Rational> {
    static String convert(const kr::Rational& r) { return r.str().c_str(); }
};

}  // namespace doctest
