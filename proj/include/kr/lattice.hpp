#pragma once

/**
 * @file lattice.hpp
 * @brief The Riesz space of rational functions on a finite ground set.
 *
 * Omega = {0, ..., N-1}. A LatticeElement is a function Omega -> Q ordered
 * pointwise; the weak order unit e is the constant 1. A Component is a
 * {0,1}-valued element, stored as a subset of Omega. Band projection onto a
 * component is multiplication by its indicator.
 *
 * Both types are immutable values: every operation returns a new value.
 */

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "kr/rational.hpp"

namespace kr {

class LatticeElement;

/// A subset of Omega; the component chi_A of e.
class Component {
public:
    Component() = default;

    static Component none(std::size_t size);
    static Component full(std::size_t size);
    static Component of(std::size_t size, std::span<const std::size_t> members);
    static Component of(std::size_t size, std::initializer_list<std::size_t> members);
    /// Bit i of mask is membership of i. Requires size <= 64.
    static Component from_mask(std::size_t size, std::uint64_t mask);

    std::size_t size() const { return size_; }
    bool contains(std::size_t i) const;
    std::size_t count() const;
    bool empty() const;
    std::vector<std::size_t> members() const;
    /// Smallest member; requires !empty().
    std::size_t first() const;
    /// Requires size() <= 64.
    std::uint64_t mask() const;

    Component meet(const Component& other) const;
    Component join(const Component& other) const;
    Component minus(const Component& other) const;
    /// Omega minus this, i.e. e - p.
    Component complement() const;
    /// Copy with one extra member.
    Component with(std::size_t i) const;

    bool disjoint_from(const Component& other) const;
    bool subset_of(const Component& other) const;

    LatticeElement indicator() const;

    /// "[0,4]"
    std::string str() const;

    friend bool operator==(const Component&, const Component&) = default;

private:
    Component(std::size_t size, std::vector<std::uint64_t> words);
    void check_same(const Component& other) const;

    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

/// A function Omega -> Q.
class LatticeElement {
public:
    LatticeElement() = default;
    explicit LatticeElement(std::vector<Rational> values);
    LatticeElement(std::initializer_list<Rational> values);

    static LatticeElement zero(std::size_t size);
    /// The weak order unit e.
    static LatticeElement unit(std::size_t size);
    static LatticeElement constant(std::size_t size, const Rational& value);

    std::size_t size() const { return values_.size(); }
    const Rational& operator[](std::size_t i) const { return values_[i]; }
    std::span<const Rational> values() const { return values_; }

    LatticeElement operator-() const;
    friend LatticeElement operator+(const LatticeElement& a, const LatticeElement& b);
    friend LatticeElement operator-(const LatticeElement& a, const LatticeElement& b);
    friend LatticeElement operator*(const Rational& s, const LatticeElement& f);
    /// Pointwise product (the f-algebra multiplication).
    LatticeElement times(const LatticeElement& other) const;
    /// Pointwise |f|.
    LatticeElement abs() const;

    bool is_zero() const;
    bool is_positive() const;  // f >= 0

    friend bool operator==(const LatticeElement&, const LatticeElement&) = default;

    /// "(1/2, 3)"
    std::string str() const;

private:
    std::vector<Rational> values_;
};

/// Pointwise order f <= g.
bool leq(const LatticeElement& f, const LatticeElement& g);

LatticeElement meet(const LatticeElement& f, const LatticeElement& g);
LatticeElement join(const LatticeElement& f, const LatticeElement& g);
/// f+ = f v 0.
LatticeElement pos_part(const LatticeElement& f);
/// P_u f: f on u, zero elsewhere.
LatticeElement band_project(const Component& u, const LatticeElement& f);
/// {i : f[i] > 0}. Throws DomainError if f has a negative entry.
Component support_component(const LatticeElement& f);
/// True iff every entry is 0 or 1.
bool is_component(const LatticeElement& f);
/// Inverse of Component::indicator. Throws DomainError if !is_component(f).
Component to_component(const LatticeElement& f);

}  // namespace kr
