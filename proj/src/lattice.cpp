#include "kr/lattice.hpp"

#include <algorithm>
#include <bit>

#include "kr/errors.hpp"

namespace kr {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t size) { return (size + kWordBits - 1) / kWordBits; }

void check_dims(const LatticeElement& f, const LatticeElement& g, const char* op) {
    if (f.size() != g.size()) {
        throw DimensionError(std::string(op) + ": length " + std::to_string(f.size()) + " vs " +
                             std::to_string(g.size()));
    }
}

}  // namespace

// ---------------------------------------------------------------- Component

Component::Component(std::size_t size, std::vector<std::uint64_t> words)
    : size_(size), words_(std::move(words)) {}

Component Component::none(std::size_t size) { return {size, std::vector<std::uint64_t>(word_count(size), 0)}; }

Component Component::full(std::size_t size) {
    Component c = none(size);
    for (std::size_t i = 0; i < size; ++i) c.words_[i / kWordBits] |= std::uint64_t{1} << (i % kWordBits);
    return c;
}

Component Component::of(std::size_t size, std::span<const std::size_t> members) {
    Component c = none(size);
    for (std::size_t i : members) {
        if (i >= size) {
            throw DomainError("index " + std::to_string(i) + " outside ground set of size " + std::to_string(size));
        }
        c.words_[i / kWordBits] |= std::uint64_t{1} << (i % kWordBits);
    }
    return c;
}

Component Component::of(std::size_t size, std::initializer_list<std::size_t> members) {
    return of(size, std::span<const std::size_t>(members.begin(), members.size()));
}

Component Component::from_mask(std::size_t size, std::uint64_t mask) {
    if (size > kWordBits) throw DomainError("from_mask needs size <= 64");
    if (size < kWordBits && (mask >> size) != 0) throw DomainError("mask has bits outside the ground set");
    Component c = none(size);
    if (!c.words_.empty()) c.words_[0] = mask;
    return c;
}

bool Component::contains(std::size_t i) const {
    return i < size_ && ((words_[i / kWordBits] >> (i % kWordBits)) & 1U) != 0;
}

std::size_t Component::count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

bool Component::empty() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::vector<std::size_t> Component::members() const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t bits = words_[w];
        while (bits != 0) {
            out.push_back(w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits)));
            bits &= bits - 1;
        }
    }
    return out;
}

std::size_t Component::first() const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
        if (words_[w] != 0) return w * kWordBits + static_cast<std::size_t>(std::countr_zero(words_[w]));
    }
    throw DomainError("first() of an empty component");
}

std::uint64_t Component::mask() const {
    if (size_ > kWordBits) throw DomainError("mask() needs size <= 64");
    return words_.empty() ? 0 : words_[0];
}

void Component::check_same(const Component& other) const {
    if (size_ != other.size_) {
        throw DimensionError("component ground sets differ: " + std::to_string(size_) + " vs " +
                             std::to_string(other.size_));
    }
}

Component Component::meet(const Component& other) const {
    check_same(other);
    Component c = *this;
    for (std::size_t w = 0; w < words_.size(); ++w) c.words_[w] &= other.words_[w];
    return c;
}

Component Component::join(const Component& other) const {
    check_same(other);
    Component c = *this;
    for (std::size_t w = 0; w < words_.size(); ++w) c.words_[w] |= other.words_[w];
    return c;
}

Component Component::minus(const Component& other) const {
    check_same(other);
    Component c = *this;
    for (std::size_t w = 0; w < words_.size(); ++w) c.words_[w] &= ~other.words_[w];
    return c;
}

Component Component::complement() const { return full(size_).minus(*this); }

Component Component::with(std::size_t i) const {
    if (i >= size_) throw DomainError("index " + std::to_string(i) + " outside ground set");
    Component c = *this;
    c.words_[i / kWordBits] |= std::uint64_t{1} << (i % kWordBits);
    return c;
}

bool Component::disjoint_from(const Component& other) const {
    check_same(other);
    for (std::size_t w = 0; w < words_.size(); ++w) {
        if ((words_[w] & other.words_[w]) != 0) return false;
    }
    return true;
}

bool Component::subset_of(const Component& other) const {
    check_same(other);
    for (std::size_t w = 0; w < words_.size(); ++w) {
        if ((words_[w] & ~other.words_[w]) != 0) return false;
    }
    return true;
}

LatticeElement Component::indicator() const {
    std::vector<Rational> v(size_, Rational(0));
    for (std::size_t i : members()) v[i] = Rational(1);
    return LatticeElement(std::move(v));
}

std::string Component::str() const {
    std::string s = "[";
    bool first_item = true;
    for (std::size_t i : members()) {
        if (!first_item) s += ",";
        s += std::to_string(i);
        first_item = false;
    }
    return s + "]";
}

// ----------------------------------------------------------- LatticeElement

LatticeElement::LatticeElement(std::vector<Rational> values) : values_(std::move(values)) {}

LatticeElement::LatticeElement(std::initializer_list<Rational> values) : values_(values) {}

LatticeElement LatticeElement::zero(std::size_t size) { return constant(size, Rational(0)); }

LatticeElement LatticeElement::unit(std::size_t size) { return constant(size, Rational(1)); }

LatticeElement LatticeElement::constant(std::size_t size, const Rational& value) {
    return LatticeElement(std::vector<Rational>(size, value));
}

LatticeElement LatticeElement::operator-() const {
    std::vector<Rational> v;
    v.reserve(size());
    for (const auto& x : values_) v.push_back(-x);
    return LatticeElement(std::move(v));
}

LatticeElement operator+(const LatticeElement& a, const LatticeElement& b) {
    check_dims(a, b, "add");
    std::vector<Rational> v(a.values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.values_[i];
    return LatticeElement(std::move(v));
}

LatticeElement operator-(const LatticeElement& a, const LatticeElement& b) {
    check_dims(a, b, "subtract");
    std::vector<Rational> v(a.values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b.values_[i];
    return LatticeElement(std::move(v));
}

LatticeElement operator*(const Rational& s, const LatticeElement& f) {
    std::vector<Rational> v(f.values_);
    for (auto& x : v) x *= s;
    return LatticeElement(std::move(v));
}

LatticeElement LatticeElement::times(const LatticeElement& other) const {
    check_dims(*this, other, "times");
    std::vector<Rational> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= other.values_[i];
    return LatticeElement(std::move(v));
}

LatticeElement LatticeElement::abs() const {
    std::vector<Rational> v;
    v.reserve(size());
    for (const auto& x : values_) v.push_back(kr::abs(x));
    return LatticeElement(std::move(v));
}

bool LatticeElement::is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](const Rational& x) { return x.is_zero(); });
}

bool LatticeElement::is_positive() const {
    return std::all_of(values_.begin(), values_.end(), [](const Rational& x) { return x.sign() >= 0; });
}

std::string LatticeElement::str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i > 0) s += ", ";
        s += values_[i].str();
    }
    return s + ")";
}

// --------------------------------------------------------------- operations

bool leq(const LatticeElement& f, const LatticeElement& g) {
    check_dims(f, g, "leq");
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] > g[i]) return false;
    }
    return true;
}

LatticeElement meet(const LatticeElement& f, const LatticeElement& g) {
    check_dims(f, g, "meet");
    std::vector<Rational> v;
    v.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) v.push_back(std::min(f[i], g[i]));
    return LatticeElement(std::move(v));
}

LatticeElement join(const LatticeElement& f, const LatticeElement& g) {
    check_dims(f, g, "join");
    std::vector<Rational> v;
    v.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) v.push_back(std::max(f[i], g[i]));
    return LatticeElement(std::move(v));
}

LatticeElement pos_part(const LatticeElement& f) { return join(f, LatticeElement::zero(f.size())); }

LatticeElement band_project(const Component& u, const LatticeElement& f) {
    if (u.size() != f.size()) {
        throw DimensionError("band_project: component on " + std::to_string(u.size()) + " points, element on " +
                             std::to_string(f.size()));
    }
    std::vector<Rational> v(f.size(), Rational(0));
    for (std::size_t i : u.members()) v[i] = f[i];
    return LatticeElement(std::move(v));
}

Component support_component(const LatticeElement& f) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i].sign() < 0) {
            throw DomainError("support_component: negative entry " + f[i].str() + " at index " + std::to_string(i));
        }
        if (f[i].sign() > 0) members.push_back(i);
    }
    return Component::of(f.size(), members);
}

bool is_component(const LatticeElement& f) {
    const Rational one(1);
    return std::all_of(f.values().begin(), f.values().end(),
                       [&](const Rational& x) { return x.is_zero() || x == one; });
}

Component to_component(const LatticeElement& f) {
    if (!is_component(f)) throw DomainError("not a component of e: " + f.str());
    return support_component(f);
}

}  // namespace kr
