#include "kr/rational.hpp"

#include <cctype>

#include "kr/errors.hpp"

namespace kr {

namespace {

bool is_integer_literal(std::string_view s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

mpz_class to_mpz(std::string_view s) {
    if (!s.empty() && s[0] == '+') s.remove_prefix(1);
    return mpz_class(std::string(s), 10);
}

}  // namespace

namespace {

mpz_class from_int64(std::int64_t v) {
    // gmpxx only takes long; on LLP64 platforms long is 32 bits.
    if constexpr (sizeof(long) >= sizeof(std::int64_t)) {
        return mpz_class(static_cast<long>(v));
    } else {
        return mpz_class(std::to_string(v), 10);
    }
}

}  // namespace

Rational::Rational(std::int64_t value) : value_(from_int64(value)) {}

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    value_ = mpq_class(from_int64(num), from_int64(den));
    value_.canonicalize();
}

Rational::Rational(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

Rational Rational::parse(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);

    const auto slash = text.find('/');
    const std::string_view num = text.substr(0, slash);
    if (!is_integer_literal(num, true)) throw ParseError("not a rational: '" + std::string(text) + "'");
    if (slash == std::string_view::npos) return Rational(mpq_class(to_mpz(num)));

    const std::string_view den = text.substr(slash + 1);
    if (!is_integer_literal(den, false)) throw ParseError("not a rational: '" + std::string(text) + "'");
    mpz_class d = to_mpz(den);
    if (d == 0) throw ParseError("zero denominator: '" + std::string(text) + "'");
    return Rational(mpq_class(to_mpz(num), d));
}

std::string Rational::str() const {
    if (value_.get_den() == 1) return value_.get_num().get_str();
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

Rational Rational::operator-() const { return Rational(mpq_class(-value_)); }

Rational& Rational::operator+=(const Rational& rhs) {
    value_ += rhs.value_;
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs) {
    value_ -= rhs.value_;
    return *this;
}

Rational& Rational::operator*=(const Rational& rhs) {
    value_ *= rhs.value_;
    return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
    if (rhs.is_zero()) throw DomainError("division by zero");
    value_ /= rhs.value_;
    return *this;
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

std::int64_t floor_to_int(const Rational& r) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), r.raw().get_num_mpz_t(), r.raw().get_den_mpz_t());
    if (!q.fits_slong_p()) throw DomainError("floor out of range: " + r.str());
    return q.get_si();
}

}  // namespace kr
