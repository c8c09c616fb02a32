#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace mmeq {

// Exact rational number: the numeric backbone of every solver path.
// Thin wrapper over GMP's mpq_class pinning down the representation contract:
// always lowest terms, denominator > 0, no floating point anywhere.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(int n) : v_(n) {}
    Rational(long n) : v_(n) {}
    Rational(long num, long den);
    Rational(const mpz_class& num, const mpz_class& den);

    // Parses "num" or "num/den" (optional leading '-', decimal digits only,
    // den > 0). Throws Error("BadRational") on anything else.
    static Rational from_string(const std::string& s);

    // Lowest-terms string, "/den" omitted when den == 1. Round-trips exactly.
    std::string str() const;

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational operator+(const Rational& o) const { return Rational(mpq_class(v_ + o.v_)); }
    Rational operator-(const Rational& o) const { return Rational(mpq_class(v_ - o.v_)); }
    Rational operator*(const Rational& o) const { return Rational(mpq_class(v_ * o.v_)); }
    Rational operator/(const Rational& o) const;

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

    bool operator==(const Rational& o) const { return v_ == o.v_; }
    bool operator!=(const Rational& o) const { return v_ != o.v_; }
    bool operator<(const Rational& o) const { return v_ < o.v_; }
    bool operator<=(const Rational& o) const { return v_ <= o.v_; }
    bool operator>(const Rational& o) const { return v_ > o.v_; }
    bool operator>=(const Rational& o) const { return v_ >= o.v_; }

    int sign() const { return sgn(v_); }
    bool is_zero() const { return sgn(v_) == 0; }
    bool is_integer() const { return v_.get_den() == 1; }

    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }

    // Bit length of the denominator; used by the rationality audit.
    std::size_t den_bits() const { return mpz_sizeinbase(v_.get_den().get_mpz_t(), 2); }

    // Nearest double, for the approximate oracle only (never in solver paths).
    double to_double() const { return v_.get_d(); }

private:
    explicit Rational(mpq_class q) : v_(std::move(q)) {}
    mpq_class v_;
};

inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational abs(const Rational& a) { return a.sign() < 0 ? -a : a; }

std::ostream& operator<<(std::ostream& os, const Rational& r);

// Element a + b*eta of the ordered field Q[eta] where eta is a positive
// infinitesimal. Just enough structure for max-flow capacities: parametric
// cuts are compared "immediately to the right" of a breakpoint without
// guessing a concrete step size. Ordering is lexicographic in (a, b).
struct EtaRational {
    Rational a; // standard part
    Rational b; // eta coefficient

    EtaRational() = default;
    EtaRational(Rational std_part) : a(std::move(std_part)), b(0) {}
    EtaRational(Rational std_part, Rational eta_part)
        : a(std::move(std_part)), b(std::move(eta_part)) {}

    EtaRational operator+(const EtaRational& o) const { return {a + o.a, b + o.b}; }
    EtaRational operator-(const EtaRational& o) const { return {a - o.a, b - o.b}; }
    EtaRational& operator+=(const EtaRational& o) { a += o.a; b += o.b; return *this; }
    EtaRational& operator-=(const EtaRational& o) { a -= o.a; b -= o.b; return *this; }

    bool operator==(const EtaRational& o) const { return a == o.a && b == o.b; }
    bool operator!=(const EtaRational& o) const { return !(*this == o); }
    bool operator<(const EtaRational& o) const { return a < o.a || (a == o.a && b < o.b); }
    bool operator<=(const EtaRational& o) const { return *this < o || *this == o; }
    bool operator>(const EtaRational& o) const { return o < *this; }
    bool operator>=(const EtaRational& o) const { return o <= *this; }

    int sign() const {
        int s = a.sign();
        return s != 0 ? s : b.sign();
    }
};

inline const EtaRational& min(const EtaRational& x, const EtaRational& y) {
    return y < x ? y : x;
}

} // namespace mmeq
