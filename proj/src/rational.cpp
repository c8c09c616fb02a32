#include "mmeq/rational.hpp"

#include <cctype>
#include <ostream>

#include "mmeq/error.hpp"

namespace mmeq {

Rational::Rational(long num, long den) {
    if (den == 0) fail("DivisionByZero", "rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) fail("DivisionByZero", "rational with zero denominator");
    v_ = mpq_class(num) / mpq_class(den); // mpq_class division canonicalizes
}

Rational Rational::operator/(const Rational& o) const {
    if (o.is_zero()) fail("DivisionByZero", "division by zero rational");
    return Rational(mpq_class(v_ / o.v_));
}

Rational Rational::from_string(const std::string& s) {
    // Grammar: '-'? digits ('/' digits)?   — nothing else (no '+', no blanks,
    // no hex). Keeps JSON documents unambiguous across implementations.
    std::size_t i = 0;
    if (i < s.size() && s[i] == '-') ++i;
    std::size_t num_begin = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == num_begin) fail("BadRational", "expected digits in rational-string '" + s + "'");
    std::string num_part = s.substr(0, i);
    std::string den_part = "1";
    if (i < s.size()) {
        if (s[i] != '/') fail("BadRational", "unexpected character in rational-string '" + s + "'");
        ++i;
        std::size_t den_begin = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i == den_begin || i != s.size())
            fail("BadRational", "bad denominator in rational-string '" + s + "'");
        den_part = s.substr(den_begin);
    }
    mpz_class num(num_part, 10);
    mpz_class den(den_part, 10);
    if (den == 0) fail("BadRational", "zero denominator in rational-string '" + s + "'");
    return Rational(num, den);
}

std::string Rational::str() const {
    return v_.get_str(); // mpq_class prints "num/den", or "num" when den == 1
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

} // namespace mmeq
