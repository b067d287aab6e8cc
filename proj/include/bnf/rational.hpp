#ifndef BNF_RATIONAL_HPP
#define BNF_RATIONAL_HPP

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace bnf
{

using Rational = mpq_class;
using Integer = mpz_class;

// "p/q" in lowest terms, q > 0. Integers are written "p/1".
std::string to_string(const Rational &r);

// Accepts "p/q" or "p" with optional leading '-'; rejects decimals and
// zero denominators. The result is canonical.
Rational parse_rational(std::string_view text);

Integer factorial(unsigned long n);

// Decimal approximation with `digits` significant digits, e.g. "1.23457e+42".
// Works far outside the range of double.
std::string approx_decimal(const Rational &r, int digits = 6);

// r^(p/q) compared against s without leaving the rationals:
// returns sign(r^p - s^q) for r, s >= 0, p, q > 0.
int compare_powers(const Rational &r, unsigned long p, const Rational &s, unsigned long q);

Rational pow(const Rational &r, unsigned long e);

// Coefficient field Q(i). Both parts are kept canonical by gmpxx.
class GaussianRational
{
public:
    GaussianRational() = default;
    GaussianRational(long v) : re_(v) {}
    GaussianRational(Rational re) : re_(std::move(re)) { re_.canonicalize(); }
    GaussianRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im))
    {
        re_.canonicalize();
        im_.canonicalize();
    }

    static GaussianRational i() { return {Rational(0), Rational(1)}; }

    const Rational &re() const { return re_; }
    const Rational &im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }

    GaussianRational conj() const { return {re_, -im_}; }
    // |z|^2
    Rational norm() const;

    GaussianRational &operator+=(const GaussianRational &o);
    GaussianRational &operator-=(const GaussianRational &o);
    GaussianRational &operator*=(const GaussianRational &o);
    GaussianRational &operator/=(const GaussianRational &o);

    // this += a * b, the inner loop of every convolution.
    void add_product(const GaussianRational &a, const GaussianRational &b);

    friend GaussianRational operator+(GaussianRational a, const GaussianRational &b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational &b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational &b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational &b) { return a /= b; }
    GaussianRational operator-() const { return {-re_, -im_}; }

    friend bool operator==(const GaussianRational &a, const GaussianRational &b)
    {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussianRational &a, const GaussianRational &b) { return !(a == b); }

private:
    Rational re_;
    Rational im_;
};

std::string to_string(const GaussianRational &z);

} // namespace bnf

#endif
