#include "bnf/rational.hpp"

#include "bnf/errors.hpp"

#include <cctype>
#include <cstdlib>
#include <memory>

namespace bnf
{

std::string to_string(const Rational &r)
{
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

namespace
{

bool all_digits(std::string_view s)
{
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    std::string_view num = text;
    std::string_view den = "1";
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        num = text.substr(0, slash);
        den = text.substr(slash + 1);
    }
    std::string_view num_digits = num;
    if (!num_digits.empty() && num_digits.front() == '-') {
        num_digits.remove_prefix(1);
    }
    if (!all_digits(num_digits) || !all_digits(den)) {
        throw ParseError("not an exact rational \"p/q\": '" + std::string(text) + "'");
    }
    Integer n(std::string(num), 10);
    Integer d(std::string(den), 10);
    if (sgn(d) == 0) {
        throw ParseError("zero denominator in '" + std::string(text) + "'");
    }
    Rational r(n, d);
    r.canonicalize();
    return r;
}

Integer factorial(unsigned long n)
{
    Integer f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return f;
}

std::string approx_decimal(const Rational &r, int digits)
{
    if (sgn(r) == 0) {
        return "0";
    }
    // Enough binary precision for the requested decimal digits.
    mpf_class f(0, static_cast<mp_bitcnt_t>(digits * 4 + 64));
    f = r;
    mp_exp_t exp = 0;
    std::unique_ptr<char, void (*)(void *)> raw(mpf_get_str(nullptr, &exp, 10, static_cast<size_t>(digits), f.get_mpf_t()),
                                                std::free);
    std::string mant(raw.get());
    std::string sign;
    if (!mant.empty() && mant.front() == '-') {
        sign = "-";
        mant.erase(0, 1);
    }
    // mpf_get_str gives 0.mant * 10^exp.
    std::string out = sign + mant.substr(0, 1);
    if (mant.size() > 1) {
        out += "." + mant.substr(1);
    }
    out += "e" + std::string(exp - 1 >= 0 ? "+" : "-") + std::to_string(std::labs(static_cast<long>(exp - 1)));
    return out;
}

Rational pow(const Rational &r, unsigned long e)
{
    Integer num, den;
    mpz_pow_ui(num.get_mpz_t(), r.get_num_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), r.get_den_mpz_t(), e);
    Rational out(num, den);
    out.canonicalize();
    return out;
}

int compare_powers(const Rational &r, unsigned long p, const Rational &s, unsigned long q)
{
    return cmp(pow(r, p), pow(s, q));
}

Rational GaussianRational::norm() const
{
    return re_ * re_ + im_ * im_;
}

GaussianRational &GaussianRational::operator+=(const GaussianRational &o)
{
    re_ += o.re_;
    if (sgn(o.im_) != 0) {
        im_ += o.im_;
    }
    return *this;
}

GaussianRational &GaussianRational::operator-=(const GaussianRational &o)
{
    re_ -= o.re_;
    if (sgn(o.im_) != 0) {
        im_ -= o.im_;
    }
    return *this;
}

GaussianRational &GaussianRational::operator*=(const GaussianRational &o)
{
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
        re_ *= o.re_;
        return *this;
    }
    Rational re = re_ * o.re_ - im_ * o.im_;
    Rational im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

GaussianRational &GaussianRational::operator/=(const GaussianRational &o)
{
    if (o.is_zero()) {
        throw std::domain_error("division by zero GaussianRational");
    }
    if (sgn(o.im_) == 0) {
        re_ /= o.re_;
        if (sgn(im_) != 0) {
            im_ /= o.re_;
        }
        return *this;
    }
    const Rational n = o.norm();
    *this *= o.conj();
    re_ /= n;
    im_ /= n;
    return *this;
}

void GaussianRational::add_product(const GaussianRational &a, const GaussianRational &b)
{
    if (sgn(a.im_) == 0 && sgn(b.im_) == 0) {
        re_ += a.re_ * b.re_;
        return;
    }
    re_ += a.re_ * b.re_ - a.im_ * b.im_;
    im_ += a.re_ * b.im_ + a.im_ * b.re_;
}

std::string to_string(const GaussianRational &z)
{
    if (z.is_real()) {
        return to_string(z.re());
    }
    return to_string(z.re()) + (sgn(z.im()) < 0 ? " - " : " + ") + to_string(abs(z.im())) + "i";
}

} // namespace bnf
