#ifndef BNF_SERIES_HPP
#define BNF_SERIES_HPP

#include "bnf/rational.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>

namespace bnf
{

using MultiIndex = std::array<int, 2>;

inline int norm1(const MultiIndex &m) { return m[0] + m[1]; }

// The four coordinates of R^4. In mixed generating functions the y-slots
// hold ŷ; after a linear substitution the slots hold (ξ, η).
enum class Var : int { x1 = 0, x2 = 1, y1 = 2, y2 = 3 };

// Exponent of the monomial x^alpha y^beta.
struct ExponentPair {
    MultiIndex alpha{0, 0};
    MultiIndex beta{0, 0};

    int degree() const { return norm1(alpha) + norm1(beta); }
    bool is_diagonal() const { return alpha == beta; }
    int exponent(Var v) const;
    ExponentPair swapped() const { return {beta, alpha}; }

    // Graded, then lexicographic on (alpha1, alpha2, beta1, beta2).
    friend std::strong_ordering operator<=>(const ExponentPair &a, const ExponentPair &b);
    friend bool operator==(const ExponentPair &a, const ExponentPair &b) = default;
};

ExponentPair operator+(const ExponentPair &a, const ExponentPair &b);

std::string to_string(const ExponentPair &e);

// Sparse formal power series in (x1, x2, y1, y2), known exactly through total
// degree `order`. Zero coefficients are never stored and no stored term
// exceeds the order.
class TruncatedSeries
{
public:
    using TermMap = std::map<ExponentPair, GaussianRational>;

    TruncatedSeries() = default;
    explicit TruncatedSeries(int order);

    static TruncatedSeries monomial(const ExponentPair &e, GaussianRational c, int order);
    static TruncatedSeries variable(Var v, int order);
    static TruncatedSeries constant(GaussianRational c, int order);

    int order() const { return order_; }
    const TermMap &terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    GaussianRational coeff(const ExponentPair &e) const;
    // Stores c at e, erasing on zero. Terms above the order are dropped.
    void set(const ExponentPair &e, GaussianRational c);
    void add_to(const ExponentPair &e, const GaussianRational &c);

    // Same terms, new truncation; raising the order treats the series as a
    // polynomial.
    TruncatedSeries with_order(int order) const;

    // Lowest / highest degree present; -1 for the zero series.
    int min_degree() const;
    int max_degree() const;

    bool is_real() const;
    TruncatedSeries conj() const;

    TruncatedSeries &operator+=(const TruncatedSeries &o);
    TruncatedSeries &operator-=(const TruncatedSeries &o);
    TruncatedSeries &operator*=(const GaussianRational &c);

    friend bool operator==(const TruncatedSeries &a, const TruncatedSeries &b)
    {
        return a.order_ == b.order_ && a.terms_ == b.terms_;
    }

private:
    int order_ = 0;
    TermMap terms_;
};

// Exact sum; the result carries the smaller order.
TruncatedSeries add(const TruncatedSeries &a, const TruncatedSeries &b);
TruncatedSeries sub(const TruncatedSeries &a, const TruncatedSeries &b);
TruncatedSeries scale(const TruncatedSeries &a, const GaussianRational &c);
// Truncated convolution at min(a.order, b.order).
TruncatedSeries mul(const TruncatedSeries &a, const TruncatedSeries &b);
TruncatedSeries mul(const TruncatedSeries &a, const TruncatedSeries &b, int order);
TruncatedSeries partial_derivative(const TruncatedSeries &a, Var v);
// Keeps exactly the terms with alpha == beta.
TruncatedSeries diagonal_projection(const TruncatedSeries &a);
TruncatedSeries off_diagonal_part(const TruncatedSeries &a);
TruncatedSeries degree_slice(const TruncatedSeries &a, int d);
// sum_j (a_{x_j} b_{y_j} - a_{y_j} b_{x_j})
TruncatedSeries poisson_bracket(const TruncatedSeries &a, const TruncatedSeries &b);

inline TruncatedSeries operator+(const TruncatedSeries &a, const TruncatedSeries &b) { return add(a, b); }
inline TruncatedSeries operator-(const TruncatedSeries &a, const TruncatedSeries &b) { return sub(a, b); }
inline TruncatedSeries operator*(const TruncatedSeries &a, const TruncatedSeries &b) { return mul(a, b); }

// Evaluates f with each variable replaced by the matching series in `subs`,
// truncated at `order`.
TruncatedSeries compose(const TruncatedSeries &f, const std::array<TruncatedSeries, 4> &subs, int order);

// Swaps the roles of alpha and beta in every term.
TruncatedSeries swap_alpha_beta(const TruncatedSeries &a);

// x1 y1-style literal helper used mostly by tests: exponents (a1,a2,b1,b2).
ExponentPair exps(int a1, int a2, int b1, int b2);

} // namespace bnf

#endif
