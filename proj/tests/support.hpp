#ifndef BNF_TESTS_SUPPORT_HPP
#define BNF_TESTS_SUPPORT_HPP

#include "bnf/normalizer.hpp"
#include "bnf/series.hpp"

#include <random>

namespace bnf::testing
{

// λ1 x1 y1 + λ2 x2 y2 at the given order.
inline TruncatedSeries quadratic(const Rational &l1, const Rational &l2, int order)
{
    TruncatedSeries h(order);
    h.set(exps(1, 0, 1, 0), GaussianRational(l1));
    h.set(exps(0, 1, 0, 1), GaussianRational(l2));
    return h;
}

inline ExponentPair random_exponent(std::mt19937 &rng, int max_part)
{
    std::uniform_int_distribution<int> part(0, max_part);
    return exps(part(rng), part(rng), part(rng), part(rng));
}

inline Rational random_small_rational(std::mt19937 &rng)
{
    std::uniform_int_distribution<long> num(-5, 5);
    std::uniform_int_distribution<long> den(1, 4);
    Rational r(num(rng), den(rng));
    r.canonicalize();
    return r;
}

// Real sparse h with h_{αβ} = h_{βα}: quadratic part plus up to `max_terms`
// monomials (counting both halves of a symmetric pair) of degree 3..max_degree.
inline TruncatedSeries random_real_hamiltonian(std::mt19937 &rng, const Rational &l1, const Rational &l2,
                                               int max_degree, int max_terms)
{
    TruncatedSeries h = quadratic(l1, l2, max_degree);
    int placed = 0;
    for (int attempt = 0; attempt < 200 && placed < max_terms; ++attempt) {
        const ExponentPair e = random_exponent(rng, max_degree / 2);
        if (e.degree() < 3 || e.degree() > max_degree || !h.coeff(e).is_zero()) {
            continue;
        }
        const int cost = e.is_diagonal() ? 1 : 2;
        if (placed + cost > max_terms) {
            continue;
        }
        const Rational c = random_small_rational(rng);
        if (sgn(c) == 0) {
            continue;
        }
        h.set(e, GaussianRational(c));
        h.set(e.swapped(), GaussianRational(c));
        placed += cost;
    }
    return h;
}

// Arbitrary complex sparse series of degree lo..hi with `terms` monomials.
inline TruncatedSeries random_series(std::mt19937 &rng, int lo, int hi, int terms, int order)
{
    TruncatedSeries s(order);
    for (int attempt = 0; attempt < 400 && static_cast<int>(s.size()) < terms; ++attempt) {
        const ExponentPair e = random_exponent(rng, hi);
        if (e.degree() < lo || e.degree() > hi) {
            continue;
        }
        s.set(e, GaussianRational(random_small_rational(rng), random_small_rational(rng)));
    }
    return s;
}

} // namespace bnf::testing

#endif
