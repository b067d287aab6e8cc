#include "bnf/divergence_forge.hpp"
#include "bnf/errors.hpp"
#include "bnf/verity.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace bnf;

namespace
{

const Rational l1(2, 7);
const Rational l2(1);

TruncatedSeries forged_at(int order)
{
    const auto stages = build_liouville_stages(Rational(1, 2), Rational(2), 1);
    return forge(stages, Rational(1, 2), {.max_order = 12, .order = order}).hamiltonian;
}

} // namespace

TEST_CASE("identity names")
{
    for (Identity id : {Identity::second_order_correction, Identity::singular_coefficient, Identity::uniqueness,
                        Identity::reality_restriction, Identity::trace_identity}) {
        CHECK(parse_identity(to_string(id)) == id);
    }
    CHECK_THROWS_AS(parse_identity("lemma"), ParseError);
}

TEST_CASE("second-order correction with S = 0")
{
    const FrequencyVector f(l1, l2, 6);
    TruncatedSeries h = testing::quadratic(l1, l2, 4);
    h.set(exps(2, 0, 2, 0), 3);
    const IdentityReport r = verify_second_order_correction(h, GeneratingFunction(TruncatedSeries(4), 3), f);
    CHECK(r.passed);
    CHECK(r.residual.empty());
}

TEST_CASE("second-order correction of a single singular pair")
{
    const FrequencyVector f(l1, l2, 8);
    const Rational A(3, 2);
    const Rational B(-5);
    for (auto [N, m] : {std::pair{2, 1}, {3, 1}, {2, 2}, {3, 2}}) {
        const int order = 2 * (N + m) - 2;
        TruncatedSeries t(order);
        t.set(exps(N, 0, 0, m), A);
        t.set(exps(0, m, N, 0), B);
        const TruncatedSeries P =
            TruncatedSeries::monomial(exps(N - 1, m, N - 1, m), GaussianRational(Rational(N * N)), order);
        const TruncatedSeries Q =
            TruncatedSeries::monomial(exps(N, m - 1, N, m - 1), GaussianRational(Rational(m * m)), order);
        const GaussianRational k(A * B * (l1 * N - l2 * m));
        CAPTURE(N);
        CAPTURE(m);
        const TruncatedSeries got = second_order_correction(t, f, order);
        CHECK(got == scale(P - Q, k));

        // The shorter display drops y_j T_{y_j y_k} T_{x_k}; it differs on P.
        const TruncatedSeries short_form =
            scale(P, GaussianRational(A * B * (l1 - l2 * m))) + scale(Q, GaussianRational(A * B * (l2 - l1 * N)));
        CHECK(got - short_form
              == TruncatedSeries::monomial(exps(N - 1, m, N - 1, m),
                                           GaussianRational(A * B * l1 * N * N * (N - 1)), order)
                     + TruncatedSeries::monomial(exps(N, m - 1, N, m - 1),
                                                 GaussianRational(A * B * l2 * m * m * (m - 1)), order));
    }
}

TEST_CASE("second-order correction on random admissible pairs")
{
    std::mt19937 rng(3);
    const FrequencyVector f(l1, l2, 8);
    for (int t = 0; t < 10; ++t) {
        const int d = 3 + t % 2;
        TruncatedSeries h = testing::quadratic(l1, l2, 2 * d - 2);
        for (int k = 0; k < 8; ++k) {
            const ExponentPair e = testing::random_exponent(rng, 3);
            if (e.degree() < 3 || e.degree() > 2 * d - 2 || (!e.is_diagonal() && e.degree() < d)) {
                continue;
            }
            h.set(e, GaussianRational(testing::random_small_rational(rng)));
        }
        const GeneratingFunction s = normalizing_generating_function(h, f, d);
        const IdentityReport r = verify_second_order_correction(h, s, f);
        CHECK_MESSAGE(r.passed, r.detail);
    }
}

TEST_CASE("second-order correction checks its hypotheses")
{
    const FrequencyVector f(l1, l2, 8);
    TruncatedSeries h = testing::quadratic(l1, l2, 6);
    h.set(exps(2, 0, 0, 1), 1);
    const GeneratingFunction s(TruncatedSeries::monomial(exps(3, 0, 0, 1), 1, 7), 4);
    CHECK_THROWS_AS(verify_second_order_correction(h, s, f), HypothesisViolated);
}

TEST_CASE("singular coefficient probe")
{
    const FrequencyVector f(l1, l2, 8);
    CHECK(singular_coefficient(f, 2, 1, SingularForm::shifted_frequency) == Rational(7, 3));
    CHECK(singular_coefficient(f, 2, 1, SingularForm::reciprocal_divisor) == Rational(-7, 3));
    const TruncatedSeries base = testing::quadratic(l1, l2, 8);
    for (auto [N, m] : {std::pair{2, 1}, {3, 1}, {3, 2}}) {
        CAPTURE(N);
        CAPTURE(m);
        const IdentityReport r = verify_singular_coefficient(base, f, N, m);
        CHECK(r.passed);
        const Rational div = l1 * N - l2 * m;
        CHECK(parse_rational(r.quantities[2].second) == Rational(m * m) / div);
    }
    CHECK_THROWS_AS(verify_singular_coefficient(base, f, 1, 1), HypothesisViolated);
}

TEST_CASE("singular probe constant term is the background normal form")
{
    std::mt19937 rng(19);
    const FrequencyVector f(l1, l2, 8);
    TruncatedSeries base = testing::random_real_hamiltonian(rng, l1, l2, 4, 6);
    base.set(exps(2, 0, 0, 1), 0);
    base.set(exps(0, 1, 2, 0), 0);
    const IdentityReport r = verify_singular_coefficient(base, f, 2, 1);
    CHECK(r.quantities[6].first == "f00");
    CHECK(parse_rational(r.quantities[6].second)
          == diagonal_coefficient(base.with_order(4), f, exps(2, 0, 2, 0)).re());
}

TEST_CASE("uniqueness and its negative control")
{
    const TruncatedSeries h = forged_at(8);
    const FrequencyVector f(Rational(4097, 8192), l2, 8);
    CHECK(verify_uniqueness(h, f, 8).passed);
    CHECK_FALSE(verify_uniqueness(h, f, 8, exps(2, 0, 0, 1)).passed);

    std::mt19937 rng(23);
    const FrequencyVector g(l1, l2, 5);
    for (int t = 0; t < 8; ++t) {
        const TruncatedSeries dense = testing::random_real_hamiltonian(rng, l1, l2, 5, 24);
        CHECK(verify_uniqueness(dense, g, 5).passed);
    }
}

TEST_CASE("reality restriction")
{
    const FrequencyVector f(l1, l2, 6);
    const IdentityReport q = verify_reality_restriction(testing::quadratic(l1, l2, 4), f, 4);
    CHECK(q.passed);

    const TruncatedSeries e = apply_linear(testing::quadratic(l1, l2, 2), LinearSubstitution::complexification());
    TruncatedSeries expected(2);
    expected.set(exps(2, 0, 0, 0), l1);
    expected.set(exps(0, 0, 2, 0), l1);
    expected.set(exps(0, 2, 0, 0), l2);
    expected.set(exps(0, 0, 0, 2), l2);
    CHECK(e == expected);

    TruncatedSeries pair = testing::quadratic(l1, l2, 6);
    pair.set(exps(2, 0, 0, 1), 2);
    pair.set(exps(0, 1, 2, 0), 2);
    CHECK(apply_linear(pair, LinearSubstitution::complexification()).is_real());
    CHECK(verify_reality_restriction(pair, f, 6).passed);

    pair.set(exps(0, 1, 2, 0), 0);
    CHECK_THROWS_AS(verify_reality_restriction(pair, f, 6), SymmetryViolated);

    const TruncatedSeries h = forged_at(8);
    CHECK(verify_reality_restriction(h, FrequencyVector(Rational(4097, 8192), l2, 8), 8).passed);
}

TEST_CASE("trace identity and a corrupted trace")
{
    std::mt19937 rng(37);
    const FrequencyVector f(l1, l2, 6);
    NormalizationTrace trace = normalize(testing::random_real_hamiltonian(rng, l1, l2, 6, 10), f, 6).trace;
    REQUIRE_FALSE(trace.entries.empty());
    CHECK(verify_trace_identity(trace).passed);
    trace.entries.back().s_coeff += GaussianRational(Rational(1, 3));
    const IdentityReport r = verify_trace_identity(trace);
    CHECK_FALSE(r.passed);
    CHECK(r.detail.find(to_string(trace.entries.back().exponent)) != std::string::npos);
    CHECK(report_to_json(r).at("identity") == "trace-identity");
}
