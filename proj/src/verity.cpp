#include "bnf/verity.hpp"

#include "bnf/errors.hpp"
#include "bnf/series_io.hpp"

#include <algorithm>

namespace bnf
{

using nlohmann::json;

std::string to_string(Identity id)
{
    switch (id) {
    case Identity::second_order_correction:
        return "second-order-correction";
    case Identity::singular_coefficient:
        return "singular-coefficient";
    case Identity::uniqueness:
        return "uniqueness";
    case Identity::reality_restriction:
        return "reality-restriction";
    case Identity::trace_identity:
        return "trace-identity";
    }
    return "?";
}

Identity parse_identity(const std::string &name)
{
    for (Identity id : {Identity::second_order_correction, Identity::singular_coefficient, Identity::uniqueness,
                        Identity::reality_restriction, Identity::trace_identity}) {
        if (to_string(id) == name) {
            return id;
        }
    }
    throw ParseError("unknown identity '" + name + "'");
}

namespace
{

constexpr std::array<Var, 2> kX{Var::x1, Var::x2};
constexpr std::array<Var, 2> kY{Var::y1, Var::y2};

void finish(IdentityReport &r)
{
    r.passed = std::none_of(r.residual.terms().begin(), r.residual.terms().end(),
                            [&](const auto &t) { return t.first.degree() <= r.max_residual_degree; });
    if (!r.passed && r.detail.empty()) {
        r.detail = "first nonzero residual at " + to_string(r.residual.terms().begin()->first);
    }
}

void require_off_diagonal_free_below(const TruncatedSeries &s, int degree, const std::string &what)
{
    for (const auto &[e, c] : s.terms()) {
        if (e.degree() >= degree) {
            break;
        }
        if (!e.is_diagonal()) {
            throw HypothesisViolated(what + " has an off-diagonal term at " + to_string(e) + " below degree "
                                     + std::to_string(degree));
        }
    }
}

} // namespace

TruncatedSeries second_order_correction(const TruncatedSeries &t, const FrequencyVector &freq, int order)
{
    const TruncatedSeries tt = t.with_order(order + 2);
    const std::array<GaussianRational, 2> lambda{GaussianRational(freq.lambda1()), GaussianRational(freq.lambda2())};
    std::array<TruncatedSeries, 2> tx, ty;
    for (int j = 0; j < 2; ++j) {
        tx[j] = partial_derivative(tt, kX[j]);
        ty[j] = partial_derivative(tt, kY[j]);
    }
    TruncatedSeries sum(order);
    for (int j = 0; j < 2; ++j) {
        const TruncatedSeries xj = TruncatedSeries::variable(kX[j], order);
        const TruncatedSeries yj = TruncatedSeries::variable(kY[j], order);
        const TruncatedSeries half_txty = scale(mul(tx[j], ty[j], order), GaussianRational(Rational(1, 2)));
        for (int k = 0; k < 2; ++k) {
            TruncatedSeries term = half_txty;
            term += mul(yj, mul(partial_derivative(ty[j], kY[k]), tx[k], order), order);
            term -= mul(xj, mul(partial_derivative(tx[j], kY[k]), tx[k], order), order);
            sum += scale(term, lambda[j]);
        }
    }
    return diagonal_projection(sum);
}

IdentityReport verify_second_order_correction(const TruncatedSeries &h, const GeneratingFunction &s,
                                              const FrequencyVector &freq)
{
    IdentityReport r;
    r.identity = Identity::second_order_correction;
    const int d = s.min_degree();
    const int order = 2 * d - 2;
    r.max_residual_degree = order;
    if (h.order() < order) {
        throw HypothesisViolated("h is known only through degree " + std::to_string(h.order()) + ", need "
                                 + std::to_string(order));
    }
    require_off_diagonal_free_below(h, d, "h");
    const TruncatedSeries hat = pushforward(h, s, order);
    require_off_diagonal_free_below(hat, 2 * d - 1, "ĥ");

    const TruncatedSeries lhs = hat - diagonal_projection(h.with_order(order));
    const TruncatedSeries rhs = second_order_correction(degree_slice(s.series(), d), freq, order);
    r.residual = lhs - rhs;
    r.quantities = {{"d", std::to_string(d)},
                    {"lhs_terms", std::to_string(lhs.size())},
                    {"rhs_terms", std::to_string(rhs.size())}};
    finish(r);
    return r;
}

int first_off_diagonal_degree(const TruncatedSeries &h)
{
    for (const auto &[e, c] : h.terms()) {
        if (!e.is_diagonal() && e.degree() >= 3) {
            return e.degree();
        }
    }
    return 3;
}

GeneratingFunction normalizing_generating_function(const TruncatedSeries &h, const FrequencyVector &freq, int d)
{
    const NormalizationResult nr = normalize(h, freq, 2 * d - 2);
    return GeneratingFunction(nr.generating_functions.front().series(), d);
}

Rational singular_coefficient(const FrequencyVector &freq, int N, int m, SingularForm form)
{
    const Rational div = freq.lambda1() * N - freq.lambda2() * m;
    if (form == SingularForm::reciprocal_divisor) {
        return Rational(m * m) / div;
    }
    return -Rational(m * m) * (freq.lambda1() * N - freq.lambda2()) / (div * div);
}

IdentityReport verify_singular_coefficient(const TruncatedSeries &h_base, const FrequencyVector &freq, int N, int m,
                                           SingularForm form)
{
    if (N < 1 || m < 1 || N + m < 3) {
        throw HypothesisViolated("need N, m >= 1 and N + m >= 3");
    }
    IdentityReport r;
    r.identity = Identity::singular_coefficient;
    const int order = 2 * (N + m) - 2;
    r.max_residual_degree = order;
    const ExponentPair ab = exps(N, 0, 0, m);
    const ExponentPair ba = ab.swapped();
    const MultiIndex alpha{N, m - 1};

    auto probe = [&](int u, int v) {
        TruncatedSeries h = h_base.with_order(order);
        h.set(ab, GaussianRational(u));
        h.set(ba, GaussianRational(v));
        return normalize(h, freq, order).normal_form.coeff(alpha);
    };
    const GaussianRational f00 = probe(0, 0);
    const GaussianRational f10 = probe(1, 0);
    const GaussianRational f01 = probe(0, 1);
    const GaussianRational f11 = probe(1, 1);
    const GaussianRational measured = f11 - f10 - f01 + f00;
    const GaussianRational expected(singular_coefficient(freq, N, m, form));

    r.residual = TruncatedSeries::monomial(ExponentPair{alpha, alpha}, measured - expected, order);
    r.quantities = {{"N", std::to_string(N)},
                    {"m", std::to_string(m)},
                    {"measured", to_string(measured)},
                    {"expected", to_string(expected)},
                    {"form", form == SingularForm::reciprocal_divisor ? "reciprocal-divisor" : "shifted-frequency"},
                    {"divisor", to_string(freq.lambda1() * N - freq.lambda2() * m)},
                    {"f00", to_string(f00)}};
    finish(r);
    if (!r.passed) {
        r.detail = "probe gives " + to_string(measured) + ", expected " + to_string(expected);
    }
    return r;
}

IdentityReport verify_uniqueness(const TruncatedSeries &h, const FrequencyVector &freq, int order,
                                 const std::optional<ExponentPair> &corrupt)
{
    IdentityReport r;
    r.identity = Identity::uniqueness;
    r.max_residual_degree = order;

    NormalizeOptions by_degree;
    by_degree.strategy = Strategy::degree_by_degree;
    NormalizeOptions reversed;
    reversed.strategy = Strategy::monomial_by_monomial;
    reversed.processing = ProcessingOrder::reversed;
    reversed.skip_solve = corrupt;

    // Whole transformed series, off-diagonal remainder included.
    const TruncatedSeries a = normalize(h, freq, order).transformed;
    const TruncatedSeries b = normalize(h, freq, order, by_degree).transformed;
    const TruncatedSeries c = normalize(h, freq, order, reversed).transformed;

    const TruncatedSeries ab = b - a;
    const TruncatedSeries ac = c - a;
    r.residual = ab.empty() ? ac : ab;
    r.quantities = {{"diagonal_terms", std::to_string(a.size())},
                    {"by_degree_differs", ab.empty() ? "false" : "true"},
                    {"reversed_differs", ac.empty() ? "false" : "true"}};
    finish(r);
    return r;
}

IdentityReport verify_reality_restriction(const TruncatedSeries &h, const FrequencyVector &freq, int order)
{
    require_real_symmetric(h);
    IdentityReport r;
    r.identity = Identity::reality_restriction;
    r.max_residual_degree = order;
    const LinearSubstitution L = LinearSubstitution::complexification();

    auto imaginary_part = [&](const TruncatedSeries &s) {
        TruncatedSeries out(s.order());
        for (const auto &[e, c] : s.terms()) {
            if (!c.is_real()) {
                out.set(e, GaussianRational(c.im()));
            }
        }
        return out;
    };

    const TruncatedSeries e = apply_linear(h.with_order(order), L);
    const TruncatedSeries e_im = imaginary_part(e);

    TruncatedSeries quad(order);
    quad.set(exps(2, 0, 0, 0), GaussianRational(freq.lambda1()));
    quad.set(exps(0, 0, 2, 0), GaussianRational(freq.lambda1()));
    quad.set(exps(0, 2, 0, 0), GaussianRational(freq.lambda2()));
    quad.set(exps(0, 0, 0, 2), GaussianRational(freq.lambda2()));
    const TruncatedSeries quad_diff = degree_slice(e, 2) - quad;

    NormalizeOptions opts;
    opts.require_real_symmetric = true;
    const NormalForm nf = normalize(h, freq, order, opts).normal_form;
    const TruncatedSeries g = apply_linear(nf.to_series(), L);

    // Read c_ab off the pure ξ1^{2a} ξ2^{2b} monomials, then rebuild
    // Σ c_ab I1^a I2^b with I_j = ξ_j² + η_j² and compare in full.
    const std::array<TruncatedSeries, 2> I{add(TruncatedSeries::monomial(exps(2, 0, 0, 0), 1, order),
                                               TruncatedSeries::monomial(exps(0, 0, 2, 0), 1, order)),
                                           add(TruncatedSeries::monomial(exps(0, 2, 0, 0), 1, order),
                                               TruncatedSeries::monomial(exps(0, 0, 0, 2), 1, order))};
    const std::array<TruncatedSeries, 4> subs{I[0], I[1], TruncatedSeries(order), TruncatedSeries(order)};
    TruncatedSeries coeffs(order);
    for (const auto &[ex, c] : g.terms()) {
        if (ex.beta == MultiIndex{0, 0} && ex.alpha[0] % 2 == 0 && ex.alpha[1] % 2 == 0) {
            coeffs.set(exps(ex.alpha[0] / 2, ex.alpha[1] / 2, 0, 0), c);
        }
    }
    const TruncatedSeries rebuilt = compose(coeffs, subs, order);
    const TruncatedSeries nf_diff = g - rebuilt;
    const TruncatedSeries g_im = imaginary_part(g);

    const std::array<std::pair<const char *, const TruncatedSeries *>, 4> checks{
        {{"imaginary part of h∘L", &e_im},
         {"quadratic part of h∘L", &quad_diff},
         {"imaginary part of the normal form through L", &g_im},
         {"normal form through L minus its action polynomial", &nf_diff}}};
    r.residual = TruncatedSeries(order);
    for (const auto &[name, s] : checks) {
        r.quantities.emplace_back(name, s->empty() ? "0" : std::to_string(s->size()) + " terms");
        if (r.residual.empty() && !s->empty()) {
            r.residual = *s;
            r.detail = std::string(name) + " is nonzero at " + to_string(s->terms().begin()->first);
        }
    }
    r.quantities.emplace_back("e_terms", std::to_string(e.size()));
    r.quantities.emplace_back("action_coefficients", std::to_string(coeffs.size()));
    finish(r);
    return r;
}

IdentityReport verify_trace_identity(const NormalizationTrace &trace)
{
    IdentityReport r;
    r.identity = Identity::trace_identity;
    int top = 0;
    for (const auto &t : trace.entries) {
        top = std::max(top, t.exponent.degree());
    }
    r.max_residual_degree = top;
    r.residual = TruncatedSeries(top);
    for (const auto &t : trace.entries) {
        r.residual.add_to(t.exponent, t.s_coeff * t.divisor - t.residual);
    }
    r.quantities = {{"entries", std::to_string(trace.entries.size())}};
    finish(r);
    return r;
}

json report_to_json(const IdentityReport &r)
{
    json q = json::object();
    for (const auto &[k, v] : r.quantities) {
        q[k] = v;
    }
    return json{{"identity", to_string(r.identity)},
                {"max_residual_degree", r.max_residual_degree},
                {"passed", r.passed},
                {"detail", r.detail},
                {"quantities", std::move(q)},
                {"residual", series_to_json(r.residual)}};
}

} // namespace bnf
