#include "bnf/normalizer.hpp"

#include "bnf/errors.hpp"
#include "bnf/series_io.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace bnf
{

Integer first_resonance_order(const Rational &lambda1, const Rational &lambda2)
{
    if (sgn(lambda1) == 0 || sgn(lambda2) == 0) {
        return Integer(1);
    }
    // λ1/λ2 = p/q in lowest terms; the primitive resonance is k = (q, -p).
    const Rational r = lambda1 / lambda2;
    return abs(r.get_num()) + r.get_den();
}

FrequencyVector::FrequencyVector(Rational lambda1, Rational lambda2, int certified_order)
    : lambda1_(std::move(lambda1)), lambda2_(std::move(lambda2)), certified_order_(certified_order)
{
    lambda1_.canonicalize();
    lambda2_.canonicalize();
    const Integer first = first_resonance_order(lambda1_, lambda2_);
    if (first <= certified_order_) {
        throw ResonanceError("frequencies (" + to_string(lambda1_) + ", " + to_string(lambda2_)
                             + ") resonate at order " + first.get_str() + " <= " + std::to_string(certified_order_));
    }
}

Rational FrequencyVector::divisor(const ExponentPair &e) const
{
    return lambda1_ * (e.alpha[0] - e.beta[0]) + lambda2_ * (e.alpha[1] - e.beta[1]);
}

std::string to_string(Strategy s)
{
    switch (s) {
    case Strategy::all_at_once:
        return "all";
    case Strategy::degree_by_degree:
        return "by-degree";
    case Strategy::monomial_by_monomial:
        return "by-monomial";
    }
    return "?";
}

Strategy parse_strategy(const std::string &name)
{
    if (name == "all") {
        return Strategy::all_at_once;
    }
    if (name == "by-degree") {
        return Strategy::degree_by_degree;
    }
    if (name == "by-monomial") {
        return Strategy::monomial_by_monomial;
    }
    throw ParseError("unknown strategy '" + name + "'");
}

bool NormalizationTrace::identity_holds() const
{
    return std::all_of(entries.begin(), entries.end(),
                       [](const TraceEntry &e) { return e.s_coeff * e.divisor == e.residual; });
}

GaussianRational NormalForm::coeff(const MultiIndex &alpha) const
{
    auto it = diagonal.find(ExponentPair{alpha, alpha});
    return it == diagonal.end() ? GaussianRational() : it->second;
}

TruncatedSeries NormalForm::to_series() const
{
    TruncatedSeries s(order);
    for (const auto &[e, c] : diagonal) {
        s.set(e, c);
    }
    return s;
}

void require_real_symmetric(const TruncatedSeries &h)
{
    for (const auto &[e, c] : h.terms()) {
        if (!c.is_real()) {
            throw SymmetryViolated("coefficient at " + to_string(e) + " is not real");
        }
        if (h.coeff(e.swapped()) != c) {
            throw SymmetryViolated("h at " + to_string(e) + " differs from h at " + to_string(e.swapped()));
        }
    }
}

namespace
{

void check_quadratic_part(const TruncatedSeries &h, const FrequencyVector &freq)
{
    const ExponentPair q1 = exps(1, 0, 1, 0);
    const ExponentPair q2 = exps(0, 1, 0, 1);
    if (h.coeff(q1) != GaussianRational(freq.lambda1()) || h.coeff(q2) != GaussianRational(freq.lambda2())) {
        throw InvalidHamiltonian("quadratic part must be λ1 x1y1 + λ2 x2y2 with λ = (" + to_string(freq.lambda1())
                                 + ", " + to_string(freq.lambda2()) + ")");
    }
    for (const auto &[e, c] : h.terms()) {
        if (e.degree() > 2) {
            break;
        }
        if (e.degree() > 0 && e != q1 && e != q2) {
            throw InvalidHamiltonian("unexpected low-order term at " + to_string(e));
        }
    }
}

std::vector<std::pair<ExponentPair, GaussianRational>> off_diagonal_at(const TruncatedSeries &s, int d,
                                                                        ProcessingOrder processing)
{
    std::vector<std::pair<ExponentPair, GaussianRational>> out;
    for (const auto &[e, c] : s.terms()) {
        if (e.degree() > d) {
            break;
        }
        if (e.degree() == d && !e.is_diagonal()) {
            out.emplace_back(e, c);
        }
    }
    if (processing == ProcessingOrder::reversed) {
        std::reverse(out.begin(), out.end());
    }
    return out;
}

Rational checked_divisor(const FrequencyVector &freq, const ExponentPair &e)
{
    Rational div = freq.divisor(e);
    if (sgn(div) == 0) {
        throw ResonanceError("λ·(α−β) = 0 at " + to_string(e));
    }
    return div;
}

NormalForm diagonal_of(const TruncatedSeries &s)
{
    NormalForm nf;
    nf.order = s.order();
    for (const auto &[e, c] : s.terms()) {
        if (e.is_diagonal()) {
            nf.diagonal.emplace_hint(nf.diagonal.end(), e, c);
        }
    }
    return nf;
}

} // namespace

NormalizationResult normalize(const TruncatedSeries &h, const FrequencyVector &freq, int order,
                              const NormalizeOptions &options)
{
    if (order > freq.certified_order()) {
        throw OrderExceedsCertification("order " + std::to_string(order) + " exceeds certified order "
                                        + std::to_string(freq.certified_order()));
    }
    if (order < 2) {
        throw std::invalid_argument("normalization order must be at least 2");
    }
    const TruncatedSeries work = h.with_order(order);
    check_quadratic_part(work, freq);
    if (options.require_real_symmetric) {
        require_real_symmetric(work);
    }

    NormalizationResult result;
    result.trace.strategy = options.strategy;
    auto skipped = [&](const ExponentPair &e) { return options.skip_solve && *options.skip_solve == e; };

    switch (options.strategy) {
    case Strategy::all_at_once: {
        TruncatedSeries s(order);
        for (int d = 3; d <= order; ++d) {
            // Residuals at degree d only depend on S below d.
            const TruncatedSeries hd = pushforward(work, GeneratingFunction(s, 3), d);
            for (const auto &[e, r] : off_diagonal_at(hd, d, options.processing)) {
                if (skipped(e)) {
                    continue;
                }
                const GaussianRational div(checked_divisor(freq, e));
                GaussianRational coeff = r / div;
                s.set(e, coeff);
                result.trace.entries.push_back({e, div, std::move(coeff), r});
            }
        }
        GeneratingFunction gf(s, 3);
        result.transformed = pushforward(work, gf, order);
        result.generating_functions.push_back(std::move(gf));
        break;
    }
    case Strategy::degree_by_degree: {
        TruncatedSeries cur = work;
        for (int d = 3; d <= order; ++d) {
            TruncatedSeries sd(order);
            for (const auto &[e, r] : off_diagonal_at(cur, d, options.processing)) {
                if (skipped(e)) {
                    continue;
                }
                const GaussianRational div(checked_divisor(freq, e));
                GaussianRational coeff = r / div;
                sd.set(e, coeff);
                result.trace.entries.push_back({e, div, std::move(coeff), r});
            }
            if (sd.empty()) {
                continue;
            }
            GeneratingFunction gf(std::move(sd), d);
            cur = pushforward(cur, gf, order);
            result.generating_functions.push_back(std::move(gf));
        }
        result.transformed = std::move(cur);
        break;
    }
    case Strategy::monomial_by_monomial: {
        TruncatedSeries cur = work;
        for (int d = 3; d <= order; ++d) {
            for (const auto &[e, unused] : off_diagonal_at(cur, d, options.processing)) {
                if (skipped(e)) {
                    continue;
                }
                const GaussianRational r = cur.coeff(e);
                if (r.is_zero()) {
                    continue;
                }
                const GaussianRational div(checked_divisor(freq, e));
                GaussianRational coeff = r / div;
                GeneratingFunction gf(TruncatedSeries::monomial(e, coeff, order), d);
                cur = pushforward(cur, gf, order);
                result.trace.entries.push_back({e, div, std::move(coeff), r});
                result.generating_functions.push_back(std::move(gf));
            }
        }
        result.transformed = std::move(cur);
        break;
    }
    }

    if (!options.skip_solve) {
        const TruncatedSeries rest = off_diagonal_part(result.transformed);
        if (!rest.empty()) {
            throw std::logic_error("normalization left off-diagonal term at " + to_string(rest.terms().begin()->first));
        }
    }
    result.normal_form = diagonal_of(result.transformed);
    return result;
}

GaussianRational residual_at(const TruncatedSeries &h, const FrequencyVector &freq, const ExponentPair &target)
{
    if (target.is_diagonal()) {
        throw std::invalid_argument("residual_at needs an off-diagonal target, got " + to_string(target));
    }
    const int d = target.degree();
    if (d > freq.certified_order()) {
        throw OrderExceedsCertification("target degree " + std::to_string(d) + " exceeds certified order "
                                        + std::to_string(freq.certified_order()));
    }
    const NormalizationResult below = normalize(h, freq, std::max(2, d - 1));
    const TruncatedSeries hd = pushforward(h.with_order(d), below.generating_functions.front(), d);
    return hd.coeff(target);
}

GaussianRational diagonal_coefficient(const TruncatedSeries &h, const FrequencyVector &freq, const ExponentPair &alpha)
{
    if (!alpha.is_diagonal()) {
        throw std::invalid_argument("diagonal_coefficient needs alpha == beta, got " + to_string(alpha));
    }
    const NormalizationResult r = normalize(h, freq, std::max(2, alpha.degree()));
    return r.normal_form.coeff(alpha.alpha);
}

nlohmann::json trace_entry_to_json(const TraceEntry &e)
{
    nlohmann::json j = exponent_to_json(e.exponent);
    j["divisor"] = gaussian_to_json(e.divisor);
    j["s_coeff"] = gaussian_to_json(e.s_coeff);
    j["residual"] = gaussian_to_json(e.residual);
    return j;
}

TraceEntry trace_entry_from_json(const nlohmann::json &j)
{
    if (!j.is_object() || !j.contains("alpha") || !j.contains("beta") || !j.contains("divisor")
        || !j.contains("s_coeff") || !j.contains("residual")) {
        throw ParseError("trace entry needs alpha, beta, divisor, s_coeff, residual");
    }
    TraceEntry e;
    try {
        e.exponent = ExponentPair{j.at("alpha").get<MultiIndex>(), j.at("beta").get<MultiIndex>()};
    } catch (const nlohmann::json::exception &err) {
        throw ParseError(std::string("bad trace exponent: ") + err.what());
    }
    e.divisor = gaussian_from_json(j.at("divisor"));
    e.s_coeff = gaussian_from_json(j.at("s_coeff"));
    e.residual = gaussian_from_json(j.at("residual"));
    return e;
}

std::string dump_trace_jsonl(const NormalizationTrace &t)
{
    std::ostringstream out;
    for (const auto &e : t.entries) {
        out << trace_entry_to_json(e).dump() << "\n";
    }
    return out.str();
}

} // namespace bnf
