#include "bnf/divergence_forge.hpp"

#include "bnf/errors.hpp"
#include "bnf/series_io.hpp"

#include <algorithm>
#include <sstream>

namespace bnf
{

using nlohmann::json;

std::pair<int, int> choose_coefficient(const GaussianRational &u0, const GaussianRational &v0)
{
    if (!u0.is_real() || !v0.is_real()) {
        throw NonRealResidual("residuals must be real, got u0 = " + to_string(u0) + ", v0 = " + to_string(v0));
    }
    for (int c : {0, 2, -2}) {
        const Rational prod = (u0.re() + c) * (v0.re() + c);
        if (abs(prod) >= 1) {
            return {c, c};
        }
    }
    // |u0 v0| < 1 and |(u0±2)(v0±2)| < 1 cannot hold together.
    throw std::logic_error("no coefficient pair found for u0 = " + to_string(u0) + ", v0 = " + to_string(v0));
}

bool DivergenceCertificate::complete() const
{
    return std::none_of(stages.begin(), stages.end(), [](const StageCertificate &s) { return s.deferred; });
}

bool DivergenceCertificate::passed() const
{
    return std::all_of(stages.begin(), stages.end(), [](const StageCertificate &s) { return s.deferred || s.passed; });
}

namespace
{

// |z| <= r^-τ, i.e. |z|^{2q} r^{2p} <= 1 for τ = p/q.
bool within_envelope(const GaussianRational &z, const Rational &r, const Rational &tau)
{
    const unsigned long p = tau.get_num().get_ui();
    const unsigned long q = tau.get_den().get_ui();
    return pow(z.norm(), q) * pow(r, 2 * p) <= 1;
}

} // namespace

ForgeResult forge(const std::vector<LiouvilleStage> &stages, const Rational &seed_lambda1, const ForgeOptions &options)
{
    if (!verify_stage_chain(stages)) {
        throw StageCertificateInvalid("stage chain does not verify");
    }
    ForgeResult out;
    DivergenceCertificate &cert = out.certificate;
    cert.lambda1 = final_lambda1(stages, seed_lambda1);
    cert.tau = stages.empty() ? Rational(2) : stages.back().tau;
    cert.max_order = options.max_order;

    int needed = 2;
    for (const auto &st : stages) {
        StageCertificate sc;
        sc.index = st.index;
        sc.N = st.N;
        sc.m = st.m;
        sc.required_order = static_cast<int>(2 * (st.N + st.m) - 2);
        sc.bound = factorial(static_cast<unsigned long>(st.N + st.m));
        sc.side_value = abs(cert.lambda1 * st.N - 1);
        sc.side_holds = sc.side_value > 1;
        sc.deferred = sc.required_order > options.max_order || (!cert.stages.empty() && cert.stages.back().deferred);
        if (!sc.deferred) {
            needed = std::max(needed, sc.required_order);
        }
        cert.stages.push_back(std::move(sc));
    }
    cert.working_order = options.order ? *options.order : needed;
    if (cert.working_order > options.max_order) {
        throw OrderBudgetExceeded("order " + std::to_string(cert.working_order) + " exceeds the budget "
                                  + std::to_string(options.max_order));
    }
    if (cert.working_order < needed) {
        throw std::invalid_argument("order " + std::to_string(cert.working_order)
                                    + " is below what the certified stages need (" + std::to_string(needed) + ")");
    }

    const FrequencyVector freq(cert.lambda1, Rational(1), cert.working_order);
    TruncatedSeries h(cert.working_order);
    h.set(exps(1, 0, 1, 0), GaussianRational(cert.lambda1));
    h.set(exps(0, 1, 0, 1), GaussianRational(1));

    for (std::size_t j = 0; j < stages.size(); ++j) {
        StageCertificate &sc = cert.stages[j];
        if (sc.deferred) {
            continue;
        }
        const ExponentPair ab = stages[j].pair();
        const ExponentPair ba = ab.swapped();
        sc.choice.stage = sc.index;
        sc.choice.u0 = residual_at(h, freq, ab);
        sc.choice.v0 = residual_at(h, freq, ba);
        std::tie(sc.choice.u, sc.choice.v) = choose_coefficient(sc.choice.u0, sc.choice.v0);
        h.set(ab, GaussianRational(sc.choice.u));
        h.set(ba, GaussianRational(sc.choice.v));

        const MultiIndex alpha = sc.alpha();
        sc.nf_coeff = diagonal_coefficient(h, freq, ExponentPair{alpha, alpha});
        sc.passed = sc.nf_coeff.norm() > Rational(sc.bound * sc.bound);

        sc.delta = divisor_floor(cert.lambda1, Rational(1), ab).value;
        sc.u0_within_envelope = within_envelope(sc.choice.u0, sc.delta, cert.tau);
        sc.v0_within_envelope = within_envelope(sc.choice.v0, sc.delta, cert.tau);
    }

    out.hamiltonian = h;
    NormalizeOptions nopts;
    nopts.strategy = options.strategy;
    out.normalization = normalize(h, freq, cert.working_order, nopts);
    return out;
}

void require_growth(const DivergenceCertificate &cert)
{
    for (const auto &sc : cert.stages) {
        if (sc.deferred || sc.passed) {
            continue;
        }
        std::string why;
        if (!sc.u0_within_envelope) {
            why += " |u0| = " + approx_decimal(abs(sc.choice.u0.re())) + " exceeds δ^-τ;";
        }
        if (!sc.v0_within_envelope) {
            why += " |v0| = " + approx_decimal(abs(sc.choice.v0.re())) + " exceeds δ^-τ;";
        }
        if (why.empty()) {
            why = " residuals inside the δ^-τ envelope;";
        }
        throw GrowthCheckFailed("stage " + std::to_string(sc.index) + " (N=" + std::to_string(sc.N)
                                + ", m=" + std::to_string(sc.m) + "): |ĥ| = " + approx_decimal(abs(sc.nf_coeff.re()))
                                + " <= " + sc.bound.get_str() + ";" + why);
    }
}

json certificate_to_json(const DivergenceCertificate &cert)
{
    json stages = json::array();
    for (const auto &sc : cert.stages) {
        json s{{"j", sc.index},
               {"N", sc.N},
               {"m", sc.m},
               {"alpha", {sc.alpha()[0], sc.alpha()[1]}},
               {"required_order", sc.required_order},
               {"status", sc.deferred ? "deferred" : "certified"},
               {"bound", sc.bound.get_str()},
               {"side_condition", {{"abs_lambda1_N_minus_1", to_string(sc.side_value)}, {"holds", sc.side_holds}}}};
        if (!sc.deferred) {
            s["choice"] = json{{"u", sc.choice.u},
                               {"v", sc.choice.v},
                               {"u0", gaussian_to_json(sc.choice.u0)},
                               {"v0", gaussian_to_json(sc.choice.v0)}};
            s["nf_coeff"] = gaussian_to_json(sc.nf_coeff);
            s["passed"] = sc.passed;
            s["envelope"] = json{{"delta", to_string(sc.delta)},
                                 {"u0_within", sc.u0_within_envelope},
                                 {"v0_within", sc.v0_within_envelope}};
        }
        stages.push_back(std::move(s));
    }
    return json{{"lambda1", to_string(cert.lambda1)},
                {"lambda2", "1/1"},
                {"tau", to_string(cert.tau)},
                {"max_order", cert.max_order},
                {"working_order", cert.working_order},
                {"complete", cert.complete()},
                {"passed", cert.passed()},
                {"stages", std::move(stages)}};
}

std::vector<GrowthRow> growth_report(const NormalForm &nf, const NormalizationTrace &trace)
{
    std::vector<GrowthRow> rows;
    for (int d = 2; d <= nf.order; d += 2) {
        GrowthRow row;
        row.degree = d;
        row.factorial_bound = factorial(static_cast<unsigned long>(d / 2 + 1));
        Rational best_norm(0);
        for (const auto &[e, c] : nf.diagonal) {
            if (e.degree() == d) {
                best_norm = std::max(best_norm, c.norm());
            }
        }
        // |z| from |z|^2: exact when the coefficient is real.
        for (const auto &[e, c] : nf.diagonal) {
            if (e.degree() == d && c.norm() == best_norm && c.is_real()) {
                row.max_abs_coeff = abs(c.re());
                break;
            }
        }
        if (row.max_abs_coeff == 0 && best_norm != 0) {
            mpf_class f(best_norm, 256);
            f = sqrt(f);
            row.max_abs_coeff = Rational(f);
        }
        for (const auto &t : trace.entries) {
            if (t.exponent.degree() <= d) {
                Rational v = abs(t.divisor.re());
                if (!row.divisor_min || v < *row.divisor_min) {
                    row.divisor_min = std::move(v);
                }
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string growth_report_csv(const std::vector<GrowthRow> &rows)
{
    std::ostringstream out;
    out << "degree,max_abs_coeff_approx,factorial_bound,divisor_min_approx\n";
    for (const auto &r : rows) {
        out << r.degree << "," << approx_decimal(r.max_abs_coeff) << "," << r.factorial_bound.get_str() << ","
            << (r.divisor_min ? approx_decimal(*r.divisor_min) : "") << "\n";
    }
    return out.str();
}

} // namespace bnf
