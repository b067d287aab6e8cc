#ifndef BNF_DIVERGENCE_FORGE_HPP
#define BNF_DIVERGENCE_FORGE_HPP

#include "bnf/divisor_lab.hpp"
#include "bnf/normalizer.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bnf
{

struct CoefficientChoice {
    int stage = 0;
    int u = 0;
    int v = 0;
    // Residuals at (a, b) and (b, a) with the stage coefficient held at 0.
    GaussianRational u0;
    GaussianRational v0;
};

// First of (0,0), (2,2), (-2,-2) with |(u0+u)(v0+v)| >= 1. Throws
// NonRealResidual for non-real input.
std::pair<int, int> choose_coefficient(const GaussianRational &u0, const GaussianRational &v0);

struct StageCertificate {
    int index = 0;
    long N = 0;
    long m = 0;
    // Normalization order the stage needs: 2(N+m) - 2.
    int required_order = 0;
    // Beyond the order budget: no coefficient, not part of h.
    bool deferred = false;

    CoefficientChoice choice;
    // ĥ at x^α y^α, α = (N, m-1).
    GaussianRational nf_coeff;
    Integer bound; // (N+m)!
    bool passed = false;

    // |λ1 N - 1| > 1
    Rational side_value;
    bool side_holds = false;

    // |u0|, |v0| against δ^-τ.
    Rational delta;
    bool u0_within_envelope = false;
    bool v0_within_envelope = false;

    MultiIndex alpha() const { return {static_cast<int>(N), static_cast<int>(m - 1)}; }
};

struct DivergenceCertificate {
    Rational lambda1;
    Rational tau;
    int max_order = 0;
    int working_order = 0;
    std::vector<StageCertificate> stages;

    // No stage was deferred.
    bool complete() const;
    // Every certified stage passed.
    bool passed() const;
};

struct ForgeOptions {
    // Largest normalization order the forge may run; stages needing more
    // are deferred.
    int max_order = 12;
    // Order of the final normalization; defaults to the largest order a
    // certified stage needed (at least 2).
    std::optional<int> order;
    Strategy strategy = Strategy::all_at_once;
};

struct ForgeResult {
    TruncatedSeries hamiltonian;
    DivergenceCertificate certificate;
    // Normal form of the forged h through certificate.working_order.
    NormalizationResult normalization;
};

// Builds h = λ1 x1 y1 + x2 y2 + Σ_j c_j (x1^N_j y2^m_j + x2^m_j y1^N_j) with
// c_j from choose_coefficient on the residuals at (a_j, b_j), (b_j, a_j).
// Throws StageCertificateInvalid if the chain does not verify.
ForgeResult forge(const std::vector<LiouvilleStage> &stages, const Rational &seed_lambda1,
                  const ForgeOptions &options = {});

// Throws GrowthCheckFailed naming the first failing stage and whether its
// residuals stayed inside the δ^-τ envelope.
void require_growth(const DivergenceCertificate &cert);

nlohmann::json certificate_to_json(const DivergenceCertificate &cert);

struct GrowthRow {
    int degree = 0;
    Rational max_abs_coeff;
    Integer factorial_bound; // (degree/2 + 1)!
    std::optional<Rational> divisor_min;
};

// One row per even degree 2..nf.order: largest |ĥ_αα| with 2|α| = degree,
// the factorial it is measured against, and the smallest |λ·(α−β)| among
// trace entries of degree <= degree.
std::vector<GrowthRow> growth_report(const NormalForm &nf, const NormalizationTrace &trace);
// CSV with header degree,max_abs_coeff_approx,factorial_bound,divisor_min_approx.
std::string growth_report_csv(const std::vector<GrowthRow> &rows);

} // namespace bnf

#endif
