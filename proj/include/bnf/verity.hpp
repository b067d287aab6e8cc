#ifndef BNF_VERITY_HPP
#define BNF_VERITY_HPP

#include "bnf/canonical_transform.hpp"
#include "bnf/normalizer.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bnf
{

enum class Identity {
    // ĥ − 𝒩h against the quadratic correction in T = [S]_d.
    second_order_correction,
    // Coefficient of (h_ab+Q_ab)(h_ba+Q_ba) in ĥ_αα, α = (N, m−1).
    singular_coefficient,
    uniqueness,
    reality_restriction,
    // s_coeff · divisor = residual on every trace entry.
    trace_identity,
};

std::string to_string(Identity id);
// Throws ParseError for unknown names.
Identity parse_identity(const std::string &name);

struct IdentityReport {
    Identity identity = Identity::uniqueness;
    int max_residual_degree = 0;
    TruncatedSeries residual;
    bool passed = false;
    std::string detail;
    // Named exact values worth auditing, in insertion order.
    std::vector<std::pair<std::string, std::string>> quantities;
};

// 𝒩{Σ_{j,k} λ_j (½ T_{x_j} T_{y_j} + y_j T_{y_j y_k} T_{x_k} − x_j T_{x_j y_k} T_{x_k})}
// through `order`, with the double sum taken literally.
TruncatedSeries second_order_correction(const TruncatedSeries &t, const FrequencyVector &freq, int order);

// d = s.min_degree(). Requires h_{αβ} = 0 for α != β below degree d and the
// pushforward to be diagonal below 2d − 1 (HypothesisViolated otherwise);
// compares ĥ − 𝒩h with second_order_correction([S]_d) through 2d − 2.
IdentityReport verify_second_order_correction(const TruncatedSeries &h, const GeneratingFunction &s,
                                              const FrequencyVector &freq);

// Lowest degree >= 3 carrying an off-diagonal term of h; 3 if there is none.
int first_off_diagonal_degree(const TruncatedSeries &h);

// The generating function that normalizes h through 2d − 2, declared with
// minimum degree d.
GeneratingFunction normalizing_generating_function(const TruncatedSeries &h, const FrequencyVector &freq, int d);

enum class SingularForm {
    // m² / λ·(a−b)
    reciprocal_divisor,
    // −m² (λ1 N − λ2) / (λ·(a−b))²
    shifted_frequency,
};

Rational singular_coefficient(const FrequencyVector &freq, int N, int m, SingularForm form);

// Four-point bilinear probe: ĥ_αα with (h_ab, h_ba) in {0,1}², a = (N,0),
// b = (0,m), normalized through 2(N+m) − 2. Compares the uv coefficient with
// singular_coefficient(form).
IdentityReport verify_singular_coefficient(const TruncatedSeries &h_base, const FrequencyVector &freq, int N, int m,
                                           SingularForm form = SingularForm::reciprocal_divisor);

// all_at_once, degree_by_degree and monomial_by_monomial in reversed order
// must give identical transformed Hamiltonians. `corrupt` leaves that exponent unsolved
// in the third run (negative control).
IdentityReport verify_uniqueness(const TruncatedSeries &h, const FrequencyVector &freq, int order,
                                 const std::optional<ExponentPair> &corrupt = std::nullopt);

// With L(ξ, η) = (ξ + iη, ξ − iη): h∘L is real with quadratic part
// λ1(ξ1²+η1²) + λ2(ξ2²+η2²), and the normal form through L is a polynomial
// in ξ1²+η1² and ξ2²+η2². Throws SymmetryViolated for input that is not
// real with h_{αβ} = h_{βα}.
IdentityReport verify_reality_restriction(const TruncatedSeries &h, const FrequencyVector &freq, int order);

// Residual holds s_coeff · divisor − residual at each offending exponent.
IdentityReport verify_trace_identity(const NormalizationTrace &trace);

nlohmann::json report_to_json(const IdentityReport &r);

} // namespace bnf

#endif
