#ifndef BNF_NORMALIZER_HPP
#define BNF_NORMALIZER_HPP

#include "bnf/canonical_transform.hpp"
#include "bnf/series.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bnf
{

// Frequencies of the quadratic part λ1 x1 y1 + λ2 x2 y2, certified
// non-resonant: λ·k != 0 for every integer k != 0 with |k|_1 <= certified_order.
class FrequencyVector
{
public:
    // Throws ResonanceError naming the first resonant class.
    FrequencyVector(Rational lambda1, Rational lambda2, int certified_order);

    const Rational &lambda1() const { return lambda1_; }
    const Rational &lambda2() const { return lambda2_; }
    int certified_order() const { return certified_order_; }

    // λ·(alpha - beta)
    Rational divisor(const ExponentPair &e) const;

private:
    Rational lambda1_;
    Rational lambda2_;
    int certified_order_;
};

// Smallest |k|_1 of a nonzero integer k with k1 λ1 + k2 λ2 = 0. Rational
// frequencies always resonate somewhere; this is how far out.
Integer first_resonance_order(const Rational &lambda1, const Rational &lambda2);

enum class Strategy {
    // One generating function, solved inductively degree by degree.
    all_at_once,
    // One homogeneous generating function per degree, composed.
    degree_by_degree,
    // One single-monomial generating function per off-diagonal exponent,
    // composed in processing order.
    monomial_by_monomial,
};

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string &name);

enum class ProcessingOrder { graded_lex, reversed };

struct TraceEntry {
    ExponentPair exponent;
    GaussianRational divisor;  // λ·(α−β)
    GaussianRational s_coeff;  // S_{αβ}
    GaussianRational residual; // h_{αβ} + Q_{αβ}(h)
};

struct NormalizationTrace {
    std::vector<TraceEntry> entries;
    Strategy strategy = Strategy::all_at_once;

    // s_coeff * divisor == residual on every entry.
    bool identity_holds() const;
};

struct NormalForm {
    std::map<ExponentPair, GaussianRational> diagonal;
    int order = 0;

    GaussianRational coeff(const MultiIndex &alpha) const;
    TruncatedSeries to_series() const;

    friend bool operator==(const NormalForm &a, const NormalForm &b) = default;
};

struct NormalizeOptions {
    Strategy strategy = Strategy::all_at_once;
    ProcessingOrder processing = ProcessingOrder::graded_lex;
    // Reject inputs that are not real with h_{αβ} = h_{βα}.
    bool require_real_symmetric = false;
    // Negative-control hook: leave this exponent unsolved. The result is then
    // not a normal form and the off-diagonal check is skipped.
    std::optional<ExponentPair> skip_solve;
};

struct NormalizationResult {
    NormalForm normal_form;
    std::vector<GeneratingFunction> generating_functions;
    NormalizationTrace trace;
    // ĥ through the requested order (diagonal unless skip_solve was used).
    TruncatedSeries transformed;
};

// Brings h = λ1 x1 y1 + λ2 x2 y2 + O(3) to Birkhoff normal form through
// `order`. Throws OrderExceedsCertification, ResonanceError,
// InvalidHamiltonian or SymmetryViolated.
NormalizationResult normalize(const TruncatedSeries &h, const FrequencyVector &freq, int order,
                              const NormalizeOptions &options = {});

// h_{ab} + Q_{ab}(h) for target = (a, b), a != b.
GaussianRational residual_at(const TruncatedSeries &h, const FrequencyVector &freq, const ExponentPair &target);

// Normal-form coefficient of x^α y^α; `alpha` must be diagonal.
GaussianRational diagonal_coefficient(const TruncatedSeries &h, const FrequencyVector &freq,
                                      const ExponentPair &alpha);

// Throws SymmetryViolated at the first (α, β) with a non-real coefficient or
// h_{αβ} != h_{βα}.
void require_real_symmetric(const TruncatedSeries &h);

nlohmann::json trace_entry_to_json(const TraceEntry &e);
TraceEntry trace_entry_from_json(const nlohmann::json &j);
// One JSON object per line, in trace order.
std::string dump_trace_jsonl(const NormalizationTrace &t);

} // namespace bnf

#endif
