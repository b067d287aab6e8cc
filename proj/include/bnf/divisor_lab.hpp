#ifndef BNF_DIVISOR_LAB_HPP
#define BNF_DIVISOR_LAB_HPP

#include "bnf/normalizer.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace bnf
{

struct DivisorFloor {
    Rational value;
    // The pair (a, b); (b, a) is excluded with it.
    ExponentPair excluded;
    int order_bound = 0;
    // Difference class k = α − β at which the minimum is attained, or (0,0)
    // when the 1/2 cap binds.
    MultiIndex argmin{0, 0};
};

// min(1/2, |λ·(α−β)|) over α != β, |α|+|β| <= |a|+|b|, (α,β) not in
// {(a,b),(b,a)}. Works on difference classes, O(|a|+|b|) evaluations.
DivisorFloor divisor_floor(const Rational &lambda1, const Rational &lambda2, const ExponentPair &ab);

// Same, with |a|+|b| checked against the certified order.
DivisorFloor divisor_floor(const FrequencyVector &freq, const ExponentPair &ab);

struct LiouvilleStage {
    int index = 1;
    long N = 0;
    long m = 0;
    // Approximant of λ1 after this stage was fixed.
    Rational lambda1;
    DivisorFloor delta;
    Rational tau;
    // δ^p / (100 (N+m)!)^q − |N λ1 − m|^q for τ = p/q, at this stage's λ1.
    Rational margin;

    // a = (N, 0), b = (0, m) as the exponent x1^N y2^m.
    ExponentPair pair() const;
};

struct StageSearchOptions {
    // Candidate (N, m) pairs examined across all stages before giving up.
    long budget = 1000000;
    // Extra bits of ε scanned past the first candidate before moving on.
    int epsilon_window = 64;
};

// Stage 1 takes its (N, m) from the continued-fraction convergents of the
// seed; later stages scan N + m upward from twice the previous sum. λ1 is
// moved to m/N ± 2^-k with the smallest admissible k. Throws TauTooSmall for
// τ <= 1 and SearchBudgetExhausted when the budget runs out.
std::vector<LiouvilleStage> build_liouville_stages(const Rational &seed_lambda1, const Rational &tau, int stage_count,
                                                   const StageSearchOptions &options = {});

// Final λ1 of the chain; the seed when there are no stages.
Rational final_lambda1(const std::vector<LiouvilleStage> &stages, const Rational &seed_lambda1);

// Recomputes every inequality against the last stage's λ1: stage gaps,
// 0 < λ1 < 1, non-resonance through 2(N_J + m_J), and
// |N_j λ1 − m_j| < δ_j^τ / (100 (N_j+m_j)!) for every j. Also checks that the
// stored δ and margin of each stage match a recomputation at that stage's λ1.
bool verify_stage_chain(const std::vector<LiouvilleStage> &stages);

// Exact check of |N λ1 − m| < δ^τ / (100 (N+m)!) for τ = p/q.
bool liouville_inequality_holds(long N, long m, const Rational &lambda1, const Rational &delta, const Rational &tau);

Rational liouville_margin(long N, long m, const Rational &lambda1, const Rational &delta, const Rational &tau);

nlohmann::json stages_to_json(const std::vector<LiouvilleStage> &stages);
// Parses the stage certificate. The "verified" banner in the file is ignored
// and recomputed; `verified` receives the fresh value.
std::vector<LiouvilleStage> stages_from_json(const nlohmann::json &j, bool &verified);

} // namespace bnf

#endif
