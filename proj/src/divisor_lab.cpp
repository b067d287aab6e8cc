#include "bnf/divisor_lab.hpp"

#include "bnf/errors.hpp"
#include "bnf/series_io.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>

namespace bnf
{

using nlohmann::json;

namespace
{

Integer floor_of(const Rational &r)
{
    Integer out;
    mpz_fdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return out;
}

// Canonical sign for a difference class: first nonzero entry positive.
MultiIndex canonical_class(MultiIndex k)
{
    if (k[0] < 0 || (k[0] == 0 && k[1] < 0)) {
        k = {-k[0], -k[1]};
    }
    return k;
}

unsigned long as_ulong(const Integer &z, const char *what)
{
    if (sgn(z) < 0 || !z.fits_ulong_p()) {
        throw std::invalid_argument(std::string(what) + " out of range");
    }
    return z.get_ui();
}

} // namespace

ExponentPair LiouvilleStage::pair() const
{
    return exps(static_cast<int>(N), 0, 0, static_cast<int>(m));
}

DivisorFloor divisor_floor(const Rational &lambda1, const Rational &lambda2, const ExponentPair &ab)
{
    if (sgn(lambda2) == 0) {
        throw std::invalid_argument("divisor_floor needs λ2 != 0");
    }
    DivisorFloor out;
    out.excluded = ab;
    out.order_bound = ab.degree();
    out.value = Rational(1, 2);

    // (a, b) is the only representative of its class within the bound when a
    // and b have disjoint support; otherwise the class survives through
    // (a − min(a,b), b − min(a,b)).
    std::optional<MultiIndex> excluded;
    const bool disjoint = std::min(ab.alpha[0], ab.beta[0]) == 0 && std::min(ab.alpha[1], ab.beta[1]) == 0;
    if (!ab.is_diagonal() && disjoint) {
        excluded = canonical_class({ab.alpha[0] - ab.beta[0], ab.alpha[1] - ab.beta[1]});
    }

    // Over the common denominator q1 q2: |k1 λ1 + k2 λ2| = |k1 A + k2 B| / (q1 q2).
    const Integer A = lambda1.get_num() * lambda2.get_den();
    const Integer B = lambda2.get_num() * lambda1.get_den();
    const Integer den = lambda1.get_den() * lambda2.get_den();
    Integer best = den / 2 + 1; // anything above den/2 loses to the cap
    bool found = false;
    const int bound = out.order_bound;
    Integer v;
    for (int k1 = 0; k1 <= bound; ++k1) {
        const int reach = bound - k1;
        const long lo = k1 == 0 ? 1 : -reach;
        const long hi = reach;
        if (lo > hi) {
            continue;
        }
        // |k1 A + k2 B| is V-shaped in k2 with its vertex at -k1 A / B.
        const Integer target = -A * k1;
        Integer f;
        mpz_fdiv_q(f.get_mpz_t(), target.get_mpz_t(), B.get_mpz_t());
        std::set<long> cands{lo, lo + 1, hi - 1, hi};
        for (long off = -1; off <= 2; ++off) {
            const Integer c = f + off;
            if (c >= lo && c <= hi) {
                cands.insert(c.get_si());
            }
        }
        for (long k2 : cands) {
            if (k2 < lo || k2 > hi) {
                continue;
            }
            const MultiIndex k{k1, static_cast<int>(k2)};
            if (excluded && k == *excluded) {
                continue;
            }
            v = A * k1 + B * k2;
            mpz_abs(v.get_mpz_t(), v.get_mpz_t());
            if (v < best) {
                best = v;
                found = true;
                out.argmin = k;
            }
        }
    }
    const Rational value(best, den);
    if (found && value < out.value) {
        out.value = value;
        out.value.canonicalize();
    } else {
        out.argmin = {0, 0};
    }
    return out;
}

DivisorFloor divisor_floor(const FrequencyVector &freq, const ExponentPair &ab)
{
    if (ab.degree() > freq.certified_order()) {
        throw OrderExceedsCertification("|a|+|b| = " + std::to_string(ab.degree()) + " exceeds certified order "
                                        + std::to_string(freq.certified_order()));
    }
    return divisor_floor(freq.lambda1(), freq.lambda2(), ab);
}

Rational liouville_margin(long N, long m, const Rational &lambda1, const Rational &delta, const Rational &tau)
{
    const unsigned long p = as_ulong(tau.get_num(), "τ numerator");
    const unsigned long q = as_ulong(tau.get_den(), "τ denominator");
    const Rational scale(Integer(100) * factorial(static_cast<unsigned long>(N + m)));
    const Rational gap = abs(lambda1 * N - m);
    return pow(delta, p) / pow(scale, q) - pow(gap, q);
}

bool liouville_inequality_holds(long N, long m, const Rational &lambda1, const Rational &delta, const Rational &tau)
{
    return sgn(liouville_margin(N, m, lambda1, delta, tau)) > 0;
}

Rational final_lambda1(const std::vector<LiouvilleStage> &stages, const Rational &seed_lambda1)
{
    return stages.empty() ? seed_lambda1 : stages.back().lambda1;
}

namespace
{

struct Candidate {
    long N;
    long m;
};

std::vector<Candidate> convergent_candidates(const Rational &seed)
{
    std::vector<Candidate> out;
    Integer h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
    Integer num = seed.get_num(), den = seed.get_den();
    while (sgn(den) != 0) {
        Integer a;
        mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        const Integer h = a * h_prev + h_prev2;
        const Integer k = a * k_prev + k_prev2;
        h_prev2 = h_prev;
        h_prev = h;
        k_prev2 = k_prev;
        k_prev = k;
        const Integer rem = num - a * den;
        num = den;
        den = rem;
        if (h >= 1 && h < k && h + k >= 3 && k.fits_slong_p()) {
            out.push_back({k.get_si(), h.get_si()});
        }
    }
    return out;
}

// Candidates with N + m = s and m/N nearest λ.
std::vector<Candidate> sum_candidates(long s, const Rational &lambda)
{
    const Integer f = floor_of(lambda * s / (lambda + 1));
    std::vector<Candidate> out;
    for (long off = 0; off <= 1; ++off) {
        const Integer mz = f + off;
        if (!mz.fits_slong_p()) {
            continue;
        }
        const long m = mz.get_si();
        const long N = s - m;
        if (m >= 1 && N > m) {
            out.push_back({N, m});
        }
    }
    return out;
}

class StageSearch
{
public:
    StageSearch(Rational tau, const StageSearchOptions &options) : tau_(std::move(tau)), options_(options)
    {
        p_ = as_ulong(tau_.get_num(), "τ numerator");
        q_ = as_ulong(tau_.get_den(), "τ denominator");
    }

    void spend()
    {
        if (--remaining_ < 0) {
            throw SearchBudgetExhausted("no admissible (N, m, ε) within a budget of "
                                        + std::to_string(options_.budget) + " candidates");
        }
    }

    std::optional<LiouvilleStage> try_candidate(const Candidate &c, const std::vector<LiouvilleStage> &prior)
    {
        spend();
        if (std::gcd(c.N, c.m) != 1) {
            return std::nullopt;
        }
        const Rational base(Integer(c.m), Integer(c.N));
        // Earlier stages pin λ1 to a window of width below 1/(200 (N_i+m_i)!).
        for (const auto &st : prior) {
            const Rational w = abs(base * st.N - st.m) * 200 * Rational(factorial(st.N + st.m));
            if (w >= 1) {
                return std::nullopt;
            }
        }
        const ExponentPair pair = exps(static_cast<int>(c.N), 0, 0, static_cast<int>(c.m));
        const Rational delta0 = divisor_floor(base, Rational(1), pair).value;
        if (sgn(delta0) == 0) {
            return std::nullopt;
        }
        const Rational scale(Integer(100) * factorial(static_cast<unsigned long>(c.N + c.m)));
        const long D = c.N + c.m;

        // With |ε| = 2^-k: N |ε| 100 (N+m)! < δ^τ <= 2^-τ.
        const Integer lower = Integer(c.N) * 100 * factorial(static_cast<unsigned long>(D));
        long k = static_cast<long>(mpz_sizeinbase(lower.get_mpz_t(), 2)) - 1 + static_cast<long>(floor_of(tau_).get_si());
        // Prior stages can only pass if they pass with the gap shrunk and the
        // floor raised by the largest |ε| still in play.
        const Rational eps_max(Integer(1), Integer(1) << static_cast<mp_bitcnt_t>(k));
        for (const auto &st : prior) {
            const Rational gap = abs(base * st.N - st.m) - eps_max * st.N;
            Rational d = divisor_floor(base, Rational(1), st.pair()).value + eps_max * (st.N + st.m);
            if (d > Rational(1, 2)) {
                d = Rational(1, 2);
            }
            const Rational scaled = gap * 100 * Rational(factorial(st.N + st.m));
            if (sgn(gap) > 0 && pow(scaled, q_) >= pow(d, p_)) {
                return std::nullopt;
            }
        }
        long first_viable = -1;
        for (;; ++k) {
            const Rational eps = Rational(Integer(1), Integer(1) << static_cast<mp_bitcnt_t>(k));
            // δ moves by at most D |ε| away from its value at m/N.
            Rational delta_hi = delta0 + eps * D;
            if (delta_hi > Rational(1, 2)) {
                delta_hi = Rational(1, 2);
            }
            if (pow(eps * c.N * scale, q_) >= pow(delta_hi, p_)) {
                continue;
            }
            if (first_viable < 0) {
                first_viable = k;
            }
            if (k > first_viable + options_.epsilon_window) {
                return std::nullopt;
            }
            for (int sign : {1, -1}) {
                auto stage = check(c, pair, base + eps * sign, scale, prior);
                if (stage) {
                    return stage;
                }
            }
        }
    }

private:
    std::optional<LiouvilleStage> check(const Candidate &c, const ExponentPair &pair, const Rational &lambda,
                                        const Rational &scale, const std::vector<LiouvilleStage> &prior) const
    {
        if (sgn(lambda) <= 0 || lambda >= 1) {
            return std::nullopt;
        }
        if (first_resonance_order(lambda, Rational(1)) <= 2 * (c.N + c.m)) {
            return std::nullopt;
        }
        // Earlier stages have small floors and fail most candidates cheaply.
        for (const auto &st : prior) {
            const Rational d = divisor_floor(lambda, Rational(1), st.pair()).value;
            if (!liouville_inequality_holds(st.N, st.m, lambda, d, tau_)) {
                return std::nullopt;
            }
        }
        DivisorFloor delta = divisor_floor(lambda, Rational(1), pair);
        const Rational gap = abs(lambda * c.N - c.m);
        Rational margin = pow(delta.value, p_) / pow(scale, q_) - pow(gap, q_);
        if (sgn(margin) <= 0) {
            return std::nullopt;
        }
        LiouvilleStage st;
        st.index = static_cast<int>(prior.size()) + 1;
        st.N = c.N;
        st.m = c.m;
        st.lambda1 = lambda;
        st.delta = std::move(delta);
        st.tau = tau_;
        st.margin = std::move(margin);
        return st;
    }

    Rational tau_;
    StageSearchOptions options_;
    unsigned long p_ = 0;
    unsigned long q_ = 0;
    long remaining_ = options_.budget;
};

} // namespace

std::vector<LiouvilleStage> build_liouville_stages(const Rational &seed_lambda1, const Rational &tau, int stage_count,
                                                   const StageSearchOptions &options)
{
    if (tau <= 1) {
        throw TauTooSmall("τ must exceed 1, got " + to_string(tau));
    }
    if (sgn(seed_lambda1) <= 0 || seed_lambda1 >= 1) {
        throw std::invalid_argument("seed λ1 must lie in (0, 1), got " + to_string(seed_lambda1));
    }
    if (stage_count < 0) {
        throw std::invalid_argument("stage count must be non-negative");
    }
    StageSearch search(tau, options);
    std::vector<LiouvilleStage> stages;
    while (static_cast<int>(stages.size()) < stage_count) {
        std::optional<LiouvilleStage> found;
        if (stages.empty()) {
            for (const auto &c : convergent_candidates(seed_lambda1)) {
                if ((found = search.try_candidate(c, stages))) {
                    break;
                }
            }
        }
        const Rational lambda = final_lambda1(stages, seed_lambda1);
        long s = stages.empty() ? 3 : 2 * (stages.back().N + stages.back().m) + 1;
        for (; !found; ++s) {
            const auto cands = sum_candidates(s, lambda);
            if (cands.empty()) {
                search.spend();
            }
            for (const auto &c : cands) {
                if ((found = search.try_candidate(c, stages))) {
                    break;
                }
            }
        }
        stages.push_back(std::move(*found));
    }
    return stages;
}

bool verify_stage_chain(const std::vector<LiouvilleStage> &stages)
{
    if (stages.empty()) {
        return true;
    }
    const Rational &lambda = stages.back().lambda1;
    const Rational &tau = stages.back().tau;
    if (tau <= 1 || sgn(lambda) <= 0 || lambda >= 1) {
        return false;
    }
    const long last_sum = stages.back().N + stages.back().m;
    if (first_resonance_order(lambda, Rational(1)) <= 2 * last_sum) {
        return false;
    }
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const LiouvilleStage &st = stages[i];
        if (st.index != static_cast<int>(i) + 1 || st.N < 1 || st.m < 1 || st.tau != tau) {
            return false;
        }
        if (i > 0 && st.N + st.m <= 2 * (stages[i - 1].N + stages[i - 1].m)) {
            return false;
        }
        const ExponentPair pair = st.pair();
        if (st.delta.excluded != pair || st.delta.order_bound != pair.degree()) {
            return false;
        }
        // Stored values must match this stage's own approximant.
        const DivisorFloor own = divisor_floor(st.lambda1, Rational(1), pair);
        if (own.value != st.delta.value || liouville_margin(st.N, st.m, st.lambda1, own.value, tau) != st.margin) {
            return false;
        }
        const DivisorFloor now = divisor_floor(lambda, Rational(1), pair);
        if (sgn(now.value) <= 0 || !liouville_inequality_holds(st.N, st.m, lambda, now.value, tau)) {
            return false;
        }
    }
    return true;
}

json stages_to_json(const std::vector<LiouvilleStage> &stages)
{
    json list = json::array();
    for (const auto &st : stages) {
        list.push_back(json{{"j", st.index},
                            {"N", st.N},
                            {"m", st.m},
                            {"lambda1", to_string(st.lambda1)},
                            {"delta", to_string(st.delta.value)},
                            {"delta_argmin", {st.delta.argmin[0], st.delta.argmin[1]}},
                            {"tau", to_string(st.tau)},
                            {"margin", to_string(st.margin)}});
    }
    return json{{"verified", verify_stage_chain(stages)}, {"stages", std::move(list)}};
}

std::vector<LiouvilleStage> stages_from_json(const json &j, bool &verified)
{
    if (!j.is_object() || !j.contains("stages") || !j.at("stages").is_array()) {
        throw ParseError("stage certificate needs a 'stages' array");
    }
    std::vector<LiouvilleStage> stages;
    for (const auto &s : j.at("stages")) {
        try {
            LiouvilleStage st;
            st.index = s.at("j").get<int>();
            st.N = s.at("N").get<long>();
            st.m = s.at("m").get<long>();
            st.lambda1 = parse_rational(s.at("lambda1").get<std::string>());
            st.tau = parse_rational(s.at("tau").get<std::string>());
            st.margin = parse_rational(s.at("margin").get<std::string>());
            if (st.N < 1 || st.m < 1) {
                throw ParseError("stage needs N, m >= 1");
            }
            st.delta.value = parse_rational(s.at("delta").get<std::string>());
            st.delta.excluded = st.pair();
            st.delta.order_bound = st.delta.excluded.degree();
            if (s.contains("delta_argmin")) {
                st.delta.argmin = s.at("delta_argmin").get<MultiIndex>();
            }
            stages.push_back(std::move(st));
        } catch (const json::exception &err) {
            throw ParseError(std::string("bad stage entry: ") + err.what());
        }
    }
    verified = verify_stage_chain(stages);
    return stages;
}

} // namespace bnf
