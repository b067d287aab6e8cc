// Acceptance run: one PASS/FAIL line per criterion. Every comparison is exact
// unless a tolerance is printed next to it.

#include "bnf/divergence_forge.hpp"
#include "bnf/divisor_lab.hpp"
#include "bnf/verity.hpp"
#include "support.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace bnf;
namespace fs = std::filesystem;

namespace
{

// Pinned limits.
constexpr double exactness_seconds = 10.0;
constexpr int random_hamiltonians = 100;
constexpr int random_pairs = 25;
constexpr int random_generating_functions = 50;
constexpr int reality_order = 8;
constexpr unsigned corpus_seed = 20240611;

struct Verdict {
    bool passed = false;
    std::string summary;
    std::vector<std::string> info;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixed(double v, int digits = 2)
{
    std::ostringstream s;
    s.precision(digits);
    s << std::fixed << v;
    return s.str();
}

const Rational lam1(2, 7);
const Rational lam2(1);

std::vector<TruncatedSeries> corpus()
{
    std::mt19937 rng(corpus_seed);
    std::vector<TruncatedSeries> hs;
    for (int i = 0; i < random_hamiltonians; ++i) {
        hs.push_back(testing::random_real_hamiltonian(rng, lam1, lam2, 6, 10));
    }
    return hs;
}

Verdict homological_exactness()
{
    const auto hs = corpus();
    const FrequencyVector f(lam1, lam2, 6);
    const auto t0 = std::chrono::steady_clock::now();
    int clean = 0;
    std::size_t entries = 0;
    for (const auto &h : hs) {
        const NormalizationResult r = normalize(h, f, 6);
        entries += r.trace.entries.size();
        clean += off_diagonal_part(r.transformed).empty() && r.trace.identity_holds();
    }
    const double t = seconds_since(t0);
    Verdict v;
    v.passed = clean == random_hamiltonians && t < exactness_seconds;
    v.summary = std::to_string(clean) + "/" + std::to_string(random_hamiltonians)
                + " exact (off-diagonal = 0, s*divisor = residual), " + std::to_string(entries) + " trace entries, "
                + fixed(t) + " s < " + fixed(exactness_seconds, 0) + " s";
    return v;
}

Verdict uniqueness_oracle()
{
    const auto hs = corpus();
    const FrequencyVector f(lam1, lam2, 6);
    int agree = 0;
    for (const auto &h : hs) {
        const NormalForm a = normalize(h, f, 6).normal_form;
        const NormalForm b = normalize(h, f, 6, {Strategy::degree_by_degree}).normal_form;
        const NormalForm c =
            normalize(h, f, 6, {Strategy::monomial_by_monomial, ProcessingOrder::reversed}).normal_form;
        agree += a == b && a == c;
    }
    Verdict v;
    v.passed = agree == random_hamiltonians;
    v.summary = std::to_string(agree) + "/" + std::to_string(random_hamiltonians)
                + " identical diagonals across all-at-once, by-degree and reversed by-monomial";
    return v;
}

Verdict second_order_identity()
{
    std::mt19937 rng(corpus_seed + 3);
    const FrequencyVector f(lam1, lam2, 8);
    int ok = 0;
    int per_d[2] = {0, 0};
    std::string first_failure;
    for (int t = 0; t < random_pairs; ++t) {
        const int d = 3 + t % 2;
        TruncatedSeries h = testing::quadratic(lam1, lam2, 2 * d - 2);
        for (int k = 0; k < 8; ++k) {
            const ExponentPair e = testing::random_exponent(rng, 3);
            if (e.degree() < 3 || e.degree() > 2 * d - 2 || (!e.is_diagonal() && e.degree() < d)) {
                continue;
            }
            h.set(e, GaussianRational(testing::random_small_rational(rng)));
        }
        const IdentityReport r = verify_second_order_correction(h, normalizing_generating_function(h, f, d), f);
        ok += r.passed;
        per_d[d - 3] += r.passed;
        if (!r.passed && first_failure.empty()) {
            first_failure = r.detail;
        }
    }
    Verdict v;
    v.passed = ok == random_pairs;
    v.summary = std::to_string(ok) + "/" + std::to_string(random_pairs) + " zero residual through 2d-2 (d=3: "
                + std::to_string(per_d[0]) + ", d=4: " + std::to_string(per_d[1]) + ")";
    if (!first_failure.empty()) {
        v.info.push_back("first failure: " + first_failure);
    }
    v.info.push_back("correction read as a double sum over j, k of all three terms");
    return v;
}

Verdict singular_coefficient_probe()
{
    const FrequencyVector f(lam1, lam2, 8);
    const TruncatedSeries base = testing::quadratic(lam1, lam2, 8);
    Verdict v;
    v.passed = true;
    std::string parts;
    for (auto [N, m] : {std::pair{2, 1}, {3, 1}, {3, 2}}) {
        const IdentityReport stated = verify_singular_coefficient(base, f, N, m, SingularForm::shifted_frequency);
        const IdentityReport alt = verify_singular_coefficient(base, f, N, m, SingularForm::reciprocal_divisor);
        v.passed = v.passed && stated.passed;
        parts += " (" + std::to_string(N) + "," + std::to_string(m) + "): probe " + stated.quantities[2].second
                 + " vs stated " + stated.quantities[3].second + ";";
        v.info.push_back("(" + std::to_string(N) + "," + std::to_string(m) + ") probe equals m^2/(lambda.(a-b)) = "
                         + alt.quantities[3].second + ": " + (alt.passed ? "yes" : "no"));
    }
    v.summary = "stated closed form -m^2(l1 N - l2)/(lambda.(a-b))^2 at lambda = (2/7, 1):" + parts;
    return v;
}

Verdict canonicity()
{
    std::mt19937 rng(corpus_seed + 5);
    int ok = 0;
    for (int t = 0; t < random_generating_functions; ++t) {
        const int d = 3 + t % 3;
        const int order = 2 * d;
        const GeneratingFunction s(testing::random_series(rng, d, order, 6, order + 1), d);
        ok += canonicity_check(s, order) && canonicity_check(solve_mixed_map(s, order));
    }
    Verdict v;
    v.passed = ok == random_generating_functions;
    v.summary = std::to_string(ok) + "/" + std::to_string(random_generating_functions)
                + " generating functions (d = 3..5) satisfy every canonical bracket through order 2d, both directions";
    return v;
}

struct TwoStageRun {
    std::vector<LiouvilleStage> stages;
    ForgeResult forged;
    double search_seconds = 0;
};

const TwoStageRun &two_stage_run()
{
    static const TwoStageRun run = [] {
        TwoStageRun r;
        const auto t0 = std::chrono::steady_clock::now();
        r.stages = build_liouville_stages(Rational(1, 2), Rational(2), 2);
        r.search_seconds = seconds_since(t0);
        r.forged = forge(r.stages, Rational(1, 2));
        return r;
    }();
    return run;
}

Verdict finite_stage_certificate()
{
    const TwoStageRun &run = two_stage_run();
    const DivergenceCertificate &cert = run.forged.certificate;
    Verdict v;
    bool coeffs_ok = true;
    for (const auto &[e, c] : run.forged.hamiltonian.terms()) {
        if (e.degree() > 2) {
            coeffs_ok = coeffs_ok && c.is_real() && (c.re() == 0 || abs(c.re()) == 2);
        }
    }
    std::string parts;
    bool all_certified = true;
    for (const auto &sc : cert.stages) {
        parts += " stage " + std::to_string(sc.index) + " (N=" + std::to_string(sc.N) + ", m=" + std::to_string(sc.m)
                 + "): ";
        if (sc.deferred) {
            all_certified = false;
            parts += "not certified, needs normalization to order " + std::to_string(sc.required_order)
                     + " (budget " + std::to_string(cert.max_order) + ");";
        } else {
            all_certified = all_certified && sc.passed;
            parts += "|h^| = " + approx_decimal(abs(sc.nf_coeff.re())) + (sc.passed ? " > " : " <= ")
                     + sc.bound.get_str() + ";";
            if (!sc.u0_within_envelope || !sc.v0_within_envelope) {
                v.info.push_back("stage " + std::to_string(sc.index) + " residual outside the delta^-tau envelope: u0 = "
                                 + to_string(sc.choice.u0) + ", v0 = " + to_string(sc.choice.v0));
            }
            v.info.push_back("stage " + std::to_string(sc.index) + " side condition |l1 N - 1| = "
                             + approx_decimal(sc.side_value) + (sc.side_holds ? " > 1" : " <= 1 (does not hold)"));
        }
    }
    v.passed = coeffs_ok && all_certified && cert.stages.size() == 2;
    v.summary = "tau = 2, two stages;" + parts + " coefficients in {0, +-2}: " + (coeffs_ok ? "yes" : "no");
    v.info.push_back("lambda1 denominator has " + std::to_string(mpz_sizeinbase(cert.lambda1.get_den_mpz_t(), 2))
                     + " bits; stage search " + fixed(run.search_seconds) + " s");
    return v;
}

Verdict liouville_chain()
{
    const TwoStageRun &run = two_stage_run();
    Verdict v;
    const bool chain = verify_stage_chain(run.stages);
    bool strict = true;
    const Rational &lam = run.stages.back().lambda1;
    std::string parts;
    for (const auto &st : run.stages) {
        const Rational delta = divisor_floor(lam, Rational(1), st.pair()).value;
        const Rational margin = liouville_margin(st.N, st.m, lam, delta, st.tau);
        strict = strict && sgn(margin) > 0;
        parts += " stage " + std::to_string(st.index) + " margin " + approx_decimal(margin) + ";";
    }
    v.passed = chain && strict && run.stages.size() == 2;
    v.summary = std::string("verify_stage_chain: ") + (chain ? "true" : "false") + ";" + parts
                + " all inequalities strict at the final lambda1";
    return v;
}

Verdict reality_restriction()
{
    const TwoStageRun &run = two_stage_run();
    const FrequencyVector f(run.forged.certificate.lambda1, Rational(1), reality_order);
    const IdentityReport r = verify_reality_restriction(run.forged.hamiltonian.with_order(reality_order), f,
                                                        reality_order);
    Verdict v;
    v.passed = r.passed;
    v.summary = "forged h through order " + std::to_string(reality_order)
                + ": e real, quadratic part l1(xi1^2+eta1^2) + l2(xi2^2+eta2^2), normal form in the two actions"
                + (r.passed ? "" : " FAILED: " + r.detail);
    return v;
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict determinism(const std::string &cli, const fs::path &workdir)
{
    Verdict v;
    if (cli.empty()) {
        v.summary = "no CLI binary given (--cli)";
        return v;
    }
    const std::vector<std::string> configs = {"", " --stages 2 --format json"};
    int identical = 0;
    int files = 0;
    bool all_ok = true;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        std::vector<fs::path> dirs;
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path dir = workdir / ("determinism_" + std::to_string(i) + "_" + std::to_string(rep));
            fs::remove_all(dir);
            const std::string cmd = cli + " forge --output-dir " + dir.string() + configs[i] + " > /dev/null 2>&1";
            const int status = std::system(cmd.c_str());
            if (status == -1) {
                all_ok = false;
            }
            dirs.push_back(dir);
        }
        std::vector<std::string> names;
        for (const auto &entry : fs::directory_iterator(dirs[0])) {
            names.push_back(entry.path().filename().string());
        }
        std::size_t second = std::distance(fs::directory_iterator(dirs[1]), fs::directory_iterator{});
        all_ok = all_ok && !names.empty() && second == names.size();
        for (const auto &n : names) {
            ++files;
            identical += fs::exists(dirs[1] / n) && slurp(dirs[0] / n) == slurp(dirs[1] / n);
        }
    }
    v.passed = all_ok && identical == files;
    v.summary = std::to_string(identical) + "/" + std::to_string(files)
                + " output files byte-identical across repeated forge runs (default; --stages 2 --format json)";
    return v;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Acceptance criteria"};
    std::vector<int> selected;
    std::string cli;
    std::string workdir = (fs::temp_directory_path() / "bnf_acceptance").string();
    app.add_option("--criterion", selected, "Criteria to run (default: all)")->check(CLI::Range(1, 9));
    app.add_option("--cli", cli, "Path to the bnf executable");
    app.add_option("--workdir", workdir, "Scratch directory");
    CLI11_PARSE(app, argc, argv);
    if (selected.empty()) {
        selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    }

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"homological exactness", homological_exactness},
        {"uniqueness oracle", uniqueness_oracle},
        {"second-order correction identity", second_order_identity},
        {"singular coefficient", singular_coefficient_probe},
        {"canonicity", canonicity},
        {"finite-stage divergence certificate", finite_stage_certificate},
        {"Liouville chain", liouville_chain},
        {"reality/restriction", reality_restriction},
        {"determinism", [&] { return determinism(cli, fs::path(workdir)); }},
    };

    int failed = 0;
    for (int k : selected) {
        const auto &[name, fn] = criteria[k - 1];
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception &e) {
            v.passed = false;
            v.summary = std::string("threw: ") + e.what();
        }
        failed += !v.passed;
        std::cout << (v.passed ? "PASS" : "FAIL") << "  " << k << ". " << name << ": " << v.summary << "\n";
        for (const auto &line : v.info) {
            std::cout << "      info: " << line << "\n";
        }
        std::cout.flush();
    }
    return failed == 0 ? 0 : 1;
}
