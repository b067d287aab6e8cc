#include "cli.hpp"

#include "bnf/divergence_forge.hpp"
#include "bnf/divisor_lab.hpp"
#include "bnf/errors.hpp"
#include "bnf/normalizer.hpp"
#include "bnf/series_io.hpp"
#include "bnf/verity.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace bnf::cli
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

struct RunConfig {
    std::string input_path;
    std::string output_dir;
    std::optional<int> order;
    std::optional<int> certified_order;
    std::string tau = "2/1";
    int stage_count = 1;
    std::string seed_lambda1 = "1/2";
    std::string strategy = "all";
    std::string format = "csv";
    long budget = 1000000;
    int max_order = 12;
    std::vector<std::string> identities{"all"};
    std::string trace_path;
    int pair_n = 2;
    int pair_m = 1;
    std::string lambda1;
    std::string lambda2 = "1/1";
    std::string a;
    std::string b;
};

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json parse_json(const std::string &text, const std::string &what)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError("malformed JSON in " + what + ": " + e.what());
    }
}

// Writes through a temporary file in the same directory and renames it.
void write_atomic(const fs::path &dir, const std::string &name, const std::string &content)
{
    fs::create_directories(dir);
    const fs::path target = dir / name;
    const fs::path tmp = dir / ("." + name + ".tmp");
    {
        std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
        if (!o) {
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        }
        o << content;
        if (!o.flush()) {
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
        }
    }
    fs::rename(tmp, target);
}

Rational positive_rational(const std::string &text, const char *flag)
{
    Rational r = parse_rational(text);
    if (sgn(r) <= 0) {
        throw ParseError(std::string(flag) + " must be positive");
    }
    return r;
}

MultiIndex parse_index(const std::string &text, const char *flag)
{
    const auto comma = text.find(',');
    try {
        if (comma == std::string::npos) {
            throw std::invalid_argument("no comma");
        }
        std::size_t used = 0;
        const int i0 = std::stoi(text.substr(0, comma), &used);
        const std::string rest = text.substr(comma + 1);
        std::size_t used1 = 0;
        const int i1 = std::stoi(rest, &used1);
        if (used != comma || used1 != rest.size() || i0 < 0 || i1 < 0) {
            throw std::invalid_argument("trailing text");
        }
        return {i0, i1};
    } catch (const std::exception &) {
        throw ParseError(std::string(flag) + " expects two non-negative integers 'i,j', got '" + text + "'");
    }
}

// λ from the quadratic part of h.
std::pair<Rational, Rational> frequencies_of(const TruncatedSeries &h)
{
    const GaussianRational l1 = h.coeff(exps(1, 0, 1, 0));
    const GaussianRational l2 = h.coeff(exps(0, 1, 0, 1));
    if (!l1.is_real() || !l2.is_real() || l1.is_zero() || l2.is_zero()) {
        throw InvalidHamiltonian("h needs real nonzero coefficients at x1y1 and x2y2");
    }
    return {l1.re(), l2.re()};
}

TruncatedSeries load_series(const std::string &path)
{
    return series_from_json(parse_json(read_file(path), path));
}

int cmd_normalize(const RunConfig &cfg, std::ostream &out)
{
    const TruncatedSeries h = load_series(cfg.input_path);
    const int order = cfg.order.value_or(h.order());
    const auto [l1, l2] = frequencies_of(h);
    const FrequencyVector freq(l1, l2, cfg.certified_order.value_or(order));
    NormalizeOptions opts;
    opts.strategy = parse_strategy(cfg.strategy);
    const NormalizationResult r = normalize(h, freq, order, opts);

    json gfs = json::array();
    for (const auto &gf : r.generating_functions) {
        json g = series_to_json(gf.series());
        g["mixed"] = true;
        g["min_degree"] = gf.min_degree();
        gfs.push_back(std::move(g));
    }
    const fs::path dir(cfg.output_dir);
    write_atomic(dir, "normal_form.json", dump_series(r.normal_form.to_series()));
    write_atomic(dir, "generating_functions.json",
                 dump_canonical(json{{"strategy", to_string(opts.strategy)}, {"functions", std::move(gfs)}}));
    write_atomic(dir, "trace.jsonl", dump_trace_jsonl(r.trace));
    out << "normal form through order " << order << ": " << r.normal_form.diagonal.size() << " diagonal terms, "
        << r.trace.entries.size() << " trace entries\n";
    return ok;
}

int cmd_forge(const RunConfig &cfg, std::ostream &out, std::ostream &err)
{
    const Rational tau = positive_rational(cfg.tau, "--tau");
    const Rational seed = positive_rational(cfg.seed_lambda1, "--seed-lambda1");
    if (tau <= 1) {
        throw TauTooSmall("--tau must exceed 1, got " + to_string(tau));
    }
    if (seed >= 1) {
        throw ParseError("--seed-lambda1 must lie in (0, 1)");
    }
    if (cfg.stage_count < 0) {
        throw ParseError("--stages must be non-negative");
    }
    StageSearchOptions sopts;
    sopts.budget = cfg.budget;
    const auto stages = build_liouville_stages(seed, tau, cfg.stage_count, sopts);

    ForgeOptions fopts;
    fopts.max_order = cfg.max_order;
    fopts.order = cfg.order;
    fopts.strategy = parse_strategy(cfg.strategy);
    const ForgeResult fr = forge(stages, seed, fopts);

    const fs::path dir(cfg.output_dir);
    write_atomic(dir, "stages.json", dump_canonical(stages_to_json(stages)));
    write_atomic(dir, "hamiltonian.json", dump_series(fr.hamiltonian));
    write_atomic(dir, "certificate.json", dump_canonical(certificate_to_json(fr.certificate)));
    const auto rows = growth_report(fr.normalization.normal_form, fr.normalization.trace);
    if (cfg.format == "json") {
        json j = json::array();
        for (const auto &r : rows) {
            j.push_back(json{{"degree", r.degree},
                             {"max_abs_coeff", to_string(r.max_abs_coeff)},
                             {"factorial_bound", r.factorial_bound.get_str()},
                             {"divisor_min", r.divisor_min ? json(to_string(*r.divisor_min)) : json(nullptr)}});
        }
        write_atomic(dir, "growth.json", dump_canonical(j));
    } else {
        write_atomic(dir, "growth.csv", growth_report_csv(rows));
    }

    const auto &cert = fr.certificate;
    for (const auto &sc : cert.stages) {
        out << "stage " << sc.index << " (N=" << sc.N << ", m=" << sc.m << "): ";
        if (sc.deferred) {
            out << "deferred, needs order " << sc.required_order << " > " << cert.max_order << "\n";
        } else {
            out << "|h^_aa| ~ " << approx_decimal(abs(sc.nf_coeff.re())) << (sc.passed ? " > " : " <= ")
                << sc.bound.get_str() << "\n";
        }
    }
    require_growth(cert);
    if (!cert.complete()) {
        err << "certificate incomplete: some stages exceed the order budget " << cert.max_order << "\n";
        return order_budget;
    }
    return ok;
}

int cmd_verify(const RunConfig &cfg, std::ostream &out)
{
    std::vector<Identity> wanted;
    for (const auto &name : cfg.identities) {
        if (name == "all") {
            wanted = {Identity::second_order_correction, Identity::singular_coefficient, Identity::uniqueness,
                      Identity::reality_restriction};
        } else {
            wanted.push_back(parse_identity(name));
        }
    }
    if (!cfg.trace_path.empty()
        && std::find(wanted.begin(), wanted.end(), Identity::trace_identity) == wanted.end()) {
        wanted.push_back(Identity::trace_identity);
    }

    std::optional<TruncatedSeries> h;
    auto need_h = [&]() -> const TruncatedSeries & {
        if (!h) {
            if (cfg.input_path.empty()) {
                throw ParseError("--input is required for this identity");
            }
            h = load_series(cfg.input_path);
        }
        return *h;
    };
    NormalizationTrace trace;
    if (!cfg.trace_path.empty()) {
        std::istringstream lines(read_file(cfg.trace_path));
        std::string line;
        while (std::getline(lines, line)) {
            if (!line.empty()) {
                trace.entries.push_back(trace_entry_from_json(parse_json(line, cfg.trace_path)));
            }
        }
    }

    json reports = json::array();
    bool all_passed = true;
    for (Identity id : wanted) {
        IdentityReport r;
        r.identity = id;
        try {
            if (id == Identity::trace_identity) {
                r = verify_trace_identity(trace);
            } else {
                const TruncatedSeries &hh = need_h();
                const auto [l1, l2] = frequencies_of(hh);
                const int order = cfg.order.value_or(std::max(hh.order(), 2));
                switch (id) {
                case Identity::second_order_correction: {
                    const int d = first_off_diagonal_degree(hh);
                    const FrequencyVector freq(l1, l2, cfg.certified_order.value_or(2 * d - 2));
                    const TruncatedSeries hp = hh.with_order(std::max(hh.order(), 2 * d - 2));
                    r = verify_second_order_correction(hp, normalizing_generating_function(hp, freq, d), freq);
                    break;
                }
                case Identity::singular_coefficient: {
                    const FrequencyVector freq(l1, l2,
                                               cfg.certified_order.value_or(2 * (cfg.pair_n + cfg.pair_m) - 2));
                    r = verify_singular_coefficient(hh, freq, cfg.pair_n, cfg.pair_m);
                    break;
                }
                case Identity::uniqueness:
                    r = verify_uniqueness(hh, FrequencyVector(l1, l2, cfg.certified_order.value_or(order)), order);
                    break;
                case Identity::reality_restriction:
                    r = verify_reality_restriction(hh, FrequencyVector(l1, l2, cfg.certified_order.value_or(order)),
                                                   order);
                    break;
                case Identity::trace_identity:
                    break;
                }
            }
        } catch (const HypothesisViolated &e) {
            r.passed = false;
            r.detail = std::string("hypothesis violated: ") + e.what();
        } catch (const SymmetryViolated &e) {
            r.passed = false;
            r.detail = std::string("symmetry violated: ") + e.what();
        }
        all_passed = all_passed && r.passed;
        out << to_string(id) << ": " << (r.passed ? "passed" : "FAILED") << (r.detail.empty() ? "" : " (" + r.detail + ")")
            << "\n";
        reports.push_back(report_to_json(r));
    }
    write_atomic(fs::path(cfg.output_dir), "reports.json",
                 dump_canonical(json{{"passed", all_passed}, {"reports", std::move(reports)}}));
    return all_passed ? ok : identity_failed;
}

int cmd_divisor_floor(const RunConfig &cfg, std::ostream &out)
{
    if (cfg.lambda1.empty() || cfg.a.empty() || cfg.b.empty()) {
        throw ParseError("divisor-floor needs --lambda1, --a and --b");
    }
    const ExponentPair ab{parse_index(cfg.a, "--a"), parse_index(cfg.b, "--b")};
    if (ab.is_diagonal()) {
        throw ParseError("--a and --b must differ");
    }
    const FrequencyVector freq(parse_rational(cfg.lambda1), parse_rational(cfg.lambda2),
                               cfg.certified_order.value_or(ab.degree()));
    const DivisorFloor f = divisor_floor(freq, ab);
    const json j{{"lambda1", to_string(freq.lambda1())},
                 {"lambda2", to_string(freq.lambda2())},
                 {"a", {ab.alpha[0], ab.alpha[1]}},
                 {"b", {ab.beta[0], ab.beta[1]}},
                 {"order_bound", f.order_bound},
                 {"delta", to_string(f.value)},
                 {"argmin", {f.argmin[0], f.argmin[1]}}};
    if (!cfg.output_dir.empty()) {
        write_atomic(fs::path(cfg.output_dir), "divisor_floor.json", dump_canonical(j));
    }
    out << dump_canonical(j);
    return ok;
}

int cmd_stages(const RunConfig &cfg, std::ostream &out)
{
    if (!cfg.input_path.empty()) {
        bool verified = false;
        const auto stages = stages_from_json(parse_json(read_file(cfg.input_path), cfg.input_path), verified);
        out << stages.size() << " stages, verified: " << (verified ? "true" : "false") << "\n";
        return verified ? ok : identity_failed;
    }
    const Rational tau = positive_rational(cfg.tau, "--tau");
    const Rational seed = positive_rational(cfg.seed_lambda1, "--seed-lambda1");
    if (tau <= 1) {
        throw TauTooSmall("--tau must exceed 1, got " + to_string(tau));
    }
    if (seed >= 1) {
        throw ParseError("--seed-lambda1 must lie in (0, 1)");
    }
    StageSearchOptions sopts;
    sopts.budget = cfg.budget;
    const auto stages = build_liouville_stages(seed, tau, cfg.stage_count, sopts);
    const std::string text = dump_canonical(stages_to_json(stages));
    if (!cfg.output_dir.empty()) {
        write_atomic(fs::path(cfg.output_dir), "stages.json", text);
    }
    for (const auto &st : stages) {
        out << "stage " << st.index << ": N=" << st.N << " m=" << st.m << " lambda1 ~ "
            << approx_decimal(st.lambda1, 12) << "\n";
    }
    return ok;
}

int exit_code_for(const std::exception_ptr &ep, std::ostream &err)
{
    try {
        std::rethrow_exception(ep);
    } catch (const ResonanceError &e) {
        err << "resonance: " << e.what() << "\n";
        return resonance;
    } catch (const OrderExceedsCertification &e) {
        err << "order certification: " << e.what() << "\n";
        return order_certification;
    } catch (const SearchBudgetExhausted &e) {
        err << "search budget: " << e.what() << "\n";
        return search_budget;
    } catch (const GrowthCheckFailed &e) {
        err << "growth check failed: " << e.what() << "\n";
        return growth_failed;
    } catch (const OrderBudgetExceeded &e) {
        err << "order budget: " << e.what() << "\n";
        return order_budget;
    } catch (const StageCertificateInvalid &e) {
        err << "stage certificate: " << e.what() << "\n";
        return identity_failed;
    } catch (const HypothesisViolated &e) {
        err << "hypothesis violated: " << e.what() << "\n";
        return identity_failed;
    } catch (const ParseError &e) {
        err << "parse error: " << e.what() << "\n";
        return usage_error;
    } catch (const InvalidHamiltonian &e) {
        err << "invalid input: " << e.what() << "\n";
        return usage_error;
    } catch (const TauTooSmall &e) {
        err << "invalid configuration: " << e.what() << "\n";
        return usage_error;
    } catch (const SymmetryViolated &e) {
        err << "invalid input: " << e.what() << "\n";
        return usage_error;
    } catch (const std::invalid_argument &e) {
        err << "invalid argument: " << e.what() << "\n";
        return usage_error;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return other_error;
    }
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    RunConfig cfg;
    CLI::App app{"Exact Birkhoff normal forms and divergence certificates", "bnf"};
    app.require_subcommand(1);

    auto add_order = [&](CLI::App *c) {
        c->add_option("--order", cfg.order, "Truncation order")->check(CLI::Range(2, 1 << 20));
        c->add_option("--certified-order", cfg.certified_order, "Non-resonance order to certify (default: --order)");
    };

    CLI::App *normalize_cmd = app.add_subcommand("normalize", "Normalize a Hamiltonian series");
    normalize_cmd->add_option("--input", cfg.input_path, "Series JSON")->required();
    normalize_cmd->add_option("--output-dir", cfg.output_dir, "Output directory")->required();
    normalize_cmd->add_option("--strategy", cfg.strategy, "all|by-degree|by-monomial")
        ->check(CLI::IsMember({"all", "by-degree", "by-monomial"}));
    add_order(normalize_cmd);

    CLI::App *forge_cmd = app.add_subcommand("forge", "Build the divergent Hamiltonian and its certificate");
    forge_cmd->add_option("--output-dir", cfg.output_dir, "Output directory")->required();
    forge_cmd->add_option("--tau", cfg.tau, "τ as p/q (> 1)");
    forge_cmd->add_option("--stages", cfg.stage_count, "Number of stages");
    forge_cmd->add_option("--seed-lambda1", cfg.seed_lambda1, "Seed for λ1 as p/q in (0, 1)");
    forge_cmd->add_option("--strategy", cfg.strategy, "all|by-degree|by-monomial")
        ->check(CLI::IsMember({"all", "by-degree", "by-monomial"}));
    forge_cmd->add_option("--format", cfg.format, "Growth report format json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    forge_cmd->add_option("--budget", cfg.budget, "Stage search budget (candidates)");
    forge_cmd->add_option("--max-order", cfg.max_order, "Largest normalization order the forge may run");
    forge_cmd->add_option("--order", cfg.order, "Order of the final normal form")->check(CLI::Range(2, 1 << 20));

    CLI::App *verify_cmd = app.add_subcommand("verify", "Check identities on a Hamiltonian");
    verify_cmd->add_option("--input", cfg.input_path, "Series JSON");
    verify_cmd->add_option("--output-dir", cfg.output_dir, "Output directory")->required();
    verify_cmd->add_option("--identity", cfg.identities,
                           "all|second-order-correction|singular-coefficient|uniqueness|reality-restriction|"
                           "trace-identity")
        ->check(CLI::IsMember({"all", "second-order-correction", "singular-coefficient", "uniqueness",
                               "reality-restriction", "trace-identity"}));
    verify_cmd->add_option("--trace", cfg.trace_path, "Trace JSONL to check");
    verify_cmd->add_option("--pair-n", cfg.pair_n, "N of the singular pair")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--pair-m", cfg.pair_m, "m of the singular pair")->check(CLI::PositiveNumber);
    add_order(verify_cmd);

    CLI::App *floor_cmd = app.add_subcommand("divisor-floor", "Small-divisor floor for a pair (a, b)");
    floor_cmd->add_option("--lambda1", cfg.lambda1, "λ1 as p/q")->required();
    floor_cmd->add_option("--lambda2", cfg.lambda2, "λ2 as p/q");
    floor_cmd->add_option("--a", cfg.a, "a as 'i,j'")->required();
    floor_cmd->add_option("--b", cfg.b, "b as 'i,j'")->required();
    floor_cmd->add_option("--output-dir", cfg.output_dir, "Output directory");
    floor_cmd->add_option("--certified-order", cfg.certified_order, "Non-resonance order to certify");

    CLI::App *stages_cmd = app.add_subcommand("stages", "Build or verify a Liouville stage chain");
    stages_cmd->add_option("--tau", cfg.tau, "τ as p/q (> 1)");
    stages_cmd->add_option("--stages", cfg.stage_count, "Number of stages");
    stages_cmd->add_option("--seed-lambda1", cfg.seed_lambda1, "Seed for λ1 as p/q in (0, 1)");
    stages_cmd->add_option("--budget", cfg.budget, "Stage search budget (candidates)");
    stages_cmd->add_option("--output-dir", cfg.output_dir, "Output directory");
    stages_cmd->add_option("--input", cfg.input_path, "Stage certificate to verify instead of building");

    std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rest.begin(), rest.end());
    try {
        app.parse(rest);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        if (code == 0) {
            return ok;
        }
        const auto chosen = app.get_subcommands();
        err << (chosen.empty() ? app.help() : chosen.front()->help());
        return usage_error;
    }

    try {
        if (*normalize_cmd) {
            return cmd_normalize(cfg, out);
        }
        if (*forge_cmd) {
            return cmd_forge(cfg, out, err);
        }
        if (*verify_cmd) {
            return cmd_verify(cfg, out);
        }
        if (*floor_cmd) {
            return cmd_divisor_floor(cfg, out);
        }
        return cmd_stages(cfg, out);
    } catch (...) {
        return exit_code_for(std::current_exception(), err);
    }
}

} // namespace bnf::cli
