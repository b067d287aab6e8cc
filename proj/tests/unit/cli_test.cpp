#include "bnf/series_io.hpp"
#include "cli.hpp"
#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bnf;
namespace fs = std::filesystem;

namespace
{

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args)
{
    args.insert(args.begin(), "bnf");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// Fresh, empty directory under the system temp dir.
fs::path scratch(const std::string &name)
{
    const fs::path p = fs::temp_directory_path() / ("bnf_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path &p, const std::string &text)
{
    std::ofstream(p, std::ios::binary) << text;
}

} // namespace

TEST_CASE("help exits cleanly")
{
    const Outcome o = run({"--help"});
    CHECK(o.code == 0);
    CHECK(o.out.find("forge") != std::string::npos);
    CHECK(run({}).code == cli::usage_error);
}

TEST_CASE("normalize a quadratic-only input")
{
    const fs::path dir = scratch("quadratic");
    const TruncatedSeries h = testing::quadratic(Rational(2, 7), Rational(1), 4);
    spit(dir / "h.json", dump_series(h));
    const Outcome o = run({"normalize", "--input", (dir / "h.json").string(), "--output-dir", (dir / "out").string()});
    REQUIRE(o.code == 0);
    CHECK(parse_series(slurp(dir / "out" / "normal_form.json")) == h);
    CHECK(slurp(dir / "out" / "trace.jsonl").empty());
    CHECK(nlohmann::json::parse(slurp(dir / "out" / "generating_functions.json")).at("strategy") == "all");
}

TEST_CASE("normalize a cubic input")
{
    const fs::path dir = scratch("cubic");
    TruncatedSeries h = testing::quadratic(Rational(2, 7), Rational(1), 3);
    h.set(exps(2, 0, 0, 1), 1);
    h.set(exps(0, 1, 2, 0), 1);
    h.set(exps(1, 1, 0, 1), Rational(-1, 2));
    spit(dir / "h.json", dump_series(h));
    for (const char *strategy : {"all", "by-degree", "by-monomial"}) {
        const Outcome o = run({"normalize", "--input", (dir / "h.json").string(), "--output-dir",
                               (dir / strategy).string(), "--strategy", strategy});
        REQUIRE(o.code == 0);
        const std::string trace = slurp(dir / strategy / "trace.jsonl");
        CHECK(std::count(trace.begin(), trace.end(), '\n') == 3);
    }
}

TEST_CASE("normalize error codes")
{
    const fs::path dir = scratch("errors");
    spit(dir / "bad.json", "{\"order\": 3, \"terms\": [");
    Outcome o = run({"normalize", "--input", (dir / "bad.json").string(), "--output-dir", (dir / "out").string()});
    CHECK(o.code == cli::usage_error);
    CHECK_FALSE(fs::exists(dir / "out"));

    spit(dir / "resonant.json", dump_series(testing::quadratic(Rational(1, 2), Rational(1), 3)));
    o = run({"normalize", "--input", (dir / "resonant.json").string(), "--output-dir", (dir / "out").string()});
    CHECK(o.code == cli::resonance);
    CHECK_FALSE(fs::exists(dir / "out"));

    spit(dir / "h.json", dump_series(testing::quadratic(Rational(2, 7), Rational(1), 6)));
    o = run({"normalize", "--input", (dir / "h.json").string(), "--output-dir", (dir / "out").string(),
             "--certified-order", "4"});
    CHECK(o.code == cli::order_certification);

    spit(dir / "no_quad.json", dump_series(TruncatedSeries(3)));
    o = run({"normalize", "--input", (dir / "no_quad.json").string(), "--output-dir", (dir / "out").string()});
    CHECK(o.code == cli::usage_error);

    o = run({"normalize", "--input", (dir / "missing.json").string(), "--output-dir", (dir / "out").string()});
    CHECK(o.code == cli::usage_error);
}

TEST_CASE("forge with the default configuration")
{
    const fs::path dir = scratch("forge");
    const Outcome o = run({"forge", "--output-dir", dir.string()});
    REQUIRE(o.code == 0);
    for (const char *f : {"stages.json", "hamiltonian.json", "certificate.json", "growth.csv"}) {
        CHECK(fs::exists(dir / f));
    }
    const auto cert = nlohmann::json::parse(slurp(dir / "certificate.json"));
    CHECK(cert.at("passed") == true);
    CHECK(cert.at("stages").size() == 1);
    CHECK(nlohmann::json::parse(slurp(dir / "stages.json")).at("verified") == true);
    const std::string csv = slurp(dir / "growth.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

    const fs::path jdir = scratch("forge_json");
    REQUIRE(run({"forge", "--output-dir", jdir.string(), "--format", "json"}).code == 0);
    CHECK(nlohmann::json::parse(slurp(jdir / "growth.json")).size() == 2);
}

TEST_CASE("forge edge configurations")
{
    const fs::path dir = scratch("forge_edges");
    REQUIRE(run({"forge", "--output-dir", (dir / "zero").string(), "--stages", "0"}).code == 0);
    CHECK(parse_series(slurp(dir / "zero" / "hamiltonian.json"))
          == testing::quadratic(Rational(1, 2), Rational(1), 2));
    CHECK(nlohmann::json::parse(slurp(dir / "zero" / "certificate.json")).at("stages").empty());

    CHECK(run({"forge", "--output-dir", (dir / "t").string(), "--tau", "1"}).code == cli::usage_error);
    CHECK(run({"forge", "--output-dir", (dir / "t").string(), "--tau", "2.0"}).code == cli::usage_error);
    CHECK(run({"forge", "--output-dir", (dir / "t").string(), "--seed-lambda1", "3/2"}).code == cli::usage_error);
    CHECK(run({"forge", "--output-dir", (dir / "t").string(), "--budget", "0"}).code == cli::search_budget);
    CHECK(run({"forge", "--output-dir", (dir / "t").string(), "--order", "14"}).code == cli::order_budget);
    CHECK(run({"forge", "--output-dir", (dir / "t").string(), "--strategy", "fastest"}).code == cli::usage_error);
    CHECK_FALSE(fs::exists(dir / "t"));
}

TEST_CASE("forge reports deferred stages")
{
    const fs::path dir = scratch("forge_two");
    const Outcome o = run({"forge", "--output-dir", dir.string(), "--stages", "2"});
    CHECK(o.code == cli::order_budget);
    CHECK(o.out.find("deferred") != std::string::npos);
    const auto cert = nlohmann::json::parse(slurp(dir / "certificate.json"));
    CHECK(cert.at("complete") == false);
    CHECK(cert.at("stages")[1].at("status") == "deferred");
}

TEST_CASE("verify on forged output and on a corrupted trace")
{
    const fs::path dir = scratch("verify");
    REQUIRE(run({"forge", "--output-dir", (dir / "forge").string(), "--order", "8"}).code == 0);
    REQUIRE(run({"normalize", "--input", (dir / "forge" / "hamiltonian.json").string(), "--output-dir",
                 (dir / "nf").string(), "--certified-order", "8"})
                .code
            == 0);
    const std::string h = (dir / "forge" / "hamiltonian.json").string();
    const std::string trace = (dir / "nf" / "trace.jsonl").string();

    Outcome o = run({"verify", "--input", h, "--output-dir", (dir / "ok").string(), "--trace", trace});
    CHECK(o.code == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "ok" / "reports.json")).at("reports").size() == 5);

    std::istringstream lines(slurp(trace));
    std::string line;
    std::string corrupted;
    bool first = true;
    while (std::getline(lines, line)) {
        auto j = nlohmann::json::parse(line);
        if (first) {
            j["s_coeff"] = "12345/1";
            first = false;
        }
        corrupted += j.dump() + "\n";
    }
    REQUIRE_FALSE(first);
    spit(dir / "bad_trace.jsonl", corrupted);
    o = run({"verify", "--output-dir", (dir / "bad").string(), "--identity", "trace-identity", "--trace",
             (dir / "bad_trace.jsonl").string()});
    CHECK(o.code == cli::identity_failed);
    const auto reports = nlohmann::json::parse(slurp(dir / "bad" / "reports.json"));
    CHECK(reports.at("passed") == false);
    CHECK(reports.at("reports")[0].at("detail").get<std::string>().find("first nonzero residual at")
          != std::string::npos);

    o = run({"verify", "--input", h, "--output-dir", (dir / "x").string(), "--identity", "bogus"});
    CHECK(o.code == cli::usage_error);
    CHECK(o.err.find("Usage:") != std::string::npos);
}

TEST_CASE("verify turns a violated symmetry into a failed report")
{
    const fs::path dir = scratch("verify_asym");
    TruncatedSeries h = testing::quadratic(Rational(2, 7), Rational(1), 4);
    h.set(exps(2, 0, 0, 1), 2);
    spit(dir / "h.json", dump_series(h));
    const Outcome o = run({"verify", "--input", (dir / "h.json").string(), "--output-dir", (dir / "out").string(),
                           "--identity", "reality-restriction"});
    CHECK(o.code == cli::identity_failed);
    CHECK(fs::exists(dir / "out" / "reports.json"));
}

TEST_CASE("divisor-floor and stages commands")
{
    Outcome o = run({"divisor-floor", "--lambda1", "2/7", "--a", "2,0", "--b", "0,1"});
    REQUIRE(o.code == 0);
    CHECK(nlohmann::json::parse(o.out).at("delta") == "2/7");
    CHECK(run({"divisor-floor", "--lambda1", "1/2", "--a", "2,0", "--b", "0,1"}).code == cli::resonance);
    CHECK(run({"divisor-floor", "--lambda1", "2/7", "--a", "2", "--b", "0,1"}).code == cli::usage_error);
    CHECK(run({"divisor-floor", "--lambda1", "2/7", "--a", "2,0", "--b", "0,1", "--certified-order", "2"}).code
          == cli::order_certification);

    const fs::path dir = scratch("stages");
    REQUIRE(run({"stages", "--output-dir", dir.string()}).code == 0);
    CHECK(run({"stages", "--input", (dir / "stages.json").string()}).code == 0);
    auto j = nlohmann::json::parse(slurp(dir / "stages.json"));
    j["stages"][0]["lambda1"] = "1/2";
    spit(dir / "tampered.json", j.dump());
    CHECK(run({"stages", "--input", (dir / "tampered.json").string()}).code == cli::identity_failed);
}
