#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ncfree/config.hpp"
#include "ncfree/output.hpp"

using namespace ncfree;

namespace {

const char* kMinimal = R"(# minimal trace run
[experiment]
kind = "concentration-trace"

[observable]
expr = "X1*X1"

[grid]
N_list = [8, 16, 32]
)";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    experiment_config(validate_config(RunConfig::parse(text)));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("minimal config gets documented defaults") {
    const RunConfig rc = validate_config(RunConfig::parse(kMinimal));
    CHECK(rc.get_int("experiment.quadrature_order") == 21);
    CHECK(rc.get_int("grid.samples") == 200);
    const ExperimentConfig c = experiment_config(rc);
    CHECK(c.quadrature_order == 21);
    CHECK(c.samples == 200);
    CHECK(c.N_list == std::vector<int>{8, 16, 32});
    CHECK(c.ensemble.cls == EnsembleClass::gue);
    CHECK(c.seed == 1);
  }

  TEST_CASE("missing N_list names the key") {
    const std::string msg = error_of("[observable]\nexpr = \"X1\"\n");
    CHECK(msg.find("grid.N_list") != std::string::npos);
  }

  TEST_CASE("surrogate divisibility") {
    const std::string text = R"([observable]
expr = "X1*A1*X1"
q = 1
[grid]
N_list = [32, 48]
[surrogate]
N_surrogate = 256
[matrices]
A1 = "gen:alt"
)";
    const std::string msg = error_of(text);
    CHECK(msg.find("divisible") != std::string::npos);
    CHECK(msg.find("48") != std::string::npos);
    std::string ok = text;
    ok.replace(ok.find("32, 48"), 6, "32, 64");
    CHECK(error_of(ok).empty());
  }

  TEST_CASE("syntax and schema errors") {
    CHECK(error_of("[grid]\nN_list = [8, 16\n").find("<string>:2") != std::string::npos);
    CHECK(error_of("[grid]\nN_list = [8]\nbogus = 1\n").find("grid.bogus") != std::string::npos);
    CHECK(error_of("[grid]\nN_list = \"8\"\n").find("grid.N_list") != std::string::npos);
    CHECK(error_of("N_list = [8]\n").find("outside any section") != std::string::npos);
    CHECK(error_of("[grid]\nN_list = [8]\nN_list = [9]\n").find("duplicate") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "[ensemble]\nclass = \"cue\"\n").find("ensemble.class") != std::string::npos);
  }

  TEST_CASE("typed values and product-form observables") {
    const RunConfig rc = RunConfig::parse(R"([a]
i = -3
d = 2.5e-1
b = true
s = "quoted \"x\""
l = [1, [2.0, "z"], []]
)");
    CHECK(rc.get_int("a.i") == -3);
    CHECK(rc.get_double("a.d") == 0.25);
    CHECK(rc.get_double("a.i") == -3.0);
    CHECK(rc.get_bool("a.b"));
    CHECK(rc.get_string("a.s") == "quoted \"x\"");
    CHECK(rc.get("a.l").to_text() == "[1, [2, \"z\"], []]");
    CHECK_THROWS_AS(rc.get_int("a.d"), ConfigError);

    const ExperimentConfig c = experiment_config(validate_config(RunConfig::parse(R"([observable]
f_list = [[[1, 0, 1.0]], "id"]
P_list = ["X1", "X2"]
d = 2
[grid]
N_list = [8]
)")));
    CHECK(c.observable.has_exp());
    CHECK(c.observable_text == "exp(i 1 (X1))*X2");
  }

  TEST_CASE("config hash tracks the bytes") {
    const RunConfig a = RunConfig::parse(kMinimal), b = RunConfig::parse(kMinimal);
    CHECK(a.hash() == b.hash());
    const RunConfig c = RunConfig::parse(std::string(kMinimal) + " ");
    CHECK(a.hash() != c.hash());
    CHECK(fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  }

  TEST_CASE("CSV schema, determinism and record round trip") {
    ExperimentConfig c = experiment_config(validate_config(RunConfig::parse(kMinimal)));
    c.samples = 10;
    const RunRecord r1 = run_trace_concentration(c);
    c.workers = 3;
    const RunRecord r2 = run_trace_concentration(c);
    const std::string csv = record_csv(r1);
    CHECK(csv.substr(0, csv.find('\n')) == "N,y,median_err,q99_err,stderr,samples,seed");
    CHECK(csv == record_csv(r2));
    const RunRecord back = record_from_json(record_json(r1));
    CHECK(record_csv(back) == csv);
    CHECK(back.verdicts.size() == r1.verdicts.size());
    CHECK(back.pass() == r1.pass());
    CHECK_THROWS(record_from_json("{}"));
  }

  TEST_CASE("write_outputs produces record, table and manifest") {
    const auto dir = std::filesystem::temp_directory_path() / "ncfree_output_test";
    std::filesystem::remove_all(dir);
    ExperimentConfig c = experiment_config(validate_config(RunConfig::parse(kMinimal)));
    c.samples = 5;
    const RunRecord r = run_trace_concentration(c);
    RunManifest m;
    m.config_hash = 42;
    m.master_seed = 1;
    m.start_time = utc_timestamp();
    const std::string stem = (dir / "run").string();
    const auto files = write_outputs(r, m, stem);
    REQUIRE(files.size() == 3);
    for (const auto& f : files) CHECK(std::filesystem::exists(f));
    CHECK(slurp(stem + ".csv") == record_csv(r));
    const std::string man = slurp(stem + ".manifest.json");
    CHECK(man.find("\"config_hash\": \"000000000000002a\"") != std::string::npos);
    CHECK(man.find("run.csv") != std::string::npos);
    CHECK(man.find(kToolVersion) != std::string::npos);
    const std::string first = slurp(stem + ".csv");
    write_outputs(r, m, stem);
    CHECK(slurp(stem + ".csv") == first);
    CHECK_FALSE(std::filesystem::exists(stem + ".csv.tmp"));
    std::filesystem::remove_all(dir);
    CHECK_THROWS(write_atomic("/nonexistent-dir/x/y.csv", "z"));
  }
}
