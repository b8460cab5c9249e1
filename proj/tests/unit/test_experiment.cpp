#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "spacinglab/experiment.hpp"

using namespace spacinglab;
using namespace spacinglab::experiment;
namespace fs = std::filesystem;
using doctest::Approx;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spacinglab-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig c;
  c.sizes = {100, 200};
  c.draws = 6;
  c.M = 10;
  c.out = out.string();
  return c;
}

#ifdef SPACINGLAB_CLI
struct Cli {
  int code;
  std::string out;
};

Cli cli(const std::string& args) {
  const std::string cmd = std::string(SPACINGLAB_CLI) + " " + args + " 2>/dev/null";
  std::string text;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) text += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, text};
}
#endif

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("config parsing and validation") {
    const auto c = config_from_json(json::parse(R"({"beta": 4, "sizes": [50, 60], "draws": 3, "M": 7})"));
    CHECK(c.beta == 4);
    CHECK(c.sizes == std::vector<int>{50, 60});
    CHECK(c.M == 7);
    CHECK(c.seed == 20261015u);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"betta": 2})")), std::invalid_argument);
    CHECK_THROWS_AS(validate(config_from_json(json::parse(R"({"beta": 3})"))), std::invalid_argument);
    CHECK_THROWS_AS(validate(config_from_json(json::parse(R"({"sizes": [4]})"))), std::invalid_argument);
    CHECK_THROWS_AS(validate(config_from_json(json::parse(R"({"draws": 0})"))), std::invalid_argument);
    CHECK_THROWS_AS(validate(config_from_json(json::parse(R"({"M": 1})"))), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"draws": "ten"})")), std::invalid_argument);
    CHECK_THROWS_AS(validate(config_from_json(json::parse(R"({"sampler": "mcmc", "potential": {"kind": "banana"}})"))),
                    std::invalid_argument);
    const auto back = config_from_json(config_to_json(c));
    CHECK(canonical_config(back) == canonical_config(c));
  }

  TEST_CASE("config hash") {
    ExperimentConfig a, b;
    b.out = "elsewhere";
    b.workers = 8;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.seed += 1;
    CHECK(config_hash(a) != config_hash(b));
    ExperimentConfig c;
    c.sizes = {400, 100, 1600};
    CHECK(config_hash(a) != config_hash(c));
  }

  TEST_CASE("streams") {
    CHECK(stream_id(100, 3) == ((100ull << 32) | 3u));
    CHECK(stream_id(100, 3, true) != stream_id(100, 3));
    ExperimentConfig c;
    CHECK(draw_spectrum(c, 50, 2).values == draw_spectrum(c, 50, 2).values);
    CHECK(draw_spectrum(c, 50, 2).values != draw_spectrum(c, 50, 3).values);
  }

  TEST_CASE("draw rows carry a checksum") {
    DrawRecord r{2, 100, 7, 0.0, 0.0630957344480193, 12.05, 0.9958, 0.081, 0.12};
    const std::string row = draw_row(r);
    const auto parsed = parse_draw_row(row);
    REQUIRE(parsed.has_value());
    CHECK(parsed->draw == 7);
    CHECK(parsed->bound == Approx(0.12));
    std::string damaged = row;
    damaged[row.find("0.12")] = '9';
    CHECK_FALSE(parse_draw_row(damaged).has_value());
    CHECK_FALSE(parse_draw_row(row.substr(0, row.size() / 2)).has_value());
    CHECK_FALSE(parse_draw_row("").has_value());
  }

  TEST_CASE("universal files are idempotent") {
    const auto out = scratch("universal");
    const auto F = build_universal(Beta::Unitary, 8.0, 100);
    const auto files = write_universal(F, out);
    const std::string cdf = slurp(files.cdf), nodes = slurp(files.nodes);
    CHECK(files.cdf.filename() == "F_beta2.csv");
    CHECK(files.nodes.filename() == "nodes_beta2.csv");
    CHECK(cdf.rfind("s,F\n", 0) == 0);
    CHECK(F.F.back() > 0.9999);
    write_universal(build_universal(Beta::Unitary, 8.0, 100), out);
    CHECK(slurp(files.cdf) == cdf);
    CHECK(slurp(files.nodes) == nodes);
    const auto two = write_universal(build_universal(Beta::Orthogonal, 8.0, 2), out);
    std::ifstream in(two.nodes);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 2);  // header + median
  }

  TEST_CASE("verify is deterministic, resumable and independent of workers") {
    const auto out = scratch("verify");
    auto c = small_config(out);
    const auto first = run_verify(c);
    REQUIRE(first.complete);
    CHECK(first.records.size() == 12);
    const std::string draws = slurp(out / "draws_beta2.csv");
    const std::string summary = slurp(out / "summary_beta2.json");
    CHECK_FALSE(fs::exists(out / "draws_beta2.partial.csv"));
    CHECK(json::parse(slurp(out / "manifest.json"))["status"] == "complete");

    c.workers = 3;
    run_verify(c);
    CHECK(slurp(out / "draws_beta2.csv") == draws);
    CHECK(slurp(out / "summary_beta2.json") == summary);

    // Journal with five good rows, one damaged row and a torn last line.
    {
      std::ofstream j(out / "draws_beta2.partial.csv", std::ios::binary);
      j << "# config " << config_hash(c) << "\n" << kDrawHeader << "\n";
      for (int i = 0; i < 5; ++i) j << draw_row(first.records[static_cast<std::size_t>(i)]) << "\n";
      std::string bad = draw_row(first.records[5]);
      bad[bad.find(',') + 1] = '9';
      j << bad << "\n" << draw_row(first.records[6]).substr(0, 20);
    }
    fs::remove(out / "draws_beta2.csv");
    std::vector<std::string> log;
    const auto resumed = run_verify(c, [&](const std::string& m) { log.push_back(m); });
    REQUIRE(resumed.complete);
    CHECK_FALSE(log.empty());
    CHECK(log.front().find("resuming: 5") != std::string::npos);
    CHECK(slurp(out / "draws_beta2.csv") == draws);
    CHECK(slurp(out / "summary_beta2.json") == summary);

    // A journal from another configuration is discarded.
    {
      std::ofstream j(out / "draws_beta2.partial.csv", std::ios::binary);
      j << "# config 0000000000000000\n" << kDrawHeader << "\n";
      auto r = first.records[0];
      r.bound = 42.0;
      j << draw_row(r) << "\n";
    }
    run_verify(c);
    CHECK(slurp(out / "draws_beta2.csv") == draws);
  }

  TEST_CASE("single draw leaves the interval undefined") {
    const auto out = scratch("single");
    auto c = small_config(out);
    c.draws = 1;
    const auto r = run_verify(c);
    REQUIRE(r.complete);
    for (const auto& s : r.summary["sizes"]) CHECK(s["ci95_bound"].is_null());
  }

  TEST_CASE("identity runs and the negative control") {
    const auto out = scratch("identity");
    auto c = small_config(out);
    const auto ok = run_identity(c);
    CHECK(ok.violations == 0);
    CHECK(ok.windows_checked == 12);
    CHECK(fs::exists(out / "identity_beta2.json"));
    c.inject_corruption = true;
    const auto bad = run_identity(c);
    CHECK(bad.violations > 0);
  }

  TEST_CASE("sample dump") {
    const auto out = scratch("sample");
    auto c = small_config(out);
    c.sizes = {10};
    c.draws = 3;
    const auto path = run_sample(c);
    CHECK(path.filename() == "spectra_beta2.csv");
    std::ifstream in(path);
    std::string line;
    int rows = -1;
    std::getline(in, line);
    CHECK(line == "draw_id,index,eigenvalue");
    while (std::getline(in, line)) ++rows;
    CHECK(rows + 1 == 30);
  }

  TEST_CASE("gap routes") {
    CHECK(std::abs(gap_value(Beta::Unitary, 2.0, GapMethod::Painleve) - gap_value(Beta::Unitary, 2.0, GapMethod::Fredholm)) <=
          1e-6);
    CHECK(std::abs(gap_value(Beta::Symplectic, 0.3, GapMethod::Series) - gap_value(Beta::Symplectic, 0.3, GapMethod::Painleve)) <=
          1e-3);
    CHECK_THROWS_AS(gap_value(Beta::Orthogonal, 1.0, GapMethod::Fredholm), std::invalid_argument);
    CHECK_THROWS_AS(gap_value(Beta::Unitary, 2.0, GapMethod::Series), std::invalid_argument);
    CHECK_THROWS_AS(gap_method_from_string("magic"), std::invalid_argument);
    CHECK(gap_method_from_string("fredholm") == GapMethod::Fredholm);
  }

#ifdef SPACINGLAB_CLI
  TEST_CASE("command line") {
    const auto out = scratch("cli");
    const auto tiny = cli("gap --beta 2 --s 1e-9");
    CHECK(tiny.code == 0);
    CHECK(std::abs(std::stod(tiny.out) - 1.0) <= 1e-9);
    const auto g = cli("gap --beta 2 --s 2 --method fredholm");
    CHECK(g.code == 0);
    CHECK(std::stod(g.out) == Approx(0.003497325149).epsilon(1e-9));
    CHECK(cli("gap --beta 1 --s 2 --method fredholm").code == 2);
    CHECK(cli("gap --beta 2 --s 3 --method series").code == 2);
    CHECK(cli("gap --beta 3 --s 1").code == 2);
    CHECK(cli("frobnicate").code == 2);
    CHECK(cli("--help").code == 0);
    CHECK(cli("universal --beta 2 -M 2 --out " + out.string()).code == 0);
    CHECK(fs::exists(out / "nodes_beta2.csv"));
    const std::string args = "--sizes 100 --draws 3 --out " + out.string();
    CHECK(cli("identity " + args).code == 0);
    CHECK(cli("identity --inject-corruption " + args).code == 1);
    CHECK(cli("verify --draws 0 --out " + out.string()).code == 2);
    CHECK(cli("verify " + args + " --seed 5").code == 0);
    CHECK(fs::exists(out / "summary_beta2.json"));
    std::ofstream(out / "bad.json") << "{\"unknown\": 1}";
    CHECK(cli("verify --config " + (out / "bad.json").string()).code == 2);
  }
#endif
}
