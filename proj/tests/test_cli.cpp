#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks against the built binary. The test runner sets
// EXPANDER_ISING_CLI to the executable path.

namespace {

std::string cli_path() {
  const char* p = std::getenv("EXPANDER_ISING_CLI");
  REQUIRE(p != nullptr);
  return p;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + cli_path() + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) res.out += buf.data();
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("exact-z prints the hard-core count of C4") {
  const auto res = run("exact-z --graph cycle:4 --lambda 1 --q 0");
  CHECK(res.exit_code == 0);
  CHECK(res.out == "7\n");
}

TEST_CASE("exact-z in float mode") {
  const auto res = run("exact-z --graph cycle:4 --lambda 1 --q 0 --mode float");
  CHECK(res.exit_code == 0);
  CHECK(std::stod(res.out) == doctest::Approx(7.0));
}

TEST_CASE("beta is rejected in exact mode and accepted in float mode") {
  CHECK(run("exact-z --graph cycle:4 --lambda 1 --beta 1.0").exit_code == 2);
  const auto res = run("exact-z --graph cycle:4 --lambda 1 --beta 0.693147180559945 --mode float");
  CHECK(res.exit_code == 0);
  // q = 1/2: Z = 7 + 4q + 4q^2 + q^4
  CHECK(std::stod(res.out) == doctest::Approx(10.0625).epsilon(1e-9));
}

TEST_CASE("percolation-check reports the identity") {
  const auto res = run("percolation-check --graph hypercube:3 --lambda 1 --p 0.5");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("identity holds: true") != std::string::npos);
}

TEST_CASE("gen round-trips through exact-z") {
  const auto direct = run("exact-z --graph hypercube:2 --lambda 2/3 --q 1/5");
  REQUIRE(direct.exit_code == 0);
  REQUIRE(run("gen --graph hypercube:2 --out cli_q2.edges").exit_code == 0);
  const auto loaded = run("exact-z --graph file:cli_q2.edges --lambda 2/3 --q 1/5");
  CHECK(loaded.exit_code == 0);
  CHECK(loaded.out == direct.out);
  std::remove("cli_q2.edges");
  std::remove("cli_q2.edges.manifest.json");
}

TEST_CASE("exit codes: malformed spec and budget overflow") {
  CHECK(run("exact-z --graph nonsense --lambda 1 --q 0").exit_code == 2);
  CHECK(run("exact-z --graph cycle:5 --lambda 1 --q 0").exit_code == 2);
  CHECK(run("exact-z --graph hypercube:5 --lambda 1 --q 0",
            "EXPANDER_ISING_BUDGET=24").exit_code == 3);
  CHECK(run("exact-z --graph cycle:4 --lambda 1 --q 0",
            "EXPANDER_ISING_BUDGET=bogus").exit_code == 2);
  CHECK(run("frobnicate --graph cycle:4").exit_code == 2);
}

TEST_CASE("sample requires a seed and reproduces byte-identically") {
  CHECK(run("sample --graph cycle:4 --lambda 1 --q 0 --out cli_s.jsonl").exit_code == 2);
  const std::string args =
      "sample --graph cycle:4 --lambda 1 --q 1/2 --seed 9 --count 16 --out cli_s.jsonl";
  REQUIRE(run(args).exit_code == 0);
  const std::string first = slurp("cli_s.jsonl");
  const std::string manifest_first = slurp("cli_s.jsonl.manifest.json");
  REQUIRE(run(args).exit_code == 0);
  CHECK(slurp("cli_s.jsonl") == first);
  CHECK(slurp("cli_s.jsonl.manifest.json") == manifest_first);
  CHECK(manifest_first.find("\"seed\": 9") != std::string::npos);
  // each line parses as a sorted vertex array
  std::istringstream lines(first);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    CHECK(line.front() == '[');
    CHECK(line.back() == ']');
    ++count;
  }
  CHECK(count == 16);
  std::remove("cli_s.jsonl");
  std::remove("cli_s.jsonl.manifest.json");
}

TEST_CASE("mix writes a CSV curve with header") {
  const std::string args =
      "mix --graph cycle:4 --lambda 1 --q 1/10 --chain flips --t-max 5 --s0 odd --out cli_tv.csv";
  REQUIRE(run(args).exit_code == 0);
  const std::string csv = slurp("cli_tv.csv");
  CHECK(csv.rfind("t,tv\n", 0) == 0);
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 7);  // header + t = 0..5
  std::remove("cli_tv.csv");
  std::remove("cli_tv.csv.manifest.json");
}

TEST_CASE("conductance and cluster-report emit parseable JSON") {
  const auto cond = run("conductance --graph cycle:4 --lambda 1 --q 1/10");
  CHECK(cond.exit_code == 0);
  CHECK(cond.out.find("\"weight_balanced\": \"14001/10000\"") != std::string::npos);

  REQUIRE(run("cluster-report --graph hypercube:3 --side even --lambda 1/5 --q 1/5 --k 3 "
              "--out cli_cluster.json")
              .exit_code == 0);
  const std::string body = slurp("cli_cluster.json");
  CHECK(body.find("\"per_size\"") != std::string::npos);
  CHECK(body.find("\"xi_exact\"") != std::string::npos);
  std::remove("cli_cluster.json");
  std::remove("cli_cluster.json.manifest.json");
}

TEST_CASE("approx-z on C4 reports the negative control") {
  const auto res = run("approx-z --graph cycle:4 --lambda 1 --q 1/2 --k0 2");
  CHECK(res.exit_code == 0);
  const auto pos = res.out.find("\"z_hat\": ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(res.out.substr(pos + 9)) == doctest::Approx(8.0));
  CHECK(res.out.find("\"rel_err\"") != std::string::npos);
}

TEST_CASE("validate reports codegree and expansion states") {
  const auto res = run("validate --graph hypercube:3 --kappa 1/2 --budget 3");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("\"max_codegree\": 2") != std::string::npos);
  CHECK(res.out.find("\"expansion_ok\": \"verified\"") != std::string::npos);
}
