// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Invocation {
  int exit_code;
  std::string output;
};

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "dpsqkd_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

Invocation run_cli(const std::string& args, const std::string& env_prefix = "") {
  const fs::path log = scratch_dir() / "invocation_output.txt";
  const std::string command = env_prefix + std::string(DPSQKD_CLI_PATH) + " " + args +
                              " > " + log.string() + " 2>&1";
  const int status = std::system(command.c_str());
  const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::string output((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
  return {exit_code, output};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("simulate: clean run exits 0 with zero observed QBER") {
  const fs::path out = scratch_dir() / "report.json";
  const auto result = run_cli(
      "simulate --n 3 --mu 1.0 --eta 0.1 --blocks 100000 --seed 42 --attack none --out " +
      out.string());
  CHECK(result.exit_code == 0);
  const json artifact = json::parse(slurp(out));
  CHECK(artifact["command"] == "simulate");
  CHECK(artifact["report"]["qber_hat"] == 0.0);
  CHECK(artifact["report"]["errors"] == 0);
  CHECK(artifact["abort_decision"] == "continue");
  CHECK(artifact["config"]["seed"] == 42);
}

TEST_CASE("simulate: missing required flag exits 1") {
  CHECK(run_cli("simulate --mu 1.0 --eta 0.1 --blocks 10").exit_code == 1);
}

TEST_CASE("simulate: invalid transmission exits 1") {
  CHECK(run_cli("simulate --n 3 --mu 1.0 --eta 1.7 --blocks 10").exit_code == 1);
}

TEST_CASE("simulate: interceptor with weak source trips the abort exit code") {
  const fs::path out = scratch_dir() / "abort.json";
  const auto result = run_cli(
      "simulate --n 3 --mu 0.05 --eta 0.5 --blocks 100000 --seed 1 --attack intercept --out " +
      out.string());
  CHECK(result.exit_code == 2);
  const json artifact = json::parse(slurp(out));
  CHECK(artifact["abort_decision"] == "abort");
}

TEST_CASE("simulate: per-block CSV carries the photon-number tag") {
  const fs::path out = scratch_dir() / "tagged.json";
  const fs::path blocks_csv = scratch_dir() / "blocks.csv";
  const auto result = run_cli("simulate --n 3 --mu 1.0 --eta 0.3 --blocks 500 --seed 9 "
                              "--attack none --out " +
                              out.string() + " --tag-nu " + blocks_csv.string());
  CHECK(result.exit_code == 0);
  const std::string csv = slurp(blocks_csv);
  CHECK(csv.rfind("block_index,nu,timing,alice_bit,bob_bit", 0) == 0);
  // 500 data rows + header.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 501);
}

TEST_CASE("simulate artifacts are bit-identical across runs and worker counts") {
  const fs::path a = scratch_dir() / "repro_a.json";
  const fs::path b = scratch_dir() / "repro_b.json";
  const fs::path c = scratch_dir() / "repro_c.json";
  const std::string base = "simulate --n 4 --mu 0.8 --eta 0.2 --blocks 40000 --seed 77 ";
  CHECK(run_cli(base + "--out " + a.string(), "DPSQKD_WORKERS=1 ").exit_code == 0);
  CHECK(run_cli(base + "--out " + b.string(), "DPSQKD_WORKERS=1 ").exit_code == 0);
  CHECK(run_cli(base + "--out " + c.string(), "DPSQKD_WORKERS=4 ").exit_code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) == slurp(c));
}

TEST_CASE("verify-lemmas: all rows pass at desk scale") {
  const fs::path out = scratch_dir() / "lemmas.json";
  const auto result =
      run_cli("verify-lemmas --n-max 5 --trials 400 --seed 3 --out " + out.string());
  CHECK(result.exit_code == 0);
  const json artifact = json::parse(slurp(out));
  CHECK(artifact["all_pass"] == true);
  CHECK(artifact["support_suite"]["failures"] == 0);
  bool saw_sharpness = false;
  for (const auto& row : artifact["rows"]) {
    CHECK(row["verdict"] == "PASS");
    if (row["n"] == 4 && row["nu"] == 3) {
      CHECK(row["gram_rank"] == 8);
      CHECK(row["note"] == "sharpness (nu = n-1)");
      saw_sharpness = true;
    }
    if (row["n"] == 3 && row["nu"] == 1) {
      CHECK(row["gram_rank"] == 3);
      CHECK(row["below_2_pow_n_minus_1"] == true);
    }
  }
  CHECK(saw_sharpness);
}

TEST_CASE("verify-lemmas: guard on the block size") {
  CHECK(run_cli("verify-lemmas --n-max 9").exit_code == 1);
}

TEST_CASE("bounds: summary reports tight exponents at n = 3") {
  const fs::path csv = scratch_dir() / "bounds.csv";
  const fs::path summary = scratch_dir() / "bounds_summary.json";
  const auto result = run_cli("bounds --n 3 --points 8 --h-n 0.25 --out " + csv.string() +
                              " --summary-out " + summary.string());
  CHECK(result.exit_code == 0);
  const json artifact = json::parse(slurp(summary));
  CHECK(artifact["upper_exponent"].get<double>() == doctest::Approx(2.0).epsilon(0.05));
  CHECK(artifact["lower_exponent"].get<double>() == doctest::Approx(2.0).epsilon(0.05));
  CHECK(artifact["tightness"] == "PASS");
  CHECK(artifact["H_n_source"] == "flag");
  const std::string table = slurp(csv);
  CHECK(table.rfind("eta,mu_star,g_upper_cap,mu_lower,g_lower,H_n_used", 0) == 0);
}

TEST_CASE("bounds: nonzero QBER is rejected with an explanation") {
  const auto result = run_cli("bounds --n 3 --e 0.01");
  CHECK(result.exit_code == 1);
  CHECK(result.output.find("zero QBER") != std::string::npos);
}

TEST_CASE("estimate-hn: block-size guard honours --force") {
  CHECK(run_cli("estimate-hn --n 6 --restarts 1").exit_code == 1);
}

TEST_CASE("estimate-hn: positive floor, collapsed control, reproducible artifact") {
  const fs::path a = scratch_dir() / "floor_a.json";
  const fs::path b = scratch_dir() / "floor_b.json";
  const std::string base = "estimate-hn --n 3 --d 3 --restarts 8 --seed 7 --out ";
  CHECK(run_cli(base + a.string(), "DPSQKD_WORKERS=1 ").exit_code == 0);
  CHECK(run_cli(base + b.string(), "DPSQKD_WORKERS=4 ").exit_code == 0);
  CHECK(slurp(a) == slurp(b));
  const json artifact = json::parse(slurp(a));
  CHECK(artifact["estimate"].get<double>() > 0.01);
  CHECK(artifact["control"]["estimate"].get<double>() <= 1e-6);
  CHECK(artifact["control"]["d"] == 4);
  CHECK(artifact["best_params_digest"].get<std::string>().size() == 16);
}

TEST_CASE("fit: recovers a synthetic quadratic exponent and rejects bad data") {
  const fs::path csv = scratch_dir() / "points.csv";
  {
    std::ofstream out(csv);
    out << "eta,g_lower\r\n";
    for (double eta : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
      out << eta << "," << 7.0 * eta * eta << "\r\n";
    }
  }
  const fs::path result_path = scratch_dir() / "fit.json";
  const auto result = run_cli("fit --in " + csv.string() + " --x-col eta --y-col g_lower" +
                              " --out " + result_path.string());
  CHECK(result.exit_code == 0);
  const json artifact = json::parse(slurp(result_path));
  CHECK(artifact["exponent"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));

  const fs::path bad = scratch_dir() / "bad.csv";
  {
    std::ofstream out(bad);
    out << "eta,g_lower\r\n1e-3,0.0\r\n1e-2,1.0\r\n1e-1,1.0\r\n";
  }
  CHECK(run_cli("fit --in " + bad.string()).exit_code == 1);
}

TEST_CASE("unknown subcommand exits 1") {
  CHECK(run_cli("frobnicate").exit_code == 1);
}
