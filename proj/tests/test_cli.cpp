#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qmc/cli.hpp"
#include "qmc/dispersion_fit.hpp"
#include "qmc/output.hpp"

using namespace qmc;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) {
    dir = fs::temp_directory_path() / ("qmcomb_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "qmcomb");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string f;
  while (std::getline(in, f, ',')) out.push_back(f);
  return out;
}

void write_crossing_device(const std::string& path) {
  std::ofstream(path) << R"({
    "target": {"fsr_hz": 25e9, "d2_hz": 26.5e3, "kappa_hz": 12.14e6},
    "crossings": [{"g_hz": 60e6, "kappa_c_hz": 12.14e6, "fsr_hz": 25.6e9, "k0": -24}],
    "eta_e": {"default": 0.7}
  })";
}

void write_scan(const std::string& path, bool amx) {
  std::ofstream f(path);
  f << "# kappa_hz = 12.14e6\nk,dint_hz\n";
  for (int k = -35; k <= 35; ++k) {
    double v = 26.5e3 * k * k / 2.0;
    if (amx) v += crossing_shift_hz(std::sqrt(8.0 * 12.14e6 * 120e6), 120e6, -24.3, 300e6, k);
    f.precision(17);
    f << k << ',' << v << '\n';
  }
}

}  // namespace

TEST_CASE("spectrum writes one row per pair") {
  Scratch s("spectrum");
  const auto r = run({"spectrum", "--alpha", "0.8", "--zeta0", "0.4", "--eta-e", "0.7", "--out", s / "sp.csv"});
  REQUIRE(r.code == cli::kExitOk);
  const auto csv = slurp(s / "sp.csv");
  CHECK(csv.rfind(std::string("# qmcomb ") + kToolVersion + " spectrum", 0) == 0);
  CHECK(csv.find("alpha=0.8") != std::string::npos);
  const auto lines = data_lines(csv);
  REQUIRE(lines.size() == 28);
  CHECK(lines[0].rfind("k,", 0) == 0);
  CHECK(lines[1].rfind("9,", 0) == 0);
  CHECK(lines[27].rfind("35,", 0) == 0);
  CHECK_FALSE(fs::exists(s / "spectrum.svg"));
  CHECK(r.out.find("wrote 27 rows") != std::string::npos);
}

TEST_CASE("spectrum shows the crossing at the mirror mode") {
  Scratch s("spectrum_amx");
  write_crossing_device(s / "dev.json");
  const auto r = run({"spectrum", "--device", s / "dev.json", "--alpha", "0.8", "--zeta0", "0.4",
                      "--out", s / "sp.csv", "--svg", s / "sp.svg"});
  REQUIRE(r.code == cli::kExitOk);
  const auto lines = data_lines(slurp(s / "sp.csv"));
  auto sl = [&](int k) { return std::stod(split(lines[static_cast<std::size_t>(k - 8)])[7]); };
  CHECK(sl(24) > sl(23) + 1.0);
  CHECK(sl(24) > sl(25) + 1.0);
  CHECK(split(lines[24 - 8])[8] == "1");
  const auto svg = slurp(s / "sp.svg");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("mirror") != std::string::npos);
}

TEST_CASE("invalid alpha is a usage error and writes nothing") {
  Scratch s("spectrum_bad");
  const auto r = run({"spectrum", "--alpha", "1.2", "--out", s / "sp.csv", "--svg", s / "sp.svg"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("alpha < 1") != std::string::npos);
  CHECK_FALSE(fs::exists(s / "sp.csv"));
  CHECK_FALSE(fs::exists(s / "sp.svg"));
  CHECK(fs::is_empty(s.dir));

  CHECK(run({"spectrum", "--k-first", "0", "--out", s / "x.csv"}).code == cli::kExitUsage);
  CHECK(run({"spectrum", "--device", s / "missing.json", "--out", s / "x.csv"}).code == cli::kExitUsage);
  CHECK(fs::is_empty(s.dir));
}

TEST_CASE("verify passes on the default grid") {
  const auto r = run({"verify"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("86346 points") != std::string::npos);
  CHECK(r.out.find("verify: pass") != std::string::npos);
}

TEST_CASE("verify locates a corrupted formula") {
  cli::VerifyConfig cfg;
  cfg.zeta_points = 11;
  cfg.delta_points = 6;
  cfg.formula = [](double a, double z, double d, double e) {
    const double v = kernels::closed_form_variance(a, z, d, e);
    return d > 4.0 ? v * (1 + 1e-6) : v;
  };
  std::ostringstream out, err;
  CHECK(cli::cmd_verify(cfg, out, err) == cli::kExitVerifyFailed);
  CHECK(out.str().find("FAIL worst point") != std::string::npos);
  CHECK(out.str().find("delta=5") != std::string::npos);
  CHECK(out.str().find("verify: FAIL") != std::string::npos);
}

TEST_CASE("verify with stochastic checks") {
  const auto r = run({"verify", "--zeta-points", "5", "--delta-points", "3", "--stochastic",
                      "--stochastic-duration", "1e5"});
  CHECK(r.code == cli::kExitOk);
  std::size_t n = 0;
  for (std::size_t p = r.out.find("stochastic alpha="); p != std::string::npos;
       p = r.out.find("stochastic alpha=", p + 1))
    ++n;
  CHECK(n == cli::stochastic_points().size());
}

TEST_CASE("calibrate") {
  Scratch s("calibrate");
  const auto r = run({"calibrate", "--alpha", "0.8", "--zeta0", "0,0.4", "--pth-uw", "32", "--eta-e", "0.85",
                      "--out", s / "cal.csv"});
  REQUIRE(r.code == cli::kExitOk);
  const auto lines = data_lines(slurp(s / "cal.csv"));
  REQUIRE(lines.size() == 3);
  const auto header = split(lines[0]);
  auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  const auto a = split(lines[1]), b = split(lines[2]);
  CHECK(std::stod(a[col("f_squared")]) == doctest::Approx(1.312));
  CHECK(std::stod(a[col("power_uW")]) == doctest::Approx(42.0).epsilon(1e-3));
  CHECK(std::stod(a[col("transmission")]) == doctest::Approx(0.689).epsilon(1e-3));
  CHECK(std::stod(b[col("f_squared")]) == doctest::Approx(0.928));
  CHECK(std::stod(b[col("power_uW")]) == doctest::Approx(29.7).epsilon(1e-3));
  CHECK(std::stod(b[col("transmission")]) == doctest::Approx(0.560).epsilon(1e-3));
  CHECK(r.out.find("42.0") != std::string::npos);

  cli::CalibrateConfig empty;
  empty.out = s / "none.csv";
  std::ostringstream out, err;
  CHECK(cli::cmd_calibrate(empty, out, err) == cli::kExitUsage);
  CHECK(run({"calibrate", "--zeta0", "0", "--eta-e", "1.3", "--out", s / "none.csv"}).code == cli::kExitUsage);
  CHECK(run({"calibrate", "--zeta0", "--out", s / "none.csv"}).code == cli::kExitUsage);
  CHECK_FALSE(fs::exists(s / "none.csv"));
}

TEST_CASE("plan") {
  Scratch s("plan");
  const auto r = run({"plan", "--alpha", "0.8", "--d2-norm", "0.004366", "--zeta0-max", "0.8", "--out",
                      s / "plan.json", "--sweep-out", s / "sweep.csv", "--eta", "0.7"});
  REQUIRE(r.code == cli::kExitOk);
  const auto lines = data_lines(slurp(s / "sweep.csv"));
  REQUIRE(lines.size() == 10);
  const auto header = split(lines[0]);
  const auto col = static_cast<std::size_t>(std::find(header.begin(), header.end(), "n_pairs") - header.begin());
  REQUIRE(col < header.size());
  int prev = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int n = std::stoi(split(lines[i])[col]);
    CHECK(n >= prev);
    prev = n;
  }
  CHECK(prev == 27);
  const auto plan = nlohmann::json::parse(slurp(s / "plan.json"));
  CHECK(plan["optimum"]["n_pairs"] == 27);
  CHECK(plan.contains("degradation"));
  CHECK_FALSE(fs::exists(s / "plan.svg"));
  for (const auto& e : fs::directory_iterator(s.dir)) CHECK(e.path().extension() != ".svg");

  REQUIRE(run({"plan", "--d2-norm", "0.004366", "--zeta0-max", "0", "--out", s / "p0.json", "--sweep-out",
               s / "s0.csv", "--svg", s / "s0.svg"})
              .code == cli::kExitOk);
  CHECK(data_lines(slurp(s / "s0.csv")).size() == 2);
  CHECK(fs::exists(s / "s0.svg"));

  const auto phys = run({"plan", "--d2-hz", "26.5e3", "--wavelength-nm", "1543.2", "--loaded-q", "1.6e7",
                         "--zeta0-max", "0", "--out", s / "p1.json", "--sweep-out", s / "s1.csv"});
  REQUIRE(phys.code == cli::kExitOk);
  CHECK(nlohmann::json::parse(slurp(s / "p1.json"))["optimum"]["n_pairs"] == 14);
  CHECK(run({"plan", "--d2-norm", "0.004366", "--d2-hz", "26.5e3", "--out", s / "x.json"}).code ==
        cli::kExitUsage);
  CHECK(run({"plan", "--out", s / "x.json"}).code == cli::kExitUsage);
}

TEST_CASE("fit passes the dispersion contracts through") {
  Scratch s("fit");
  write_scan(s / "clean.csv", false);
  auto r = run({"fit", "--scan", s / "clean.csv", "--out", s / "fit.csv"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("flagged=0") != std::string::npos);
  CHECK(r.out.find("windows: -35..35(71)") != std::string::npos);
  const auto lines = data_lines(slurp(s / "fit.csv"));
  CHECK(lines.size() == 72);

  write_scan(s / "amx.csv", true);
  r = run({"fit", "--scan", s / "amx.csv", "--out", s / "fit2.csv", "--device-out", s / "dev.json",
           "--crossing-fsr-offset-hz", "300e6", "--svg", s / "fit.svg"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("flagged=13") != std::string::npos);
  CHECK(r.out.find("(fitted)") != std::string::npos);
  const auto dev = nlohmann::json::parse(slurp(s / "dev.json"));
  CHECK(dev["crossings"].size() == 1);
  CHECK(dev["crossings"][0]["k0"].get<double>() == doctest::Approx(-24.3).epsilon(1e-6));
  CHECK(fs::exists(s / "fit.svg"));

  std::ofstream(s / "dup.csv") << "k,dint_hz\n5,1\n5,2\n";
  r = run({"fit", "--scan", s / "dup.csv", "--out", s / "bad.csv"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find(":3:") != std::string::npos);
  std::ofstream(s / "nok.csv") << "k,dint_hz\n0,0\n1,1\n2,4\n3,9\n4,16\n";
  r = run({"fit", "--scan", s / "nok.csv", "--out", s / "bad.csv"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("kappa_hz") != std::string::npos);
  CHECK_FALSE(fs::exists(s / "bad.csv"));
  CHECK(run({"fit", "--out", s / "bad.csv"}).code == cli::kExitUsage);
}

TEST_CASE("identical runs give identical bytes") {
  Scratch s("determinism");
  write_crossing_device(s / "dev.json");
  for (const char* name : {"a.csv", "b.csv"})
    REQUIRE(run({"spectrum", "--device", s / "dev.json", "--out", s / name}).code == cli::kExitOk);
  CHECK(slurp(s / "a.csv") == slurp(s / "b.csv"));
  write_scan(s / "scan.csv", true);
  for (const char* name : {"fa.csv", "fb.csv"})
    REQUIRE(run({"fit", "--scan", s / "scan.csv", "--out", s / name, "--crossing-fsr-offset-hz", "300e6"}).code ==
            cli::kExitOk);
  CHECK(slurp(s / "fa.csv") == slurp(s / "fb.csv"));
}

TEST_CASE("flags override the config file, which overrides defaults") {
  Scratch s("config");
  std::ofstream(s / "run.toml") << "[spectrum]\nalpha = 0.5\nzeta0 = 0.1\nk-last = 12\n";
  REQUIRE(run({"--config", s / "run.toml", "spectrum", "--alpha", "0.7", "--out", s / "sp.csv"}).code ==
          cli::kExitOk);
  const auto csv = slurp(s / "sp.csv");
  CHECK(csv.find(" alpha=0.7 ") != std::string::npos);
  CHECK(csv.find(" zeta0=0.1 ") != std::string::npos);
  CHECK(csv.find(" eta_d=1 ") != std::string::npos);
  CHECK(data_lines(csv).size() == 5);
}

TEST_CASE("usage errors and help") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"bogus"}).code == cli::kExitUsage);
  CHECK(run({"spectrum", "--no-such-flag"}).code == cli::kExitUsage);
  CHECK(run({"spectrum", "--alpha", "abc"}).code == cli::kExitUsage);
  const auto h = run({"--help"});
  CHECK(h.code == cli::kExitOk);
  CHECK(h.out.find("spectrum") != std::string::npos);
  const auto v = run({"--version"});
  CHECK(v.code == cli::kExitOk);
  CHECK(v.out.find(kToolVersion) != std::string::npos);
}
