#include <catch2/catch_amalgamated.hpp>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// FUJITA_LAB_BIN is injected by the build so the suite can exercise the
// real binary end to end: exit codes, CSV schemas, and byte determinism.

namespace fs = std::filesystem;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "fujita_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CommandResult run_cli(const std::string& args) {
  const fs::path log = work_dir() / "cmd_output.txt";
  const std::string cmd = std::string(FUJITA_LAB_BIN) + " " + args + " > \"" +
                          log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  CommandResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::ostringstream buf;
  buf << in.rdbuf();
  r.output = buf.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
  REQUIRE(out.good());
}

// Parse one CSV column (by zero-based index) as doubles, skipping the header
// and any '#' comment lines.
std::vector<double> csv_column(const std::string& text, int col) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ls(line);
    std::string cell;
    for (int c = 0; std::getline(ls, cell, ','); ++c)
      if (c == col) out.push_back(std::strtod(cell.c_str(), nullptr));
  }
  return out;
}

}  // namespace

TEST_CASE("exponents prints the table and writes CSV", "[cli]") {
  const fs::path csv = work_dir() / "exponents.csv";
  const auto r = run_cli("exponents --N 12 --out \"" + csv.string() + "\"");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.output.find("pL        4\n") != std::string::npos);
  REQUIRE(r.output.find("pJL       3.92664991614215") != std::string::npos);
  const std::string text = slurp(csv);
  REQUIRE(text.find("name,value") == 0);
  REQUIRE(text.find("pL,4\n") != std::string::npos);

  REQUIRE(run_cli("exponents --N 2").exit_code == 2);
  REQUIRE(run_cli("exponents").exit_code == 2);
  REQUIRE(run_cli("--help").exit_code == 0);
  REQUIRE(run_cli("no-such-command").exit_code == 2);
}

TEST_CASE("steady writes the atlas schema", "[cli]") {
  const fs::path csv = work_dir() / "atlas.csv";
  const auto r = run_cli("steady --N 12 --p 5 --count 8 --out \"" +
                         csv.string() + "\"");
  REQUIRE(r.exit_code == 0);
  const std::string text = slurp(csv);
  REQUIRE(text.rfind("N,p,alpha,kind,k,rho_alpha,c_a,E\n", 0) == 0);
  const auto ks = csv_column(text, 4);
  REQUIRE(ks.size() == 8);
  for (double k : ks) REQUIRE(k <= 2.0);
  REQUIRE(text.find("hits_zero") != std::string::npos);

  // Single shot at kappa: the constant state, with its analytic energy.
  const fs::path one = work_dir() / "kappa_shot.csv";
  const auto r2 = run_cli("steady --N 12 --p 5 --alpha 0.7071067811865475 "
                          "--out \"" + one.string() + "\"");
  REQUIRE(r2.exit_code == 0);
  const std::string shot = slurp(one);
  REQUIRE(shot.find("bounded_positive") != std::string::npos);
  REQUIRE(csv_column(shot, 7).at(0) == Catch::Approx(10240.0).epsilon(1e-9));
}

TEST_CASE("energy-ratio emits a strictly decreasing F column", "[cli]") {
  const fs::path csv = work_dir() / "ratio.csv";
  const fs::path svg = work_dir() / "ratio.svg";
  const auto r = run_cli("energy-ratio --N 12 --p-min 3.8 --p-max 12 "
                         "--steps 12 --out \"" + csv.string() +
                         "\" --svg \"" + svg.string() + "\"");
  REQUIRE(r.exit_code == 0);
  const std::string text = slurp(csv);
  REQUIRE(text.rfind("N,p,xi,F_gamma,F_quadrature,abs_rel_diff\n", 0) == 0);
  const auto F = csv_column(text, 3);
  REQUIRE(F.size() == 12);
  for (std::size_t i = 0; i < F.size(); ++i) {
    REQUIRE(F[i] > 1.0);
    if (i > 0) REQUIRE(F[i] < F[i - 1]);
  }
  const auto rel = csv_column(text, 5);
  for (double d : rel) REQUIRE(d < 1e-8);
  REQUIRE(slurp(svg).rfind("<svg", 0) == 0);
}

TEST_CASE("spectrum emits eigenvalue and rate diagnostics", "[cli]") {
  const fs::path eig = work_dir() / "eigen.csv";
  const fs::path rate = work_dir() / "rate.csv";
  const auto r = run_cli("spectrum --N 12 --p 5 --s-steps 5 "
                         "--grid-points 1500 --out-eigen \"" + eig.string() +
                         "\" --out-rate \"" + rate.string() + "\"");
  REQUIRE(r.exit_code == 0);
  const std::string etext = slurp(eig);
  REQUIRE(etext.rfind("j,mu_analytic,chat,mu_discrete,abs_diff\n", 0) == 0);
  const auto mu = csv_column(etext, 1);
  REQUIRE(mu.size() == 6);
  REQUIRE(mu[0] == Catch::Approx(1.6909830056250525).epsilon(1e-12));
  const std::string rtext = slurp(rate);
  REQUIRE(rtext.rfind("s,xi0,xi1,tail_norm,log_xi0,predicted_log_xi0\n", 0) ==
          0);
  const auto xi0 = csv_column(rtext, 1);
  REQUIRE(xi0.size() == 5);
  for (double x : xi0) REQUIRE(x > 0.0);
}

TEST_CASE("evolve runs a config and the outputs are byte-identical on rerun",
          "[cli]") {
  const fs::path dir = work_dir();
  const std::string base =
      "N = 12\n"
      "p = 5\n"
      "frame = selfsimilar\n"
      "n = 200\n"
      "until = 3\n"
      "output_interval = 0.75\n"
      "initial = flat\n"
      "amplitude = 0.2\n";
  write_file(dir / "run_a.cfg",
             base + "out_prefix = " + (dir / "a" / "run").string() + "\n");
  write_file(dir / "run_b.cfg",
             base + "out_prefix = " + (dir / "b" / "run").string() + "\n");

  REQUIRE(run_cli("evolve --config \"" + (dir / "run_a.cfg").string() + "\"")
              .exit_code == 0);
  REQUIRE(run_cli("evolve --config \"" + (dir / "run_b.cfg").string() + "\"")
              .exit_code == 0);

  const std::string series = slurp(dir / "a" / "run_series.csv");
  REQUIRE(series.rfind("time,sup_norm,energy,z_vs_phi_inf,rate\n", 0) == 0);
  REQUIRE(series == slurp(dir / "b" / "run_series.csv"));
  for (int k = 0; k <= 4; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "run_profile_%04d.csv", k);
    const std::string pa = slurp(dir / "a" / name);
    REQUIRE(pa.rfind("# time = ", 0) == 0);
    REQUIRE(pa == slurp(dir / "b" / name));
  }

  // Energies decrease along the decay; z column constant at 0.
  const auto E = csv_column(series, 2);
  REQUIRE(E.size() >= 5);
  for (std::size_t i = 1; i < E.size(); ++i) REQUIRE(E[i] < E[i - 1]);
  for (double z : csv_column(series, 3)) REQUIRE(z == 0.0);
}

TEST_CASE("blowup classifies a super-threshold run from config", "[cli]") {
  const fs::path dir = work_dir();
  write_file(dir / "boom.cfg",
             "N = 6\n"
             "p = 5\n"
             "n = 200\n"
             "until = 5\n"
             "output_interval = 0.005\n"
             "initial = ground\n"
             "alpha = 1\n"
             "amplitude = 1.5\n"
             "svg = 1\n"
             "out_prefix = " + (dir / "boom").string() + "\n");
  const auto r =
      run_cli("blowup --config \"" + (dir / "boom.cfg").string() + "\"");
  REQUIRE(r.exit_code == 0);

  const std::string report = slurp(dir / "boom_report.csv");
  REQUIRE(report.rfind(
              "T_est,type,bound_constant,rate_points,rescaled_profiles\n",
              0) == 0);
  REQUIRE(report.find("type_I") != std::string::npos);
  const double T = csv_column(report, 0).at(0);
  REQUIRE(T > 0.02);
  REQUIRE(T < 0.2);

  const auto rates = csv_column(slurp(dir / "boom_rate.csv"), 1);
  REQUIRE(rates.size() > 30);
  // Late plateau near kappa = 0.7071.
  REQUIRE(rates.back() > 0.6);
  REQUIRE(rates.back() < 0.8);
  REQUIRE(fs::exists(dir / "boom_rescaled_0002.csv"));
  REQUIRE(slurp(dir / "boom_rate.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("config validation failures exit with code 2", "[cli]") {
  const fs::path dir = work_dir();
  REQUIRE(run_cli("evolve --config \"" + (dir / "missing.cfg").string() +
                  "\"").exit_code == 2);

  write_file(dir / "unknown.cfg",
             "N = 6\np = 5\nuntil = 1\ninitial = flat\namplitude = 1\n"
             "out_prefix = " + (dir / "x").string() + "\ntypo_key = 3\n");
  const auto r1 =
      run_cli("evolve --config \"" + (dir / "unknown.cfg").string() + "\"");
  REQUIRE(r1.exit_code == 2);
  REQUIRE(r1.output.find("typo_key") != std::string::npos);

  write_file(dir / "badnum.cfg",
             "N = 6\np = 5\nuntil = 1\nrtol = abc\ninitial = flat\n"
             "amplitude = 1\nout_prefix = " + (dir / "x").string() + "\n");
  REQUIRE(run_cli("evolve --config \"" + (dir / "badnum.cfg").string() +
                  "\"").exit_code == 2);

  write_file(dir / "badframe.cfg",
             "N = 6\np = 5\nuntil = 1\nframe = sideways\ninitial = flat\n"
             "amplitude = 1\nout_prefix = " + (dir / "x").string() + "\n");
  REQUIRE(run_cli("evolve --config \"" + (dir / "badframe.cfg").string() +
                  "\"").exit_code == 2);
}

TEST_CASE("numerical failures exit with code 3", "[cli]") {
  const fs::path dir = work_dir();
  // Data so close to the blowup threshold that the rate fit has no window.
  write_file(dir / "hot.cfg",
             "N = 6\np = 5\nn = 64\nuntil = 1\ninitial = flat\n"
             "amplitude = 8e7\nout_prefix = " + (dir / "hot").string() + "\n");
  const auto r =
      run_cli("blowup --config \"" + (dir / "hot.cfg").string() + "\"");
  REQUIRE(r.exit_code == 3);
  REQUIRE(r.output.find("numerical failure") != std::string::npos);
}
