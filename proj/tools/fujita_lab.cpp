// fujita-lab: command-line laboratory for the radial supercritical Fujita
// equation u_t = u_rr + (N-1)/r u_r + u^p. Subcommands cover exponent
// tables, steady-state atlases, the singular/constant energy ratio, the
// spectrum of the linearization at the singular steady state, and
// evolution / blowup experiments driven by key=value config files.
//
// Exit codes: 0 success, 2 invalid input (bad flags, bad config, violated
// preconditions), 3 numerical failure. CSV output is written atomically
// (temp file + rename) with floats at 17 significant digits and no
// timestamps, so identical configs produce byte-identical files. SVG output
// is presentation-only.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "fujita/dynamics.hpp"
#include "fujita/energy.hpp"
#include "fujita/params.hpp"
#include "fujita/spectrum.hpp"
#include "fujita/steady.hpp"
#include "fujita/threads.hpp"

namespace {

using fujita::domain_error;
using fujita::numerical_error;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_extended(const fujita::ExtendedReal& x) {
  return x.is_finite() ? fmt17(x.get()) : "inf";
}

std::string fmt_opt(const std::optional<double>& x) {
  return x ? fmt17(*x) : "nan";
}

// ---------------------------------------------------------------------------
// Atomic file output.

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec)
      throw domain_error("cannot create output directory: " +
                         target.parent_path().string());
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw domain_error("cannot open output file: " + tmp.string());
    out << content;
    if (!out.good())
      throw domain_error("failed writing output file: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw domain_error("cannot move output into place: " + path);
}

// ---------------------------------------------------------------------------
// key=value config files: one pair per line, '#' comments, duplicate and
// unknown keys rejected.

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

class Config {
 public:
  explicit Config(const std::string& path) : path_(path) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw domain_error(path + ":" + std::to_string(lineno) +
                           ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      if (key.empty() || val.empty())
        throw domain_error(path + ":" + std::to_string(lineno) +
                           ": empty key or value");
      if (!kv_.emplace(key, val).second)
        throw domain_error(path + ": duplicate config key '" + key + "'");
    }
  }

  std::string text(const std::string& key) const {
    const std::string* v = find(key);
    if (!v) throw domain_error(path_ + ": missing config key '" + key + "'");
    return *v;
  }
  std::string text_or(const std::string& key, const std::string& dflt) const {
    const std::string* v = find(key);
    return v ? *v : dflt;
  }
  double number(const std::string& key) const { return to_number(key, text(key)); }
  double number_or(const std::string& key, double dflt) const {
    const std::string* v = find(key);
    return v ? to_number(key, *v) : dflt;
  }
  long integer(const std::string& key) const { return to_integer(key, text(key)); }
  long integer_or(const std::string& key, long dflt) const {
    const std::string* v = find(key);
    return v ? to_integer(key, *v) : dflt;
  }
  bool flag_or(const std::string& key, bool dflt) const {
    const std::string* v = find(key);
    if (!v) return dflt;
    if (*v == "1" || *v == "true") return true;
    if (*v == "0" || *v == "false") return false;
    throw domain_error(path_ + ": config key '" + key +
                       "' expects 0/1/true/false, got '" + *v + "'");
  }

  // Every key must have been consumed by one of the accessors above.
  void done() const {
    std::vector<std::string> unknown;
    for (const auto& [k, v] : kv_)
      if (!used_.count(k)) unknown.push_back(k);
    if (!unknown.empty()) {
      std::string msg = path_ + ": unknown config key(s):";
      for (const auto& k : unknown) msg += " '" + k + "'";
      throw domain_error(msg);
    }
  }

 private:
  const std::string* find(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }
  double to_number(const std::string& key, const std::string& v) const {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0' || !std::isfinite(x))
      throw domain_error(path_ + ": config key '" + key +
                         "' is not a finite number: '" + v + "'");
    return x;
  }
  long to_integer(const std::string& key, const std::string& v) const {
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
      throw domain_error(path_ + ": config key '" + key +
                         "' is not an integer: '" + v + "'");
    return x;
  }

  std::string path_;
  std::map<std::string, std::string> kv_;
  mutable std::set<std::string> used_;
};

// ---------------------------------------------------------------------------
// Minimal SVG line charts. Presentation-only output; still a pure function
// of the data so reruns produce identical bytes.

struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> pts;
};

std::string svg_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string svg_tick(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string svg_chart(const std::string& title, const std::string& xlabel,
                      const std::string& ylabel,
                      const std::vector<ChartSeries>& data) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};
  const double W = 720, H = 440;
  const double x0 = 80, x1 = 690, y0 = 390, y1 = 50;  // y grows downward

  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool any = false;
  for (const auto& s : data)
    for (const auto& [x, y] : s.pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (!any) {
        xmin = xmax = x;
        ymin = ymax = y;
        any = true;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  if (!any) {
    xmin = ymin = 0;
    xmax = ymax = 1;
  }
  auto pad = [](double& lo, double& hi) {
    if (hi - lo < 1e-300) {
      const double d = std::max(1.0, std::fabs(hi)) * 0.1;
      lo -= d;
      hi += d;
    } else {
      const double d = (hi - lo) * 0.05;
      lo -= d;
      hi += d;
    }
  };
  pad(xmin, xmax);
  pad(ymin, ymax);

  auto X = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0); };
  auto Y = [&](double y) { return y0 + (y - ymin) / (ymax - ymin) * (y1 - y0); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H
      << "\">\n";
  out << "<rect width=\"" << W << "\" height=\"" << H
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << (W / 2)
      << "\" y=\"28\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"15\">"
      << title << "</text>\n";

  // Grid, ticks, labels.
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    out << "<line x1=\"" << svg_num(X(xv)) << "\" y1=\"" << svg_num(y0)
        << "\" x2=\"" << svg_num(X(xv)) << "\" y2=\"" << svg_num(y1)
        << "\" stroke=\"#dddddd\"/>\n";
    out << "<line x1=\"" << svg_num(x0) << "\" y1=\"" << svg_num(Y(yv))
        << "\" x2=\"" << svg_num(x1) << "\" y2=\"" << svg_num(Y(yv))
        << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << svg_num(X(xv)) << "\" y=\"" << svg_num(y0 + 18)
        << "\" text-anchor=\"middle\" font-family=\"monospace\" "
           "font-size=\"11\">"
        << svg_tick(xv) << "</text>\n";
    out << "<text x=\"" << svg_num(x0 - 8) << "\" y=\"" << svg_num(Y(yv) + 4)
        << "\" text-anchor=\"end\" font-family=\"monospace\" "
           "font-size=\"11\">"
        << svg_tick(yv) << "</text>\n";
  }
  out << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << (x1 - x0)
      << "\" height=\"" << (y0 - y1)
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  out << "<text x=\"" << ((x0 + x1) / 2) << "\" y=\"" << (H - 8)
      << "\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"12\">"
      << xlabel << "</text>\n";
  out << "<text x=\"18\" y=\"" << ((y0 + y1) / 2)
      << "\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"12\" transform=\"rotate(-90 18 "
      << ((y0 + y1) / 2) << ")\">" << ylabel << "</text>\n";

  for (std::size_t k = 0; k < data.size(); ++k) {
    const char* color = kPalette[k % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& [x, y] : data[k].pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (!first) out << " ";
      out << svg_num(X(x)) << "," << svg_num(Y(y));
      first = false;
    }
    out << "\"/>\n";
    const double ly = y1 + 16 + 16 * static_cast<double>(k);
    out << "<line x1=\"" << svg_num(x1 - 150) << "\" y1=\"" << svg_num(ly - 4)
        << "\" x2=\"" << svg_num(x1 - 126) << "\" y2=\"" << svg_num(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << svg_num(x1 - 120) << "\" y=\"" << svg_num(ly)
        << "\" font-family=\"monospace\" font-size=\"11\">" << data[k].label
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// exponents

int cmd_exponents(int N, const std::string& out_csv) {
  const fujita::ExponentTable t = fujita::exponent_table(N);
  std::printf("N = %d\n", N);
  std::printf("%-9s %s\n", "exponent", "value");
  std::printf("%-9s %s\n", "pS", fmt_extended(t.pS).c_str());
  std::printf("%-9s %s\n", "pJL", fmt_extended(t.pJL).c_str());
  std::printf("%-9s %s\n", "pL", fmt_extended(t.pL).c_str());
  std::printf("%-9s %s\n", "pH", fmt_extended(t.pH).c_str());
  if (!out_csv.empty()) {
    std::ostringstream csv;
    csv << "name,value\n";
    csv << "pS," << fmt_extended(t.pS) << "\n";
    csv << "pJL," << fmt_extended(t.pJL) << "\n";
    csv << "pL," << fmt_extended(t.pL) << "\n";
    csv << "pH," << fmt_extended(t.pH) << "\n";
    write_atomic(out_csv, csv.str());
    std::printf("wrote %s\n", out_csv.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// steady

const char* kind_name(fujita::SteadyKind k) {
  switch (k) {
    case fujita::SteadyKind::bounded_positive:
      return "bounded_positive";
    case fujita::SteadyKind::hits_zero:
      return "hits_zero";
    case fujita::SteadyKind::singular_reference:
      return "singular_reference";
  }
  return "unknown";
}

int cmd_steady(int N, double p, const std::string& frame_name,
               std::optional<double> alpha_single, double alpha_min,
               double alpha_max, int count, double rmax,
               const std::string& out_csv) {
  const fujita::ProblemParams P = fujita::make_params(N, p);
  const fujita::Frame frame = frame_name == "physical"
                                  ? fujita::Frame::physical
                                  : fujita::Frame::selfsimilar;

  std::vector<fujita::SteadyState> rows;
  if (alpha_single) {
    rows.push_back(fujita::shoot(P, *alpha_single, frame, rmax));
  } else {
    // Default sweep covers (kappa, 10 kappa], the range where every shot
    // must hit zero for p > pL.
    if (alpha_min <= 0.0) alpha_min = P.kappa * (1.0 + 9.0 / 64.0);
    if (alpha_max <= 0.0) alpha_max = 10.0 * P.kappa;
    rows = fujita::sweep_alpha(P, frame, alpha_min, alpha_max, count, rmax);
  }

  std::ostringstream csv;
  csv << "N,p,alpha,kind,k,rho_alpha,c_a,E\n";
  int zeros = 0, bounded = 0;
  for (const auto& s : rows) {
    if (s.kind == fujita::SteadyKind::hits_zero) ++zeros;
    if (s.kind == fujita::SteadyKind::bounded_positive) ++bounded;
    // The Gaussian-weighted energy is a selfsimilar-frame object; physical
    // shots get a nan energy column.
    const double E = frame == fujita::Frame::selfsimilar
                         ? fujita::energy_of(s)
                         : std::nan("");
    csv << N << "," << fmt17(p) << "," << fmt17(s.alpha) << ","
        << kind_name(s.kind) << ","
        << (s.k ? std::to_string(*s.k) : std::string("nan")) << ","
        << fmt_opt(s.rho_alpha) << "," << fmt_opt(s.c_a) << "," << fmt17(E)
        << "\n";
  }
  write_atomic(out_csv, csv.str());
  std::printf("wrote %s (%zu shots: %d hit zero, %d bounded positive)\n",
              out_csv.c_str(), rows.size(), zeros, bounded);
  return 0;
}

// ---------------------------------------------------------------------------
// energy-ratio

int cmd_energy_ratio(int N, double p_min, double p_max, int steps,
                     const std::string& out_csv, std::string out_svg) {
  if (!(p_max >= p_min))
    throw domain_error("energy-ratio: need --p-max >= --p-min");
  std::vector<double> ps;
  if (steps == 1) {
    ps.push_back(p_min);
  } else {
    for (int i = 0; i < steps; ++i)
      ps.push_back(p_min + (p_max - p_min) * i / (steps - 1));
  }

  std::vector<double> F(ps.size()), Fq(ps.size()), xi(ps.size());
  fujita::parallel_for(static_cast<int>(ps.size()), [&](int i) {
    const fujita::ProblemParams P = fujita::make_params(N, ps[i]);
    xi[i] = P.xi;
    F[i] = fujita::energy_ratio_F(P);
    Fq[i] = fujita::energy_ratio_F_quadrature(P);
  });

  std::ostringstream csv;
  csv << "N,p,xi,F_gamma,F_quadrature,abs_rel_diff\n";
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double rel = std::fabs(F[i] - Fq[i]) / std::fabs(F[i]);
    csv << N << "," << fmt17(ps[i]) << "," << fmt17(xi[i]) << ","
        << fmt17(F[i]) << "," << fmt17(Fq[i]) << "," << fmt17(rel) << "\n";
  }
  write_atomic(out_csv, csv.str());
  std::printf("wrote %s (%zu rows, F from %s down to %s)\n", out_csv.c_str(),
              ps.size(), fmt17(F.front()).c_str(), fmt17(F.back()).c_str());

  if (out_svg == "auto") {
    out_svg = out_csv;
    const auto dot = out_svg.find_last_of('.');
    if (dot != std::string::npos) out_svg.erase(dot);
    out_svg += ".svg";
  }
  if (!out_svg.empty()) {
    ChartSeries f{"F(p)", {}};
    for (std::size_t i = 0; i < ps.size(); ++i) f.pts.push_back({ps[i], F[i]});
    ChartSeries base{"limit 1", {{ps.front(), 1.0}, {ps.back(), 1.0}}};
    write_atomic(out_svg,
                 svg_chart("energy ratio E(phi_inf)/E(kappa), N = " +
                               std::to_string(N),
                           "p", "F", {f, base}));
    std::printf("wrote %s\n", out_svg.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// spectrum

int cmd_spectrum(int N, double p, int jmax, double alpha, double s_min,
                 double s_max, int s_steps, double rho_min, double rho_max,
                 int grid_points, const std::string& out_eigen,
                 const std::string& out_rate) {
  const fujita::ProblemParams P = fujita::make_params(N, p);
  const fujita::SpectralFrame F = fujita::build_frame(P, jmax);
  const fujita::DiscreteEigs eigs =
      fujita::discretize_A(F, rho_min, rho_max, grid_points,
                           fujita::BoundaryCondition::dirichlet, jmax + 1);

  std::ostringstream ecsv;
  ecsv << "j,mu_analytic,chat,mu_discrete,abs_diff\n";
  for (int j = 0; j <= jmax; ++j) {
    const bool have = j < static_cast<int>(eigs.leading.size());
    const double mud = have ? eigs.leading[j] : std::nan("");
    ecsv << j << "," << fmt17(F.mu[j]) << "," << fmt17(F.chat[j]) << ","
         << fmt17(mud) << ","
         << fmt17(have ? std::fabs(mud - F.mu[j]) : std::nan("")) << "\n";
  }
  write_atomic(out_eigen, ecsv.str());
  std::printf("wrote %s (mu_0 = %s, discrete %s)\n", out_eigen.c_str(),
              fmt17(F.mu[0]).c_str(),
              eigs.leading.empty() ? "nan" : fmt17(eigs.leading[0]).c_str());

  const fujita::RateDiagnostic rd =
      fujita::rate_diagnostic(F, alpha, s_min, s_max, s_steps);
  std::ostringstream rcsv;
  rcsv << "s,xi0,xi1,tail_norm,log_xi0,predicted_log_xi0\n";
  for (const auto& pt : rd.points) {
    rcsv << fmt17(pt.s) << "," << fmt17(pt.xi0) << "," << fmt17(pt.xi1) << ","
         << fmt17(pt.tail_norm) << "," << fmt17(std::log(pt.xi0)) << ","
         << fmt17(rd.predicted_log_xi0(pt.s)) << "\n";
  }
  write_atomic(out_rate, rcsv.str());
  std::printf("wrote %s (slope = %s vs mu_0 = %s, rel dev %s)\n",
              out_rate.c_str(), fmt17(rd.slope).c_str(),
              fmt17(rd.mu0).c_str(),
              fmt17(std::fabs(rd.slope - rd.mu0) / rd.mu0).c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// evolve / blowup (config-driven)

fujita::RealFn make_initial(const Config& cfg, const fujita::ProblemParams& P) {
  const std::string kind = cfg.text("initial");
  if (kind == "flat") {
    const double a = cfg.number("amplitude");
    return [a](double) { return a; };
  }
  if (kind == "bump") {
    const double base = cfg.number_or("base", 0.0);
    const double amp = cfg.number("amplitude");
    const double center = cfg.number_or("center", 0.0);
    const double width = cfg.number("width");
    if (!(width > 0.0))
      throw domain_error("config key 'width' must be positive");
    return [=](double rho) {
      const double u = (rho - center) / width;
      return base + amp * std::exp(-u * u);
    };
  }
  if (kind == "ground") {
    const double alpha = cfg.number_or("alpha", 1.0);
    const double amp = cfg.number_or("amplitude", 1.0);
    return [P, alpha, amp](double r) {
      return amp * fujita::phi_alpha(P, alpha, r);
    };
  }
  throw domain_error("config key 'initial' must be flat, bump, or ground");
}

struct RunSetup {
  fujita::ProblemParams P;
  fujita::Frame frame = fujita::Frame::selfsimilar;
  double until = 0;
  fujita::DtControl ctl;
  std::string prefix;
  bool svg = false;
  fujita::EvolutionState state;
};

RunSetup read_run_config(const std::string& path, bool frame_fixed_physical) {
  const Config cfg(path);
  const int N = static_cast<int>(cfg.integer("N"));
  const double p = cfg.number("p");
  fujita::ProblemParams P = fujita::make_params(N, p);

  fujita::Frame frame = fujita::Frame::physical;
  if (!frame_fixed_physical) {
    const std::string f = cfg.text_or("frame", "selfsimilar");
    if (f == "physical")
      frame = fujita::Frame::physical;
    else if (f == "selfsimilar")
      frame = fujita::Frame::selfsimilar;
    else
      throw domain_error(
          "config key 'frame' must be selfsimilar or physical");
  }

  const double R = cfg.number_or("R", fujita::kDefaultDomainRadius);
  const int n =
      static_cast<int>(cfg.integer_or("n", fujita::kDefaultGridPoints));
  const double time0 = cfg.number_or("time0", 0.0);

  RunSetup rs{P,
              frame,
              cfg.number("until"),
              fujita::DtControl{},
              cfg.text("out_prefix"),
              cfg.flag_or("svg", false),
              fujita::EvolutionState{}};
  rs.ctl.rtol = cfg.number_or("rtol", rs.ctl.rtol);
  rs.ctl.atol = cfg.number_or("atol", rs.ctl.atol);
  rs.ctl.output_interval =
      cfg.number_or("output_interval", rs.ctl.output_interval);
  rs.ctl.blowup_threshold =
      cfg.number_or("blowup_threshold", rs.ctl.blowup_threshold);
  const long ms = cfg.integer_or(
      "max_steps", static_cast<long>(rs.ctl.max_steps));
  if (ms < 1) throw domain_error("config key 'max_steps' must be >= 1");
  rs.ctl.max_steps = static_cast<std::size_t>(ms);

  const fujita::RealFn init = make_initial(cfg, P);
  cfg.done();
  rs.state = fujita::make_state(P, frame, R, n, init, time0);
  return rs;
}

std::string profile_csv(double time, double h,
                        const std::vector<double>& values) {
  std::ostringstream csv;
  csv << "# time = " << fmt17(time) << "\n";
  csv << "rho,value\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    csv << fmt17(static_cast<double>(i) * h) << "," << fmt17(values[i])
        << "\n";
  return csv.str();
}

std::string numbered(const std::string& prefix, const char* stem,
                     std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%s_%04zu.csv", stem, k);
  return prefix + buf;
}

// Shared by evolve and blowup: the time-series CSV with the frame-specific
// rate column, the per-snapshot profile files, and the optional SVGs.
void write_run_outputs(const RunSetup& rs, const fujita::EvolutionState& run,
                       const std::optional<double>& T_est) {
  std::ostringstream csv;
  csv << "time,sup_norm,energy,z_vs_phi_inf,rate\n";
  for (const auto& hp : run.history) {
    // Rate observable: in the selfsimilar frame the sup norm itself; in the
    // physical frame sup * (T-t)^{1/(p-1)} once a blowup time is fitted.
    double rate = std::nan("");
    if (run.frame == fujita::Frame::selfsimilar) {
      rate = hp.sup_norm;
    } else if (T_est && hp.time < *T_est) {
      rate = hp.sup_norm *
             std::pow(*T_est - hp.time, 1.0 / (run.params.p - 1.0));
    }
    csv << fmt17(hp.time) << "," << fmt17(hp.sup_norm) << ","
        << fmt17(hp.energy) << "," << hp.z_vs_phi_inf << "," << fmt17(rate)
        << "\n";
  }
  write_atomic(rs.prefix + "_series.csv", csv.str());

  const double h = run.h();
  for (std::size_t k = 0; k < run.snapshots.size(); ++k)
    write_atomic(numbered(rs.prefix, "profile", k),
                 profile_csv(run.snapshots[k].time, h, run.snapshots[k].values));

  if (!rs.svg) return;

  ChartSeries sup{"sup_norm", {}}, en{"energy", {}};
  for (const auto& hp : run.history) {
    sup.pts.push_back({hp.time, hp.sup_norm});
    en.pts.push_back({hp.time, hp.energy});
  }
  const char* tvar = run.frame == fujita::Frame::selfsimilar ? "s" : "t";
  write_atomic(rs.prefix + "_series.svg",
               svg_chart("evolution history", tvar, "value", {sup, en}));

  // At most six snapshot profiles, evenly spread including the endpoints.
  std::vector<ChartSeries> profs;
  const std::size_t S = run.snapshots.size();
  const std::size_t shown = std::min<std::size_t>(S, 6);
  std::set<std::size_t> picked;
  for (std::size_t i = 0; i < shown; ++i)
    picked.insert(shown == 1 ? 0 : i * (S - 1) / (shown - 1));
  for (std::size_t k : picked) {
    char label[40];
    std::snprintf(label, sizeof label, "%s = %.6g", tvar,
                  run.snapshots[k].time);
    ChartSeries cs{label, {}};
    for (std::size_t i = 0; i < run.snapshots[k].values.size(); ++i)
      cs.pts.push_back(
          {static_cast<double>(i) * h, run.snapshots[k].values[i]});
    profs.push_back(std::move(cs));
  }
  write_atomic(rs.prefix + "_profiles.svg",
               svg_chart("stored profiles", "rho", "value", profs));
}

int cmd_evolve(const std::string& config_path) {
  RunSetup rs = read_run_config(config_path, false);
  const fujita::EvolutionState run =
      fujita::evolve(rs.state, rs.until, rs.ctl);
  write_run_outputs(rs, run, std::nullopt);
  std::printf(
      "%s: t_end = %s, sup = %s, %zu history rows, %zu profiles -> %s_*\n",
      run.status == fujita::RunStatus::blew_up ? "blew_up" : "completed",
      fmt17(run.time).c_str(), fmt17(run.sup_norm()).c_str(),
      run.history.size(), run.snapshots.size(), rs.prefix.c_str());
  return 0;
}

const char* blowup_type_name(fujita::BlowupType t) {
  switch (t) {
    case fujita::BlowupType::type_I:
      return "type_I";
    case fujita::BlowupType::type_II_suspect:
      return "type_II_suspect";
    case fujita::BlowupType::none:
      return "none";
  }
  return "unknown";
}

int cmd_blowup(const std::string& config_path) {
  RunSetup rs = read_run_config(config_path, true);
  const fujita::EvolutionState run =
      fujita::evolve(rs.state, rs.until, rs.ctl);
  const fujita::BlowupReport rep = fujita::classify_blowup(run);
  const double C = fujita::universal_bound_check(run, rep.T_est);

  write_run_outputs(rs, run, rep.T_est);

  std::ostringstream rate;
  rate << "time,rate\n";
  for (const auto& [t, r] : rep.rate_series)
    rate << fmt17(t) << "," << fmt17(r) << "\n";
  write_atomic(rs.prefix + "_rate.csv", rate.str());

  for (std::size_t k = 0; k < rep.rescaled.size(); ++k)
    write_atomic(numbered(rs.prefix, "rescaled", k),
                 profile_csv(rep.rescaled[k].first, rep.rescaled[k].second.h,
                             rep.rescaled[k].second.values));

  std::ostringstream report;
  report << "T_est,type,bound_constant,rate_points,rescaled_profiles\n";
  report << fmt_opt(rep.T_est) << "," << blowup_type_name(rep.type) << ","
         << fmt17(C) << "," << rep.rate_series.size() << ","
         << rep.rescaled.size() << "\n";
  write_atomic(rs.prefix + "_report.csv", report.str());

  if (rs.svg && !rep.rate_series.empty()) {
    ChartSeries rates{"sup*(T-t)^{1/(p-1)}", {}};
    for (const auto& [t, r] : rep.rate_series) rates.pts.push_back({t, r});
    ChartSeries kap{"kappa",
                    {{rep.rate_series.front().first, rs.P.kappa},
                     {rep.rate_series.back().first, rs.P.kappa}}};
    write_atomic(rs.prefix + "_rate.svg",
                 svg_chart("blowup rate", "t", "rate", {rates, kap}));
  }

  std::printf("%s: T_est = %s, bound C = %s, %zu rate points -> %s_*\n",
              blowup_type_name(rep.type), fmt_opt(rep.T_est).c_str(),
              fmt17(C).c_str(), rep.rate_series.size(), rs.prefix.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "fujita-lab: numerical laboratory for the radial supercritical "
      "Fujita equation"};
  app.require_subcommand(1);

  // exponents
  auto* expo = app.add_subcommand(
      "exponents", "Critical exponent table pS, pJL, pL, pH for a dimension");
  int expo_N = 0;
  std::string expo_out;
  expo->add_option("--N", expo_N, "space dimension (>= 3)")->required();
  expo->add_option("--out", expo_out, "also write the table as CSV");

  // steady
  auto* steady = app.add_subcommand(
      "steady", "Shoot steady-state profiles and export the atlas CSV");
  int st_N = 0, st_count = 64;
  double st_p = 0, st_amin = 0, st_amax = 0, st_rmax = 0;
  std::optional<double> st_alpha;
  std::string st_frame = "selfsimilar", st_out;
  steady->add_option("--N", st_N, "space dimension")->required();
  steady->add_option("--p", st_p, "nonlinearity exponent")->required();
  steady->add_option("--frame", st_frame, "selfsimilar or physical")
      ->check(CLI::IsMember({"selfsimilar", "physical"}));
  auto* opt_alpha =
      steady->add_option("--alpha", st_alpha, "single shot at this alpha");
  auto* opt_amin = steady->add_option(
      "--alpha-min", st_amin, "sweep start (default just above kappa)");
  auto* opt_amax =
      steady->add_option("--alpha-max", st_amax, "sweep end (default 10 kappa)");
  auto* opt_count =
      steady->add_option("--count", st_count, "number of shots in the sweep");
  steady->add_option("--rmax", st_rmax,
                     "integration radius (default: module heuristic)");
  steady->add_option("--out", st_out, "atlas CSV path")->required();
  opt_alpha->excludes(opt_amin)->excludes(opt_amax)->excludes(opt_count);

  // energy-ratio
  auto* eratio = app.add_subcommand(
      "energy-ratio",
      "Energy ratio F(p) = E(phi_inf)/E(kappa) over a p range");
  int er_N = 0, er_steps = 0;
  double er_pmin = 0, er_pmax = 0;
  std::string er_out = "energy_ratio.csv", er_svg = "auto";
  eratio->add_option("--N", er_N, "space dimension")->required();
  eratio->add_option("--p-min", er_pmin, "start of the p range")->required();
  eratio->add_option("--p-max", er_pmax, "end of the p range")->required();
  eratio->add_option("--steps", er_steps, "number of p samples")
      ->required()
      ->check(CLI::PositiveNumber);
  eratio->add_option("--out", er_out, "ratio CSV path");
  eratio->add_option("--svg", er_svg,
                     "SVG path ('auto' = next to the CSV, '' = none)");

  // spectrum
  auto* spec = app.add_subcommand(
      "spectrum",
      "Eigenvalues of the linearization at phi_inf and the spectral rate "
      "diagnostic");
  int sp_N = 0, sp_jmax = 5, sp_ssteps = 9, sp_points = 4000;
  double sp_p = 0, sp_alpha = 1.0, sp_smin = -8, sp_smax = -4;
  double sp_rmin = 0.05, sp_rmax = 25.0;
  std::string sp_eigen = "spectrum_eigen.csv", sp_rate = "spectrum_rate.csv";
  spec->add_option("--N", sp_N, "space dimension")->required();
  spec->add_option("--p", sp_p, "nonlinearity exponent (> pJL)")->required();
  spec->add_option("--jmax", sp_jmax, "highest mode index");
  spec->add_option("--alpha", sp_alpha, "ground-state parameter for the rate");
  spec->add_option("--s-min", sp_smin, "rate window start");
  spec->add_option("--s-max", sp_smax, "rate window end");
  spec->add_option("--s-steps", sp_ssteps, "rate samples");
  spec->add_option("--rho-min", sp_rmin, "discretization inner radius");
  spec->add_option("--rho-max", sp_rmax, "discretization outer radius");
  spec->add_option("--grid-points", sp_points, "discretization grid points");
  spec->add_option("--out-eigen", sp_eigen, "eigenvalue CSV path");
  spec->add_option("--out-rate", sp_rate, "rate-diagnostic CSV path");

  // evolve / blowup
  auto* evo = app.add_subcommand(
      "evolve", "Run one evolution experiment from a key=value config file");
  std::string evo_config;
  evo->add_option("--config", evo_config, "config file path")->required();

  auto* blow = app.add_subcommand(
      "blowup",
      "Run a physical-frame experiment and classify the blowup");
  std::string blow_config;
  blow->add_option("--config", blow_config, "config file path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (expo->parsed()) return cmd_exponents(expo_N, expo_out);
    if (steady->parsed())
      return cmd_steady(st_N, st_p, st_frame, st_alpha, st_amin, st_amax,
                        st_count, st_rmax, st_out);
    if (eratio->parsed())
      return cmd_energy_ratio(er_N, er_pmin, er_pmax, er_steps, er_out,
                              er_svg);
    if (spec->parsed())
      return cmd_spectrum(sp_N, sp_p, sp_jmax, sp_alpha, sp_smin, sp_smax,
                          sp_ssteps, sp_rmin, sp_rmax, sp_points, sp_eigen,
                          sp_rate);
    if (evo->parsed()) return cmd_evolve(evo_config);
    if (blow->parsed()) return cmd_blowup(blow_config);
  } catch (const domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const numerical_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 3;
  }
  return 0;
}
