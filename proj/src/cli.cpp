#include "rigidity/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "rigidity/delta.hpp"
#include "rigidity/eta.hpp"
#include "rigidity/mu.hpp"
#include "rigidity/solver.hpp"

namespace rigidity::cli {

namespace {

using nlohmann::json;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A verification ran to completion but its residuals exceed the threshold.
class VerificationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_number(std::string_view text, const char* what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw UsageError(std::string("cannot parse ") + what + " '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void check_tol(double tol) {
  if (!(tol >= kMinTolerance && tol <= 1e-2)) throw UsageError("--tol must lie in [1e-12, 1e-2]");
}

Complex parse_point(const std::string& text, const char* what) {
  try {
    return parse_complex(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("cannot parse ") + what + ": " + e.what());
  }
}

// Writes to --out when given, otherwise to the command's stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw UsageError("cannot open output file '" + path + "'");
    }
    stream_ = file_ ? file_.get() : &fallback;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

// ---------------------------------------------------------------- commands

struct Common {
  std::string eta;
  double tol = 1e-10;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool with_out = true) {
  cmd->add_option("--eta", c.eta, "eta spec: const:<c>, osc:<rho>,<A>,<omega>, frac, file:<path>")->required();
  cmd->add_option("--tol", c.tol, "absolute tolerance in [1e-12, 1e-2]")->capture_default_str();
  if (with_out) cmd->add_option("--out", c.out, "output path (default stdout)");
}

struct PsiArgs {
  Common common;
  std::string w;
  std::string grid;
  bool oracle = false;
};

int cmd_psi(const PsiArgs& a, std::ostream& out) {
  check_tol(a.common.tol);
  const auto eta = parse_eta(a.common.eta);
  const StripPoint w = parse_point(a.w, "--w");
  auto grid = parse_grid(a.grid);
  std::sort(grid.begin(), grid.end());
  const PsiEvaluator psi(eta, w, grid.back(), a.common.tol);
  const auto traj = psi.trajectory(grid);
  std::vector<Complex> oracle;
  if (a.oracle) oracle = psi_ode_trajectory(eta, w, grid, a.common.tol);

  Sink sink(a.common.out, out);
  *sink << (a.oracle ? "t,re_psi,im_psi,re_oracle,im_oracle,diff\n" : "t,re_psi,im_psi\n");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    *sink << fmt(traj[i].t) << ',' << fmt(traj[i].psi.real()) << ',' << fmt(traj[i].psi.imag());
    if (a.oracle) {
      *sink << ',' << fmt(oracle[i].real()) << ',' << fmt(oracle[i].imag()) << ',' << fmt(std::abs(traj[i].psi - oracle[i]));
    }
    *sink << '\n';
  }
  return kExitOk;
}

struct MuArgs {
  Common common;
  std::string w;
  std::string method = "auto";
};

int cmd_mu(const MuArgs& a, std::ostream& out) {
  check_tol(a.common.tol);
  const auto eta = parse_eta(a.common.eta);
  const StripPoint w = parse_point(a.w, "--w");
  const TailMethodChoice choice = a.method == "crude"         ? TailMethodChoice::crude
                                  : a.method == "accelerated" ? TailMethodChoice::rotation_accelerated
                                                              : TailMethodChoice::automatic;
  const auto r = mu_eval(eta, w, a.common.tol, choice);
  const json j = {{"re", r.value.real()},
                  {"im", r.value.imag()},
                  {"err", r.error},
                  {"method", to_string(r.certificate.method)},
                  {"truncation_point", r.certificate.truncation_point},
                  {"expansion_order", r.certificate.expansion_order}};
  Sink sink(a.common.out, out);
  *sink << j.dump() << '\n';
  return kExitOk;
}

struct ScanArgs {
  Common common;
  std::string sigma;
  std::string tau;
  double zero_tol = kDefaultZeroTolerance;
  std::string grid_out;
};

json zero_json(const ZeroRecord& z) {
  json j = {{"type", "zero"},
            {"re", z.location.real()},
            {"im", z.location.imag()},
            {"residual", z.residual},
            {"newton_iters", z.newton_iters},
            {"winding", z.winding ? json(*z.winding) : json(nullptr)},
            {"certified", z.certified()},
            {"partner_nonzero", z.partner_nonzero}};
  if (z.partner_value) {
    j["partner_re"] = z.partner_value->real();
    j["partner_im"] = z.partner_value->imag();
  } else {
    j["partner_re"] = nullptr;
    j["partner_im"] = nullptr;
  }
  return j;
}

int cmd_scan(const ScanArgs& a, std::ostream& out) {
  check_tol(a.common.tol);
  if (!(a.zero_tol >= kMinTolerance && a.zero_tol <= 1e-2)) throw UsageError("--zero-tol must lie in [1e-12, 1e-2]");
  const auto eta = parse_eta(a.common.eta);
  const auto s = parse_step_range(a.sigma);
  const auto t = parse_step_range(a.tau);
  const ScanRegion region{s.lo, s.hi, s.step, t.lo, t.hi, t.step};
  const auto report = scan_strip(eta, region, a.zero_tol, a.common.tol);

  Sink sink(a.common.out, out);
  std::size_t violations = 0;
  for (const auto& z : report.zeros) {
    *sink << zero_json(z).dump() << '\n';
    if (!z.partner_nonzero) ++violations;
  }
  for (const auto& c : report.candidates) {
    *sink << json{{"type", "candidate"}, {"re", c.real()}, {"im", c.imag()}}.dump() << '\n';
  }
  const json summary = {{"type", "summary"},
                        {"eta", eta.id()},
                        {"sigma_min", report.region.sigma_min},
                        {"sigma_max", report.region.sigma_max},
                        {"sigma_step", report.region.sigma_step},
                        {"tau_min", report.region.tau_min},
                        {"tau_max", report.region.tau_max},
                        {"tau_step", report.region.tau_step},
                        {"sigma_clamped", report.sigma_clamped},
                        {"zeros", report.zeros.size()},
                        {"candidates", report.candidates.size()},
                        {"pair_violations", violations},
                        {"line_hypothesis_min", number_or_null(report.line_hypothesis_min)},
                        {"line_hypothesis_argmin", report.line.argmin_beta}};
  *sink << summary.dump() << '\n';

  std::string grid_path = a.grid_out;
  if (grid_path.empty() && !a.common.out.empty()) grid_path = a.common.out + ".grid.csv";
  if (!grid_path.empty()) {
    std::ofstream grid(grid_path, std::ios::binary);
    if (!grid) throw UsageError("cannot open grid output '" + grid_path + "'");
    grid << "sigma,tau,abs_mu\n";
    for (const auto& g : report.grid) grid << fmt(g.sigma) << ',' << fmt(g.tau) << ',' << fmt(g.abs_mu) << '\n';
  }
  return kExitOk;
}

struct VerifyArgs {
  Common common;
  std::string s;
  std::string w;
  std::string grid;
  double tau = 0.0;
  double t_max = 1e4;
  double threshold = 1e-5;
  double zero_tol = kDefaultZeroTolerance;
  bool refine = false;
  std::string summary;
};

void emit_summary(const VerifyArgs& a, const json& j, std::ostream& err) {
  if (a.summary.empty()) {
    err << j.dump() << '\n';
    return;
  }
  std::ofstream f(a.summary, std::ios::binary);
  if (!f) throw UsageError("cannot open summary output '" + a.summary + "'");
  f << j.dump() << '\n';
}

void require_pass(bool pass, const std::string& what) {
  if (!pass) throw VerificationFailed(what);
}

int verify_volterra(const VerifyArgs& a, std::ostream& out) {
  check_tol(a.common.tol);
  const auto eta = parse_eta(a.common.eta);
  const StripPoint s = parse_point(a.s, "--s");
  const auto grid = parse_grid(a.grid);
  std::vector<Complex> direct(grid.size()), volterra(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    direct[i] = delta_direct(eta, s, grid[i], a.common.tol);
    volterra[i] = delta_volterra(eta, s, grid[i], a.common.tol);
  }
  Sink sink(a.common.out, out);
  *sink << "t,re_direct,im_direct,re_volterra,im_volterra,residual\n";
  bool pass = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double residual = std::abs(direct[i] - volterra[i]);
    pass = pass && residual <= a.threshold * (1.0 + std::abs(direct[i]));
    *sink << fmt(grid[i]) << ',' << fmt(direct[i].real()) << ',' << fmt(direct[i].imag()) << ','
          << fmt(volterra[i].real()) << ',' << fmt(volterra[i].imag()) << ',' << fmt(residual) << '\n';
  }
  require_pass(pass, "volterra residual above threshold");
  return kExitOk;
}

int verify_prop1(const VerifyArgs& a, std::ostream& out) {
  check_tol(a.common.tol);
  const auto eta = parse_eta(a.common.eta);
  const StripPoint s = parse_point(a.s, "--s");
  const auto grid = parse_grid(a.grid);
  Sink sink(a.common.out, out);
  *sink << "t,re_lhs,im_lhs,re_rhs,im_rhs,residual\n";
  bool pass = true;
  for (double t : grid) {
    const auto r = prop1_residual(eta, s, t, a.common.tol);
    pass = pass && r.residual <= a.threshold * (1.0 + std::abs(r.lhs) * std::sqrt(t));
    *sink << fmt(t) << ',' << fmt(r.lhs.real()) << ',' << fmt(r.lhs.imag()) << ',' << fmt(r.rhs.real()) << ','
          << fmt(r.rhs.imag()) << ',' << fmt(r.residual) << '\n';
  }
  require_pass(pass, "integral-equation residual above threshold");
  return kExitOk;
}

int verify_lemma1(const VerifyArgs& a, std::ostream& out) {
  check_tol(a.common.tol);
  const auto eta = parse_eta(a.common.eta);
  Complex w = parse_point(a.w, "--w");
  if (a.refine) {
    NewtonOptions opts;
    opts.zero_tol = a.zero_tol;
    opts.certify = false;
    w = find_zero_newton(eta, w, opts).location;
  }
  const auto grid = parse_grid(a.grid.empty() ? std::string("1:1000:999") : a.grid);
  const auto r = lemma1_residual(eta, w, grid, a.common.tol, a.zero_tol);
  const double trend = r.first_half_sup > 0.0 ? r.second_half_sup / r.first_half_sup : 1.0;
  const bool pass = r.sup <= r.bound + 1e-6;
  const json j = {{"w", complex_json(w)},        {"mu_abs", r.mu_abs},
                  {"sup", r.sup},                {"bound", r.bound},
                  {"first_half_sup", r.first_half_sup}, {"second_half_sup", r.second_half_sup},
                  {"trend", trend},              {"pass", pass}};
  Sink sink(a.common.out, out);
  *sink << j.dump() << '\n';
  require_pass(pass, "residual sup exceeds the bound");
  return kExitOk;
}

int verify_majoration(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  check_tol(a.common.tol);
  const auto eta = parse_eta(a.common.eta);
  if (a.tau == 0.0) throw UsageError("--tau must be nonzero");
  const auto grid = parse_grid(a.grid.empty() ? std::string("1:1000:999") : a.grid);
  const auto r = majoration_check(eta, a.tau, grid, a.common.tol);
  Sink sink(a.common.out, out);
  *sink << "t,re_delta_s,im_delta_s,re_delta_line,im_delta_line,ratio_observed,ratio_predicted\n";
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    *sink << fmt(r.grid[i]) << ",,," << fmt(r.delta_line[i].real()) << ',' << fmt(r.delta_line[i].imag()) << ",,\n";
  }
  const bool pass = r.trend >= 0.5 && r.trend <= 2.0;
  emit_summary(a,
               {{"type", "majoration"},
                {"tau", a.tau},
                {"mu_line", complex_json(r.mu_line)},
                {"sup", r.sup_value},
                {"first_half_sup", r.first_half_sup},
                {"second_half_sup", r.second_half_sup},
                {"trend", number_or_null(r.trend)},
                {"pass", pass}},
               err);
  require_pass(pass, "majoration trend outside [0.5, 2]");
  return kExitOk;
}

int verify_ratio(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  check_tol(a.common.tol);
  const auto eta = parse_eta(a.common.eta);
  const StripPoint s = parse_point(a.s, "--s");
  if (!(a.t_max > 2.0)) throw UsageError("--t-max must exceed 2");
  const auto grid = parse_grid(a.grid.empty() ? "log2:" + fmt(a.t_max) + ":16" : a.grid);
  const auto samples = ratio_series(eta, s, grid, a.common.tol);
  Sink sink(a.common.out, out);
  *sink << "t,re_delta_s,im_delta_s,re_delta_line,im_delta_line,ratio_observed,ratio_predicted\n";
  for (const auto& d : samples) {
    *sink << fmt(d.t) << ',' << fmt(d.delta_s.real()) << ',' << fmt(d.delta_s.imag()) << ','
          << fmt(d.delta_line.real()) << ',' << fmt(d.delta_line.imag()) << ',' << fmt(d.ratio_observed) << ','
          << fmt(d.ratio_predicted) << '\n';
  }
  const auto& last = samples.back();
  const double rel = last.flagged ? INFINITY : std::abs(last.ratio_observed / last.ratio_predicted - 1.0);
  const bool pass = rel <= 0.1;
  emit_summary(a,
               {{"type", "ratio"},
                {"t", last.t},
                {"ratio_observed", number_or_null(last.ratio_observed)},
                {"ratio_predicted", last.ratio_predicted},
                {"relative_deviation", number_or_null(rel)},
                {"oscillation_coeff", complex_json(last.oscillation_coeff)},
                {"pass", pass}},
               err);
  require_pass(pass, "observed ratio deviates from the prediction by more than 10%");
  return kExitOk;
}

struct RotationArgs {
  Common common;
  double T = 0.0;
  std::string rho;
  int grid_points = 200;
};

int cmd_rotation(const RotationArgs& a, std::ostream& out) {
  check_tol(a.common.tol);
  const auto eta = parse_eta(a.common.eta);
  if (a.grid_points < 2) throw UsageError("--grid-points must be at least 2");
  const auto estimate = rotation_estimate(eta, a.T, a.common.tol);
  const Complex candidate = a.rho.empty() ? estimate.rho : parse_point(a.rho, "--rho");
  std::vector<double> grid(static_cast<std::size_t>(a.grid_points) + 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = i + 1 == grid.size() ? a.T : 1.0 + (a.T - 1.0) * static_cast<double>(i) / a.grid_points;
  }
  const auto trend = hypothesis_trend(eta, candidate, grid, a.common.tol);
  const json j = {{"eta", eta.id()},
                  {"T", a.T},
                  {"rho_estimate", complex_json(estimate.rho)},
                  {"error_bound", estimate.error_bound},
                  {"rho_candidate", complex_json(candidate)},
                  {"hypothesis_sup", trend.sup},
                  {"first_half_sup", trend.first_half_sup},
                  {"second_half_sup", trend.second_half_sup},
                  {"trend", number_or_null(trend.trend)}};
  Sink sink(a.common.out, out);
  *sink << j.dump() << '\n';
  return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------- parsing

std::vector<double> parse_grid(std::string_view text) {
  if (text.empty()) throw UsageError("empty grid");
  const bool log_spaced = text.starts_with("log");
  if (log_spaced) text.remove_prefix(3);
  const auto parts = split(text, ':');
  std::vector<double> out;
  if (parts.size() == 1) {
    for (auto item : split(text, ',')) out.push_back(parse_number(item, "grid point"));
    if (log_spaced) throw UsageError("log grid needs A:B:N");
  } else if (parts.size() == 3) {
    const double a = parse_number(parts[0], "grid start");
    const double b = parse_number(parts[1], "grid end");
    const double n_real = parse_number(parts[2], "grid count");
    if (!(n_real >= 1.0) || n_real != std::floor(n_real) || n_real > 1e7) {
      throw UsageError("grid count N must be a positive integer");
    }
    if (!(b >= a)) throw UsageError("grid needs A <= B");
    if (log_spaced && !(a > 0.0)) throw UsageError("log grid needs A > 0");
    const auto n = static_cast<std::size_t>(n_real);
    out.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      const double f = static_cast<double>(k) / static_cast<double>(n);
      out[k] = log_spaced ? std::exp(std::log(a) + f * (std::log(b) - std::log(a))) : a + f * (b - a);
    }
    out.front() = a;
    out.back() = b;
  } else {
    throw UsageError("grid must be A:B:N, logA:B:N or a comma list");
  }
  if (!std::is_sorted(out.begin(), out.end())) throw UsageError("grid must be increasing");
  return out;
}

StepRange parse_step_range(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw UsageError("range must be A:B:STEP");
  StepRange r{parse_number(parts[0], "range start"), parse_number(parts[1], "range end"),
              parse_number(parts[2], "range step")};
  if (!(r.step > 0.0) || !(r.hi >= r.lo)) throw UsageError("range needs A <= B and STEP > 0");
  return r;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a path");
      config_path = args[++i];
    } else if (args[i].starts_with("--config=")) {
      config_path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (config_path.empty()) return out;

  std::ifstream in(config_path);
  if (!in) throw UsageError("cannot open config '" + config_path + "'");
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  auto present = [&](const std::string& flag) {
    return std::any_of(out.begin(), out.end(),
                       [&](const std::string& a) { return a == flag || a.starts_with(flag + "="); });
  };
  std::string line;
  std::vector<std::string> extra;
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string flag = "--" + key;
    if (key.empty() || key == "config" || present(flag)) continue;
    if (value == "true") {
      extra.push_back(flag);
    } else if (value != "false") {
      extra.push_back(flag + "=" + value);
    }
  }
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical experiments on the strip-rigidity family psi' = sigma psi/t + (1-w) t^{-1-i tau} eta(t)",
               "strip_rigidity"};
  app.require_subcommand(1);

  PsiArgs psi;
  auto* psi_cmd = app.add_subcommand("psi", "trajectory of psi on a t grid (CSV)");
  add_common(psi_cmd, psi.common);
  psi_cmd->add_option("--w", psi.w, "complex parameter w")->required();
  psi_cmd->add_option("--t-grid", psi.grid, "A:B:N, logA:B:N or comma list")->required();
  psi_cmd->add_flag("--oracle", psi.oracle, "also integrate the ODE and report the difference");

  MuArgs mu;
  auto* mu_cmd = app.add_subcommand("mu", "mu(w) with its error bound (JSON)");
  add_common(mu_cmd, mu.common);
  mu_cmd->add_option("--w", mu.w, "complex parameter w, Re(w) > 0")->required();
  mu_cmd->add_option("--method", mu.method, "tail method")->check(CLI::IsMember({"auto", "crude", "accelerated"}));

  ScanArgs scan;
  auto* scan_cmd = app.add_subcommand("scan", "zeros of mu in a strip rectangle (JSON lines + CSV heat map)");
  add_common(scan_cmd, scan.common);
  scan_cmd->add_option("--sigma", scan.sigma, "A:B:STEP")->required();
  scan_cmd->add_option("--tau", scan.tau, "A:B:STEP")->required();
  scan_cmd->add_option("--zero-tol", scan.zero_tol, "zero tolerance")->capture_default_str();
  scan_cmd->add_option("--grid-out", scan.grid_out, "heat map CSV path (default <out>.grid.csv)");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "numerical checks of the identities and estimates");
  verify_cmd->require_subcommand(1);
  auto add_verify = [&](const char* name, const char* help) {
    auto* c = verify_cmd->add_subcommand(name, help);
    add_common(c, verify.common);
    c->add_option("--summary", verify.summary, "summary JSON path (default stderr)");
    return c;
  };
  auto* v_volterra = add_verify("volterra", "direct delta vs its Volterra representation");
  v_volterra->add_option("--s", verify.s, "s in the strip")->required();
  v_volterra->add_option("--t-grid", verify.grid, "t grid")->required();
  v_volterra->add_option("--threshold", verify.threshold, "relative residual threshold")->capture_default_str();
  auto* v_prop1 = add_verify("prop1", "integral equation for t^{-1/2} delta_s");
  v_prop1->add_option("--s", verify.s, "s in the strip")->required();
  v_prop1->add_option("--t-grid", verify.grid, "t grid")->required();
  v_prop1->add_option("--threshold", verify.threshold, "relative residual threshold")->capture_default_str();
  auto* v_lemma1 = add_verify("lemma1", "bounded-branch asymptotics at a zero of mu");
  v_lemma1->add_option("--w", verify.w, "zero of mu (or Newton seed with --refine)")->required();
  v_lemma1->add_option("--t-grid", verify.grid, "t grid (default 1:1000:999)");
  v_lemma1->add_option("--zero-tol", verify.zero_tol, "zero tolerance")->capture_default_str();
  v_lemma1->add_flag("--refine", verify.refine, "run Newton from --w first");
  auto* v_major = add_verify("majoration", "boundedness of delta_line(t) + t mu(1 + i tau)");
  v_major->add_option("--tau", verify.tau, "nonzero tau")->required();
  v_major->add_option("--t-grid", verify.grid, "t grid (default 1:1000:999)");
  auto* v_ratio = add_verify("ratio", "observed vs predicted Im-ratio of delta_s and delta_line");
  v_ratio->add_option("--s", verify.s, "s in B")->required();
  v_ratio->add_option("--t-max", verify.t_max, "final t")->capture_default_str();
  v_ratio->add_option("--t-grid", verify.grid, "t grid (default log2:<t-max>:16)");

  RotationArgs rot;
  auto* rot_cmd = app.add_subcommand("rotation", "rotation number estimate and hypothesis check (JSON)");
  add_common(rot_cmd, rot.common);
  rot_cmd->add_option("--T", rot.T, "averaging horizon T > 1")->required();
  rot_cmd->add_option("--rho", rot.rho, "candidate rotation number (default: the estimate)");
  rot_cmd->add_option("--grid-points", rot.grid_points, "hypothesis grid intervals")->capture_default_str();

  try {
    const auto args = expand_config(raw_args);
    std::vector<std::string> argv_storage{"strip_rigidity"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kExitOk : kExitUsage;
    }

    if (psi_cmd->parsed()) return cmd_psi(psi, out);
    if (mu_cmd->parsed()) return cmd_mu(mu, out);
    if (scan_cmd->parsed()) return cmd_scan(scan, out);
    if (rot_cmd->parsed()) return cmd_rotation(rot, out);
    if (v_volterra->parsed()) return verify_volterra(verify, out);
    if (v_prop1->parsed()) return verify_prop1(verify, out);
    if (v_lemma1->parsed()) return verify_lemma1(verify, out);
    if (v_major->parsed()) return verify_majoration(verify, out, err);
    if (v_ratio->parsed()) return verify_ratio(verify, out, err);
    err << app.help();
    return kExitUsage;
  } catch (const VerificationFailed& e) {
    err << "verification failed: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const PreconditionError& e) {
    err << "error: precondition failed: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalFailure& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const RotationHypothesisError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: domain: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedError& e) {
    err << "error: unsupported: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace rigidity::cli
