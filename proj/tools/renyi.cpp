// renyi: command-line front end for the filtered-norm and dimension library.
//
//   renyi gen --cantor depth=10 [--out measure.json]
//   renyi estimate --measure cantor:depth=10 --q 2 --scales 3^-2..3^-7 --kind box
//   renyi derivative-check --measure point --q 2
//   renyi schedule --measure point --scales pow:t=2,n=2..64
//   renyi compare-partitions --measure cantor:depth=8 --scales 3^-1..3^-6
//
// Exit codes: 0 success, 2 invalid input, 3 numeric failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "renyi/renyi.hpp"

using namespace renyi;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("cannot parse " + what + " from '" + s + "'");
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("cannot parse " + what + " from '" + s + "'");
}

/// "a=1,b=2" -> {a: 1, b: 2}; rejects keys outside `allowed`.
std::map<std::string, std::string> parse_params(const std::string& text,
                                                const std::vector<std::string>& allowed) {
  std::map<std::string, std::string> out;
  if (text.empty()) return out;
  for (const auto& part : split(text, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ValidationError("expected key=value, got '" + part + "'");
    const std::string key = part.substr(0, eq);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError("unknown parameter '" + key + "'");
    }
    out[key] = part.substr(eq + 1);
  }
  return out;
}

std::pair<int, int> parse_int_range(const std::string& text, const std::string& what) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw ValidationError(what + " must look like N0..N1");
  return {parse_int(text.substr(0, dots), what), parse_int(text.substr(dots + 2), what)};
}

// ---------------------------------------------------------------------------
// Measures

DiscreteMeasure generate_measure(const std::string& spec, std::uint64_t seed) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (name == "point") {
    auto p = parse_params(rest, {"dim", "w"});
    const int dim = p.count("dim") ? parse_int(p["dim"], "dim") : 1;
    const double w = p.count("w") ? parse_double(p["w"], "w") : 1.0;
    detail::require(dim >= 1, "dim must be >= 1");
    return {dim, std::vector<double>(dim, 0.0), {w}};
  }
  if (name == "pair") {
    parse_params(rest, {});
    return make_point_masses({{0.0}, {1.0}}, {0.5, 0.5});
  }
  if (name == "cantor") {
    auto p = parse_params(rest, {"depth", "ratio", "p"});
    const int depth = p.count("depth") ? parse_int(p["depth"], "depth") : 10;
    const double ratio = p.count("ratio") ? parse_double(p["ratio"], "ratio") : 1.0 / 3.0;
    const double prob = p.count("p") ? parse_double(p["p"], "p") : 0.5;
    return make_cantor(depth, ratio, prob);
  }
  if (name == "uniform") {
    auto p = parse_params(rest, {"dim", "n"});
    const int dim = p.count("dim") ? parse_int(p["dim"], "dim") : 1;
    const int n = p.count("n") ? parse_int(p["n"], "n") : 256;
    return make_uniform_grid(dim, n);
  }
  if (name == "random") {
    auto p = parse_params(rest, {"dim", "atoms"});
    const int dim = p.count("dim") ? parse_int(p["dim"], "dim") : 1;
    const int atoms = p.count("atoms") ? parse_int(p["atoms"], "atoms") : 50;
    detail::require(dim >= 1 && atoms >= 1, "random measure needs dim >= 1 and atoms >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    std::uniform_real_distribution<double> wt(0.1, 1.0);
    std::vector<double> coords(static_cast<std::size_t>(dim) * atoms);
    std::vector<double> weights(atoms);
    for (auto& c : coords) c = pos(rng);
    for (auto& w : weights) w = wt(rng);
    return {dim, std::move(coords), std::move(weights)};
  }
  throw ValidationError("unknown measure generator '" + name + "'");
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

DiscreteMeasure load_measure(const std::string& source, std::uint64_t seed, bool normalize) {
  DiscreteMeasure mu = [&] {
    if (ends_with(source, ".json")) return load_json(source);
    if (ends_with(source, ".pgm")) return from_pgm_image(source);
    return generate_measure(source, seed);
  }();
  return normalize ? normalized(mu) : mu;
}

// ---------------------------------------------------------------------------
// Kernels and scales

RadialKernel parse_kernel(const std::string& spec) {
  if (spec == "gaussian") return gaussian();
  if (spec.rfind("bump:", 0) == 0) {
    const auto parts = split(spec.substr(5), ',');
    if (parts.size() != 2) throw ValidationError("bump kernel must look like bump:INNER,OUTER");
    return smooth_bump(parse_double(parts[0], "bump inner radius"),
                       parse_double(parts[1], "bump outer radius"));
  }
  throw ValidationError("unknown kernel '" + spec + "' (expected gaussian or bump:INNER,OUTER)");
}

struct ScaleSpec {
  std::vector<double> eps;
  std::optional<ScaleSchedule> schedule;
};

/// BASE^A..BASE^B, pow:t=T,n=N0..N1, geo:n=N0..N1, or a comma list.
ScaleSpec parse_scales(const std::string& text) {
  ScaleSpec out;
  if (text.rfind("pow:", 0) == 0 || text.rfind("geo:", 0) == 0) {
    const bool power = text[0] == 'p';
    auto p = parse_params(text.substr(4), power ? std::vector<std::string>{"t", "n"}
                                                : std::vector<std::string>{"n"});
    if (!p.count("n")) throw ValidationError("schedule needs n=N0..N1");
    const auto [n0, n1] = parse_int_range(p["n"], "schedule range");
    if (power) {
      if (!p.count("t")) throw ValidationError("power schedule needs t=T");
      out.schedule = ScaleSchedule::power(parse_double(p["t"], "t"), n0, n1);
    } else {
      out.schedule = ScaleSchedule::geometric(n0, n1);
    }
    for (int n = n0; n <= n1; ++n) out.eps.push_back(out.schedule->eps(n));
    return out;
  }
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::string lo = text.substr(0, dots);
    const std::string hi = text.substr(dots + 2);
    const auto c1 = lo.find('^');
    const auto c2 = hi.find('^');
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw ValidationError("scale range must look like BASE^A..BASE^B");
    }
    const double base = parse_double(lo.substr(0, c1), "scale base");
    if (parse_double(hi.substr(0, c2), "scale base") != base) {
      throw ValidationError("scale range endpoints must share a base");
    }
    detail::require(base > 0.0 && base != 1.0, "scale base must be > 0 and != 1");
    const int a = parse_int(lo.substr(c1 + 1), "scale exponent");
    const int b = parse_int(hi.substr(c2 + 1), "scale exponent");
    const int step = b >= a ? 1 : -1;
    for (int k = a;; k += step) {
      out.eps.push_back(std::pow(base, k));
      if (k == b) break;
    }
  } else {
    for (const auto& item : split(text, ',')) out.eps.push_back(parse_double(item, "scale"));
  }
  for (double e : out.eps) detail::require(std::isfinite(e) && e > 0.0, "scales must be finite and > 0");
  for (std::size_t i = 1; i < out.eps.size(); ++i) {
    detail::require(out.eps[i] < out.eps[i - 1], "scales must be strictly decreasing after expansion");
  }
  return out;
}

/// Warns when most atoms have no neighbour within eps_min / 2, i.e. the
/// smallest scale is below twice the typical nearest-neighbour distance.
void warn_below_atom_spacing(const DiscreteMeasure& mu, double eps_min) {
  if (mu.size() < 2) return;
  const int d = mu.dim();
  const double r2 = 0.25 * eps_min * eps_min;
  std::vector<char> close(mu.size(), 0);
  detail::for_each_atom_neighborhood(
      mu, 0.5 * eps_min, [&](std::size_t j, std::span<const double> cx, std::span<const double> cw) {
        auto y = mu.point(j);
        for (std::size_t c = 0; c < cw.size(); ++c) {
          double dist2 = 0.0;
          for (int a = 0; a < d; ++a) dist2 += (y[a] - cx[c * d + a]) * (y[a] - cx[c * d + a]);
          if (dist2 > 0.0 && dist2 <= r2) {
            close[j] = 1;
            return;
          }
        }
      });
  const auto with_neighbour = static_cast<std::size_t>(std::count(close.begin(), close.end(), 1));
  if (2 * with_neighbour < mu.size()) {
    std::cerr << "warning: smallest scale " << num(eps_min)
              << " is below twice the typical nearest-neighbour atom distance\n";
  }
}

// ---------------------------------------------------------------------------
// Output

struct Output {
  std::string stem;  // empty: CSV to stdout, summary to stderr

  void write(const std::string& csv, const json& summary) const {
    const std::string text = summary.dump(2) + "\n";
    if (stem.empty()) {
      std::cout << csv;
      std::cerr << text;
      return;
    }
    write_file(stem + ".csv", csv);
    write_file(stem + ".json", text);
  }

  static void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    detail::require(static_cast<bool>(out), "cannot open '" + path + "' for writing");
    out << content;
    detail::require(static_cast<bool>(out), "failed writing '" + path + "'");
  }
};

json order_summary(const std::string& kind, double q, const OrderEstimate& est, const LogLogSeries& s) {
  return {{"kind", kind},
          {"q", q},
          {"slope", est.slope},
          {"upper", est.upper},
          {"lower", est.lower},
          {"window", {s.arg[est.window_begin], s.arg[est.window_end - 1]}},
          {"residual", est.residual},
          {"excluded", est.excluded},
          {"low_confidence", est.low_confidence}};
}

// ---------------------------------------------------------------------------
// Commands

struct Config {
  std::string measure = "measure.json";
  std::string cantor;
  std::string uniform;
  std::string random;
  std::string kernel = "gaussian";
  double q = 2.0;
  std::string scales;
  std::vector<std::string> kinds;
  std::string out;
  bool normalize = false;
  int quad_points = QuadratureSpec{}.points_per_scale;
  double quad_tol = QuadratureSpec{}.tail_tolerance;
  std::uint64_t seed = 0;
  std::optional<double> d_lower;

  QuadratureSpec quad() const {
    QuadratureSpec spec{quad_points, quad_tol};
    spec.validate();
    return spec;
  }
};

std::string gen_source(const Config& c, const CLI::App& app) {
  std::vector<std::string> sources;
  if (app.count("--measure")) sources.push_back(c.measure);
  if (app.count("--cantor")) sources.push_back("cantor:" + c.cantor);
  if (app.count("--uniform")) sources.push_back("uniform:" + c.uniform);
  if (app.count("--random")) sources.push_back("random:" + c.random);
  if (sources.size() != 1) throw ValidationError("gen needs exactly one measure source");
  return sources.front();
}

void cmd_gen(const Config& c, const CLI::App& app) {
  const auto mu = load_measure(gen_source(c, app), c.seed, c.normalize);
  save_json(mu, c.out.empty() ? "measure.json" : c.out);
}

void cmd_estimate(const Config& c) {
  const auto mu = load_measure(c.measure, c.seed, c.normalize);
  const auto kernel = parse_kernel(c.kernel);
  if (c.scales.empty()) throw ValidationError("estimate needs --scales");
  const auto scales = parse_scales(c.scales);
  const auto kinds = c.kinds.empty() ? std::vector<std::string>{"box"} : c.kinds;
  std::vector<PartitionKind> parsed;
  for (const auto& k : kinds) parsed.push_back(PartitionKind::from_name(k, kernel));
  warn_below_atom_spacing(mu, scales.eps.back());

  std::string csv = "kind,eps,lambda,lnP,ratio\n";
  json summary = json::array();
  for (const auto& kind : parsed) {
    const auto series = sample_series(kind, mu, c.q, scales.eps, c.quad());
    const auto est = estimate_orders(series);
    for (std::size_t i = 0; i < series.size(); ++i) {
      csv += kind.name() + "," + num(series.arg[i]) + "," + num(series.log_arg[i]) + "," +
             num(series.log_value[i]) + "," + num(series.log_value[i] / series.log_arg[i]) + "\n";
    }
    summary.push_back(order_summary(kind.name(), c.q, est, series));
  }
  Output{c.out}.write(csv, summary);
}

void cmd_derivative_check(const Config& c) {
  const auto mu = load_measure(c.measure, c.seed, c.normalize);
  const auto kernel = parse_kernel(c.kernel);
  const auto scales = parse_scales(c.scales.empty() ? "2^0..2^-10" : c.scales);
  const auto quad = c.quad();
  const double step = 1e-3;
  std::string csv = "lambda,eps,norm,slope,fd_slope,residual,lower,upper,pass\n";
  double max_residual = 0.0;
  bool all_pass = true;
  for (double eps : scales.eps) {
    const auto r = norm_derivative(mu, kernel, eps, c.q, quad);
    const double up = lq_norm(mu, kernel, eps * std::exp(step), c.q, quad);
    const double down = lq_norm(mu, kernel, eps * std::exp(-step), c.q, quad);
    const double fd = (std::log(up) - std::log(down)) / (2 * step);
    const double residual = std::abs(r.loglog_slope - fd);
    const bool pass = check_slope_bounds(r, kernel).passed && residual <= 1e-4 * (1 + std::abs(fd));
    max_residual = std::max(max_residual, residual);
    all_pass = all_pass && pass;
    csv += num(std::log(eps)) + "," + num(eps) + "," + num(r.norm) + "," + num(r.loglog_slope) + "," +
           num(fd) + "," + num(residual) + "," + num(r.lower) + "," + num(r.upper) + "," +
           (pass ? "true" : "false") + "\n";
  }
  json summary = {{"kind", "derivative-check"},
                  {"kernel", kernel.describe()},
                  {"q", c.q},
                  {"rows", scales.eps.size()},
                  {"max_residual", max_residual},
                  {"all_pass", all_pass}};
  Output{c.out}.write(csv, summary);
}

void cmd_schedule(const Config& c) {
  const auto mu = load_measure(c.measure, c.seed, c.normalize);
  const auto kernel = parse_kernel(c.kernel);
  if (c.scales.empty()) throw ValidationError("schedule needs --scales pow:t=T,n=N0..N1 or geo:n=N0..N1");
  const auto scales = parse_scales(c.scales);
  if (!scales.schedule) throw ValidationError("schedule needs --scales pow:... or geo:...");
  const auto quad = c.quad();
  warn_below_atom_spacing(mu, scales.eps.back());
  double d_lower = 0.0;
  if (c.d_lower) {
    d_lower = *c.d_lower;
  } else {
    d_lower = renyi_dimension(PartitionKind::box_sum(), mu, c.q, scales.eps, quad).lower;
  }
  d_lower += 0.0;  // no negative zero in the summary
  const auto r = run_schedule(mu, kernel, *scales.schedule, c.q, quad, d_lower);

  std::string csv = "n,eps,norm,diff,ln_diff,ratio\n";
  for (std::size_t i = 0; i < r.n.size(); ++i) {
    csv += std::to_string(r.n[i]) + "," + num(r.eps[i]) + "," + num(r.norms[i]);
    if (i == 0) {
      csv += ",,,\n";
    } else {
      csv += "," + num(r.diffs[i - 1]) + "," + num(r.ln_diffs[i - 1]) + "," + num(r.ratios[i - 1]) + "\n";
    }
  }
  const bool power = scales.schedule->kind == ScheduleKind::power;
  json summary = {{"kind", scales.schedule->name()},
                  {"t", power ? json(scales.schedule->t) : json(nullptr)},
                  {"q", c.q},
                  {"m_hat", r.growth_stat},
                  {"ratio_upper", r.ratio_upper},
                  {"d_lower", d_lower},
                  {"zero_diffs", r.zero_diffs},
                  {"in_I_q", r.in_I_q}};
  const double t_star = *r.critical_t;
  summary["critical_t"] = std::isinf(t_star) ? json("inf") : json(t_star);
  Output{c.out}.write(csv, summary);
}

void cmd_compare_partitions(const Config& c) {
  const auto mu = load_measure(c.measure, c.seed, c.normalize);
  const auto kernel = parse_kernel(c.kernel);
  if (c.scales.empty()) throw ValidationError("compare-partitions needs --scales");
  const auto scales = parse_scales(c.scales);
  const auto names = c.kinds.empty() ? partition_kind_names() : c.kinds;
  std::vector<PartitionKind> kinds;
  for (const auto& n : names) kinds.push_back(PartitionKind::from_name(n, kernel));
  warn_below_atom_spacing(mu, scales.eps.back());

  std::vector<LogLogSeries> curves;
  json summary = json::array();
  for (const auto& kind : kinds) {
    LogLogSeries s;
    for (double eps : scales.eps) s.push(eps, evaluate(kind, mu, eps, c.q, c.quad()));
    curves.push_back(s);
    // Orders need three finite samples; a degenerate curve still gets its CSV column.
    if (s.finite_count() >= 3) summary.push_back(order_summary(kind.name(), c.q, estimate_orders(s), s));
  }
  std::string csv = "eps,lambda";
  for (const auto& kind : kinds) csv += ",lnP_" + kind.name();
  csv += "\n";
  for (std::size_t i = 0; i < scales.eps.size(); ++i) {
    csv += num(scales.eps[i]) + "," + num(std::log(scales.eps[i]));
    for (const auto& s : curves) csv += "," + num(s.log_value[i]);
    csv += "\n";
  }
  Output{c.out}.write(csv, summary);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-filtered norms, Renyi partition functions and scale schedules"};
  app.require_subcommand(1);
  Config c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--measure", c.measure,
                    "point[:dim=D,w=W] | pair | cantor:depth=K[,ratio=R,p=P] | uniform:dim=D,n=N | "
                    "random:dim=D,atoms=N | FILE.json | FILE.pgm");
    sub->add_option("--kernel", c.kernel, "gaussian | bump:INNER,OUTER");
    sub->add_option("--q", c.q, "Renyi index");
    sub->add_option("--scales", c.scales, "BASE^A..BASE^B | e1,e2,... | pow:t=T,n=N0..N1 | geo:n=N0..N1");
    sub->add_option("--kind", c.kinds, "raw|box|ball-corr|ball-leb|kernel-sum|kernel-corr|kernel-leb");
    sub->add_option("--out", c.out, "output stem; writes STEM.csv and STEM.json");
    sub->add_flag("--normalize", c.normalize, "rescale the measure to total mass 1");
    sub->add_option("--quad-points", c.quad_points, "quadrature points per scale");
    sub->add_option("--quad-tol", c.quad_tol, "kernel tail tolerance");
    sub->add_option("--seed", c.seed, "seed for random measures");
  };

  auto* gen = app.add_subcommand("gen", "generate a measure and save it as JSON");
  gen->add_option("--measure", c.measure, "measure source");
  gen->add_option("--cantor", c.cantor, "depth=K[,ratio=R,p=P]");
  gen->add_option("--uniform", c.uniform, "dim=D,n=N");
  gen->add_option("--random", c.random, "dim=D,atoms=N");
  gen->add_option("--out", c.out, "output path (default measure.json)");
  gen->add_flag("--normalize", c.normalize, "rescale the measure to total mass 1");
  gen->add_option("--seed", c.seed, "seed for random measures");

  auto* estimate = app.add_subcommand("estimate", "Renyi dimension estimates per partition kind");
  add_common(estimate);
  auto* deriv = app.add_subcommand("derivative-check", "analytic vs finite-difference norm slopes");
  add_common(deriv);
  auto* schedule = app.add_subcommand("schedule", "norm differences along a scale schedule");
  add_common(schedule);
  double d_lower = 0.0;
  auto* d_lower_opt = schedule->add_option("--d-lower", d_lower, "lower dimension used for the critical exponent");
  auto* compare = app.add_subcommand("compare-partitions", "one ln P curve per kind on a shared grid");
  add_common(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (gen->parsed()) {
      cmd_gen(c, *gen);
    } else if (estimate->parsed()) {
      cmd_estimate(c);
    } else if (deriv->parsed()) {
      cmd_derivative_check(c);
    } else if (schedule->parsed()) {
      if (d_lower_opt->count()) c.d_lower = d_lower;
      cmd_schedule(c);
    } else if (compare->parsed()) {
      cmd_compare_partitions(c);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
