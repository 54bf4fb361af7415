#include "poa/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "poa/asymptotics.hpp"
#include "poa/equilibrium.hpp"
#include "poa/errors.hpp"
#include "poa/instances.hpp"
#include "poa/optimum.hpp"
#include "poa/rv_analysis.hpp"

namespace poa::cli {

namespace {

using nlohmann::json;

constexpr const char* kOutputDirEnv = "POA_OUTPUT_DIR";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json log_json(const LogValue& v) {
  return v.is_zero() ? json(nullptr) : json(v.log_magnitude());
}

json real_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Instance load_instance(const RunConfig& cfg) {
  const bool has_file = !cfg.network_path.empty();
  const bool has_name = !cfg.instance.empty();
  if (has_file == has_name) {
    throw UsageError("give exactly one of --network or --instance");
  }
  if (has_name) return named_instance(cfg.instance);
  return {cfg.network_path, load_network_file(cfg.network_path), 0.0};
}

std::filesystem::path output_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
      p = std::filesystem::path(dir) / p;
    }
  }
  return p;
}

// Writes to --out (relative to $POA_OUTPUT_DIR when set) or to `out`.
void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out_path.empty()) {
    out << text;
    return;
  }
  const auto p = output_path(cfg.out_path);
  std::ofstream f(p);
  if (!f) throw ParseError("cannot write '" + p.string() + "'");
  f << text;
}

void require_demand(const RunConfig& cfg) {
  if (!(cfg.demand > 0.0) || !std::isfinite(cfg.demand)) {
    throw UsageError("--demand must be a positive number");
  }
}

bool is_exp_instance(const Network& net) {
  return net.is_parallel() && net.edge_count() == 2 &&
         net.cost(0).as<family::ExpOverX>() && net.cost(1).as<family::StepExp>();
}

// ---------------------------------------------------------------------------

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  require_demand(cfg);
  const Instance inst = load_instance(cfg);
  json j;
  if (cfg.log_domain) {
    if (!is_exp_instance(inst.net)) {
      throw UnsupportedError("--log-domain needs the exp_over_x / step_exp game");
    }
    const LogEquilibrium eq = wardrop_parallel_log(inst.net, cfg.demand);
    j = {{"demand", cfg.demand},
         {"flows", {eq.x, eq.y}},
         {"k", eq.k},
         {"cell", eq.left_cell ? "left" : "right"},
         {"log_lambda", log_json(eq.lambda)},
         {"log_weq", log_json(eq.cost)},
         {"method", "log-domain-cases"}};
  } else {
    const EquilibriumSolution eq = wardrop(inst.net, cfg.demand);
    j = {{"demand", cfg.demand},
         {"flows", eq.flow.path_flows()},
         {"lambda", eq.lambda},
         {"weq", eq.cost},
         {"residual", eq.residual},
         {"method", eq.method},
         {"iterations", eq.iterations}};
  }
  emit(cfg, j.dump(2) + "\n", out);
  return kOk;
}

int cmd_opt(const RunConfig& cfg, std::ostream& out) {
  require_demand(cfg);
  const Instance inst = load_instance(cfg);
  const OptMethod method = parse_opt_method(cfg.method);
  OptimumSolution s;
  if (method == OptMethod::kBrute) {
    BruteForceOptions bo;
    bo.resolution = cfg.resolution;
    if (cfg.seed != 0) {
      std::mt19937_64 rng(cfg.seed);
      bo.jitter = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    }
    s = opt_bruteforce(inst.net, cfg.demand, bo);
  } else {
    s = optimum(inst.net, cfg.demand, method);
  }
  json cert = json::array();
  for (const CandidateRow& r : s.certificate) {
    cert.push_back({{"j", r.j}, {"kind", r.kind}, {"y", r.y},
                    {"log_cost", log_json(r.cost)}});
  }
  json j{{"demand", cfg.demand},
         {"flow", s.flow.path_flows()},
         {"cost", real_json(s.cost)},
         {"log_cost", log_json(s.log_cost)},
         {"method", s.method},
         {"residual", s.residual}};
  if (!cert.empty()) {
    j["certificate"] = cert;
    j["winner"] = s.winner;
    j["period"] = s.period;
    j["claim_holds"] = s.claim_holds;
  }
  if (s.method == "brute-force") j["resolution_bound"] = s.resolution_bound;
  emit(cfg, j.dump(2) + "\n", out);
  return kOk;
}

int cmd_poa(const RunConfig& cfg, std::ostream& out) {
  require_demand(cfg);
  const Instance inst = load_instance(cfg);
  const PoaValue v =
      price_of_anarchy(inst.net, cfg.demand, parse_opt_method(cfg.method));
  json j{{"demand", v.M},
         {"weq", real_json(v.weq)},
         {"opt", real_json(v.opt)},
         {"poa", v.poa},
         {"log_weq", log_json(v.log_weq)},
         {"log_opt", log_json(v.log_opt)},
         {"log_domain", v.log_domain},
         {"method", v.method}};
  emit(cfg, j.dump(2) + "\n", out);
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  if (!(cfg.M_lo > 0.0) || !(cfg.M_hi > cfg.M_lo)) {
    throw UsageError("sweep needs 0 < --from < --to");
  }
  if (cfg.per_decade < 1) throw UsageError("--per-decade must be >= 1");
  if (cfg.format != "csv" && cfg.format != "json") {
    throw UsageError("--format must be csv or json");
  }
  const Instance inst = load_instance(cfg);
  SweepOptions o;
  o.M_lo = cfg.M_lo;
  o.M_hi = cfg.M_hi;
  o.per_decade = cfg.per_decade;
  o.period_base = cfg.period_base.value_or(inst.period_base);
  o.hints = inst.hints(cfg.M_lo, cfg.M_hi);
  o.method = parse_opt_method(cfg.method);
  o.jobs = cfg.jobs;
  const PoaCurve curve = poa_sweep(inst.net, o);

  const bool log_rows = is_exp_instance(inst.net);
  std::ostringstream text;
  if (cfg.format == "csv") {
    text << (log_rows ? "M,log_weq,log_opt,poa,method,flag\n"
                      : "M,weq,opt,poa,method,flag\n");
    for (const PoaSample& s : curve.samples) {
      text << fmt17(s.value.M) << ',';
      if (s.failed) {
        std::string msg = s.flag;
        for (char& ch : msg) {
          if (ch == ',' || ch == '\n') ch = ' ';
        }
        text << ",,,,error: " << msg << '\n';
        continue;
      }
      if (log_rows) {
        text << fmt17(s.value.log_weq.log_magnitude()) << ','
             << fmt17(s.value.log_opt.log_magnitude()) << ',';
      } else {
        text << fmt17(s.value.weq) << ',' << fmt17(s.value.opt) << ',';
      }
      text << fmt17(s.value.poa) << ',' << s.value.method << ",ok\n";
    }
  } else {
    json samples = json::array();
    for (const PoaSample& s : curve.samples) {
      json row{{"M", s.value.M}, {"failed", s.failed}};
      if (s.failed) {
        row["flag"] = s.flag;
      } else {
        row["log_weq"] = log_json(s.value.log_weq);
        row["log_opt"] = log_json(s.value.log_opt);
        row["poa"] = s.value.poa;
        row["method"] = s.value.method;
      }
      samples.push_back(row);
    }
    json periods = json::array();
    for (const PeriodExtrema& p : curve.periods) {
      periods.push_back({{"k", p.k}, {"lo", p.lo}, {"hi", p.hi},
                         {"min_poa", p.min_poa}, {"max_poa", p.max_poa},
                         {"argmax", p.argmax}, {"complete", p.complete}});
    }
    text << json{{"samples", samples},
                 {"periods", periods},
                 {"period_base", o.period_base},
                 {"failures", curve.failures.size()}}
                .dump(2)
         << '\n';
  }
  emit(cfg, text.str(), out);
  return kOk;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

int cmd_extremes(const RunConfig& cfg, std::ostream& out) {
  if (cfg.curve_path.empty()) throw UsageError("extremes needs --curve");
  std::ifstream in(cfg.curve_path);
  if (!in) throw ParseError("cannot open curve '" + cfg.curve_path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(cfg.curve_path + ": empty file");
  const auto header = split_csv(line);
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw ParseError(cfg.curve_path + ": missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t cm = column("M");
  const std::size_t cp = column("poa");
  const std::size_t cf = column("flag");
  std::vector<PoaSample> samples;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() < header.size()) {
      throw ParseError(cfg.curve_path + ":" + std::to_string(line_no) +
                       ": expected " + std::to_string(header.size()) +
                       " columns");
    }
    PoaSample s;
    try {
      s.value.M = std::stod(cells[cm]);
      s.failed = cells[cf].rfind("error", 0) == 0;
      if (!s.failed) s.value.poa = std::stod(cells[cp]);
    } catch (const std::exception&) {
      throw ParseError(cfg.curve_path + ":" + std::to_string(line_no) +
                       ": bad number");
    }
    samples.push_back(s);
  }
  if (samples.empty()) throw ParseError(cfg.curve_path + ": no samples");
  PoaCurve curve;
  curve.period_base = cfg.period_base.value_or(0.0);
  curve.samples = std::move(samples);
  curve.periods = period_extrema(curve.samples, curve.period_base,
                                 curve.samples.front().value.M,
                                 curve.samples.back().value.M);
  const Extremes e = extremes_estimate(curve, cfg.periods_required);
  json j = e.to_json();
  j["period_base"] = curve.period_base;
  emit(cfg, j.dump(2) + "\n", out);
  return kOk;
}

json assertion(const std::string& name, double value, double expected,
               bool pass) {
  return {{"name", name}, {"value", value}, {"expected", expected},
          {"pass", pass}};
}

json with_pass(json report) {
  bool pass = true;
  for (const auto& a : report["assertions"]) pass = pass && a["pass"].get<bool>();
  report["pass"] = pass;
  return report;
}

int cmd_repro(const RunConfig& cfg, std::ostream& out) {
  json j;
  if (cfg.repro_target == "thm5") {
    j = repro_thm5(cfg.a);
  } else if (cfg.repro_target == "thm6") {
    j = repro_thm6(cfg.a);
  } else if (cfg.repro_target == "thm7") {
    j = repro_thm7(cfg.alpha, cfg.k);
  } else if (cfg.repro_target == "rv") {
    j = repro_rv();
  } else {
    throw UsageError("repro target must be thm5, thm6, thm7 or rv");
  }
  emit(cfg, j.dump(2) + "\n", out);
  return kOk;
}

int cmd_rv(const RunConfig& cfg, std::ostream& out) {
  json checks = json::array();
  bool pass = true;
  auto add = [&](const RvReport& r) {
    checks.push_back(r.to_json());
    pass = pass && r.pass;
  };
  if (cfg.cost_json.empty()) {
    for (const RvReport& r : rv_suite()) add(r);
  } else {
    json spec;
    try {
      spec = json::parse(cfg.cost_json);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("--cost: ") + e.what());
    }
    const CostFunction c = CostFunction::from_json(spec);
    const RvProbe probe;
    add(rv_index(c, probe));
    add(check_inverse_rv(c, probe));
    add(check_scaling_identity(c, 4.0, probe));
    auto [prod, integ] = check_product_and_integral_rv(c, probe);
    add(prod);
    add(integ);
  }
  emit(cfg, json{{"checks", checks}, {"pass", pass}}.dump(2) + "\n", out);
  return kOk;
}

}  // namespace

// ---------------------------------------------------------------------------

json repro_thm5(double a) {
  const Network net = Network::parallel(
      {CostFunction::identity(), CostFunction::step_geometric(a)});
  SweepOptions o;
  o.M_lo = 2.0 * a;
  o.M_hi = 2.0 * ipow(a, 5);
  o.period_base = a;
  o.hints = step_breakpoints(a, o.M_lo, o.M_hi);
  const PoaCurve curve = poa_sweep(net, o);
  const Extremes e = extremes_estimate(curve, 4);
  const double target = thm5_limsup(a);

  double worst = 0.0;
  for (const PoaSample& s : curve.samples) {
    if (s.failed) continue;
    const double cf = thm5_closed_form(a, s.value.M).poa;
    worst = std::max(worst, std::abs(cf - s.value.poa) / cf);
  }
  const double jump_at = a + a * a;
  const PoaValue below = price_of_anarchy(net, jump_at * (1.0 - 1e-9));
  const PoaValue above = price_of_anarchy(net, jump_at * (1.0 + 1e-9));
  const double opt_gap = std::abs(above.opt - below.opt) / below.opt;

  json r{{"a", a},
         {"periods", e.periods},
         {"liminf", e.liminf},
         {"limsup", e.limsup},
         {"expected_limsup", target},
         {"stability", e.stability},
         {"failures", curve.failures.size()}};
  r["assertions"] = {
      assertion("limsup", e.limsup, target,
                std::abs(e.limsup - target) <= 1e-3 * target),
      assertion("liminf", e.liminf, 1.0, std::abs(e.liminf - 1.0) <= 1e-9),
      assertion("stable", e.stability, 0.0, e.accepted),
      assertion("closed form vs solver", worst, 0.0, worst <= 1e-6),
      assertion("jump", above.poa, target,
                std::abs(above.poa - target) <= 1e-6 * target),
      assertion("opt continuous", opt_gap, 0.0, opt_gap <= 1e-6),
  };
  return with_pass(r);
}

json repro_thm6(double a) {
  const Thm6Constants t = thm6_constants(a);
  const Network net = Network::parallel(
      {CostFunction::monomial(1.0, 2.0), CostFunction::pwl_square(a)});
  json rows = json::array();
  double lo = INFINITY, hi = -INFINITY;
  for (int k = 1; k <= 5; ++k) {
    const double M = thm6_demand(a, k);
    const double p = price_of_anarchy(net, M).poa;
    rows.push_back({{"k", k}, {"M", M}, {"poa", p}});
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  const double M1 = thm6_demand(a, 1);
  const double weq = wardrop(net, M1).cost;
  const double brute = weq / opt_bruteforce(net, M1).cost;
  const double p1 = rows[0]["poa"].get<double>();
  json r{{"a", a},  {"b", t.b},   {"c", t.c},
         {"d", t.d}, {"M1", t.M1}, {"closed_form_poa", t.poa},
         {"rows", rows}};
  json as = json::array();
  if (a == 2.0) {
    as.push_back(assertion("band [1.0055, 1.0063]", p1, 1.0059,
                           p1 >= 1.0055 && p1 <= 1.0063));
  }
  as.push_back(assertion("closed form", p1, t.poa,
                         std::abs(p1 - t.poa) <= 1e-9 * t.poa));
  as.push_back(assertion("k independence", (hi - lo) / lo, 0.0,
                         hi - lo <= 1e-9 * lo));
  as.push_back(assertion("brute force", brute, p1,
                         std::abs(brute - p1) <= 1e-4 * p1));
  r["assertions"] = as;
  return with_pass(r);
}

json repro_thm7(const std::string& alpha_spec, int k_max) {
  const Instance inst = named_instance("exp:" + alpha_spec);
  const AlphaSequence& alpha = *inst.net.cost(1).as<family::StepExp>()->alpha;
  if (k_max < 4) throw UsageError("--k must be >= 4");
  json rows = json::array();
  bool increasing = true;
  bool numeric_ok = true;
  double prev = -INFINITY;
  int first_above_10 = -1;
  for (int k = 3; k <= k_max; ++k) {
    const Thm7Value v = thm7_poa_near_breakpoint(alpha, k);
    rows.push_back({{"k", k}, {"M", v.M}, {"closed_form", v.closed_form},
                    {"numeric", v.numeric}, {"claim_holds", v.claim_holds}});
    increasing = increasing && v.closed_form > prev;
    prev = v.closed_form;
    if (k <= 5) {
      numeric_ok = numeric_ok &&
                   std::abs(v.numeric - v.closed_form) <= 0.01 * v.closed_form;
    }
    if (first_above_10 < 0 && v.closed_form > 10.0) first_above_10 = k;
  }
  json r{{"alpha", alpha_spec}, {"rows", rows}, {"first_k_above_10", first_above_10}};
  r["assertions"] = {
      assertion("strictly increasing", prev, 0.0, increasing),
      assertion("numeric within 1% for k <= 5", 0.0, 0.0, numeric_ok),
  };
  return with_pass(r);
}

json repro_rv() {
  json checks = json::array();
  json as = json::array();
  for (const RvReport& rep : rv_suite()) {
    checks.push_back(rep.to_json());
    as.push_back(assertion(rep.name, rep.beta, rep.expected, rep.pass));
  }
  json r{{"checks", checks}};
  r["assertions"] = as;
  return with_pass(r);
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.subcommand == "solve") return cmd_solve(cfg, out);
    if (cfg.subcommand == "opt") return cmd_opt(cfg, out);
    if (cfg.subcommand == "poa") return cmd_poa(cfg, out);
    if (cfg.subcommand == "sweep") return cmd_sweep(cfg, out);
    if (cfg.subcommand == "extremes") return cmd_extremes(cfg, out);
    if (cfg.subcommand == "repro") return cmd_repro(cfg, out);
    if (cfg.subcommand == "rv") return cmd_rv(cfg, out);
    throw UsageError("unknown subcommand '" + cfg.subcommand + "'");
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const UnsupportedError& e) {
    err << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumeric;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Wardrop equilibria, social optima and price of anarchy"};
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads for sweeps (0: all)");

  auto network_opts = [&](CLI::App* sub) {
    sub->add_option("--network", cfg.network_path, "Network JSON file");
    sub->add_option("--instance", cfg.instance,
                    "Built-in game: pigou, step:A, pwl:A, exp:factorial");
  };
  auto* solve = app.add_subcommand("solve", "Wardrop equilibrium");
  network_opts(solve);
  solve->add_option("--demand", cfg.demand, "Total demand M")->required();
  solve->add_flag("--log-domain", cfg.log_domain, "Log-domain exp game");
  solve->add_option("--out", cfg.out_path, "Output file");

  auto* opt = app.add_subcommand("opt", "Social optimum");
  network_opts(opt);
  opt->add_option("--demand", cfg.demand, "Total demand M")->required();
  opt->add_option("--method", cfg.method,
                  "auto|marginal|step|pwl|exp|brute|general");
  opt->add_option("--resolution", cfg.resolution, "Brute-force grid points");
  opt->add_option("--seed", cfg.seed, "Brute-force grid jitter seed");
  opt->add_flag("--log-domain", cfg.log_domain, "Accepted for symmetry");
  opt->add_option("--out", cfg.out_path, "Output file");

  auto* p = app.add_subcommand("poa", "Price of anarchy at one demand");
  network_opts(p);
  p->add_option("--demand", cfg.demand, "Total demand M")->required();
  p->add_option("--method", cfg.method, "Optimum method");
  p->add_option("--out", cfg.out_path, "Output file");

  auto* sweep = app.add_subcommand("sweep", "PoA curve over a demand range");
  network_opts(sweep);
  sweep->add_option("--from", cfg.M_lo, "Smallest demand")->required();
  sweep->add_option("--to", cfg.M_hi, "Largest demand")->required();
  sweep->add_option("--per-decade", cfg.per_decade, "Samples per decade");
  sweep->add_option("--period-base", cfg.period_base, "Log-period base a");
  sweep->add_option("--method", cfg.method, "Optimum method");
  sweep->add_option("--format", cfg.format, "csv|json");
  sweep->add_option("--out", cfg.out_path, "Output file");

  auto* ext = app.add_subcommand("extremes", "liminf/limsup from a curve");
  ext->add_option("--curve", cfg.curve_path, "Sweep CSV")->required();
  ext->add_option("--period-base", cfg.period_base, "Log-period base a");
  ext->add_option("--periods", cfg.periods_required, "Full periods required");
  ext->add_option("--out", cfg.out_path, "Output file");

  auto* repro = app.add_subcommand("repro", "Reproduce a result");
  repro->add_option("target", cfg.repro_target, "thm5|thm6|thm7|rv")
      ->required();
  repro->add_option("--a", cfg.a, "Base a");
  repro->add_option("--alpha", cfg.alpha, "factorial|super_geometric:B");
  repro->add_option("--k", cfg.k, "Largest k (thm7)");
  repro->add_option("--out", cfg.out_path, "Output file");

  auto* rv = app.add_subcommand("rv", "Regular-variation checks");
  rv->add_option("--cost", cfg.cost_json, "Cost spec JSON (default: suite)");
  rv->add_option("--out", cfg.out_path, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  cfg.jobs = jobs;
  return run(cfg, out, err);
}

}  // namespace poa::cli
