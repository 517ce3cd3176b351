#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "metapotts/broadcast.hpp"
#include "metapotts/dynamics.hpp"
#include "metapotts/gibbs_exact.hpp"
#include "metapotts/meanfield.hpp"
#include "metapotts/percolation.hpp"

namespace metapotts::cli {

namespace {

using json = nlohmann::ordered_json;

// Thrown for configuration problems found after parsing; exit status 2.
struct UsageError {
  std::vector<std::string> violations;
};

bool valid_q(int q) { return q >= 3 && q <= 255; }

std::optional<ColourDistribution> ferro_marginal(int q, int d, double beta) {
  const PottsParams p{q, d, beta};
  const auto f = ferro_fixed_point(p);
  if (!f) return std::nullopt;
  return marginal_map(f->mu, p).first;
}

std::vector<double> to_vector(const ColourDistribution& c) { return {c.probs().begin(), c.probs().end()}; }

std::optional<MultiGraph> load_graph(const std::string& path, std::string* error) {
  std::ifstream in(path);
  if (!in) {
    *error = "cannot open graph file '" + path + "'";
    return std::nullopt;
  }
  try {
    return read_graph(in);
  } catch (const std::exception& e) {
    *error = "graph file '" + path + "': " + e.what();
    return std::nullopt;
  }
}

// Degree of a graph file: the header value, 0 when irregular or unreadable.
int graph_degree(const std::string& path) {
  std::ifstream in(path);
  long long n = 0;
  int d = 0;
  in >> n >> d;
  return in ? d : 0;
}

void check_common(const Settings& s, std::vector<std::string>& v, bool need_q, bool need_d, bool need_beta) {
  if (need_q && !valid_q(s.q)) v.push_back("q must be >= 3 (beta_c formula undefined at q=2) and <= 255");
  if (need_d && s.d < 3) v.push_back("d must be >= 3");
  if (need_beta && !(s.beta >= 0.0 && std::isfinite(s.beta))) v.push_back("beta must be finite and >= 0");
  if (s.workers < 1) v.push_back("workers must be >= 1");
}

void check_phase(const Settings& s, std::vector<std::string>& v, int d, double beta) {
  if (s.phase != "para" && s.phase != "ferro") {
    v.push_back("phase must be para or ferro");
  } else if (s.phase == "ferro" && valid_q(s.q) && d >= 3 && std::isfinite(beta) &&
             !ferro_fixed_point({s.q, d, beta})) {
    v.push_back("ferro phase needs beta > beta_u (no ferromagnetic fixed point)");
  }
  if (!(s.eps > 0.0 && s.eps < 1.0)) v.push_back("eps must lie in (0, 1)");
}

}  // namespace

std::vector<std::string> validate(const Settings& s) {
  std::vector<std::string> v;
  const std::string& c = s.command;
  if (c == "thresholds") {
    check_common(s, v, true, true, false);
  } else if (c == "fixed-points" || c == "identity-check") {
    check_common(s, v, true, true, true);
  } else if (c == "simulate") {
    check_common(s, v, true, true, true);
    if (s.n < 2) v.push_back("n must be >= 2");
    if ((static_cast<long long>(s.d) * s.n) % 2 != 0) v.push_back("d*n must be even");
    if (s.chain != "glauber" && s.chain != "sw") v.push_back("chain must be glauber or sw");
    const double plant = std::isnan(s.plant_beta) ? s.beta : s.plant_beta;
    if (!std::isnan(s.plant_beta) && !(s.plant_beta >= 0.0 && std::isfinite(s.plant_beta))) {
      v.push_back("plant-beta must be finite and >= 0");
    }
    check_phase(s, v, s.d, plant);
    if (!(s.monitor_eps > s.eps)) v.push_back("monitor eps must exceed start eps");
    if (!(s.monitor_eps < 1.0)) v.push_back("monitor eps must be < 1");
    if (s.sweeps < 1) v.push_back("sweeps must be >= 1");
    if (s.trials < 1) v.push_back("trials must be >= 1");
    if (s.trace_stride < 0) v.push_back("trace-stride must be >= 0");
    if (s.trace_stride > 0 && s.output.empty()) v.push_back("trace-stride needs an output directory");
  } else if (c == "percolate") {
    check_common(s, v, false, true, false);
    if (s.n < 1) v.push_back("n must be >= 1");
    if ((static_cast<long long>(s.d) * s.n) % 2 != 0) v.push_back("d*n must be even");
    if (s.trials < 1) v.push_back("trials must be >= 1");
    if (s.mode == "binomial") {
      if (!(s.p >= 0.0 && s.p <= 1.0)) v.push_back("p must lie in [0, 1]");
    } else if (s.mode == "exact") {
      const long long edges = static_cast<long long>(s.d) * s.n / 2;
      if (s.m < 0 || s.m > edges) v.push_back("m must lie in [0, d*n/2] for exact mode");
    } else {
      v.push_back("mode must be binomial or exact");
    }
  } else if (c == "broadcast") {
    check_common(s, v, true, true, true);
    if (s.depth < 0 || s.depth > 40) v.push_back("depth must lie in [0, 40]");
    if (s.samples < 100) v.push_back("samples must be >= 100");
    if (s.fixed_point != "para" && s.fixed_point != "ferro") {
      v.push_back("fixed-point must be para or ferro");
    } else if (s.fixed_point == "ferro" && valid_q(s.q) && s.d >= 3 && std::isfinite(s.beta) &&
               !ferro_fixed_point({s.q, s.d, s.beta})) {
      v.push_back("ferro fixed point needs beta > beta_u");
    }
  } else if (c == "exact") {
    check_common(s, v, true, false, true);
    std::string error;
    const auto g = s.graph.empty() ? std::nullopt : load_graph(s.graph, &error);
    if (s.graph.empty()) v.push_back("graph file is required");
    else if (!g) v.push_back(error);
    static const std::vector<std::string> checks{"partition", "marginals", "bottleneck", "escape-bound",
                                                 "nishimori"};
    if (std::find(checks.begin(), checks.end(), s.check) == checks.end()) {
      v.push_back("check must be one of partition, marginals, bottleneck, escape-bound, nishimori");
    }
    if (g && valid_q(s.q)) {
      const double states = std::pow(static_cast<double>(s.q), g->num_vertices());
      if (states > static_cast<double>(kDefaultStateCap)) v.push_back("q^n exceeds the state cap 2^24");
    }
    if (s.check != "partition" && s.check != "marginals") {
      const int d = g ? graph_degree(s.graph) : 0;
      check_phase(s, v, d, s.beta);
      if (s.phase == "ferro" && d < 3) v.push_back("ferro phase needs a d-regular graph with d >= 3");
      if (s.check == "nishimori") {
        if (g && d < 3) v.push_back("nishimori check needs a d-regular graph with d >= 3");
        if (g && static_cast<long long>(g->num_vertices()) * d > 16) {
          v.push_back("nishimori check needs n*d <= 16 half-edges");
        }
      }
      if (s.steps < 0) v.push_back("steps must be >= 0");
    }
  } else if (c == "nishimori") {
    check_common(s, v, true, true, true);
    if (s.n < 1) v.push_back("n must be >= 1");
    if ((static_cast<long long>(s.d) * s.n) % 2 != 0) v.push_back("d*n must be even");
    if (static_cast<long long>(s.d) * s.n > 16) v.push_back("n*d must be <= 16 half-edges");
    check_phase(s, v, s.d, s.beta);
  } else {
    v.push_back("unknown command '" + c + "'");
  }
  return v;
}

namespace {

json manifest(const Settings& s, const json& config) {
  json m;
  m["tool"] = "metapotts";
  m["version"] = kVersion;
  m["command"] = s.command;
  m["seed"] = s.seed;
  m["config"] = config;
  return m;
}

// Writes `text` to <output>/<name> or, without an output directory, to out.
void emit(const Settings& s, const std::string& name, const std::string& text, std::ostream& out) {
  if (s.output.empty()) {
    out << text;
    return;
  }
  std::filesystem::create_directories(s.output);
  std::ofstream f(std::filesystem::path(s.output) / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (std::filesystem::path(s.output) / name).string());
  f << text;
}

void emit_report(const Settings& s, json report, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (!s.output.empty()) {
    emit(s, "manifest.json", report["manifest"].dump(2) + "\n", out);
    emit(s, "report.json", text, out);
  }
  out << text;
}

void emit_csv(const Settings& s, const json& man, const std::string& name, const std::string& csv,
              std::ostream& out) {
  if (!s.output.empty()) emit(s, "manifest.json", man.dump(2) + "\n", out);
  emit(s, name, csv, out);
}

json thresholds_command(const Settings& s) {
  const Thresholds t = thresholds(s.q, s.d);
  json r;
  r["beta_u"] = t.beta_u;
  r["beta_c"] = t.beta_c;
  r["beta_h"] = t.beta_h;
  r["manifest"] = manifest(s, {{"q", s.q}, {"d", s.d}});
  return r;
}

json fixed_points_command(const Settings& s) {
  const PottsParams p{s.q, s.d, s.beta};
  json list = json::array();
  for (const FixedPointReport& f : solve_fixed_points(p)) {
    json item;
    item["kind"] = to_string(f.kind);
    item["mu"] = to_vector(f.mu);
    item["residual"] = f.residual;
    item["stable"] = f.stable;
    item["jacobian_radius"] = f.jacobian_radius;
    item["bethe"] = f.bethe_value;
    list.push_back(item);
  }
  json r;
  r["fixed_points"] = list;
  r["manifest"] = manifest(s, {{"q", s.q}, {"d", s.d}, {"beta", s.beta}});
  return r;
}

json identity_command(const Settings& s) {
  const PottsParams p{s.q, s.d, s.beta};
  json list = json::array();
  for (const FixedPointReport& f : solve_fixed_points(p)) {
    const auto [nu, rho] = marginal_map(f.mu, p);
    const double first = first_moment_rate(nu, rho, p);
    json item;
    item["kind"] = to_string(f.kind);
    item["bethe"] = f.bethe_value;
    item["first_moment_rate"] = first;
    item["bijection_residual"] = std::abs(f.bethe_value - first);
    item["second_moment_residual"] = std::abs(second_moment_rate(rho, OverlapTensor::product(rho), p) - 2.0 * first);
    for (int c = 0; c < s.q; ++c) {
      const ColourClass cc = colour_class_parameter(nu, rho, c, p);
      item["class_r"].push_back(cc.r);
      item["class_regime"].push_back(to_string(cc.regime));
    }
    list.push_back(item);
  }
  json r;
  r["fixed_points"] = list;
  if (ferro_fixed_point(p)) {
    r["giant_identity_residual"] = giant_identity_residual(s.q, s.d, s.beta);
  } else {
    r["giant_identity_residual"] = nullptr;
  }
  r["manifest"] = manifest(s, {{"q", s.q}, {"d", s.d}, {"beta", s.beta}});
  return r;
}

json simulate_command(const Settings& s, std::ostream& out) {
  EscapeConfig c;
  c.params = {s.q, s.d, s.beta};
  c.plant_beta = s.plant_beta;
  c.n = s.n;
  c.start = s.phase == "ferro" ? PhaseKind::ferro : PhaseKind::para;
  c.start_eps = s.eps;
  c.monitor_eps = s.monitor_eps;
  c.monitor_permutations = s.permutations;
  c.chain = s.chain == "sw" ? ChainKind::sw : ChainKind::glauber;
  c.sweeps = s.sweeps;
  c.trials = s.trials;
  c.seed = s.seed;
  c.workers = s.workers;
  c.trace_stride = s.trace_stride;
  const EscapeReport rep = escape_experiment(c);

  json steps = json::array();
  json per_trial = json::array();
  for (const TrialOutcome& t : rep.trials) {
    if (t.escape_step) steps.push_back(*t.escape_step);
    json item;
    item["trial"] = t.trial;
    item["started_inside"] = t.started_inside;
    item["escape_step"] = t.escape_step ? json(*t.escape_step) : json(nullptr);
    item["max_deviation"] = t.max_deviation;
    per_trial.push_back(item);
    if (c.trace_stride > 0) {
      std::ostringstream csv;
      write_trace_csv(csv, t.trace, s.q);
      emit(s, "trace_" + std::to_string(t.trial) + ".csv", csv.str(), out);
    }
  }
  json r;
  r["trials"] = s.trials;
  r["escaped"] = rep.escaped();
  r["escape_steps"] = steps;
  r["step_unit"] = c.chain == ChainKind::sw ? "iteration" : "single-site update";
  r["sweeps_budget"] = s.sweeps;
  r["params"] = {{"q", s.q}, {"d", s.d}, {"beta", s.beta}};
  r["master_seed"] = s.seed;
  r["planted_vertex_counts"] = rep.planted.vertex_counts;
  r["per_trial"] = per_trial;
  json config = {{"q", s.q},           {"d", s.d},
                 {"beta", s.beta},     {"plant_beta", std::isnan(s.plant_beta) ? s.beta : s.plant_beta},
                 {"n", s.n},           {"chain", s.chain},
                 {"phase", s.phase},   {"eps", s.eps},
                 {"monitor_eps", s.monitor_eps}, {"permutations", s.permutations},
                 {"sweeps", s.sweeps}, {"trials", s.trials},
                 {"trace_stride", c.trace_stride}};
  r["manifest"] = manifest(s, config);
  return r;
}

void percolate_command(const Settings& s, std::ostream& out) {
  PercolationExperiment e;
  e.n = s.n;
  e.d = s.d;
  e.spec.mode = s.mode == "exact" ? PercolationMode::exact : PercolationMode::binomial;
  e.spec.p = s.p;
  e.spec.m = s.m < 0 ? 0 : static_cast<std::uint64_t>(s.m);
  e.trials = s.trials;
  e.seed = s.seed;
  e.workers = s.workers;
  const auto trials = run_percolation(e);
  std::ostringstream csv;
  write_percolation_csv(csv, trials);
  json config = {{"n", s.n}, {"d", s.d}, {"mode", s.mode}, {"trials", s.trials}};
  if (s.mode == "exact") config["m"] = s.m;
  else config["p"] = s.p;
  emit_csv(s, manifest(s, config), "percolation.csv", csv.str(), out);
}

void broadcast_command(const Settings& s, std::ostream& out) {
  const PottsParams p{s.q, s.d, s.beta};
  const ColourDistribution mu = s.fixed_point == "ferro" ? ferro_fixed_point(p)->mu : ColourDistribution::uniform(s.q);
  const DecayCurve curve = nonrec_curve({p, mu, s.depth, s.samples}, s.seed, s.workers);
  std::ostringstream csv;
  write_curve_csv(csv, curve);
  json config = {{"q", s.q},           {"d", s.d},         {"beta", s.beta},
                 {"fixed_point", s.fixed_point}, {"depth", s.depth}, {"samples", s.samples}};
  emit_csv(s, manifest(s, config), "broadcast.csv", csv.str(), out);
}

PhaseSpec make_phase(const Settings& s, int d, double beta) {
  if (s.phase == "ferro") return PhaseSpec::ferro(*ferro_marginal(s.q, d, beta), s.eps, s.permutations);
  return PhaseSpec::para(s.q, s.eps);
}

json exact_command(const Settings& s) {
  std::string error;
  MultiGraph g = *load_graph(s.graph, &error);
  const int d = graph_degree(s.graph);
  const PottsParams p{s.q, d, s.beta};
  json r;
  r["graph"] = s.graph;
  r["n"] = g.num_vertices();
  r["check"] = s.check;
  json config = {{"graph", s.graph}, {"q", s.q}, {"beta", s.beta}, {"check", s.check}};
  if (s.check == "nishimori") {
    const NishimoriResult res = nishimori_check(static_cast<int>(g.num_vertices()), d, p, make_phase(s, d, s.beta));
    r["tv"] = res.tv;
    r["pairings"] = res.pairings;
    r["configurations"] = res.configurations;
  } else {
    const ExactContext ctx(std::move(g), p);
    r["log_z"] = ctx.log_z();
    if (s.check == "marginals") {
      const PartialConfiguration free(ctx.graph().num_vertices(), kFree);
      json m = json::array();
      for (std::size_t v = 0; v < ctx.graph().num_vertices(); ++v) {
        m.push_back(to_vector(marginal(ctx, static_cast<int>(v), free)));
      }
      r["marginals"] = m;
    } else if (s.check == "bottleneck" || s.check == "escape-bound") {
      const PhaseSpec phase = make_phase(s, d, s.beta);
      const auto set = phase_states(ctx, phase);
      const double mass = std::exp(log_partition_function(ctx, set) - ctx.log_z());
      r["phase_mass"] = mass;
      if (mass > 0.0) {
        const SparseKernel k = glauber_kernel(ctx);
        const double phi = bottleneck(ctx, k, set);
        r["bottleneck"] = phi;
        if (s.check == "escape-bound") {
          const auto tv = tv_evolution(ctx, k, set, s.steps);
          double slack = std::numeric_limits<double>::infinity();
          for (int t = 0; t <= s.steps; ++t) slack = std::min(slack, t * phi - tv[t]);
          r["tv"] = tv;
          r["min_slack"] = slack;
          r["bound_holds"] = slack >= -1e-12;
        }
      } else {
        r["bottleneck"] = nullptr;
      }
    }
  }
  if (s.check != "partition" && s.check != "marginals") {
    config["phase"] = s.phase;
    config["eps"] = s.eps;
    config["permutations"] = s.permutations;
  }
  if (s.check == "escape-bound") config["steps"] = s.steps;
  r["manifest"] = manifest(s, config);
  return r;
}

json nishimori_command(const Settings& s) {
  const PottsParams p{s.q, s.d, s.beta};
  const NishimoriResult res = nishimori_check(s.n, s.d, p, make_phase(s, s.d, s.beta));
  json r;
  r["tv"] = res.tv;
  r["pairings"] = res.pairings;
  r["configurations"] = res.configurations;
  r["manifest"] = manifest(s, {{"n", s.n},
                               {"d", s.d},
                               {"q", s.q},
                               {"beta", s.beta},
                               {"phase", s.phase},
                               {"eps", s.eps},
                               {"permutations", s.permutations}});
  return r;
}

void print_error(std::ostream& err, const std::string& kind, const std::vector<std::string>& messages) {
  json e;
  e["error"] = kind;
  e["violations"] = messages;
  err << e.dump() << "\n";
}

// key=value lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError{{"cannot open config file '" + path + "'"}};
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int number = 0;
  auto trim = [](std::string x) {
    const auto a = x.find_first_not_of(" \t\r");
    const auto b = x.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : x.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError{{"config line " + std::to_string(number) + " is not key=value"}};
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

// Config values fill options not given on the command line.
void apply_config(CLI::App& sub, const std::string& path) {
  std::vector<std::string> unknown;
  for (const auto& [key, value] : read_config(path)) {
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      unknown.push_back("unknown config key '" + key + "'");
      continue;
    }
    if (opt->count() > 0) continue;
    if (opt->get_type_size() == 0) {
      if (value == "true" || value == "1") opt->add_result("true");
      else if (value != "false" && value != "0") unknown.push_back("flag '" + key + "' needs true or false");
      else continue;
    } else {
      opt->add_result(value);
    }
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      unknown.push_back("config key '" + key + "': " + e.what());
    }
  }
  if (!unknown.empty()) throw UsageError{unknown};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Settings s;
  std::string config_path;
  CLI::App app("Potts model on random regular graphs: fixed points, dynamics, percolation, broadcasting",
               "metapotts");
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::map<std::string, CLI::App*> subs;
  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key=value file; command-line flags take precedence");
    sub->add_option("--seed", s.seed, "master seed");
    sub->add_option("--workers", s.workers, "worker threads");
    sub->add_option("--output", s.output, "output directory (reports also go to stdout)");
    subs[name] = sub;
    return sub;
  };
  auto add_qdb = [&](CLI::App* sub, bool beta) {
    sub->add_option("--q", s.q, "number of colours");
    sub->add_option("--d", s.d, "degree");
    if (beta) sub->add_option("--beta", s.beta, "inverse temperature");
  };

  add_qdb(add("thresholds", "beta_u, beta_c and beta_h"), false);
  add_qdb(add("fixed-points", "BP fixed points with stability and Bethe values"), true);
  add_qdb(add("identity-check", "bijection, second-moment and giant-component identities"), true);

  CLI::App* sim = add("simulate", "escape experiment from a planted phase");
  add_qdb(sim, true);
  sim->add_option("--n", s.n, "vertices");
  sim->add_option("--chain", s.chain, "glauber or sw");
  sim->add_option("--phase", s.phase, "start phase: para or ferro");
  sim->add_option("--eps", s.eps, "start phase width");
  sim->add_option("--monitor-eps", s.monitor_eps, "monitored phase width");
  sim->add_option("--plant-beta", s.plant_beta, "temperature of the planted statistics (default beta)");
  sim->add_option("--permutations", s.permutations, "ferro monitor closed under colour permutations");
  sim->add_option("--sweeps", s.sweeps, "sweeps (Glauber) or iterations (SW) per trial");
  sim->add_option("--trials", s.trials, "trials");
  sim->add_option("--trace-stride", s.trace_stride, "trace stride in sweeps; needs --output");

  CLI::App* perc = add("percolate", "bond percolation on random regular graphs");
  perc->add_option("--d", s.d, "degree");
  perc->add_option("--n", s.n, "vertices");
  perc->add_option("--mode", s.mode, "binomial or exact");
  perc->add_option("--p", s.p, "retention probability (binomial)");
  perc->add_option("--m", s.m, "kept edges (exact)");
  perc->add_option("--trials", s.trials, "trials");

  CLI::App* bc = add("broadcast", "non-reconstruction distance curve");
  add_qdb(bc, true);
  bc->add_option("--fixed-point", s.fixed_point, "para or ferro");
  bc->add_option("--depth", s.depth, "largest depth");
  bc->add_option("--samples", s.samples, "samples");

  CLI::App* ex = add("exact", "exact enumeration on a small graph file");
  ex->add_option("--graph", s.graph, "graph file");
  ex->add_option("--q", s.q, "number of colours");
  ex->add_option("--beta", s.beta, "inverse temperature");
  ex->add_option("--check", s.check, "partition, marginals, bottleneck, escape-bound or nishimori");
  ex->add_option("--phase", s.phase, "para or ferro");
  ex->add_option("--eps", s.eps, "phase width");
  ex->add_option("--permutations", s.permutations, "ferro set closed under colour permutations");
  ex->add_option("--steps", s.steps, "steps for escape-bound");

  CLI::App* ni = add("nishimori", "exact planted-versus-null comparison over all pairings");
  add_qdb(ni, true);
  ni->add_option("--n", s.n, "vertices");
  ni->add_option("--phase", s.phase, "para or ferro");
  ni->add_option("--eps", s.eps, "phase width");
  ni->add_option("--permutations", s.permutations, "ferro set closed under colour permutations");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", {e.what()});
    return 2;
  }

  try {
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) {
        s.command = name;
        if (!config_path.empty()) apply_config(*sub, config_path);
        // Tiny exact instances need wide phase windows to be nonempty.
        if ((name == "exact" || name == "nishimori") && sub->get_option("--eps")->count() == 0) s.eps = 0.5;
      }
    }
    const auto violations = validate(s);
    if (!violations.empty()) throw UsageError{violations};

    if (s.command == "thresholds") emit_report(s, thresholds_command(s), out);
    else if (s.command == "fixed-points") emit_report(s, fixed_points_command(s), out);
    else if (s.command == "identity-check") emit_report(s, identity_command(s), out);
    else if (s.command == "simulate") emit_report(s, simulate_command(s, out), out);
    else if (s.command == "percolate") percolate_command(s, out);
    else if (s.command == "broadcast") broadcast_command(s, out);
    else if (s.command == "exact") emit_report(s, exact_command(s), out);
    else if (s.command == "nishimori") emit_report(s, nishimori_command(s), out);
  } catch (const UsageError& e) {
    print_error(err, "invalid configuration", e.violations);
    return 2;
  } catch (const std::exception& e) {
    json j;
    j["error"] = "runtime";
    j["message"] = e.what();
    err << j.dump() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace metapotts::cli
