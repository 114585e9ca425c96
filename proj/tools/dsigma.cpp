//
// Copyright 2026 The dsigma Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Command-line front end: dsigma <subcommand> [flags]. Exit codes: 0 on
// success, 2 on invalid input or options, 3 when an audit fails.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "dsigma/dsigma.hpp"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"

namespace {

using Json = nlohmann::ordered_json;
using namespace dsigma;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitAuditFailed = 3;

struct GlobalOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string log_level = "info";
};

// Finite numbers stay numbers; infinities become the strings "inf"/"-inf"
// so that reports stay valid JSON.
Json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

Json to_json(const Permutation& p) { return p.mapping(); }

Json plan_json(const ShufflePlan& plan, bool with_reference) {
  Json j;
  j["digest"] = plan_digest(plan);
  j["n"] = plan.size();
  j["alpha"] = number(plan.alpha);
  j["sensitivity"] = number(plan.sensitivity);
  j["theta"] = number(plan.theta);
  j["width"] = plan.width;
  j["r"] = number(plan.assignment.threshold_r);
  j["metric"] = std::string(to_string(plan.assignment.metric));
  j["rank_distance"] = std::string(to_string(plan.rank_distance));
  j["identity_shuffle"] = plan.identity_shuffle();
  if (with_reference) j["sigma0"] = to_json(plan.sigma0);
  return j;
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
}

void write_json(const Json& j, const std::string& path) { write_text(j.dump(2) + "\n", path); }

// ---- Input plumbing shared by the data subcommands ----

struct DataOptions {
  std::string input;
  std::string aux;
  std::string value_column;
  std::string metric;
  std::uint32_t label_arity = 0;
};

void add_data_options(CLI::App* cmd, DataOptions& o, bool required = true) {
  auto* in = cmd->add_option("--input", o.input,
                             "CSV with columns id, x (or y), t_1..t_d and optional t_p");
  if (required) in->required();
  in->check(CLI::ExistingFile);
  cmd->add_option("--aux", o.aux,
                  "edge list (two 0-based row indices per line) replacing t_1..t_d as the "
                  "public information; distances become hop counts")
      ->check(CLI::ExistingFile);
  cmd->add_option("--value-column", o.value_column,
                  "column holding the released values (default: y if present, else x)");
  cmd->add_option("--metric", o.metric,
                  "distance d(t_i, t_j) on public information: euclidean, manhattan or hops "
                  "(default: euclidean for points, hops for graphs)");
  cmd->add_option("--k", o.label_arity, "category count k (default: max value + 1)");
}

Dataset load_dataset(const DataOptions& o) {
  const CsvTable table = read_csv_table(o.input);
  CsvSchema schema;
  schema.label_arity = o.label_arity;
  if (!o.value_column.empty())
    schema.value_column = o.value_column;
  else if (table.column("y"))
    schema.value_column = "y";
  schema.require_points = o.aux.empty();
  Dataset d = dataset_from_table(table, schema);
  if (!o.aux.empty()) d.aux.data = load_edge_list(o.aux, d.size());
  validate(d);
  return d;
}

Metric resolve_metric(const std::string& name, const AuxInfo& aux) {
  const Metric m = name.empty() ? (aux.is_graph() ? Metric::kHopCount : Metric::kEuclidean)
                                : parse_metric(name);
  if (aux.is_graph() != (m == Metric::kHopCount))
    throw InvalidArgument("metric '" + std::string(to_string(m)) +
                          "' does not fit this kind of public information");
  return m;
}

// Points 0, 1, ..., n-1 on a line: group i is every index within r of i.
AuxInfo line_aux(std::size_t n) {
  PointAux p;
  for (std::size_t i = 0; i < n; ++i) p.points.push_back({static_cast<double>(i)});
  return AuxInfo{std::move(p)};
}

// Grouping file: {"groups": [[...], ...]}, {"points": [[...], ...]} or
// {"n": N, "edges": [[u, v], ...]}, all 0-based. Points and edges are
// turned into groups with --r.
GroupAssignment load_grouping(const std::string& path, double r, const std::string& metric) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
    if (j.contains("groups"))
      return groups_from_lists(j.at("groups").get<std::vector<std::vector<Index>>>());
    if (j.contains("points")) {
      AuxInfo aux{PointAux{j.at("points").get<std::vector<std::vector<double>>>()}};
      return compute_groups(aux, r, resolve_metric(metric, aux));
    }
    if (j.contains("edges")) {
      const auto edges = j.at("edges").get<std::vector<std::pair<Index, Index>>>();
      AuxInfo aux{graph_from_edges(j.at("n").get<std::size_t>(), edges)};
      return compute_groups(aux, r, resolve_metric(metric, aux));
    }
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
  throw ParseError(path + ": expected a 'groups', 'points' or 'edges' key", 0);
}

std::vector<Index> load_subset(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::vector<Index> s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = line.substr(0, line.find('#'));
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      std::uint64_t v = 0;
      const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || p != tok.data() + tok.size() || v >= n)
        throw ParseError("bad subset index '" + tok + "'", lineno);
      s.push_back(static_cast<Index>(v));
    }
  }
  std::sort(s.begin(), s.end());
  validate_subset(s, n);
  return s;
}

std::vector<Index> default_subset(std::size_t n, std::size_t size) {
  if (size == 0) size = std::max<std::size_t>(1, n / 2);
  if (size > n) throw InvalidArgument("subset size exceeds n");
  std::vector<Index> s(size);
  std::iota(s.begin(), s.end(), Index{0});
  return s;
}

RankDistance parse_supported_rank_distance(const std::string& name) {
  const RankDistance rd = parse_rank_distance(name);
  if (rd != RankDistance::kKendallTau)
    throw Unsupported("sampling is implemented for Kendall's tau only");
  return rd;
}

// ---- Subcommands ----

struct PlanOptions {
  double alpha = 1.0;
  double r = 0.0;
  std::string rank_distance = "kendall";
};

void add_plan_options(CLI::App* cmd, PlanOptions& o) {
  cmd->add_option("--alpha", o.alpha,
                  "privacy budget: outputs of neighboring orderings differ by at most "
                  "exp(alpha * d_sigma); sets theta = alpha / Delta")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--r", o.r,
                  "group radius: G_i = { j : d(t_i, t_j) <= r }; 'inf' puts every record in "
                  "one group")
      ->check(CLI::NonNegativeNumber);
}

int cmd_gen_syn(const GlobalOptions& g, std::size_t n, const std::string& out) {
  const Dataset d = generate_syn(n, g.seed);
  if (out.empty() || out == "-")
    write_csv(d, std::cout);
  else
    write_csv(d, out);
  spdlog::info("wrote {} Syn records (seed {})", n, g.seed);
  return kExitOk;
}

int cmd_ldp(const GlobalOptions& g, const std::string& input, const std::string& output,
            double epsilon, std::uint32_t k) {
  CsvSchema schema;
  schema.require_points = false;
  schema.label_arity = k;
  const Dataset d = load_csv(input, schema);
  const RandomizerConfig cfg{epsilon, d.label_arity};
  const auto y = randomize_all(cfg, d.x, g.seed);
  std::ostringstream out;
  out << "id,y\n";
  for (std::size_t i = 0; i < d.size(); ++i) out << d.ids[i] << ',' << y[i] << '\n';
  write_text(out.str(), output);
  spdlog::info("randomized {} records with epsilon {} over k = {}", d.size(), epsilon,
               d.label_arity);
  return kExitOk;
}

int cmd_shuffle(const GlobalOptions& g, const DataOptions& data, const PlanOptions& po,
                std::string output, std::string sidecar, bool emit_permutation) {
  const Dataset d = load_dataset(data);
  const Metric metric = resolve_metric(data.metric, d.aux);
  const ShufflePlan plan = make_plan(d.aux, po.r, po.alpha, metric,
                                     parse_supported_rank_distance(po.rank_distance), g.threads);
  const auto out = shuffle(plan, d.x, derive_seed(g.seed, "mechanism"));
  if (output.empty()) output = data.input + ".z.csv";
  if (sidecar.empty()) sidecar = output + ".json";
  std::ostringstream csv;
  csv << "position,z\n";
  for (std::size_t k = 0; k < out.z.size(); ++k) csv << k << ',' << out.z[k] << '\n';
  write_text(csv.str(), output);

  Json j;
  j["plan"] = plan_json(plan, emit_permutation);
  j["seed"] = g.seed;
  j["output"] = output;
  if (emit_permutation) j["sigma_star"] = to_json(out.sigma_star);
  write_json(j, sidecar);
  spdlog::info("shuffled {} records: width {}, Delta {}, theta {}", d.size(), plan.width,
               plan.sensitivity, plan.theta);
  return kExitOk;
}

int cmd_audit(std::size_t n, const PlanOptions& po, const std::string& metric,
              const std::string& grouping_file, std::optional<double> theta_override,
              const std::string& output) {
  GroupAssignment groups;
  if (!grouping_file.empty()) {
    groups = load_grouping(grouping_file, po.r, metric);
    if (n != 0 && groups.size() != n)
      throw InvalidArgument("--n disagrees with the grouping file");
  } else {
    if (n == 0) throw InvalidArgument("audit needs --n or --grouping-file");
    const AuxInfo aux = line_aux(n);
    groups = compute_groups(aux, po.r, resolve_metric(metric, aux));
  }
  ShufflePlan plan = make_plan(std::move(groups), po.alpha);
  if (theta_override) plan = with_theta(std::move(plan), *theta_override);
  const AuditReport rep = audit_dsigma(plan, po.alpha);

  Json j;
  j["n"] = rep.n;
  j["alpha_claimed"] = number(rep.alpha_claimed);
  j["max_log_ratio_observed"] = number(rep.max_log_ratio_observed);
  j["tolerance"] = kAuditTolerance;
  j["neighbor_pairs_checked"] = rep.neighbor_pairs_checked;
  j["witness"] = {{"sigma", to_json(rep.witness_sigma)},
                  {"sigma_prime", to_json(rep.witness_sigma_prime)},
                  {"z", to_json(rep.witness_z)}};
  j["plan"] = plan_json(plan, true);
  j["groups"] = plan.assignment.groups;
  j["pass"] = rep.pass;
  write_json(j, output);
  if (!rep.pass) spdlog::warn("audit failed: observed {} > claimed {}", rep.max_log_ratio_observed,
                              rep.alpha_claimed);
  return rep.pass ? kExitOk : kExitAuditFailed;
}

struct PreserveOptions {
  std::string method = "mc";
  std::size_t n = 0;
  double theta = 0.0;
  double eta = 0.5;
  std::optional<double> delta;
  std::size_t trials = 1000;
  std::string subset_file;
  std::size_t subset_size = 0;
  std::string sweep_out;
  std::vector<double> sweep_alphas{0.25, 0.5, 1, 2, 4};
  std::vector<double> sweep_radii{1, 2, 4, 8};
};

Json preservation_json(const PreservationReport& rep, std::size_t n) {
  Json j;
  j["method"] = std::string(to_string(rep.method));
  j["n"] = n;
  j["eta"] = rep.eta;
  j["delta"] = rep.delta;
  j["subset_size"] = rep.subset.size();
  j["subset"] = rep.subset;
  j["samples"] = rep.samples;
  j["mean_overlap"] = number(rep.mean_overlap);
  return j;
}

int cmd_preserve(const GlobalOptions& g, const PreserveOptions& o, const DataOptions& data,
                 const PlanOptions& po, const std::string& output) {
  if (o.method == "exact" || o.method == "brute") {
    if (o.n == 0) throw InvalidArgument("--method " + o.method + " needs --n");
    const auto subset =
        o.subset_file.empty() ? default_subset(o.n, o.subset_size) : load_subset(o.subset_file, o.n);
    const auto method =
        o.method == "exact" ? PreservationMethod::kExactHamming : PreservationMethod::kBruteForce;
    auto j = preservation_json(exact_preservation(o.theta, o.n, subset, o.eta, method), o.n);
    j["theta"] = number(o.theta);
    j["rank_distance"] = "hamming";
    write_json(j, output);
    return kExitOk;
  }
  if (o.method != "mc") throw InvalidArgument("--method must be exact, brute or mc");

  AuxInfo aux;
  std::string metric_name = data.metric;
  if (!data.input.empty()) {
    aux = load_dataset(data).aux;
  } else {
    if (o.n == 0) throw InvalidArgument("--method mc needs --input or --n");
    aux = line_aux(o.n);
  }
  const Metric metric = resolve_metric(metric_name, aux);
  const ShufflePlan plan = make_plan(aux, po.r, po.alpha, metric, RankDistance::kKendallTau,
                                     g.threads);
  const std::size_t n = plan.size();
  const auto subset =
      o.subset_file.empty() ? default_subset(n, o.subset_size) : load_subset(o.subset_file, n);
  const auto rep = estimate_preservation(plan, subset, o.eta, o.trials, g.seed, g.threads);
  auto j = preservation_json(rep, n);
  j["plan"] = plan_json(plan, false);
  if (o.delta) {
    j["delta_target"] = *o.delta;
    j["eta_at_delta"] =
        eta_at_delta(sample_overlaps(plan, subset, o.trials, g.seed, g.threads), *o.delta);
  }
  write_json(j, output);

  if (!o.sweep_out.empty()) {
    const double dt = o.delta.value_or(0.05);
    std::ostringstream csv;
    csv << "axis,value,omega,subset_size,alpha,eta\n";
    auto row = [&](const char* axis, double value, const ShufflePlan& p,
                   const std::vector<Index>& s) {
      const double eta = eta_at_delta(sample_overlaps(p, s, o.trials, g.seed, g.threads), dt);
      csv << axis << ',' << format_double(value) << ',' << p.width << ',' << s.size() << ','
          << format_double(p.alpha) << ',' << format_double(eta) << '\n';
    };
    for (double a : o.sweep_alphas) row("alpha", a, make_plan(plan.assignment, a), subset);
    for (double r : o.sweep_radii) {
      const auto p = make_plan(compute_groups(aux, r, metric, g.threads), po.alpha);
      row("omega", static_cast<double>(p.width), p, subset);
    }
    for (std::size_t m = 1; m <= subset.size(); m = std::max(m + 1, m * 2)) {
      const std::vector<Index> s(subset.begin(), subset.begin() + static_cast<std::ptrdiff_t>(m));
      row("subset_size", static_cast<double>(m), plan, s);
    }
    write_text(csv.str(), o.sweep_out);
  }
  return kExitOk;
}

struct AttackOptions {
  AttackConfig cfg;
  bool no_privileged = false;
  bool per_record = false;
  std::string estimator = "ball";
};

void add_attack_options(CLI::App* cmd, AttackOptions& o) {
  cmd->add_option("--epsilon", o.cfg.epsilon,
                  "randomized response budget: keep x with probability e^eps / (e^eps + k - 1)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--r-star", o.cfg.r_star,
                  "attack radius: voters and local truth come from the r*-ball around t_i")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--k-neighbors", o.cfg.k_neighbors, "voters per target");
  cmd->add_option("--trials", o.cfg.trials, "randomized response repetitions per experiment");
  cmd->add_option("--threshold", o.cfg.success_threshold,
                  "a record is vulnerable when its success rate reaches this value");
  cmd->add_flag("--no-privileged", o.no_privileged,
                "ignore t_p and pick voters at random inside the r*-ball");
}

AttackConfig finish_config(AttackOptions o, const GlobalOptions& g, const Dataset& d) {
  o.cfg.threads = g.threads;
  o.cfg.use_privileged = !o.no_privileged;
  o.cfg.metric = d.aux.is_graph() ? Metric::kHopCount : Metric::kEuclidean;
  return o.cfg;
}

int cmd_attack(const GlobalOptions& g, const DataOptions& data, const PlanOptions& po,
               const AttackOptions& ao, const std::string& output) {
  const Dataset d = load_dataset(data);
  const Metric metric = resolve_metric(data.metric, d.aux);
  const ShufflePlan plan = make_plan(d.aux, po.r, po.alpha, metric, RankDistance::kKendallTau,
                                     g.threads);
  const AttackConfig cfg = finish_config(ao, g, d);
  const AttackReport rep = run_attack(d, plan, cfg, g.seed);
  Json j;
  j["rho"] = rep.rho;
  j["tie_rate"] = rep.tie_rate;
  j["short_neighborhoods"] = rep.short_neighborhoods;
  j["degenerate"] = rep.degenerate;
  j["seed"] = rep.seed;
  j["config"] = {{"k_neighbors", cfg.k_neighbors},   {"trials", cfg.trials},
                 {"success_threshold", cfg.success_threshold},
                 {"epsilon", cfg.epsilon},           {"r_star", cfg.r_star},
                 {"use_privileged", cfg.use_privileged && d.privileged.has_value()}};
  j["plan"] = plan_json(plan, false);
  if (ao.per_record) j["per_record_success"] = rep.per_record_success;
  write_json(j, output);
  return kExitOk;
}

LocalEstimator make_estimator(const std::string& name) {
  if (name == "ball") return ball_debiased_histogram();
  if (name == "global") return global_histogram();
  throw InvalidArgument("unknown estimator '" + name + "' (ball, global)");
}

int cmd_learn(const GlobalOptions& g, const DataOptions& data, const PlanOptions& po,
              const AttackOptions& ao, const std::string& output) {
  const Dataset d = load_dataset(data);
  const Metric metric = resolve_metric(data.metric, d.aux);
  const ShufflePlan plan = make_plan(d.aux, po.r, po.alpha, metric, RankDistance::kKendallTau,
                                     g.threads);
  const auto rep = run_learnability(d, plan, ao.cfg.r_star, make_estimator(ao.estimator),
                                    ao.cfg.epsilon, g.seed, metric, g.threads);
  Json j;
  j["lambda"] = number(rep.lambda);
  j["mean_tv"] = rep.mean_tv;
  j["baseline_tv"] = rep.baseline_tv;
  j["skipped"] = rep.skipped;
  j["estimator"] = ao.estimator;
  j["epsilon"] = ao.cfg.epsilon;
  j["r_star"] = ao.cfg.r_star;
  j["seed"] = rep.seed;
  j["plan"] = plan_json(plan, false);
  write_json(j, output);
  return kExitOk;
}

int cmd_sweep(const GlobalOptions& g, const DataOptions& data, const AttackOptions& ao,
              const std::vector<double>& alphas, const std::vector<double>& radii,
              const std::string& output) {
  const Dataset d = load_dataset(data);
  const Metric metric = resolve_metric(data.metric, d.aux);
  const auto rows =
      sweep(d, alphas, radii, finish_config(ao, g, d), g.seed, metric, make_estimator(ao.estimator));
  std::ostringstream csv;
  write_sweep_csv(rows, csv);
  write_text(csv.str(), output);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"d_sigma-private shuffling: grouping, calibrated Mallows shuffles, audits and "
               "evaluation"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--seed", g.seed,
                 "master seed; each component draws from its own stream derived from it");
  app.add_option("--threads", g.threads, "worker threads (results do not depend on this)")
      ->check(CLI::PositiveNumber);
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off");

  std::string out;
  std::size_t n = 0;

  auto* gen = app.add_subcommand("gen-syn", "generate the 8-label Syn dataset as CSV");
  gen->fallthrough();
  gen->add_option("--n", n, "number of records (>= 8)")->required();
  gen->add_option("--out,--output", out, "output CSV (default: stdout)");

  auto* ldp = app.add_subcommand("ldp", "randomize x with k-ary randomized response");
  ldp->fallthrough();
  std::string ldp_input;
  double ldp_eps = 1.0;
  std::uint32_t ldp_k = 0;
  ldp->add_option("--input", ldp_input, "CSV with columns id, x")
      ->required()
      ->check(CLI::ExistingFile);
  ldp->add_option("--output,--out", out, "CSV with columns id, y (default: stdout)");
  ldp->add_option("--epsilon", ldp_eps,
                  "budget: P[y = x] = e^eps / (e^eps + k - 1), every other value "
                  "1 / (e^eps + k - 1)")
      ->check(CLI::NonNegativeNumber);
  ldp->add_option("--k", ldp_k, "category count k (default: max x + 1)");

  DataOptions data;
  PlanOptions po;

  auto* shf = app.add_subcommand("shuffle", "release z = y permuted by a sampled sigma*");
  shf->fallthrough();
  add_data_options(shf, data);
  add_plan_options(shf, po);
  std::string sidecar;
  bool emit_perm = false;
  shf->add_option("--rank-distance", po.rank_distance,
                  "distance of the Mallows model P(sigma) ~ exp(-theta d(sigma, sigma0)); "
                  "kendall only");
  shf->add_option("--output,--out", out, "z CSV (default: <input>.z.csv)");
  shf->add_option("--sidecar", sidecar, "plan JSON (default: <output>.json)");
  shf->add_flag("--emit-permutation", emit_perm,
                "add sigma0 and sigma* = sigma0^-1 sigma_hat to the sidecar");

  auto* aud = app.add_subcommand("audit", "exhaustive d_sigma privacy audit (n <= 6)");
  aud->fallthrough();
  std::string grouping_file, audit_metric;
  std::optional<double> theta_override;
  aud->add_option("--n", n, "records; without a grouping file they sit at 0..n-1 on a line");
  add_plan_options(aud, po);
  aud->add_option("--metric", audit_metric, "distance for points or edges in the grouping file");
  aud->add_option("--grouping-file", grouping_file,
                  "JSON with 'groups', 'points' or 'n' plus 'edges' (0-based)")
      ->check(CLI::ExistingFile);
  aud->add_option("--theta-override", theta_override,
                  "audit the Mallows dispersion theta instead of alpha / Delta against the "
                  "claimed alpha")
      ->check(CLI::NonNegativeNumber);
  aud->add_option("--output,--out", out, "report JSON (default: stdout)");

  auto* pre = app.add_subcommand("preserve", "(eta, delta)-preservation of a subset S");
  pre->fallthrough();
  PreserveOptions popt;
  DataOptions pdata;
  pre->add_option("--method", popt.method,
                  "exact (Hamming counting), brute (enumeration, n <= 10) or mc (sampling)")
      ->check(CLI::IsMember({"exact", "brute", "mc"}));
  pre->add_option("--n", popt.n, "records for exact/brute, or points on a line for mc");
  pre->add_option("--theta", popt.theta,
                  "Hamming Mallows dispersion for exact/brute: P(sigma) ~ exp(-theta d_H)")
      ->check(CLI::NonNegativeNumber);
  pre->add_option("--eta", popt.eta,
                  "required kept share: failure when |sigma*(S) ∩ S| < eta |S|")
      ->check(CLI::Range(0.0, 1.0));
  pre->add_option("--delta", popt.delta,
                  "mc only: also report the largest eta met with probability >= 1 - delta")
      ->check(CLI::Range(0.0, 1.0));
  pre->add_option("--trials", popt.trials, "mc samples of sigma*");
  pre->add_option("--subset-file", popt.subset_file, "0-based indices of S")
      ->check(CLI::ExistingFile);
  pre->add_option("--subset-size", popt.subset_size,
                  "use S = {0, ..., size-1} when no subset file is given (default n/2)");
  pre->add_option("--sweep-out", popt.sweep_out,
                  "mc only: CSV of eta against alpha, width omega and |S|");
  pre->add_option("--sweep-alphas", popt.sweep_alphas, "alpha grid for --sweep-out");
  pre->add_option("--sweep-radii", popt.sweep_radii, "radius grid (sets omega) for --sweep-out");
  add_data_options(pre, pdata, false);
  add_plan_options(pre, po);
  pre->add_option("--output,--out", out, "report JSON (default: stdout)");

  AttackOptions ao;
  auto* att = app.add_subcommand("attack", "majority-vote inference attack; reports rho");
  att->fallthrough();
  add_data_options(att, data);
  add_plan_options(att, po);
  add_attack_options(att, ao);
  att->add_flag("--per-record", ao.per_record, "include every record's success rate");
  att->add_option("--output,--out", out, "report JSON (default: stdout)");

  auto* lrn = app.add_subcommand("learn", "learnability of x from the release; reports lambda");
  lrn->fallthrough();
  add_data_options(lrn, data);
  add_plan_options(lrn, po);
  add_attack_options(lrn, ao);
  lrn->add_option("--estimator", ao.estimator,
                  "ball: debiased r*-ball histogram; global: debiased overall histogram");
  lrn->add_option("--output,--out", out, "report JSON (default: stdout)");

  auto* swp = app.add_subcommand("sweep", "rho and lambda over a grid of radii and alphas");
  swp->fallthrough();
  std::vector<double> alphas{1.0}, radii;
  add_data_options(swp, data);
  add_attack_options(swp, ao);
  swp->add_option("--alphas", alphas, "privacy budgets alpha");
  swp->add_option("--radii", radii, "group radii r ('inf' for one group)")->required();
  swp->add_option("--estimator", ao.estimator, "learnability estimator: ball or global");
  swp->add_option("--output,--out", out, "CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  spdlog::set_default_logger(spdlog::stderr_color_mt("dsigma"));
  const auto level = spdlog::level::from_str(g.log_level);
  if (level == spdlog::level::off && g.log_level != "off") {
    std::cerr << "unknown --log-level '" << g.log_level << "'\n";
    return kExitInvalid;
  }
  spdlog::set_level(level);

  try {
    if (*gen) return cmd_gen_syn(g, n, out);
    if (*ldp) return cmd_ldp(g, ldp_input, out, ldp_eps, ldp_k);
    if (*shf) return cmd_shuffle(g, data, po, out, sidecar, emit_perm);
    if (*aud) return cmd_audit(n, po, audit_metric, grouping_file, theta_override, out);
    if (*pre) return cmd_preserve(g, popt, pdata, po, out);
    if (*att) return cmd_attack(g, data, po, ao, out);
    if (*lrn) return cmd_learn(g, data, po, ao, out);
    if (*swp) return cmd_sweep(g, data, ao, alphas, radii, out);
  } catch (const dsigma::Error& e) {
    spdlog::error("{}", e.what());
    return kExitInvalid;
  }
  return kExitInvalid;
}
