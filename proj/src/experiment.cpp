#include "mismc/harness/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mismc/errors.hpp"
#include "mismc/estimators.hpp"
#include "mismc/harness/csv.hpp"
#include "mismc/harness/svg.hpp"
#include "mismc/models/elliptic2d.hpp"
#include "mismc/models/point_process.hpp"
#include "mismc/models/toy1d.hpp"
#include "mismc/parallel.hpp"
#include "mismc/rates.hpp"

namespace mismc {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Seed-derivation layers for the experiment tree.
constexpr std::uint64_t kTagTask = 10;
constexpr std::uint64_t kTagPilot = 20;

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

double stage_multiplier(const SmcBlockConfig& smc) {
  return 1.0 + static_cast<double>(smc.n_stages - 1) * smc.n_mcmc;
}

double cost_per_particle(const ForwardModel& model, const SmcBlockConfig& smc,
                         const MultiIndex& alpha_rel) {
  double c = 0.0;
  for (const auto& t : increment_terms(model, alpha_rel)) c += model.cost(t.index);
  return stage_multiplier(smc) * c;
}

MultiIndex diagonal_rel(int dim, int level) {
  return MultiIndex(std::vector<int>(static_cast<std::size_t>(dim), level));
}

// ---------------------------------------------------------------------------
// Budget-to-parameter mapping
// ---------------------------------------------------------------------------

struct MethodPlan {
  // single_level
  MultiIndex level_phys;
  long n_particles = 0;
  // mismc
  std::optional<IndexSet> set;
  std::map<MultiIndex, long, LexLess> allocation;
  // rmismc
  long n_total = 0;
  json echo;
};

double min_rate(const std::vector<double>& v) {
  double m = v.front();
  for (double x : v) m = std::min(m, x);
  return m;
}

MethodPlan plan_single_level(const ForwardModel& model, const ExperimentConfig& cfg,
                             const EstimatorBlock& est, double budget,
                             const ReferenceValue& ref) {
  const int dim = model.index_dim();
  const auto* toy = dynamic_cast<const Toy1dModel*>(&model);
  const double s_min = cfg.rates.s.empty() ? 2.0 : min_rate(cfg.rates.s);
  const double var_scale = std::exp2(-est.level_rule_offset);

  MethodPlan plan;
  double best = 1e300;
  int best_level = 0;
  for (int l = 0; l <= est.level_cap; ++l) {
    const MultiIndex phys = model.to_physical(diagonal_rel(dim, l));
    const double cpp = stage_multiplier(cfg.smc) * model.cost(phys);
    if (cpp * 2.0 > budget && l > 0) break;  // cannot afford 2 particles
    double bias2;
    if (toy) {
      const double pi_l = toy->posterior_quadrature(2, phys[0]);
      bias2 = (pi_l - ref.value) * (pi_l - ref.value);
    } else {
      bias2 = std::exp2(-2.0 * s_min * l);
    }
    const double mse_model = bias2 + var_scale * cpp / budget;
    if (mse_model < best) {
      best = mse_model;
      best_level = l;
    }
  }
  plan.level_phys = model.to_physical(diagonal_rel(dim, best_level));
  const double cpp = stage_multiplier(cfg.smc) * model.cost(plan.level_phys);
  plan.n_particles = std::max<long>(2, static_cast<long>(budget / cpp));
  plan.echo = json{{"level", plan.level_phys.components()},
                   {"particles", plan.n_particles}};
  return plan;
}

IndexSet make_index_set(const IndexSetConfig& isc, int dim, int level) {
  if (isc.kind == "total_degree") {
    std::vector<double> w = isc.weights;
    if (w.empty())
      w.assign(static_cast<std::size_t>(dim), 1.0 / static_cast<double>(dim));
    // Weighted-simplex level chosen so the diagonal reaches `level`.
    return IndexSet::total_degree(dim, static_cast<double>(level), w);
  }
  return IndexSet::tensor_product(std::vector<int>(static_cast<std::size_t>(dim), level));
}

MethodPlan plan_mismc(const ForwardModel& model, const ExperimentConfig& cfg,
                      const EstimatorBlock& est, double budget) {
  const int dim = model.index_dim();
  const double s_min = min_rate(cfg.rates.s);
  int level = static_cast<int>(std::round(
      (std::log2(budget) + est.level_rule_offset) / (2.0 * s_min)));
  level = std::min(level, est.level_cap);
  level = std::max(level, 0);

  const auto cpp = [&](const MultiIndex& rel) {
    return cost_per_particle(model, cfg.smc, rel);
  };

  // Affordability cap: the per-index floors may not eat more than half the
  // budget, otherwise small budgets drown in minimum-size runs.
  {
    int l_afford = 0;
    for (int l = 0; l <= level; ++l) {
      const IndexSet candidate = make_index_set(est.index_set, dim, l);
      double floor_cost = 0.0;
      for (const auto& a : candidate.members())
        floor_cost += static_cast<double>(est.n_floor) * cpp(a);
      if (floor_cost <= 0.5 * budget)
        l_afford = l;
      else
        break;
    }
    level = std::min(level, l_afford);
  }
  MethodPlan plan;
  for (int l = level;; --l) {
    const IndexSet set = make_index_set(est.index_set, dim, l);
    try {
      plan.allocation = allocate_samples_deterministic(
          set, cfg.rates.beta, cfg.rates.gamma, budget, est.n_floor, cpp);
      plan.set = set;
      json alloc = json::object();
      for (const auto& [a, n] : plan.allocation) alloc[a.to_string()] = n;
      plan.echo = json{{"set", est.index_set.kind},
                       {"level", l},
                       {"allocation", alloc}};
      return plan;
    } catch (const InfeasibleBudgetError&) {
      if (l == 0) throw;
    }
  }
}

double expected_cost_per_particle(const ForwardModel& model,
                                  const ExperimentConfig& cfg,
                                  const AllocationDistribution& dist) {
  const int dim = model.index_dim();
  const int cap = dist.max_level();
  double acc = 0.0;
  if (dim == 1) {
    for (int l = 0; l <= cap; ++l) {
      const MultiIndex rel{l};
      const double p = dist.probability(model.to_physical(rel));
      const double term = p * cost_per_particle(model, cfg.smc, rel);
      acc += term;
      if (l > 4 && term < 1e-14 * acc) break;
    }
  } else {
    for (int l1 = 0; l1 <= cap; ++l1) {
      double row = 0.0;
      for (int l2 = 0; l2 <= cap; ++l2) {
        const MultiIndex rel{l1, l2};
        const double p = dist.probability(model.to_physical(rel));
        const double term = p * cost_per_particle(model, cfg.smc, rel);
        row += term;
        if (l2 > 4 && term < 1e-14 * (acc + row)) break;
      }
      acc += row;
      if (l1 > 4 && row < 1e-14 * acc) break;
    }
  }
  return acc;
}

MethodPlan plan_rmismc(const ForwardModel& model, const ExperimentConfig& cfg,
                       const EstimatorBlock& est, double budget) {
  std::vector<std::pair<double, double>> rates;
  for (std::size_t i = 0; i < cfg.rates.beta.size(); ++i)
    rates.emplace_back(cfg.rates.beta[i], cfg.rates.gamma[i]);
  const AllocationDistribution dist(rates, model.start_index(), est.level_cap);
  const double e_cpp = expected_cost_per_particle(model, cfg, dist);
  MethodPlan plan;
  plan.n_total = static_cast<long>(budget / e_cpp / static_cast<double>(est.n_min)) *
                 est.n_min;
  plan.n_total = std::max(plan.n_total, est.n_min);
  plan.echo = json{{"n_total", plan.n_total},
                   {"n_min", est.n_min},
                   {"expected_cost_per_particle", e_cpp}};
  return plan;
}

MethodPlan plan_method(const ForwardModel& model, const ExperimentConfig& cfg,
                       const EstimatorBlock& est, double budget,
                       const ReferenceValue& ref) {
  switch (est.kind) {
    case EstimatorKind::SingleLevel:
      return plan_single_level(model, cfg, est, budget, ref);
    case EstimatorKind::Mismc:
      return plan_mismc(model, cfg, est, budget);
    case EstimatorKind::Rmismc:
      return plan_rmismc(model, cfg, est, budget);
  }
  throw Error("unreachable estimator kind");
}

EstimateResult run_planned(const ForwardModel& model, const ExperimentConfig& cfg,
                           const EstimatorBlock& est, const MethodPlan& plan,
                           double z_min, RngStream rng) {
  EstimatorParams params;
  params.smc = cfg.smc.to_smc_config();
  params.z_min = z_min;
  switch (est.kind) {
    case EstimatorKind::SingleLevel:
      return single_level_estimate(model, plan.level_phys,
                                   static_cast<int>(plan.n_particles), params, rng);
    case EstimatorKind::Mismc:
      return mismc_estimate(model, *plan.set, plan.allocation, params, rng);
    case EstimatorKind::Rmismc: {
      std::vector<std::pair<double, double>> rates;
      for (std::size_t i = 0; i < cfg.rates.beta.size(); ++i)
        rates.emplace_back(cfg.rates.beta[i], cfg.rates.gamma[i]);
      const AllocationDistribution dist(rates, model.start_index(), est.level_cap);
      return rmismc_estimate(model, dist, plan.n_total, est.n_min, params, rng);
    }
  }
  throw Error("unreachable estimator kind");
}

// ---------------------------------------------------------------------------
// Reference caching
// ---------------------------------------------------------------------------

json reference_cache_key(const ExperimentConfig& cfg, const std::string& data_label) {
  json model = json{{"family", static_cast<int>(cfg.model.family)},
                    {"data", data_label},
                    {"start", cfg.model.start_index},
                    {"theta", cfg.model.theta},
                    {"beta_prior", cfg.model.beta_prior},
                    {"noise_sd", cfg.model.noise_sd}};
  json ref = json{{"method", cfg.reference.method},
                  {"level", cfg.reference.level},
                  {"quad_nodes", cfg.reference.quad_nodes},
                  {"particles", cfg.reference.particles},
                  {"seeds", cfg.reference.seeds}};
  json smc = json{{"n_stages", cfg.smc.n_stages},
                  {"n_mcmc", cfg.smc.n_mcmc},
                  {"step_size", cfg.smc.step_size},
                  {"resampling", cfg.smc.resampling}};
  return json{{"model", model}, {"reference", ref}, {"smc", smc}};
}

ReferenceValue load_or_compute_reference(const ExperimentConfig& cfg,
                                         const ForwardModel& model,
                                         const std::string& data_label,
                                         const fs::path& out_dir) {
  const json key = reference_cache_key(cfg, data_label);
  const fs::path cache = out_dir / "reference.json";
  if (fs::exists(cache)) {
    try {
      std::ifstream in(cache);
      json j = json::parse(in);
      if (j.at("key") == key) {
        ReferenceValue ref;
        ref.value = j.at("value").get<double>();
        ref.se = j.at("se").get<double>();
        ref.method = j.at("method").get<std::string>();
        ref.detail = j.at("detail").get<std::string>();
        return ref;
      }
    } catch (...) {
      // fall through to recompute
    }
  }
  // Reference randomness is derived from the cache key, not the master seed,
  // so the cache stays valid when experiments change seeds.
  const std::uint64_t ref_seed = fnv1a64(key.dump());
  const ReferenceValue ref =
      compute_reference(model, cfg.reference, cfg.smc.to_smc_config(), ref_seed);
  json out;
  out["key"] = key;
  out["value"] = ref.value;
  out["se"] = ref.se;
  out["method"] = ref.method;
  out["detail"] = ref.detail;
  out["half_delta"] = ref.half_delta;
  out["half_se"] = ref.half_se;
  write_file(cache, out.dump(2) + "\n");
  return ref;
}

double resolve_z_min(const ExperimentConfig& cfg, const ForwardModel& model) {
  if (cfg.z_min.mode == "fixed") return cfg.z_min.value;
  RngStream root(cfg.seed);
  const IncrementEstimate pilot = run_single_level_smc(
      model, model.start_index(), cfg.z_min.pilot_particles,
      cfg.smc.to_smc_config(), root.child({kTagPilot}));
  if (!(pilot.z_hat > 0.0)) return cfg.z_min.value;
  return cfg.z_min.scale * pilot.z_hat;
}

}  // namespace

RunResult run_experiment(ExperimentConfig cfg, const RunOverrides& ov) {
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.out_dir) cfg.output.dir = *ov.out_dir;
  validate_config(cfg, "run");

  const BuiltModel built = build_model(cfg.model);
  const ForwardModel& model = *built.model;
  const fs::path out_dir(cfg.output.dir);
  fs::create_directories(out_dir);

  RunResult result;
  result.reference =
      load_or_compute_reference(cfg, model, built.data_label, out_dir);
  result.z_min = resolve_z_min(cfg, model);

  // Budget mapping, echoed into the summary for auditability.
  const int n_methods = static_cast<int>(cfg.estimators.size());
  const int n_budgets = static_cast<int>(cfg.budgets.size());
  std::vector<std::vector<MethodPlan>> plans(static_cast<std::size_t>(n_methods));
  json plan_echo = json::object();
  for (int m = 0; m < n_methods; ++m) {
    json per_budget = json::object();
    for (int b = 0; b < n_budgets; ++b) {
      plans[static_cast<std::size_t>(m)].push_back(
          plan_method(model, cfg, cfg.estimators[static_cast<std::size_t>(m)],
                      cfg.budgets[static_cast<std::size_t>(b)], result.reference));
      per_budget[format_double(cfg.budgets[static_cast<std::size_t>(b)])] =
          plans[static_cast<std::size_t>(m)].back().echo;
    }
    plan_echo[cfg.estimators[static_cast<std::size_t>(m)].name] = per_budget;
  }

  // Realization farm: every task owns a seed stream derived from
  // (method, budget, realization); results land in per-task slots.
  const int R = cfg.realizations;
  const std::int64_t n_tasks =
      static_cast<std::int64_t>(n_methods) * n_budgets * R;
  result.records.resize(static_cast<std::size_t>(n_tasks));
  RngStream root(cfg.seed);
  parallel_for(n_tasks, [&](std::int64_t t) {
    const int m = static_cast<int>(t / (static_cast<std::int64_t>(n_budgets) * R));
    const int b = static_cast<int>((t / R) % n_budgets);
    const int r = static_cast<int>(t % R);
    const auto& est = cfg.estimators[static_cast<std::size_t>(m)];
    ExperimentRecord rec;
    rec.method = est.name;
    rec.budget = cfg.budgets[static_cast<std::size_t>(b)];
    rec.realization = r;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const EstimateResult e = run_planned(
          model, cfg, est, plans[static_cast<std::size_t>(m)][static_cast<std::size_t>(b)],
          result.z_min,
          root.child({kTagTask, static_cast<std::uint64_t>(m),
                      static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(r)}));
      rec.estimate = e.value;
      rec.squared_error = (e.value - result.reference.value) *
                          (e.value - result.reference.value);
      rec.cost = e.total_cost;
      rec.clamped = e.clamped;
    } catch (const Error& err) {
      rec.failed = true;
      rec.error = err.what();
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.records[static_cast<std::size_t>(t)] = rec;
  });

  // Outputs. records.csv carries only the deterministic columns; wall time
  // lives in timings.csv so reruns are byte-identical.
  {
    std::ostringstream rec_csv, tim_csv;
    csv_row(rec_csv, {"method", "budget", "realization", "estimate",
                      "squared_error", "cost", "clamped"});
    csv_row(tim_csv, {"method", "budget", "realization", "wall_seconds"});
    for (const auto& r : result.records) {
      if (!r.failed) {
        csv_row(rec_csv,
                {r.method, format_double(r.budget), format_long(r.realization),
                 format_double(r.estimate), format_double(r.squared_error),
                 format_double(r.cost), r.clamped ? "true" : "false"});
      }
      csv_row(tim_csv, {r.method, format_double(r.budget),
                        format_long(r.realization), format_double(r.wall_seconds)});
    }
    write_file(out_dir / "records.csv", rec_csv.str());
    write_file(out_dir / "timings.csv", tim_csv.str());
  }

  // Per-method MSE table and slope fits.
  json methods_json = json::object();
  std::vector<PlotSeries> series;
  std::ostringstream mse_csv;
  csv_row(mse_csv, {"method", "budget", "mse", "mean_cost", "ok", "failed"});
  double total_cost = 0.0;
  for (const auto& r : result.records) {
    if (!r.failed) total_cost += r.cost;
    result.n_failed += r.failed ? 1 : 0;
  }
  for (int m = 0; m < n_methods; ++m) {
    const std::string& name = cfg.estimators[static_cast<std::size_t>(m)].name;
    std::vector<MseCostRecord> fit_records;
    PlotSeries s;
    s.label = name;
    json per_budget = json::array();
    for (int b = 0; b < n_budgets; ++b) {
      double mse = 0.0, mean_cost = 0.0;
      int ok = 0, failed = 0;
      for (int r = 0; r < R; ++r) {
        const auto& rec = result.records[static_cast<std::size_t>(
            (static_cast<std::int64_t>(m) * n_budgets + b) * R + r)];
        if (rec.failed) {
          ++failed;
          continue;
        }
        mse += rec.squared_error;
        mean_cost += rec.cost;
        ++ok;
        fit_records.push_back(MseCostRecord{rec.budget, rec.cost, rec.squared_error});
      }
      if (ok > 0) {
        mse /= ok;
        mean_cost /= ok;
        s.points.emplace_back(mean_cost, mse);
      }
      csv_row(mse_csv, {name, format_double(cfg.budgets[static_cast<std::size_t>(b)]),
                        ok ? format_double(mse) : "",
                        ok ? format_double(mean_cost) : "", format_long(ok),
                        format_long(failed)});
      per_budget.push_back(json{{"budget", cfg.budgets[static_cast<std::size_t>(b)]},
                                {"mse", ok ? json(mse) : json()},
                                {"mean_cost", ok ? json(mean_cost) : json()},
                                {"ok", ok},
                                {"failed", failed}});
    }
    json method_json = json{{"per_budget", per_budget}};
    if (n_budgets >= 2) {
      try {
        const RateFit fit = fit_mse_cost(fit_records);
        s.has_fit = true;
        s.fit_slope = fit.slope;
        s.fit_intercept = fit.intercept;
        method_json["mse_fit"] = json{{"slope", fit.slope},
                                      {"intercept", fit.intercept},
                                      {"r_squared", fit.r_squared}};
      } catch (const Error& e) {
        method_json["mse_fit_error"] = e.what();
      }
    }
    methods_json[name] = method_json;
    series.push_back(std::move(s));
  }
  write_file(out_dir / "mse_table.csv", mse_csv.str());
  if (cfg.output.svg)
    write_file(out_dir / "plot.svg",
               render_loglog_svg("MSE vs cost", "cost (abstract units)", "MSE", series));

  // Post-hoc reference quality warning.
  double min_mse = 1e300;
  for (const auto& s : series)
    for (const auto& [c, m] : s.points) {
      (void)c;
      min_mse = std::min(min_mse, m);
    }
  if (result.reference.se > 0.0 && min_mse < 1e300 &&
      result.reference.se > 0.1 * std::sqrt(min_mse)) {
    result.warnings.push_back(
        "reference standard error " + format_double(result.reference.se) +
        " exceeds 10% of the smallest target RMSE " +
        format_double(std::sqrt(min_mse)));
  }
  if (result.reference.seeds > 0 && result.reference.half_se > 0.0 &&
      std::abs(result.reference.half_delta) > 3.0 * result.reference.half_se) {
    result.warnings.push_back("reference disjoint-seed halves disagree beyond 3 SE");
  }

  json summary;
  summary["budgets"] = cfg.budgets;
  summary["realizations"] = R;
  summary["seed"] = cfg.seed;
  summary["data"] = json{{"label", built.data_label},
                         {"synthetic", built.synthetic_data}};
  summary["reference"] = json{{"value", result.reference.value},
                              {"se", result.reference.se},
                              {"method", result.reference.method},
                              {"detail", result.reference.detail}};
  summary["z_min"] = json{{"mode", cfg.z_min.mode}, {"value", result.z_min}};
  summary["plan"] = plan_echo;
  summary["methods"] = methods_json;
  summary["totals"] = json{{"cost", total_cost},
                           {"records", static_cast<long>(n_tasks)},
                           {"failures", result.n_failed}};
  summary["warnings"] = result.warnings;
  write_file(out_dir / "summary.json", summary.dump(2) + "\n");

  if (result.n_failed * 20 > n_tasks)
    throw NumericalError(std::to_string(result.n_failed) + " of " +
                         std::to_string(n_tasks) +
                         " realizations failed (threshold 5%)");
  return result;
}

void run_rates_command(ExperimentConfig cfg, const RunOverrides& ov) {
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.out_dir) cfg.output.dir = *ov.out_dir;
  validate_config(cfg, "rates");

  const BuiltModel built = build_model(cfg.model);
  const ForwardModel& model = *built.model;
  const fs::path out_dir(cfg.output.dir);
  fs::create_directories(out_dir);

  RngStream root(cfg.seed);
  const int dim = model.index_dim();
  std::vector<double> s_by_dir(static_cast<std::size_t>(dim), 0.0);
  std::vector<double> beta_by_dir(static_cast<std::size_t>(dim), 0.0);
  std::vector<bool> have_dir(static_cast<std::size_t>(dim), false);

  std::ostringstream inc_csv;
  csv_row(inc_csv, {"sweep", "direction", "alpha", "level", "mean",
                    "second_moment", "variance", "samples", "replications"});
  json sweeps_json = json::array();
  for (std::size_t i = 0; i < cfg.sweeps.size(); ++i) {
    const auto& sb = cfg.sweeps[i];
    SweepConfig sc;
    sc.direction = sb.direction;
    sc.level_lo = sb.level_lo;
    sc.level_hi = sb.level_hi;
    if (!sb.base.empty()) sc.base = MultiIndex(sb.base);
    sc.replications = sb.replications;
    sc.samples = sb.samples;
    sc.method = sb.method == "smc" ? IncrementRateMethod::Smc
                                   : IncrementRateMethod::PriorMonteCarlo;
    sc.use_qoi = sb.use_qoi;
    sc.smc = cfg.smc.to_smc_config();
    const SweepResult res = estimate_increment_rates(
        model, sc, root.child({40, static_cast<std::uint64_t>(i)}));

    for (const auto& st : res.stats) {
      csv_row(inc_csv,
              {format_long(static_cast<long>(i)), format_long(sb.direction),
               st.alpha.to_string(), format_double(st.level_scalar),
               format_double(st.mean), format_double(st.second_moment),
               format_double(st.variance), format_long(st.n_samples),
               format_long(st.replications)});
    }
    const double s_fit = -res.weak.used.slope;
    const double beta_fit = -res.strong.used.slope;
    sweeps_json.push_back(json{
        {"direction", sb.direction},
        {"s", s_fit},
        {"beta", beta_fit},
        {"weak_fit",
         json{{"slope", res.weak.used.slope},
              {"r_squared", res.weak.used.r_squared},
              {"dropped", res.weak.dropped},
              {"full_slope", res.weak.full.slope}}},
        {"strong_fit",
         json{{"slope", res.strong.used.slope},
              {"r_squared", res.strong.used.r_squared},
              {"dropped", res.strong.dropped},
              {"full_slope", res.strong.full.slope}}}});
    if (sb.direction >= 0) {
      s_by_dir[static_cast<std::size_t>(sb.direction)] = s_fit;
      beta_by_dir[static_cast<std::size_t>(sb.direction)] = beta_fit;
      have_dir[static_cast<std::size_t>(sb.direction)] = true;
    } else {
      // A diagonal sweep informs every direction with the per-direction
      // share of the fitted total.
      for (int d = 0; d < dim; ++d) {
        if (!have_dir[static_cast<std::size_t>(d)]) {
          s_by_dir[static_cast<std::size_t>(d)] = s_fit / dim;
          beta_by_dir[static_cast<std::size_t>(d)] = beta_fit / dim;
        }
      }
    }
  }
  write_file(out_dir / "increments.csv", inc_csv.str());

  std::vector<double> gamma = cfg.model.gamma;
  if (gamma.empty()) gamma = built.model->cost_exponents();
  json rates = json{{"sweeps", sweeps_json},
                    {"s", s_by_dir},
                    {"beta", beta_by_dir},
                    {"gamma", gamma}};
  if (ov.format == "json") {
    write_file(out_dir / "rates.json", rates.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    csv_row(csv, {"direction", "s", "beta", "gamma"});
    for (int d = 0; d < dim; ++d)
      csv_row(csv, {format_long(d), format_double(s_by_dir[static_cast<std::size_t>(d)]),
                    format_double(beta_by_dir[static_cast<std::size_t>(d)]),
                    format_double(gamma[static_cast<std::size_t>(d)])});
    write_file(out_dir / "rates.csv", csv.str());
    write_file(out_dir / "rates.json", rates.dump(2) + "\n");
  }
}

void run_reference_command(ExperimentConfig cfg, const RunOverrides& ov) {
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.out_dir) cfg.output.dir = *ov.out_dir;
  validate_config(cfg, "reference");
  const BuiltModel built = build_model(cfg.model);
  const fs::path out_dir(cfg.output.dir);
  fs::create_directories(out_dir);
  const ReferenceValue ref =
      load_or_compute_reference(cfg, *built.model, built.data_label, out_dir);
  if (ov.format == "csv") {
    std::ostringstream csv;
    csv_row(csv, {"value", "se", "method", "detail"});
    csv_row(csv, {format_double(ref.value), format_double(ref.se), ref.method,
                  ref.detail});
    write_file(out_dir / "reference.csv", csv.str());
  }
}

void run_simulate_data(ExperimentConfig cfg, const RunOverrides& ov) {
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.out_dir) cfg.output.dir = *ov.out_dir;
  validate_config(cfg, "simulate-data");
  const BuiltModel built = build_model(cfg.model);
  const fs::path out_dir(cfg.output.dir);
  fs::create_directories(out_dir);

  if (const auto* toy = dynamic_cast<const Toy1dModel*>(built.model.get())) {
    json j = json{{"family", "toy1d"},
                  {"values", toy->config().data},
                  {"obs_points", toy->config().obs_points},
                  {"synthetic", built.synthetic_data},
                  {"label", built.data_label}};
    write_file(out_dir / "data.json", j.dump(2) + "\n");
    return;
  }
  if (const auto* pde = dynamic_cast<const Elliptic2dModel*>(built.model.get())) {
    json j = json{{"family", "elliptic2d"},
                  {"values", pde->config().data},
                  {"synthetic", built.synthetic_data},
                  {"label", built.data_label}};
    write_file(out_dir / "data.json", j.dump(2) + "\n");
    return;
  }
  const auto* pp = dynamic_cast<const PointProcessModel*>(built.model.get());
  if (pp == nullptr) throw Error("unknown model type for simulate-data");
  write_point_csv((out_dir / "points.csv").string(), pp->config().points);
  json j = json{{"family", pp->name()},
                {"n_points", pp->config().points.size()},
                {"synthetic", built.synthetic_data},
                {"label", built.data_label}};
  write_file(out_dir / "data_meta.json", j.dump(2) + "\n");
}

}  // namespace mismc
