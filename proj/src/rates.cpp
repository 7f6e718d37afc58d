#include "mismc/rates.hpp"

#include <cmath>
#include <map>

#include "mismc/errors.hpp"
#include "mismc/parallel.hpp"

namespace mismc {

namespace {

RateFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("rate fit: abscissae are collinear");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = (syy > 1e-300) ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
  fit.n_points = static_cast<int>(n);
  return fit;
}

}  // namespace

RateFit fit_rate(const std::vector<RatePoint>& points) {
  if (points.size() < 3) throw DomainError("fit_rate: need at least 3 points");
  std::vector<double> x, y;
  x.reserve(points.size());
  y.reserve(points.size());
  for (const auto& p : points) {
    if (!(p.value > 0.0))
      throw DomainError("fit_rate: values must be strictly positive");
    x.push_back(p.level);
    y.push_back(std::log2(p.value));
  }
  return ols(x, y);
}

TrimmedRateFit fit_rate_trimmed(const std::vector<RatePoint>& points) {
  TrimmedRateFit out;
  out.full = fit_rate(points);
  out.used = out.full;
  std::vector<RatePoint> pts = points;
  while (out.used.r_squared < 0.9 && pts.size() > 3) {
    pts.erase(pts.begin());
    ++out.dropped;
    out.used = fit_rate(pts);
  }
  return out;
}

RateFit fit_mse_cost(const std::vector<MseCostRecord>& records) {
  std::map<double, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : records) {
    groups[r.target_cost].first.push_back(r.squared_error);
    groups[r.target_cost].second.push_back(r.cost);
  }
  if (groups.size() < 2)
    throw DomainError("fit_mse_cost: need at least 2 budget levels");
  std::vector<double> x, y;
  for (const auto& [budget, data] : groups) {
    (void)budget;
    double mse = 0.0, mean_cost = 0.0;
    for (double se : data.first) mse += se;
    for (double c : data.second) mean_cost += c;
    mse /= static_cast<double>(data.first.size());
    mean_cost /= static_cast<double>(data.second.size());
    if (!(mse > 0.0) || !(mean_cost > 0.0))
      throw DomainError("fit_mse_cost: nonpositive MSE or cost");
    x.push_back(std::log2(mean_cost));
    y.push_back(std::log2(mse));
  }
  return ols(x, y);
}

std::vector<ExpansionTerm> mixed_difference_terms(const ForwardModel& model,
                                                  const MultiIndex& alpha_phys) {
  const MultiIndex floor = model.min_index();
  std::vector<ExpansionTerm> terms;
  const int d = alpha_phys.dim();
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << d); ++mask) {
    std::vector<int> comps = alpha_phys.components();
    int bits = 0;
    for (int b = 0; b < d; ++b) {
      if (mask & (std::uint32_t{1} << b)) {
        comps[static_cast<std::size_t>(b)] -= 1;
        ++bits;
      }
    }
    for (int b = 0; b < d; ++b) {
      if (comps[static_cast<std::size_t>(b)] < floor[b])
        throw DomainError("mixed difference at " + alpha_phys.to_string() +
                          " reaches below the model's minimum level");
    }
    terms.push_back(ExpansionTerm{MultiIndex(std::move(comps)),
                                  (bits % 2 == 0) ? 1 : -1});
  }
  return terms;
}

SweepResult estimate_increment_rates(const ForwardModel& model,
                                     const SweepConfig& cfg, RngStream rng) {
  if (cfg.level_hi - cfg.level_lo + 1 < 3)
    throw DomainError("increment-rate sweep needs at least 3 consecutive levels");
  if (cfg.replications < 1 || cfg.samples < 2)
    throw DomainError("increment-rate sweep needs replications >= 1, samples >= 2");
  const int d = model.index_dim();
  MultiIndex base = cfg.base.dim() == d ? cfg.base : model.start_index();
  if (cfg.direction >= d) throw DomainError("sweep direction out of range");

  std::vector<MultiIndex> indices;
  for (int l = cfg.level_lo; l <= cfg.level_hi; ++l) {
    std::vector<int> comps = base.components();
    if (cfg.direction < 0) {
      for (int i = 0; i < d; ++i) comps[static_cast<std::size_t>(i)] = l;
    } else {
      comps[static_cast<std::size_t>(cfg.direction)] = l;
    }
    indices.push_back(MultiIndex(std::move(comps)));
  }

  SweepResult out;
  out.stats.resize(indices.size());

  parallel_for(static_cast<std::int64_t>(indices.size()), [&](std::int64_t ii) {
    const MultiIndex& alpha = indices[static_cast<std::size_t>(ii)];
    IncrementStatistics st;
    st.alpha = alpha;
    st.level_scalar = cfg.direction < 0 ? alpha[0] : alpha[cfg.direction];
    st.replications = cfg.replications;

    double sum = 0.0, sum_sq = 0.0;
    long count = 0;
    if (cfg.method == IncrementRateMethod::PriorMonteCarlo) {
      const auto terms = mixed_difference_terms(model, alpha);
      for (int r = 0; r < cfg.replications; ++r) {
        RngStream rep_rng = rng.child(
            {static_cast<std::uint64_t>(ii), static_cast<std::uint64_t>(r)});
        for (int m = 0; m < cfg.samples; ++m) {
          const State x = model.sample_prior(alpha, rep_rng);
          double delta = 0.0;
          for (const auto& t : terms) {
            const Evaluation e = model.evaluate(t.index, x);
            delta += t.sign * std::exp(e.log_lik) * (cfg.use_qoi ? e.qoi : 1.0);
          }
          sum += delta;
          sum_sq += delta * delta;
          ++count;
        }
      }
    } else {
      // Difference in every direction, expressed relative to the start
      // level; requires base >= start + 1 in the swept directions.
      std::vector<int> rel(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) {
        rel[static_cast<std::size_t>(i)] = alpha[i] - model.start_index()[i];
        if (rel[static_cast<std::size_t>(i)] < 0)
          throw DomainError("SMC sweep index below the model start level");
      }
      for (int r = 0; r < cfg.replications; ++r) {
        RngStream rep_rng = rng.child(
            {static_cast<std::uint64_t>(ii), static_cast<std::uint64_t>(r)});
        const IncrementEstimate inc = run_increment_smc(
            model, MultiIndex(rel), cfg.samples, cfg.smc, rep_rng);
        const double v = cfg.use_qoi ? inc.f_phi : inc.f_one;
        sum += v;
        sum_sq += v * v;
        ++count;
      }
    }
    st.n_samples = count;
    st.mean = sum / static_cast<double>(count);
    st.second_moment = sum_sq / static_cast<double>(count);
    st.variance = std::max(0.0, st.second_moment - st.mean * st.mean);
    if (cfg.method == IncrementRateMethod::Smc) {
      // Theorem-style scaling: N * var(F^N) tracks the increment variance.
      st.second_moment = st.variance * static_cast<double>(cfg.samples);
    }
    out.stats[static_cast<std::size_t>(ii)] = st;
  });

  std::vector<RatePoint> weak_pts, strong_pts;
  for (const auto& st : out.stats) {
    weak_pts.push_back(RatePoint{st.level_scalar, std::abs(st.mean)});
    strong_pts.push_back(RatePoint{st.level_scalar, st.second_moment});
  }
  out.weak = fit_rate_trimmed(weak_pts);
  out.strong = fit_rate_trimmed(strong_pts);
  return out;
}

}  // namespace mismc
