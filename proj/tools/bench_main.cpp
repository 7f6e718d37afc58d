// Compares the OpenMP execution of the estimator kernels against the serial
// reference configuration (threads = 1) on representative workloads, and
// verifies the outputs are bit-identical.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "mismc/allocation.hpp"
#include "mismc/estimators.hpp"
#include "mismc/models/elliptic2d.hpp"
#include "mismc/models/point_process.hpp"
#include "mismc/models/toy1d.hpp"
#include "mismc/parallel.hpp"
#include "mismc/rates.hpp"
#include "mismc/rng.hpp"

namespace {

using namespace mismc;

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct WorkloadResult {
  double value = 0.0;
  double cost = 0.0;
};

template <typename F>
void run_workload(const char* name, F&& workload, bool& all_equal) {
  set_threads(1);
  const double t0 = now_seconds();
  const WorkloadResult serial = workload();
  const double t1 = now_seconds();

  const int threads = built_with_openmp() ? std::max(2, max_threads()) : 1;
  set_threads(threads);
  const double t2 = now_seconds();
  const WorkloadResult parallel = workload();
  const double t3 = now_seconds();
  set_threads(1);

  const bool equal = std::memcmp(&serial.value, &parallel.value, sizeof(double)) == 0 &&
                     std::memcmp(&serial.cost, &parallel.cost, sizeof(double)) == 0;
  all_equal = all_equal && equal;
  std::printf("%-32s serial %8.3fs  threads=%d %8.3fs  speedup %5.2fx  bitwise %s\n",
              name, t1 - t0, threads, t3 - t2,
              (t3 - t2) > 0 ? (t1 - t0) / (t3 - t2) : 0.0,
              equal ? "equal" : "DIFFER");
}

Toy1dModel make_toy() {
  Toy1dConfig cfg;
  RngStream rng(9001);
  cfg.data = Toy1dModel::synthesize_data(0.4, cfg.noise_sd, cfg.obs_points, rng);
  return Toy1dModel(std::move(cfg));
}

Elliptic2dModel make_pde() {
  Elliptic2dConfig cfg;
  RngStream rng(9002);
  cfg.data = Elliptic2dModel::synthesize_data(cfg, MultiIndex{6, 6}, {0.3, -0.5}, rng);
  return Elliptic2dModel(std::move(cfg));
}

PointProcessModel make_lgc() {
  PointProcessConfig cfg;
  cfg.prior.theta1 = 4.8;
  cfg.prior.beta_smoothness = 1.6;
  cfg.prior.theta3 = 110.0;
  RngStream rng(9003);
  cfg.points = simulate_cox_points(SpectralField(cfg.prior), MultiIndex{6, 6}, rng);
  cfg.synthetic_data = true;
  return PointProcessModel(std::move(cfg));
}

}  // namespace

int main() {
  std::printf("hardware threads: %d, OpenMP: %s\n", max_threads(),
              built_with_openmp() ? "on" : "off");
  bool all_equal = true;

  const Toy1dModel toy = make_toy();
  run_workload("toy1d rmismc (N=32768)", [&]() {
    EstimatorParams params;
    params.z_min = 1e-12;
    const AllocationDistribution dist({{4.0, 1.0}}, toy.start_index());
    const EstimateResult est =
        rmismc_estimate(toy, dist, 32768, 64, params, RngStream(11));
    return WorkloadResult{est.value, est.total_cost};
  }, all_equal);

  const Elliptic2dModel pde = make_pde();
  run_workload("elliptic2d increment (N=1024)", [&]() {
    const IncrementEstimate inc =
        run_increment_smc(pde, MultiIndex{1, 1}, 1024, SmcConfig{}, RngStream(12));
    return WorkloadResult{inc.f_phi, inc.cost};
  }, all_equal);

  const PointProcessModel lgc = make_lgc();
  run_workload("lgc increment (N=128, level 6)", [&]() {
    SmcConfig cfg;
    cfg.mutation.step_size = 0.3;
    const IncrementEstimate inc =
        run_increment_smc(lgc, MultiIndex{1, 1}, 128, cfg, RngStream(13));
    return WorkloadResult{inc.f_phi, inc.cost};
  }, all_equal);

  run_workload("pde prior-MC variance sweep", [&]() {
    SweepConfig sc;
    sc.direction = 0;
    sc.level_lo = 3;
    sc.level_hi = 5;
    sc.replications = 4;
    sc.samples = 64;
    const SweepResult res = estimate_increment_rates(pde, sc, RngStream(14));
    return WorkloadResult{res.strong.used.slope,
                          static_cast<double>(res.stats.size())};
  }, all_equal);

  std::printf("%s\n", all_equal ? "all workloads bitwise equal across thread counts"
                                : "MISMATCH between serial and parallel results");
  return all_equal ? 0 : 1;
}
