// Serial vs OpenMP timings for the batched kernels and sweep rows.
//   bench_kernels [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>

#include "roughman/kernels.hpp"
#include "roughman/scenarios.hpp"

using namespace roughman;

namespace {

double best_of(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

template <class Serial, class Parallel>
void row(const char* name, int repeats, Serial serial, Parallel parallel) {
  double ts = best_of(repeats, serial);
  double tp = best_of(repeats, parallel);
  std::printf("%-22s serial %9.4f s   parallel %9.4f s   speedup %5.2f\n", name, ts, tp, ts / tp);
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
  std::printf("threads %d\n", kernel_threads());

  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto X = lift_spinning_signal(16, 1 << 12, 2.5);
  std::vector<std::array<double, 3>> triples(20000);
  for (auto& t : triples) {
    double a = u(rng), b = u(rng), c = u(rng);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    t = {a, b, c};
  }
  std::vector<std::array<double, 2>> pairs;
  for (const auto& t : triples) pairs.push_back({t[0], t[2]});

  row("chen_defects", repeats, [&] { chen_defects(*X, triples, Exec::Serial); },
      [&] { chen_defects(*X, triples, Exec::Parallel); });
  row("lie_defects", repeats, [&] { lie_defects(*X, pairs, Exec::Serial); },
      [&] { lie_defects(*X, pairs, Exec::Parallel); });
  row("window_norms", repeats, [&] { window_norms(*X, pairs, Exec::Serial); },
      [&] { window_norms(*X, pairs, Exec::Parallel); });

  std::vector<std::vector<std::vector<double>>> paths(2000);
  std::normal_distribution<double> g(0.0, 0.1);
  for (auto& p : paths) {
    std::vector<double> x(3, 0.0);
    for (int k = 0; k < 200; ++k) {
      for (auto& c : x) c += g(rng);
      p.push_back(x);
    }
  }
  row("batch_signatures", repeats, [&] { batch_signatures(paths, 4, Exec::Serial); },
      [&] { batch_signatures(paths, 4, Exec::Parallel); });

  nlohmann::json sweep = {{"scenario", "sphere_horizontal_lift"},
                          {"substeps", 1},
                          {"sweep", {{"parameter", "mesh"}, {"values", {8, 9, 10, 11, 12}}}}};
  row("mesh_sweep_rows", 1, [&] { convergence_sweep(sweep, {}, Exec::Serial); },
      [&] { convergence_sweep(sweep, {}, Exec::Parallel); });
  return 0;
}
