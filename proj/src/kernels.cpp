#include "roughman/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>

namespace roughman {

namespace {

// Runs body(i) for i in [0, n), either serially or on the OpenMP team.
// Exceptions raised inside the team are rethrown on the calling thread.
template <class Body>
void for_each_index(std::size_t n, Exec exec, Body body) {
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(roughman_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<double> chen_defects(const RoughPathDriver& X, const std::vector<std::array<double, 3>>& triples,
                                 Exec exec) {
  std::vector<double> out(triples.size());
  for_each_index(triples.size(), exec, [&](std::size_t i) {
    const auto [s, u, t] = triples[i];
    out[i] = max_abs_diff(X.eval(s, t), tensor_mul(X.eval(s, u), X.eval(u, t)));
  });
  return out;
}

std::vector<double> lie_defects(const RoughPathDriver& X, const std::vector<std::array<double, 2>>& pairs,
                                Exec exec) {
  std::vector<double> out(pairs.size());
  for_each_index(pairs.size(), exec, [&](std::size_t i) {
    out[i] = check_lie(X.eval(pairs[i][0], pairs[i][1])).max_abs();
  });
  return out;
}

std::vector<double> window_norms(const RoughPathDriver& X, const std::vector<std::array<double, 2>>& windows,
                                 Exec exec) {
  const int n = X.level();
  std::vector<double> out(windows.size() * static_cast<std::size_t>(n));
  for_each_index(windows.size(), exec, [&](std::size_t i) {
    const TruncatedTensor g = X.eval(windows[i][0], windows[i][1]);
    for (int k = 1; k <= n; ++k) out[i * n + (k - 1)] = degree_norm(g, k);
  });
  return out;
}

std::vector<TruncatedTensor> batch_signatures(const std::vector<std::vector<std::vector<double>>>& paths,
                                              int level, Exec exec) {
  std::vector<TruncatedTensor> out(paths.size());
  for_each_index(paths.size(), exec,
                 [&](std::size_t i) { out[i] = signature_piecewise_linear(paths[i], level); });
  return out;
}

int kernel_threads() { return omp_get_max_threads(); }

}  // namespace roughman
