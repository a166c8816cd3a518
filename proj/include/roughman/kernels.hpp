#pragma once

// Batched kernels with an OpenMP implementation and a serial reference.
// Both produce identical results element by element; tests compare them.

#include <array>
#include <vector>

#include "roughman/roughpath.hpp"

namespace roughman {

enum class Exec { Serial, Parallel };

/// |X_{s,t} − X_{s,u} ⊗ X_{u,t}|_∞ for each (s, u, t).
std::vector<double> chen_defects(const RoughPathDriver& X, const std::vector<std::array<double, 3>>& triples,
                                 Exec exec = Exec::Parallel);

/// Absolute Dynkin defect of log X_{s,t} for each (s, t).
std::vector<double> lie_defects(const RoughPathDriver& X, const std::vector<std::array<double, 2>>& pairs,
                                Exec exec = Exec::Parallel);

/// Per-window degree norms |X^k_{a_i, b_i}| for k = 1..level, row-major by window.
std::vector<double> window_norms(const RoughPathDriver& X, const std::vector<std::array<double, 2>>& windows,
                                 Exec exec = Exec::Parallel);

/// Signatures of many polygonal paths.
std::vector<TruncatedTensor> batch_signatures(const std::vector<std::vector<std::vector<double>>>& paths,
                                              int level, Exec exec = Exec::Parallel);

/// Number of threads the parallel kernels will use.
int kernel_threads();

}  // namespace roughman
