#pragma once

// Plain-text outputs: trajectory CSV/JSON, sweep tables, and the frame-path
// plus Z-increment serialization of a canonical representation.

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "roughman/cartan.hpp"

namespace roughman {

/// printf("%.17g"); "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

/// How a state vector maps to CSV columns.
struct StateLayout {
  std::vector<std::string> columns;
  std::function<std::vector<double>(const Vec<double>&)> values;
};

/// x_1..x_m.
StateLayout plain_layout(int m);
/// Base x_1..x_m, then frame columns e<j>_<i> (component i of e(ε_j)).
StateLayout frame_layout(const FrameBundle& bundle);

/// Header t, <layout columns>, flags. flags is 1 on the last sample of a
/// path that blew up and 0 elsewhere.
Table trajectory_table(const RDEPath& path, const StateLayout& layout);

/// {"columns": [...], "rows": [[...]], "metadata": path_metadata(path)}.
nlohmann::json trajectory_json(const RDEPath& path, const StateLayout& layout);

/// Least-squares slope of log y against log x; NaN with fewer than two
/// usable (positive) points.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// parameter,value,error rows and a closing fitted_slope row ("n/a" when
/// there is a single row).
Table sweep_table(const std::string& parameter, const std::vector<double>& values, const std::vector<double>& errors,
                  double slope);

/// Frame path over the global mesh with frame_layout columns.
Table representation_frames(const CanonicalRepresentation& rep, const FrameBundle& bundle);

}  // namespace roughman
