#include "roughman/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace roughman {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Table::to_csv() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

StateLayout plain_layout(int m) {
  StateLayout l;
  for (int i = 0; i < m; ++i) l.columns.push_back("x_" + std::to_string(i + 1));
  l.values = [](const Vec<double>& s) { return std::vector<double>(s.data(), s.data() + s.size()); };
  return l;
}

StateLayout frame_layout(const FrameBundle& bundle) {
  StateLayout l;
  const int m = bundle.base_dim();
  const int d = bundle.model_dim();
  for (int i = 0; i < m; ++i) l.columns.push_back("x_" + std::to_string(i + 1));
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < m; ++i) l.columns.push_back("e" + std::to_string(j + 1) + "_" + std::to_string(i + 1));
  l.values = [&bundle, m, d](const Vec<double>& s) {
    FrameBundlePoint p = bundle.unpack(s);
    std::vector<double> out(p.x.data(), p.x.data() + m);
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < m; ++i) out.push_back(p.frame(i, j));
    return out;
  };
  return l;
}

Table trajectory_table(const RDEPath& path, const StateLayout& layout) {
  Table t;
  t.header.push_back("t");
  t.header.insert(t.header.end(), layout.columns.begin(), layout.columns.end());
  t.header.push_back("flags");
  for (std::size_t k = 0; k < path.size(); ++k) {
    std::vector<std::string> row{format_double(path.times[k])};
    for (double v : layout.values(path.points[k])) row.push_back(format_double(v));
    row.push_back(path.blow_up && k + 1 == path.size() ? "1" : "0");
    t.rows.push_back(std::move(row));
  }
  return t;
}

nlohmann::json trajectory_json(const RDEPath& path, const StateLayout& layout) {
  nlohmann::json cols = nlohmann::json::array({"t"});
  for (const auto& c : layout.columns) cols.push_back(c);
  cols.push_back("flags");
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < path.size(); ++k) {
    nlohmann::json row = nlohmann::json::array({path.times[k]});
    for (double v : layout.values(path.points[k])) row.push_back(v);
    row.push_back(path.blow_up && k + 1 == path.size() ? 1 : 0);
    rows.push_back(std::move(row));
  }
  return {{"columns", cols}, {"rows", rows}, {"metadata", path_metadata(path)}};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    if (x[i] > 0 && y[i] > 0 && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  const std::size_t n = lx.size();
  if (n < 2) return std::nan("");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : std::nan("");
}

Table sweep_table(const std::string& parameter, const std::vector<double>& values, const std::vector<double>& errors,
                  double slope) {
  Table t{{"parameter", "value", "error"}, {}};
  for (std::size_t i = 0; i < values.size(); ++i)
    t.rows.push_back({parameter, format_double(values[i]), format_double(errors[i])});
  t.rows.push_back({"fitted_slope", "", values.size() < 2 || std::isnan(slope) ? "n/a" : format_double(slope)});
  return t;
}

Table representation_frames(const CanonicalRepresentation& rep, const FrameBundle& bundle) {
  return trajectory_table(rep.frames.path(), frame_layout(bundle));
}

}  // namespace roughman
