#include "roughman/roughpath.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "roughman/kernels.hpp"

namespace roughman {

int RoughPathDriver::level() const { return static_cast<int>(std::floor(p())); }

void RoughPathDriver::check_times(double s, double t) const {
  if (!(0.0 <= s && s <= t && t <= horizon())) {
    std::ostringstream os;
    os << kind() << ": times (" << s << ", " << t << ") outside 0 <= s <= t <= " << horizon();
    throw ContractViolation(os.str());
  }
}

// ------------------------------------------------ PiecewiseLogLinearDriver

PiecewiseLogLinearDriver::PiecewiseLogLinearDriver(std::vector<double> times, std::vector<TruncatedTensor> logs,
                                                   double p, std::string kind)
    : times_(std::move(times)), logs_(std::move(logs)), p_(p), kind_(std::move(kind)) {
  require(times_.size() >= 2, kind_ + ": needs at least two sample times");
  require(logs_.size() + 1 == times_.size(), kind_ + ": need one log increment per segment");
  require(times_.front() == 0.0, kind_ + ": sample times must start at 0");
  for (std::size_t i = 1; i < times_.size(); ++i)
    require(times_[i] > times_[i - 1], kind_ + ": sample times must be strictly increasing");
  require(p >= 1.0, kind_ + ": p must be at least 1");
  dim_ = logs_.front().dim();
  level_ = logs_.front().level();
  for (const auto& l : logs_) {
    require(l.dim() == dim_ && l.level() == level_, kind_ + ": increments have mixed shapes");
    require(l.scalar() == 0.0, kind_ + ": log increments need zero scalar part");
  }
  leaves_ = logs_.size();
  tree_.assign(2 * leaves_, TruncatedTensor::unit(dim_, level_));
  for (std::size_t i = 0; i < leaves_; ++i) tree_[leaves_ + i] = tensor_exp(logs_[i]);
  for (std::size_t i = leaves_ - 1; i >= 1; --i) tree_[i] = tensor_mul(tree_[2 * i], tree_[2 * i + 1]);
}

std::size_t PiecewiseLogLinearDriver::segment_of(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - times_.begin());
  i = i == 0 ? 0 : i - 1;
  return std::min(i, logs_.size() - 1);
}

TruncatedTensor PiecewiseLogLinearDriver::partial(std::size_t i, double a, double b) const {
  const double h = times_[i + 1] - times_[i];
  if (a == times_[i] && b == times_[i + 1]) return tree_[leaves_ + i];
  TruncatedTensor l = logs_[i];
  l *= (b - a) / h;
  return tensor_exp(l);
}

TruncatedTensor PiecewiseLogLinearDriver::range_product(std::size_t i, std::size_t j) const {
  TruncatedTensor left = TruncatedTensor::unit(dim_, level_);
  TruncatedTensor right = TruncatedTensor::unit(dim_, level_);
  bool any_left = false;
  bool any_right = false;
  for (std::size_t l = i + leaves_, r = j + leaves_; l < r; l >>= 1, r >>= 1) {
    if (l & 1) {
      left = any_left ? tensor_mul(left, tree_[l]) : tree_[l];
      any_left = true;
      ++l;
    }
    if (r & 1) {
      --r;
      right = any_right ? tensor_mul(tree_[r], right) : tree_[r];
      any_right = true;
    }
  }
  if (!any_left) return right;
  if (!any_right) return left;
  return tensor_mul(left, right);
}

TruncatedTensor PiecewiseLogLinearDriver::eval(double s, double t) const {
  check_times(s, t);
  if (s == t) return TruncatedTensor::unit(dim_, level_);
  const std::size_t i = segment_of(s);
  std::size_t j = segment_of(t);
  if (j > i && t == times_[j]) --j;  // t on a knot: last full segment is j-1
  if (i == j) return partial(i, s, t);
  TruncatedTensor out = partial(i, s, times_[i + 1]);
  if (j > i + 1) out = tensor_mul(out, range_product(i + 1, j));
  return tensor_mul(out, partial(j, times_[j], t));
}

DriverPtr lift_smooth_path(const std::vector<double>& times, const std::vector<std::vector<double>>& values,
                           double p) {
  require(times.size() >= 2, "lift_smooth_path: needs at least two samples");
  require(times.size() == values.size(), "lift_smooth_path: times and values differ in length");
  require(p >= 2.0, "lift_smooth_path: p must be at least 2");
  for (std::size_t i = 1; i < times.size(); ++i)
    require(times[i] > times[i - 1], "lift_smooth_path: sample times must be strictly increasing");
  const int level = static_cast<int>(std::floor(p));
  const std::size_t d = values.front().size();
  require(d >= 1, "lift_smooth_path: empty sample vectors");
  std::vector<double> shifted(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) shifted[i] = times[i] - times.front();
  std::vector<TruncatedTensor> logs;
  logs.reserve(times.size() - 1);
  std::vector<double> inc(d);
  for (std::size_t i = 1; i < values.size(); ++i) {
    require(values[i].size() == d, "lift_smooth_path: samples have mixed dimensions");
    for (std::size_t k = 0; k < d; ++k) inc[k] = values[i][k] - values[i - 1][k];
    logs.push_back(TruncatedTensor::from_vector(inc, level));
  }
  return std::make_shared<PiecewiseLogLinearDriver>(std::move(shifted), std::move(logs), p, "lift_smooth");
}

std::vector<double> uniform_grid(double a, double b, int n) {
  require(n >= 1 && b > a, "uniform_grid: need n >= 1 and b > a");
  std::vector<double> g(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) g[i] = a + (b - a) * i / n;
  g.back() = b;
  return g;
}

DriverPtr lift_function(const std::function<std::vector<double>(double)>& f, double horizon, int samples,
                        double p) {
  require(samples >= 2, "lift_function: needs at least two samples");
  const auto times = uniform_grid(0.0, horizon, samples - 1);
  std::vector<std::vector<double>> values;
  values.reserve(times.size());
  for (double t : times) values.push_back(f(t));
  return lift_smooth_path(times, values, p);
}

std::vector<double> spinning_signal(int n, double t) {
  const double n2 = static_cast<double>(n) * n;
  return {std::cos(n2 * t) / n, std::sin(n2 * t) / n};
}

DriverPtr lift_spinning_signal(int n, int samples, double p, double horizon) {
  require(n >= 1, "lift_spinning_signal: n must be positive");
  return lift_function([n](double t) { return spinning_signal(n, t); }, horizon, samples, p);
}

// ------------------------------------------------------- exact drivers

namespace {

void require_antisymmetric(const std::vector<std::vector<double>>& A, std::size_t d, const char* who) {
  require(A.size() == d, std::string(who) + ": A must be " + std::to_string(d) + "x" + std::to_string(d));
  for (const auto& row : A) require(row.size() == d, std::string(who) + ": A must be square");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      require(std::abs(A[i][j] + A[j][i]) <= 1e-14, std::string(who) + ": A is not antisymmetric");
}

void require_horizon(double T, const char* who) {
  require(T > 0.0 && std::isfinite(T), std::string(who) + ": horizon must be positive and finite");
}

}  // namespace

PureAreaDriver::PureAreaDriver(std::vector<std::vector<double>> A, double p, double horizon)
    : A_(std::move(A)), p_(p), T_(horizon) {
  require(!A_.empty(), "pure_area: A is empty");
  require_antisymmetric(A_, A_.size(), "pure_area");
  require(p > 2.0 && p < 3.0, "pure_area: p must lie in (2,3)");
  require_horizon(horizon, "pure_area");
}

TruncatedTensor PureAreaDriver::eval(double s, double t) const {
  check_times(s, t);
  const int d = dim();
  TruncatedTensor g = TruncatedTensor::unit(d, 2);
  auto l2 = g.degree(2);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) l2[i * d + j] = (t - s) * A_[i][j];
  return g;
}

SpinningLineDriver::SpinningLineDriver(std::vector<double> e, std::vector<std::vector<double>> A, double p,
                                       double horizon)
    : e_(std::move(e)), A_(std::move(A)), p_(p), T_(horizon) {
  require(!e_.empty(), "spinning_line: e is empty");
  require_antisymmetric(A_, e_.size(), "spinning_line");
  require(p > 2.0 && p < 3.0, "spinning_line: p must lie in (2,3)");
  require_horizon(horizon, "spinning_line");
}

TruncatedTensor SpinningLineDriver::eval(double s, double t) const {
  check_times(s, t);
  const int d = dim();
  const double h = t - s;
  TruncatedTensor g = TruncatedTensor::unit(d, 2);
  auto l1 = g.degree(1);
  auto l2 = g.degree(2);
  for (int i = 0; i < d; ++i) {
    l1[i] = h * e_[i];
    for (int j = 0; j < d; ++j) l2[i * d + j] = 0.5 * h * h * e_[i] * e_[j] + h * A_[i][j];
  }
  return g;
}

LogLinearDriver::LogLinearDriver(const LieElement& lambda, double p, double horizon) : p_(p), T_(horizon) {
  require(p >= 1.0, "log_linear: p must be at least 1");
  require_horizon(horizon, "log_linear");
  const int n = static_cast<int>(std::floor(p));
  if (lambda.top_degree() > n) {
    std::ostringstream os;
    os << "log_linear: Lie element has degree " << lambda.top_degree() << " > [p] = " << n;
    throw ContractViolation(os.str());
  }
  lambda_ = lambda.tensor().with_level(n);
}

TruncatedTensor LogLinearDriver::eval(double s, double t) const {
  check_times(s, t);
  TruncatedTensor l = lambda_;
  l *= (t - s);
  return tensor_exp(l);
}

DriverPtr pure_area(const std::vector<std::vector<double>>& A, double p, double horizon) {
  return std::make_shared<PureAreaDriver>(A, p, horizon);
}

DriverPtr spinning_line(const std::vector<double>& e, const std::vector<std::vector<double>>& A, double p,
                        double horizon) {
  return std::make_shared<SpinningLineDriver>(e, A, p, horizon);
}

DriverPtr log_linear(const LieElement& lambda, double p, double horizon) {
  return std::make_shared<LogLinearDriver>(lambda, p, horizon);
}

// ------------------------------------------------------- validate_driver

DriverReport validate_driver(const RoughPathDriver& X, const std::vector<double>& grid,
                             const ValidateOptions& opts) {
  require(grid.size() >= 2, "validate_driver: grid needs at least two points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1], "validate_driver: grid must be strictly increasing");
  require(grid.front() >= 0.0 && grid.back() <= X.horizon(), "validate_driver: grid outside [0, horizon]");

  DriverReport rep;
  const int n = X.level();
  rep.holder_constant.assign(static_cast<std::size_t>(n) + 1, 0.0);
  rep.holder_exponent.assign(static_cast<std::size_t>(n) + 1, 0.0);

  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  std::vector<std::array<double, 3>> triples(static_cast<std::size_t>(opts.triples));
  for (auto& tr : triples) {
    std::array<std::size_t, 3> idx{pick(rng), pick(rng), pick(rng)};
    std::sort(idx.begin(), idx.end());
    tr = {grid[idx[0]], grid[idx[1]], grid[idx[2]]};
  }
  rep.triples = opts.triples;
  for (double d : chen_defects(X, triples)) rep.chen_defect = std::max(rep.chen_defect, d);

  std::vector<std::array<double, 2>> pairs;
  pairs.reserve(triples.size());
  for (const auto& tr : triples) pairs.push_back({tr[0], tr[2]});
  for (double d : lie_defects(X, pairs)) rep.lie_defect = std::max(rep.lie_defect, d);

  for (double s : {grid.front(), grid[grid.size() / 2], grid.back()})
    rep.identity_defect =
        std::max(rep.identity_defect, max_abs_diff(X.eval(s, s), TruncatedTensor::unit(X.dim(), n)));

  // Dyadic windows of 2^j consecutive grid cells.
  std::vector<double> log_len;
  std::vector<std::vector<double>> log_norm(static_cast<std::size_t>(n) + 1);
  for (std::size_t w = 1; w < grid.size(); w *= 2) {
    std::vector<std::array<double, 2>> windows;
    for (std::size_t i = 0; i + w < grid.size(); i += w) windows.push_back({grid[i], grid[i + w]});
    const auto norms = window_norms(X, windows);
    std::vector<double> scale_max(static_cast<std::size_t>(n) + 1, 0.0);
    double mean_len = 0.0;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const double len = windows[i][1] - windows[i][0];
      mean_len += len / windows.size();
      for (int k = 1; k <= n; ++k) {
        const double v = norms[i * n + (k - 1)];
        scale_max[k] = std::max(scale_max[k], v);
        rep.holder_constant[k] = std::max(rep.holder_constant[k], v / std::pow(len, k / X.p()));
      }
    }
    log_len.push_back(std::log(mean_len));
    for (int k = 1; k <= n; ++k) log_norm[k].push_back(scale_max[k] > 0 ? std::log(scale_max[k]) : NAN);
  }
  for (int k = 1; k <= n; ++k) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < log_len.size(); ++i) {
      if (!std::isfinite(log_norm[k][i])) continue;
      sx += log_len[i];
      sy += log_norm[k][i];
      sxx += log_len[i] * log_len[i];
      sxy += log_len[i] * log_norm[k][i];
      ++m;
    }
    const double den = m * sxx - sx * sx;
    rep.holder_exponent[k] = (m >= 2 && den > 0) ? (m * sxy - sx * sy) / den / k : NAN;
  }

  rep.pass = rep.chen_defect <= opts.tol && rep.identity_defect <= opts.tol && rep.lie_defect <= opts.tol;
  for (int k = 1; k <= n; ++k) rep.pass = rep.pass && std::isfinite(rep.holder_constant[k]);
  return rep;
}

}  // namespace roughman
