#include "roughman/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace roughman {

namespace {

std::size_t ipow(int d, int k) {
  std::size_t r = 1;
  for (int i = 0; i < k; ++i) r *= static_cast<std::size_t>(d);
  return r;
}

void require_same(const TruncatedTensor& a, const TruncatedTensor& b, const char* op) {
  require(a.same_shape(b), std::string(op) + ": shape mismatch (dim " + std::to_string(a.dim()) + "/" +
                               std::to_string(b.dim()) + ", level " + std::to_string(a.level()) + "/" +
                               std::to_string(b.level()) + ")");
}

bool unit_scalar(const TruncatedTensor& g) { return std::abs(g.scalar() - 1.0) <= 1e-12; }

}  // namespace

TruncatedTensor::TruncatedTensor(int dim, int level) : dim_(dim), level_(level) {
  require(dim > 0, "TruncatedTensor: dim must be positive");
  require(level >= 0, "TruncatedTensor: level must be non-negative");
  offsets_.resize(static_cast<std::size_t>(level) + 2);
  offsets_[0] = 0;
  for (int k = 0; k <= level; ++k) offsets_[k + 1] = offsets_[k] + ipow(dim, k);
  data_.assign(offsets_.back(), 0.0);
}

TruncatedTensor TruncatedTensor::unit(int dim, int level) {
  TruncatedTensor t(dim, level);
  t.data_[0] = 1.0;
  return t;
}

TruncatedTensor TruncatedTensor::from_vector(std::span<const double> v, int level) {
  require(level >= 1, "from_vector: level must be at least 1");
  TruncatedTensor t(static_cast<int>(v.size()), level);
  std::copy(v.begin(), v.end(), t.degree(1).begin());
  return t;
}

TruncatedTensor TruncatedTensor::letter(int dim, int level, int i) {
  require(i >= 0 && i < dim, "letter: index out of range");
  require(level >= 1, "letter: level must be at least 1");
  TruncatedTensor t(dim, level);
  t.degree(1)[i] = 1.0;
  return t;
}

std::size_t TruncatedTensor::degree_size(int k) const { return ipow(dim_, k); }

std::span<double> TruncatedTensor::degree(int k) {
  require(k >= 0 && k <= level_, "degree index out of range");
  return {data_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]};
}

std::span<const double> TruncatedTensor::degree(int k) const {
  require(k >= 0 && k <= level_, "degree index out of range");
  return {data_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]};
}

double& TruncatedTensor::at(std::span<const int> word) {
  const int k = static_cast<int>(word.size());
  std::size_t idx = 0;
  for (int w : word) {
    require(w >= 0 && w < dim_, "word letter out of range");
    idx = idx * dim_ + w;
  }
  return degree(k)[idx];
}

double TruncatedTensor::at(std::span<const int> word) const {
  return const_cast<TruncatedTensor*>(this)->at(word);
}

TruncatedTensor& TruncatedTensor::operator+=(const TruncatedTensor& o) {
  require_same(*this, o, "add");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

TruncatedTensor& TruncatedTensor::operator-=(const TruncatedTensor& o) {
  require_same(*this, o, "sub");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

TruncatedTensor& TruncatedTensor::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

TruncatedTensor TruncatedTensor::with_level(int level) const {
  TruncatedTensor out(dim_, level);
  for (int k = 0; k <= std::min(level, level_); ++k) {
    auto src = degree(k);
    std::copy(src.begin(), src.end(), out.degree(k).begin());
  }
  return out;
}

TruncatedTensor operator+(TruncatedTensor a, const TruncatedTensor& b) { return a += b; }
TruncatedTensor operator-(TruncatedTensor a, const TruncatedTensor& b) { return a -= b; }
TruncatedTensor operator*(double s, TruncatedTensor a) { return a *= s; }

TruncatedTensor tensor_mul(const TruncatedTensor& a, const TruncatedTensor& b) {
  require_same(a, b, "tensor_mul");
  const int d = a.dim();
  const int n = a.level();
  TruncatedTensor out(d, n);
  for (int k = 0; k <= n; ++k) {
    auto dst = out.degree(k);
    for (int i = 0; i <= k; ++i) {
      auto ai = a.degree(i);
      auto bj = b.degree(k - i);
      const std::size_t nb = bj.size();
      for (std::size_t p = 0; p < ai.size(); ++p) {
        const double x = ai[p];
        if (x == 0.0) continue;
        double* row = dst.data() + p * nb;
        for (std::size_t q = 0; q < nb; ++q) row[q] += x * bj[q];
      }
    }
  }
  return out;
}

TruncatedTensor tensor_exp(const TruncatedTensor& l) {
  require(l.scalar() == 0.0, "tensor_exp: scalar level must be 0");
  TruncatedTensor out = TruncatedTensor::unit(l.dim(), l.level());
  TruncatedTensor term = TruncatedTensor::unit(l.dim(), l.level());
  for (int k = 1; k <= l.level(); ++k) {
    term = tensor_mul(term, l);
    term *= 1.0 / k;
    out += term;
  }
  return out;
}

TruncatedTensor tensor_log(const TruncatedTensor& g) {
  require(unit_scalar(g), "tensor_log: scalar level must be 1");
  TruncatedTensor x = g;
  x.scalar() = 0.0;
  TruncatedTensor out(g.dim(), g.level());
  TruncatedTensor power = TruncatedTensor::unit(g.dim(), g.level());
  for (int k = 1; k <= g.level(); ++k) {
    power = tensor_mul(power, x);
    const double c = (k % 2 == 1 ? 1.0 : -1.0) / k;
    TruncatedTensor term = power;
    term *= c;
    out += term;
  }
  return out;
}

TruncatedTensor group_inverse(const TruncatedTensor& g) {
  require(unit_scalar(g), "group_inverse: scalar level must be 1");
  const int d = g.dim();
  const int n = g.level();
  TruncatedTensor h = TruncatedTensor::unit(d, n);
  for (int k = 1; k <= n; ++k) {
    auto hk = h.degree(k);
    for (int j = 1; j <= k; ++j) {
      auto gj = g.degree(j);
      auto hr = h.degree(k - j);
      const std::size_t nr = hr.size();
      for (std::size_t p = 0; p < gj.size(); ++p) {
        const double x = gj[p];
        if (x == 0.0) continue;
        for (std::size_t q = 0; q < nr; ++q) hk[p * nr + q] -= x * hr[q];
      }
    }
  }
  return h;
}

TruncatedTensor exp_vector(std::span<const double> v, int level) {
  const int d = static_cast<int>(v.size());
  TruncatedTensor out = TruncatedTensor::unit(d, level);
  for (int k = 1; k <= level; ++k) {
    auto prev = out.degree(k - 1);
    auto cur = out.degree(k);
    const double inv = 1.0 / k;
    for (std::size_t p = 0; p < prev.size(); ++p)
      for (int q = 0; q < d; ++q) cur[p * d + q] = prev[p] * v[q] * inv;
  }
  return out;
}

TruncatedTensor bracket(const TruncatedTensor& a, const TruncatedTensor& b) {
  return tensor_mul(a, b) - tensor_mul(b, a);
}

std::vector<double> dynkin_map(std::span<const double> component, int dim, int k) {
  require(k >= 1, "dynkin_map: degree must be at least 1");
  if (k == 1) return {component.begin(), component.end()};
  // r(Σ_a T_a ⊗ ε_a) = Σ_a r(T_a) ⊗ ε_a − ε_a ⊗ r(T_a)
  const std::size_t sub = ipow(dim, k - 1);
  std::vector<double> out(sub * dim, 0.0);
  std::vector<double> slice(sub);
  for (int a = 0; a < dim; ++a) {
    for (std::size_t p = 0; p < sub; ++p) slice[p] = component[p * dim + a];
    if (std::all_of(slice.begin(), slice.end(), [](double x) { return x == 0.0; })) continue;
    const std::vector<double> r = dynkin_map(slice, dim, k - 1);
    for (std::size_t p = 0; p < sub; ++p) {
      out[p * dim + a] += r[p];
      out[a * sub + p] -= r[p];
    }
  }
  return out;
}

TruncatedTensor lie_projection(const TruncatedTensor& t) {
  TruncatedTensor out(t.dim(), t.level());
  for (int k = 1; k <= t.level(); ++k) {
    const std::vector<double> r = dynkin_map(t.degree(k), t.dim(), k);
    auto dst = out.degree(k);
    for (std::size_t i = 0; i < r.size(); ++i) dst[i] = r[i] / k;
  }
  return out;
}

double degree_norm(const TruncatedTensor& t, int k) {
  double s = 0.0;
  for (double x : t.degree(k)) s += std::abs(x);
  return s;
}

double homogeneous_norm(const TruncatedTensor& g) {
  double m = 0.0;
  for (int k = 1; k <= g.level(); ++k) m = std::max(m, std::pow(degree_norm(g, k), 1.0 / k));
  return m;
}

double max_abs_diff(const TruncatedTensor& a, const TruncatedTensor& b) {
  require_same(a, b, "max_abs_diff");
  double m = 0.0;
  auto ra = a.raw();
  auto rb = b.raw();
  for (std::size_t i = 0; i < ra.size(); ++i) m = std::max(m, std::abs(ra[i] - rb[i]));
  return m;
}

// ---------------------------------------------------------------------------

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Per-degree distance of t from its Lie projection.
void dynkin_defects(const TruncatedTensor& t, std::vector<double>& abs_v, std::vector<double>& rel_v) {
  abs_v.assign(t.level() + 1, 0.0);
  rel_v.assign(t.level() + 1, 0.0);
  for (int k = 1; k <= t.level(); ++k) {
    auto pk = t.degree(k);
    const std::vector<double> r = dynkin_map(pk, t.dim(), k);
    double m = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) m = std::max(m, std::abs(r[i] / k - pk[i]));
    abs_v[k] = m;
    const double scale = max_abs(pk);
    rel_v[k] = scale > 0.0 ? m / scale : 0.0;
  }
}

}  // namespace

LieElement::LieElement(TruncatedTensor t, double tol) : t_(std::move(t)) {
  require(t_.scalar() == 0.0, "LieElement: scalar level must be 0");
  std::vector<double> abs_v, rel_v;
  dynkin_defects(t_, abs_v, rel_v);
  for (int k = 1; k <= t_.level(); ++k) {
    require(abs_v[k] <= tol * std::max(1.0, max_abs(t_.degree(k))),
            "LieElement: degree " + std::to_string(k) + " is not in the free Lie algebra");
  }
}

LieElement LieElement::letter(int dim, int level, int i) {
  return {TruncatedTensor::letter(dim, level, i), Trusted{}};
}

LieElement LieElement::from_vector(std::span<const double> v, int level) {
  return {TruncatedTensor::from_vector(v, level), Trusted{}};
}

int LieElement::top_degree() const {
  for (int k = t_.level(); k >= 1; --k)
    if (max_abs(t_.degree(k)) > 0.0) return k;
  return 0;
}

LieElement LieElement::scaled(double s) const { return {s * t_, Trusted{}}; }
LieElement operator+(const LieElement& a, const LieElement& b) { return {a.t_ + b.t_, LieElement::Trusted{}}; }
LieElement operator-(const LieElement& a, const LieElement& b) { return {a.t_ - b.t_, LieElement::Trusted{}}; }
LieElement lie_bracket(const LieElement& a, const LieElement& b) {
  return {bracket(a.t_, b.t_), LieElement::Trusted{}};
}

double LieReport::max_abs() const {
  double m = 0.0;
  for (double v : abs_violation) m = std::max(m, v);
  return m;
}

LieReport check_lie(const TruncatedTensor& g, double tol) {
  require(unit_scalar(g), "check_lie: scalar level must be 1");
  const TruncatedTensor l = tensor_log(g);
  LieReport rep;
  dynkin_defects(l, rep.abs_violation, rep.rel_violation);
  rep.degree_pass.assign(g.level() + 1, true);
  for (int k = 1; k <= g.level(); ++k) {
    const bool ok = rep.abs_violation[k] <= tol * std::max(1.0, max_abs(l.degree(k)));
    rep.degree_pass[k] = ok;
    rep.pass = rep.pass && ok;
  }
  return rep;
}

TruncatedTensor signature_piecewise_linear(const std::vector<std::vector<double>>& points, int level) {
  require(points.size() >= 2, "signature_piecewise_linear: need at least 2 points");
  const std::size_t d = points.front().size();
  require(d > 0, "signature_piecewise_linear: empty points");
  TruncatedTensor sig = TruncatedTensor::unit(static_cast<int>(d), level);
  std::vector<double> inc(d);
  for (std::size_t i = 1; i < points.size(); ++i) {
    require(points[i].size() == d, "signature_piecewise_linear: inconsistent point dimension");
    for (std::size_t j = 0; j < d; ++j) inc[j] = points[i][j] - points[i - 1][j];
    sig = tensor_mul(sig, exp_vector(inc, level));
  }
  return sig;
}

nlohmann::json to_json(const TruncatedTensor& t) {
  nlohmann::json data = nlohmann::json::array();
  data.push_back(t.scalar());
  for (int k = 1; k <= t.level(); ++k) {
    auto c = t.degree(k);
    data.push_back(std::vector<double>(c.begin(), c.end()));
  }
  return {{"dim", t.dim()}, {"level", t.level()}, {"data", data}};
}

TruncatedTensor tensor_from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("dim") && j.contains("level") && j.contains("data"),
          "tensor json: expected object with dim, level, data");
  const int d = j.at("dim").get<int>();
  const int n = j.at("level").get<int>();
  const auto& data = j.at("data");
  require(data.is_array() && data.size() == static_cast<std::size_t>(n) + 1, "tensor json: data must have level+1 entries");
  TruncatedTensor t(d, n);
  t.scalar() = data[0].get<double>();
  for (int k = 1; k <= n; ++k) {
    const auto v = data[k].get<std::vector<double>>();
    require(v.size() == t.degree_size(k), "tensor json: degree " + std::to_string(k) + " has wrong size");
    std::copy(v.begin(), v.end(), t.degree(k).begin());
  }
  return t;
}

}  // namespace roughman
