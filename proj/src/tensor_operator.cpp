#include "roughman/tensor_operator.hpp"

namespace roughman {

TensorOperator::TensorOperator(const VfOneForm& F, TruncatedTensor coeffs)
    : F_(std::make_shared<const VfOneForm>(F)), c_(std::move(coeffs)) {
  require(c_.dim() == F.dim_u(), "TensorOperator: tensor over R^" + std::to_string(c_.dim()) +
                                     " but the one-form takes R^" + std::to_string(F.dim_u()));
  const int n = c_.level();
  const auto d = static_cast<std::size_t>(c_.dim());
  top_ = 0;
  for (int k = n; k >= 1 && top_ == 0; --k)
    for (double v : c_.degree(k))
      if (v != 0.0) {
        top_ = k;
        break;
      }
  live_.resize(static_cast<std::size_t>(top_) + 1);
  for (int j = top_; j >= 0; --j) {
    auto cj = c_.degree(j);
    auto& lj = live_[static_cast<std::size_t>(j)];
    lj.assign(cj.size(), 0);
    for (std::size_t idx = 0; idx < cj.size(); ++idx) {
      bool live = cj[idx] != 0.0;
      if (!live && j < top_)
        for (std::size_t a = 0; a < d && !live; ++a) live = live_[static_cast<std::size_t>(j) + 1][idx * d + a];
      lj[idx] = live ? 1 : 0;
    }
  }
}

VectorField TensorOperator::as_field() const {
  require(c_.scalar() == 0.0, "TensorOperator::as_field: scalar part must be 0");
  auto self = std::make_shared<const TensorOperator>(*this);
  return VectorField::make(
      F_->ambient_dim(), [self](const auto& y) { return self->apply(nullptr, y); }, "log-ode-field");
}

VectorField bracket_substituted_field(const VfOneForm& F, const TruncatedTensor& lie) {
  require(lie.dim() == F.dim_u(), "bracket_substituted_field: dimension mismatch");
  std::vector<std::pair<double, VectorField>> terms;
  const int d = lie.dim();
  for (int k = 1; k <= lie.level(); ++k) {
    auto ck = lie.degree(k);
    for (std::size_t idx = 0; idx < ck.size(); ++idx) {
      if (ck[idx] == 0.0) continue;
      std::vector<int> word(static_cast<std::size_t>(k));
      std::size_t rest = idx;
      for (int p = k - 1; p >= 0; --p) {
        word[static_cast<std::size_t>(p)] = static_cast<int>(rest % static_cast<std::size_t>(d));
        rest /= static_cast<std::size_t>(d);
      }
      VectorField f = F[word[0]];
      for (int p = 1; p < k; ++p) f = lie_bracket_field(f, F[word[static_cast<std::size_t>(p)]]);
      terms.emplace_back(ck[idx] / k, f);
    }
  }
  const int m = F.ambient_dim();
  return VectorField::make(
      m,
      [terms, m](const auto& y) {
        using V = std::decay_t<decltype(y)>;
        V out = V::Zero(m);
        for (const auto& [c, f] : terms) out += f(y) * c;
        return out;
      },
      "bracket-field");
}

}  // namespace roughman
