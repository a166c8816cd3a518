#pragma once

// Type-erased smooth maps R^n -> R^m that can be evaluated on nested dual
// numbers up to depth kMaxDualDepth. Vector fields, test functions,
// connection forms and diffeomorphisms are all SmoothMaps.

#include <memory>
#include <string>
#include <type_traits>
#include <utility>

#include "roughman/dual.hpp"
#include "roughman/errors.hpp"

namespace roughman {

class SmoothMap {
 public:
  SmoothMap() = default;

  /// Wraps a generic callable `fn(const Vec<S>&) -> Vec<S>`, which must
  /// compile for S = double and every nested Dual up to kMaxDualDepth.
  template <class Fn>
  static SmoothMap make(int in_dim, int out_dim, Fn fn, std::string name = {}) {
    SmoothMap m;
    m.impl_ = std::make_shared<Model<Fn>>(std::move(fn));
    m.in_ = in_dim;
    m.out_ = out_dim;
    m.name_ = std::move(name);
    return m;
  }

  template <class S>
  Vec<S> operator()(const Vec<S>& x) const {
    static_assert(dual_depth_v<S> <= kMaxDualDepth, "dual nesting too deep");
    require(impl_ != nullptr, "SmoothMap: empty map evaluated");
    require(x.size() == in_, "SmoothMap '" + name_ + "': input dimension " + std::to_string(x.size()) +
                                 ", expected " + std::to_string(in_));
    return impl_->eval(x);
  }

  int in_dim() const { return in_; }
  int out_dim() const { return out_; }
  const std::string& name() const { return name_; }
  bool empty() const { return impl_ == nullptr; }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual Vec<D<0>> eval(const Vec<D<0>>& x) const = 0;
    virtual Vec<D<1>> eval(const Vec<D<1>>& x) const = 0;
    virtual Vec<D<2>> eval(const Vec<D<2>>& x) const = 0;
    virtual Vec<D<3>> eval(const Vec<D<3>>& x) const = 0;
    virtual Vec<D<4>> eval(const Vec<D<4>>& x) const = 0;
    virtual Vec<D<5>> eval(const Vec<D<5>>& x) const = 0;
  };

  template <class Fn>
  struct Model final : Concept {
    explicit Model(Fn f) : fn(std::move(f)) {}
    Vec<D<0>> eval(const Vec<D<0>>& x) const override { return fn(x); }
    Vec<D<1>> eval(const Vec<D<1>>& x) const override { return fn(x); }
    Vec<D<2>> eval(const Vec<D<2>>& x) const override { return fn(x); }
    Vec<D<3>> eval(const Vec<D<3>>& x) const override { return fn(x); }
    Vec<D<4>> eval(const Vec<D<4>>& x) const override { return fn(x); }
    Vec<D<5>> eval(const Vec<D<5>>& x) const override { return fn(x); }
    Fn fn;
  };

  std::shared_ptr<const Concept> impl_;
  int in_ = 0;
  int out_ = 0;
  std::string name_;
};

/// Directional derivative Dφ(x)·v, exact through one dual layer.
template <class S>
Vec<S> directional_derivative(const SmoothMap& phi, const Vec<S>& x, const Vec<S>& v) {
  if constexpr (dual_depth_v<S> < kMaxDualDepth) {
    return eps_part(phi(seed(x, v)));
  } else {
    throw ContractViolation("directional_derivative: dual nesting exhausted");
  }
}

/// Scalar of an arbitrary nesting depth from a double.
template <class S>
S constant(double c) {
  return S(c);
}

}  // namespace roughman
