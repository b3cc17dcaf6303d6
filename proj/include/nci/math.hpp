#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include <Eigen/Core>

#include "nci/random.hpp"
#include "nci/types.hpp"

namespace nci {

constexpr double kProbabilityFloor = 1e-12;

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return (S(1) + (-x).exp()).inverse();
}

// Row-wise softmax with max subtraction.
template <typename Derived>
MatrixX<typename Derived::Scalar> softmax_rows(const Eigen::MatrixBase<Derived>& logits) {
  using S = typename Derived::Scalar;
  MatrixX<S> out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const S peak = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - peak).unaryExpr([](S z) { return std::exp(z); }).matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

// Mean of -log p(gold) over rows, with p floored at kProbabilityFloor.
template <typename Derived>
typename Derived::Scalar cross_entropy(const Eigen::MatrixBase<Derived>& probs,
                                       std::span<const std::size_t> gold) {
  using S = typename Derived::Scalar;
  if (static_cast<Eigen::Index>(gold.size()) != probs.rows())
    throw InternalError("nncore", "loss: batch size mismatch");
  if (gold.empty()) return S(0);
  S total(0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (static_cast<Eigen::Index>(gold[i]) >= probs.cols())
      throw InternalError("nncore", "loss: gold index out of range");
    total -= std::log(std::max<S>(probs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(gold[i])),
                                  S(kProbabilityFloor)));
  }
  return total / static_cast<S>(gold.size());
}

// Glorot/Xavier uniform in [-limit, limit], limit = sqrt(6 / (fan_in + fan_out)).
template <typename Derived>
void glorot_uniform(Eigen::MatrixBase<Derived>& w, Rng& rng) {
  using S = typename Derived::Scalar;
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = static_cast<S>(rng.uniform(-limit, limit));
}

struct AdamConfig {
  double eta = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

// One bias-corrected Adam update; `step` is the 1-based count after this update.
template <typename G, typename M, typename V, typename X>
void adam_update(const Eigen::ArrayBase<G>& grad, Eigen::ArrayBase<M>& m, Eigen::ArrayBase<V>& v,
                 Eigen::ArrayBase<X>& x, std::uint64_t step, const AdamConfig& cfg) {
  using S = typename X::Scalar;
  m = S(cfg.beta1) * m + S(1 - cfg.beta1) * grad;
  v = S(cfg.beta2) * v + S(1 - cfg.beta2) * grad.square();
  const S m_corr = S(1) - std::pow(S(cfg.beta1), static_cast<S>(step));
  const S v_corr = S(1) - std::pow(S(cfg.beta2), static_cast<S>(step));
  x -= S(cfg.eta) * (m / m_corr) / ((v / v_corr).sqrt() + S(cfg.epsilon));
}

}  // namespace nci
