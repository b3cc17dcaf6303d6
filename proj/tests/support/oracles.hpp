#pragma once

// Reference implementations written independently of the library code.

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace nci::testing {

// Scalar Adam recurrence for one parameter.
struct ScriptedAdam {
  double eta = 0.001, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  double x = 0.0, m = 0.0, v = 0.0;
  int t = 0;

  double step(double g) {
    ++t;
    m = beta1 * m + (1 - beta1) * g;
    v = beta2 * v + (1 - beta2) * g * g;
    const double mhat = m / (1 - std::pow(beta1, t));
    const double vhat = v / (1 - std::pow(beta2, t));
    x = x - eta * mhat / (std::sqrt(vhat) + eps);
    return x;
  }
};

// Dense confusion matrix over the sorted union of labels, with scores read
// off its rows and columns.
struct ConfusionOracle {
  std::vector<std::string> labels;
  std::vector<std::vector<long>> cells;  // [gold][predicted]
  long n = 0;

  ConfusionOracle(const std::vector<std::string>& predicted, const std::vector<std::string>& gold) {
    std::set<std::string> all(gold.begin(), gold.end());
    all.insert(predicted.begin(), predicted.end());
    labels.assign(all.begin(), all.end());
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) idx[labels[i]] = i;
    cells.assign(labels.size(), std::vector<long>(labels.size(), 0));
    for (std::size_t i = 0; i < gold.size(); ++i) ++cells[idx[gold[i]]][idx[predicted[i]]];
    n = static_cast<long>(gold.size());
  }

  std::size_t at(const std::string& l) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == l) return i;
    return labels.size();
  }
  long tp(std::size_t k) const { return cells[k][k]; }
  long row(std::size_t k) const {
    long s = 0;
    for (long c : cells[k]) s += c;
    return s;
  }
  long col(std::size_t k) const {
    long s = 0;
    for (const auto& r : cells) s += r[k];
    return s;
  }
  long fp(std::size_t k) const { return col(k) - tp(k); }
  long fn(std::size_t k) const { return row(k) - tp(k); }
  double precision(std::size_t k) const { return col(k) ? double(tp(k)) / double(col(k)) : 0.0; }
  double recall(std::size_t k) const { return row(k) ? double(tp(k)) / double(row(k)) : 0.0; }
  double f1(std::size_t k) const {
    const double p = precision(k), r = recall(k);
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  long correct() const {
    long s = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) s += tp(k);
    return s;
  }
  double accuracy() const { return n ? double(correct()) / double(n) : 0.0; }
  double macro(const std::set<std::string>& subset) const {
    double s = 0;
    for (const auto& l : subset) {
      const std::size_t k = at(l);
      s += k < labels.size() ? f1(k) : 0.0;
    }
    return s / double(subset.size());
  }
};

}  // namespace nci::testing
