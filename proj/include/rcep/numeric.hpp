#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace rcep {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Sum of weights(i) * values(i) in index order, compensated.
template <typename DerivedA, typename DerivedB>
double weighted_sum(const Eigen::DenseBase<DerivedA>& values,
                    const Eigen::DenseBase<DerivedB>& weights) {
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < values.size(); ++i) acc.add(weights(i) * values(i));
  return acc.value();
}

/// Indices sorted by value, largest first; equal values keep index order.
template <typename Derived>
std::vector<Eigen::Index> descending_order(const Eigen::DenseBase<Derived>& values) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
  return order;
}

/// Caps the worker threads used by chunked evaluations; 0 selects the
/// hardware concurrency.
void set_worker_threads(int threads);
int worker_threads();

/// Runs body(begin, end) over [0, n) split into contiguous chunks. Chunks are
/// disjoint, so bodies may write to separate output slots without locking.
void parallel_chunks(Eigen::Index n, Eigen::Index min_chunk,
                     const std::function<void(Eigen::Index, Eigen::Index)>& body);

}  // namespace rcep
