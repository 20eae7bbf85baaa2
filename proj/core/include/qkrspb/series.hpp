#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "qkrspb/hilbert.hpp"

namespace qkrspb {

/// Inclusive kick range [t_a, t_b] sampled every `stride` kicks from t_a.
struct WindowSpec {
  long t_a = 1;
  long t_b = 1;
  long stride = 1;

  void validate() const;
  bool contains(long kick) const noexcept {
    return kick >= t_a && kick <= t_b && (kick - t_a) % stride == 0;
  }
};

/// Stroboscopic record of a run: kick indices, optional RDM snapshots and
/// named scalar channels, all sharing the index axis.
class MetricSeries {
 public:
  void push(long kick, DensityMatrix snapshot);
  void push_kick(long kick);

  void set_channel(const std::string& name, std::vector<double> values);
  bool has_channel(const std::string& name) const { return scalars_.count(name) != 0; }
  const std::vector<double>& channel(const std::string& name) const;

  const std::vector<long>& kicks() const noexcept { return kicks_; }
  const std::vector<DensityMatrix>& snapshots() const noexcept { return snapshots_; }
  const std::map<std::string, std::vector<double>>& channels() const noexcept { return scalars_; }
  bool has_snapshots() const noexcept { return !snapshots_.empty(); }
  std::size_t size() const noexcept { return kicks_.size(); }
  bool empty() const noexcept { return kicks_.empty(); }

  /// Positions (into kicks()) of the records selected by `window`. Throws
  /// InvalidInput when the window leaves the recorded range or selects
  /// nothing.
  std::vector<std::size_t> select(const WindowSpec& window) const;

 private:
  std::vector<long> kicks_;
  std::vector<DensityMatrix> snapshots_;
  std::map<std::string, std::vector<double>> scalars_;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Elementwise compensated accumulation of equally shaped complex matrices.
class CompensatedMatrixSum {
 public:
  void add(const Matrix& m);
  Matrix value() const;
  std::size_t count() const noexcept { return count_; }

 private:
  Eigen::Index rows_ = 0, cols_ = 0;
  std::vector<CompensatedSum> re_, im_;
  std::size_t count_ = 0;
};

}  // namespace qkrspb
