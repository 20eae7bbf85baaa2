#include "qkrspb/series.hpp"

#include "qkrspb/error.hpp"

namespace qkrspb {

void WindowSpec::validate() const {
  if (t_a < 1 || t_b < t_a) throw InvalidInput("window requires 1 <= t_a <= t_b");
  if (stride < 1) throw InvalidInput("window stride must be positive");
}

void MetricSeries::push(long kick, DensityMatrix snapshot) {
  if (!kicks_.empty() && kick <= kicks_.back()) throw InvalidInput("kick indices must increase");
  if (snapshots_.size() != kicks_.size()) throw InvalidInput("series mixes snapshot and bare records");
  if (!scalars_.empty()) throw InvalidInput("cannot append records after channels are attached");
  kicks_.push_back(kick);
  snapshots_.push_back(std::move(snapshot));
}

void MetricSeries::push_kick(long kick) {
  if (!kicks_.empty() && kick <= kicks_.back()) throw InvalidInput("kick indices must increase");
  if (!snapshots_.empty()) throw InvalidInput("series mixes snapshot and bare records");
  if (!scalars_.empty()) throw InvalidInput("cannot append records after channels are attached");
  kicks_.push_back(kick);
}

void MetricSeries::set_channel(const std::string& name, std::vector<double> values) {
  if (values.size() != kicks_.size()) throw InvalidInput("channel '" + name + "' length differs from kick axis");
  scalars_[name] = std::move(values);
}

const std::vector<double>& MetricSeries::channel(const std::string& name) const {
  auto it = scalars_.find(name);
  if (it == scalars_.end()) throw InvalidInput("missing channel '" + name + "'");
  return it->second;
}

std::vector<std::size_t> MetricSeries::select(const WindowSpec& window) const {
  window.validate();
  if (kicks_.empty()) throw InvalidInput("series is empty");
  if (window.t_a < kicks_.front() || window.t_b > kicks_.back())
    throw InvalidInput("window lies outside the recorded kick range");
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < kicks_.size(); ++p)
    if (window.contains(kicks_[p])) out.push_back(p);
  if (out.empty()) throw InvalidInput("window selects no records");
  return out;
}

void CompensatedMatrixSum::add(const Matrix& m) {
  if (count_ == 0) {
    rows_ = m.rows();
    cols_ = m.cols();
    re_.assign(static_cast<std::size_t>(m.size()), {});
    im_.assign(static_cast<std::size_t>(m.size()), {});
  } else if (m.rows() != rows_ || m.cols() != cols_) {
    throw InvalidInput("compensated sum: shape mismatch");
  }
  for (Eigen::Index j = 0; j < cols_; ++j)
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const auto k = static_cast<std::size_t>(j * rows_ + i);
      re_[k].add(m(i, j).real());
      im_[k].add(m(i, j).imag());
    }
  ++count_;
}

Matrix CompensatedMatrixSum::value() const {
  Matrix out(rows_, cols_);
  for (Eigen::Index j = 0; j < cols_; ++j)
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const auto k = static_cast<std::size_t>(j * rows_ + i);
      out(i, j) = Complex(re_[k].value(), im_[k].value());
    }
  return out;
}

}  // namespace qkrspb
