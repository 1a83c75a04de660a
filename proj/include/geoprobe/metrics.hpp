// Scalar statistics: cosine similarity, rank and linear correlation, and the
// single-category WEAT effect size. Inputs may be float or double; every
// reduction accumulates in double with a fixed summation order.
#ifndef GEOPROBE_METRICS_HPP
#define GEOPROBE_METRICS_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoprobe {

class MetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

template <typename DerivedU, typename DerivedV>
double cosine(const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedV>& v) {
  if (u.size() != v.size()) {
    throw MetricError("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                      std::to_string(v.size()) + ")");
  }
  const auto ud = u.template cast<double>();
  const auto vd = v.template cast<double>();
  const double uu = ud.squaredNorm();
  const double vv = vd.squaredNorm();
  if (uu == 0.0 || vv == 0.0) throw MetricError("cosine: zero vector");
  const double c = ud.dot(vd) / (std::sqrt(uu) * std::sqrt(vv));
  return std::clamp(c, -1.0, 1.0);
}

/// 1-based ranks; tied values share the average of the positions they span.
inline std::vector<double> fractional_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && xs[order[j]] == xs[order[i]]) ++j;
    // positions i..j-1 (0-based) share rank mean(i+1..j)
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

inline double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw MetricError("pearson: length mismatch (" + std::to_string(xs.size()) + " vs " +
                      std::to_string(ys.size()) + ")");
  }
  if (xs.size() < 3) throw MetricError("pearson: need at least 3 observations");
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw MetricError("pearson: constant input");
  // sqrt of the product (not product of sqrts) keeps pearson(x, x) == 1 exactly.
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw MetricError("spearman: length mismatch (" + std::to_string(xs.size()) + " vs " +
                      std::to_string(ys.size()) + ")");
  }
  if (xs.size() < 3) throw MetricError("spearman: need at least 3 observations");
  const auto rx = fractional_ranks(xs);
  const auto ry = fractional_ranks(ys);
  try {
    return pearson(rx, ry);
  } catch (const MetricError&) {
    throw MetricError("spearman: constant input");
  }
}

/// Attribute sets A (pleasant) and B (unpleasant), one vector per row.
template <typename Scalar>
struct AttributeSets {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Matrix pleasant;
  Matrix unpleasant;

  AttributeSets swapped() const { return {unpleasant, pleasant}; }
};

struct EffectSize {
  double d = 0.0;
};

/// Standardized association of w with A over B: the difference of mean
/// cosines divided by the sample standard deviation of all |A|+|B| cosines.
template <typename Derived, typename Scalar>
EffectSize sc_weat(const Eigen::MatrixBase<Derived>& w, const AttributeSets<Scalar>& attrs) {
  const auto& a = attrs.pleasant;
  const auto& b = attrs.unpleasant;
  if (a.rows() == 0 || b.rows() == 0) throw MetricError("sc_weat: empty attribute set");
  if (a.cols() != w.size() || b.cols() != w.size()) {
    throw MetricError("sc_weat: attribute dimensionality differs from the target vector");
  }
  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(a.rows() + b.rows()));
  double sum_a = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    scores.push_back(cosine(w, a.row(i)));
    sum_a += scores.back();
  }
  double sum_b = 0.0;
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    scores.push_back(cosine(w, b.row(i)));
    sum_b += scores.back();
  }
  const double numerator = sum_a / static_cast<double>(a.rows()) -
                           sum_b / static_cast<double>(b.rows());

  // The union is order-independent; sorting fixes the summation order so that
  // swapping A and B negates d exactly.
  std::sort(scores.begin(), scores.end());
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(scores.size());
  double ss = 0.0;
  for (double s : scores) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / static_cast<double>(scores.size() - 1));
  if (!(sd > 0.0)) throw MetricError("sc_weat: zero variance across attribute cosines");
  return {numerator / sd};
}

}  // namespace geoprobe

#endif  // GEOPROBE_METRICS_HPP
