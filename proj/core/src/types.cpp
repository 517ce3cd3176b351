#include "metapotts/types.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace metapotts {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

ColourDistribution::ColourDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty() || probs_.size() > static_cast<std::size_t>(kMaxColours)) {
    throw std::invalid_argument("colour distribution needs 1..255 entries");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("colour distribution entries must be finite and >= 0");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw std::invalid_argument("colour distribution sums to " + std::to_string(total));
  }
}

ColourDistribution ColourDistribution::uniform(int q) {
  if (q < 1) throw std::invalid_argument("q must be positive");
  return ColourDistribution(std::vector<double>(static_cast<std::size_t>(q), 1.0 / q));
}

ColourDistribution ColourDistribution::from_weights(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("weights must have a positive finite sum");
  }
  for (double& w : weights) w /= total;
  return ColourDistribution(std::move(weights));
}

int ColourDistribution::argmax() const {
  int best = 0;
  for (int c = 1; c < q(); ++c) {
    if (probs_[c] > probs_[best]) best = c;
  }
  return best;
}

EdgeDistribution::EdgeDistribution(int q, std::vector<double> row_major)
    : q_(q), values_(std::move(row_major)) {
  if (q < 1 || values_.size() != static_cast<std::size_t>(q * q)) {
    throw std::invalid_argument("edge distribution must be q x q");
  }
  double total = 0.0;
  for (int s = 0; s < q; ++s) {
    for (int t = 0; t < q; ++t) {
      const double v = (*this)(s, t);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("edge distribution entries must be finite and >= 0");
      }
      if (std::abs(v - (*this)(t, s)) > kNormTolerance) {
        throw std::invalid_argument("edge distribution must be symmetric");
      }
      total += v;
    }
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw std::invalid_argument("edge distribution sums to " + std::to_string(total));
  }
}

EdgeDistribution EdgeDistribution::product(const ColourDistribution& nu) {
  const int q = nu.q();
  std::vector<double> v(static_cast<std::size_t>(q * q));
  for (int s = 0; s < q; ++s) {
    for (int t = 0; t < q; ++t) v[s * q + t] = nu[s] * nu[t];
  }
  return EdgeDistribution(q, std::move(v));
}

std::vector<double> EdgeDistribution::row_sums() const {
  std::vector<double> sums(static_cast<std::size_t>(q_), 0.0);
  for (int s = 0; s < q_; ++s) {
    for (int t = 0; t < q_; ++t) sums[s] += (*this)(s, t);
  }
  return sums;
}

double EdgeDistribution::row_sum_defect(const ColourDistribution& nu) const {
  if (nu.q() != q_) throw std::invalid_argument("colour count mismatch");
  const auto sums = row_sums();
  double worst = 0.0;
  for (int s = 0; s < q_; ++s) worst = std::max(worst, std::abs(sums[s] - nu[s]));
  return worst;
}

void check_configuration(std::span<const Colour> sigma, int q) {
  for (Colour c : sigma) {
    if (c >= q) throw std::invalid_argument("colour out of range");
  }
}

std::vector<int> colour_counts(std::span<const Colour> sigma, int q) {
  std::vector<int> counts(static_cast<std::size_t>(q), 0);
  for (Colour c : sigma) ++counts[c];
  return counts;
}

}  // namespace metapotts
