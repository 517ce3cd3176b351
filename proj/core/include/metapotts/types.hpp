#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace metapotts {

// Colours are 0-based internally: a q-state configuration uses {0, ..., q-1}.
using Colour = std::uint8_t;
using Configuration = std::vector<Colour>;

inline constexpr int kMaxColours = 255;

// Sums of probability vectors must be within this of 1.
inline constexpr double kNormTolerance = 1e-12;

struct PottsParams {
  int q = 3;
  int d = 3;
  double beta = 0.0;
};

// x log x with the 0 log 0 = 0 convention.
double xlogx(double x);

/// Probability vector over q colours (mu, nu, nu^sigma, nu^mu).
class ColourDistribution {
 public:
  ColourDistribution() = default;
  explicit ColourDistribution(std::vector<double> probs);

  static ColourDistribution uniform(int q);
  // Normalises nonnegative weights.
  static ColourDistribution from_weights(std::vector<double> weights);

  int q() const { return static_cast<int>(probs_.size()); }
  double operator[](int c) const { return probs_[static_cast<std::size_t>(c)]; }
  std::span<const double> probs() const { return probs_; }

  // Colour of maximal probability (lowest index on ties).
  int argmax() const;

 private:
  std::vector<double> probs_;
};

/// Symmetric q x q probability matrix over ordered colour pairs (rho).
class EdgeDistribution {
 public:
  EdgeDistribution() = default;
  EdgeDistribution(int q, std::vector<double> row_major);

  // Independent coupling nu (x) nu.
  static EdgeDistribution product(const ColourDistribution& nu);

  int q() const { return q_; }
  double operator()(int s, int t) const {
    return values_[static_cast<std::size_t>(s * q_ + t)];
  }
  std::span<const double> values() const { return values_; }

  std::vector<double> row_sums() const;
  // Max-norm distance between the row sums and nu.
  double row_sum_defect(const ColourDistribution& nu) const;

 private:
  int q_ = 0;
  std::vector<double> values_;
};

// Validates a configuration against q; throws std::invalid_argument.
void check_configuration(std::span<const Colour> sigma, int q);

// Colour counts of sigma.
std::vector<int> colour_counts(std::span<const Colour> sigma, int q);

}  // namespace metapotts
