#pragma once

#include <span>
#include <vector>

#include "metapotts/types.hpp"

namespace metapotts {

enum class PhaseKind { para, ferro };

const char* to_string(PhaseKind kind);

/// Set of configurations whose colour counts lie within eps*n (in l1) of
/// n * target. With include_permutations the ferro set is closed under moving
/// the dominant colour of `target` to any other colour.
struct PhaseSpec {
  PhaseKind kind = PhaseKind::para;
  double eps = 0.1;
  ColourDistribution target;
  bool include_permutations = false;

  static PhaseSpec para(int q, double eps);
  static PhaseSpec ferro(ColourDistribution target, double eps, bool include_permutations);

  int q() const { return target.q(); }
  int dominant_colour() const { return target.argmax(); }
  // Throws std::invalid_argument unless 0 < eps < 1.
  void validate() const;
};

struct Membership {
  bool member = false;
  // Colour playing the role of the dominant colour in the matched placement
  // (the dominant colour itself when permutations are off; -1 if no match).
  int matched_colour = -1;
  // Smallest l1 deviation over the placements tried, in vertices.
  double deviation = 0.0;
};

// l1 distance between counts and n * target, with the colours `a` and `b` of
// the target swapped.
double count_deviation(std::span<const int> counts, const ColourDistribution& target,
                       int a, int b);

// Strict test sum_c |counts(c) - n target(c)| < eps * n.
Membership phase_membership(std::span<const int> counts, const PhaseSpec& spec);

}  // namespace metapotts
