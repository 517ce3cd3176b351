#include "metapotts/phase.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace metapotts {

const char* to_string(PhaseKind kind) { return kind == PhaseKind::para ? "para" : "ferro"; }

PhaseSpec PhaseSpec::para(int q, double eps) {
  PhaseSpec s{PhaseKind::para, eps, ColourDistribution::uniform(q), false};
  s.validate();
  return s;
}

PhaseSpec PhaseSpec::ferro(ColourDistribution target, double eps, bool include_permutations) {
  PhaseSpec s{PhaseKind::ferro, eps, std::move(target), include_permutations};
  s.validate();
  return s;
}

void PhaseSpec::validate() const {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("phase eps must lie in (0, 1)");
  if (target.q() < 1) throw std::invalid_argument("phase target is empty");
}

double count_deviation(std::span<const int> counts, const ColourDistribution& target, int a,
                       int b) {
  const int q = target.q();
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  double dev = 0.0;
  for (int c = 0; c < q; ++c) {
    const int source = c == a ? b : (c == b ? a : c);
    dev += std::abs(counts[c] - n * target[source]);
  }
  return dev;
}

Membership phase_membership(std::span<const int> counts, const PhaseSpec& spec) {
  const int q = spec.q();
  if (counts.size() != static_cast<std::size_t>(q)) {
    throw std::invalid_argument("colour counts have the wrong length");
  }
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  const double bound = spec.eps * n;
  const int dominant = spec.dominant_colour();
  Membership m;
  m.deviation = count_deviation(counts, spec.target, dominant, dominant);
  if (m.deviation < bound) {
    m.member = true;
    m.matched_colour = dominant;
  }
  if (spec.kind == PhaseKind::ferro && spec.include_permutations) {
    for (int k = 0; k < q; ++k) {
      if (k == dominant) continue;
      const double dev = count_deviation(counts, spec.target, dominant, k);
      if (dev < m.deviation) m.deviation = dev;
      if (!m.member && dev < bound) {
        m.member = true;
        m.matched_colour = k;
      }
    }
  }
  return m;
}

}  // namespace metapotts
