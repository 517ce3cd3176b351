#include "metapotts/meanfield.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace metapotts {

namespace {

// Graph-level routines take degrees from the graph and ignore p.d.
void check_graph_params(const PottsParams& p) {
  if (p.q < 1 || p.q > kMaxColours) throw std::invalid_argument("q out of range");
  if (!(p.beta >= 0.0) || !std::isfinite(p.beta)) {
    throw std::invalid_argument("beta must be finite and nonnegative");
  }
}

void check_params(const PottsParams& p) {
  check_graph_params(p);
  if (p.d < 1) throw std::invalid_argument("d must be positive");
}

void check_mu(const ColourDistribution& mu, const PottsParams& p) {
  if (mu.q() != p.q) throw std::invalid_argument("mu has the wrong number of colours");
}

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Normalised exp(v) written into out.
void soft_max(std::span<const double> v, std::span<double> out) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - m);
    s += out[i];
  }
  for (double& x : out) x /= s;
}

}  // namespace

double ferro_curve(int q, int d, double y) {
  if (!(y > 1.0)) throw std::invalid_argument("ferro_curve needs y > 1");
  const double ly = std::log(y);
  // (y-1)(y^{d-1}+q-1)/(y^{d-1}-y), divided through by y^{d-1}.
  const double num = (y - 1.0) * (1.0 + (q - 1) * std::exp((1 - d) * ly));
  const double den = -std::expm1((2 - d) * ly);
  return num / den;
}

double ferro_curve_argmin(int q, int d) {
  if (q < 3 || d < 3) throw std::invalid_argument("need q >= 3 and d >= 3");
  double lo = 1.0 + 1e-9;
  double hi = 2.0;
  while (ferro_curve(q, d, 2.0 * hi) < ferro_curve(q, d, hi)) hi *= 2.0;
  hi *= 2.0;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double fa = ferro_curve(q, d, a);
  double fb = ferro_curve(q, d, b);
  for (int it = 0; it < 300 && hi - lo > 1e-13 * hi; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = ferro_curve(q, d, a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = ferro_curve(q, d, b);
    }
  }
  return 0.5 * (lo + hi);
}

Thresholds thresholds(int q, int d) {
  if (q < 3 || d < 3) throw std::invalid_argument("thresholds need q >= 3 and d >= 3");
  Thresholds th;
  th.beta_h = std::log1p(static_cast<double>(q) / (d - 2));
  th.beta_c = std::log((q - 2) / std::expm1((1.0 - 2.0 / d) * std::log(q - 1.0)));
  th.beta_u = std::log1p(ferro_curve(q, d, ferro_curve_argmin(q, d)));
  return th;
}

ColourDistribution bp_map(const ColourDistribution& mu, const PottsParams& p) {
  check_params(p);
  check_mu(mu, p);
  const double w = std::expm1(p.beta);
  std::vector<double> logs(static_cast<std::size_t>(p.q));
  for (int c = 0; c < p.q; ++c) logs[c] = (p.d - 1) * std::log1p(w * mu[c]);
  std::vector<double> out(logs.size());
  soft_max(logs, out);
  return ColourDistribution::from_weights(std::move(out));
}

double bp_residual(const ColourDistribution& mu, const PottsParams& p) {
  const ColourDistribution image = bp_map(mu, p);
  double r = 0.0;
  for (int c = 0; c < p.q; ++c) r = std::max(r, std::abs(mu[c] - image[c]));
  return r;
}

double bp_jacobian_radius(const ColourDistribution& mu, const PottsParams& p) {
  check_params(p);
  check_mu(mu, p);
  const int q = p.q;
  const double w = std::expm1(p.beta);
  // Scale f by a common factor to keep it finite; J is invariant under it.
  std::vector<double> logf(static_cast<std::size_t>(q));
  for (int c = 0; c < q; ++c) logf[c] = (p.d - 1) * std::log1p(w * mu[c]);
  const double shift = *std::max_element(logf.begin(), logf.end());
  Eigen::VectorXd f(q);
  Eigen::VectorXd df(q);
  for (int c = 0; c < q; ++c) {
    f(c) = std::exp(logf[c] - shift);
    df(c) = (p.d - 1) * w * f(c) / (1.0 + w * mu[c]);
  }
  const double s = f.sum();
  Eigen::MatrixXd jac = -(f * df.transpose()) / (s * s);
  for (int c = 0; c < q; ++c) jac(c, c) += df(c) / s;
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

const char* to_string(FixedPointKind kind) {
  switch (kind) {
    case FixedPointKind::para:
      return "para";
    case FixedPointKind::ferro:
      return "ferro";
    case FixedPointKind::other:
      break;
  }
  return "other";
}

std::optional<FerroSolution> ferro_fixed_point(const PottsParams& p) {
  check_params(p);
  if (p.q < 3 || p.d < 3) throw std::invalid_argument("need q >= 3 and d >= 3");
  const int q = p.q;
  const int d = p.d;
  const double w = std::expm1(p.beta);
  const double t0 = ferro_curve_argmin(q, d);
  if (!(w > ferro_curve(q, d, t0))) return std::nullopt;

  // ferro_curve increases on (t0, inf) and grows like t.
  double lo = t0;
  double hi = std::max(2.0 * t0, w + 2.0);
  while (ferro_curve(q, d, hi) < w) hi *= 2.0;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (ferro_curve(q, d, mid) < w ? lo : hi) = mid;
  }
  FerroSolution sol;
  sol.t = 0.5 * (lo + hi);
  sol.x = 1.0 / (1.0 + (q - 1) * std::exp((1 - d) * std::log(sol.t)));
  std::vector<double> probs(static_cast<std::size_t>(q), (1.0 - sol.x) / (q - 1));
  probs[0] = sol.x;
  sol.mu = ColourDistribution::from_weights(std::move(probs));
  return sol;
}

namespace {

FixedPointReport make_report(ColourDistribution mu, FixedPointKind kind, const PottsParams& p) {
  FixedPointReport r;
  r.residual = bp_residual(mu, p);
  r.jacobian_radius = bp_jacobian_radius(mu, p);
  r.stable = r.jacobian_radius < 1.0;
  r.bethe_value = bethe(mu, p);
  r.kind = kind;
  r.mu = std::move(mu);
  return r;
}

}  // namespace

std::vector<FixedPointReport> solve_fixed_points(const PottsParams& p) {
  std::vector<FixedPointReport> out;
  out.push_back(make_report(ColourDistribution::uniform(p.q), FixedPointKind::para, p));
  if (auto ferro = ferro_fixed_point(p)) {
    out.push_back(make_report(std::move(ferro->mu), FixedPointKind::ferro, p));
  }
  return out;
}

double bethe(const ColourDistribution& mu, const PottsParams& p) {
  check_params(p);
  check_mu(mu, p);
  const double w = std::expm1(p.beta);
  std::vector<double> logs(static_cast<std::size_t>(p.q));
  double sq = 0.0;
  for (int c = 0; c < p.q; ++c) {
    logs[c] = p.d * std::log1p(w * mu[c]);
    sq += mu[c] * mu[c];
  }
  return log_sum_exp(logs) - 0.5 * p.d * std::log1p(w * sq);
}

std::pair<ColourDistribution, EdgeDistribution> marginal_map(const ColourDistribution& mu,
                                                             const PottsParams& p) {
  check_params(p);
  check_mu(mu, p);
  const int q = p.q;
  const double w = std::expm1(p.beta);
  std::vector<double> logs(static_cast<std::size_t>(q));
  double sq = 0.0;
  for (int c = 0; c < q; ++c) {
    logs[c] = p.d * std::log1p(w * mu[c]);
    sq += mu[c] * mu[c];
  }
  std::vector<double> nu(logs.size());
  soft_max(logs, nu);

  const double norm = 1.0 + w * sq;
  const double eb = std::exp(p.beta);
  std::vector<double> rho(static_cast<std::size_t>(q * q));
  for (int s = 0; s < q; ++s) {
    for (int t = 0; t < q; ++t) rho[s * q + t] = (s == t ? eb : 1.0) * mu[s] * mu[t] / norm;
  }
  return {ColourDistribution::from_weights(std::move(nu)), EdgeDistribution(q, std::move(rho))};
}

double first_moment_rate(const ColourDistribution& nu, const EdgeDistribution& rho,
                         const PottsParams& p) {
  check_params(p);
  if (nu.q() != p.q || rho.q() != p.q) throw std::invalid_argument("q mismatch");
  if (rho.row_sum_defect(nu) > 1e-9) throw std::invalid_argument("rho row sums must equal nu");
  double vertex = 0.0;
  for (int s = 0; s < p.q; ++s) vertex += xlogx(nu[s]);
  double edge = 0.0;
  double diag = 0.0;
  for (int s = 0; s < p.q; ++s) {
    diag += rho(s, s);
    for (int t = 0; t < p.q; ++t) edge += xlogx(rho(s, t));
  }
  return (p.d - 1) * vertex - 0.5 * p.d * edge + 0.5 * p.d * p.beta * diag;
}

OverlapTensor::OverlapTensor(int q, std::vector<double> values) : q_(q), values_(std::move(values)) {
  if (q < 1) throw std::invalid_argument("q must be positive");
  const auto size = static_cast<std::size_t>(q) * q * q * q;
  if (values_.size() != size) throw std::invalid_argument("overlap tensor needs q^4 entries");
  double total = 0.0;
  for (double v : values_) {
    if (!(v >= 0.0)) throw std::invalid_argument("overlap tensor entries must be nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("overlap tensor must sum to 1");
}

OverlapTensor OverlapTensor::product(const EdgeDistribution& rho) {
  const int q = rho.q();
  std::vector<double> values(static_cast<std::size_t>(q) * q * q * q);
  for (int s = 0; s < q; ++s)
    for (int s2 = 0; s2 < q; ++s2)
      for (int t = 0; t < q; ++t)
        for (int t2 = 0; t2 < q; ++t2)
          values[((s * q + s2) * q + t) * q + t2] = rho(s, t) * rho(s2, t2);
  return {q, std::move(values)};
}

double OverlapTensor::constraint_defect(const EdgeDistribution& rho) const {
  if (rho.q() != q_) throw std::invalid_argument("q mismatch");
  const int q = q_;
  double defect = 0.0;
  std::vector<double> first(static_cast<std::size_t>(q * q), 0.0);
  std::vector<double> second(static_cast<std::size_t>(q * q), 0.0);
  for (int s = 0; s < q; ++s)
    for (int s2 = 0; s2 < q; ++s2)
      for (int t = 0; t < q; ++t)
        for (int t2 = 0; t2 < q; ++t2) {
          const double v = (*this)(s, s2, t, t2);
          defect = std::max(defect, std::abs(v - (*this)(t, t2, s, s2)));
          first[s * q + t] += v;
          second[s2 * q + t2] += v;
        }
  for (int s = 0; s < q; ++s)
    for (int t = 0; t < q; ++t) {
      defect = std::max(defect, std::abs(first[s * q + t] - rho(s, t)));
      defect = std::max(defect, std::abs(second[s * q + t] - rho(s, t)));
    }
  return defect;
}

double second_moment_rate(const EdgeDistribution& rho, const OverlapTensor& r,
                          const PottsParams& p) {
  check_params(p);
  if (rho.q() != p.q || r.q() != p.q) throw std::invalid_argument("q mismatch");
  if (r.constraint_defect(rho) > 1e-9) {
    throw std::invalid_argument("overlap tensor violates its marginal constraints");
  }
  const int q = p.q;
  std::vector<double> omega(static_cast<std::size_t>(q * q), 0.0);
  double entropy = 0.0;
  double energy = 0.0;
  for (int s = 0; s < q; ++s)
    for (int s2 = 0; s2 < q; ++s2)
      for (int t = 0; t < q; ++t)
        for (int t2 = 0; t2 < q; ++t2) {
          const double v = r(s, s2, t, t2);
          omega[s * q + s2] += v;
          entropy += xlogx(v);
          energy += ((s == t ? 1 : 0) + (s2 == t2 ? 1 : 0)) * v;
        }
  double vertex = 0.0;
  for (double v : omega) vertex += xlogx(v);
  return (p.d - 1) * vertex - 0.5 * p.d * entropy + 0.5 * p.d * p.beta * energy;
}

MessageSet MessageSet::uniform(const MultiGraph& g, int q) {
  return {q, std::vector<double>(g.num_half_edges() * static_cast<std::size_t>(q), 1.0 / q)};
}

MessageSet MessageSet::random(const MultiGraph& g, int q, Rng& rng) {
  MessageSet m{q, std::vector<double>(g.num_half_edges() * static_cast<std::size_t>(q))};
  for (std::size_t h = 0; h < g.num_half_edges(); ++h) {
    double total = 0.0;
    for (int c = 0; c < q; ++c) {
      const double e = -std::log1p(-rng.uniform());
      m.values[h * q + c] = e;
      total += e;
    }
    for (int c = 0; c < q; ++c) m.values[h * q + c] /= total;
  }
  return m;
}

namespace {

void check_messages(const MultiGraph& g, const PottsParams& p, const MessageSet& m) {
  if (m.q != p.q || m.values.size() != g.num_half_edges() * static_cast<std::size_t>(p.q)) {
    throw std::invalid_argument("message set does not match the graph");
  }
}

// Per-vertex log incoming factors: a[h][c] = log(1 + w * msg_in(h)(c)), where
// msg_in(h) is the message arriving along h.
std::vector<double> incoming_logs(const MultiGraph& g, const PottsParams& p,
                                  const MessageSet& m) {
  const double w = std::expm1(p.beta);
  const int q = p.q;
  std::vector<double> a(m.values.size());
  for (HalfEdge h = 0; h < g.num_half_edges(); ++h) {
    const auto in = m.at(g.partner(h));
    for (int c = 0; c < q; ++c) a[h * q + c] = std::log1p(w * in[c]);
  }
  return a;
}

}  // namespace

double bethe_graph(const MultiGraph& g, const PottsParams& p, const MessageSet& messages) {
  check_graph_params(p);
  check_messages(g, p, messages);
  const int q = p.q;
  const double w = std::expm1(p.beta);
  const auto a = incoming_logs(g, p, messages);
  std::vector<double> total(static_cast<std::size_t>(q));
  double value = 0.0;
  for (int v = 0; v < g.num_vertices(); ++v) {
    std::fill(total.begin(), total.end(), 0.0);
    const HalfEdge end = g.first_half_edge(v) + g.vertex_degree(v);
    for (HalfEdge h = g.first_half_edge(v); h < end; ++h) {
      for (int c = 0; c < q; ++c) total[c] += a[h * q + c];
    }
    value += log_sum_exp(total);
  }
  for (HalfEdge h = 0; h < g.num_half_edges(); ++h) {
    if (h > g.partner(h)) continue;
    const auto x = messages.at(h);
    const auto y = messages.at(g.partner(h));
    double dot = 0.0;
    for (int c = 0; c < q; ++c) dot += x[c] * y[c];
    value -= std::log1p(w * dot);
  }
  return value / g.num_vertices();
}

GraphBpResult graph_bp(const MultiGraph& g, const PottsParams& p, MessageSet init,
                       double damping, int max_iters, double tol) {
  check_graph_params(p);
  check_messages(g, p, init);
  if (!(damping >= 0.0 && damping < 1.0)) throw std::invalid_argument("damping must be in [0,1)");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const int q = p.q;
  GraphBpResult result;
  result.messages = std::move(init);
  MessageSet next = result.messages;
  std::vector<double> total(static_cast<std::size_t>(q));
  std::vector<double> cavity(static_cast<std::size_t>(q));
  std::vector<double> update(static_cast<std::size_t>(q));

  for (int it = 1; it <= max_iters; ++it) {
    const auto a = incoming_logs(g, p, result.messages);
    double change = 0.0;
    for (int v = 0; v < g.num_vertices(); ++v) {
      const HalfEdge begin = g.first_half_edge(v);
      const HalfEdge end = begin + g.vertex_degree(v);
      std::fill(total.begin(), total.end(), 0.0);
      for (HalfEdge h = begin; h < end; ++h) {
        for (int c = 0; c < q; ++c) total[c] += a[h * q + c];
      }
      for (HalfEdge h = begin; h < end; ++h) {
        for (int c = 0; c < q; ++c) cavity[c] = total[c] - a[h * q + c];
        soft_max(cavity, update);
        for (int c = 0; c < q; ++c) {
          const double old = result.messages.values[h * q + c];
          const double fresh = damping * old + (1.0 - damping) * update[c];
          change = std::max(change, std::abs(fresh - old));
          next.values[h * q + c] = fresh;
        }
      }
    }
    std::swap(result.messages.values, next.values);
    result.iterations = it;
    result.last_change = change;
    if (change < tol) {
      result.converged = true;
      break;
    }
  }
  result.bethe_value = bethe_graph(g, p, result.messages);
  return result;
}

}  // namespace metapotts
