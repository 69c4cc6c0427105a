#pragma once

// Closed-form M/GI/s/s machinery and the bounds built on it.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "msj/partition.hpp"
#include "msj/workload.hpp"

namespace msj {

struct ErlangResult {
  std::int64_t servers = 0;
  double offered_load = 0.0;
  double blocking = 1.0;
};

/// Erlang loss probability E_s(a) of an M/GI/s/s queue with offered load a.
///
/// Uses the forward recursion E_j = a E_{j-1} / (j + a E_{j-1}) in its
/// reciprocal form 1/E_j = 1 + (j/a) / E_{j-1}, which is O(s), never
/// overflows for loads in the thousands and loses at most ~s ulps.
/// Returns 0 when the true value is below the double range.
inline double erlang_b(std::int64_t s, double a) {
  if (s < 0) throw std::invalid_argument("erlang_b: server count must be non-negative");
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("erlang_b: offered load must be finite and non-negative");
  }
  if (s == 0) return 1.0;
  if (a == 0.0) return 0.0;
  double inv = 1.0;
  for (std::int64_t j = 1; j <= s; ++j) {
    inv = 1.0 + inv * (static_cast<double>(j) / a);
    if (std::isinf(inv)) return 0.0;
  }
  return 1.0 / inv;
}

inline ErlangResult erlang(std::int64_t s, double a) { return {s, a, erlang_b(s, a)}; }

/// Mean sojourn in an M/GI/s/s queue counting blocked jobs as zero-time.
inline double mgss_mean_response(double d, std::int64_t s, double a) {
  if (!(d > 0.0)) throw std::invalid_argument("mean service time must be positive");
  return d * (1.0 - erlang_b(s, a));
}

// Standard normal density and distribution function. The CDF goes through
// std::erfc, which is accurate to a few ulps over the whole real line, so
// the upper tail keeps full relative precision.
inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Limit of sqrt(s) E_s(a) in the Halfin-Whitt regime: phi(theta) / Phi(theta).
inline double halfin_whitt_constant(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("halfin_whitt_constant: theta must be positive");
  }
  return normal_pdf(theta) / normal_cdf(theta);
}

/// Left-hand side of the helper-load stability test,
/// (lambda / h) * sum_i rho_i * E_{s_i}(lambda * share_i * mean_i).
/// The pool is declared stable when this is below 1 and the load is below 1.
/// Zero when there are no helpers.
inline double stability_lhs(const SystemConfig& config, const Partition& p) {
  check_partition_matches(config, p);
  if (p.helper == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& c = config.classes[i];
    sum += c.relative_demand() * erlang_b(p.slots[i], config.lambda * c.share * c.service.mean());
  }
  return config.lambda / static_cast<double>(p.helper) * sum;
}

/// Probability that an arrival is routed to the helpers when routing is
/// irrevocable: sum_i share_i * E_{s_i}(lambda * share_i * mean_i). Classes
/// with no slots contribute their whole share (E_0 = 1).
inline double helper_routing_bound(const SystemConfig& config, const Partition& p) {
  check_partition_matches(config, p);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& c = config.classes[i];
    sum += c.share * erlang_b(p.slots[i], config.lambda * c.share * c.service.mean());
  }
  return std::min(1.0, std::max(0.0, sum));
}

/// Limit bound on sqrt(k / f_k) * P_H in the critically loaded regime:
/// theta * sum_i (share_i / theta_i) * phi(theta_i) / Phi(theta_i),
/// theta_i = theta * sqrt(rho_i / (n_i * rho)). `classes` carry the unit
/// (unscaled) needs.
inline double critical_bound(double theta, const std::vector<JobClass>& classes) {
  if (!(theta > 0.0)) throw std::invalid_argument("critical_bound: theta must be positive");
  validate_classes(classes);
  const double demand = total_relative_demand(classes);
  if (!(demand > 0.0) || !std::isfinite(demand)) {
    throw std::invalid_argument("critical_bound: degenerate class demands");
  }
  double sum = 0.0;
  for (const auto& c : classes) {
    const double theta_i =
        theta * std::sqrt(c.relative_demand() / (static_cast<double>(c.need) * demand));
    sum += c.share / theta_i * halfin_whitt_constant(theta_i);
  }
  return theta * sum;
}

}  // namespace msj
