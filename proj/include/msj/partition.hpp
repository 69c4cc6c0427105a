#pragma once

// Static balanced sub-partition of the k servers into per-class pools and a
// shared helper pool.
//
// Class i targets t_i = k * rho_i / (n_i * rho) slots, where rho_i is the
// class's relative demand. If every t_i is integral the split is exact and
// there are no helpers. Otherwise every target is shrunk by the largest
// factor psi in [0, 1] that leaves at least max_i n_i servers over for the
// helper pool. The leftover k - sum_i floor(psi t_i) n_i is a nonincreasing
// step function of psi that drops at the breakpoints m / t_i, so the search
// only visits those. When feasibility is lost exactly at a breakpoint the
// feasible set is right-open and its interior allocation is used; the psi
// reported is the largest feasible breakpoint.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "msj/workload.hpp"

namespace msj {

struct Partition {
  std::vector<std::int64_t> servers;  // a_i
  std::vector<std::int64_t> slots;    // s_i = a_i / n_i
  std::vector<bool> helper_only;      // s_i == 0: class always routed to helpers
  std::int64_t helper = 0;            // |H|
  double psi = 1.0;
  bool exact = false;                 // all targets integral

  std::size_t size() const { return slots.size(); }
};

namespace detail {

inline constexpr double kIntegralTolerance = 1e-9;

/// floor(x), snapping values within a relative 1e-9 of an integer onto it.
inline std::int64_t snapped_floor(long double x) {
  const long double r = std::round(x);
  if (std::abs(x - r) <= kIntegralTolerance * std::max<long double>(1.0L, std::abs(x))) {
    return static_cast<std::int64_t>(r);
  }
  return static_cast<std::int64_t>(std::floor(x));
}

inline bool near_integral(long double x) {
  const long double r = std::round(x);
  return std::abs(x - r) <= kIntegralTolerance * std::max<long double>(1.0L, std::abs(x));
}

}  // namespace detail

/// Per-class slot targets k * rho_i / (n_i * rho) = k * share_i * mean_i / rho.
inline std::vector<long double> slot_targets(const SystemConfig& config) {
  const long double demand = config.total_demand();
  std::vector<long double> t;
  for (const auto& c : config.classes) {
    t.push_back(static_cast<long double>(config.k) * c.share * c.service.mean() / demand);
  }
  return t;
}

inline Partition compute_partition(const SystemConfig& config, bool fold_to_helper = true) {
  validate_classes(config.classes);
  const std::int64_t nmax = config.max_need();
  if (config.k < nmax) {
    throw std::invalid_argument("k=" + std::to_string(config.k) +
                                " is smaller than the largest server need " + std::to_string(nmax));
  }
  const std::size_t C = config.classes.size();
  const auto targets = slot_targets(config);
  // w_i = share_i * mean_i; the target ratio t_i / t_j equals w_i / w_j.
  std::vector<long double> w(C);
  for (std::size_t i = 0; i < C; ++i) {
    w[i] = static_cast<long double>(config.classes[i].share) * config.classes[i].service.mean();
  }

  Partition p;
  p.slots.assign(C, 0);

  auto leftover = [&](const std::vector<std::int64_t>& slots) {
    std::int64_t used = 0;
    for (std::size_t i = 0; i < C; ++i) used += slots[i] * config.classes[i].need;
    return config.k - used;
  };

  const bool exact = std::all_of(targets.begin(), targets.end(), detail::near_integral);
  std::vector<std::int64_t> at_one(C);
  for (std::size_t i = 0; i < C; ++i) at_one[i] = detail::snapped_floor(targets[i]);

  if (exact || leftover(at_one) >= nmax) {
    p.slots = at_one;
    p.psi = 1.0;
    p.exact = exact;
  } else {
    // Breakpoints m / t_j below 1, visited from the largest down. The slot
    // vector at a breakpoint (j, m) is floor(m * w_i / w_j), exactly m for i == j.
    struct Breakpoint {
      long double value;
      std::size_t cls;
      std::int64_t m;
    };
    std::vector<Breakpoint> points;
    for (std::size_t j = 0; j < C; ++j) {
      for (std::int64_t m = 1; m <= at_one[j]; ++m) {
        const long double v = static_cast<long double>(m) / targets[j];
        if (v < 1.0L && !(m == at_one[j] && detail::near_integral(targets[j]))) {
          points.push_back({v, j, m});
        }
      }
    }
    std::sort(points.begin(), points.end(),
              [](const Breakpoint& a, const Breakpoint& b) { return a.value > b.value; });
    p.psi = 0.0;
    std::vector<std::int64_t> slots(C);
    for (const auto& bp : points) {
      for (std::size_t i = 0; i < C; ++i) {
        slots[i] = (i == bp.cls) ? bp.m
                                 : detail::snapped_floor(static_cast<long double>(bp.m) * w[i] / w[bp.cls]);
      }
      if (leftover(slots) >= nmax) {
        p.slots = slots;
        p.psi = static_cast<double>(bp.value);
        break;
      }
    }
  }

  p.servers.resize(C);
  p.helper_only.resize(C);
  for (std::size_t i = 0; i < C; ++i) {
    p.servers[i] = p.slots[i] * config.classes[i].need;
    p.helper_only[i] = p.slots[i] == 0;
    if (p.helper_only[i] && !fold_to_helper) {
      throw std::invalid_argument("class " + std::to_string(i) +
                                  " receives no dedicated servers; enable fold-to-helper");
    }
  }
  p.helper = leftover(p.slots);
  return p;
}

/// Throws if `p` could not have been produced for `config`.
inline void check_partition_matches(const SystemConfig& config, const Partition& p) {
  if (p.size() != config.classes.size() || p.servers.size() != p.slots.size()) {
    throw std::invalid_argument("partition and configuration disagree on the number of classes");
  }
  std::int64_t total = p.helper;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.servers[i] != p.slots[i] * config.classes[i].need) {
      throw std::invalid_argument("partition pool size is not slots * need for class " +
                                  std::to_string(i));
    }
    total += p.servers[i];
  }
  if (total != config.k) throw std::invalid_argument("partition does not cover k servers");
}

}  // namespace msj
