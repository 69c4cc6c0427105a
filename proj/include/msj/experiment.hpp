#pragma once

// Replications, cross-replication summaries and the CSV row format shared by
// every harness command.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "msj/engine.hpp"
#include "msj/policies.hpp"
#include "msj/workload.hpp"

namespace msj {

/// Seed of replication r under a root seed. Every policy sees the same
/// seed for the same r, so comparisons use common random numbers.
inline std::uint64_t replication_seed(std::uint64_t root, std::size_t r) {
  return mix_seed(root ^ (0x5851f42d4c957f2dULL * (r + 1))) & 0x7fffffffffffffffULL;
}

/// Runs fn(0..n-1) on up to `threads` workers. The first exception thrown by
/// any task is rethrown once all workers have stopped.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Estimate {
  double mean = 0.0;
  double ci95 = 0.0;  // normal approximation, 1.96 * sd / sqrt(R)

  double lo() const { return mean - ci95; }
  double hi() const { return mean + ci95; }
  /// True when this interval lies entirely below `other`'s.
  bool below(const Estimate& other) const { return hi() < other.lo(); }
};

inline Estimate estimate(const std::vector<double>& xs) {
  Estimate e;
  if (xs.empty()) return e;
  for (double x : xs) e.mean += x;
  e.mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return e;
  double v = 0.0;
  for (double x : xs) v += (x - e.mean) * (x - e.mean);
  v /= static_cast<double>(xs.size() - 1);
  e.ci95 = 1.96 * std::sqrt(v / static_cast<double>(xs.size()));
  return e;
}

struct Summary {
  std::string policy;
  Estimate mean_response;
  Estimate p_helper;
  Estimate helper_utilization;
  std::vector<Estimate> class_p_helper;
  std::vector<Estimate> class_mean_response;
};

inline Summary summarize(const std::vector<SimOutcome>& runs) {
  Summary s;
  if (runs.empty()) return s;
  s.policy = runs.front().policy;
  auto field = [&](auto get) {
    std::vector<double> xs;
    for (const auto& r : runs) xs.push_back(get(r));
    return estimate(xs);
  };
  s.mean_response = field([](const SimOutcome& r) { return r.mean_response; });
  s.p_helper = field([](const SimOutcome& r) { return r.p_helper; });
  s.helper_utilization = field([](const SimOutcome& r) { return r.helper_utilization; });
  for (std::size_t c = 0; c < runs.front().per_class.size(); ++c) {
    s.class_p_helper.push_back(field([&](const SimOutcome& r) { return r.per_class[c].p_helper; }));
    s.class_mean_response.push_back(field([&](const SimOutcome& r) { return r.per_class[c].mean_response; }));
  }
  return s;
}

/// R replications of one (config, policy) pair, ordered by replication.
inline std::vector<SimOutcome> replicate(const SystemConfig& config, const PolicySpec& spec, RunOptions opts,
                                         std::uint64_t root_seed, std::size_t replications,
                                         unsigned threads = 1) {
  std::vector<SimOutcome> out(replications);
  parallel_for(replications, threads, [&](std::size_t r) {
    RunOptions o = opts;
    o.seed = replication_seed(root_seed, r);
    out[r] = run(config, spec, o);
  });
  return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Identifies the experiment point a row belongs to.
struct RowContext {
  std::int64_t k = 0;
  std::int64_t f_k = 1;
  double rho = 0.0;
  double theta = 0.0;  // 0 when the row is not from a critically loaded scaling
  double warmup = 0.0;
};

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  // Assumes the "C" numeric locale (dot decimal separator).
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

inline std::vector<std::string> csv_header(std::size_t classes, const std::vector<std::string>& extra = {}) {
  std::vector<std::string> cols = {"policy",  "k",        "f_k",  "rho",           "theta", "seed",
                                   "arrivals", "warmup", "mean_response", "ci95", "p_helper",
                                   "helper_util"};
  cols.insert(cols.end(), extra.begin(), extra.end());
  for (std::size_t c = 0; c < classes; ++c) {
    cols.push_back("class" + std::to_string(c) + "_mean_response");
    cols.push_back("class" + std::to_string(c) + "_p_helper");
  }
  return cols;
}

inline std::string join(const std::vector<std::string>& cells, char sep = ',') {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += sep;
    line += cells[i];
  }
  return line;
}

inline std::vector<std::string> csv_row(const SimOutcome& o, const RowContext& ctx,
                                        const std::vector<double>& extra = {}) {
  std::vector<std::string> cells = {o.policy,
                                    std::to_string(ctx.k),
                                    std::to_string(ctx.f_k),
                                    format_number(ctx.rho),
                                    format_number(ctx.theta),
                                    std::to_string(o.seed),
                                    std::to_string(o.arrivals),
                                    format_number(ctx.warmup),
                                    format_number(o.mean_response),
                                    format_number(o.response_ci95),
                                    format_number(o.p_helper),
                                    format_number(o.helper_utilization)};
  for (double x : extra) cells.push_back(format_number(x));
  for (const auto& pc : o.per_class) {
    cells.push_back(format_number(pc.mean_response));
    cells.push_back(format_number(pc.p_helper));
  }
  return cells;
}

}  // namespace msj
