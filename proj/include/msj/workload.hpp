#pragma once

// Job classes, service-time laws, Poisson job streams and the many-server
// scalings used by the experiments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace msj {

using Time = double;

// ---------------------------------------------------------------------------
// Service-time distributions
// ---------------------------------------------------------------------------

struct Exponential {
  Time mean;
};

struct Deterministic {
  Time value;
};

/// Resamples uniformly with replacement from a fixed list of observations.
struct Empirical {
  std::shared_ptr<const std::vector<Time>> samples;
};

/// Uniform variate in [0, 1) built from the top 53 bits of a 64-bit draw.
/// Kept explicit so job streams are identical across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class ServiceDistribution {
 public:
  static ServiceDistribution exponential(Time mean) {
    if (!(mean > 0.0) || !std::isfinite(mean)) {
      throw std::invalid_argument("exponential mean must be positive and finite");
    }
    return ServiceDistribution{Exponential{mean}, mean};
  }

  static ServiceDistribution deterministic(Time value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument("deterministic service time must be positive and finite");
    }
    return ServiceDistribution{Deterministic{value}, value};
  }

  static ServiceDistribution empirical(std::vector<Time> samples) {
    if (samples.empty()) {
      throw std::invalid_argument("empirical distribution needs at least one sample");
    }
    for (Time x : samples) {
      if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::invalid_argument("empirical samples must be positive and finite");
      }
    }
    // Sorted before summing so the mean does not depend on input order.
    std::sort(samples.begin(), samples.end());
    const Time mean = std::accumulate(samples.begin(), samples.end(), 0.0) /
                      static_cast<double>(samples.size());
    return ServiceDistribution{
        Empirical{std::make_shared<const std::vector<Time>>(std::move(samples))}, mean};
  }

  Time mean() const { return mean_; }

  Time sample(std::mt19937_64& rng) const {
    return std::visit(
        [&](const auto& law) -> Time {
          using Law = std::decay_t<decltype(law)>;
          if constexpr (std::is_same_v<Law, Exponential>) {
            // 1 - u lies in (0, 1], so the log is finite.
            Time x = -law.mean * std::log1p(-unit_uniform(rng));
            return x > 0.0 ? x : std::numeric_limits<Time>::denorm_min();
          } else if constexpr (std::is_same_v<Law, Deterministic>) {
            return law.value;
          } else {
            const auto& s = *law.samples;
            return s[static_cast<std::size_t>(rng() % s.size())];
          }
        },
        law_);
  }

  const std::variant<Exponential, Deterministic, Empirical>& law() const { return law_; }

  std::string kind() const {
    switch (law_.index()) {
      case 0: return "exponential";
      case 1: return "deterministic";
      default: return "empirical";
    }
  }

 private:
  ServiceDistribution(std::variant<Exponential, Deterministic, Empirical> law, Time mean)
      : law_(std::move(law)), mean_(mean) {}

  std::variant<Exponential, Deterministic, Empirical> law_;
  Time mean_;
};

// ---------------------------------------------------------------------------
// Classes and system configuration
// ---------------------------------------------------------------------------

struct JobClass {
  int index = 0;
  std::int64_t need = 1;   // servers held simultaneously
  double share = 1.0;      // arrival probability
  ServiceDistribution service = ServiceDistribution::exponential(1.0);

  /// Expected server-time per arrival of this class, share * mean * need.
  double relative_demand() const {
    return share * service.mean() * static_cast<double>(need);
  }
};

inline constexpr double kShareTolerance = 1e-9;

inline void validate_classes(const std::vector<JobClass>& classes) {
  if (classes.empty()) throw std::invalid_argument("class list is empty");
  double total = 0.0;
  std::vector<int> seen;
  for (const auto& c : classes) {
    if (c.need < 1) throw std::invalid_argument("server need must be >= 1");
    if (!(c.share > 0.0 && c.share <= 1.0)) {
      throw std::invalid_argument("class share must lie in (0, 1]");
    }
    if (std::find(seen.begin(), seen.end(), c.index) != seen.end()) {
      throw std::invalid_argument("duplicate class index " + std::to_string(c.index));
    }
    seen.push_back(c.index);
    total += c.share;
  }
  if (std::abs(total - 1.0) > kShareTolerance) {
    throw std::invalid_argument("class shares must sum to 1 (got " + std::to_string(total) + ")");
  }
}

inline double total_relative_demand(const std::vector<JobClass>& classes) {
  double sum = 0.0;
  for (const auto& c : classes) sum += c.relative_demand();
  return sum;
}

inline std::int64_t max_need(const std::vector<JobClass>& classes) {
  std::int64_t m = 0;
  for (const auto& c : classes) m = std::max(m, c.need);
  return m;
}

struct SystemConfig {
  std::int64_t k = 1;
  double lambda = 1.0;
  std::vector<JobClass> classes;
  bool require_stable = true;

  double relative_demand(std::size_t i) const { return classes.at(i).relative_demand(); }
  double total_demand() const { return total_relative_demand(classes); }
  /// Offered work per unit of capacity, (lambda / k) * sum of relative demands.
  double load() const { return lambda / static_cast<double>(k) * total_demand(); }
  std::int64_t max_need() const { return msj::max_need(classes); }

  /// Throws std::invalid_argument when any invariant fails.
  void validate() const {
    validate_classes(classes);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw std::invalid_argument("arrival rate must be positive and finite");
    }
    if (k < max_need()) {
      throw std::invalid_argument("k=" + std::to_string(k) + " is smaller than the largest server need " +
                                  std::to_string(max_need()));
    }
    if (require_stable && !(load() < 1.0)) {
      throw std::invalid_argument("load " + std::to_string(load()) +
                                  " is not below 1 (disable require_stable to simulate overload)");
    }
  }
};

// ---------------------------------------------------------------------------
// Job streams
// ---------------------------------------------------------------------------

using JobId = std::uint64_t;

struct Job {
  JobId id = 0;
  int class_index = 0;   // position in SystemConfig::classes
  Time arrival_time = 0.0;
  Time service_time = 0.0;
  std::int64_t need = 1;

  friend bool operator==(const Job&, const Job&) = default;
};

class JobSource {
 public:
  virtual ~JobSource() = default;
  virtual std::optional<Job> next() = 0;
};

/// splitmix64 finalizer; used to derive replication seeds from a root.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  return std::mt19937_64(seq);
}

/// Poisson arrivals with i.i.d. class labels and service times. Arrival gaps,
/// labels and each class's service draws come from separate sub-streams of
/// the seed, so two policies given the same seed see the same jobs.
class PoissonJobSource final : public JobSource {
 public:
  PoissonJobSource(const SystemConfig& config, std::int64_t count, std::int64_t seed)
      : config_(config), remaining_(count) {
    if (count < 1) throw std::invalid_argument("job count must be >= 1");
    if (seed < 0) throw std::invalid_argument("seed must be non-negative");
    validate_classes(config_.classes);
    if (!(config_.lambda > 0.0)) throw std::invalid_argument("arrival rate must be positive");
    const auto s = static_cast<std::uint64_t>(seed);
    gaps_ = substream(s, 1);
    labels_ = substream(s, 2);
    for (std::size_t i = 0; i < config_.classes.size(); ++i) {
      services_.push_back(substream(s, 100 + i));
    }
    double acc = 0.0;
    for (const auto& c : config_.classes) {
      acc += c.share;
      cumulative_.push_back(acc);
    }
  }

  std::optional<Job> next() override {
    if (remaining_ == 0) return std::nullopt;
    --remaining_;
    clock_ += -std::log1p(-unit_uniform(gaps_)) / config_.lambda;
    const double u = unit_uniform(labels_) * cumulative_.back();
    std::size_t i = 0;
    while (i + 1 < cumulative_.size() && u >= cumulative_[i]) ++i;
    const auto& cls = config_.classes[i];
    Job job;
    job.id = next_id_++;
    job.class_index = static_cast<int>(i);
    job.arrival_time = clock_;
    job.service_time = cls.service.sample(services_[i]);
    job.need = cls.need;
    return job;
  }

 private:
  SystemConfig config_;
  std::int64_t remaining_;
  std::mt19937_64 gaps_, labels_;
  std::vector<std::mt19937_64> services_;
  std::vector<double> cumulative_;
  Time clock_ = 0.0;
  JobId next_id_ = 0;
};

inline std::vector<Job> arrival_stream(const SystemConfig& config, std::int64_t count,
                                       std::int64_t seed) {
  PoissonJobSource source(config, count, seed);
  std::vector<Job> jobs;
  jobs.reserve(static_cast<std::size_t>(count));
  while (auto job = source.next()) jobs.push_back(*job);
  return jobs;
}

// ---------------------------------------------------------------------------
// Many-server scalings
// ---------------------------------------------------------------------------

inline std::vector<JobClass> scale_needs(std::vector<JobClass> classes, std::int64_t f_k) {
  for (auto& c : classes) c.need *= f_k;
  return classes;
}

/// Grows arrival rate and needs with k while holding the load fixed:
/// lambda' = lambda * (k / base.k) / f_k, need' = need * f_k.
inline SystemConfig scale_subcritical(const SystemConfig& base, std::int64_t k, std::int64_t f_k) {
  if (f_k < 1) throw std::invalid_argument("f_k must be >= 1");
  if (k < f_k * base.max_need()) {
    throw std::invalid_argument("k must be at least f_k times the largest base need");
  }
  SystemConfig out = base;
  out.k = k;
  out.classes = scale_needs(base.classes, f_k);
  out.lambda = base.lambda * (static_cast<double>(k) / static_cast<double>(base.k)) /
               static_cast<double>(f_k);
  return out;
}

/// Target load 1 - theta * sqrt(f_k / k) for the critically loaded scaling.
inline double halfin_whitt_load(std::int64_t k, std::int64_t f_k, double theta) {
  return 1.0 - theta * std::sqrt(static_cast<double>(f_k) / static_cast<double>(k));
}

inline SystemConfig scale_halfin_whitt(const std::vector<JobClass>& base_classes, std::int64_t k,
                                       std::int64_t f_k, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  if (f_k < 1) throw std::invalid_argument("f_k must be >= 1");
  validate_classes(base_classes);
  const double rho = halfin_whitt_load(k, f_k, theta);
  if (!(rho > 0.0)) {
    throw std::invalid_argument("theta too large: target load 1 - theta*sqrt(f_k/k) is not positive");
  }
  SystemConfig out;
  out.k = k;
  out.classes = scale_needs(base_classes, f_k);
  if (k < out.max_need()) throw std::invalid_argument("k is smaller than the scaled largest need");
  out.lambda = rho * static_cast<double>(k) /
               (static_cast<double>(f_k) * total_relative_demand(base_classes));
  return out;
}

/// Growth factor for the Figure-1 family: floor((k/32)^(2/3)), computed in
/// integers as the largest f with 1024 * f^3 <= k^2.
inline std::int64_t figure1_growth(std::int64_t k) {
  if (k < 1) return 0;
  const auto k2 = static_cast<long double>(k) * static_cast<long double>(k);
  std::int64_t f = static_cast<std::int64_t>(std::cbrt(static_cast<double>(k2 / 1024.0L)));
  while (f > 0 && 1024.0L * f * f * f > k2) --f;
  while (1024.0L * (f + 1) * (f + 1) * (f + 1) <= k2) ++f;
  return f;
}

/// Unit-scale "many small, few large" mix: (1, mean 1) w.p. 0.95 and
/// (2, 40), (4, 20), (8, 10) w.p. 0.05/3 each, exponential service.
inline std::vector<JobClass> figure1_classes() {
  const double large = 0.05 / 3.0;
  return {
      JobClass{0, 1, 0.95, ServiceDistribution::exponential(1.0)},
      JobClass{1, 2, large, ServiceDistribution::exponential(40.0)},
      JobClass{2, 4, large, ServiceDistribution::exponential(20.0)},
      JobClass{3, 8, large, ServiceDistribution::exponential(10.0)},
  };
}

inline SystemConfig figure1_workload(std::int64_t k, double theta) {
  if (k < 32) throw std::invalid_argument("figure-1 workload needs k >= 32");
  const std::int64_t f_k = figure1_growth(k);
  if (f_k < 1) throw std::invalid_argument("figure-1 growth factor is zero");
  return scale_halfin_whitt(figure1_classes(), k, f_k, theta);
}

/// Fixed-k configuration at a prescribed load: lambda = rho * k / demand.
inline SystemConfig config_at_load(const std::vector<JobClass>& classes, std::int64_t k, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("load must be positive");
  SystemConfig out;
  out.k = k;
  out.classes = classes;
  out.lambda = rho * static_cast<double>(k) / total_relative_demand(classes);
  out.require_stable = rho < 1.0;
  return out;
}

/// Mean service time of an arbitrary arrival, sum of share * mean.
inline double mean_service_time(const std::vector<JobClass>& classes) {
  double m = 0.0;
  for (const auto& c : classes) m += c.share * c.service.mean();
  return m;
}

}  // namespace msj
