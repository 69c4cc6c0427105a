#pragma once

// Scheduling policies for the multiserver-job model.
//
//   fcfs                 head-of-line FCFS, nonpreemptive
//   ff-backfill          FCFS order, any waiting job that fits starts
//   lsf / msf            least / most servers first, preempt-resume
//   ff-srpt              first-fit by least remaining time, preempt-resume
//   serverfilling        arrival-order prefix covering k, packed by need
//   serverfilling-srpt   size-ordered prefix covering k, packed by need
//   bs:<aux>             balanced splitting with helper discipline <aux>
//   modifiedbs:<aux>     balanced splitting without pulls from the helpers

#include <algorithm>
#include <cctype>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "msj/engine.hpp"
#include "msj/partition.hpp"
#include "msj/workload.hpp"

namespace msj {

enum class PolicyKind {
  Fcfs,
  LeastServersFirst,
  MostServersFirst,
  FirstFitBackfill,
  FirstFitSrpt,
  ServerFilling,
  ServerFillingSrpt,
  BalancedSplitting,
  ModifiedBalancedSplitting,
};

inline Capabilities capabilities_of(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Fcfs:
    case PolicyKind::FirstFitBackfill:
    case PolicyKind::BalancedSplitting:
    case PolicyKind::ModifiedBalancedSplitting:
      return {false, false};
    case PolicyKind::LeastServersFirst:
    case PolicyKind::MostServersFirst:
    case PolicyKind::ServerFilling:
      return {true, false};
    case PolicyKind::FirstFitSrpt:
    case PolicyKind::ServerFillingSrpt:
      return {true, true};
  }
  return {};
}

struct PolicySpec {
  PolicyKind kind = PolicyKind::Fcfs;
  std::shared_ptr<const PolicySpec> aux;  // helper discipline for the splitting policies

  Capabilities capabilities() const { return capabilities_of(kind); }
  bool splits() const {
    return kind == PolicyKind::BalancedSplitting || kind == PolicyKind::ModifiedBalancedSplitting;
  }

  std::string to_string() const {
    switch (kind) {
      case PolicyKind::Fcfs: return "fcfs";
      case PolicyKind::LeastServersFirst: return "lsf";
      case PolicyKind::MostServersFirst: return "msf";
      case PolicyKind::FirstFitBackfill: return "ff-backfill";
      case PolicyKind::FirstFitSrpt: return "ff-srpt";
      case PolicyKind::ServerFilling: return "serverfilling";
      case PolicyKind::ServerFillingSrpt: return "serverfilling-srpt";
      case PolicyKind::BalancedSplitting: return "bs:" + (aux ? aux->to_string() : "fcfs");
      case PolicyKind::ModifiedBalancedSplitting:
        return "modifiedbs:" + (aux ? aux->to_string() : "fcfs");
    }
    return "?";
  }

  static PolicySpec simple(PolicyKind kind) { return PolicySpec{kind, nullptr}; }
  static PolicySpec balanced(PolicyKind aux = PolicyKind::Fcfs, bool modified = false) {
    return PolicySpec{modified ? PolicyKind::ModifiedBalancedSplitting : PolicyKind::BalancedSplitting,
                      std::make_shared<const PolicySpec>(simple(aux))};
  }
};

/// Parses names such as "fcfs", "serverfilling-srpt", "bs:fcfs",
/// "modifiedbs:ff-backfill". A bare "bs" uses FCFS on the helpers.
inline PolicySpec parse_policy(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);

  static const std::map<std::string, PolicyKind> names = {
      {"fcfs", PolicyKind::Fcfs},
      {"lsf", PolicyKind::LeastServersFirst},
      {"least-servers-first", PolicyKind::LeastServersFirst},
      {"msf", PolicyKind::MostServersFirst},
      {"most-servers-first", PolicyKind::MostServersFirst},
      {"ff-backfill", PolicyKind::FirstFitBackfill},
      {"backfill", PolicyKind::FirstFitBackfill},
      {"ff-srpt", PolicyKind::FirstFitSrpt},
      {"serverfilling", PolicyKind::ServerFilling},
      {"sf", PolicyKind::ServerFilling},
      {"serverfilling-srpt", PolicyKind::ServerFillingSrpt},
      {"sf-srpt", PolicyKind::ServerFillingSrpt},
      {"bs", PolicyKind::BalancedSplitting},
      {"modifiedbs", PolicyKind::ModifiedBalancedSplitting},
      {"mbs", PolicyKind::ModifiedBalancedSplitting},
  };
  auto it = names.find(head);
  if (it == names.end()) throw std::invalid_argument("unknown policy '" + text + "'");
  PolicySpec spec{it->second, nullptr};
  if (spec.splits()) {
    spec.aux = std::make_shared<const PolicySpec>(parse_policy(tail.empty() ? "fcfs" : tail));
    if (spec.aux->splits()) throw std::invalid_argument("helper discipline cannot itself split servers");
  } else if (!tail.empty()) {
    throw std::invalid_argument("policy '" + head + "' takes no helper discipline");
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Nonpreemptive queue disciplines on a single pool
// ---------------------------------------------------------------------------

/// Waiting line for one pool. Jobs are kept in arrival (id) order.
class WaitingLine {
 public:
  virtual ~WaitingLine() = default;
  virtual void enqueue(const Job& job) {
    waiting_.emplace(job.id, job);
    ++needs_[job.need];
  }
  /// Removes a job that has not started yet; false if it is not waiting.
  bool remove(JobId id) {
    auto it = waiting_.find(id);
    if (it == waiting_.end()) return false;
    forget_need(it->second.need);
    waiting_.erase(it);
    return true;
  }
  bool empty() const { return waiting_.empty(); }
  std::size_t size() const { return waiting_.size(); }

  /// Appends starts for `pool`, consuming from `idle`.
  virtual void dispatch(PoolId pool, std::int64_t& idle, std::vector<StartDecision>& out) = 0;

 protected:
  void forget_need(std::int64_t need) {
    auto n = needs_.find(need);
    if (--n->second == 0) needs_.erase(n);
  }
  void take(std::map<JobId, Job>::iterator it, PoolId pool, std::int64_t& idle,
            std::vector<StartDecision>& out) {
    idle -= it->second.need;
    out.push_back({it->first, pool});
    forget_need(it->second.need);
  }

  std::map<JobId, Job> waiting_;
  std::map<std::int64_t, std::int64_t> needs_;  // need -> count, for early exit
};

class FcfsLine final : public WaitingLine {
 public:
  void dispatch(PoolId pool, std::int64_t& idle, std::vector<StartDecision>& out) override {
    while (!waiting_.empty() && waiting_.begin()->second.need <= idle) {
      take(waiting_.begin(), pool, idle, out);
      waiting_.erase(waiting_.begin());
    }
  }
};

class BackfillLine final : public WaitingLine {
 public:
  void dispatch(PoolId pool, std::int64_t& idle, std::vector<StartDecision>& out) override {
    for (auto it = waiting_.begin(); it != waiting_.end();) {
      if (needs_.empty() || needs_.begin()->first > idle) break;
      if (it->second.need <= idle) {
        take(it, pool, idle, out);
        it = waiting_.erase(it);
      } else {
        ++it;
      }
    }
  }
};

inline std::unique_ptr<WaitingLine> make_line(const PolicySpec& spec) {
  switch (spec.kind) {
    case PolicyKind::Fcfs: return std::make_unique<FcfsLine>();
    case PolicyKind::FirstFitBackfill: return std::make_unique<BackfillLine>();
    default:
      throw std::invalid_argument("policy '" + spec.to_string() +
                                  "' is not a nonpreemptive, size-oblivious single-pool discipline");
  }
}

/// FCFS or first-fit backfilling over all k servers.
class SinglePoolPolicy final : public Policy {
 public:
  SinglePoolPolicy(const PolicySpec& spec, std::int64_t k) : spec_(spec), k_(k), line_(make_line(spec)) {}

  std::string name() const override { return spec_.to_string(); }
  Capabilities capabilities() const override { return spec_.capabilities(); }
  std::vector<PoolSpec> pool_layout() const override { return {{"all", k_}}; }

  Decisions on_arrival(const ClusterState& state, const Job& job) override {
    line_->enqueue(job);
    return dispatch(state);
  }
  Decisions on_departure(const ClusterState& state, const Job&, PoolId) override { return dispatch(state); }

 private:
  Decisions dispatch(const ClusterState& state) {
    Decisions d;
    std::int64_t idle = state.pool(0).idle();
    line_->dispatch(0, idle, d.starts);
    return d;
  }

  PolicySpec spec_;
  std::int64_t k_;
  std::unique_ptr<WaitingLine> line_;
};

// ---------------------------------------------------------------------------
// Preemptive policies that recompute the running set at every event
// ---------------------------------------------------------------------------

class RebuildPolicy : public Policy {
 public:
  RebuildPolicy(PolicyKind kind, std::int64_t k) : k_(k), spec_(PolicySpec::simple(kind)) {}

  std::string name() const override { return spec_.to_string(); }
  Capabilities capabilities() const override { return spec_.capabilities(); }
  std::vector<PoolSpec> pool_layout() const override { return {{"all", k_}}; }

  Decisions on_arrival(const ClusterState& state, const Job& job) override {
    jobs_.push_back(job);
    return rebuild(state);
  }
  Decisions on_departure(const ClusterState& state, const Job& job, PoolId) override {
    auto it = std::lower_bound(jobs_.begin(), jobs_.end(), job.id,
                               [](const Job& j, JobId id) { return j.id < id; });
    if (it != jobs_.end() && it->id == job.id) jobs_.erase(it);
    return rebuild(state);
  }

 protected:
  struct Candidate {
    JobId id;
    std::int64_t need;
    double remaining;
  };

  /// Jobs to run, given every job in system in arrival order.
  virtual std::vector<JobId> select(std::vector<Candidate>& jobs) const = 0;

  /// Walks `order`, placing every job that fits; with `stop_at_misfit` the
  /// walk ends at the first job that does not fit.
  std::vector<JobId> pack(const std::vector<Candidate>& order, bool stop_at_misfit) const {
    std::vector<JobId> chosen;
    std::int64_t free = k_;
    for (const auto& c : order) {
      if (free == 0) break;
      if (c.need <= free) {
        chosen.push_back(c.id);
        free -= c.need;
      } else if (stop_at_misfit) {
        break;
      }
    }
    return chosen;
  }

  std::int64_t k_;

 private:
  Decisions rebuild(const ClusterState& state) {
    std::vector<Candidate> candidates;
    candidates.reserve(jobs_.size());
    for (const auto& j : jobs_) candidates.push_back({j.id, j.need, state.remaining(j.id)});
    std::vector<JobId> keep = select(candidates);
    std::sort(keep.begin(), keep.end());
    Decisions d;
    for (const auto& j : jobs_) {
      const bool wanted = std::binary_search(keep.begin(), keep.end(), j.id);
      const bool running = state.running(j.id);
      if (running && !wanted) d.preemptions.push_back(j.id);
      if (!running && wanted) d.starts.push_back({j.id, 0});
    }
    return d;
  }

  PolicySpec spec_;
  std::vector<Job> jobs_;  // in system, arrival order
};

class ServersFirstPolicy final : public RebuildPolicy {
 public:
  ServersFirstPolicy(bool most, std::int64_t k)
      : RebuildPolicy(most ? PolicyKind::MostServersFirst : PolicyKind::LeastServersFirst, k), most_(most) {}

 protected:
  std::vector<JobId> select(std::vector<Candidate>& jobs) const override {
    std::stable_sort(jobs.begin(), jobs.end(), [&](const Candidate& a, const Candidate& b) {
      return most_ ? a.need > b.need : a.need < b.need;
    });
    // Ascending needs: once one job misfits, every later one does too.
    return pack(jobs, !most_);
  }

 private:
  bool most_;
};

class FirstFitSrptPolicy final : public RebuildPolicy {
 public:
  explicit FirstFitSrptPolicy(std::int64_t k) : RebuildPolicy(PolicyKind::FirstFitSrpt, k) {}

 protected:
  std::vector<JobId> select(std::vector<Candidate>& jobs) const override {
    std::stable_sort(jobs.begin(), jobs.end(),
                     [](const Candidate& a, const Candidate& b) { return a.remaining < b.remaining; });
    return pack(jobs, false);
  }
};

class ServerFillingPolicy final : public RebuildPolicy {
 public:
  ServerFillingPolicy(bool srpt, std::int64_t k)
      : RebuildPolicy(srpt ? PolicyKind::ServerFillingSrpt : PolicyKind::ServerFilling, k), srpt_(srpt) {}

 protected:
  std::vector<JobId> select(std::vector<Candidate>& jobs) const override {
    if (srpt_) {
      // Size = remaining time * need; arrival order breaks ties.
      std::stable_sort(jobs.begin(), jobs.end(), [](const Candidate& a, const Candidate& b) {
        return a.remaining * static_cast<double>(a.need) < b.remaining * static_cast<double>(b.need);
      });
    }
    std::size_t prefix = 0;
    std::int64_t cumulative = 0;
    while (prefix < jobs.size() && cumulative < k_) cumulative += jobs[prefix++].need;
    std::vector<Candidate> m(jobs.begin(), jobs.begin() + static_cast<std::ptrdiff_t>(prefix));
    if (cumulative < k_) {
      std::vector<JobId> all;
      for (const auto& c : m) all.push_back(c.id);
      return all;
    }
    if (srpt_) {
      std::stable_sort(m.begin(), m.end(), [](const Candidate& a, const Candidate& b) {
        if (a.need != b.need) return a.need > b.need;
        return a.remaining < b.remaining;
      });
      return pack(m, true);
    }
    // Largest need first, arrival order on ties. A job that cannot be packed
    // blocks every job of the prefix that arrived after it.
    std::stable_sort(m.begin(), m.end(), [](const Candidate& a, const Candidate& b) { return a.need > b.need; });
    std::vector<JobId> chosen;
    std::int64_t free = k_;
    JobId cutoff = std::numeric_limits<JobId>::max();
    for (const auto& c : m) {
      if (free == 0) break;
      if (c.id > cutoff) continue;
      if (c.need <= free) {
        chosen.push_back(c.id);
        free -= c.need;
      } else {
        cutoff = std::min(cutoff, c.id);
      }
    }
    return chosen;
  }

 private:
  bool srpt_;
};

// ---------------------------------------------------------------------------
// Balanced splitting
// ---------------------------------------------------------------------------

/// Pools 0..C-1 are the per-class pools, pool C the helpers. An arriving
/// class-i job starts in its pool when a slot is free, otherwise it joins the
/// helper line. With pulls enabled, a departure from pool i hands the freed
/// slot to the oldest class-i job still waiting in the helper line; without
/// them (the modified variant) routing is irrevocable.
class BalancedSplittingPolicy final : public Policy {
 public:
  BalancedSplittingPolicy(const PolicySpec& spec, const SystemConfig& config)
      : BalancedSplittingPolicy(spec, config, compute_partition(config)) {}

  BalancedSplittingPolicy(const PolicySpec& spec, const SystemConfig& config, Partition partition)
      : spec_(spec), partition_(std::move(partition)), pull_(spec.kind == PolicyKind::BalancedSplitting) {
    if (!spec_.splits()) throw std::invalid_argument("not a splitting policy");
    const PolicySpec aux = spec_.aux ? *spec_.aux : PolicySpec::simple(PolicyKind::Fcfs);
    const auto caps = aux.capabilities();
    if (caps.preemptive || caps.size_aware) {
      throw std::invalid_argument("helper discipline '" + aux.to_string() +
                                  "' must be nonpreemptive and size-oblivious");
    }
    check_partition_matches(config, partition_);
    line_ = make_line(aux);
    for (const auto& c : config.classes) needs_.push_back(c.need);
    waiting_by_class_.resize(needs_.size());
    helper_id_ = needs_.size();
  }

  std::string name() const override { return spec_.to_string(); }
  Capabilities capabilities() const override { return spec_.capabilities(); }
  std::optional<PoolId> helper_pool() const override { return helper_id_; }
  const Partition& partition() const { return partition_; }

  std::vector<PoolSpec> pool_layout() const override {
    std::vector<PoolSpec> pools;
    for (std::size_t i = 0; i < needs_.size(); ++i) {
      pools.push_back({"A" + std::to_string(i), partition_.servers[i]});
    }
    pools.push_back({"helper", partition_.helper});
    return pools;
  }

  Decisions on_arrival(const ClusterState& state, const Job& job) override {
    Decisions d;
    const auto i = static_cast<std::size_t>(job.class_index);
    // a_i is a multiple of n_i, so enough idle servers means a free slot.
    if (!partition_.helper_only[i] && state.pool(i).idle() >= needs_[i]) {
      d.starts.push_back({job.id, i});
      return d;
    }
    d.routed_to_helper.push_back(job.id);
    if (partition_.helper == 0 && !pull_) {
      // No helpers and no pulls: the job can never be served.
      d.dropped.push_back(job.id);
      return d;
    }
    line_->enqueue(job);
    if (pull_) waiting_by_class_[i].push_back(job.id);
    dispatch_helpers(state, d);
    return d;
  }

  Decisions on_departure(const ClusterState& state, const Job& job, PoolId pool) override {
    Decisions d;
    if (pool != helper_id_ && pull_) {
      auto& waiting = waiting_by_class_[pool];
      while (!waiting.empty()) {
        const JobId candidate = waiting.front();
        waiting.pop_front();
        if (line_->remove(candidate)) {  // false once the helpers started it
          d.starts.push_back({candidate, pool});
          break;
        }
      }
    }
    (void)job;
    dispatch_helpers(state, d);
    return d;
  }

 private:
  void dispatch_helpers(const ClusterState& state, Decisions& d) {
    std::int64_t idle = state.pool(helper_id_).idle();
    line_->dispatch(helper_id_, idle, d.starts);
  }

  PolicySpec spec_;
  Partition partition_;
  bool pull_;
  std::unique_ptr<WaitingLine> line_;
  std::vector<std::int64_t> needs_;
  std::vector<std::deque<JobId>> waiting_by_class_;
  PoolId helper_id_ = 0;
};

inline std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const SystemConfig& config) {
  switch (spec.kind) {
    case PolicyKind::Fcfs:
    case PolicyKind::FirstFitBackfill:
      return std::make_unique<SinglePoolPolicy>(spec, config.k);
    case PolicyKind::LeastServersFirst:
      return std::make_unique<ServersFirstPolicy>(false, config.k);
    case PolicyKind::MostServersFirst:
      return std::make_unique<ServersFirstPolicy>(true, config.k);
    case PolicyKind::FirstFitSrpt:
      return std::make_unique<FirstFitSrptPolicy>(config.k);
    case PolicyKind::ServerFilling:
      return std::make_unique<ServerFillingPolicy>(false, config.k);
    case PolicyKind::ServerFillingSrpt:
      return std::make_unique<ServerFillingPolicy>(true, config.k);
    case PolicyKind::BalancedSplitting:
    case PolicyKind::ModifiedBalancedSplitting:
      return std::make_unique<BalancedSplittingPolicy>(spec, config);
  }
  throw std::invalid_argument("unknown policy kind");
}

// ---------------------------------------------------------------------------
// Convenience entry points
// ---------------------------------------------------------------------------

inline SimOutcome simulate(const SystemConfig& config, Policy& policy, JobSource& source, RunOptions opts,
                           Observer observer = {}) {
  opts.load_hint = config.load();
  Simulator sim(policy, config.classes.size(), opts, std::move(observer));
  return sim.run(source);
}

/// One run of `arrivals` Poisson arrivals drawn from `seed`.
inline SimOutcome run(const SystemConfig& config, const PolicySpec& spec, const RunOptions& opts,
                      Observer observer = {}) {
  config.validate();
  auto policy = make_policy(spec, config);
  PoissonJobSource source(config, opts.arrivals, static_cast<std::int64_t>(opts.seed & 0x7fffffffffffffffULL));
  return simulate(config, *policy, source, opts, std::move(observer));
}

}  // namespace msj
