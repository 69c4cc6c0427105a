#pragma once

// Discrete-event core for the multiserver-job model.
//
// Servers are fungible counters grouped into pools; a job holds `need`
// servers of exactly one pool while in service. Policies react to arrivals
// and departures through Policy::on_arrival / on_departure and answer with
// Decisions: preemptions (applied first) and starts. The engine owns the
// clock, the event calendar, every job's remaining work and all statistics.

#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "msj/workload.hpp"

namespace msj {

using PoolId = std::size_t;

/// A policy broke the hook contract (over-committed a pool, restarted a
/// running job, preempted without the capability, ...).
class PolicyViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The number of jobs in system crossed the configured cap.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Capabilities {
  bool preemptive = false;
  bool size_aware = false;
};

struct PoolSpec {
  std::string name;
  std::int64_t capacity = 0;
};

struct Pool {
  std::string name;
  std::int64_t capacity = 0;
  std::int64_t busy = 0;
  std::int64_t idle() const { return capacity - busy; }
};

struct StartDecision {
  JobId job;
  PoolId pool;
};

struct Decisions {
  std::vector<JobId> preemptions;
  std::vector<StartDecision> starts;
  std::vector<JobId> routed_to_helper;  // counted in p_helper
  std::vector<JobId> dropped;           // leave the system unserved
};

/// Read-only view of the cluster handed to policy hooks.
class ClusterState {
 public:
  Time now() const { return now_; }
  const std::vector<Pool>& pools() const { return pools_; }
  const Pool& pool(PoolId id) const { return pools_.at(id); }
  std::size_t in_system() const { return jobs_.size(); }

  bool contains(JobId id) const { return jobs_.count(id) != 0; }
  const Job& job(JobId id) const { return record(id).job; }
  bool running(JobId id) const { return record(id).pool.has_value(); }
  std::optional<PoolId> pool_of(JobId id) const { return record(id).pool; }

  /// Remaining service time as of now().
  Time remaining(JobId id) const {
    const auto& r = record(id);
    if (!r.pool) return r.remaining;
    return std::max(0.0, r.remaining - (now_ - r.segment_start));
  }

  std::string dump() const {
    std::ostringstream os;
    os << "t=" << now_ << " jobs_in_system=" << jobs_.size() << " pools:";
    for (const auto& p : pools_) os << " [" << p.name << " " << p.busy << "/" << p.capacity << "]";
    return os.str();
  }

 protected:
  struct Record {
    Job job;
    std::optional<PoolId> pool;
    Time remaining = 0.0;      // as of segment_start while running
    Time segment_start = 0.0;
    std::uint64_t epoch = 0;   // bumps on every (re)start; stale departures are skipped
    bool started_on_arrival = false;
    bool routed = false;
    bool ever_dedicated = false;
  };

  const Record& record(JobId id) const {
    auto it = jobs_.find(id);
    if (it == jobs_.end()) throw PolicyViolation("unknown job " + std::to_string(id) + "; " + dump());
    return it->second;
  }

  Time now_ = 0.0;
  std::vector<Pool> pools_;
  std::unordered_map<JobId, Record> jobs_;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual Capabilities capabilities() const = 0;
  virtual std::vector<PoolSpec> pool_layout() const = 0;
  /// Pool whose servers are the shared helpers, if the policy splits servers.
  virtual std::optional<PoolId> helper_pool() const { return std::nullopt; }
  virtual Decisions on_arrival(const ClusterState& state, const Job& job) = 0;
  /// `job` has already left; its servers in `pool` are idle again.
  virtual Decisions on_departure(const ClusterState& state, const Job& job, PoolId pool) = 0;
};

// ---------------------------------------------------------------------------
// Outcomes
// ---------------------------------------------------------------------------

struct ClassOutcome {
  std::int64_t arrivals = 0;   // counted (post-warmup) arrivals
  std::int64_t completed = 0;
  std::int64_t routed = 0;     // sent to the helpers on arrival
  std::int64_t dedicated = 0;  // ever started in a non-helper pool
  std::int64_t pulled = 0;     // routed, then started in a non-helper pool
  std::int64_t dropped = 0;
  double mean_response = 0.0;
  double p_helper = 0.0;       // (routed - pulled) / arrivals
  double p_routed = 0.0;       // routed / arrivals
};

struct SimOutcome {
  std::string policy;
  std::uint64_t seed = 0;
  std::int64_t arrivals = 0;           // total simulated
  std::int64_t warmup_discarded = 0;
  std::int64_t completed = 0;          // counted completions
  std::int64_t dropped = 0;            // counted drops
  std::int64_t preemptions = 0;
  double mean_response = 0.0;
  double response_ci95 = 0.0;          // batch means within this run
  /// Fraction of counted arrivals that need the helper servers: routed on
  /// arrival and never pulled back into a class pool. For policies without a
  /// helper pool, the fraction that could not start on arrival.
  double p_helper = 0.0;
  double p_routed = 0.0;               // routed on arrival, pulled or not
  double p_wait = 0.0;                 // could not start on arrival
  double helper_utilization = 0.0;     // 0 when there is no helper pool
  double utilization = 0.0;            // over all k servers
  double time_avg_in_system = 0.0;
  double throughput = 0.0;             // counted completions / window
  double window = 0.0;                 // observation window length
  double mean_service = 0.0;           // of counted completions
  std::int64_t max_in_system = 0;
  std::vector<ClassOutcome> per_class;
};

struct RunOptions {
  std::int64_t arrivals = 100000;
  std::uint64_t seed = 1;
  double warmup_fraction = 0.1;
  std::size_t max_in_system = 1000000;
  int batches = 20;
  double load_hint = 0.0;  // quoted in instability errors
};

enum class LifecycleKind { Arrive, Route, Start, Preempt, Depart, Drop };

struct LifecycleEvent {
  LifecycleKind kind;
  Time time;
  JobId job;
  int class_index;
  std::optional<PoolId> pool;
};

using Observer = std::function<void(const LifecycleEvent&)>;

inline void check_run_options(const RunOptions& opts) {
  if (opts.arrivals < 1) throw std::invalid_argument("arrivals must be >= 1");
  if (!(opts.warmup_fraction >= 0.0 && opts.warmup_fraction < 1.0)) {
    throw std::invalid_argument("warmup fraction must lie in [0, 1)");
  }
  if (opts.batches < 2) throw std::invalid_argument("need at least two batches");
}

// ---------------------------------------------------------------------------
// Simulator
// ---------------------------------------------------------------------------

class Simulator : private ClusterState {
 public:
  Simulator(Policy& policy, std::size_t num_classes, RunOptions opts, Observer observer = {})
      : policy_(policy), opts_(opts), observer_(std::move(observer)), num_classes_(num_classes) {
    check_run_options(opts_);
    for (const auto& spec : policy_.pool_layout()) {
      if (spec.capacity < 0) throw std::invalid_argument("pool capacity must be non-negative");
      pools_.push_back(Pool{spec.name, spec.capacity, 0});
      total_servers_ += spec.capacity;
    }
    helper_ = policy_.helper_pool();
    preemptive_ = policy_.capabilities().preemptive;
    warmup_count_ = static_cast<std::int64_t>(std::floor(opts_.warmup_fraction *
                                                         static_cast<double>(opts_.arrivals)));
  }

  /// Feeds every job of `source` (exactly opts.arrivals jobs, ids 0, 1, ...
  /// in arrival order), then drains the calendar.
  SimOutcome run(JobSource& source) {
    responses_.assign(static_cast<std::size_t>(opts_.arrivals - warmup_count_), -1.0);
    per_class_.assign(num_classes_, {});
    response_sum_.assign(num_classes_, 0.0);

    schedule_next_arrival(source);
    while (!calendar_.empty()) {
      const Event ev = calendar_.top();
      calendar_.pop();
      if (ev.kind == EventKind::Departure) {
        auto it = jobs_.find(ev.job);
        if (it == jobs_.end() || !it->second.pool || it->second.epoch != ev.epoch) continue;
      }
      advance(ev.time);
      if (ev.kind == EventKind::Arrival) {
        handle_arrival(*pending_);
        pending_.reset();
        schedule_next_arrival(source);
      } else {
        handle_departure(ev.job);
      }
#ifndef NDEBUG
      std::int64_t busy = 0;
      for (const auto& p : pools_) {
        assert(p.busy <= p.capacity);
        busy += p.busy;
      }
      assert(busy <= total_servers_);
#endif
    }
    if (!jobs_.empty()) {
      throw PolicyViolation(policy_.name() + " left " + std::to_string(jobs_.size()) +
                            " jobs stranded with no pending events; " + dump());
    }
    if (seen_ != opts_.arrivals) {
      throw std::invalid_argument("job source produced " + std::to_string(seen_) + " jobs, expected " +
                                  std::to_string(opts_.arrivals));
    }
    return finish();
  }

 private:
  enum class EventKind { Arrival, Departure };
  struct Event {
    Time time;
    std::uint64_t seq;
    EventKind kind;
    JobId job;
    std::uint64_t epoch;
    bool operator>(const Event& o) const { return time != o.time ? time > o.time : seq > o.seq; }
  };

  bool counted(JobId id) const { return static_cast<std::int64_t>(id) >= warmup_count_; }

  void emit(LifecycleKind kind, const Job& job, std::optional<PoolId> pool = std::nullopt) {
    if (observer_) observer_(LifecycleEvent{kind, now_, job.id, job.class_index, pool});
  }

  void schedule_next_arrival(JobSource& source) {
    pending_ = source.next();
    if (!pending_) return;
    if (pending_->arrival_time < last_arrival_ || pending_->id != static_cast<JobId>(seen_) ||
        pending_->class_index < 0 ||
        static_cast<std::size_t>(pending_->class_index) >= num_classes_ || !(pending_->service_time > 0.0) ||
        pending_->need < 1) {
      throw std::invalid_argument("job source produced an invalid job (id " + std::to_string(pending_->id) + ")");
    }
    last_arrival_ = pending_->arrival_time;
    calendar_.push(Event{pending_->arrival_time, seq_++, EventKind::Arrival, pending_->id, 0});
  }

  void advance(Time t) {
    if (window_open_) {
      const double dt = t - now_;
      area_in_system_ += dt * static_cast<double>(jobs_.size());
      for (std::size_t p = 0; p < pools_.size(); ++p) {
        area_busy_[p] += dt * static_cast<double>(pools_[p].busy);
      }
    }
    now_ = t;
  }

  void handle_arrival(const Job& job) {
    ++seen_;
    if (counted(job.id) && !window_open_) {
      window_open_ = true;
      window_start_ = now_;
      area_busy_.assign(pools_.size(), 0.0);
    }
    Record rec;
    rec.job = job;
    rec.remaining = job.service_time;
    jobs_.emplace(job.id, rec);
    max_in_system_ = std::max<std::int64_t>(max_in_system_, static_cast<std::int64_t>(jobs_.size()));
    if (jobs_.size() > opts_.max_in_system) {
      std::ostringstream os;
      os << "apparent instability: " << jobs_.size() << " jobs in system under policy " << policy_.name()
         << " (cap " << opts_.max_in_system << ", load " << opts_.load_hint << ")";
      throw InstabilityError(os.str());
    }
    if (counted(job.id)) ++per_class_[job.class_index].arrivals;
    emit(LifecycleKind::Arrive, job);

    apply(policy_.on_arrival(*this, job));

    auto it = jobs_.find(job.id);
    if (it != jobs_.end() && it->second.pool) it->second.started_on_arrival = true;
    if (counted(job.id)) {
      const bool started = it != jobs_.end() && it->second.pool.has_value();
      if (!started && it != jobs_.end()) ++waited_;
    }
  }

  void handle_departure(JobId id) {
    auto it = jobs_.find(id);
    Record rec = it->second;
    const PoolId pool = *rec.pool;
    pools_[pool].busy -= rec.job.need;
    jobs_.erase(it);
    if (counted(id)) {
      const double response = now_ - rec.job.arrival_time;
      responses_[static_cast<std::size_t>(static_cast<std::int64_t>(id) - warmup_count_)] = response;
      auto& pc = per_class_[rec.job.class_index];
      ++pc.completed;
      response_sum_[rec.job.class_index] += response;
      service_sum_ += rec.job.service_time;
    }
    emit(LifecycleKind::Depart, rec.job, pool);
    apply(policy_.on_departure(*this, rec.job, pool));
  }

  [[noreturn]] void violation(const std::string& what) const {
    throw PolicyViolation(policy_.name() + ": " + what + "; " + dump());
  }

  void apply(const Decisions& d) {
    if (!d.preemptions.empty() && !preemptive_) violation("nonpreemptive policy emitted a preemption");
    for (JobId id : d.routed_to_helper) {
      auto it = jobs_.find(id);
      if (it == jobs_.end()) violation("routed unknown job " + std::to_string(id));
      if (!it->second.routed) {
        it->second.routed = true;
        if (counted(id)) ++per_class_[it->second.job.class_index].routed;
        emit(LifecycleKind::Route, it->second.job, helper_);
      }
    }
    for (JobId id : d.preemptions) {
      auto it = jobs_.find(id);
      if (it == jobs_.end() || !it->second.pool) violation("preempted job " + std::to_string(id) + " is not running");
      auto& r = it->second;
      r.remaining = std::max(0.0, r.remaining - (now_ - r.segment_start));
      pools_[*r.pool].busy -= r.job.need;
      const PoolId from = *r.pool;
      r.pool.reset();
      ++preemptions_;
      emit(LifecycleKind::Preempt, r.job, from);
    }
    for (const auto& s : d.starts) {
      auto it = jobs_.find(s.job);
      if (it == jobs_.end()) violation("started unknown job " + std::to_string(s.job));
      auto& r = it->second;
      if (r.pool) violation("job " + std::to_string(s.job) + " is already running");
      if (s.pool >= pools_.size()) violation("no pool " + std::to_string(s.pool));
      auto& pool = pools_[s.pool];
      if (pool.busy + r.job.need > pool.capacity) {
        violation("starting job " + std::to_string(s.job) + " (need " + std::to_string(r.job.need) +
                  ") overcommits pool " + pool.name);
      }
      pool.busy += r.job.need;
      r.pool = s.pool;
      r.segment_start = now_;
      ++r.epoch;
      if (!helper_ || s.pool != *helper_) {
        if (!r.ever_dedicated && counted(s.job)) {
          ++per_class_[r.job.class_index].dedicated;
          if (r.routed) ++per_class_[r.job.class_index].pulled;
        }
        r.ever_dedicated = true;
      }
      calendar_.push(Event{now_ + r.remaining, seq_++, EventKind::Departure, s.job, r.epoch});
      emit(LifecycleKind::Start, r.job, s.pool);
    }
    for (JobId id : d.dropped) {
      auto it = jobs_.find(id);
      if (it == jobs_.end()) violation("dropped unknown job " + std::to_string(id));
      if (it->second.pool) violation("dropped job " + std::to_string(id) + " is running");
      const Job job = it->second.job;
      jobs_.erase(it);
      if (counted(id)) {
        ++per_class_[job.class_index].dropped;
        ++dropped_;
      }
      emit(LifecycleKind::Drop, job);
    }
  }

  SimOutcome finish() {
    SimOutcome out;
    out.policy = policy_.name();
    out.seed = opts_.seed;
    out.arrivals = opts_.arrivals;
    out.warmup_discarded = warmup_count_;
    out.dropped = dropped_;
    out.preemptions = preemptions_;
    out.max_in_system = max_in_system_;

    std::vector<double> done;
    done.reserve(responses_.size());
    for (double r : responses_) {
      if (r >= 0.0) done.push_back(r);
    }
    out.completed = static_cast<std::int64_t>(done.size());
    double total = 0.0;
    for (double r : done) total += r;
    out.mean_response = done.empty() ? 0.0 : total / static_cast<double>(done.size());
    out.response_ci95 = batch_means_ci(done, opts_.batches);
    out.mean_service = done.empty() ? 0.0 : service_sum_ / static_cast<double>(done.size());

    std::int64_t counted_arrivals = 0, routed = 0, pulled = 0;
    for (std::size_t c = 0; c < num_classes_; ++c) {
      auto& pc = per_class_[c];
      pc.mean_response = pc.completed ? response_sum_[c] / static_cast<double>(pc.completed) : 0.0;
      const double arrivals = static_cast<double>(std::max<std::int64_t>(1, pc.arrivals));
      pc.p_routed = static_cast<double>(pc.routed) / arrivals;
      pc.p_helper = static_cast<double>(pc.routed - pc.pulled) / arrivals;
      counted_arrivals += pc.arrivals;
      routed += pc.routed;
      pulled += pc.pulled;
    }
    out.per_class = per_class_;
    const double n = static_cast<double>(std::max<std::int64_t>(1, counted_arrivals));
    out.p_wait = static_cast<double>(waited_) / n;
    out.p_routed = helper_ ? static_cast<double>(routed) / n : out.p_wait;
    out.p_helper = helper_ ? static_cast<double>(routed - pulled) / n : out.p_wait;

    out.window = window_open_ ? now_ - window_start_ : 0.0;
    if (out.window > 0.0) {
      out.time_avg_in_system = area_in_system_ / out.window;
      out.throughput = static_cast<double>(out.completed) / out.window;
      double busy = 0.0;
      for (double a : area_busy_) busy += a;
      out.utilization = total_servers_ ? busy / (static_cast<double>(total_servers_) * out.window) : 0.0;
      if (helper_ && pools_[*helper_].capacity > 0) {
        out.helper_utilization =
            area_busy_[*helper_] / (static_cast<double>(pools_[*helper_].capacity) * out.window);
      }
    }
    return out;
  }

  static double batch_means_ci(const std::vector<double>& xs, int batches) {
    const std::size_t per = xs.size() / static_cast<std::size_t>(batches);
    if (per == 0) return 0.0;
    std::vector<double> means;
    for (int b = 0; b < batches; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < per; ++i) s += xs[static_cast<std::size_t>(b) * per + i];
      means.push_back(s / static_cast<double>(per));
    }
    double m = 0.0;
    for (double x : means) m += x;
    m /= static_cast<double>(batches);
    double v = 0.0;
    for (double x : means) v += (x - m) * (x - m);
    v /= static_cast<double>(batches - 1);
    return 1.96 * std::sqrt(v / static_cast<double>(batches));
  }

 private:
  Policy& policy_;
  RunOptions opts_;
  Observer observer_;
  std::size_t num_classes_;
  std::int64_t total_servers_ = 0;
  std::optional<PoolId> helper_;
  bool preemptive_ = false;
  std::int64_t warmup_count_ = 0;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> calendar_;
  std::uint64_t seq_ = 0;
  std::optional<Job> pending_;
  Time last_arrival_ = 0.0;
  std::int64_t seen_ = 0;

  std::vector<double> responses_;
  std::vector<ClassOutcome> per_class_;
  std::vector<double> response_sum_;
  double service_sum_ = 0.0;
  std::int64_t waited_ = 0;
  std::int64_t dropped_ = 0;
  std::int64_t preemptions_ = 0;
  std::int64_t max_in_system_ = 0;

  bool window_open_ = false;
  Time window_start_ = 0.0;
  double area_in_system_ = 0.0;
  std::vector<double> area_busy_;
};

}  // namespace msj
