#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "msj/engine.hpp"
#include "msj/workload.hpp"

namespace msj::test {

/// Replays a fixed list of jobs.
class VectorSource final : public JobSource {
 public:
  explicit VectorSource(std::vector<Job> jobs) : jobs_(std::move(jobs)) {}
  std::optional<Job> next() override {
    if (pos_ == jobs_.size()) return std::nullopt;
    return jobs_[pos_++];
  }

 private:
  std::vector<Job> jobs_;
  std::size_t pos_ = 0;
};

/// Jobs with ids 0.. from (arrival, service, need, class) tuples.
struct Spec {
  double arrival;
  double service;
  std::int64_t need;
  int cls = 0;
};

inline std::vector<Job> jobs_from(const std::vector<Spec>& specs) {
  std::vector<Job> out;
  JobId id = 0;
  for (const auto& s : specs) out.push_back(Job{id++, s.cls, s.arrival, s.service, s.need});
  return out;
}

inline JobClass exp_class(int index, std::int64_t need, double share, double mean) {
  return JobClass{index, need, share, ServiceDistribution::exponential(mean)};
}

inline SystemConfig make_config(std::int64_t k, double lambda, std::vector<JobClass> classes) {
  SystemConfig c;
  c.k = k;
  c.lambda = lambda;
  c.classes = std::move(classes);
  return c;
}

inline RunOptions no_warmup(std::int64_t arrivals) {
  RunOptions o;
  o.arrivals = arrivals;
  o.warmup_fraction = 0.0;
  return o;
}

/// Mirrors the cluster from lifecycle events and calls `check` whenever the
/// clock is about to move, i.e. at every event boundary.
class Tracker {
 public:
  struct Running {
    PoolId pool;
    std::int64_t need;
  };

  Tracker(std::vector<std::int64_t> class_needs, std::function<void(const Tracker&)> check)
      : needs_(std::move(class_needs)), check_(std::move(check)) {}

  Observer observer() {
    return [this](const LifecycleEvent& ev) { on_event(ev); };
  }

  void finish() {
    if (started_) check_(*this);
  }

  std::map<JobId, Running> running;
  std::map<JobId, std::int64_t> waiting;  // id -> need, ascending id
  std::vector<std::vector<PoolId>> starts_by_job;
  std::int64_t boundaries = 0;

  std::int64_t busy() const {
    std::int64_t b = 0;
    for (const auto& [id, r] : running) b += r.need;
    return b;
  }

 private:
  void on_event(const LifecycleEvent& ev) {
    if (started_ && ev.time > last_) {
      ++boundaries;
      check_(*this);
    }
    started_ = true;
    last_ = ev.time;
    const std::int64_t need = needs_.at(static_cast<std::size_t>(ev.class_index));
    switch (ev.kind) {
      case LifecycleKind::Arrive:
        waiting[ev.job] = need;
        break;
      case LifecycleKind::Route:
        break;
      case LifecycleKind::Start:
        waiting.erase(ev.job);
        running[ev.job] = Running{*ev.pool, need};
        if (starts_by_job.size() <= ev.job) starts_by_job.resize(ev.job + 1);
        starts_by_job[ev.job].push_back(*ev.pool);
        break;
      case LifecycleKind::Preempt:
        running.erase(ev.job);
        waiting[ev.job] = need;
        break;
      case LifecycleKind::Depart:
        running.erase(ev.job);
        break;
      case LifecycleKind::Drop:
        waiting.erase(ev.job);
        break;
    }
  }

  std::vector<std::int64_t> needs_;
  std::function<void(const Tracker&)> check_;
  bool started_ = false;
  Time last_ = 0.0;
};

}  // namespace msj::test
