#pragma once

// Standard Workload Format ingestion and per-need class models.
//
// SWF lines hold 18 whitespace-separated fields; ';' starts a header or
// comment line. Only fields 2 (submit time), 4 (run time) and 5 (number of
// allocated processors) are read; -1 marks a missing value.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <iterator>
#include <locale>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "msj/workload.hpp"

namespace msj {

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct TraceJob {
  double submit_time = 0.0;
  double run_time = 0.0;
  std::int64_t processors = 0;

  friend bool operator==(const TraceJob&, const TraceJob&) = default;
};

namespace detail {

inline std::optional<double> parse_field(const std::string& token) {
  if (token.empty()) return std::nullopt;
  std::istringstream is(token);
  is.imbue(std::locale::classic());
  double x = 0.0;
  is >> x;
  if (is.fail() || !is.eof() || !std::isfinite(x)) return std::nullopt;
  return x;
}

}  // namespace detail

inline std::vector<TraceJob> parse_swf(std::istream& in, const std::string& source = "<swf>") {
  std::vector<TraceJob> jobs;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == ';') continue;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string t; fields >> t;) tokens.push_back(t);
    if (tokens.size() < 5) {
      throw TraceParseError(source, number, "expected at least 5 fields, found " + std::to_string(tokens.size()));
    }
    const auto submit = detail::parse_field(tokens[1]);
    const auto run = detail::parse_field(tokens[3]);
    const auto procs = detail::parse_field(tokens[4]);
    if (!submit || !run || !procs) throw TraceParseError(source, number, "non-numeric field");
    if (*procs != std::floor(*procs)) throw TraceParseError(source, number, "fractional processor count");
    if (*run <= 0.0 || *procs <= 0.0) continue;
    jobs.push_back(TraceJob{*submit, *run, static_cast<std::int64_t>(*procs)});
  }
  if (jobs.empty()) throw std::runtime_error(source + ": no usable job records");
  return jobs;
}

inline std::vector<TraceJob> parse_swf(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open SWF file '" + path + "'");
  return parse_swf(in, path);
}

/// Writes the three fields back as an 18-field SWF record stream.
inline void write_swf(std::ostream& out, const std::vector<TraceJob>& jobs) {
  out << "; synthetic trace\n";
  std::size_t id = 1;
  out << std::setprecision(17);
  for (const auto& j : jobs) {
    out << id++ << ' ' << j.submit_time << " -1 " << j.run_time << ' ' << j.processors;
    for (int f = 6; f <= 18; ++f) out << " -1";
    out << '\n';
  }
}

inline bool is_power_of_two(std::int64_t x) { return x > 0 && (x & (x - 1)) == 0; }

inline std::vector<TraceJob> filter_power_of_two(const std::vector<TraceJob>& jobs, std::int64_t max_need = 64) {
  std::vector<TraceJob> out;
  std::copy_if(jobs.begin(), jobs.end(), std::back_inserter(out), [&](const TraceJob& j) {
    return is_power_of_two(j.processors) && j.processors <= max_need;
  });
  return out;
}

struct ClassStats {
  std::int64_t need = 0;
  std::int64_t count = 0;
  double share = 0.0;
  double mean = 0.0;
  double stddev = 0.0;            // sample standard deviation (n - 1)
  std::vector<double> samples;    // run times, ascending
};

struct ClassModel {
  std::vector<ClassStats> classes;  // ascending need
  std::int64_t total = 0;
};

/// One class per distinct processor count.
inline ClassModel build_class_model(const std::vector<TraceJob>& jobs) {
  if (jobs.empty()) throw std::invalid_argument("cannot build a class model from an empty trace");
  std::map<std::int64_t, std::vector<double>> by_need;
  for (const auto& j : jobs) by_need[j.processors].push_back(j.run_time);
  ClassModel model;
  model.total = static_cast<std::int64_t>(jobs.size());
  for (auto& [need, samples] : by_need) {
    std::sort(samples.begin(), samples.end());
    ClassStats c;
    c.need = need;
    c.count = static_cast<std::int64_t>(samples.size());
    c.share = static_cast<double>(c.count) / static_cast<double>(model.total);
    c.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(c.count);
    if (c.count > 1) {
      double ss = 0.0;
      for (double x : samples) ss += (x - c.mean) * (x - c.mean);
      c.stddev = std::sqrt(ss / static_cast<double>(c.count - 1));
    }
    c.samples = std::move(samples);
    model.classes.push_back(std::move(c));
  }
  return model;
}

inline std::vector<JobClass> model_classes(const ClassModel& model) {
  std::vector<JobClass> classes;
  int index = 0;
  for (const auto& c : model.classes) {
    classes.push_back(JobClass{index++, c.need, c.share, ServiceDistribution::empirical(c.samples)});
  }
  return classes;
}

/// Poisson arrivals at the rate that gives `target_rho` on k servers, with
/// service times resampled from each class's observations.
inline SystemConfig trace_to_config(const ClassModel& model, std::int64_t k, double target_rho) {
  if (!(target_rho > 0.0 && target_rho < 1.0)) throw std::invalid_argument("target load must lie in (0, 1)");
  auto classes = model_classes(model);
  if (k < max_need(classes)) {
    throw std::invalid_argument("k=" + std::to_string(k) + " is smaller than the largest class need " +
                                std::to_string(max_need(classes)));
  }
  return config_at_load(classes, k, target_rho);
}

/// Replays the trace's own submit times (shifted to start at 0) and run
/// times. Jobs whose need has no class in `model` are skipped.
class ReplayJobSource final : public JobSource {
 public:
  ReplayJobSource(std::vector<TraceJob> jobs, const ClassModel& model) {
    std::stable_sort(jobs.begin(), jobs.end(),
                     [](const TraceJob& a, const TraceJob& b) { return a.submit_time < b.submit_time; });
    std::map<std::int64_t, int> index;
    for (std::size_t i = 0; i < model.classes.size(); ++i) index[model.classes[i].need] = static_cast<int>(i);
    for (const auto& j : jobs) {
      auto it = index.find(j.processors);
      if (it == index.end()) continue;
      jobs_.push_back(j);
      classes_.push_back(it->second);
    }
    if (jobs_.empty()) throw std::invalid_argument("replay trace has no job matching the class model");
    origin_ = jobs_.front().submit_time;
  }

  std::size_t size() const { return jobs_.size(); }

  std::optional<Job> next() override {
    if (pos_ == jobs_.size()) return std::nullopt;
    const auto& t = jobs_[pos_];
    Job job{static_cast<JobId>(pos_), classes_[pos_], t.submit_time - origin_, t.run_time, t.processors};
    ++pos_;
    return job;
  }

 private:
  std::vector<TraceJob> jobs_;
  std::vector<int> classes_;
  double origin_ = 0.0;
  std::size_t pos_ = 0;
};

inline nlohmann::json to_json(const ClassModel& model) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : model.classes) {
    classes.push_back({{"need", c.need},
                       {"count", c.count},
                       {"share", c.share},
                       {"mean", c.mean},
                       {"std", c.stddev}});
  }
  return {{"total", model.total}, {"classes", classes}};
}

/// Aligned text table: E[D], std(D), need, share.
inline std::string format_class_table(const ClassModel& model) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setw(14) << "E[D]" << std::setw(14) << "std(D)" << std::setw(8) << "n" << std::setw(10) << "alpha"
     << '\n';
  for (const auto& c : model.classes) {
    os << std::fixed << std::setprecision(2) << std::setw(14) << c.mean << std::setw(14) << c.stddev << std::setw(8)
       << c.need << std::setprecision(4) << std::setw(10) << c.share << '\n';
  }
  return os.str();
}

}  // namespace msj
