#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "msj/partition.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace msj;
using msj::test::exp_class;
using msj::test::make_config;

using msj::oracle::brute_force_slots;
using msj::oracle::leftover;

TEST(Partition, IntegralExample) {
  // Needs 1 and 2 with demand shares 1/3 and 2/3: targets 4 and 4.
  const auto c = make_config(12, 1.0, {exp_class(0, 1, 0.5, 2.0), exp_class(1, 2, 0.5, 2.0)});
  const auto p = compute_partition(c);
  EXPECT_TRUE(p.exact);
  EXPECT_EQ(p.psi, 1.0);
  EXPECT_EQ(p.servers, (std::vector<std::int64_t>{4, 8}));
  EXPECT_EQ(p.helper, 0);
}

TEST(Partition, BreakpointExample) {
  // Needs 2 and 4 with equal demand shares on 20 servers: targets 5 and 2.5.
  const auto c = make_config(20, 1.0, {exp_class(0, 2, 0.5, 2.0), exp_class(1, 4, 0.5, 1.0)});
  const auto p = compute_partition(c);
  EXPECT_FALSE(p.exact);
  EXPECT_EQ(p.slots, (std::vector<std::int64_t>{4, 2}));
  EXPECT_EQ(p.servers, (std::vector<std::int64_t>{8, 8}));
  EXPECT_EQ(p.helper, 4);
  EXPECT_DOUBLE_EQ(p.psi, 0.8);
}

TEST(Partition, SingleClassLeavesRoomForOneJob) {
  const auto c = make_config(5, 1.0, {exp_class(0, 2, 1.0, 1.0)});
  const auto p = compute_partition(c);
  EXPECT_EQ(p.slots, (std::vector<std::int64_t>{1}));
  EXPECT_EQ(p.servers, (std::vector<std::int64_t>{2}));
  EXPECT_EQ(p.helper, 3);
}

TEST(Partition, RejectsSmallK) {
  EXPECT_THROW(compute_partition(make_config(3, 1.0, {exp_class(0, 4, 1.0, 1.0)})), std::invalid_argument);
}

TEST(Partition, HelperOnlyFolding) {
  // Tiny demand share: the small class gets zero slots.
  const auto c = make_config(8, 1.0, {exp_class(0, 8, 0.999, 1.0), exp_class(1, 1, 0.001, 1.0)});
  const auto p = compute_partition(c);
  EXPECT_TRUE(p.helper_only[1] || p.helper_only[0]);
  EXPECT_THROW(compute_partition(c, false), std::invalid_argument);
}

TEST(Partition, NearIntegralTargetsSnap) {
  // 0.1 + 0.2 style rounding must not turn an integral split into a fractional one.
  const auto c = make_config(30, 1.0, {exp_class(0, 1, 0.1, 1.0), exp_class(1, 1, 0.2, 1.0),
                                       exp_class(2, 1, 0.7, 1.0)});
  const auto p = compute_partition(c);
  EXPECT_TRUE(p.exact);
  EXPECT_EQ(p.slots, (std::vector<std::int64_t>{3, 6, 21}));
}

TEST(Partition, InvariantsOnRandomInstances) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 3000; ++trial) {
    const int C = 1 + static_cast<int>(rng() % 4);
    std::vector<JobClass> classes;
    std::vector<double> w(C);
    double total = 0.0;
    for (auto& x : w) total += (x = 1.0 + static_cast<double>(rng() % 20));
    std::int64_t nmax = 1;
    for (int i = 0; i < C; ++i) {
      const std::int64_t need = std::int64_t{1} << (rng() % 5);
      nmax = std::max(nmax, need);
      classes.push_back(exp_class(i, need, w[i] / total, 0.5 + static_cast<double>(rng() % 40)));
    }
    const std::int64_t k = nmax + static_cast<std::int64_t>(rng() % 300);
    const auto c = make_config(k, 1.0, classes);
    const auto p = compute_partition(c);
    const auto t = slot_targets(c);
    std::int64_t total_servers = p.helper;
    for (int i = 0; i < C; ++i) {
      EXPECT_EQ(p.servers[i], p.slots[i] * classes[i].need);
      EXPECT_LE(p.slots[i], detail::snapped_floor(t[i]));
      total_servers += p.servers[i];
    }
    EXPECT_EQ(total_servers, k);
    const bool integral = std::all_of(t.begin(), t.end(), detail::near_integral);
    EXPECT_EQ(p.helper == 0, integral) << "k=" << k;
    if (p.helper > 0) {
      EXPECT_GE(p.helper, nmax);
    }
    EXPECT_GE(p.psi, 0.0);
    EXPECT_LE(p.psi, 1.0);
  }
}

TEST(Partition, BreakpointSearchMatchesBruteForce) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int C = 1 + static_cast<int>(rng() % 3);
    std::vector<JobClass> classes;
    std::vector<double> w(C);
    double total = 0.0;
    for (auto& x : w) total += (x = 1.0 + static_cast<double>(rng() % 10));
    std::int64_t nmax = 1;
    for (int i = 0; i < C; ++i) {
      const std::int64_t need = 1 + static_cast<std::int64_t>(rng() % 8);
      nmax = std::max(nmax, need);
      classes.push_back(exp_class(i, need, w[i] / total, 1.0 + static_cast<double>(rng() % 5)));
    }
    const std::int64_t k = nmax + static_cast<std::int64_t>(rng() % (61 - nmax));
    const auto c = make_config(k, 1.0, classes);
    EXPECT_EQ(compute_partition(c).slots, brute_force_slots(c, 100000)) << "trial " << trial << " k=" << k;
  }
}

TEST(Partition, PsiApproachesOneUnderFigure1Scaling) {
  // psi itself need not settle at 1 (the leftover at psi = 1 is bounded), but
  // it tends to 1 and every class's slot count grows without bound.
  double worst_tail = 1.0;
  std::int64_t first_min_slots = -1;
  std::int64_t prev_min_slots = 0;
  for (std::int64_t k = 32; k <= 20000; ++k) {
    const auto c = figure1_workload(k, 0.7);
    const auto p = compute_partition(c);
    if (k > 5000) worst_tail = std::min(worst_tail, p.psi);
    if (k % 2000 == 0) {
      const auto m = *std::min_element(p.slots.begin(), p.slots.end());
      EXPECT_GE(m, prev_min_slots);
      if (first_min_slots < 0) first_min_slots = m;
      prev_min_slots = m;
    }
  }
  EXPECT_GT(worst_tail, 0.9);
  EXPECT_GT(prev_min_slots, first_min_slots);
}

TEST(Partition, CheckMatchesDetectsTampering) {
  const auto c = make_config(20, 1.0, {exp_class(0, 2, 0.5, 2.0), exp_class(1, 4, 0.5, 1.0)});
  auto p = compute_partition(c);
  EXPECT_NO_THROW(check_partition_matches(c, p));
  p.servers[0] += 2;
  EXPECT_THROW(check_partition_matches(c, p), std::invalid_argument);
}
