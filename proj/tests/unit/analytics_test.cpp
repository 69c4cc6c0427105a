#include <gtest/gtest.h>

#include <cfloat>
#include <cmath>

#include "msj/analytics.hpp"
#include "msj/partition.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace msj;
using msj::test::exp_class;
using msj::test::make_config;

using msj::oracle::erlang_direct;

TEST(ErlangB, SmallCases) {
  EXPECT_EQ(erlang_b(0, 3.0), 1.0);
  EXPECT_EQ(erlang_b(0, 0.0), 1.0);
  EXPECT_EQ(erlang_b(5, 0.0), 0.0);
  EXPECT_NEAR(erlang_b(1, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(erlang_b(2, 1.0), 0.2, 1e-15);
  EXPECT_NEAR(erlang_b(3, 2.0), 4.0 / 19.0, 1e-15);
  EXPECT_NEAR(erlang_b(4, 2.0), 2.0 / 21.0, 1e-15);
  EXPECT_NEAR(erlang_b(10, 8.0), 0.1216610642529515, 1e-14);
}

TEST(ErlangB, RejectsInvalidInput) {
  EXPECT_THROW(erlang_b(-1, 1.0), std::invalid_argument);
  EXPECT_THROW(erlang_b(1, -0.5), std::invalid_argument);
  EXPECT_THROW(erlang_b(1, std::nan("")), std::invalid_argument);
  EXPECT_THROW(erlang_b(1, INFINITY), std::invalid_argument);
}

TEST(ErlangB, MatchesDirectSumOnGrid) {
  for (std::int64_t s = 1; s <= 200; s += 3) {
    for (double a : {0.1, 0.5, 1.0, 3.7, 10.0, 42.0, 150.0, 400.0}) {
      const long double ref = erlang_direct(s, a);
      const double got = erlang_b(s, a);
      if (ref < DBL_MIN) {
        EXPECT_LT(got, DBL_MIN);
      } else {
        EXPECT_LE(std::abs(got - ref) / ref, 1e-10) << "s=" << s << " a=" << a;
      }
    }
  }
}

TEST(ErlangB, MonotoneInServersAndLoad) {
  for (double a : {0.5, 5.0, 50.0}) {
    double prev = 1.0;
    for (std::int64_t s = 0; s <= 100; ++s) {
      const double e = erlang_b(s, a);
      EXPECT_LE(e, prev);
      EXPECT_GE(e, 0.0);
      prev = e;
    }
  }
  for (std::int64_t s : {1, 10, 100}) {
    double prev = 0.0;
    for (double a = 0.1; a < 200.0; a *= 1.3) {
      const double e = erlang_b(s, a);
      EXPECT_GE(e, prev);
      prev = e;
    }
  }
}

TEST(ErlangB, LargeSystemsStayFinite) {
  const double e = erlang_b(100000, 99000.0);
  EXPECT_GT(e, 0.0);
  EXPECT_LT(e, 1.0);
  EXPECT_TRUE(std::isfinite(erlang_b(5000, 1.0)));
  EXPECT_EQ(erlang(3, 2.0).blocking, erlang_b(3, 2.0));
}

TEST(MgssResponse, Examples) {
  EXPECT_NEAR(mgss_mean_response(1.0, 1, 1.0), 0.5, 1e-15);
  EXPECT_EQ(mgss_mean_response(2.0, 0, 1.0), 0.0);
  EXPECT_NEAR(mgss_mean_response(3.0, 200, 1.0), 3.0, 1e-12);
  EXPECT_THROW(mgss_mean_response(0.0, 1, 1.0), std::invalid_argument);
}

TEST(HalfinWhitt, Constants) {
  EXPECT_NEAR(halfin_whitt_constant(1.0), 0.2875999709391784, 1e-12);
  EXPECT_NEAR(halfin_whitt_constant(0.7), 0.4119247504192907, 1e-12);
  EXPECT_NEAR(halfin_whitt_constant(0.5), 0.5091604338370335, 1e-12);
  EXPECT_NEAR(halfin_whitt_constant(2.0), 0.05524786267898996, 1e-12);
  EXPECT_THROW(halfin_whitt_constant(0.0), std::invalid_argument);
  EXPECT_THROW(halfin_whitt_constant(-1.0), std::invalid_argument);
}

TEST(HalfinWhitt, StrictlyDecreasing) {
  double prev = INFINITY;
  for (int i = 1; i <= 30; ++i) {
    const double v = halfin_whitt_constant(0.1 * i);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(HalfinWhitt, ErlangAtTenThousandServers) {
  // sqrt(s) E_s(s (1 - theta / sqrt(s))) at s = 1e4, high-precision references.
  const double s = 10000.0;
  const std::vector<std::pair<double, double>> ref = {
      {0.5, 0.5070084085479444}, {1.0, 0.2858126738856586}, {2.0, 0.05371304021062695}};
  for (const auto& [theta, value] : ref) {
    const double scaled = std::sqrt(s) * erlang_b(10000, s * (1.0 - theta / std::sqrt(s)));
    EXPECT_NEAR(scaled, value, 1e-10 * value) << theta;
  }
}

TEST(HalfinWhitt, ErlangLimitConverges) {
  for (double theta : {0.5, 1.0}) {
    const double s = 10000.0;
    const double scaled = std::sqrt(s) * erlang_b(10000, s * (1.0 - theta / std::sqrt(s)));
    EXPECT_NEAR(scaled / halfin_whitt_constant(theta), 1.0, 0.02) << theta;
  }
  // The gap closes like 1/sqrt(s); larger theta needs larger s.
  double prev = INFINITY;
  for (std::int64_t s : {100, 1000, 10000, 100000, 1000000}) {
    const double rs = std::sqrt(static_cast<double>(s));
    const double gap = std::abs(rs * erlang_b(s, static_cast<double>(s) * (1.0 - 2.0 / rs)) /
                                    halfin_whitt_constant(2.0) - 1.0);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 0.005);
}

TEST(StabilityLhs, SingleClassExample) {
  const auto c = make_config(5, 1.0, {exp_class(0, 2, 1.0, 1.0)});
  const auto p = compute_partition(c);
  ASSERT_EQ(p.slots[0], 1);
  ASSERT_EQ(p.helper, 3);
  EXPECT_NEAR(stability_lhs(c, p), 1.0 / 3.0, 1e-15);
}

TEST(StabilityLhs, EmptyHelperAndVanishingLoad) {
  const auto c = make_config(4, 1.0, {exp_class(0, 2, 1.0, 1.0)});
  const auto p = compute_partition(c);
  ASSERT_EQ(p.helper, 0);
  EXPECT_EQ(stability_lhs(c, p), 0.0);

  const auto tiny = make_config(5, 1e-9, {exp_class(0, 2, 1.0, 1.0)});
  EXPECT_LT(stability_lhs(tiny, compute_partition(tiny)), 1e-8);
}

TEST(StabilityLhs, RejectsMismatchedPartition) {
  const auto c = make_config(5, 1.0, {exp_class(0, 2, 1.0, 1.0)});
  auto p = compute_partition(c);
  p.helper = 1;
  EXPECT_THROW(stability_lhs(c, p), std::invalid_argument);
}

TEST(HelperRoutingBound, Examples) {
  // One class, 4 slots of need 1, offered load 2.
  const auto c = make_config(4, 2.0, {exp_class(0, 1, 1.0, 1.0)});
  const auto p = compute_partition(c);
  ASSERT_EQ(p.slots[0], 4);
  EXPECT_NEAR(helper_routing_bound(c, p), 2.0 / 21.0, 1e-15);

  const auto tiny = make_config(4, 1e-12, {exp_class(0, 1, 1.0, 1.0)});
  EXPECT_LT(helper_routing_bound(tiny, compute_partition(tiny)), 1e-40);
}

TEST(HelperRoutingBound, Figure2WorkloadAtHalfLoad) {
  // k = 256, needs scaled by 4, load 0.5; high-precision reference values.
  const auto c = config_at_load(scale_needs(figure1_classes(), 4), 256, 0.5);
  const auto p = compute_partition(c);
  EXPECT_EQ(p.slots, (std::vector<std::int64_t>{11, 7, 3, 1}));
  EXPECT_EQ(p.helper, 76);
  EXPECT_NEAR(helper_routing_bound(c, p), 0.03844041966526730, 1e-13);
  EXPECT_NEAR(stability_lhs(c, p), 0.3855309239796614, 1e-13);
}

TEST(HelperRoutingBound, WithinUnitInterval) {
  for (double lambda : {0.01, 1.0, 10.0, 100.0}) {
    const auto c = make_config(40, lambda, {exp_class(0, 1, 0.5, 1.0), exp_class(1, 8, 0.5, 3.0)});
    const double b = helper_routing_bound(c, compute_partition(c));
    EXPECT_GE(b, 0.0);
    EXPECT_LE(b, 1.0);
  }
}

TEST(CriticalBound, SingleClassCollapses) {
  for (double theta : {0.3, 0.7, 1.5}) {
    EXPECT_NEAR(critical_bound(theta, {exp_class(0, 1, 1.0, 1.0)}), halfin_whitt_constant(theta), 1e-14);
  }
}

TEST(CriticalBound, Figure1RegressionConstants) {
  EXPECT_NEAR(critical_bound(0.7, figure1_classes()), 1.468711793014510, 1e-12);
  EXPECT_NEAR(critical_bound(1.0, figure1_classes()), 1.303900201105480, 1e-12);
}

TEST(CriticalBound, InvariantUnderCommonDemandScaling) {
  // Multiplying every mean by c scales every rho_i by c, so theta_i and the
  // bound are unchanged.
  auto scaled = figure1_classes();
  for (auto& cl : scaled) cl.service = ServiceDistribution::exponential(cl.service.mean() * 3.5);
  EXPECT_NEAR(critical_bound(0.7, scaled), critical_bound(0.7, figure1_classes()), 1e-13);
  EXPECT_THROW(critical_bound(0.0, figure1_classes()), std::invalid_argument);
}
