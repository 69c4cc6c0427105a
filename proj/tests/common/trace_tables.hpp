#pragma once

// Published per-class models for two public workload logs, restricted to
// power-of-two needs up to 64. Columns: mean, std, need, share.

#include <array>
#include <cstdint>

namespace msj::reference {

struct ClassRow {
  double mean;
  double stddev;
  std::int64_t need;
  double share;
};

inline constexpr std::array<ClassRow, 7> kSdscSp2 = {{{10519.71, 18267.03, 1, 0.2321},
                                                      {1436.82, 6250.19, 2, 0.1496},
                                                      {5643.69, 18123.7, 4, 0.1624},
                                                      {9248.53, 18468.51, 8, 0.1652},
                                                      {10601.46, 17050.63, 16, 0.156},
                                                      {12139.59, 22654.86, 32, 0.0807},
                                                      {8302.33, 19074.81, 64, 0.054}}};

inline constexpr std::array<ClassRow, 7> kKitFh2 = {{{1845.19, 11440.31, 1, 0.7851},
                                                     {1470.13, 5237.83, 2, 0.018},
                                                     {11169.87, 38631.83, 4, 0.0406},
                                                     {3167.33, 19727.29, 8, 0.0137},
                                                     {5706.45, 17212.04, 16, 0.0539},
                                                     {60673.08, 92531.56, 32, 0.0493},
                                                     {61343.42, 106094.97, 64, 0.0393}}};

// Fraction of SDSC SP2 records whose processor count is a power of two.
inline constexpr double kSdscPowerOfTwoFraction = 0.844;

// Exact statistics of tests/data/fixture.swf after the power-of-two filter.
struct FixtureRow {
  std::int64_t need;
  std::int64_t count;
  double share;
  double mean;
  double stddev;
};

inline constexpr std::int64_t kFixtureUsable = 47;
inline constexpr std::int64_t kFixtureKept = 39;
inline constexpr std::array<FixtureRow, 7> kFixture = {{{1, 7, 0.1794871794871795, 2326.4285714285716, 1529.1355790274513},
                                                        {2, 10, 0.2564102564102564, 2682.9, 1488.369611353309},
                                                        {4, 6, 0.15384615384615385, 2810.5, 1523.3542923430516},
                                                        {8, 4, 0.10256410256410256, 2452.5, 1381.2604147420332},
                                                        {16, 4, 0.10256410256410256, 1735.5, 826.3552504825028},
                                                        {32, 5, 0.1282051282051282, 3091.2, 1820.516602506003},
                                                        {64, 3, 0.07692307692307693, 2428.0, 798.0870879797518}}};

}  // namespace msj::reference
