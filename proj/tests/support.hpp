#pragma once

#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

namespace fcdc::test {

inline std::filesystem::path data_dir() { return FCDC_DATA_DIR; }

inline ::testing::AssertionResult near_rel(double expected, double actual, double tol) {
  const double dev = std::abs(actual / expected - 1.0);
  if (dev <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "expected " << expected << " got " << actual << " (rel dev "
                                       << dev << " > " << tol << ")";
}

}  // namespace fcdc::test

#define EXPECT_REL(expected, actual, tol) EXPECT_TRUE(::fcdc::test::near_rel((expected), (actual), (tol)))
