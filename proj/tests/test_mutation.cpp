#include "holodisc/acceptance.hpp"
#include "holodisc/accal.hpp"

#include <gtest/gtest.h>

using namespace holodisc;

// A sign error in F_zbar + F_z A must be caught by the Hölder and Montel checks.
TEST(Mutation, ResidualSignErrorFailsHolderAndMontel) {
  accal::testing::ResidualSignMutation flip;
  const auto holder = acceptance::run_criterion(6, 1);
  const auto montel = acceptance::run_criterion(8, 1);
  EXPECT_FALSE(holder.pass) << holder.details.dump();
  EXPECT_FALSE(montel.pass) << montel.details.dump();
}

TEST(Mutation, UnmutatedChecksPass) {
  EXPECT_TRUE(acceptance::run_criterion(8, 1).pass);
}
