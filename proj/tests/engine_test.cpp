/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "herosim/engine.hpp"

namespace hero {
namespace {

TEST(Engine, EmptyQueueReturnsZero) {
  SimEngine e;
  e.add_domain("host");
  EXPECT_EQ(e.run_until_idle(), 0u);
}

TEST(Engine, SingleEventTime) {
  SimEngine e;
  const auto d = e.add_domain("host");
  e.schedule(d, 7, [] {});
  EXPECT_EQ(e.run_until_idle(), 7u);
}

TEST(Engine, DelayIsDomainLocal) {
  SimEngine e;
  const auto pmca = e.add_domain("pmca");
  Cycle fired = 0;
  e.schedule(pmca, 10, [&] { e.schedule(pmca, 5, [&] { fired = e.local_now(pmca); }); });
  e.run_until_idle();
  EXPECT_EQ(fired, 15u);
}

TEST(Engine, GatingStretchesGlobalTimeOnly) {
  SimEngine e;
  const auto host = e.add_domain("host");
  const auto pmca = e.add_domain("pmca");
  Cycle local = 0, global = 0;
  e.schedule(pmca, 10, [&] {
    e.schedule(pmca, 5, [&] {
      local = e.local_now(pmca);
      global = e.now();
    });
  });
  // Gate at local 12 for 100 host cycles.
  e.schedule(host, 12, [&] {
    e.gate(pmca);
    e.schedule(host, 100, [&] { e.ungate(pmca); });
  });
  e.run_until_idle();
  EXPECT_EQ(local, 15u);
  EXPECT_EQ(global, 115u);
}

TEST(Engine, GateUngateWithoutHostTimeIsIdentity) {
  SimEngine e;
  const auto host = e.add_domain("host");
  const auto pmca = e.add_domain("pmca");
  std::vector<Cycle> seen;
  for (Cycle d : {3, 9, 9, 20}) e.schedule(pmca, d, [&] { seen.push_back(e.local_now(pmca)); });
  e.schedule(host, 5, [&] {
    e.gate(pmca);
    e.ungate(pmca);
  });
  e.run_until_idle();
  EXPECT_EQ(seen, (std::vector<Cycle>{3, 9, 9, 20}));
}

TEST(Engine, GatedLocalTimeFrozen) {
  SimEngine e;
  const auto host = e.add_domain("host");
  const auto pmca = e.add_domain("pmca");
  Cycle before = 0, during = 0;
  e.schedule(host, 4, [&] {
    before = e.local_now(pmca);
    e.gate(pmca);
    e.schedule(host, 1000, [&] {
      during = e.local_now(pmca);
      e.ungate(pmca);
    });
  });
  e.run_until_idle();
  EXPECT_EQ(before, 4u);
  EXPECT_EQ(during, 4u);
  EXPECT_EQ(e.local_now(pmca), 4u);
  EXPECT_EQ(e.now(), 1004u);
}

TEST(Engine, DoubleGateAndUngateAreErrors) {
  SimEngine e;
  const auto d = e.add_domain("pmca");
  EXPECT_THROW(e.ungate(d), SimulationError);
  e.gate(d);
  EXPECT_THROW(e.gate(d), SimulationError);
}

TEST(Engine, UnknownDomainIsError) {
  SimEngine e;
  EXPECT_ANY_THROW(e.schedule(3, 1, [] {}));
}

TEST(Engine, EqualDueTimesFireInInsertionOrder) {
  SimEngine e;
  const auto d = e.add_domain("x");
  std::vector<int> order;
  for (int i = 0; i < 10; ++i) e.schedule(d, 5, [&, i] { order.push_back(i); });
  e.run_until_idle();
  for (int i = 0; i < 10; ++i) EXPECT_EQ(order[i], i);
}

TEST(Engine, DomainIdBreaksTies) {
  SimEngine e;
  const auto a = e.add_domain("a");
  const auto b = e.add_domain("b");
  std::vector<int> order;
  e.schedule(b, 5, [&] { order.push_back(1); });
  e.schedule(a, 5, [&] { order.push_back(0); });
  e.run_until_idle();
  EXPECT_EQ(order, (std::vector<int>{0, 1}));
}

TEST(Engine, LivelockGuard) {
  SimEngine e(100);
  const auto d = e.add_domain("x");
  std::function<void()> loop = [&] { e.schedule(d, 1, loop); };
  e.schedule(d, 0, loop);
  EXPECT_THROW(e.run_until_idle(), SimulationError);
}

// Random schedule with nested follow-ups. Returns the fired log.
std::vector<FiredEvent> random_run(std::uint64_t seed, bool with_gating, std::vector<std::pair<Cycle, int>>* pmca_seen) {
  SimEngine e;
  const auto host = e.add_domain("host");
  const auto pmca = e.add_domain("pmca");
  e.enable_log(true);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 200; ++i) {
    const Cycle d = rng() % 300;
    const int id = i;
    const Cycle follow = rng() % 40;
    e.schedule(pmca, d, [&e, pmca, id, follow, pmca_seen] {
      if (pmca_seen) pmca_seen->push_back({e.local_now(pmca), id});
      e.schedule(pmca, follow, [&e, pmca, id, pmca_seen] {
        if (pmca_seen) pmca_seen->push_back({e.local_now(pmca), 1000 + id});
      });
    });
  }
  if (with_gating) {
    std::mt19937_64 g(seed ^ 0x9e3779b97f4a7c15ULL);
    for (int i = 0; i < 10; ++i) {
      const Cycle at = 30 * i + g() % 20;
      const Cycle len = 1 + g() % 50;
      e.schedule(host, at, [&e, host, pmca, len] {
        if (e.domain(pmca).gated) return;
        e.gate(pmca);
        e.schedule(host, len, [&e, pmca] { e.ungate(pmca); });
      });
    }
  }
  e.run_until_idle();
  return e.log();
}

TEST(Engine, ReplayIsDeterministic) {
  for (std::uint64_t s = 1; s <= 20; ++s) EXPECT_EQ(random_run(s, true, nullptr), random_run(s, true, nullptr));
}

TEST(Engine, GatingIsTransparentToPmcaLocalTime) {
  for (std::uint64_t s = 1; s <= 50; ++s) {
    std::vector<std::pair<Cycle, int>> plain, gated;
    random_run(s, false, &plain);
    random_run(s, true, &gated);
    EXPECT_EQ(plain, gated) << "seed " << s;
  }
}

}  // namespace
}  // namespace hero
