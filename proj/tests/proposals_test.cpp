#include <random>

#include <gtest/gtest.h>

#include "osc/proposals.hpp"
#include "support/oracles.hpp"

using namespace osc;

TEST(Proposals, DefaultLadder) {
  EXPECT_EQ(default_proposal_windows(256, 256),
            (std::vector<int>{32, 45, 64, 91, 128, 181, 256}));
  EXPECT_EQ(default_proposal_windows(100, 300), (std::vector<int>{32, 45, 64, 91}));
  EXPECT_EQ(default_proposal_windows(20, 50), (std::vector<int>{20}));
}

TEST(Proposals, MatchEnumerateAndFilterOracle) {
  std::mt19937_64 g(41);
  for (int t = 0; t < 200; ++t) {
    const int w = oracle::uniform_int(g, 4, 64), h = oracle::uniform_int(g, 4, 64);
    // Integer values keep window sums exact so tie order is comparable.
    const Heatmap m = oracle::random_heatmap(g, w, h, 256.0, t % 2 == 0);
    ProposalConfig cfg;
    cfg.threshold = oracle::uniform(g, 60, 200);
    for (int k = oracle::uniform_int(g, 1, 4); k > 0; --k)
      cfg.window_sides.push_back(oracle::uniform_int(g, 1, 70));
    cfg.stride_ratio = oracle::uniform(g, 0.1, 1.0);
    cfg.max_proposals = t % 5 == 0 ? 7 : 2000;
    const auto got = scan_proposals(m, cfg);
    const auto want = oracle::proposals(m, cfg);
    ASSERT_EQ(got.size(), want.size()) << "trial " << t;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].box, want[i].box) << "trial " << t << " #" << i;
      EXPECT_NEAR(got[i].score, want[i].score, 1e-9);
      EXPECT_GT(face_score(m, got[i].box), cfg.threshold);
    }
  }
}

TEST(Proposals, ThresholdIsStrict) {
  const Heatmap at(8, 8, HeatmapScale::byte, 80.0f);
  ProposalConfig cfg;
  cfg.window_sides = {4};
  EXPECT_TRUE(scan_proposals(at, cfg).empty());
  const Heatmap above(8, 8, HeatmapScale::byte, 80.5f);
  EXPECT_EQ(scan_proposals(above, cfg).size(), 25u);  // step 1: offsets 0..4 on each axis
}

TEST(Proposals, SortedAndCapped) {
  std::mt19937_64 g(3);
  const Heatmap m = oracle::random_heatmap(g, 64, 64, 256.0);
  ProposalConfig cfg;
  cfg.threshold = 1;
  cfg.window_sides = {4, 8};
  cfg.max_proposals = 50;
  const auto p = scan_proposals(m, cfg);
  ASSERT_EQ(p.size(), 50u);
  for (std::size_t i = 1; i < p.size(); ++i) EXPECT_GE(p[i - 1].score, p[i].score);
}

TEST(Proposals, RejectsBadConfig) {
  const Heatmap m(8, 8, HeatmapScale::byte, 100.0f);
  ProposalConfig cfg;
  EXPECT_THROW(scan_proposals(m, cfg), std::invalid_argument);
  cfg.window_sides = {4};
  cfg.threshold = 0;
  EXPECT_THROW(scan_proposals(m, cfg), std::invalid_argument);
}
