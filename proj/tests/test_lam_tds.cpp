#include <doctest.h>

#include <bit>
#include <random>

#include "phantom/lam.hpp"
#include "phantom/tds.hpp"

using namespace phantom;

namespace {

CoreConfig canonical() { return CoreConfig{}; }

LamBlock block_from(const std::vector<std::vector<uint8_t>>& rows) {
  LamBlock b;
  b.lanes = static_cast<int>(rows[0].size());
  b.slots = 3;
  for (const auto& row : rows) {
    uint8_t any = 0;
    for (uint8_t g : row) {
      b.groups.push_back(g);
      any |= g;
    }
    b.reduced.push_back(any ? 1 : 0);
  }
  return b;
}

int64_t total_ones(const std::vector<uint8_t>& entries) {
  int64_t n = 0;
  for (uint8_t e : entries) n += std::popcount(static_cast<unsigned>(e));
  return n;
}

}  // namespace

TEST_CASE("lam_generate ANDs weight and window lanes") {
  // wmask lane 101, window lane 111 -> 101
  auto block = lam_generate({0b101}, {{0b111}}, 3);
  CHECK(block.group(0, 0) == 0b101);
  CHECK(block.reduced[0] == 1);
}

TEST_CASE("lam_generate reduced bit is the all-zero check across lanes") {
  auto block = lam_generate({0b111, 0b111}, {{0b000, 0b010}, {0b000, 0b000}}, 3);
  CHECK(block.group(0, 0) == 0);
  CHECK(block.group(0, 1) == 0b010);
  CHECK(block.reduced[0] == 1);
  CHECK(block.reduced[1] == 0);
}

TEST_CASE("lam_generate matches the brute-force AND oracle on random windows") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<uint8_t> wlanes(3);
    for (auto& g : wlanes) g = static_cast<uint8_t>(rng() % 8);
    std::vector<std::vector<uint8_t>> windows(3, std::vector<uint8_t>(3));
    for (auto& w : windows)
      for (auto& g : w) g = static_cast<uint8_t>(rng() % 8);
    auto block = lam_generate(wlanes, windows, 3);
    for (int p = 0; p < 3; ++p) {
      uint8_t any = 0;
      for (int l = 0; l < 3; ++l) {
        uint8_t expect = 0;
        for (int s = 0; s < 3; ++s) {
          bool w = (wlanes[static_cast<std::size_t>(l)] >> s) & 1;
          bool a = (windows[static_cast<std::size_t>(p)][static_cast<std::size_t>(l)] >> s) & 1;
          if (w && a) expect |= uint8_t{1} << s;
        }
        CHECK(block.group(p, l) == expect);
        any |= expect;
      }
      CHECK(block.reduced[static_cast<std::size_t>(p)] == (any ? 1 : 0));
    }
  }
}

TEST_CASE("lam_generate rejects mismatched lane counts") {
  CHECK_THROWS_AS(lam_generate({0b101, 0b111}, {{0b111}}, 3), ValidationError);
}

TEST_CASE("in-order selection: the spec walk-through [011, 011, 010]") {
  auto sel = tds_select_in_order({0b011, 0b011, 0b010}, canonical());
  REQUIRE(sel.iterations.size() == 2);
  REQUIRE(sel.iterations[0].size() == 1);
  CHECK(sel.iterations[0][0].position == 0);
  CHECK(sel.iterations[0][0].group == 0b011);
  CHECK(sel.iterations[0][0].tag);
  REQUIRE(sel.iterations[1].size() == 2);
  CHECK(sel.iterations[1][0].position == 1);
  CHECK(sel.iterations[1][1].position == 2);
  CHECK(sel.compute_cycles() == 2);
}

TEST_CASE("in-order selection: all-zero entries select nothing in one scan") {
  auto sel = tds_select_in_order({0, 0, 0}, canonical());
  CHECK(sel.iterations.size() == 1);
  CHECK(sel.iterations[0].empty());
  CHECK(sel.compute_cycles() == 0);
  CHECK(sel.selected_ones() == 0);
}

TEST_CASE("in-order selection: a full 111 entry is selected alone") {
  auto sel = tds_select_in_order({0b111}, canonical());
  REQUIRE(sel.iterations.size() == 1);
  CHECK(sel.iterations[0].size() == 1);
  CHECK(sel.selected_ones() == 3);
}

TEST_CASE("out-of-order selection: [011 011 010] completes in 2 iterations") {
  auto sel = tds_select_out_of_order({0b011, 0b011, 0b010}, canonical());
  REQUIRE(sel.iterations.size() == 2);
  REQUIRE(sel.iterations[0].size() == 2);
  CHECK(sel.iterations[0][0].position == 0);
  CHECK(sel.iterations[0][1].position == 2);  // 011 skipped, 010 accepted
  REQUIRE(sel.iterations[1].size() == 1);
  CHECK(sel.iterations[1][0].position == 1);
}

TEST_CASE("out-of-order selection: dense entries take one iteration each") {
  auto sel = tds_select_out_of_order({0b111, 0b111, 0b111}, canonical());
  CHECK(sel.compute_cycles() == 3);
  auto sel_io = tds_select_in_order({0b111, 0b111, 0b111}, canonical());
  CHECK(sel_io.compute_cycles() == 3);
}

TEST_CASE("selection invariants on random windows") {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    int n = 1 + static_cast<int>(rng() % 27);
    std::vector<uint8_t> entries(static_cast<std::size_t>(n));
    for (auto& e : entries) e = static_cast<uint8_t>(rng() % 8);
    for (bool ooo : {false, true}) {
      auto sel = ooo ? tds_select_out_of_order(entries, canonical())
                     : tds_select_in_order(entries, canonical());
      // per-iteration cap, no duplicate selection, union covers all ones
      std::vector<bool> seen(static_cast<std::size_t>(n), false);
      for (const auto& iter : sel.iterations) {
        int ones = 0;
        for (const auto& e : iter) {
          ones += std::popcount(static_cast<unsigned>(e.group));
          CHECK(!seen[static_cast<std::size_t>(e.position)]);
          seen[static_cast<std::size_t>(e.position)] = true;
          CHECK(e.group == entries[static_cast<std::size_t>(e.position)]);
          CHECK(e.tag);
        }
        CHECK(ones <= 3);
      }
      CHECK(sel.selected_ones() == total_ones(entries));
    }
  }
}

TEST_CASE("out-of-order never needs more iterations than in-order (exhaustive <= 4)") {
  CoreConfig cfg = canonical();
  for (int len = 1; len <= 4; ++len) {
    int combos = 1;
    for (int i = 0; i < len; ++i) combos *= 8;
    for (int code = 0; code < combos; ++code) {
      std::vector<uint8_t> entries(static_cast<std::size_t>(len));
      int c = code;
      for (int i = 0; i < len; ++i) {
        entries[static_cast<std::size_t>(i)] = static_cast<uint8_t>(c % 8);
        c /= 8;
      }
      auto io = tds_select_in_order(entries, cfg);
      auto oo = tds_select_out_of_order(entries, cfg);
      CHECK(oo.compute_cycles() <= io.compute_cycles());
    }
  }
}

TEST_CASE("intra-balance golden: 9 ones in lane 0 go from 3 cycles to 1") {
  auto block = block_from({{0b111, 0, 0}, {0b111, 0, 0}, {0b111, 0, 0}});
  CoreConfig cfg = canonical();
  CHECK(window_selection_cycles(block, cfg) == 3);

  CoreConfig balanced = cfg;
  balanced.intra_balance = true;
  auto [rot, sched] = intra_balance(block, balanced);
  CHECK(sched.applied());
  CHECK(window_selection_cycles(rot, balanced) == 1);
  // utilization 9/(3*3*3) = 33% unbalanced, 9/(1*3*3) = 100% balanced
  CHECK(9.0 / (3 * 9) == doctest::Approx(1.0 / 3));
  CHECK(9.0 / (1 * 9) == doctest::Approx(1.0));
  // rotated lane l at position p draws from original lane (l - p) mod 3
  CHECK(rot.group(0, 0) == 0b111);
  CHECK(rot.group(1, 1) == 0b111);
  CHECK(rot.group(2, 2) == 0b111);
  CHECK(original_lane(sched, 1, 1) == 0);
  CHECK(original_lane(sched, 2, 2) == 0);
}

TEST_CASE("intra-balance is a no-op on symmetric instances") {
  auto block = block_from({{0b011, 0b011, 0b011}, {0b010, 0b010, 0b010}});
  CoreConfig balanced = canonical();
  balanced.intra_balance = true;
  auto [rot, sched] = intra_balance(block, balanced);
  CHECK(!sched.applied());
  CHECK(rot.groups == block.groups);
}

TEST_CASE("intra-balance never increases a window's cycles") {
  std::mt19937 rng(99);
  CoreConfig cfg = canonical();
  cfg.intra_balance = true;
  for (int trial = 0; trial < 1000; ++trial) {
    int positions = 1 + static_cast<int>(rng() % 6);
    std::vector<std::vector<uint8_t>> rows(static_cast<std::size_t>(positions),
                                           std::vector<uint8_t>(3));
    for (auto& row : rows)
      for (auto& g : row) g = (rng() % 2) ? static_cast<uint8_t>(rng() % 8) : 0;
    auto block = block_from(rows);
    auto [rot, sched] = intra_balance(block, cfg);
    CHECK(window_selection_cycles(rot, cfg) <= window_selection_cycles(block, cfg));
    CHECK(rot.reduced == block.reduced);
  }
}
