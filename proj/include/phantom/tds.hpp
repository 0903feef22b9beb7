#pragma once

#include <cstdint>
#include <vector>

#include "phantom/core_types.hpp"

namespace phantom {

// One selected entry: the bit-group of a window position consumed by an
// iteration. Entries are consumed whole, so the tag (this lane's work for the
// position is finished) is set at selection time.
struct SelectedEntry {
  int position = 0;
  uint8_t group = 0;
  bool tag = true;
};

// Selection of one lane over one lookahead window. An all-zero window yields
// a single empty iteration: the selector scans once, selects nothing, and no
// compute cycle is issued.
struct LaneSelection {
  std::vector<std::vector<SelectedEntry>> iterations;

  int64_t selected_ones() const;
  // Iterations that issue compute (select at least one bit).
  int compute_cycles() const;
};

// In-order: per iteration, scan top-down from the first unconsumed entry and
// keep taking entries while the running ones-count fits the thread cap; the
// first entry that would overflow stops the whole scan for this iteration.
LaneSelection tds_select_in_order(const std::vector<uint8_t>& entries,
                                  const CoreConfig& cfg);

// Out-of-order: per iteration, take the highest-priority unconsumed entry,
// then consider every later unconsumed entry, taking each that still fits.
// The scan direction reverses on alternate iterations so entries skipped last
// time get the highest priority.
LaneSelection tds_select_out_of_order(const std::vector<uint8_t>& entries,
                                      const CoreConfig& cfg);

LaneSelection tds_select(const std::vector<uint8_t>& entries, const CoreConfig& cfg);

// Scratch-friendly flat selection used by the hot path; public selections
// wrap it. entries bits must fit threads_per_pe.
struct SelectionScratch {
  std::vector<SelectedEntry> entries;
  std::vector<int> iter_end;  // prefix end offsets into `entries`, one per iteration

  int iterations() const { return static_cast<int>(iter_end.size()); }
  void clear() {
    entries.clear();
    iter_end.clear();
  }
};

// Returns the number of compute-issuing iterations appended to `out`.
int select_lane(const uint8_t* entries, int n, const CoreConfig& cfg,
                SelectionScratch& out);

}  // namespace phantom
