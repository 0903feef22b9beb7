#include "phantom/tds.hpp"

#include <bit>

namespace phantom {

int64_t LaneSelection::selected_ones() const {
  int64_t n = 0;
  for (const auto& it : iterations)
    for (const auto& e : it) n += std::popcount(static_cast<unsigned>(e.group));
  return n;
}

int LaneSelection::compute_cycles() const {
  int n = 0;
  for (const auto& it : iterations)
    if (!it.empty()) ++n;
  return n;
}

namespace {

void check_entries(const uint8_t* entries, int n, const CoreConfig& cfg) {
  for (int i = 0; i < n; ++i)
    if (entries[i] >> cfg.threads_per_pe)
      throw ValidationError("selector entry wider than the thread group");
}

int select_in_order(const uint8_t* entries, int n, int cap, SelectionScratch& out) {
  int consumed_upto = 0;  // entries below this are fully consumed
  int iters = 0;
  while (true) {
    int first_ones = consumed_upto;
    while (first_ones < n && entries[first_ones] == 0) ++first_ones;
    if (first_ones >= n) break;
    ++iters;
    int count = 0;
    int i = consumed_upto;
    while (i < n) {
      int c = std::popcount(static_cast<unsigned>(entries[i]));
      if (count + c > cap) break;
      count += c;
      if (entries[i] != 0) out.entries.push_back({i, entries[i], true});
      ++i;
    }
    consumed_upto = i;
    out.iter_end.push_back(static_cast<int>(out.entries.size()));
  }
  return iters;
}

int select_out_of_order(const uint8_t* entries, int n, int cap, SelectionScratch& out) {
  uint32_t pending = 0;  // bit per entry with unconsumed ones (n <= 27)
  for (int i = 0; i < n; ++i)
    if (entries[i] != 0) pending |= 1u << i;
  int iters = 0;
  bool topdown = true;
  while (pending != 0) {
    ++iters;
    int count = 0;
    bool first = true;
    for (int step = 0; step < n; ++step) {
      int i = topdown ? step : n - 1 - step;
      if (!(pending & (1u << i))) continue;
      int c = std::popcount(static_cast<unsigned>(entries[i]));
      if (first || count + c <= cap) {
        out.entries.push_back({i, entries[i], true});
        pending &= ~(1u << i);
        count += c;
        first = false;
      }
    }
    out.iter_end.push_back(static_cast<int>(out.entries.size()));
    topdown = !topdown;
  }
  return iters;
}

LaneSelection wrap(const std::vector<uint8_t>& entries, const CoreConfig& cfg,
                   bool in_order) {
  cfg.validate();
  if (entries.size() > 27)
    throw ValidationError("selection window longer than the lookahead bound");
  check_entries(entries.data(), static_cast<int>(entries.size()), cfg);
  SelectionScratch scratch;
  int iters = in_order ? select_in_order(entries.data(), static_cast<int>(entries.size()),
                                         cfg.threads_per_pe, scratch)
                       : select_out_of_order(entries.data(),
                                             static_cast<int>(entries.size()),
                                             cfg.threads_per_pe, scratch);
  LaneSelection sel;
  if (iters == 0 && !entries.empty()) {
    // all-zero window: one scan, nothing selected, no compute issued
    sel.iterations.emplace_back();
    return sel;
  }
  int begin = 0;
  for (int end : scratch.iter_end) {
    sel.iterations.emplace_back(scratch.entries.begin() + begin,
                                scratch.entries.begin() + end);
    begin = end;
  }
  return sel;
}

}  // namespace

int select_lane(const uint8_t* entries, int n, const CoreConfig& cfg,
                SelectionScratch& out) {
  if (n > 27) throw InternalError("selection window longer than the lookahead bound");
  return (cfg.tds == TdsVariant::in_order)
             ? select_in_order(entries, n, cfg.threads_per_pe, out)
             : select_out_of_order(entries, n, cfg.threads_per_pe, out);
}

LaneSelection tds_select_in_order(const std::vector<uint8_t>& entries,
                                  const CoreConfig& cfg) {
  return wrap(entries, cfg, true);
}

LaneSelection tds_select_out_of_order(const std::vector<uint8_t>& entries,
                                      const CoreConfig& cfg) {
  return wrap(entries, cfg, false);
}

LaneSelection tds_select(const std::vector<uint8_t>& entries, const CoreConfig& cfg) {
  return wrap(entries, cfg, cfg.tds == TdsVariant::in_order);
}

}  // namespace phantom
