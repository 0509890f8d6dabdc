#include "search_engine.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <queue>

namespace modelspace::detail {

namespace {

struct OpenEntry {
  double key;
  int tie;  // parent's unsatisfied goal count; breaks ties on key
  std::uint64_t seq;
  NodeId parent;
  ActionId op;  // index into ops_
};

struct LaterFirst {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.key != b.key) return a.key > b.key;
    if (a.tie != b.tie) return a.tie > b.tie;
    return a.seq > b.seq;
  }
};

inline void set_bit(std::uint64_t* s, std::uint32_t b) { s[b >> 6] |= std::uint64_t{1} << (b & 63); }
inline void clear_bit(std::uint64_t* s, std::uint32_t b) { s[b >> 6] &= ~(std::uint64_t{1} << (b & 63)); }
inline bool test_bit(const std::uint64_t* s, std::uint32_t b) { return (s[b >> 6] >> (b & 63)) & 1u; }

}  // namespace

SearchEngine::SearchEngine(const GroundTask& task, std::span<const double> costs, SearchMode mode)
    : task_(task), costs_(costs), mode_(mode) {
  const std::size_t n_atoms = task.atoms.size();
  std::vector<char> in_init(n_atoms, 0);
  for (AtomId a : task.init) in_init[a] = 1;

  // Atoms never touched by an effect keep their initial value.
  std::vector<char> fluent(n_atoms, 0);
  for (const auto& act : task.actions) {
    for (AtomId a : act.add) fluent[a] = 1;
    for (AtomId a : act.del) fluent[a] = 1;
  }
  bit_of_.assign(n_atoms, -1);
  static_true_.assign(n_atoms, 0);
  int bits = 0;
  for (std::size_t a = 0; a < n_atoms; ++a) {
    if (fluent[a]) {
      bit_of_[a] = bits++;
    } else {
      static_true_[a] = in_init[a];
    }
  }
  words_ = std::max<std::size_t>(1, (static_cast<std::size_t>(bits) + 63) / 64);

  std::vector<std::uint32_t> pre_frequency(static_cast<std::size_t>(bits), 0);
  for (std::size_t i = 0; i < task.actions.size(); ++i) {
    const auto& act = task.actions[i];
    Op op{static_cast<ActionId>(i), {}, {}, {}};
    bool possible = true;
    for (AtomId a : act.pre) {
      if (bit_of_[a] >= 0) {
        op.pre.push_back(static_cast<std::uint32_t>(bit_of_[a]));
      } else if (!static_true_[a]) {
        possible = false;
        break;
      }
    }
    if (!possible) continue;
    for (AtomId a : act.add) op.add.push_back(static_cast<std::uint32_t>(bit_of_[a]));
    for (AtomId a : act.del) op.del.push_back(static_cast<std::uint32_t>(bit_of_[a]));
    for (auto b : op.pre) ++pre_frequency[b];
    ops_.push_back(std::move(op));
  }

  // Each op waits on its least common fluent precondition.
  trigger_.assign(static_cast<std::size_t>(bits), {});
  pre_of_.assign(static_cast<std::size_t>(bits), {});
  for (std::uint32_t i = 0; i < ops_.size(); ++i) {
    for (auto b : ops_[i].pre) pre_of_[b].push_back(i);
  }
  for (std::uint32_t i = 0; i < ops_.size(); ++i) {
    const auto& pre = ops_[i].pre;
    if (pre.empty()) {
      unconditional_.push_back(i);
      continue;
    }
    auto rarest = *std::min_element(pre.begin(), pre.end(), [&](auto x, auto y) {
      return pre_frequency[x] < pre_frequency[y];
    });
    trigger_[rarest].push_back(i);
  }

  for (AtomId a : task.goal) {
    if (bit_of_[a] >= 0) {
      goal_bits_.push_back(static_cast<std::uint32_t>(bit_of_[a]));
    } else if (!static_true_[a]) {
      goal_reachable_ = false;
    }
  }

  init_.assign(words_, 0);
  for (AtomId a : task.init) {
    if (bit_of_[a] >= 0) set_bit(init_.data(), static_cast<std::uint32_t>(bit_of_[a]));
  }
}

bool SearchEngine::holds(NodeId node, AtomId atom) const {
  const int b = bit_of_[atom];
  if (b < 0) return static_true_[atom] != 0;
  return test_bit(state(node), static_cast<std::uint32_t>(b));
}

std::vector<ActionId> SearchEngine::path_to(NodeId node) const {
  std::vector<ActionId> out;
  while (parent_[node] != kNone) {
    out.push_back(via_[node]);
    node = parent_[node];
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::uint64_t SearchEngine::hash_state(const std::uint64_t* s) const {
  std::uint64_t h = 0x9e3779b97f4a7c15ull;
  for (std::size_t i = 0; i < words_; ++i) {
    h ^= s[i] + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
  }
  return h;
}

bool SearchEngine::same_state(const std::uint64_t* a, const std::uint64_t* b) const {
  return std::equal(a, a + words_, b);
}

void SearchEngine::grow_table() {
  std::vector<NodeId> bigger(std::max<std::size_t>(1024, table_.size() * 2), kNone);
  const std::size_t mask = bigger.size() - 1;
  for (NodeId id : table_) {
    if (id == kNone) continue;
    std::size_t slot = hash_state(state(id)) & mask;
    while (bigger[slot] != kNone) slot = (slot + 1) & mask;
    bigger[slot] = id;
  }
  table_.swap(bigger);
}

std::pair<NodeId, bool> SearchEngine::intern(const std::vector<std::uint64_t>& s) {
  if ((table_used_ + 1) * 2 > table_.size()) grow_table();
  const std::size_t mask = table_.size() - 1;
  std::size_t slot = hash_state(s.data()) & mask;
  while (table_[slot] != kNone) {
    if (same_state(state(table_[slot]), s.data())) return {table_[slot], false};
    slot = (slot + 1) & mask;
  }
  const auto id = static_cast<NodeId>(parent_.size());
  pool_.insert(pool_.end(), s.begin(), s.end());
  parent_.push_back(kNone);
  via_.push_back(0);
  g_.push_back(0.0);
  table_[slot] = id;
  ++table_used_;
  return {id, true};
}

bool SearchEngine::is_goal(const std::uint64_t* s) const {
  if (!goal_reachable_) return false;
  for (auto b : goal_bits_) {
    if (!test_bit(s, b)) return false;
  }
  return true;
}

int SearchEngine::goal_distance(const std::uint64_t* s) const {
  int missing = 0;
  for (auto b : goal_bits_) missing += test_bit(s, b) ? 0 : 1;
  return missing;
}

bool SearchEngine::relaxed_dead_end(const std::uint64_t* s) {
  unmet_.resize(ops_.size());
  for (std::size_t i = 0; i < ops_.size(); ++i) unmet_[i] = static_cast<std::uint32_t>(ops_[i].pre.size());
  reached_.assign(pre_of_.size(), 0);
  frontier_.clear();
  auto reach = [&](std::uint32_t b) {
    if (!reached_[b]) {
      reached_[b] = 1;
      frontier_.push_back(b);
    }
  };
  for (std::uint32_t b = 0; b < pre_of_.size(); ++b) {
    if (test_bit(s, b)) reach(b);
  }
  for (auto i : unconditional_) {
    for (auto b : ops_[i].add) reach(b);
  }
  for (std::size_t next = 0; next < frontier_.size(); ++next) {
    for (auto i : pre_of_[frontier_[next]]) {
      if (--unmet_[i] == 0) {
        for (auto b : ops_[i].add) reach(b);
      }
    }
  }
  return std::any_of(goal_bits_.begin(), goal_bits_.end(), [&](auto b) { return !reached_[b]; });
}

SearchEngine::Result SearchEngine::run(const SearchBudget& budget, const SearchHooks& hooks) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  Result result;
  auto finish = [&](SolveStatus status) {
    result.status = status;
    result.stats.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
  };
  if (!goal_reachable_) return finish(SolveStatus::kProvenUnsolvable);

  std::priority_queue<OpenEntry, std::vector<OpenEntry>, LaterFirst> open;
  std::uint64_t seq = 0;
  open.push({0.0, 0, seq++, kNone, 0});
  std::vector<std::uint64_t> scratch(words_);
  std::vector<std::uint32_t> applicable;

  while (!open.empty()) {
    if (result.stats.expansions >= budget.max_expansions) return finish(SolveStatus::kBudgetExhausted);
    if ((result.stats.expansions & 1023u) == 0 && result.stats.expansions > 0 &&
        std::chrono::duration<double>(Clock::now() - start).count() > budget.max_seconds) {
      return finish(SolveStatus::kBudgetExhausted);
    }
    const OpenEntry entry = open.top();
    open.pop();

    double g = 0.0;
    if (entry.parent == kNone) {
      scratch = init_;
    } else {
      const Op& op = ops_[entry.op];
      std::copy(state(entry.parent), state(entry.parent) + words_, scratch.begin());
      for (auto b : op.del) clear_bit(scratch.data(), b);
      for (auto b : op.add) set_bit(scratch.data(), b);
      g = g_[entry.parent] + cost(op.id);
    }
    const auto [node, fresh] = intern(scratch);
    if (!fresh) continue;
    parent_[node] = entry.parent;
    via_[node] = entry.parent == kNone ? 0 : ops_[entry.op].id;
    g_[node] = g;
    if (hooks.halt && hooks.halt(node)) return finish(SolveStatus::kSolved);

    if (is_goal(state(node))) {
      if (!hooks.on_goal || hooks.on_goal(node)) {
        result.goal = node;
        return finish(SolveStatus::kSolved);
      }
    }
    if (hooks.skip_expansion && hooks.skip_expansion(node)) continue;
    if (prune_dead_ends_ && relaxed_dead_end(state(node))) continue;

    ++result.stats.expansions;
    if (hooks.on_expand) hooks.on_expand(node);
    const std::uint64_t* s = state(node);
    applicable.clear();
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t bits = s[w];
      while (bits != 0) {
        const auto b = static_cast<std::uint32_t>(w * 64 + std::countr_zero(bits));
        bits &= bits - 1;
        for (auto i : trigger_[b]) {
          const auto& pre = ops_[i].pre;
          if (std::all_of(pre.begin(), pre.end(), [&](auto p) { return test_bit(s, p); })) {
            applicable.push_back(i);
          }
        }
      }
    }
    applicable.insert(applicable.end(), unconditional_.begin(), unconditional_.end());
    std::sort(applicable.begin(), applicable.end());

    const int h = goal_distance(s);
    for (auto i : applicable) {
      if (hooks.allow_successor && !hooks.allow_successor(node, ops_[i].id)) continue;
      const double key = mode_ == SearchMode::kGreedy ? double(h) : g + cost(ops_[i].id);
      open.push({key, h, seq++, node, i});
      ++result.stats.generated;
    }
  }
  return finish(SolveStatus::kProvenUnsolvable);
}

}  // namespace modelspace::detail
