#include "ccall/tabling.hpp"

#include <algorithm>
#include <string>

#include "ccall/error.hpp"

namespace ccall {

Counters Counters::operator-(const Counters& o) const {
  Counters d;
  d.suspensions = suspensions - o.suspensions;
  d.resumptions = resumptions - o.resumptions;
  d.e_cells = e_cells - o.e_cells;
  d.h_cells = h_cells - o.h_cells;
  d.trail_at_suspend = trail_at_suspend - o.trail_at_suspend;
  d.generators = generators - o.generators;
  d.answers = answers - o.answers;
  d.steps = steps - o.steps;
  d.slg_clause_resolutions = slg_clause_resolutions - o.slg_clause_resolutions;
  d.incomplete_reads = incomplete_reads - o.incomplete_reads;
  return d;
}

std::ostream& operator<<(std::ostream& os, const Counters& c) {
  return os << "suspensions=" << c.suspensions
            << " resumptions=" << c.resumptions << " e_cells=" << c.e_cells
            << " h_cells=" << c.h_cells
            << " trail_at_suspend=" << c.trail_at_suspend
            << " generators=" << c.generators << " answers=" << c.answers;
}

std::optional<GeneratorId> TableSpace::find(const FrozenTerm& call) const {
  auto it = index_.find(call);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

GeneratorId TableSpace::create(FrozenTerm call, std::size_t trail_mark) {
  if (index_.contains(call)) {
    throw InternalError("generator already exists for this call variant");
  }
  auto id = static_cast<GeneratorId>(entries_.size());
  GeneratorEntry e;
  e.call = call;
  e.stack_pos = stack_.size();
  e.link = e.stack_pos;
  e.trail_mark = trail_mark;
  entries_.push_back(std::move(e));
  index_.emplace(std::move(call), id);
  stack_.push_back(id);
  return id;
}

GeneratorEntry& TableSpace::mutable_entry(GeneratorId id) {
  if (id >= entries_.size()) {
    throw InternalError("unknown generator id " + std::to_string(id));
  }
  return entries_[id];
}

bool TableSpace::add_answer(GeneratorId id, FrozenTerm answer) {
  GeneratorEntry& g = mutable_entry(id);
  if (g.status != GeneratorStatus::Evaluating) {
    throw InternalError("answer/2 on generator " + std::to_string(id) +
                        " which is no longer being evaluated");
  }
  if (!g.answer_index.insert(answer).second) return false;
  g.answers.push_back(std::move(answer));
  auto a = static_cast<std::uint32_t>(g.answers.size() - 1);
  for (std::uint32_t c = 0; c < g.continuations.size(); ++c) {
    g.pending.push_back({id, c, a, next_seq_++});
  }
  return true;
}

void TableSpace::add_continuation(GeneratorId id, StoredContinuation cont) {
  GeneratorEntry& g = mutable_entry(id);
  if (g.status != GeneratorStatus::Evaluating) {
    throw InternalError("continuation stored on generator " +
                        std::to_string(id) + " which is not being evaluated");
  }
  g.continuations.push_back(std::move(cont));
  ++stored_continuations_;
  auto c = static_cast<std::uint32_t>(g.continuations.size() - 1);
  for (std::uint32_t a = 0; a < g.answers.size(); ++a) {
    g.pending.push_back({id, c, a, next_seq_++});
  }
}

void TableSpace::add_dependency(GeneratorId on) {
  const GeneratorEntry& target = mutable_entry(on);
  if (target.status != GeneratorStatus::Evaluating || stack_.empty()) return;
  GeneratorEntry& top = entries_[stack_.back()];
  top.link = std::min(top.link, target.stack_pos);
}

bool TableSpace::is_leader(GeneratorId id) const {
  const GeneratorEntry& g = entries_.at(id);
  if (g.status != GeneratorStatus::Evaluating) return false;
  for (std::size_t i = g.stack_pos; i < stack_.size(); ++i) {
    if (entries_[stack_[i]].link < g.stack_pos) return false;
  }
  return true;
}

std::optional<WorkItem> TableSpace::next_work(GeneratorId leader) {
  const GeneratorEntry& l = entries_.at(leader);
  GeneratorEntry* best = nullptr;
  for (std::size_t i = l.stack_pos; i < stack_.size(); ++i) {
    GeneratorEntry& g = entries_[stack_[i]];
    if (g.pending.empty()) continue;
    if (best == nullptr || g.pending.front().seq < best->pending.front().seq) {
      best = &g;
    }
  }
  if (best == nullptr) return std::nullopt;
  WorkItem item = best->pending.front();
  best->pending.pop_front();
  return item;
}

bool TableSpace::has_pending_work(GeneratorId leader) const {
  const GeneratorEntry& l = entries_.at(leader);
  for (std::size_t i = l.stack_pos; i < stack_.size(); ++i) {
    if (!entries_[stack_[i]].pending.empty()) return true;
  }
  return false;
}

void TableSpace::complete(GeneratorId leader) {
  if (!is_leader(leader)) {
    throw InternalError("completion requested for generator " +
                        std::to_string(leader) + " which is not a leader");
  }
  if (has_pending_work(leader)) {
    throw InternalError("completion requested for generator " +
                        std::to_string(leader) + " with pending work");
  }
  std::size_t pos = entries_[leader].stack_pos;
  for (std::size_t i = pos; i < stack_.size(); ++i) {
    GeneratorEntry& g = entries_[stack_[i]];
    g.status = GeneratorStatus::Complete;
    g.continuations.clear();
    g.continuations.shrink_to_fit();
  }
  stack_.resize(pos);
}

void TableSpace::abandon_incomplete() {
  for (GeneratorId id = 0; id < entries_.size(); ++id) {
    GeneratorEntry& g = entries_[id];
    if (g.status != GeneratorStatus::Evaluating) continue;
    g.status = GeneratorStatus::Abandoned;
    g.continuations.clear();
    g.pending.clear();
    index_.erase(g.call);
  }
  stack_.clear();
}

}  // namespace ccall
