#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ccall/store.hpp"

namespace ccall {

using GeneratorId = std::uint32_t;

/// Instrumentation in interpreter-native units (term nodes and work items);
/// these are not comparable with abstract-machine cell or instruction counts.
struct Counters {
  // Continuations captured into table storage.
  std::uint64_t suspensions = 0;
  // (continuation, answer) pairs executed.
  std::uint64_t resumptions = 0;
  // Nodes of captured binding lists.
  std::uint64_t e_cells = 0;
  // Nodes of captured pending calls and previous-continuation chains.
  std::uint64_t h_cells = 0;
  // Trail entries between the consumer and its generator at capture time.
  std::uint64_t trail_at_suspend = 0;
  std::uint64_t generators = 0;
  std::uint64_t answers = 0;
  // Goals dispatched by the engine.
  std::uint64_t steps = 0;
  // Clause resolutions against generator-entry (slg_) predicates.
  std::uint64_t slg_clause_resolutions = 0;
  // slg/1 calls answered from a table that was still being evaluated
  // (only possible with relaxed completion, i.e. legacy translations).
  std::uint64_t incomplete_reads = 0;

  Counters operator-(const Counters& o) const;
};

/// `suspensions=<n> resumptions=<n> e_cells=<n> h_cells=<n>
/// trail_at_suspend=<n> generators=<n> answers=<n>`
std::ostream& operator<<(std::ostream& os, const Counters& c);

enum class GeneratorStatus : std::uint8_t { Evaluating, Complete, Abandoned };

/// A suspended consumer: the whole continuation term
/// `Name(Id, LBinds, PendingCall[, PrevCont])`, frozen into table storage.
struct StoredContinuation {
  FrozenTerm term;
  std::size_t binding_cells = 0;  // E contribution
  std::size_t call_cells = 0;     // H contribution
};

struct WorkItem {
  GeneratorId generator;
  std::uint32_t continuation;
  std::uint32_t answer;
  std::uint64_t seq;
};

struct GeneratorEntry {
  FrozenTerm call;
  std::vector<FrozenTerm> answers;  // insertion order, pairwise non-variant
  std::unordered_set<FrozenTerm, FrozenTermHash> answer_index;
  std::vector<StoredContinuation> continuations;
  GeneratorStatus status = GeneratorStatus::Evaluating;
  std::size_t stack_pos = 0;
  // Smallest completion-stack position this generator depends on.
  std::size_t link = 0;
  std::size_t trail_mark = 0;
  std::deque<WorkItem> pending;
};

/// Call table, answer tables, continuation store and completion stack.
///
/// Generators are identified by dense ids allocated in first-call order.
/// Completion uses a single stack: a generator's dependency group is itself
/// plus every generator above it; it is a leader when no member of that
/// group depends on a generator below it.
class TableSpace {
 public:
  std::optional<GeneratorId> find(const FrozenTerm& call) const;
  GeneratorId create(FrozenTerm call, std::size_t trail_mark);

  const GeneratorEntry& entry(GeneratorId id) const { return entries_[id]; }
  std::size_t size() const { return entries_.size(); }
  bool contains(GeneratorId id) const { return id < entries_.size(); }

  /// Inserts `answer` unless a variant is already stored. A new answer is
  /// queued for every stored continuation. Throws InternalError when the
  /// generator is not being evaluated.
  bool add_answer(GeneratorId id, FrozenTerm answer);

  /// Stores a continuation on `id` and queues it against every answer known
  /// so far.
  void add_continuation(GeneratorId id, StoredContinuation cont);

  /// Records that the newest generator on the completion stack depends on
  /// `on` (which must be evaluating).
  void add_dependency(GeneratorId on);

  bool is_leader(GeneratorId id) const;

  /// Oldest pending (continuation, answer) pair among the leader's group,
  /// removed from the queue. Empty when the group is at fixpoint.
  std::optional<WorkItem> next_work(GeneratorId leader);
  bool has_pending_work(GeneratorId leader) const;

  /// Marks every generator of the leader's group complete, erases their
  /// continuations and pops them. Throws InternalError when `leader` is not a
  /// leader or work is still pending.
  void complete(GeneratorId leader);

  /// Drops every generator that is not complete (after an aborted query).
  void abandon_incomplete();

  std::size_t completion_depth() const { return stack_.size(); }
  std::uint64_t stored_continuations() const { return stored_continuations_; }

 private:
  GeneratorEntry& mutable_entry(GeneratorId id);

  std::vector<GeneratorEntry> entries_;
  std::unordered_map<FrozenTerm, GeneratorId, FrozenTermHash> index_;
  std::vector<GeneratorId> stack_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t stored_continuations_ = 0;
};

}  // namespace ccall
