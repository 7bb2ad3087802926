#include "ccall/translate.hpp"

#include <algorithm>
#include <unordered_set>

#include "ccall/bridges.hpp"
#include "ccall/error.hpp"

namespace ccall {

const char* to_string(TranslationMode mode) {
  return mode == TranslationMode::General ? "general" : "legacy";
}

std::string slg_name(const std::string& name) { return "slg_" + name; }

std::string bridge_name(const std::string& name) { return name + "_bridge"; }

BodySplit split_following(std::span<const Term> body,
                          const std::set<PredId>& marked) {
  BodySplit split;
  auto it = std::find_if(body.begin(), body.end(), [&](const Term& g) {
    return g.is_callable() && marked.contains(pred_of(g));
  });
  split.prefix.assign(body.begin(), it);
  if (it != body.end()) {
    split.pivot = *it;
    split.suffix.assign(std::next(it), body.end());
  }
  return split;
}

std::vector<Term> get_lbinds(std::span<const Term> before, const Term& pivot,
                             std::span<const Term> after) {
  std::vector<Term> before_vars;
  for (const auto& t : before) collect_vars(t, before_vars);
  std::unordered_set<int> after_ids;
  for (const auto& t : after) {
    for (const auto& v : vars_of(t)) after_ids.insert(v.var_id());
  }
  std::unordered_set<int> pivot_ids;
  for (const auto& v : vars_of(pivot)) pivot_ids.insert(v.var_id());

  std::vector<Term> out;
  for (const auto& v : before_vars) {
    if (after_ids.contains(v.var_id()) && !pivot_ids.contains(v.var_id())) {
      out.push_back(v);
    }
  }
  return out;
}

BodyTranslator::BodyTranslator(TranslationMode mode, std::set<PredId> tabled,
                               std::set<PredId> bridges)
    : mode_(mode), tabled_(std::move(tabled)) {
  if (mode_ == TranslationMode::General) bridges_ = std::move(bridges);
  marked_ = tabled_;
  marked_.insert(bridges_.begin(), bridges_.end());
}

bool BodyTranslator::is_marked(const PredId& p) const {
  return marked_.contains(p);
}

std::string BodyTranslator::next_name(const std::string& base) {
  int k = counters_[base]++;
  return base + std::to_string(k);
}

std::vector<Clause> BodyTranslator::trans_body(
    const Term& head, std::span<const Term> body, const Term& id,
    const std::optional<Term>& prev_cont, const Term& end) {
  if (!head.is_compound()) {
    throw TranslationError("rewritten head must be a compound term");
  }
  if ((mode_ == TranslationMode::General) != prev_cont.has_value()) {
    throw TranslationError(
        "previous continuation is required in general mode and absent in "
        "legacy mode");
  }
  const std::string base = head.name();

  std::vector<Clause> clauses;
  Term current_head = head;
  std::vector<Term> rest(body.begin(), body.end());
  // Everything of the original clause that precedes the next pivot.
  std::vector<Term> before{head.arg(0)};

  for (;;) {
    BodySplit split = split_following(rest, marked_);
    if (!split.pivot) {
      Clause c{current_head, std::move(split.prefix)};
      c.body.push_back(end);
      clauses.push_back(std::move(c));
      return clauses;
    }
    const Term& pivot = *split.pivot;
    before.insert(before.end(), split.prefix.begin(), split.prefix.end());
    std::vector<Term> after = split.suffix;
    after.push_back(end);
    std::vector<Term> lbinds = get_lbinds(before, pivot, after);

    std::vector<Term> cont_args{id, make_list(lbinds), pivot};
    if (prev_cont) cont_args.push_back(*prev_cont);
    Term cont = Term::compound(next_name(base), std::move(cont_args));

    Term call = tabled_.contains(pred_of(pivot))
                    ? Term::compound("slgcall", {cont})
                    : Term::compound(bridge_name(pivot.name()),
                                     {pivot, id, cont});
    Clause c{current_head, std::move(split.prefix)};
    c.body.push_back(std::move(call));
    clauses.push_back(std::move(c));

    before.push_back(pivot);
    current_head = cont;
    rest = std::move(split.suffix);
  }
}

namespace {

void check_higher_order(const Term& goal, const std::set<PredId>& tabled,
                        const Clause& clause) {
  if (!goal.is_callable()) return;
  PredId p = pred_of(goal);
  if (p == PredId{",", 2}) {
    for (const auto& a : goal.args()) check_higher_order(a, tabled, clause);
    return;
  }
  if (p == PredId{"call", 1}) {
    const Term& inner = goal.arg(0);
    if (inner.is_callable()) {
      if (tabled.contains(pred_of(inner))) {
        throw TranslationError(
            "higher-order call to tabled predicate not supported: " +
            print_term(goal) + " in clause for " + clause.pred().str());
      }
      check_higher_order(inner, tabled, clause);
    }
  }
}

Term interface_call(const PredId& p) {
  if (p.arity == 0) return Term::atom(p.name);
  std::vector<Term> args;
  for (std::size_t i = 0; i < p.arity; ++i) {
    args.push_back(Term::var(static_cast<int>(i), "X" + std::to_string(i + 1)));
  }
  return Term::compound(p.name, std::move(args));
}

void add_user_preds(const Term& goal, std::set<PredId>& out) {
  if (!goal.is_callable()) return;
  PredId p = pred_of(goal);
  if (p == PredId{",", 2} || p == PredId{"call", 1}) {
    for (const auto& a : goal.args()) add_user_preds(a, out);
    return;
  }
  if (!is_builtin(p)) out.insert(p);
}

}  // namespace

Program translate(const Program& p, TranslationMode mode,
                  std::vector<Diagnostic>* warnings) {
  for (const auto& c : p.clauses) {
    for (const auto& g : c.body) check_higher_order(g, p.tabled, c);
  }

  BodyTranslator bt(mode, p.tabled, p.bridges);
  const bool general = mode == TranslationMode::General;
  std::vector<std::pair<PredId, std::string>> generated;

  auto translate_group = [&](const PredId& pred, std::vector<Clause>& out) {
    std::vector<Clause> heads;
    std::vector<Clause> continuations;
    const bool tabled = p.tabled.contains(pred);
    if (tabled) {
      Term call = interface_call(pred);
      out.push_back({call, {Term::compound("slg", {call})}});
    }
    for (const auto& c : p.clauses) {
      if (c.pred() != pred) continue;
      if (!tabled) out.push_back(c);
      int next_id = max_var_id(c) + 1;
      Term id = Term::var(next_id, "Id");
      std::vector<Clause> segs;
      if (tabled) {
        Term head_tr = Term::compound(slg_name(pred.name), {c.head, id});
        Term end = Term::compound("answer", {id, c.head});
        std::optional<Term> prev;
        if (general) prev = Term();
        segs = bt.trans_body(head_tr, c.body, id, prev, end);
      } else {
        Term cont = Term::var(next_id + 1, "Cont");
        Term head_tr =
            Term::compound(bridge_name(pred.name), {c.head, id, cont});
        Term end = Term::compound("call", {cont});
        segs = bt.trans_body(head_tr, c.body, id, cont, end);
      }
      generated.emplace_back(segs.front().pred(), "entry of " + pred.str());
      for (std::size_t i = 1; i < segs.size(); ++i) {
        generated.emplace_back(segs[i].pred(),
                               "continuation " + segs[i].head.name());
      }
      heads.push_back(std::move(segs.front()));
      continuations.insert(continuations.end(),
                           std::make_move_iterator(segs.begin() + 1),
                           std::make_move_iterator(segs.end()));
    }
    out.insert(out.end(), heads.begin(), heads.end());
    out.insert(out.end(), continuations.begin(), continuations.end());
  };

  Program out;
  std::set<PredId> emitted;
  std::set<PredId> defined;
  for (const auto& c : p.clauses) {
    PredId pred = c.pred();
    defined.insert(pred);
    if (!bt.is_marked(pred)) {
      out.clauses.push_back(c);
      continue;
    }
    if (emitted.insert(pred).second) translate_group(pred, out.clauses);
  }
  for (const auto& pred : p.tabled) {
    if (defined.contains(pred)) continue;
    if (warnings != nullptr) {
      warnings->push_back(
          {0, 0, "tabled predicate " + pred.str() + " has no clauses"});
    }
    translate_group(pred, out.clauses);
  }

  // Generated predicates must not clash with each other or with the program.
  std::set<PredId> user;
  for (const auto& c : p.clauses) {
    user.insert(c.pred());
    for (const auto& g : c.body) add_user_preds(g, user);
  }
  std::map<PredId, std::string> owner;
  for (const auto& [pred, who] : generated) {
    if (user.contains(pred)) {
      throw TranslationError("generated predicate " + pred.str() +
                             " collides with a program predicate");
    }
    auto [it, inserted] = owner.emplace(pred, who);
    if (!inserted && it->second != who) {
      throw TranslationError("generated predicate " + pred.str() +
                             " is produced by both " + it->second + " and " +
                             who);
    }
  }
  return out;
}

}  // namespace ccall
