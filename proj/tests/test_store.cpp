#include <gtest/gtest.h>

#include <map>

#include "ccall/store.hpp"
#include "test_support.hpp"

using namespace ccall;
using namespace testing_support;

namespace {

struct Fixture {
  SymbolTable symbols;
  Store store{symbols};

  // Variables are local to each call, like separate clauses.
  Cell put(const std::string& text) { return store.from_term(parse_term(text)); }
  std::string show(Cell c) { return print_term(canonical_variant(store.to_term(c))); }
};

// Robinson unification with occurs check over syntax terms.
struct Unifier {
  std::map<int, Term> s;
  bool occurs_failure = false;

  Term walk(Term t) const {
    while (t.is_var()) {
      auto it = s.find(t.var_id());
      if (it == s.end()) break;
      t = it->second;
    }
    return t;
  }

  Term resolve(const Term& t) const {
    Term w = walk(t);
    if (!w.is_compound()) return w;
    std::vector<Term> args;
    for (const auto& a : w.args()) args.push_back(resolve(a));
    return Term::compound(w.name(), std::move(args));
  }

  bool occurs(int v, const Term& t) const {
    Term w = walk(t);
    if (w.is_var()) return w.var_id() == v;
    if (!w.is_compound()) return false;
    for (const auto& a : w.args()) {
      if (occurs(v, a)) return true;
    }
    return false;
  }

  bool unify(const Term& a, const Term& b) {
    Term x = walk(a), y = walk(b);
    if (x.is_var() && y.is_var() && x.var_id() == y.var_id()) return true;
    if (x.is_var() || y.is_var()) {
      if (!x.is_var()) std::swap(x, y);
      if (occurs(x.var_id(), y)) {
        occurs_failure = true;
        return false;
      }
      s[x.var_id()] = y;
      return true;
    }
    if (x.kind() != y.kind()) return false;
    if (x.is_atom()) return x.name() == y.name();
    if (x.is_int()) return x.int_value() == y.int_value();
    if (x.name() != y.name() || x.arity() != y.arity()) return false;
    for (std::size_t i = 0; i < x.arity(); ++i) {
      if (!unify(x.arg(i), y.arg(i))) return false;
    }
    return true;
  }
};

}  // namespace

TEST(Store, UnifyBindsBothWays) {
  Fixture f;
  Cell a = f.put("path(X, Z)");
  Cell b = f.put("path(1, Y)");
  ASSERT_TRUE(f.store.unify(a, b));
  EXPECT_EQ(f.show(a), "path(1, _0)");
  EXPECT_EQ(f.show(b), "path(1, _0)");
}

TEST(Store, ClashFailsAndLeavesNoBindings) {
  Fixture f;
  Cell a = f.put("f(X, a)");
  Cell b = f.put("f(1, b)");
  std::size_t trail = f.store.trail_size();
  EXPECT_FALSE(f.store.unify(a, b));
  EXPECT_EQ(f.store.trail_size(), trail);
  EXPECT_EQ(f.show(a), "f(_0, a)");
}

TEST(Store, UndoToRestoresMark) {
  Fixture f;
  Cell a = f.put("g(X, Y)");
  Store::Mark m = f.store.mark();
  ASSERT_TRUE(f.store.unify(a, f.put("g(1, 2)")));
  EXPECT_EQ(f.show(a), "g(1, 2)");
  f.store.undo_to(m);
  EXPECT_EQ(f.store.heap_size(), m.heap);
  EXPECT_EQ(f.store.trail_size(), m.trail);
  EXPECT_EQ(f.show(a), "g(_0, _1)");
}

TEST(Store, FreezeIsVariantKey) {
  Fixture f;
  FrozenTerm a = f.store.freeze(f.put("p(A, f(B), A)"));
  FrozenTerm b = f.store.freeze(f.put("p(C, f(D), C)"));
  FrozenTerm c = f.store.freeze(f.put("p(C, f(D), D)"));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_EQ(a.var_count, 2u);
  EXPECT_EQ(FrozenTermHash{}(a), FrozenTermHash{}(b));
}

TEST(Store, ThawGivesFreshVariables) {
  Fixture f;
  Cell orig = f.put("k(X, X, Y)");
  FrozenTerm frozen = f.store.freeze(orig);
  Cell copy = f.store.thaw(frozen);
  ASSERT_TRUE(f.store.unify(copy, f.put("k(1, W, 2)")));
  EXPECT_EQ(f.show(copy), "k(1, 1, 2)");
  EXPECT_EQ(f.show(orig), "k(_0, _0, _1)");
}

TEST(Store, NodeCount) {
  Fixture f;
  EXPECT_EQ(f.store.node_count(f.put("[A]")), 3u);
  EXPECT_EQ(f.store.node_count(f.put("p(B)")), 2u);
  EXPECT_EQ(f.store.node_count(f.put("7")), 1u);
}

TEST(Store, FrozenRoundTrip) {
  SymbolTable symbols;
  Term t = parse_term("f(X, [a, 1|Y], X)");
  EXPECT_EQ(canonical_variant(frozen_to_term(freeze_term(t, symbols), symbols)),
            canonical_variant(t));
}

class StoreProperty : public ::testing::TestWithParam<int> {};

TEST_P(StoreProperty, UnifyAgreesWithRobinson) {
  std::mt19937 rng(GetParam());
  TermGen gen{rng};
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    Term a = gen.term(3);
    Term b = gen.pick(3) == 0 ? a : gen.term(3);
    Unifier u;
    bool expect = u.unify(a, b);
    if (u.occurs_failure) continue;  // the store has no occurs check
    ++checked;

    // Load both sides as one term so that they share variables, as they do
    // for the reference unifier.
    Fixture f;
    Cell pair = f.store.from_term(Term::compound("pair", {a, b}));
    Cell ca = f.store.arg(pair, 0), cb = f.store.arg(pair, 1);
    std::string before_a = f.show(ca), before_b = f.show(cb);
    Store::Mark m = f.store.mark();
    bool got = f.store.unify(ca, cb);
    ASSERT_EQ(got, expect) << print_term(a) << " = " << print_term(b);
    if (got) {
      Term ra = canonical_variant(f.store.to_term(ca));
      EXPECT_EQ(ra, canonical_variant(f.store.to_term(cb)));
      // Heap variables get new ids, so compare up to renaming.
      EXPECT_TRUE(is_variant(ra, u.resolve(a)))
          << print_term(ra) << " vs " << print_term(u.resolve(a));
      f.store.undo_to(m);
    } else {
      EXPECT_EQ(f.store.trail_size(), m.trail);
    }
    EXPECT_EQ(f.show(ca), before_a);
    EXPECT_EQ(f.show(cb), before_b);
  }
  EXPECT_GT(checked, 1000);
}

INSTANTIATE_TEST_SUITE_P(Seeds, StoreProperty, ::testing::Range(1, 6));
