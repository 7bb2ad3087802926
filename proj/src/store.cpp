#include "ccall/store.hpp"

#include <utility>

#include "ccall/syntax.hpp"

namespace ccall {

SymbolId SymbolTable::intern(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  auto id = static_cast<SymbolId>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

FunctorId SymbolTable::functor(SymbolId name, std::uint32_t arity) {
  std::uint64_t key = (static_cast<std::uint64_t>(name) << 32) | arity;
  auto it = functor_ids_.find(key);
  if (it != functor_ids_.end()) return it->second;
  auto id = static_cast<FunctorId>(functors_.size());
  functors_.push_back({name, arity});
  functor_ids_.emplace(key, id);
  return id;
}

std::size_t FrozenTermHash::operator()(const FrozenTerm& t) const noexcept {
  std::size_t h = t.cells.size();
  for (const auto& c : t.cells) {
    std::size_t v = static_cast<std::size_t>(c.value) * 31 +
                    static_cast<std::size_t>(c.tag);
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Cell Store::new_var() {
  auto a = static_cast<Address>(heap_.size());
  heap_.push_back(Cell::ref(a));
  return Cell::ref(a);
}

Cell Store::new_struct(FunctorId f, std::initializer_list<Cell> args) {
  auto a = static_cast<Address>(heap_.size());
  heap_.push_back(Cell::fun(f));
  heap_.insert(heap_.end(), args.begin(), args.end());
  return Cell::str(a);
}

Cell Store::new_struct(FunctorId f, const std::vector<Cell>& args) {
  auto a = static_cast<Address>(heap_.size());
  heap_.push_back(Cell::fun(f));
  heap_.insert(heap_.end(), args.begin(), args.end());
  return Cell::str(a);
}

Cell Store::deref(Cell c) const {
  while (c.tag == Tag::Ref) {
    const Cell& h = heap_[c.addr()];
    if (h.tag == Tag::Ref && h.value == c.value) return c;
    c = h;
  }
  return c;
}

void Store::bind(Address var, Cell value) {
  heap_[var] = value;
  trail_.push_back(var);
}

bool Store::unify(Cell a, Cell b) {
  const std::size_t trail_start = trail_.size();
  std::vector<std::pair<Cell, Cell>> todo{{a, b}};
  while (!todo.empty()) {
    auto [x, y] = todo.back();
    todo.pop_back();
    x = deref(x);
    y = deref(y);
    if (x.tag == Tag::Ref && y.tag == Tag::Ref) {
      if (x.value == y.value) continue;
      // Younger variables point at older ones.
      if (x.value > y.value) {
        bind(x.addr(), y);
      } else {
        bind(y.addr(), x);
      }
      continue;
    }
    if (x.tag == Tag::Ref) {
      bind(x.addr(), y);
      continue;
    }
    if (y.tag == Tag::Ref) {
      bind(y.addr(), x);
      continue;
    }
    if (x.tag != y.tag) {
      undo_trail_to(trail_start);
      return false;
    }
    if (x.tag == Tag::Str) {
      if (x.value == y.value) continue;
      Cell fx = heap_[x.addr()];
      if (fx != heap_[y.addr()]) {
        undo_trail_to(trail_start);
        return false;
      }
      std::uint32_t n = symbols_.functor_arity(fx.value);
      for (std::uint32_t i = 0; i < n; ++i) {
        todo.emplace_back(heap_[x.addr() + 1 + i], heap_[y.addr() + 1 + i]);
      }
      continue;
    }
    if (x.value != y.value) {
      undo_trail_to(trail_start);
      return false;
    }
  }
  return true;
}

void Store::undo_trail_to(std::size_t trail_mark) {
  while (trail_.size() > trail_mark) {
    Address a = trail_.back();
    trail_.pop_back();
    if (a < heap_.size()) heap_[a] = Cell::ref(a);
  }
}

void Store::undo_to(Mark m) {
  undo_trail_to(m.trail);
  heap_.resize(m.heap);
}

Cell Store::from_term(const Term& t, std::unordered_map<int, Cell>& vars) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = vars.find(t.var_id());
      if (it != vars.end()) return it->second;
      Cell v = new_var();
      vars.emplace(t.var_id(), v);
      return v;
    }
    case Term::Kind::Atom:
      return Cell::atom(symbols_.intern(t.name()));
    case Term::Kind::Int:
      return Cell::integer(t.int_value());
    case Term::Kind::Compound: {
      std::vector<Cell> args;
      args.reserve(t.arity());
      for (const auto& a : t.args()) args.push_back(from_term(a, vars));
      return new_struct(
          symbols_.functor(t.name(), static_cast<std::uint32_t>(t.arity())),
          args);
    }
  }
  return Cell{};
}

Term Store::to_term(Cell c) const {
  c = deref(c);
  switch (c.tag) {
    case Tag::Ref:
      return Term::var(static_cast<int>(c.value),
                       "_G" + std::to_string(c.value));
    case Tag::Atom:
      return Term::atom(symbols_.name(static_cast<SymbolId>(c.value)));
    case Tag::Int:
      return Term::integer(c.value);
    case Tag::Str: {
      FunctorId f = heap_[c.addr()].value;
      std::uint32_t n = symbols_.functor_arity(f);
      std::vector<Term> args;
      args.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        args.push_back(to_term(heap_[c.addr() + 1 + i]));
      }
      return Term::compound(symbols_.name(symbols_.functor_name(f)),
                            std::move(args));
    }
    default:
      return Term();
  }
}

FrozenTerm Store::freeze(Cell root) const {
  FrozenTerm out;
  out.cells.resize(1);
  std::unordered_map<std::int64_t, std::uint32_t> var_numbers;
  std::vector<std::pair<Cell, std::size_t>> todo{{root, 0}};
  while (!todo.empty()) {
    auto [src, dst] = todo.back();
    todo.pop_back();
    Cell c = deref(src);
    switch (c.tag) {
      case Tag::Ref: {
        auto [it, inserted] = var_numbers.try_emplace(c.value, out.var_count);
        if (inserted) ++out.var_count;
        out.cells[dst] = Cell::var(it->second);
        break;
      }
      case Tag::Str: {
        FunctorId f = heap_[c.addr()].value;
        std::uint32_t n = symbols_.functor_arity(f);
        std::size_t block = out.cells.size();
        out.cells.resize(block + 1 + n);
        out.cells[block] = Cell::fun(f);
        out.cells[dst] = Cell::str(static_cast<Address>(block));
        for (std::uint32_t i = n; i-- > 0;) {
          todo.emplace_back(heap_[c.addr() + 1 + i], block + 1 + i);
        }
        break;
      }
      default:
        out.cells[dst] = c;
        break;
    }
  }
  return out;
}

Cell Store::thaw(const FrozenTerm& t) {
  const auto base = static_cast<Address>(heap_.size());
  heap_.resize(base + t.cells.size());
  std::vector<std::int64_t> vars(t.var_count, -1);
  for (std::size_t i = 0; i < t.cells.size(); ++i) {
    const Cell& c = t.cells[i];
    Address here = base + static_cast<Address>(i);
    switch (c.tag) {
      case Tag::Str:
        heap_[here] = Cell::str(base + c.addr());
        break;
      case Tag::Var: {
        auto& slot = vars[c.value];
        if (slot < 0) {
          slot = here;
          heap_[here] = Cell::ref(here);
        } else {
          heap_[here] = Cell::ref(static_cast<Address>(slot));
        }
        break;
      }
      default:
        heap_[here] = c;
        break;
    }
  }
  return heap_[base];
}

std::size_t Store::node_count(Cell root) const {
  std::size_t count = 0;
  std::vector<Cell> todo{root};
  while (!todo.empty()) {
    Cell c = deref(todo.back());
    todo.pop_back();
    ++count;
    if (c.tag == Tag::Str) {
      std::uint32_t n = symbols_.functor_arity(heap_[c.addr()].value);
      for (std::uint32_t i = 0; i < n; ++i) {
        todo.push_back(heap_[c.addr() + 1 + i]);
      }
    }
  }
  return count;
}

bool Store::is_callable(Cell c) const {
  c = deref(c);
  return c.tag == Tag::Atom || c.tag == Tag::Str;
}

std::string Store::describe(Cell c) const {
  return print_term(to_term(c), {.compact = true});
}

FrozenTerm freeze_term(const Term& root, SymbolTable& symbols) {
  FrozenTerm out;
  out.cells.resize(1);
  std::unordered_map<int, std::uint32_t> var_numbers;
  std::vector<std::pair<Term, std::size_t>> todo{{root, 0}};
  while (!todo.empty()) {
    auto [t, dst] = std::move(todo.back());
    todo.pop_back();
    switch (t.kind()) {
      case Term::Kind::Var: {
        auto [it, inserted] =
            var_numbers.try_emplace(t.var_id(), out.var_count);
        if (inserted) ++out.var_count;
        out.cells[dst] = Cell::var(it->second);
        break;
      }
      case Term::Kind::Atom:
        out.cells[dst] = Cell::atom(symbols.intern(t.name()));
        break;
      case Term::Kind::Int:
        out.cells[dst] = Cell::integer(t.int_value());
        break;
      case Term::Kind::Compound: {
        auto n = static_cast<std::uint32_t>(t.arity());
        std::size_t block = out.cells.size();
        out.cells.resize(block + 1 + n);
        out.cells[block] = Cell::fun(symbols.functor(t.name(), n));
        out.cells[dst] = Cell::str(static_cast<Address>(block));
        for (std::uint32_t i = n; i-- > 0;) {
          todo.emplace_back(t.arg(i), block + 1 + i);
        }
        break;
      }
    }
  }
  return out;
}

namespace {

Term frozen_at(const FrozenTerm& t, std::size_t i, const SymbolTable& symbols) {
  const Cell& c = t.cells[i];
  switch (c.tag) {
    case Tag::Var:
      return Term::var(static_cast<int>(c.value), "_" + std::to_string(c.value));
    case Tag::Atom:
      return Term::atom(symbols.name(static_cast<SymbolId>(c.value)));
    case Tag::Int:
      return Term::integer(c.value);
    case Tag::Str: {
      FunctorId f = t.cells[c.addr()].value;
      std::uint32_t n = symbols.functor_arity(f);
      std::vector<Term> args;
      args.reserve(n);
      for (std::uint32_t k = 0; k < n; ++k) {
        args.push_back(frozen_at(t, c.addr() + 1 + k, symbols));
      }
      return Term::compound(symbols.name(symbols.functor_name(f)),
                            std::move(args));
    }
    default:
      return Term();
  }
}

}  // namespace

Term frozen_to_term(const FrozenTerm& t, const SymbolTable& symbols) {
  return frozen_at(t, 0, symbols);
}

}  // namespace ccall
