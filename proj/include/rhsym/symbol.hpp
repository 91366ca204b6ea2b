#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace rhsym {

struct Poly;

enum class SymbolKind : std::uint8_t { Independent, Dependent, Jet, Parameter, Unknown };

/// Atoms are the indeterminates of the normal form: plain symbols plus
/// transcendental kernels exp(P) and ln(P) over Laurent polynomials P.
enum class AtomKind : std::uint8_t { Symbol, Exp, Ln };

using AtomId = std::uint32_t;

struct AtomInfo {
  AtomKind kind = AtomKind::Symbol;
  std::string name;  // symbol name, or printed kernel
  SymbolKind symbol_kind = SymbolKind::Parameter;
  // Jets: the dependent variable and the sorted derivative directions.
  AtomId jet_base = 0;
  std::vector<AtomId> jet_dirs;
  // Kernels: the argument and the sorted symbol atoms it depends on.
  std::shared_ptr<const Poly> arg;
  std::vector<AtomId> depends;
  // Printing order: (group, name).
  int group = 0;
  long index = 0;  // numeric suffix for unknown constants
};

class Symbol;

/// Process-wide interning table. Entries are never removed or mutated after
/// creation, so AtomInfo references stay valid for the life of the program.
class AtomTable {
 public:
  static AtomTable& instance() {
    static AtomTable table;
    return table;
  }

  // Lock-free: slots are preallocated and never reallocated, and an id is
  // only observable after its slot was written under the mutex.
  const AtomInfo& info(AtomId id) const { return *atoms_[id]; }

  std::optional<AtomId> find_symbol(std::string_view name) const {
    std::lock_guard lock(mutex_);
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  AtomId intern_symbol(std::string_view name, SymbolKind kind) {
    std::lock_guard lock(mutex_);
    return intern_symbol_locked(std::string(name), kind);
  }

  AtomId intern_jet(AtomId base, std::vector<AtomId> dirs) {
    std::lock_guard lock(mutex_);
    const AtomInfo& b = *atoms_.at(base);
    if (b.kind != AtomKind::Symbol ||
        (b.symbol_kind != SymbolKind::Dependent && b.symbol_kind != SymbolKind::Jet)) {
      throw std::invalid_argument("jet of non-dependent symbol " + b.name);
    }
    AtomId root = base;
    if (b.symbol_kind == SymbolKind::Jet) {
      root = b.jet_base;
      dirs.insert(dirs.end(), b.jet_dirs.begin(), b.jet_dirs.end());
    }
    std::sort(dirs.begin(), dirs.end(), [this](AtomId l, AtomId r) {
      return atoms_.at(l)->name < atoms_.at(r)->name;
    });
    std::string name = atoms_.at(root)->name + "_";
    for (AtomId d : dirs) name += atoms_.at(d)->name;
    auto it = by_name_.find(name);
    if (it != by_name_.end()) return it->second;
    AtomId id = intern_symbol_locked(name, SymbolKind::Jet);
    atoms_[id]->jet_base = root;
    atoms_[id]->jet_dirs = std::move(dirs);
    return id;
  }

  /// Kernels are keyed by their canonical printed form.
  AtomId intern_kernel(AtomKind kind, std::shared_ptr<const Poly> arg, const std::string& key,
                       std::vector<AtomId> depends, int group) {
    std::lock_guard lock(mutex_);
    const std::string full = (kind == AtomKind::Exp ? "exp(" : "ln(") + key + ")";
    auto it = kernels_.find(full);
    if (it != kernels_.end()) return it->second;
    auto a = std::make_unique<AtomInfo>();
    a->kind = kind;
    a->name = full;
    a->arg = std::move(arg);
    a->depends = std::move(depends);
    a->group = group;
    const auto id = static_cast<AtomId>(atoms_.size());
    if (atoms_.size() == kCapacity) throw std::length_error("atom table full");
    atoms_.push_back(std::move(a));
    kernels_.emplace(full, id);
    return id;
  }

  /// Printing order comparison.
  bool print_less(AtomId l, AtomId r) const {
    if (l == r) return false;
    const AtomInfo& a = *atoms_[l];
    const AtomInfo& b = *atoms_[r];
    return std::tie(a.group, a.index, a.name) < std::tie(b.group, b.index, b.name);
  }

 private:
  static constexpr std::size_t kCapacity = 1u << 20;

  AtomTable() {
    atoms_.reserve(kCapacity);
    // Fixed order: independent, dependent, parameters.
    for (const char* n : {"t", "x", "y"}) intern_symbol_locked(n, SymbolKind::Independent);
    for (const char* n : {"psi", "n", "rho", "q", "alpha", "beta", "w", "theta", "sigma"}) {
      intern_symbol_locked(n, SymbolKind::Dependent);
    }
    for (const char* n : {"k", "kappa", "lambda", "N0", "E0", "a", "C1", "C2", "eps"}) {
      intern_symbol_locked(n, SymbolKind::Parameter);
    }
  }

  static int group_of(const std::string& name, SymbolKind kind) {
    static const std::map<std::string, int> fixed = {
        {"t", 0},    {"x", 1},    {"y", 2},     {"psi", 3},   {"n", 5},
        {"rho", 6},  {"q", 7},    {"alpha", 8}, {"beta", 8},  {"w", 8},
        {"theta", 8}, {"sigma", 8}};
    if (auto it = fixed.find(name); it != fixed.end()) return it->second;
    switch (kind) {
      case SymbolKind::Independent: return 2;
      case SymbolKind::Dependent: return 8;
      case SymbolKind::Parameter: return 20;
      case SymbolKind::Jet: return 30;
      case SymbolKind::Unknown: return 40;
    }
    return 45;
  }

  AtomId intern_symbol_locked(const std::string& name, SymbolKind kind) {
    auto it = by_name_.find(name);
    if (it != by_name_.end()) {
      if (atoms_[it->second]->symbol_kind != kind) {
        throw std::invalid_argument("symbol '" + name + "' already exists with another kind");
      }
      return it->second;
    }
    auto a = std::make_unique<AtomInfo>();
    a->kind = AtomKind::Symbol;
    a->name = name;
    a->symbol_kind = kind;
    a->group = group_of(name, kind);
    if (kind == SymbolKind::Unknown) a->index = std::stol(name.substr(1));
    const auto id = static_cast<AtomId>(atoms_.size());
    if (atoms_.size() == kCapacity) throw std::length_error("atom table full");
    atoms_.push_back(std::move(a));
    by_name_.emplace(name, id);
    return id;
  }

  mutable std::mutex mutex_;
  std::vector<std::unique_ptr<AtomInfo>> atoms_;
  std::map<std::string, AtomId> by_name_;
  std::map<std::string, AtomId> kernels_;
};

/// Lightweight handle to an interned symbol atom.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(AtomId id) : id_(id) {}

  AtomId id() const { return id_; }
  const std::string& name() const { return AtomTable::instance().info(id_).name; }
  SymbolKind kind() const { return AtomTable::instance().info(id_).symbol_kind; }

  friend bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }
  friend auto operator<=>(Symbol a, Symbol b) { return a.id_ <=> b.id_; }

 private:
  AtomId id_ = 0;
};

namespace sym {

inline Symbol make(std::string_view name, SymbolKind kind) {
  return Symbol(AtomTable::instance().intern_symbol(name, kind));
}
inline Symbol independent(std::string_view name) { return make(name, SymbolKind::Independent); }
inline Symbol dependent(std::string_view name) { return make(name, SymbolKind::Dependent); }
inline Symbol parameter(std::string_view name) { return make(name, SymbolKind::Parameter); }
inline Symbol unknown(long index) {
  return make("c" + std::to_string(index), SymbolKind::Unknown);
}

/// Derivative symbol of `base` (dependent or jet) along `dir`.
inline Symbol jet(Symbol base, Symbol dir) {
  return Symbol(AtomTable::instance().intern_jet(base.id(), {dir.id()}));
}

inline std::optional<Symbol> find(std::string_view name) {
  auto id = AtomTable::instance().find_symbol(name);
  if (!id) return std::nullopt;
  return Symbol(*id);
}

/// Looks a name up, creating a parameter if absent. Names of the form
/// base_dirs with a known dependent base become jets.
inline Symbol lookup_or_parameter(std::string_view name) {
  if (auto s = find(name)) return *s;
  if (auto pos = name.find('_'); pos != std::string_view::npos && pos + 1 < name.size()) {
    auto base = find(name.substr(0, pos));
    if (base && base->kind() == SymbolKind::Dependent) {
      std::vector<AtomId> dirs;
      bool ok = true;
      for (char c : name.substr(pos + 1)) {
        auto d = find(std::string(1, c));
        if (!d || d->kind() != SymbolKind::Independent) {
          ok = false;
          break;
        }
        dirs.push_back(d->id());
      }
      if (ok) {
        return Symbol(AtomTable::instance().intern_jet(base->id(), std::move(dirs)));
      }
    }
  }
  return parameter(name);
}

// Standard variables of the 1+1 fluid system.
inline Symbol t() { return independent("t"); }
inline Symbol x() { return independent("x"); }
inline Symbol y() { return independent("y"); }
inline Symbol psi() { return dependent("psi"); }
inline Symbol n() { return dependent("n"); }
inline Symbol rho() { return dependent("rho"); }
inline Symbol q() { return dependent("q"); }

}  // namespace sym

}  // namespace rhsym
