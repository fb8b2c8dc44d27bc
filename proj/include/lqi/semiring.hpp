#pragma once

// Three-valued dependence semiring {Bot, Prop, Dep} and dense square
// matrices over it. Bot marks the absence of dependence, Prop a value
// carried through untouched, Dep a direct data dependence. Addition is
// the join of the order Bot < Prop < Dep; multiplication composes
// dependencies along a path: Bot annihilates, Prop is neutral, Dep
// saturates.

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lqi {

enum class DepValue : std::uint8_t { Bot = 0, Prop = 1, Dep = 2 };

constexpr DepValue dep_add(DepValue a, DepValue b) { return a < b ? b : a; }

constexpr DepValue dep_mul(DepValue a, DepValue b) {
  if (a == DepValue::Bot || b == DepValue::Bot) return DepValue::Bot;
  return a < b ? b : a;
}

/// One-character spelling used in reports: '_' none, '0' propagation,
/// '1' dependence.
constexpr char dep_char(DepValue v) {
  switch (v) {
    case DepValue::Bot: return '_';
    case DepValue::Prop: return '0';
    case DepValue::Dep: return '1';
  }
  return '?';
}

/// Dense square matrix over the dependence semiring. Row index is the
/// input variable, column index the output variable.
class DepMatrix {
 public:
  DepMatrix() = default;
  explicit DepMatrix(std::size_t n, DepValue fill = DepValue::Bot)
      : n_(n), cells_(n * n, fill) {}

  std::size_t size() const { return n_; }

  DepValue at(std::size_t row, std::size_t col) const {
    assert(row < n_ && col < n_);
    return cells_[row * n_ + col];
  }

  void set(std::size_t row, std::size_t col, DepValue v) {
    assert(row < n_ && col < n_);
    cells_[row * n_ + col] = v;
  }

  void join(std::size_t row, std::size_t col, DepValue v) {
    set(row, col, dep_add(at(row, col), v));
  }

  bool operator==(const DepMatrix& o) const = default;

  /// Cellwise ordering: true when every cell of *this is <= the
  /// corresponding cell of o under Bot < Prop < Dep.
  bool subsumed_by(const DepMatrix& o) const {
    if (n_ != o.n_) return false;
    for (std::size_t i = 0; i < cells_.size(); ++i)
      if (cells_[i] > o.cells_[i]) return false;
    return true;
  }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        out += dep_char(at(i, j));
        out += (j + 1 == n_) ? '\n' : ' ';
      }
    }
    return out;
  }

 private:
  std::size_t n_ = 0;
  std::vector<DepValue> cells_;
};

inline DepMatrix mat_identity(std::size_t n) {
  DepMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, DepValue::Prop);
  return m;
}

inline void check_same_size(const DepMatrix& a, const DepMatrix& b,
                            const char* op) {
  if (a.size() != b.size())
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
}

inline DepMatrix mat_add(const DepMatrix& a, const DepMatrix& b) {
  check_same_size(a, b, "mat_add");
  DepMatrix c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      c.set(i, j, dep_add(a.at(i, j), b.at(i, j)));
  return c;
}

inline DepMatrix mat_mul(const DepMatrix& a, const DepMatrix& b) {
  check_same_size(a, b, "mat_mul");
  const std::size_t n = a.size();
  DepMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      DepValue acc = DepValue::Bot;
      for (std::size_t k = 0; k < n; ++k)
        acc = dep_add(acc, dep_mul(a.at(i, k), b.at(k, j)));
      c.set(i, j, acc);
    }
  return c;
}

struct StarResult {
  DepMatrix matrix;
  std::size_t fixpoint_index = 0;
};

/// Least fixpoint of the partial sums S_k = A + A^2 + ... + A^k.
/// Returns the stable matrix together with the least k such that
/// S_k equals S_{k+1}. The sums grow monotonically in a finite
/// lattice, so the loop always terminates; the cap only guards
/// against an implementation defect.
inline StarResult mat_star(const DepMatrix& a) {
  DepMatrix sum = a;
  DepMatrix power = a;
  const std::size_t cap = a.size() * a.size() + 1;
  for (std::size_t k = 1; k <= cap; ++k) {
    power = mat_mul(power, a);
    DepMatrix next = mat_add(sum, power);
    if (next == sum) return {sum, k};
    sum = std::move(next);
  }
  throw std::logic_error("mat_star: partial sums failed to stabilize");
}

}  // namespace lqi
