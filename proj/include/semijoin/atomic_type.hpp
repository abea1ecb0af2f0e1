#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "semijoin/condition.hpp"
#include "semijoin/database.hpp"
#include "semijoin/error.hpp"

namespace semijoin {

// Largest n+m accepted by enumerate_atomic_types.
inline constexpr std::size_t kAtomicTypeCap = 8;

// The complete Ω-type of a tuple pair (left, right) over positions
// x1..xn, y1..ym.  Stored canonically as one label per position:
//   Ω = {=}:    labels number the equality classes in order of first
//               occurrence (a restricted growth string);
//   Ω = {=,<}:  labels are dense ranks (0 = smallest value).
// Two tuple pairs have the same type iff their canonical forms coincide.
class AtomicType {
 public:
  AtomicType() = default;
  AtomicType(std::size_t n, std::size_t m, Omega omega, std::vector<std::uint8_t> labels)
      : n_(n), m_(m), omega_(omega), labels_(std::move(labels)) {}

  std::size_t left_arity() const { return n_; }
  std::size_t right_arity() const { return m_; }
  Omega omega() const { return omega_; }
  const std::vector<std::uint8_t>& labels() const { return labels_; }

  // Jointly satisfiable: labels form a restricted growth string (Ω={=}) or
  // a surjection onto 0..k-1 (Ω={=,<}).
  bool consistent() const {
    if (labels_.size() != n_ + m_) return false;
    if (!omega_.order) {
      std::uint8_t next = 0;
      for (auto l : labels_) {
        if (l > next) return false;
        if (l == next) ++next;
      }
      return true;
    }
    std::vector<bool> used(labels_.size(), false);
    for (auto l : labels_) {
      if (l >= labels_.size()) return false;
      used[l] = true;
    }
    auto k = std::count(used.begin(), used.end(), true);
    return std::all_of(used.begin(), used.begin() + k, [](bool b) { return b; });
  }

  // Truth of the atom p op q.
  bool holds(Position p, CompareOp op, Position q) const {
    std::uint8_t a = labels_.at(flat(p)), b = labels_.at(flat(q));
    switch (op) {
      case CompareOp::kEq: return a == b;
      case CompareOp::kNe: return a != b;
      case CompareOp::kLt:
        if (!omega_.order) throw CheckError("order atom evaluated on an Ω={=} type");
        return a < b;
      case CompareOp::kLe:
        if (!omega_.order) throw CheckError("order atom evaluated on an Ω={=} type");
        return a <= b;
    }
    return false;
  }

  // Type of the left tuple alone.
  AtomicType restrict_left() const {
    std::vector<std::uint8_t> sub(labels_.begin(), labels_.begin() + static_cast<std::ptrdiff_t>(n_));
    return AtomicType(n_, 0, omega_, canonical(sub, omega_));
  }

  // The conjunction of all atoms and negated atoms true of the type.  Uses x
  // for left and y for right positions; a type on fewer than two positions is
  // `true`.
  Condition to_condition() const {
    std::vector<Condition> parts;
    for (std::size_t i = 0; i < labels_.size(); ++i)
      for (std::size_t j = i + 1; j < labels_.size(); ++j) {
        Position p = position(i), q = position(j);
        if (labels_[i] == labels_[j])
          parts.push_back(Condition::atom(p, CompareOp::kEq, q));
        else if (!omega_.order)
          parts.push_back(Condition::atom(p, CompareOp::kNe, q));
        else if (labels_[i] < labels_[j])
          parts.push_back(Condition::atom(p, CompareOp::kLt, q));
        else
          parts.push_back(Condition::atom(q, CompareOp::kLt, p));
      }
    return Condition::conj(std::move(parts));
  }

  std::string key() const {
    std::string k;
    k.push_back(static_cast<char>(n_));
    k.push_back(static_cast<char>(m_));
    k.push_back(omega_.order ? 'o' : 'e');
    for (auto l : labels_) k.push_back(static_cast<char>(l));
    return k;
  }

  friend bool operator==(const AtomicType&, const AtomicType&) = default;
  friend bool operator<(const AtomicType& a, const AtomicType& b) { return a.key() < b.key(); }

  // Canonical labels of an arbitrary value sequence.
  template <typename T>
  static std::vector<std::uint8_t> canonical(const std::vector<T>& values, Omega omega) {
    std::vector<std::uint8_t> out(values.size());
    if (omega.order) {
      std::vector<T> sorted(values);
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = static_cast<std::uint8_t>(
            std::lower_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin());
      return out;
    }
    std::vector<T> seen;
    for (std::size_t i = 0; i < values.size(); ++i) {
      auto it = std::find(seen.begin(), seen.end(), values[i]);
      if (it == seen.end()) {
        out[i] = static_cast<std::uint8_t>(seen.size());
        seen.push_back(values[i]);
      } else {
        out[i] = static_cast<std::uint8_t>(it - seen.begin());
      }
    }
    return out;
  }

 private:
  std::size_t flat(Position p) const {
    if (p.side == Position::Side::kLeft) {
      if (p.index == 0 || p.index > n_) throw CheckError("position out of range");
      return p.index - 1;
    }
    if (p.index == 0 || p.index > m_) throw CheckError("position out of range");
    return n_ + p.index - 1;
  }

  Position position(std::size_t flat_index) const {
    return flat_index < n_ ? Position::x(flat_index + 1) : Position::y(flat_index - n_ + 1);
  }

  std::size_t n_ = 0, m_ = 0;
  Omega omega_;
  std::vector<std::uint8_t> labels_;
};

inline AtomicType atomic_type(const Tuple& left, const Tuple& right, Omega omega) {
  std::vector<ValueId> all(left);
  all.insert(all.end(), right.begin(), right.end());
  return AtomicType(left.size(), right.size(), omega, AtomicType::canonical(all, omega));
}

inline AtomicType atomic_type(const Tuple& t, Omega omega) { return atomic_type(t, {}, omega); }

namespace detail {

inline void restricted_growth(std::size_t len, std::vector<std::uint8_t>& cur, std::uint8_t blocks,
                              std::vector<std::vector<std::uint8_t>>& out) {
  if (cur.size() == len) {
    out.push_back(cur);
    return;
  }
  for (std::uint8_t l = 0; l <= blocks; ++l) {
    cur.push_back(l);
    restricted_growth(len, cur, l == blocks ? blocks + 1 : blocks, out);
    cur.pop_back();
  }
}

}  // namespace detail

// All consistent types on (n, m): set partitions of the n+m positions for
// Ω={=} (Bell(n+m) many), weak orders for Ω={=,<} (Fubini(n+m) many).
inline std::vector<AtomicType> enumerate_atomic_types(std::size_t n, std::size_t m, Omega omega) {
  if (n + m > kAtomicTypeCap)
    throw CheckError("atomic type enumeration capped at n+m <= " + std::to_string(kAtomicTypeCap));
  std::vector<std::vector<std::uint8_t>> partitions;
  std::vector<std::uint8_t> cur;
  detail::restricted_growth(n + m, cur, 0, partitions);
  std::vector<AtomicType> out;
  for (const auto& p : partitions) {
    if (!omega.order) {
      out.emplace_back(n, m, omega, p);
      continue;
    }
    std::uint8_t blocks = p.empty() ? 0 : static_cast<std::uint8_t>(*std::max_element(p.begin(), p.end()) + 1);
    std::vector<std::uint8_t> rank(blocks);
    for (std::uint8_t i = 0; i < blocks; ++i) rank[i] = i;
    do {
      std::vector<std::uint8_t> labels(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) labels[i] = rank[p[i]];
      out.emplace_back(n, m, omega, std::move(labels));
    } while (std::next_permutation(rank.begin(), rank.end()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace semijoin
