#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semijoin/atomic_type.hpp"
#include "semijoin/condition.hpp"
#include "semijoin/database.hpp"
#include "semijoin/error.hpp"

namespace semijoin {

enum class Side : std::uint8_t { kA, kB };

inline Side other(Side s) { return s == Side::kA ? Side::kB : Side::kA; }
inline const char* side_name(Side s) { return s == Side::kA ? "A" : "B"; }

// Ω = {=,<} when both databases declare an order, else {=}.
inline Omega default_omega(const Database& a, const Database& b) {
  return {a.has_declared_order() && b.has_declared_order()};
}

// The semijoin game on a pair of databases over the same schema, solved on
// construction.
//
// Positions of a side are its tuple space plus the empty tuple (so that
// (⟨⟩,⟨⟩) is a configuration even when a database is empty); the spoiler
// moves only within the tuple space.  Positions are sorted, so a smaller
// index is lexicographically smaller among tuples of equal arity.
//
// rank(a,b) is the round at which the configuration leaves the winning
// region: 0 when the 0-round conditions fail, r when it is in W_{r-1} but not
// in W_r, and -1 when it lies in the greatest fixpoint.
class Game {
 public:
  Game(Database a, Database b, Omega omega) : omega_(omega) {
    if (!(a.schema() == b.schema())) throw CheckError("the two databases have different schemas");
    side_[0].db = std::move(a);
    side_[1].db = std::move(b);
    for (const auto& [name, arity] : side_[0].db.schema().relations())
      for (const auto& x : ascending_subsets(arity)) projections_.emplace_back(name, x);
    for (auto& s : side_) build_side(s);
    for (int k = 0; k < 2; ++k) build_joint_types(side_[k]);
    for (int k = 0; k < 2; ++k) build_answer_index(side_[k]);
    solve();
  }

  const Database& db(Side s) const { return at(s).db; }
  Omega omega() const { return omega_; }
  const std::vector<Tuple>& positions(Side s) const { return at(s).positions; }
  // Indices into positions(s) of the tuple-space members.
  const std::vector<int>& moves(Side s) const { return at(s).moves; }
  bool is_move(Side s, int p) const { return at(s).is_move[static_cast<std::size_t>(p)]; }

  // The (relation, ascending X) pairs in the fixed order used by patterns.
  const std::vector<std::pair<std::string, std::vector<std::size_t>>>& projections() const {
    return projections_;
  }
  // Indices into projections() of the pairs (R, X) with t ∈ π_X(R).
  const std::vector<int>& memberships(Side s, int p) const {
    return at(s).membership[static_cast<std::size_t>(p)];
  }

  std::optional<int> find(Side s, const Tuple& t) const {
    const auto& ps = at(s).positions;
    auto it = std::lower_bound(ps.begin(), ps.end(), t);
    if (it == ps.end() || *it != t) return std::nullopt;
    return static_cast<int>(it - ps.begin());
  }

  // Position index of t; throws CheckError unless t is ⟨⟩ or in the tuple space.
  int require(Side s, const Tuple& t) const {
    auto p = find(s, t);
    if (!p) throw CheckError("tuple " + db(s).format_tuple(t) + " is not in the tuple space of " + side_name(s));
    return *p;
  }

  std::size_t size(Side s) const { return at(s).positions.size(); }

  bool wins_round0(int a, int b) const {
    return side_[0].pattern[a] == side_[1].pattern[b] && side_[0].type[a] == side_[1].type[b];
  }

  // Legal duplicator answers (indices into the opposite side's positions) to
  // the spoiler playing position `move` of side `s` in configuration (a,b).
  const std::vector<int>& legal_answers(int a, int b, Side s, int move) const {
    static const std::vector<int> kNone;
    if (!is_move(s, move)) throw CheckError("spoiler move outside the tuple space");
    const Half& from = at(s);
    const Half& to = at(other(s));
    int here = s == Side::kA ? a : b;
    int there = s == Side::kA ? b : a;
    auto key = answer_key(from.pattern[move], from.joint(here, move));
    const auto& index = to.answers[static_cast<std::size_t>(there)];
    auto it = index.find(key);
    if (it == index.end()) return kNone;
    return it->second;
  }

  int rank(int a, int b) const { return elim_[cell(a, b)]; }

  // Membership in W_m, or in the fixpoint when `rounds` is empty.
  bool wins(int a, int b, std::optional<std::size_t> rounds = std::nullopt) const {
    int r = rank(a, b);
    if (r < 0) return true;
    return rounds && static_cast<std::size_t>(r) > *rounds;
  }

  // Refinement rounds needed to reach the fixpoint (W_rounds = W_rounds+1).
  std::size_t rounds() const { return rounds_; }

  std::vector<std::pair<int, int>> fixpoint() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < static_cast<int>(size(Side::kA)); ++a)
      for (int b = 0; b < static_cast<int>(size(Side::kB)); ++b)
        if (rank(a, b) < 0) out.emplace_back(a, b);
    return out;
  }

  // (a, b, rank) for every configuration outside the fixpoint.
  std::vector<std::tuple<int, int, int>> eliminated() const {
    std::vector<std::tuple<int, int, int>> out;
    for (int a = 0; a < static_cast<int>(size(Side::kA)); ++a)
      for (int b = 0; b < static_cast<int>(size(Side::kB)); ++b)
        if (rank(a, b) >= 0) out.emplace_back(a, b, rank(a, b));
    return out;
  }

  // Least legal answer whose successor configuration lies in the fixpoint.
  std::optional<int> strategy_answer(int a, int b, Side s, int move) const {
    for (int d : legal_answers(a, b, s, move)) {
      auto [na, nb] = successor(s, move, d);
      if (rank(na, nb) < 0) return d;
    }
    return std::nullopt;
  }

  // A spoiler move from an eliminated configuration of rank r ≥ 1 after
  // which every legal answer leads outside W_{r-1}; the first in the order
  // side A moves, then side B moves.
  std::optional<std::pair<Side, int>> spoiler_move(int a, int b) const {
    int r = rank(a, b);
    if (r < 1) return std::nullopt;
    for (Side s : {Side::kA, Side::kB})
      for (int c : moves(s)) {
        bool refuted = true;
        for (int d : legal_answers(a, b, s, c)) {
          auto [na, nb] = successor(s, c, d);
          if (wins(na, nb, static_cast<std::size_t>(r - 1))) {
            refuted = false;
            break;
          }
        }
        if (refuted) return std::make_pair(s, c);
      }
    throw InternalError("no rank-decreasing spoiler move from an eliminated configuration");
  }

  // Configuration after the spoiler plays `move` on side s and the
  // duplicator answers `answer`.
  std::pair<int, int> successor(Side s, int move, int answer) const {
    return s == Side::kA ? std::make_pair(move, answer) : std::make_pair(answer, move);
  }

 private:
  struct Half {
    Database db;
    std::vector<Tuple> positions;
    std::vector<int> moves;
    std::vector<bool> is_move;
    std::vector<std::vector<int>> membership;
    std::vector<int> pattern;  // interned membership list
    std::vector<int> type;     // interned atomic type of the tuple alone
    std::vector<int> jt;       // positions × moves, interned joint types
    std::vector<int> move_slot;
    std::vector<std::unordered_map<std::uint64_t, std::vector<int>>> answers;

    int joint(int p, int move) const {
      return jt[static_cast<std::size_t>(p) * moves.size() + static_cast<std::size_t>(move_slot[move])];
    }
  };

  const Half& at(Side s) const { return side_[s == Side::kA ? 0 : 1]; }
  std::size_t cell(int a, int b) const {
    return static_cast<std::size_t>(a) * side_[1].positions.size() + static_cast<std::size_t>(b);
  }
  static std::uint64_t answer_key(int pattern, int joint) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(pattern)) << 32) |
           static_cast<std::uint32_t>(joint);
  }

  int intern(std::map<std::string, int>& table, const std::string& key) {
    return table.emplace(key, static_cast<int>(table.size())).first->second;
  }

  void build_side(Half& s) {
    std::map<Tuple, std::vector<int>> member;
    for (std::size_t i = 0; i < projections_.size(); ++i) {
      const auto& [name, x] = projections_[i];
      for (const Tuple& t : s.db.relation(name)) {
        auto& list = member[project_tuple(t, x)];
        if (list.empty() || list.back() != static_cast<int>(i)) list.push_back(static_cast<int>(i));
      }
    }
    if (!member.count(Tuple{})) s.positions.push_back(Tuple{});
    for (const auto& [t, _] : member) s.positions.push_back(t);
    std::sort(s.positions.begin(), s.positions.end());
    for (std::size_t p = 0; p < s.positions.size(); ++p) {
      auto it = member.find(s.positions[p]);
      bool in_space = it != member.end();
      s.is_move.push_back(in_space);
      s.move_slot.push_back(in_space ? static_cast<int>(s.moves.size()) : -1);
      if (in_space) s.moves.push_back(static_cast<int>(p));
      s.membership.push_back(in_space ? it->second : std::vector<int>{});
      std::string pkey = std::to_string(s.positions[p].size()) + ":";
      for (int m : s.membership.back()) pkey += std::to_string(m) + ",";
      s.pattern.push_back(intern(patterns_, pkey));
      s.type.push_back(intern(types_, atomic_type(s.positions[p], omega_).key()));
    }
  }

  void build_joint_types(Half& s) {
    s.jt.resize(s.positions.size() * s.moves.size());
    for (std::size_t p = 0; p < s.positions.size(); ++p)
      for (std::size_t k = 0; k < s.moves.size(); ++k)
        s.jt[p * s.moves.size() + k] =
            intern(types_, atomic_type(s.positions[p], s.positions[s.moves[k]], omega_).key());
  }

  void build_answer_index(Half& s) {
    s.answers.resize(s.positions.size());
    for (std::size_t p = 0; p < s.positions.size(); ++p)
      for (int d : s.moves) s.answers[p][answer_key(s.pattern[d], s.joint(static_cast<int>(p), d))].push_back(d);
  }

  // Every spoiler move has a legal answer whose successor is still alive,
  // where alive means not yet eliminated before this round.
  bool answered(int a, int b) const {
    for (Side s : {Side::kA, Side::kB})
      for (int c : moves(s)) {
        bool ok = false;
        for (int d : legal_answers(a, b, s, c)) {
          auto [na, nb] = successor(s, c, d);
          int r = elim_[cell(na, nb)];
          if (r < 0 || r == current_round_) {
            ok = true;
            break;
          }
        }
        if (!ok) return false;
      }
    return true;
  }

  void solve() {
    std::size_t na = side_[0].positions.size(), nb = side_[1].positions.size();
    elim_.assign(na * nb, -1);
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t b = 0; b < nb; ++b)
        if (!wins_round0(static_cast<int>(a), static_cast<int>(b))) elim_[cell(static_cast<int>(a), static_cast<int>(b))] = 0;
    for (current_round_ = 1;; ++current_round_) {
      std::vector<std::size_t> out;
      for (std::size_t a = 0; a < na; ++a)
        for (std::size_t b = 0; b < nb; ++b) {
          std::size_t c = cell(static_cast<int>(a), static_cast<int>(b));
          if (elim_[c] < 0 && !answered(static_cast<int>(a), static_cast<int>(b))) out.push_back(c);
        }
      if (out.empty()) break;
      for (std::size_t c : out) elim_[c] = current_round_;
    }
    rounds_ = static_cast<std::size_t>(current_round_ - 1);
  }

  Omega omega_;
  Half side_[2];
  std::vector<std::pair<std::string, std::vector<std::size_t>>> projections_;
  std::map<std::string, int> patterns_, types_;
  std::vector<int> elim_;
  int current_round_ = 0;
  std::size_t rounds_ = 0;
};

// Duplicator answers for every fixpoint configuration and spoiler move.
struct Strategy {
  struct Entry {
    int a, b;
    Side side;
    int move, answer;
  };
  std::vector<Entry> entries;

  std::optional<int> answer(int a, int b, Side side, int move) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), std::make_tuple(a, b, side, move),
                               [](const Entry& e, const std::tuple<int, int, Side, int>& k) {
                                 return std::make_tuple(e.a, e.b, e.side, e.move) < k;
                               });
    if (it == entries.end() || std::make_tuple(it->a, it->b, it->side, it->move) != std::make_tuple(a, b, side, move))
      return std::nullopt;
    return it->answer;
  }
};

inline Strategy duplicator_strategy(const Game& g) {
  Strategy st;
  for (auto [a, b] : g.fixpoint())
    for (Side s : {Side::kA, Side::kB})
      for (int c : g.moves(s)) {
        auto d = g.strategy_answer(a, b, s, c);
        if (!d) throw InternalError("fixpoint configuration without a surviving answer");
        st.entries.push_back({a, b, s, c, *d});
      }
  return st;
}

// Tuple-level conveniences.  ⟨⟩ is accepted on either side; other tuples
// must lie in their tuple space.

inline Game winning_region_infinite(const Database& a, const Database& b, Omega omega) {
  return Game(a, b, omega);
}

inline bool wins_round0(const Database& a, const Database& b, const Tuple& ta, const Tuple& tb, Omega omega) {
  Game g(a, b, omega);
  return g.wins_round0(g.require(Side::kA, ta), g.require(Side::kB, tb));
}

inline bool wins_m(const Database& a, const Database& b, const Tuple& ta, const Tuple& tb, std::size_t m,
                   Omega omega) {
  Game g(a, b, omega);
  return g.wins(g.require(Side::kA, ta), g.require(Side::kB, tb), m);
}

inline std::vector<Tuple> legal_answers(const Game& g, const Tuple& ta, const Tuple& tb, Side s, const Tuple& move) {
  int m = g.require(s, move);
  std::vector<Tuple> out;
  for (int d : g.legal_answers(g.require(Side::kA, ta), g.require(Side::kB, tb), s, m))
    out.push_back(g.positions(other(s))[static_cast<std::size_t>(d)]);
  return out;
}

}  // namespace semijoin
