#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "semijoin/atomic_type.hpp"
#include "semijoin/database.hpp"

namespace semijoin {

// Colour refinement over the positions (tuple space plus ⟨⟩) of single
// databases.  The round-0 colour of t is its projection-membership pattern
// and atomic type; the round-(i+1) colour adds the set of pairs
// (joint type of (t,u), round-i colour of u) over the tuple space.  Colours
// are interned in a table shared by every database refined with the same
// refiner, so two tuples from different databases over one schema have equal
// round-i colours exactly when the duplicator survives i rounds between them.
class ColorRefiner {
 public:
  explicit ColorRefiner(Omega omega) : omega_(omega) {}

  struct Coloring {
    std::vector<Tuple> positions;  // sorted; ⟨⟩ always present
    std::vector<int> colors;

    int color_of(const Tuple& t) const {
      auto it = std::lower_bound(positions.begin(), positions.end(), t);
      if (it == positions.end() || *it != t) return -1;
      return colors[static_cast<std::size_t>(it - positions.begin())];
    }
  };

  Coloring refine(const Database& db, std::size_t rounds) {
    Coloring out;
    std::map<Tuple, std::set<std::string>> pattern;
    for (const auto& [name, arity] : db.schema().relations())
      for (const auto& x : ascending_subsets(arity)) {
        std::string tag = name + "[";
        for (std::size_t p : x) tag += std::to_string(p) + ",";
        tag += "]";
        for (const Tuple& t : db.relation(name)) pattern[project_tuple(t, x)].insert(tag);
      }
    std::vector<bool> in_space;
    if (!pattern.count(Tuple{})) {
      out.positions.push_back(Tuple{});
      in_space.push_back(false);
    }
    for (const auto& [t, _] : pattern) {
      out.positions.push_back(t);
      in_space.push_back(true);
    }
    // ⟨⟩ sorts first, so in_space stays aligned with the sorted positions.
    std::size_t n = out.positions.size();
    std::vector<std::size_t> space;
    for (std::size_t p = 0; p < n; ++p)
      if (in_space[p]) space.push_back(p);

    std::vector<int> joint(n * space.size());
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t k = 0; k < space.size(); ++k)
        joint[p * space.size() + k] = intern(atomic_type(out.positions[p], out.positions[space[k]], omega_).key());

    out.colors.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      const Tuple& t = out.positions[p];
      std::string key = "0|" + std::to_string(t.size()) + "|";
      auto it = pattern.find(t);
      if (it != pattern.end())
        for (const auto& tag : it->second) key += tag;
      key += "|" + atomic_type(t, omega_).key();
      out.colors[p] = intern(key);
    }
    for (std::size_t round = 1; round <= rounds; ++round) {
      std::vector<int> next(n);
      for (std::size_t p = 0; p < n; ++p) {
        std::vector<std::pair<int, int>> seen;
        for (std::size_t k = 0; k < space.size(); ++k)
          seen.emplace_back(joint[p * space.size() + k], out.colors[space[k]]);
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        std::string key = std::to_string(round) + "|" + std::to_string(out.colors[p]) + "|";
        for (auto [j, c] : seen) key += std::to_string(j) + ":" + std::to_string(c) + ",";
        next[p] = intern(key);
      }
      out.colors = std::move(next);
    }
    return out;
  }

 private:
  int intern(const std::string& key) { return table_.emplace(key, static_cast<int>(table_.size())).first->second; }

  Omega omega_;
  std::map<std::string, int> table_;
};

}  // namespace semijoin
