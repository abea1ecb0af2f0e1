#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semijoin/database.hpp"
#include "semijoin/random.hpp"
#include "semijoin/sa.hpp"

namespace semijoin {

struct SatResult {
  Database db;
  std::size_t examined = 0;
};

// Bounded model search: the first database, by number of values and then
// number of tuples, on which e is nonempty.  Databases with n values use all
// of a, b, ... (n letters), so each isomorphism class is met once per value
// count at most.  When e uses order atoms the universe is declared in
// alphabetical order.  Returns nullopt after `budget` evaluations or when
// every database up to max_values fails.
inline std::optional<SatResult> sat_search(const SAExpr& e, const Schema& schema, std::size_t max_values,
                                           std::size_t budget = 1000000) {
  SATyping typing = check_sa(e, schema);
  bool ordered = typing.dialect.conditions == ConditionClass::kQfOmega;
  std::size_t examined = 0;
  for (std::size_t n = 1; n <= max_values; ++n) {
    std::vector<std::string> values;
    for (std::size_t i = 0; i < n; ++i) values.push_back(value_name(i));
    std::vector<std::pair<std::string, std::vector<std::size_t>>> items;
    for (const auto& [name, arity] : schema.relations()) {
      std::vector<std::size_t> t(arity, 0);
      while (true) {
        items.emplace_back(name, t);
        std::size_t p = arity;
        while (p > 0 && ++t[p - 1] == n) t[--p] = 0;
        if (p == 0) break;
      }
    }
    for (std::size_t size = 0; size <= items.size(); ++size) {
      std::vector<std::size_t> pick(size);
      for (std::size_t i = 0; i < size; ++i) pick[i] = i;
      while (true) {
        std::vector<bool> used(n, false);
        for (std::size_t i : pick)
          for (std::size_t v : items[i].second) used[v] = true;
        bool all = std::all_of(used.begin(), used.end(), [](bool u) { return u; });
        if (all || (n == 1 && size == 0)) {
          if (++examined > budget) return std::nullopt;
          TextRelations rels;
          for (std::size_t i : pick) {
            std::vector<std::string> row;
            for (std::size_t v : items[i].second) row.push_back(values[v]);
            rels[items[i].first].push_back(std::move(row));
          }
          Database db = ordered ? Database(schema, rels, values) : Database(schema, rels);
          if (!eval_sa(e, db).empty()) return SatResult{std::move(db), examined};
        }
        // Next combination in lexicographic order.
        std::size_t k = size;
        while (k > 0 && pick[k - 1] == items.size() - size + k - 1) --k;
        if (k == 0) break;
        ++pick[k - 1];
        for (std::size_t i = k; i < size; ++i) pick[i] = pick[i - 1] + 1;
      }
    }
  }
  return std::nullopt;
}

}  // namespace semijoin
