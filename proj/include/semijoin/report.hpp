#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "semijoin/game.hpp"
#include "semijoin/sa.hpp"
#include "semijoin/synth.hpp"

namespace semijoin {

struct ReportOptions {
  bool strategy = false;     // include the duplicator strategy table
  bool expression = false;   // include a distinguishing expression when the spoiler wins
  std::optional<std::size_t> rounds;  // bounded game; unbounded when empty
};

// JSON account of a solved game: tuple spaces, eliminated configurations by
// rank, the fixpoint, and the verdict at the start configuration.
inline nlohmann::json game_report(const Game& g, int a, int b, const ReportOptions& opt = {}) {
  using nlohmann::json;
  auto text = [&](Side s, int p) { return g.db(s).format_tuple(g.positions(s)[static_cast<std::size_t>(p)]); };

  json doc;
  doc["omega"] = g.omega().to_string();
  for (Side s : {Side::kA, Side::kB}) {
    json space = json::array();
    for (int p : g.moves(s)) space.push_back(text(s, p));
    doc["tuple_space"][side_name(s)] = space;
  }
  doc["refinement_rounds"] = g.rounds();

  json eliminated = json::array();
  for (auto [x, y, r] : g.eliminated())
    eliminated.push_back({{"a", text(Side::kA, x)}, {"b", text(Side::kB, y)}, {"rank", r}});
  doc["eliminated"] = eliminated;
  json fix = json::array();
  for (auto [x, y] : g.fixpoint()) fix.push_back({{"a", text(Side::kA, x)}, {"b", text(Side::kB, y)}});
  doc["fixpoint"] = fix;

  bool duplicator = g.wins(a, b, opt.rounds);
  json verdict = {{"a", text(Side::kA, a)},
                  {"b", text(Side::kB, b)},
                  {"rounds", opt.rounds ? json(*opt.rounds) : json("inf")},
                  {"winner", duplicator ? "DUPLICATOR" : "SPOILER"}};
  if (g.rank(a, b) >= 0) verdict["spoiler_rank"] = g.rank(a, b);
  doc["verdict"] = verdict;

  if (opt.strategy) {
    json table = json::array();
    for (const auto& e : duplicator_strategy(g).entries) {
      auto [na, nb] = g.successor(e.side, e.move, e.answer);
      table.push_back({{"config", {{"a", text(Side::kA, e.a)}, {"b", text(Side::kB, e.b)}}},
                       {"side", side_name(e.side)},
                       {"move", text(e.side, e.move)},
                       {"answer", text(other(e.side), e.answer)},
                       {"next", {{"a", text(Side::kA, na)}, {"b", text(Side::kB, nb)}}}});
    }
    doc["strategy"] = table;
  }
  if (opt.expression && !duplicator && g.is_move(Side::kA, a)) {
    if (auto e = distinguish(g, a, b)) doc["distinguishing_expression"] = to_string(*e);
  }
  return doc;
}

}  // namespace semijoin
