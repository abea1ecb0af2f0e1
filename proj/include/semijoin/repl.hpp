#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "semijoin/error.hpp"
#include "semijoin/game.hpp"
#include "semijoin/random.hpp"

namespace semijoin {

struct ReplOptions {
  bool human_spoiler = true;
  std::uint64_t seed = 1;
  std::optional<std::size_t> max_rounds;
};

namespace detail {

class Repl {
 public:
  Repl(const Game& g, int a, int b, const ReplOptions& opt, std::istream& in, std::ostream& out)
      : g_(g), a_(a), b_(b), opt_(opt), in_(in), out_(out), rng_(opt.seed) {}

  int run() {
    out_ << "semijoin game, omega " << g_.omega().to_string() << ", seed " << opt_.seed << "\n";
    out_ << "you play the " << (opt_.human_spoiler ? "spoiler" : "duplicator") << "; type 'help' for commands\n";
    show_config();
    if (g_.rank(a_, b_) == 0) {
      out_ << "the 0-round conditions already fail: SPOILER wins\n";
      return 0;
    }
    for (std::size_t round = 1;; ++round) {
      if (opt_.max_rounds && round > *opt_.max_rounds) {
        out_ << "round limit reached: DUPLICATOR survived " << *opt_.max_rounds << " rounds\n";
        return 0;
      }
      out_ << "-- round " << round << "\n";
      bool go_on = opt_.human_spoiler ? human_spoiler_turn() : machine_spoiler_turn();
      if (!go_on) return 0;
    }
  }

 private:
  std::string text(Side s, int p) const {
    return g_.db(s).format_tuple(g_.positions(s)[static_cast<std::size_t>(p)]);
  }

  void show_config() { out_ << "configuration " << text(Side::kA, a_) << " | " << text(Side::kB, b_) << "\n"; }

  void list(Side s, const std::vector<int>& ps) {
    out_ << "  " << side_name(s) << ":";
    for (int p : ps) out_ << " " << text(s, p);
    out_ << "\n";
  }

  // Next input line; nullopt at end of input or on 'quit'.
  std::optional<std::string> read(const char* prompt) {
    out_ << prompt << std::flush;
    std::string line;
    if (!std::getline(in_, line)) {
      out_ << "\n";
      return std::nullopt;
    }
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string();
    line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
    if (line == "quit" || line == "exit") return std::nullopt;
    return line;
  }

  bool common_command(const std::string& line) {
    if (line == "help") {
      if (opt_.human_spoiler)
        out_ << "  A (v1,...,vk)   play a tuple of database A\n  B (v1,...,vk)   play a tuple of database B\n";
      else
        out_ << "  (v1,...,vk)     answer with a tuple of the other database\n";
      out_ << "  moves           list the tuple spaces\n  state           show the configuration\n"
              "  quit            leave the game\n";
      return true;
    }
    if (line == "moves") {
      list(Side::kA, g_.moves(Side::kA));
      list(Side::kB, g_.moves(Side::kB));
      return true;
    }
    if (line == "state") {
      show_config();
      return true;
    }
    return line.empty();
  }

  void finish(const char* winner, const std::string& why) {
    out_ << why << ": " << winner << " wins\n";
  }

  // Human spoiler, machine duplicator.
  bool human_spoiler_turn() {
    while (true) {
      auto line = read("spoiler> ");
      if (!line) {
        out_ << "bye\n";
        return false;
      }
      if (common_command(*line)) continue;
      std::optional<Side> side;
      if ((*line)[0] == 'A' || (*line)[0] == 'a') side = Side::kA;
      if ((*line)[0] == 'B' || (*line)[0] == 'b') side = Side::kB;
      std::optional<int> move;
      if (side) {
        try {
          move = g_.find(*side, g_.db(*side).parse_tuple(line->substr(1)));
        } catch (const Error&) {
        }
        if (move && !g_.is_move(*side, *move)) move.reset();
      }
      if (!side || !move) {
        out_ << "illegal move; legal moves are\n";
        list(Side::kA, g_.moves(Side::kA));
        list(Side::kB, g_.moves(Side::kB));
        continue;
      }
      auto answer = machine_answer(*side, *move);
      if (!answer) {
        finish("SPOILER", "no legal answer to " + text(*side, *move));
        return false;
      }
      out_ << "duplicator answers " << text(other(*side), *answer) << "\n";
      std::tie(a_, b_) = g_.successor(*side, *move, *answer);
      show_config();
      return true;
    }
  }

  // Strategy answer inside the fixpoint; otherwise the legal answer that
  // survives longest.
  std::optional<int> machine_answer(Side s, int move) {
    if (auto d = g_.strategy_answer(a_, b_, s, move)) return d;
    std::optional<int> best;
    int best_rank = -2;
    for (int d : g_.legal_answers(a_, b_, s, move)) {
      auto [na, nb] = g_.successor(s, move, d);
      int r = g_.rank(na, nb);
      if (r > best_rank) {
        best_rank = r;
        best = d;
      }
    }
    return best;
  }

  // Machine spoiler, human duplicator.
  bool machine_spoiler_turn() {
    Side s;
    int move;
    if (auto m = g_.spoiler_move(a_, b_)) {
      s = m->first;
      move = m->second;
    } else {
      std::vector<std::pair<Side, int>> all;
      for (Side t : {Side::kA, Side::kB})
        for (int c : g_.moves(t)) all.emplace_back(t, c);
      if (all.empty()) {
        finish("DUPLICATOR", "the spoiler has no move");
        return false;
      }
      std::tie(s, move) = rng_.pick(all);
    }
    out_ << "spoiler plays " << side_name(s) << " " << text(s, move) << "\n";
    const auto& legal = g_.legal_answers(a_, b_, s, move);
    if (legal.empty()) {
      finish("SPOILER", "no legal answer exists");
      return false;
    }
    Side reply = other(s);
    while (true) {
      auto line = read("duplicator> ");
      if (!line) {
        out_ << "bye\n";
        return false;
      }
      if (common_command(*line)) continue;
      std::optional<int> d;
      try {
        d = g_.find(reply, g_.db(reply).parse_tuple(*line));
      } catch (const Error&) {
      }
      if (!d || std::find(legal.begin(), legal.end(), *d) == legal.end()) {
        out_ << "illegal answer; legal answers in " << side_name(reply) << " are\n";
        list(reply, legal);
        continue;
      }
      std::tie(a_, b_) = g_.successor(s, move, *d);
      show_config();
      return true;
    }
  }

  const Game& g_;
  int a_, b_;
  ReplOptions opt_;
  std::istream& in_;
  std::ostream& out_;
  Rng rng_;
};

}  // namespace detail

// Interactive game on a terminal (or any stream pair).  The machine plays the
// other role: as duplicator it follows the fixpoint strategy, as spoiler it
// plays a rank-decreasing move when one exists and a seeded random move
// otherwise.  The same seed and input lines reproduce the same session.
inline int run_repl(const Game& g, int a, int b, const ReplOptions& opt, std::istream& in, std::ostream& out) {
  return detail::Repl(g, a, b, opt, in, out).run();
}

}  // namespace semijoin
