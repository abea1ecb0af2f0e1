#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "semijoin/error.hpp"

namespace semijoin {

// Values are strings.  Inside a Database every value is interned as a
// ValueId, and ids are assigned in the database's value order (the declared
// order when present, code-point lexicographic order otherwise), so id
// comparison is value comparison.  A Tuple is therefore only meaningful
// together with the Database that produced it.
using ValueId = std::uint32_t;
using Tuple = std::vector<ValueId>;

// Sorted, duplicate-free set of tuples.  Tuples of mixed arity may coexist
// (tuple spaces); relations always hold a single arity.
class TupleSet {
 public:
  using const_iterator = std::vector<Tuple>::const_iterator;

  TupleSet() = default;
  explicit TupleSet(std::vector<Tuple> tuples) : tuples_(std::move(tuples)) {
    std::sort(tuples_.begin(), tuples_.end());
    tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
  }

  static TupleSet from_sorted(std::vector<Tuple> sorted) {
    TupleSet s;
    s.tuples_ = std::move(sorted);
    return s;
  }

  bool contains(const Tuple& t) const {
    return std::binary_search(tuples_.begin(), tuples_.end(), t);
  }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }
  const_iterator begin() const { return tuples_.begin(); }
  const_iterator end() const { return tuples_.end(); }
  const Tuple& operator[](std::size_t i) const { return tuples_[i]; }
  const std::vector<Tuple>& tuples() const { return tuples_; }

  // Position of t in sorted order, or size() when absent.
  std::size_t index_of(const Tuple& t) const {
    auto it = std::lower_bound(tuples_.begin(), tuples_.end(), t);
    if (it == tuples_.end() || *it != t) return tuples_.size();
    return static_cast<std::size_t>(it - tuples_.begin());
  }

  friend bool operator==(const TupleSet&, const TupleSet&) = default;

 private:
  std::vector<Tuple> tuples_;
};

inline TupleSet set_union(const TupleSet& a, const TupleSet& b) {
  std::vector<Tuple> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return TupleSet::from_sorted(std::move(out));
}

inline TupleSet set_difference(const TupleSet& a, const TupleSet& b) {
  std::vector<Tuple> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return TupleSet::from_sorted(std::move(out));
}

inline TupleSet set_intersection(const TupleSet& a, const TupleSet& b) {
  std::vector<Tuple> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return TupleSet::from_sorted(std::move(out));
}

// Positions are 0-based here; the textual grammars use 1-based positions.
inline Tuple project_tuple(const Tuple& t, const std::vector<std::size_t>& positions) {
  Tuple out;
  out.reserve(positions.size());
  for (std::size_t p : positions) out.push_back(t[p]);
  return out;
}

inline TupleSet project(const TupleSet& s, const std::vector<std::size_t>& positions) {
  std::vector<Tuple> out;
  out.reserve(s.size());
  for (const Tuple& t : s) out.push_back(project_tuple(t, positions));
  return TupleSet(std::move(out));
}

// All ascending 0-based index sequences X ⊆ {0..arity-1}, ordered by size and
// then lexicographically.
inline std::vector<std::vector<std::size_t>> ascending_subsets(std::size_t arity) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t size = 0; size <= arity; ++size) {
    std::vector<bool> pick(arity, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
    do {
      std::vector<std::size_t> x;
      for (std::size_t i = 0; i < arity; ++i)
        if (pick[i]) x.push_back(i);
      out.push_back(std::move(x));
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return out;
}

inline bool is_reserved_word(const std::string& s) {
  static const char* const kReserved[] = {"rel",     "union", "diff",   "select",
                                          "project", "semijoin", "exists", "true",
                                          "false"};
  return std::any_of(std::begin(kReserved), std::end(kReserved),
                     [&](const char* w) { return s == w; });
}

inline bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  auto alpha = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s[0])) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || digit(c); });
}

class Schema {
 public:
  Schema() = default;
  Schema(std::initializer_list<std::pair<const std::string, std::size_t>> rels) {
    for (const auto& [name, arity] : rels) add(name, arity);
  }

  void add(const std::string& name, std::size_t arity) {
    if (!is_identifier(name) || is_reserved_word(name))
      throw CheckError("invalid relation name '" + name + "'");
    auto [it, inserted] = arities_.emplace(name, arity);
    if (!inserted && it->second != arity)
      throw CheckError("relation '" + name + "' declared with two arities");
  }

  bool contains(const std::string& name) const { return arities_.count(name) != 0; }

  std::size_t arity(const std::string& name) const {
    auto it = arities_.find(name);
    if (it == arities_.end()) throw CheckError("unknown relation '" + name + "'");
    return it->second;
  }

  std::size_t max_arity() const {
    std::size_t m = 0;
    for (const auto& [_, a] : arities_) m = std::max(m, a);
    return m;
  }

  bool empty() const { return arities_.empty(); }
  std::size_t size() const { return arities_.size(); }
  const std::map<std::string, std::size_t>& relations() const { return arities_; }

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::map<std::string, std::size_t> arities_;
};

// Parses "R/2,S/1".
inline Schema parse_schema(const std::string& text) {
  Schema s;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(pos, comma - pos);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    auto slash = item.find('/');
    if (slash == std::string::npos)
      throw ParseError("expected NAME/ARITY in schema", 1, pos + 1);
    std::size_t arity = 0;
    try {
      arity = std::stoul(item.substr(slash + 1));
    } catch (const std::exception&) {
      throw ParseError("bad arity in schema", 1, pos + slash + 2);
    }
    s.add(item.substr(0, slash), arity);
    pos = comma + 1;
  }
  return s;
}

// Relation contents keyed by name, tuples as value text.
using TextRelations = std::map<std::string, std::vector<std::vector<std::string>>>;

class Database {
 public:
  Database() = default;

  // Validates arities and the declared order.  Relations of the schema that
  // are missing from `contents` are empty.
  Database(Schema schema, const TextRelations& contents,
           std::optional<std::vector<std::string>> order = std::nullopt)
      : schema_(std::move(schema)), ordered_(order.has_value()) {
    for (const auto& [name, tuples] : contents) {
      std::size_t arity = schema_.arity(name);
      for (const auto& t : tuples)
        if (t.size() != arity)
          throw CheckError("arity mismatch in relation '" + name + "': expected " +
                           std::to_string(arity) + " components, got " +
                           std::to_string(t.size()));
    }
    if (order) {
      universe_ = *order;
      for (std::size_t i = 0; i < universe_.size(); ++i)
        if (!index_.emplace(universe_[i], static_cast<ValueId>(i)).second)
          throw CheckError("value '" + universe_[i] + "' repeated in order");
      for (const auto& [name, tuples] : contents)
        for (const auto& t : tuples)
          for (const auto& v : t)
            if (!index_.count(v))
              throw CheckError("value '" + v + "' in relation '" + name +
                               "' is not in the declared order");
    } else {
      std::vector<std::string> values;
      for (const auto& [_, tuples] : contents)
        for (const auto& t : tuples) values.insert(values.end(), t.begin(), t.end());
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      universe_ = std::move(values);
      for (std::size_t i = 0; i < universe_.size(); ++i)
        index_.emplace(universe_[i], static_cast<ValueId>(i));
    }
    for (const auto& [name, _] : schema_.relations()) {
      std::vector<Tuple> rows;
      auto it = contents.find(name);
      if (it != contents.end())
        for (const auto& t : it->second) {
          Tuple row;
          for (const auto& v : t) row.push_back(index_.at(v));
          rows.push_back(std::move(row));
        }
      relations_.emplace(name, TupleSet(std::move(rows)));
    }
    std::vector<bool> seen(universe_.size(), false);
    for (const auto& [_, rel] : relations_)
      for (const Tuple& t : rel)
        for (ValueId v : t) seen[v] = true;
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (seen[i]) adom_.push_back(static_cast<ValueId>(i));
  }

  const Schema& schema() const { return schema_; }

  const TupleSet& relation(const std::string& name) const {
    auto it = relations_.find(name);
    if (it == relations_.end()) throw CheckError("unknown relation '" + name + "'");
    return it->second;
  }
  const std::map<std::string, TupleSet>& relations() const { return relations_; }

  bool has_declared_order() const { return ordered_; }
  const std::vector<std::string>& universe() const { return universe_; }
  const std::string& value(ValueId id) const { return universe_.at(id); }
  std::optional<ValueId> find_value(const std::string& text) const {
    auto it = index_.find(text);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Values occurring in some relation, ascending.
  const std::vector<ValueId>& active_domain() const { return adom_; }

  // True when every relation is empty.
  bool empty() const {
    return std::all_of(relations_.begin(), relations_.end(),
                       [](const auto& kv) { return kv.second.empty(); });
  }

  std::vector<std::string> text_tuple(const Tuple& t) const {
    std::vector<std::string> out;
    for (ValueId v : t) out.push_back(value(v));
    return out;
  }

  std::string format_tuple(const Tuple& t) const {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) out += ',';
      out += t[i] < universe().size() ? value(t[i]) : "#" + std::to_string(t[i]);
    }
    return out + ")";
  }

  // Parses "(a,b)" / "()" against this database's universe.
  Tuple parse_tuple(const std::string& text) const {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' '; }), s.end());
    if (s.size() < 2 || s.front() != '(' || s.back() != ')')
      throw ParseError("tuple must be written as (v1,...,vk)", 1, 1);
    s = s.substr(1, s.size() - 2);
    Tuple t;
    if (s.empty()) return t;
    std::size_t pos = 0;
    while (true) {
      std::size_t comma = s.find(',', pos);
      std::string v = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      auto id = find_value(v);
      if (!id) throw CheckError("value '" + v + "' is not in the database universe");
      t.push_back(*id);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return t;
  }

  TextRelations text_relations() const {
    TextRelations out;
    for (const auto& [name, rel] : relations_) {
      auto& rows = out[name];
      for (const Tuple& t : rel) rows.push_back(text_tuple(t));
    }
    return out;
  }

  // Same contents, universe re-declared in the given order.
  Database with_order(std::vector<std::string> order) const {
    return Database(schema_, text_relations(), std::move(order));
  }

 private:
  Schema schema_;
  bool ordered_ = false;
  std::vector<std::string> universe_;
  std::unordered_map<std::string, ValueId> index_;
  std::map<std::string, TupleSet> relations_;
  std::vector<ValueId> adom_;
};

namespace detail {

inline std::string json_value_text(const nlohmann::json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw CheckError(where + ": values must be strings or integers");
}

}  // namespace detail

// Reads the JSON database document:
//   {"order": [...], "relations": {"R": {"arity": 2, "tuples": [["a","b"]]}}}
inline Database load_database(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string msg = e.what();
    auto colon = msg.find("syntax error");
    throw ParseError(colon == std::string::npos ? msg : msg.substr(colon), line, col);
  }
  if (!doc.is_object()) throw CheckError("database document must be a JSON object");
  if (!doc.contains("relations") || !doc["relations"].is_object())
    throw CheckError("database document needs a \"relations\" object");
  Schema schema;
  TextRelations contents;
  for (const auto& [name, body] : doc["relations"].items()) {
    if (!body.is_object() || !body.contains("arity") || !body["arity"].is_number_unsigned())
      throw CheckError("relation '" + name + "' needs a non-negative \"arity\"");
    schema.add(name, body["arity"].get<std::size_t>());
    auto& rows = contents[name];
    if (body.contains("tuples")) {
      if (!body["tuples"].is_array())
        throw CheckError("relation '" + name + "': \"tuples\" must be an array");
      for (const auto& row : body["tuples"]) {
        if (!row.is_array())
          throw CheckError("relation '" + name + "': each tuple must be an array");
        std::vector<std::string> t;
        for (const auto& v : row) t.push_back(detail::json_value_text(v, name));
        rows.push_back(std::move(t));
      }
    }
  }
  std::optional<std::vector<std::string>> order;
  if (doc.contains("order")) {
    if (!doc["order"].is_array()) throw CheckError("\"order\" must be an array");
    order.emplace();
    for (const auto& v : doc["order"]) order->push_back(detail::json_value_text(v, "order"));
  }
  return Database(std::move(schema), contents, std::move(order));
}

inline nlohmann::json to_json(const Database& db) {
  nlohmann::json doc = nlohmann::json::object();
  if (db.has_declared_order()) doc["order"] = db.universe();
  nlohmann::json rels = nlohmann::json::object();
  for (const auto& [name, rel] : db.relations()) {
    nlohmann::json tuples = nlohmann::json::array();
    for (const Tuple& t : rel) tuples.push_back(db.text_tuple(t));
    rels[name] = {{"arity", db.schema().arity(name)}, {"tuples", tuples}};
  }
  doc["relations"] = rels;
  return doc;
}

inline std::string dump_database(const Database& db) { return to_json(db).dump(2) + "\n"; }

// T_db: every projection, over an ascending index set, of every relation.
// Contains the empty tuple iff some relation is nonempty.
inline TupleSet tuple_space(const Database& db) {
  std::vector<Tuple> out;
  for (const auto& [name, rel] : db.relations()) {
    for (const auto& x : ascending_subsets(db.schema().arity(name)))
      for (const Tuple& t : rel) out.push_back(project_tuple(t, x));
  }
  return TupleSet(std::move(out));
}

}  // namespace semijoin
