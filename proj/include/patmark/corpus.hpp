#pragma once

// Line-delimited JSON corpus: {"id": string, "tokens": [int],
// "tags": [int] (optional), "meta": {...}}. Edit ground truth rides in meta
// as {"edits": [{kind,start,span}], "true_positions": [int]}.

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "patmark/edits.hpp"
#include "patmark/errors.hpp"
#include "patmark/generation.hpp"

namespace patmark {

struct Record {
  std::string id;
  TokenSequence seq;
  nlohmann::json meta = nlohmann::json::object();
};

namespace detail {

inline std::vector<std::int32_t> int_array(const nlohmann::json& value,
                                           const std::string& context) {
  if (!value.is_array()) throw DataError(context + " must be an array");
  std::vector<std::int32_t> out;
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_number_integer())
      throw DataError(context + " must contain integers");
    const auto v = item.get<std::int64_t>();
    if (v < INT32_MIN || v > INT32_MAX)
      throw DataError(context + " value out of 32-bit range");
    out.push_back(static_cast<std::int32_t>(v));
  }
  return out;
}

}  // namespace detail

inline Record parse_record(const std::string& line, std::size_t line_number) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("line " + std::to_string(line_number) +
                    ": invalid JSON: " + e.what());
  }
  const std::string where = "line " + std::to_string(line_number);
  if (!j.is_object()) throw DataError(where + ": record must be an object");
  if (!j.contains("id") || !j["id"].is_string())
    throw DataError(where + ": missing string field 'id'");
  if (!j.contains("tokens"))
    throw DataError(where + ": missing field 'tokens'");

  Record rec;
  rec.id = j["id"].get<std::string>();
  rec.seq.tokens = detail::int_array(j["tokens"], where + ": 'tokens'");
  if (j.contains("tags")) {
    rec.seq.tags = detail::int_array(j["tags"], where + ": 'tags'");
    if (rec.seq.tags.size() != rec.seq.tokens.size())
      throw DataError(where + ": 'tags' length differs from 'tokens'");
  }
  if (j.contains("meta")) {
    if (!j["meta"].is_object())
      throw DataError(where + ": 'meta' must be an object");
    rec.meta = j["meta"];
  }
  return rec;
}

inline std::vector<Record> read_corpus(std::istream& in) {
  std::vector<Record> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    records.push_back(parse_record(line, line_number));
  }
  return records;
}

inline std::vector<Record> read_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file '" + path + "'");
  return read_corpus(in);
}

inline nlohmann::json record_to_json(const Record& rec) {
  nlohmann::json j;
  j["id"] = rec.id;
  j["tokens"] = rec.seq.tokens;
  if (!rec.seq.tags.empty()) j["tags"] = rec.seq.tags;
  if (!rec.meta.empty()) j["meta"] = rec.meta;
  return j;
}

inline void write_corpus(const std::vector<Record>& records, std::ostream& out) {
  for (const auto& rec : records) out << record_to_json(rec).dump() << '\n';
}

inline void write_corpus_file(const std::vector<Record>& records,
                              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  write_corpus(records, out);
}

inline void attach_edit_meta(Record& rec, const EditPlan& plan,
                             const std::vector<std::int64_t>& true_positions) {
  nlohmann::json edits = nlohmann::json::array();
  for (const EditOp& op : plan.ops)
    edits.push_back({{"kind", to_string(op.kind)},
                     {"start", op.start},
                     {"span", op.span}});
  rec.meta["edits"] = std::move(edits);
  rec.meta["true_positions"] = true_positions;
}

inline bool has_edit_meta(const Record& rec) {
  return rec.meta.contains("true_positions") && rec.meta.contains("edits");
}

inline std::vector<std::int64_t> true_positions_of(const Record& rec) {
  if (!has_edit_meta(rec)) throw DataError("record lacks edit ground truth");
  std::vector<std::int64_t> out;
  for (const auto& item : rec.meta["true_positions"]) {
    if (!item.is_number_integer())
      throw DataError("true_positions must contain integers");
    out.push_back(item.get<std::int64_t>());
  }
  return out;
}

// Breakdown bucket for Fig.-5-style matrices: homogeneous plans map to their
// (kind, span); heterogeneous ones to ("mixed", 0); no edits to ("clean", 0).
inline std::pair<std::string, std::int64_t> edit_bucket(const Record& rec) {
  if (!has_edit_meta(rec) || rec.meta["edits"].empty()) return {"clean", 0};
  std::string kind;
  std::int64_t span = -1;
  for (const auto& op : rec.meta["edits"]) {
    const auto k = op.at("kind").get<std::string>();
    const auto s = op.at("span").get<std::int64_t>();
    if (kind.empty()) {
      kind = k;
      span = s;
    } else {
      if (k != kind) return {"mixed", 0};
      if (s != span) span = 0;
    }
  }
  return {kind, span};
}

}  // namespace patmark
