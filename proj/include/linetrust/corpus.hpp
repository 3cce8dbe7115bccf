#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "linetrust/line_dataset.hpp"
#include "linetrust/pdg.hpp"
#include "linetrust/serialize.hpp"

namespace linetrust {

// One function of a JSONL corpus. Ingestion uses the first five fields,
// evaluation additionally needs an explanation and a confidence.
struct FunctionRecord {
  std::string function_id;
  std::string source;
  LineLabel label = LineLabel::NonVulnerable;
  std::optional<std::string> diff;
  std::optional<std::set<LineId>> vul_lines;
  std::optional<Explanation> explanation;
  std::optional<double> confidence;
  std::optional<Json> graph;  // raw dependence graph export, used instead of parsing
};

// `index` is 1-based and only used in error messages.
FunctionRecord function_record_from_json(const Json& doc, std::size_t index);
Json function_record_to_json(const FunctionRecord& rec);

// Blank lines are skipped. A malformed line throws Schema naming its record
// number.
std::vector<FunctionRecord> parse_corpus(const std::string& jsonl);
std::vector<FunctionRecord> read_corpus(const std::string& path);

// The vulnerable lines of a record: vul_lines when present, else derived
// from the diff. Empty for records with neither.
std::set<LineId> ground_truth_lines(const FunctionRecord& rec);

}  // namespace linetrust
