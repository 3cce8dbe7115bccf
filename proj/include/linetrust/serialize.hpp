#pragma once

#include <string>

#include <json.hpp>

#include "linetrust/pdg.hpp"

namespace linetrust {

using Json = nlohmann::ordered_json;

// Major.minor written into every artifact. Readers accept any minor of the
// same major and reject everything else.
inline constexpr const char* kSchemaVersion = "1.0";

void check_schema_version(const Json& doc, const std::string& what);

// Canonical serialization; see schema/pdg.schema.json. Nodes ascend by line,
// edges by (src, dst, kind, var).
Json pdg_to_json(const Pdg& pdg);
Pdg pdg_from_json(const Json& doc);

Json explanation_to_json(const Explanation& expl);
Explanation explanation_from_json(const Json& doc);

// Accepts either [{"line": l, "score": s}, ...] or [[l, s], ...].
std::vector<ExplanationEntry> explanation_entries_from_json(const Json& entries);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace linetrust
