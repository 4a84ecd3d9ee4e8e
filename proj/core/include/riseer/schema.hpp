#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace riseer {

struct SchemaIssue {
  std::string path;  // JSON pointer into the document
  std::string message;
};

/// Validates against a JSON-Schema subset: type, properties, required,
/// additionalProperties, items, enum, const, minimum, maximum, minItems,
/// maxItems, pattern, anyOf and local "#/definitions/..." references.
std::vector<SchemaIssue> validate_schema(const nlohmann::json& schema, const nlohmann::json& doc);

/// Published schema by id, e.g. "riseer.clusters.v1". Throws Error{not_found}.
const nlohmann::json& published_schema(std::string_view id);
std::vector<std::string> published_schema_ids();

/// Validates doc against its published schema; throws Error{schema_violation}
/// listing the first few issues.
void require_valid(std::string_view id, const nlohmann::json& doc);

}  // namespace riseer
