#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace maltopic {

enum class FieldKind { free_text, structured };

struct FieldSchema {
  std::string name;
  FieldKind kind = FieldKind::structured;
  std::optional<std::string> description;
};

using RecordId = std::string;

struct SurveyRecord {
  RecordId record_id;
  std::map<std::string, std::string> values;

  /// Throws Error(unknown_field) when `field` is absent.
  [[nodiscard]] const std::string& value(const std::string& field) const;
};

struct SurveyDataset {
  std::vector<FieldSchema> schema;
  std::vector<SurveyRecord> records;

  [[nodiscard]] std::size_t size() const noexcept { return records.size(); }
  [[nodiscard]] const FieldSchema* field(std::string_view name) const noexcept;
};

struct CsvOptions {
  char delimiter = ',';
  /// Column holding record ids; when absent from the header, ids are the
  /// 0-based data row index.
  std::string id_column = "id";
};

/// Loads a delimited UTF-8 file with a header row. Header names are matched
/// to schema names exactly; columns outside the schema (other than the id
/// column) are ignored.
SurveyDataset load_dataset(const std::filesystem::path& path,
                           const std::vector<FieldSchema>& schema,
                           const CsvOptions& options = {});

/// Same as load_dataset but parses from an in-memory buffer. `source` only
/// labels diagnostics.
SurveyDataset parse_dataset(std::string_view contents,
                            const std::vector<FieldSchema>& schema,
                            const CsvOptions& options = {},
                            std::string_view source = "<memory>");

/// Header of a delimited file, in column order.
std::vector<std::string> read_header(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes an `id` column followed by schema fields in schema order, quoting
/// only where needed.
std::string serialize_dataset(const SurveyDataset& dataset, const CsvOptions& options = {});
void save_dataset(const SurveyDataset& dataset, const std::filesystem::path& path,
                  const CsvOptions& options = {});

enum class IssueKind { empty_field_name, duplicate_field_name, missing_field, unknown_field, duplicate_id };

struct ValidationIssue {
  IssueKind kind;
  RecordId record_id;  // empty for schema-level issues
  std::string field;
  std::string message;
};

std::vector<ValidationIssue> validate_dataset(const SurveyDataset& dataset);

/// Low-level RFC-4180 style reader. Quoted fields may span lines; a doubled
/// quote inside quotes is a literal quote. Throws Error(malformed_row) on an
/// unterminated quote.
std::vector<std::vector<std::string>> parse_delimited(std::string_view contents, char delimiter);

}  // namespace maltopic
