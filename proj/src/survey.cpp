#include "maltopic/survey.hpp"

#include "maltopic/error.hpp"
#include "maltopic/text.hpp"

#include <set>
#include <sstream>
#include <unordered_map>

namespace maltopic {

namespace {

struct Row {
  std::size_t line = 0;  // 1-based line where the row starts
  std::vector<std::string> fields;
};

std::vector<Row> read_rows(std::string_view text, char delimiter) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // the current row has content
  std::size_t line = 1;
  row.line = 1;

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    if (field_started || !row.fields.empty()) {
      end_field();
      rows.push_back(std::move(row));
    }
    row = Row{};
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (!field_started && row.fields.empty()) row.line = line;
    if (c == '"' && field.empty()) {
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      field_started = true;
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      continue;
    } else if (c == '\n') {
      end_row();
      ++line;
    } else {
      field_started = true;
      field.push_back(c);
    }
  }
  if (in_quotes) {
    throw Error(ErrorKind::malformed_row, "unterminated quoted field starting on line " + std::to_string(row.line));
  }
  end_row();
  return rows;
}

bool needs_quotes(std::string_view value, char delimiter) {
  return value.find_first_of(std::string{'"', '\n', '\r', delimiter}) != std::string_view::npos;
}

void write_field(std::ostringstream& out, std::string_view value, char delimiter) {
  if (!needs_quotes(value, delimiter)) {
    out << value;
    return;
  }
  out << '"';
  for (const char c : value) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

const std::string& SurveyRecord::value(const std::string& field) const {
  const auto it = values.find(field);
  if (it == values.end()) {
    throw Error(ErrorKind::unknown_field, "record " + record_id + " has no field '" + field + "'");
  }
  return it->second;
}

const FieldSchema* SurveyDataset::field(std::string_view name) const noexcept {
  for (const auto& f : schema) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::vector<std::vector<std::string>> parse_delimited(std::string_view contents, char delimiter) {
  std::vector<std::vector<std::string>> out;
  for (auto& row : read_rows(contents, delimiter)) out.push_back(std::move(row.fields));
  return out;
}

SurveyDataset parse_dataset(std::string_view contents, const std::vector<FieldSchema>& schema,
                            const CsvOptions& options, std::string_view source) {
  const std::string where(source);
  auto rows = read_rows(contents, options.delimiter);
  if (rows.empty()) throw Error(ErrorKind::malformed_row, where + ": missing header row");

  const auto& header = rows.front().fields;
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!column.emplace(header[i], i).second) {
      throw Error(ErrorKind::malformed_row, where + ": duplicate header column '" + header[i] + "'");
    }
  }
  for (const auto& f : schema) {
    if (!column.contains(f.name)) {
      throw Error(ErrorKind::missing_column, where + ": schema field '" + f.name + "' not in header");
    }
  }
  const auto id_it = column.find(options.id_column);
  const bool has_id = !options.id_column.empty() && id_it != column.end();

  SurveyDataset dataset;
  dataset.schema = schema;
  dataset.records.reserve(rows.size() - 1);
  std::set<std::string, std::less<>> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.size()) {
      throw Error(ErrorKind::malformed_row, where + ": line " + std::to_string(row.line) + " has " +
                                                std::to_string(row.fields.size()) + " fields, header has " +
                                                std::to_string(header.size()));
    }
    SurveyRecord record;
    record.record_id = has_id ? row.fields[id_it->second] : std::to_string(r - 1);
    if (record.record_id.empty()) {
      throw Error(ErrorKind::malformed_row, where + ": line " + std::to_string(row.line) + " has an empty id");
    }
    if (!seen.insert(record.record_id).second) {
      throw Error(ErrorKind::duplicate_id,
                  where + ": line " + std::to_string(row.line) + " repeats id '" + record.record_id + "'");
    }
    for (const auto& f : schema) record.values.emplace(f.name, row.fields[column.at(f.name)]);
    dataset.records.push_back(std::move(record));
  }
  return dataset;
}

SurveyDataset load_dataset(const std::filesystem::path& path, const std::vector<FieldSchema>& schema,
                           const CsvOptions& options) {
  return parse_dataset(read_file(path), schema, options, path.string());
}

std::vector<std::string> read_header(const std::filesystem::path& path, const CsvOptions& options) {
  auto rows = read_rows(read_file(path), options.delimiter);
  if (rows.empty()) throw Error(ErrorKind::malformed_row, path.string() + ": missing header row");
  return rows.front().fields;
}

std::string serialize_dataset(const SurveyDataset& dataset, const CsvOptions& options) {
  const char d = options.delimiter;
  const bool id_in_schema = dataset.field(options.id_column) != nullptr;
  std::ostringstream out;
  bool first = true;
  auto sep = [&] {
    if (!first) out << d;
    first = false;
  };
  if (!id_in_schema) {
    sep();
    write_field(out, options.id_column, d);
  }
  for (const auto& f : dataset.schema) {
    sep();
    write_field(out, f.name, d);
  }
  out << '\n';
  for (const auto& record : dataset.records) {
    first = true;
    if (!id_in_schema) {
      sep();
      write_field(out, record.record_id, d);
    }
    for (const auto& f : dataset.schema) {
      sep();
      const auto it = record.values.find(f.name);
      write_field(out, it == record.values.end() ? std::string_view{} : std::string_view{it->second}, d);
    }
    out << '\n';
  }
  return out.str();
}

void save_dataset(const SurveyDataset& dataset, const std::filesystem::path& path, const CsvOptions& options) {
  write_file_atomic(path, serialize_dataset(dataset, options));
}

std::vector<ValidationIssue> validate_dataset(const SurveyDataset& dataset) {
  std::vector<ValidationIssue> issues;
  std::set<std::string, std::less<>> names;
  for (const auto& f : dataset.schema) {
    if (f.name.empty()) {
      issues.push_back({IssueKind::empty_field_name, {}, f.name, "schema field with empty name"});
    } else if (!names.insert(f.name).second) {
      issues.push_back({IssueKind::duplicate_field_name, {}, f.name, "schema field '" + f.name + "' declared twice"});
    }
  }
  std::set<std::string, std::less<>> ids;
  for (const auto& record : dataset.records) {
    if (!ids.insert(record.record_id).second) {
      issues.push_back({IssueKind::duplicate_id, record.record_id, {}, "record id '" + record.record_id + "' repeated"});
    }
    for (const auto& name : names) {
      if (!record.values.contains(name)) {
        issues.push_back({IssueKind::missing_field, record.record_id, name,
                          "record " + record.record_id + " lacks field '" + name + "'"});
      }
    }
    for (const auto& [name, value] : record.values) {
      if (!names.contains(name)) {
        issues.push_back({IssueKind::unknown_field, record.record_id, name,
                          "record " + record.record_id + " has undeclared field '" + name + "'"});
      }
    }
  }
  return issues;
}

}  // namespace maltopic
