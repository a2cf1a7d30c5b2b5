#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace maltopic {

using StopwordSet = std::set<std::string, std::less<>>;

/// Lowercases ASCII letters, replaces ASCII punctuation with spaces and
/// collapses runs of whitespace to a single space (no leading/trailing space).
/// Bytes >= 0x80 pass through untouched so UTF-8 text survives.
std::string normalize_text(std::string_view text);

std::vector<std::string> split_whitespace(std::string_view text);

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

/// Lowercased, trimmed, inner whitespace collapsed. Used for case-insensitive
/// identity of topic names and words.
std::string normalize_key(std::string_view text);

bool is_blank(std::string_view text) noexcept;

/// A general-purpose English stopword list.
const StopwordSet& default_stopwords();

/// One stopword per line; blank lines and lines starting with '#' ignored.
StopwordSet load_stopwords(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace maltopic
