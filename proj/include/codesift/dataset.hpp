#pragma once

#include <optional>
#include <string>
#include <vector>

#include "codesift/model.hpp"

namespace codesift {

enum class DatasetFormat { jsonl_humaneval, jsonl_generic, csv_prompts };

std::string_view to_string(DatasetFormat f);
DatasetFormat parse_dataset_format(std::string_view tag);

struct DatasetRecord {
  std::string task_id;
  std::string prompt;
  Language language = Language::python;
  std::optional<std::string> entry_point;
  std::string source_dataset;

  Prompt to_prompt() const;
};

// jsonl_humaneval reads task_id/prompt/entry_point. jsonl_generic also
// accepts "id", "language" and "dataset". csv_prompts expects a header row
// naming at least task_id and prompt. Records without a language take
// `default_language`; without a dataset name, the file stem.
// Throws IoError, MalformedRecord.
std::vector<DatasetRecord> load_dataset(const std::string& path, DatasetFormat format,
                                        Language default_language = Language::python);

// RFC 4180 records; quoted fields may span lines. Each record is paired with
// the 1-based line it starts on. Throws MalformedRecord on an unterminated quote.
std::vector<std::pair<int, std::vector<std::string>>> parse_csv(std::string_view text);

}  // namespace codesift
