#include "codesift/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "codesift/errors.hpp"

namespace codesift {

using nlohmann::json;

std::string_view to_string(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::jsonl_humaneval: return "jsonl_humaneval";
    case DatasetFormat::jsonl_generic: return "jsonl_generic";
    case DatasetFormat::csv_prompts: return "csv_prompts";
  }
  return "?";
}

DatasetFormat parse_dataset_format(std::string_view tag) {
  if (tag == "jsonl_humaneval") return DatasetFormat::jsonl_humaneval;
  if (tag == "jsonl_generic") return DatasetFormat::jsonl_generic;
  if (tag == "csv_prompts") return DatasetFormat::csv_prompts;
  throw InvalidValueError("unknown dataset format '" + std::string(tag) + "'");
}

Prompt DatasetRecord::to_prompt() const {
  Prompt p;
  p.id = task_id;
  p.language = language;
  p.text = prompt;
  p.dataset = source_dataset;
  p.entry_point = entry_point;
  return p;
}

std::vector<std::pair<int, std::vector<std::string>>> parse_csv(std::string_view text) {
  std::vector<std::pair<int, std::vector<std::string>>> out;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool in_record = false;
  int line = 1;
  int record_line = 1;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    out.emplace_back(record_line, std::move(row));
    row.clear();
    in_record = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (!in_record) {
      record_line = line;
      in_record = true;
    }
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      continue;
    } else if (c == '\n') {
      end_record();
      ++line;
    } else {
      field += c;
    }
  }
  if (quoted) throw MalformedRecord("line " + std::to_string(record_line) + ": unterminated quote");
  if (in_record) end_record();
  return out;
}

namespace {

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

[[noreturn]] void malformed(const std::string& path, int line, const std::string& why) {
  throw MalformedRecord(path + ":" + std::to_string(line) + ": " + why);
}

std::string string_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long>());
  throw std::invalid_argument(std::string("field '") + key + "' is not a string");
}

DatasetRecord from_json(const json& j, DatasetFormat format, Language default_language,
                        const std::string& default_dataset) {
  DatasetRecord r;
  r.language = default_language;
  r.source_dataset = default_dataset;
  if (!j.is_object()) throw std::invalid_argument("record is not an object");
  if (!j.contains("prompt")) throw std::invalid_argument("missing \"prompt\"");
  r.prompt = string_field(j, "prompt");
  if (j.contains("task_id")) {
    r.task_id = string_field(j, "task_id");
  } else if (format == DatasetFormat::jsonl_generic && j.contains("id")) {
    r.task_id = string_field(j, "id");
  } else {
    throw std::invalid_argument("missing \"task_id\"");
  }
  if (j.contains("entry_point") && j["entry_point"].is_string()) {
    r.entry_point = j["entry_point"].get<std::string>();
  }
  if (format == DatasetFormat::jsonl_generic) {
    if (j.contains("language")) r.language = parse_language(j["language"].get<std::string>());
    if (j.contains("dataset")) r.source_dataset = j["dataset"].get<std::string>();
  }
  return r;
}

}  // namespace

std::vector<DatasetRecord> load_dataset(const std::string& path, DatasetFormat format,
                                        Language default_language) {
  const std::string content = read_all(path);
  const std::string stem = std::filesystem::path(path).stem().string();
  std::vector<DatasetRecord> out;
  std::vector<int> lines;

  if (format == DatasetFormat::csv_prompts) {
    auto rows = parse_csv(content);
    if (rows.empty()) return out;
    const auto& header = rows.front().second;
    auto col = [&](const std::string& name) -> std::optional<std::size_t> {
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
      }
      return std::nullopt;
    };
    const auto id_col = col("task_id");
    const auto prompt_col = col("prompt");
    if (!id_col || !prompt_col) malformed(path, 1, "header must name task_id and prompt");
    const auto lang_col = col("language");
    const auto entry_col = col("entry_point");
    const auto dataset_col = col("dataset");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& [line, row] = rows[i];
      if (row.size() == 1 && row[0].empty()) continue;
      if (row.size() != header.size()) {
        malformed(path, line,
                  "expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(row.size()));
      }
      DatasetRecord r;
      r.task_id = row[*id_col];
      r.prompt = row[*prompt_col];
      r.language = default_language;
      r.source_dataset = stem;
      try {
        if (lang_col && !row[*lang_col].empty()) r.language = parse_language(row[*lang_col]);
      } catch (const Error& e) {
        malformed(path, line, e.what());
      }
      if (entry_col && !row[*entry_col].empty()) r.entry_point = row[*entry_col];
      if (dataset_col && !row[*dataset_col].empty()) r.source_dataset = row[*dataset_col];
      if (r.task_id.empty()) malformed(path, line, "empty task_id");
      out.push_back(std::move(r));
      lines.push_back(line);
    }
  } else {
    std::istringstream in(content);
    std::string text;
    int line = 0;
    while (std::getline(in, text)) {
      ++line;
      if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        out.push_back(from_json(json::parse(text), format, default_language, stem));
      } catch (const json::exception& e) {
        malformed(path, line, e.what());
      } catch (const std::invalid_argument& e) {
        malformed(path, line, e.what());
      } catch (const InvalidValueError& e) {
        malformed(path, line, e.what());
      }
      lines.push_back(line);
    }
  }

  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!seen.emplace(out[i].source_dataset, out[i].task_id).second) {
      malformed(path, lines[i], "duplicate task_id '" + out[i].task_id + "'");
    }
  }
  return out;
}

}  // namespace codesift
