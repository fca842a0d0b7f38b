#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace codesift {

enum class Language { python, java };

std::string_view to_string(Language lang);
// Throws InvalidValueError for anything but "python" / "java".
Language parse_language(std::string_view tag);

struct Prompt {
  std::string id;
  Language language = Language::python;
  std::string text;  // verbatim, e.g. signature + docstring
  std::string dataset;
  std::optional<std::string> entry_point;

  void validate() const;
};

struct CodeSuggestion {
  std::string prompt_id;
  int position = 1;  // 1-based backend order
  std::string text;
  Language language = Language::python;
};

enum class Severity { info, warning, error };

std::string_view to_string(Severity s);
Severity parse_severity(std::string_view tag);

struct Finding {
  std::string rule_id;
  std::string message;
  std::optional<int> line_start;
  std::optional<int> line_end;
  Severity severity = Severity::warning;
  std::string source;

  void validate() const;
  bool operator==(const Finding&) const = default;
};

// Provenance of an inventory produced by a repair round: the flawed top-1
// code and the findings the repair prompt addressed.
struct RepairOrigin {
  std::string original_code;
  std::vector<Finding> findings;
  std::string repair_prompt;
};

struct SuggestionInventory {
  Prompt prompt;
  std::vector<CodeSuggestion> suggestions;
  // Present for repair-round inventories; the filter then splices each
  // completion into original_code (H7) before the regular heuristics.
  std::optional<RepairOrigin> repair;

  std::size_t n() const { return suggestions.size(); }
  // Positions must be exactly 1..n in order.
  void validate() const;
};

// Builds an inventory with positions 1..n in the order given.
SuggestionInventory make_inventory(const Prompt& prompt,
                                   const std::vector<std::string>& texts);

struct QualityFactor {
  std::string factor_id;
  double weight = 0.0;
};

class QualityScheme {
 public:
  const std::vector<QualityFactor>& factors() const { return factors_; }
  std::size_t m() const { return factors_.size(); }

  // The single-factor scheme of the binary evaluation: {smell_free: 1.0}.
  static QualityScheme binary();

 private:
  friend QualityScheme validate_scheme(
      const std::vector<std::pair<std::string, double>>& raw);
  std::vector<QualityFactor> factors_;
};

inline constexpr double kWeightSumTolerance = 1e-9;

QualityScheme validate_scheme(
    const std::vector<std::pair<std::string, double>>& raw);

enum class RepairStructure { P1, P2, P3 };

std::string_view to_string(RepairStructure s);
RepairStructure parse_structure(std::string_view tag);

struct RepairPolicy {
  double tau = 1.0;
  RepairStructure structure = RepairStructure::P1;
  static constexpr int max_attempts = 1;

  void validate() const;
};

struct RelevanceVector {
  std::vector<int> labels;  // each in 0..3

  std::size_t k() const { return labels.size(); }
  void validate() const;
};

}  // namespace codesift
