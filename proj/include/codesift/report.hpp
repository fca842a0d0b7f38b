#pragma once

#include <string>
#include <vector>

#include "codesift/json_io.hpp"

namespace codesift {

// CSV tables with languages as row groups and one column per model. Reports
// sharing a model are merged. Cells with no data hold "-".
std::string compilability_table_csv(const std::vector<Json>& reports);
std::string ndcg_table_csv(const std::vector<Json>& reports);
std::string timing_table_csv(const std::vector<Json>& reports);

// Writes <prefix>table1.csv, <prefix>table2.csv and <prefix>table3.csv.
// Throws IoError.
void write_tables(const std::vector<Json>& reports, const std::string& prefix);

}  // namespace codesift
