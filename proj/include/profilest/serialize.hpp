#pragma once

// JSON and TSV renderings used by the command-line tool. Numbers are
// rounded to 12 significant digits so output is stable across runs and
// diffable.

#include <string>
#include <vector>

#include <json.hpp>

#include "profilest/bounds.hpp"
#include "profilest/estimators.hpp"
#include "profilest/pml_exact.hpp"

namespace profilest {

// "%.12g"; "inf"/"-inf" for infinities.
std::string format_decimal(double value);

// Value rounded to 12 significant digits, or the string "inf"/"-inf".
nlohmann::ordered_json json_number(double value);

nlohmann::ordered_json to_json(const BoundsReport& report);
nlohmann::ordered_json to_json(const PmlResult& result);

// Header "n\tk_hat\tq_hat\tD_bits\tl1" followed by one line per row.
std::string to_tsv(const std::vector<ConvergenceRow>& rows);

}  // namespace profilest
