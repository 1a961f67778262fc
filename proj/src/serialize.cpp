#include "profilest/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace profilest {

std::string format_decimal(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

nlohmann::ordered_json json_number(double value) {
  if (!std::isfinite(value)) return format_decimal(value);
  const double rounded = std::strtod(format_decimal(value).c_str(), nullptr);
  return rounded == 0.0 ? 0.0 : rounded;  // no "-0.0"
}

nlohmann::ordered_json to_json(const BoundsReport& report) {
  nlohmann::ordered_json j;
  if (report.support_upper) {
    j["support_upper"] = *report.support_upper;
  } else {
    j["support_upper"] = "inf";
  }
  j["support_lower"] = json_number(report.support_lower);
  j["continuous_cap"] = json_number(report.continuous_cap.value());
  j["discrete_forced"] = report.discrete_forced;
  j["distinct_values_cap"] = report.distinct_values_cap;
  j["k_equals_m"] = report.k_equals_m;
  j["s_exceeds_m"] = report.s_exceeds_m;
  return j;
}

nlohmann::ordered_json to_json(const PmlResult& result) {
  nlohmann::ordered_json j;
  auto atoms = nlohmann::ordered_json::array();
  for (double a : result.distribution.atoms()) atoms.push_back(json_number(a));
  j["atoms"] = std::move(atoms);
  j["q"] = json_number(result.distribution.continuous_mass());
  j["probability"] = json_number(result.probability);
  j["log_probability"] = json_number(result.log_probability / std::log(2.0));  // bits
  j["method"] = to_string(result.method);
  j["k"] = result.distribution.discrete_size();
  j["certificates"] = to_json(result.certificates);
  j["converged"] = result.converged;
  return j;
}

std::string to_tsv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "n\tk_hat\tq_hat\tD_bits\tl1\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + '\t' + std::to_string(r.k_hat) + '\t' +
           format_decimal(r.q_hat) + '\t' + format_decimal(r.kl_bits) + '\t' +
           format_decimal(r.l1) + '\n';
  }
  return out;
}

}  // namespace profilest
