#include "shiftmod/report.hpp"

#include <algorithm>
#include <cmath>

namespace shiftmod {

const CheckRecord& StageReport::add(std::string name, double residual, double tol, std::string detail) {
  checks.push_back({std::move(name), residual, tol, residual <= tol, std::move(detail)});
  return checks.back();
}

const CheckRecord& StageReport::fail(std::string name, std::string detail) {
  checks.push_back({std::move(name), std::numeric_limits<double>::infinity(), 0.0, false, std::move(detail)});
  return checks.back();
}

bool StageReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

const CheckRecord* StageReport::find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

nlohmann::json to_json(const CheckRecord& check) {
  nlohmann::json j;
  j["name"] = check.name;
  // Non-finite residuals have no JSON number; they are written as null.
  if (std::isfinite(check.residual)) {
    j["residual"] = check.residual;
  } else {
    j["residual"] = nullptr;
  }
  j["tol"] = check.tol;
  j["pass"] = check.pass;
  if (!check.detail.empty()) j["detail"] = check.detail;
  return j;
}

nlohmann::json to_json(const StageReport& stage) {
  nlohmann::json j;
  j["stage"] = stage.stage;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : stage.checks) j["checks"].push_back(to_json(c));
  if (!stage.data.empty()) j["data"] = stage.data;
  j["pass"] = stage.passed();
  return j;
}

}  // namespace shiftmod
