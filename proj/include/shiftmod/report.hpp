#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace shiftmod {

struct CheckRecord {
  std::string name;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string detail;
};

// Checks of one pipeline stage plus free-form data (recovered structures,
// tables). A check passes iff residual <= tol; NaN never passes.
struct StageReport {
  std::string stage;
  std::vector<CheckRecord> checks;
  nlohmann::json data = nlohmann::json::object();

  const CheckRecord& add(std::string name, double residual, double tol, std::string detail = {});
  // A check that could not be evaluated at all, e.g. because the stage threw.
  const CheckRecord& fail(std::string name, std::string detail);

  bool passed() const;
  const CheckRecord* find(std::string_view name) const;
};

// Running maximum that remembers which sample produced it.
struct WorstCase {
  double value = 0.0;
  std::string where;

  void update(double residual, const std::string& label) {
    if (!(residual <= value)) {
      value = residual;
      where = label;
    }
  }
};

nlohmann::json to_json(const CheckRecord& check);
nlohmann::json to_json(const StageReport& stage);

}  // namespace shiftmod
