#pragma once

// JSON encoding of algebra, module and grid values, and fixture parsing.
//
//   complex          [re, im]
//   AlgebraElement   {"signature": [n_1, ...], "blocks": [matrix, ...]}
//   ModuleVector     {"signature", "rank", "entries": [blocks, ...]}
//   ModuleOperator   {"signature", "rows", "cols", "entries": [[blocks, ...], ...]}
//   GridSpec         {"slots_per_unit", "index_kind", "fiber": {"signature", "rank", "projection"?}}
//   GridVector       {"spec": GridSpec, "entries": [{"slot": j, "vector": ModuleVector}, ...]}
//
// A matrix is an array of rows of complex entries; `blocks` lists one matrix
// per algebra block. Decoding errors carry a JSON pointer to the bad value.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shiftmod/algebra.hpp"
#include "shiftmod/grid.hpp"
#include "shiftmod/wold.hpp"

namespace shiftmod {

using nlohmann::json;

// Malformed input: unreadable file, bad JSON, or a value of the wrong shape.
// `location` is "line:column" for syntax errors and a JSON pointer otherwise.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& message, std::string location)
      : std::runtime_error(location.empty() ? message : location + ": " + message),
        message_(message),
        location_(std::move(location)) {}
  const std::string& message() const { return message_; }
  const std::string& location() const { return location_; }

 private:
  std::string message_;
  std::string location_;
};

json to_json(Complex c);
json to_json(const AlgebraSignature& sig);
json to_json(const AlgebraElement& b);
json to_json(const ModuleVector& x);
json to_json(const ModuleOperator& t);
json to_json(const GridSpec& spec);
json to_json(const GridVector& f);

Complex complex_from_json(const json& j, const std::string& where = "");
AlgebraSignature signature_from_json(const json& j, const std::string& where = "");
AlgebraElement algebra_element_from_json(const json& j, const std::string& where = "");
ModuleVector module_vector_from_json(const json& j, const std::string& where = "");
ModuleOperator module_operator_from_json(const json& j, const std::string& where = "");
SpecPtr grid_spec_from_json(const json& j, const std::string& where = "");
GridVector grid_vector_from_json(const json& j, const std::string& where = "");

// Reads and parses a JSON file; syntax errors report line and column.
json read_json_file(const std::string& path);

// A semigroup on a unilateral grid: the standard shift over B^rank, optionally
// disguised, or the non-pure control with a bilateral unitary part adjoined.
struct SemigroupFixture {
  AlgebraSignature signature{{1}};
  int rank = 1;
  enum class Model { standard, nonpure } model = Model::standard;
  int unitary_rank = 1;
  std::optional<int> slots_per_unit;
  std::optional<std::int64_t> horizon;
  std::optional<std::int64_t> disguise_window;
  std::optional<std::uint64_t> disguise_seed;
};

// A block isometry for the decomposition command.
struct IsometryFixture {
  AlgebraSignature signature{{1}};
  std::vector<IsometryBlock> blocks;
  std::optional<DisguiseSpec> disguise;
  std::optional<std::int64_t> window;
  std::optional<int> n_max;
};

// {"kind": "semigroup", "signature", "rank", "model"?: "standard" | "nonpure",
//  "unitary_rank"?, "slots_per_unit"?, "horizon"?, "disguise"?: {"window_units", "seed"?}}
SemigroupFixture semigroup_fixture_from_json(const json& j);
// {"kind": "isometry", "signature", "blocks": [{"type": "unitary", "rank", "seed"} |
//  {"type": "unitary", "operator": ModuleOperator} | {"type": "shift", "rank"}],
//  "disguise"?: {"window", "seed"}, "window"?, "n_max"?}
// A unitary given by rank and seed is drawn with ModuleOperator::random_unitary.
IsometryFixture isometry_fixture_from_json(const json& j, std::optional<std::uint64_t> default_seed = std::nullopt);

json to_json(const SemigroupFixture& f);
json to_json(const IsometryFixture& f);

}  // namespace shiftmod
