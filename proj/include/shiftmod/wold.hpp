#pragma once

// Discrete-time decomposition of a single adjointable isometry S into its
// unitary part E_u and pure part E_p, evaluated on finite probe windows.
//
// r_n = S^n (S^dagger)^n decreases in n. On a probe x the sequence r_n x is
// followed until it stops moving; its limit spans the E_u part of the probe
// span and the differences x - r_n x span the E_p part.

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "shiftmod/grid.hpp"
#include "shiftmod/report.hpp"

namespace shiftmod {

// An isometry on a grid space together with its space.
struct Isometry {
  SpecPtr space;
  GridOperator step;
};

struct UnitaryBlock {
  ModuleOperator unitary;
};

struct ShiftBlock {
  int rank = 1;
};

using IsometryBlock = std::variant<UnitaryBlock, ShiftBlock>;

struct DisguiseSpec {
  std::int64_t window = 1;
  std::uint64_t seed = 0;
};

// Direct sum of unitary blocks (finite modules B^r, carried at slot 0) and
// unilateral shifts over B^r, realized on one unilateral grid with one slot
// per unit. Fiber coordinates are assigned to blocks in order. The optional
// disguise conjugates S by a random unitary V mixing slots [0, window).
class StructuredIsometry {
 public:
  StructuredIsometry(AlgebraSignature signature, std::vector<IsometryBlock> blocks,
                     std::optional<DisguiseSpec> disguise = std::nullopt);

  const SpecPtr& space() const { return space_; }
  const GridOperator& step() const { return step_; }
  const GridOperator& disguise_unitary() const { return v_; }
  Isometry isometry() const { return {space_, step_}; }
  const std::vector<IsometryBlock>& blocks() const { return blocks_; }

  const std::vector<int>& unitary_coordinates() const { return unitary_coords_; }
  const std::vector<int>& shift_coordinates() const { return shift_coords_; }

  // Undisguised basis of the probe span: unitary coordinates at slot 0, then
  // shift coordinates at slots [0, window). The first unitary_basis_size()
  // elements are the unitary ones.
  std::vector<GridVector> basis(std::int64_t window) const;
  std::size_t unitary_basis_size() const { return unitary_coords_.size(); }
  // V applied to basis(window).
  std::vector<GridVector> probes(std::int64_t window) const;

  // Complex dimension, per algebra block, of the unitary part.
  std::vector<int> unitary_block_dims() const;

  // Block indicators of the undisguised model restricted to basis(window).
  GridOperator unitary_indicator() const;
  GridOperator shift_indicator(std::int64_t window) const;

 private:
  AlgebraSignature signature_;
  std::vector<IsometryBlock> blocks_;
  std::vector<int> unitary_coords_;
  std::vector<int> shift_coords_;
  SpecPtr space_;
  GridOperator step_;
  GridOperator v_;
};

// r_n = S^n (S^dagger)^n for n = 0..n_max.
std::vector<GridOperator> range_projections(const Isometry& s, int n_max);
// Worst violation of <x, r_n x> >= <x, r_{n+1} x> over probes, as the most
// negative eigenvalue of the difference (0 if monotone).
double monotonicity_violation(const std::vector<GridOperator>& r, const std::vector<GridVector>& probes);

struct DecompositionResult {
  GridOperator unitary_projection;
  GridOperator pure_projection;
  std::vector<GridVector> unitary_frame;
  std::vector<GridVector> pure_frame;
  std::vector<int> unitary_dims;
  std::vector<int> pure_dims;
  int stabilization_step = 0;
  // max over probes of ||r_{n+1} x - r_n x|| at each n examined.
  std::vector<double> trace;
  double residual = 0.0;
  StageReport report;
};

// Throws DiagnosticError (with the trace) when r_n x has not stabilized by n_max.
DecompositionResult decompose(const Isometry& s, const std::vector<GridVector>& probes, int n_max, double tol,
                              double rank_tol = 1e-8);
DecompositionResult decompose(const StructuredIsometry& s, std::int64_t window, int n_max, double tol,
                              double rank_tol = 1e-8);

// V^dagger P V against the block indicators on basis(window) for both projections.
StageReport verify_against_blocks(const StructuredIsometry& s, const DecompositionResult& d, std::int64_t window,
                                  double tol);

struct PurenessRow {
  std::vector<double> decay;  // ||(S^dagger)^n x|| for n = 0..n_max
  double final_value = 0.0;
  bool pure = false;
};

std::vector<PurenessRow> pureness_metric(const Isometry& s, const std::vector<GridVector>& probes, int n_max,
                                         double tol);

}  // namespace shiftmod
