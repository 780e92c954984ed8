#pragma once

// Randomized identity suites for the module and grid layers.

#include "shiftmod/grid.hpp"
#include "shiftmod/report.hpp"

namespace shiftmod {

// Inner-product axioms, Cauchy-Schwarz, positivity, adjoint pairing and
// involution, and range_frame idempotence on `samples` random inputs.
StageReport algebra_suite(const AlgebraSignature& sig, int rank, int samples, Rng& rng, double tol);

// Shift isometry and semigroup law, adjoint pairing and propagation for each
// grid operator family, and pureness of the standard shift by support.
StageReport grid_suite(const SpecPtr& spec, std::int64_t horizon_units, int samples, Rng& rng, double tol);

}  // namespace shiftmod
