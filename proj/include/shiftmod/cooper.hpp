#pragma once

// Reconstruction of a pure isometry semigroup as the standard right shift.
//
// Given only S.at(t) (with adjoints) the engine builds the interval
// projections p_{a,b} = s_a s_a^dagger - s_b s_b^dagger, the cyclic window
// groups u^{a,b}, their means q_{a,b}, extracts the multiplicity module
// F = q_{0,1} E and assembles the unitary M : L^2([0, K), F) -> E_{0,K}.
// Every intermediate identity is measured and returned as a StageReport.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shiftmod/grid.hpp"
#include "shiftmod/report.hpp"

namespace shiftmod {

// A check that the inputs fail so badly the stage cannot produce a result.
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AbstractSemigroup {
  SpecPtr space;
  std::function<GridOperator(GridTime)> at;
  bool declared_pure = true;
  std::string label;
};

AbstractSemigroup standard_shift_semigroup(const SpecPtr& space);
// t -> V S_t V^dagger for a unitary V.
AbstractSemigroup disguise(const AbstractSemigroup& s, const GridOperator& v);
// Haar-type random unitary mixing all slots of [0, window_units) and all
// fiber coordinates; identity elsewhere.
GridOperator random_window_unitary(const SpecPtr& space, std::int64_t window_units, Rng& rng);

// Negative control: a standard shift on fiber coordinates [0, shift_rank)
// next to a bilateral unitary shift on [shift_rank, shift_rank + unitary_rank).
// The space is a bilateral grid whose shift coordinates vanish below slot 0.
AbstractSemigroup nonpure_semigroup(int slots_per_unit, const AlgebraSignature& signature, int shift_rank,
                                    int unitary_rank);

struct IntervalProjection {
  GridTime a;
  TimeBound b;
  GridOperator op;
};

// p_{a,b}; zero when a >= b and s_a s_a^dagger when b is infinite. With
// probes, the adjoint pairing of s_a and s_b is checked first and a
// DiagnosticError is thrown beyond tol.
IntervalProjection interval_projection(const AbstractSemigroup& s, GridTime a, TimeBound b,
                                       const std::vector<GridVector>* pairing_probes = nullptr,
                                       double tol = 1e-10);

// at(0) = id, semigroup law, isometry and adjoint pairing on sampled times.
StageReport verify_semigroup(const AbstractSemigroup& s, const std::vector<GridVector>& probes,
                             std::int64_t max_slots, int samples, Rng& rng, double tol);

// The product rule, its infinite-end variant, the four shift/projection
// commutations, and the restriction of s_t to a unitary E_{a,b} -> E_{a+t,b+t}.
StageReport verify_pab_calculus(const AbstractSemigroup& s, const std::vector<GridVector>& probes,
                                std::int64_t max_slots, int samples, Rng& rng, double tol);

struct WindowGroup {
  GridTime a;
  GridTime b;
  // u_t = s_t p_{a,b-t} + s_{L-t}^dagger p_{b-t,b}, periodic in t with period L = b - a.
  std::function<GridOperator(std::int64_t)> at;
  // The equivalent form p_{a+t,b} s_t + p_{a,a+t} s_{L-t}^dagger.
  std::function<GridOperator(std::int64_t)> at_alternate;
  std::int64_t period() const { return b.slots - a.slots; }
};

WindowGroup window_group(const AbstractSemigroup& s, GridTime a, GridTime b);

// Exhaustive over r, t in [0, L): group law, split by the branch r + t < L
// or r + t >= L; unitarity on E_{a,b}; u_0 = p_{a,b}; both forms agree.
StageReport verify_window_group(const AbstractSemigroup& s, GridTime a, GridTime b,
                                const std::vector<GridVector>& probes, double tol);

// q_{a,b}: exact mean of u^{a,b}_t over the L grid shifts of one period.
GridOperator averaging_projection(const AbstractSemigroup& s, GridTime a, GridTime b);

// q^2 = q, q^dagger = q, p q = q p = q, u_r q = q and fixed points on
// window-constant vectors.
StageReport verify_averaging(const AbstractSemigroup& s, GridTime a, GridTime b,
                             const std::vector<GridVector>& probes, double tol);

struct NestedIntervals {
  GridTime a, b, c, d;
};

// p_{c,d} q_{a,b} p_{c,d} = ((d - c) / (b - a)) q_{c,d} for a <= c < d <= b.
StageReport verify_ratio(const AbstractSemigroup& s, const std::vector<NestedIntervals>& tuples,
                         const std::vector<GridVector>& probes, double tol);
std::vector<NestedIntervals> random_nested_intervals(const GridSpec& spec, std::int64_t units, int count, Rng& rng);

struct ConvergenceRow {
  int n = 0;
  double residual = 0.0;
  // sup over t <= 1/n of ||s_t x - x|| + ||s_t^dagger x - x||.
  double witness = 0.0;
};

// r_n = || sum_k q_{(k-1)/n, k/n} x - x || for each n, which must divide the
// slots per unit. x must lie in E_{0,1}.
std::vector<ConvergenceRow> limit_convergence(const AbstractSemigroup& s, const GridVector& x,
                                              const std::vector<int>& n_values, double tol = 1e-10);
StageReport verify_limit(const std::vector<ConvergenceRow>& rows, double tol);

// On z, w from q_{0,1} E: s_r p_{0,1-r} z = p_{r,1} s_r z = p_{r,1} u^{0,1}_r z = p_{r,1} z, s_r q_{a,b} = q_{a+r,b+r} s_r,
// additivity of p_{0,t} z and <p_{c1,d1} z, p_{c2,d2} w> = |overlap| <z, w>.
StageReport verify_q_relations(const AbstractSemigroup& s, const std::vector<GridVector>& z,
                               const std::vector<GridVector>& w, const std::vector<GridVector>& probes,
                               int samples, Rng& rng, std::int64_t max_slots, double tol);

struct MultiplicityModule {
  std::vector<GridVector> frame;
  ModuleOperator gram;
  std::vector<int> block_dims;
  double span_residual = 0.0;
  // max over probes of ||S.at(T)^dagger x|| / ||x||, T the probe window.
  double pureness_residual = 0.0;
  // max over frame elements and r of ||u^{0,1}_r f - f||.
  double invariance_residual = 0.0;
};

// Applies q_{0,1} to delta_j (x) e_k for slots j in [0, probe_slots) and
// reduces the images with range_frame.
MultiplicityModule extract_multiplicity(const AbstractSemigroup& s, std::int64_t probe_slots,
                                        double rank_tol = 1e-8);

struct EquivalenceMap {
  // Unilateral grid over F: slots per unit of the semigroup, fiber rank the
  // frame size, fiber projection the frame Gram.
  SpecPtr source;
  std::int64_t horizon_units = 0;
  std::function<GridVector(const GridVector&)> forward;
  std::function<GridVector(const GridVector&)> backward;
};

// M(1_[j h, (j+1) h) z) = S.at(k) p_{j', j'+1} z for j = k N + j' on [0, K).
EquivalenceMap build_equivalence(const AbstractSemigroup& s, const MultiplicityModule& f, std::int64_t horizon);

struct EquivalenceChecks {
  int pairs = 20;
  int times = 10;
  double tol = 1e-10;
  double surjectivity_tol = 1e-8;
};

// Isometry (B-valued), forward/backward inverse, M maps 1_[0,1) z to z,
// surjectivity onto the probes of [0, K), M^dagger u^{0,1}_t = pi_t M^dagger
// and backward S_t forward = v_t.
StageReport verify_equivalence(const AbstractSemigroup& s, const MultiplicityModule& f, const EquivalenceMap& m,
                               const EquivalenceChecks& cfg, Rng& rng);

struct ReconstructConfig {
  std::int64_t horizon = 4;
  double tol = 1e-10;
  double surjectivity_tol = 1e-8;
  double rank_tol = 1e-8;
  int samples = 10;
  int probe_count = 4;
  std::uint64_t seed = 1;
  std::vector<int> limit_n = {1, 2, 4, 8};
};

struct EquivalenceReport {
  std::vector<StageReport> stages;
  std::optional<MultiplicityModule> fiber;
  std::optional<EquivalenceMap> map;
  bool passed() const;
};

EquivalenceReport reconstruct(const AbstractSemigroup& s, const ReconstructConfig& cfg);

}  // namespace shiftmod
