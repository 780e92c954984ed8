#pragma once

// Finite realizations of the counterexamples and auxiliary constructions:
// interleaving an isometry into a continuous-time semigroup, the sequence
// module example without a Wold decomposition, the pointwise shift that is
// not strongly continuous, the ideal-valued half-line shadow, and the grid
// Weyl relations.

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "shiftmod/grid.hpp"
#include "shiftmod/report.hpp"
#include "shiftmod/wold.hpp"

namespace shiftmod {

// An element of L^2[0,1) (x) E_base on N slots: column j is the base vector
// carried by [j/N, (j+1)/N). <f, g> = (1/N) sum_j <f_j, g_j>.
struct TensorVector {
  SpecPtr base;
  std::vector<GridVector> columns;

  TensorVector(SpecPtr base_space, int slots);
  int slots() const { return static_cast<int>(columns.size()); }
  bool empty() const;

  TensorVector& operator+=(const TensorVector& other);
  TensorVector& operator-=(const TensorVector& other);
  friend TensorVector operator+(TensorVector a, const TensorVector& b) { return a += b; }
  friend TensorVector operator-(TensorVector a, const TensorVector& b) { return a -= b; }
};

AlgebraElement inner_product(const TensorVector& f, const TensorVector& g);
double norm(const TensorVector& f);

struct TensorOperator {
  std::function<TensorVector(const TensorVector&)> apply;
  std::function<TensorVector(const TensorVector&)> adjoint_apply;
  TensorVector operator()(const TensorVector& f) const { return apply(f); }
};

TensorOperator compose(const TensorOperator& a, const TensorOperator& b);

struct InterleavedSemigroup {
  Isometry base;
  int slots_per_unit = 1;
  // s_t = (u_tau (x) id)(1_[0, 1 - tau) (x) s^n + 1_[1 - tau, 1) (x) s^{n+1}), t = n + tau.
  std::function<TensorOperator(GridTime)> at;
  // id (x) s^n.
  std::function<TensorOperator(std::int64_t)> fiber_power;
};

InterleavedSemigroup interleave(const Isometry& base, int slots_per_unit);

// Gaussian tensor vector whose columns are supported on base slots [first, first + count).
TensorVector random_tensor_vector(const SpecPtr& base, int slots, std::int64_t first, std::int64_t count, Rng& rng);

// Exhaustive law over r, t in [0, N) slots split by the branch tau_r + tau_t < N
// or >= N, plus s_0 = id, s_N = id (x) s, commutation with whole units,
// isometry and adjoint pairing.
StageReport verify_interleave(const InterleavedSemigroup& s, const std::vector<TensorVector>& probes, double tol);

// Column j, base slot m -> half-line slot m N + j.
GridVector to_half_line(const TensorVector& f, const SpecPtr& half_line);
TensorVector from_half_line(const GridVector& g, const SpecPtr& base, int slots);

// max over t in [0, horizon] units and over probes of the distance between
// the interleaved one-sided shift and the standard right shift.
StageReport interleave_is_shift(const FiberSpec& fiber, int slots_per_unit, std::int64_t horizon, int probe_count,
                                Rng& rng, double tol);

// ||(r_n - r_m) f|| with f(k) = e_k over B = C^K, r_n = v^n v^{*n}.
double nondecex_check(int points, int n, int m);
// ||(v^*)^n f|| for n = 0..points, each point decaying to 0.
std::vector<double> nondecex_decay(int points);

// ||s_t g - g|| for g(k) = y sqrt(k (k + 1)) 1_[1/(k+1), 1/k), y = 1.
// Throws std::invalid_argument unless N >= K (K + 1).
double nonsc_check(int points, int slots_per_unit, GridTime t);

struct RefinementRow {
  int slots_per_unit = 0;
  double value = 0.0;
};

// ||s_h x - x|| for x(k) = sin(pi x) 1_[0,1) y at every point, one slot h = 1/N.
std::vector<RefinementRow> nonsc_continuous_probe(int points, const std::vector<int>& slots_per_unit);

struct ShadowRow {
  int samples = 0;
  // Fraction of algebra blocks met by the complement of s_t E.
  double fraction = 0.0;
  // Largest ||C x|| / ||x|| over probes, C = id - s_t s_t^dagger.
  double complement_norm = 0.0;
  std::vector<int> complement_dims;
};

// B = C^m, ideal = functions vanishing at a marked point, E = L^2(R_-, I) (+) L^2(R_+, B)
// on a bilateral grid with one slot per unit; probes on [-window, window).
ShadowRow nonadex_shadow(int samples, GridTime t, std::int64_t window);
// Same with I = B: s is unitary and decompose recovers all of the probe span as E_u.
DecompositionResult nonadex_full_ideal(int samples, std::int64_t window, double tol);

struct WeylResult {
  std::complex<double> expected_phase;
  // -1: the commutator s_s m_t s_{-s} m_{-t} equals exp(-i s t).
  int sign = -1;
  double residual = 0.0;
  std::vector<std::complex<double>> probe_phases;
  double phase_spread = 0.0;
};

// On a bilateral grid with N slots per unit and probes on [-window, window) slots.
WeylResult weyl_check(int slots_per_unit, std::int64_t window, std::int64_t s_slots, double t, int probe_count,
                      Rng& rng);

}  // namespace shiftmod
