#pragma once

// Uniform-grid models of L^2(I, F).
//
// A grid vector is a finitely supported map slot -> fiber vector on a grid of
// step h = 1/N. Slots are indexed by N (unilateral) or Z (bilateral), and the
// B-valued inner product is h * sum_j <f_j, g_j>. Shifts by whole slots are
// then exact isometries with exact adjoints; no truncation is ever applied.
//
// Operators are apply / adjoint-apply programs with a declared propagation
// bound k: supp(Tf) lies within supp(f) + [-k, k].

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "shiftmod/algebra.hpp"

namespace shiftmod {

enum class IndexKind { unilateral, bilateral };

struct FiberSpec {
  AlgebraSignature signature;
  int rank = 1;
  // Optional projection p onto the fiber p B^rank.
  std::optional<ModuleOperator> projection;
};

// A time t = slots * h. Unilateral grids only use nonnegative values.
struct GridTime {
  std::int64_t slots = 0;
  friend auto operator<=>(const GridTime&, const GridTime&) = default;
};

// nullopt stands for +infinity.
using TimeBound = std::optional<GridTime>;

class GridSpec {
 public:
  GridSpec(int slots_per_unit, IndexKind kind, FiberSpec fiber);

  int slots_per_unit() const { return slots_per_unit_; }
  double step() const { return 1.0 / slots_per_unit_; }
  IndexKind kind() const { return kind_; }
  const FiberSpec& fiber() const { return fiber_; }
  const AlgebraSignature& signature() const { return fiber_.signature; }
  int fiber_rank() const { return fiber_.rank; }

  // Grid time for t units; throws std::invalid_argument unless t is grid aligned.
  GridTime time(double units) const;
  GridTime units(std::int64_t whole_units) const { return {whole_units * slots_per_unit_}; }
  // Largest integer <= t, in units.
  std::int64_t whole_units(GridTime t) const;
  double to_units(GridTime t) const { return static_cast<double>(t.slots) / slots_per_unit_; }

  ModuleVector zero_fiber() const { return ModuleVector::zero(fiber_.signature, fiber_.rank); }
  ModuleVector project_fiber(const ModuleVector& v) const;

 private:
  int slots_per_unit_;
  IndexKind kind_;
  FiberSpec fiber_;
};

using SpecPtr = std::shared_ptr<const GridSpec>;

SpecPtr make_spec(int slots_per_unit, IndexKind kind, FiberSpec fiber);
SpecPtr make_spec(int slots_per_unit, IndexKind kind, const AlgebraSignature& signature, int rank);

class GridVector {
 public:
  explicit GridVector(SpecPtr spec);

  const GridSpec& spec() const { return *spec_; }
  const SpecPtr& spec_ptr() const { return spec_; }
  const std::map<std::int64_t, ModuleVector>& entries() const { return entries_; }

  void set(std::int64_t slot, ModuleVector v);
  void add(std::int64_t slot, const ModuleVector& v);
  void erase(std::int64_t slot) { entries_.erase(slot); }
  ModuleVector at(std::int64_t slot) const;

  bool empty() const { return entries_.empty(); }
  // Inclusive [first, last] of the stored slots.
  std::optional<std::pair<std::int64_t, std::int64_t>> support_range() const;

  GridVector& operator+=(const GridVector& other);
  GridVector& operator-=(const GridVector& other);
  GridVector& operator*=(Complex c);

  friend GridVector operator+(GridVector a, const GridVector& b) { return a += b; }
  friend GridVector operator-(GridVector a, const GridVector& b) { return a -= b; }
  friend GridVector operator*(GridVector a, Complex c) { return a *= c; }
  friend GridVector operator*(Complex c, GridVector a) { return a *= c; }
  // Right module action, slotwise.
  friend GridVector operator*(const GridVector& f, const AlgebraElement& b);

 private:
  void check_slot(std::int64_t slot) const;
  void check_compatible(const GridVector& other) const;

  SpecPtr spec_;
  std::map<std::int64_t, ModuleVector> entries_;
};

AlgebraElement inner_product(const GridVector& f, const GridVector& g);
double norm(const GridVector& f);

class GridOperator {
 public:
  using Map = std::function<GridVector(const GridVector&)>;

  GridOperator(Map apply, Map adjoint_apply, std::int64_t propagation);

  static GridOperator identity();
  static GridOperator zero();

  GridVector operator()(const GridVector& f) const { return impl_->apply(f); }
  GridVector apply(const GridVector& f) const { return impl_->apply(f); }
  GridVector adjoint_apply(const GridVector& f) const { return impl_->adjoint(f); }
  GridOperator adjoint() const;
  std::int64_t propagation() const { return impl_->propagation; }

  // Composition (a * b)(f) = a(b(f)); propagation bounds add.
  friend GridOperator operator*(const GridOperator& a, const GridOperator& b);
  // Sums take the larger propagation bound.
  friend GridOperator operator+(const GridOperator& a, const GridOperator& b);
  friend GridOperator operator-(const GridOperator& a, const GridOperator& b);
  friend GridOperator operator*(Complex c, const GridOperator& a);

 private:
  struct Impl {
    Map apply;
    Map adjoint;
    std::int64_t propagation;
  };
  explicit GridOperator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

// Mean (1/n) sum_k ops[k]; propagation is the largest of the bounds.
GridOperator average(std::vector<GridOperator> ops);

// v_t on a unilateral grid: slot j -> j + t. The adjoint drops slots below 0.
GridOperator standard_shift(const SpecPtr& spec, GridTime t);
// Unitary slot shift on a bilateral grid; negative t allowed.
GridOperator bilateral_shift(const SpecPtr& spec, std::int64_t t);
// Multiplication by 1_[a, b). Empty or reversed intervals give the zero operator.
GridOperator indicator(const SpecPtr& spec, GridTime a, TimeBound b);
// Rotates the slots of [a, b) by t modulo b - a; identity elsewhere.
GridOperator cyclic_shift(const SpecPtr& spec, GridTime a, GridTime b, GridTime t);
// Slot j is multiplied by exp(i t x_j), x_j = j h.
GridOperator multiplication_phase(const SpecPtr& spec, double t);
// Slotwise left multiplication by a fiber operator of the fiber's rank.
GridOperator fiber_operator(const SpecPtr& spec, const ModuleOperator& op);
// Acts by `op` on the slots [first, first + count) stacked as one vector of
// rank count * fiber_rank; identity off that window.
GridOperator window_operator(const SpecPtr& spec, std::int64_t first, std::int64_t count, const ModuleOperator& op);

// Slot j of [a, b) gets profile(x_j) * y (fiber projection applied).
GridVector sample_profile(const SpecPtr& spec, const std::function<double(double)>& profile, const ModuleVector& y,
                          GridTime a, GridTime b);

// Gaussian entries on [first, first + count), projected into the fiber, unit norm.
GridVector random_vector(const SpecPtr& spec, std::int64_t first, std::int64_t count, Rng& rng);
// delta_j (x) e_k for j in [first, first + count), k < rank: generates every
// vector supported there as a right module.
std::vector<GridVector> basis_probes(const SpecPtr& spec, std::int64_t first, std::int64_t count);

// Slots [first, first + count) stacked into one module vector scaled by
// sqrt(h), so module inner products equal grid inner products.
ModuleVector flatten(const GridVector& f, std::int64_t first, std::int64_t count);
GridVector unflatten(const SpecPtr& spec, const ModuleVector& x, std::int64_t first);
// Smallest slot window covering the supports of all vectors (first, count).
std::pair<std::int64_t, std::int64_t> common_window(std::span<const GridVector> vectors);

// max over probes of ||A x - B x||.
double operator_residual(const GridOperator& a, const GridOperator& b, std::span<const GridVector> probes);
// ||<T f, g> - <f, T^dagger g>||.
double adjoint_pairing_residual(const GridOperator& t, const GridVector& f, const GridVector& g);
// True iff supp(T f) stays within the declared propagation of supp(f).
bool respects_propagation(const GridOperator& t, const GridVector& f);

}  // namespace shiftmod
