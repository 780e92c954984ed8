#include "shiftmod/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace shiftmod {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t positive_mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

GridVector empty_like(const GridVector& f) { return GridVector(f.spec_ptr()); }

}  // namespace

// --- GridSpec ---------------------------------------------------------------

GridSpec::GridSpec(int slots_per_unit, IndexKind kind, FiberSpec fiber)
    : slots_per_unit_(slots_per_unit), kind_(kind), fiber_(std::move(fiber)) {
  if (slots_per_unit_ < 1) throw std::invalid_argument("grid: slots_per_unit must be at least 1");
  if (fiber_.rank < 0) throw std::invalid_argument("grid: fiber rank must be nonnegative");
  if (fiber_.projection) {
    const auto& p = *fiber_.projection;
    if (!(p.signature() == fiber_.signature) || p.rows() != fiber_.rank || p.cols() != fiber_.rank)
      throw std::invalid_argument("grid: fiber projection shape does not match fiber");
  }
}

GridTime GridSpec::time(double units) const {
  const double scaled = units * slots_per_unit_;
  const double rounded = std::round(scaled);
  if (std::abs(scaled - rounded) > 1e-9)
    throw std::invalid_argument("grid: time " + std::to_string(units) + " is not aligned to the grid");
  return {static_cast<std::int64_t>(rounded)};
}

std::int64_t GridSpec::whole_units(GridTime t) const { return floor_div(t.slots, slots_per_unit_); }

ModuleVector GridSpec::project_fiber(const ModuleVector& v) const {
  return fiber_.projection ? fiber_.projection->apply(v) : v;
}

SpecPtr make_spec(int slots_per_unit, IndexKind kind, FiberSpec fiber) {
  return std::make_shared<const GridSpec>(slots_per_unit, kind, std::move(fiber));
}

SpecPtr make_spec(int slots_per_unit, IndexKind kind, const AlgebraSignature& signature, int rank) {
  return make_spec(slots_per_unit, kind, FiberSpec{signature, rank, std::nullopt});
}

// --- GridVector -------------------------------------------------------------

GridVector::GridVector(SpecPtr spec) : spec_(std::move(spec)) {
  if (!spec_) throw std::invalid_argument("grid vector: null spec");
}

void GridVector::check_slot(std::int64_t slot) const {
  if (spec_->kind() == IndexKind::unilateral && slot < 0)
    throw std::out_of_range("grid vector: negative slot on a unilateral grid");
}

void GridVector::check_compatible(const GridVector& other) const {
  if (spec_ == other.spec_) return;
  if (spec_->slots_per_unit() != other.spec_->slots_per_unit() || spec_->kind() != other.spec_->kind() ||
      !(spec_->signature() == other.spec_->signature()) || spec_->fiber_rank() != other.spec_->fiber_rank())
    throw ShapeError("grid vector: incompatible grid specs");
}

void GridVector::set(std::int64_t slot, ModuleVector v) {
  check_slot(slot);
  if (!(v.signature() == spec_->signature()) || v.rank() != spec_->fiber_rank())
    throw ShapeError("grid vector: fiber vector shape mismatch");
  entries_.insert_or_assign(slot, std::move(v));
}

void GridVector::add(std::int64_t slot, const ModuleVector& v) {
  auto it = entries_.find(slot);
  if (it == entries_.end()) {
    set(slot, v);
  } else {
    it->second += v;
  }
}

ModuleVector GridVector::at(std::int64_t slot) const {
  auto it = entries_.find(slot);
  return it == entries_.end() ? spec_->zero_fiber() : it->second;
}

std::optional<std::pair<std::int64_t, std::int64_t>> GridVector::support_range() const {
  if (entries_.empty()) return std::nullopt;
  return std::make_pair(entries_.begin()->first, entries_.rbegin()->first);
}

GridVector& GridVector::operator+=(const GridVector& other) {
  check_compatible(other);
  for (const auto& [slot, v] : other.entries_) add(slot, v);
  return *this;
}

GridVector& GridVector::operator-=(const GridVector& other) {
  check_compatible(other);
  for (const auto& [slot, v] : other.entries_) {
    auto it = entries_.find(slot);
    if (it == entries_.end()) {
      set(slot, v * Complex(-1.0));
    } else {
      it->second -= v;
    }
  }
  return *this;
}

GridVector& GridVector::operator*=(Complex c) {
  for (auto& [slot, v] : entries_) v *= c;
  return *this;
}

GridVector operator*(const GridVector& f, const AlgebraElement& b) {
  GridVector out(f.spec_);
  for (const auto& [slot, v] : f.entries_) out.entries_.emplace(slot, v * b);
  return out;
}

AlgebraElement inner_product(const GridVector& f, const GridVector& g) {
  if (f.spec().fiber_rank() != g.spec().fiber_rank() || !(f.spec().signature() == g.spec().signature()))
    throw ShapeError("grid inner product: incompatible specs");
  AlgebraElement acc = AlgebraElement::zero(f.spec().signature());
  const auto& fe = f.entries();
  const auto& ge = g.entries();
  for (const auto& [slot, v] : fe) {
    auto it = ge.find(slot);
    if (it != ge.end()) acc += inner_product(v, it->second);
  }
  return acc * Complex(f.spec().step());
}

double norm(const GridVector& f) { return std::sqrt(inner_product(f, f).norm()); }

// --- GridOperator -----------------------------------------------------------

GridOperator::GridOperator(Map apply, Map adjoint_apply, std::int64_t propagation)
    : impl_(std::make_shared<const Impl>(Impl{std::move(apply), std::move(adjoint_apply), propagation})) {
  if (propagation < 0) throw std::invalid_argument("grid operator: negative propagation bound");
}

GridOperator GridOperator::identity() {
  auto same = [](const GridVector& f) { return f; };
  return GridOperator(same, same, 0);
}

GridOperator GridOperator::zero() {
  auto none = [](const GridVector& f) { return empty_like(f); };
  return GridOperator(none, none, 0);
}

GridOperator GridOperator::adjoint() const {
  return GridOperator(std::make_shared<const Impl>(Impl{impl_->adjoint, impl_->apply, impl_->propagation}));
}

GridOperator operator*(const GridOperator& a, const GridOperator& b) {
  auto ai = a.impl_;
  auto bi = b.impl_;
  return GridOperator([ai, bi](const GridVector& f) { return ai->apply(bi->apply(f)); },
                      [ai, bi](const GridVector& f) { return bi->adjoint(ai->adjoint(f)); },
                      ai->propagation + bi->propagation);
}

GridOperator operator+(const GridOperator& a, const GridOperator& b) {
  auto ai = a.impl_;
  auto bi = b.impl_;
  return GridOperator([ai, bi](const GridVector& f) { return ai->apply(f) + bi->apply(f); },
                      [ai, bi](const GridVector& f) { return ai->adjoint(f) + bi->adjoint(f); },
                      std::max(ai->propagation, bi->propagation));
}

GridOperator operator-(const GridOperator& a, const GridOperator& b) {
  auto ai = a.impl_;
  auto bi = b.impl_;
  return GridOperator([ai, bi](const GridVector& f) { return ai->apply(f) - bi->apply(f); },
                      [ai, bi](const GridVector& f) { return ai->adjoint(f) - bi->adjoint(f); },
                      std::max(ai->propagation, bi->propagation));
}

GridOperator operator*(Complex c, const GridOperator& a) {
  auto ai = a.impl_;
  return GridOperator([ai, c](const GridVector& f) { return ai->apply(f) * c; },
                      [ai, c](const GridVector& f) { return ai->adjoint(f) * std::conj(c); }, ai->propagation);
}

GridOperator average(std::vector<GridOperator> ops) {
  if (ops.empty()) throw std::invalid_argument("average: no operators");
  std::int64_t prop = 0;
  for (const auto& op : ops) prop = std::max(prop, op.propagation());
  const double w = 1.0 / static_cast<double>(ops.size());
  auto shared = std::make_shared<const std::vector<GridOperator>>(std::move(ops));
  return GridOperator(
      [shared, w](const GridVector& f) {
        GridVector acc = empty_like(f);
        for (const auto& op : *shared) acc += op.apply(f);
        return acc * Complex(w);
      },
      [shared, w](const GridVector& f) {
        GridVector acc = empty_like(f);
        for (const auto& op : *shared) acc += op.adjoint_apply(f);
        return acc * Complex(w);
      },
      prop);
}

// --- concrete operators -----------------------------------------------------

namespace {

GridVector translate(const GridVector& f, std::int64_t t, bool drop_negative) {
  GridVector out = empty_like(f);
  for (const auto& [slot, v] : f.entries()) {
    const std::int64_t target = slot + t;
    if (drop_negative && target < 0) continue;
    out.set(target, v);
  }
  return out;
}

}  // namespace

GridOperator standard_shift(const SpecPtr& spec, GridTime t) {
  if (spec->kind() != IndexKind::unilateral)
    throw std::invalid_argument("standard_shift requires a unilateral grid; use bilateral_shift");
  if (t.slots < 0) throw std::invalid_argument("standard_shift: negative time");
  const std::int64_t j = t.slots;
  return GridOperator([j](const GridVector& f) { return translate(f, j, false); },
                      [j](const GridVector& f) { return translate(f, -j, true); }, j);
}

GridOperator bilateral_shift(const SpecPtr& spec, std::int64_t t) {
  if (spec->kind() != IndexKind::bilateral)
    throw std::invalid_argument("bilateral_shift requires a bilateral grid; use standard_shift");
  return GridOperator([t](const GridVector& f) { return translate(f, t, false); },
                      [t](const GridVector& f) { return translate(f, -t, false); }, std::abs(t));
}

GridOperator indicator(const SpecPtr& spec, GridTime a, TimeBound b) {
  (void)spec;
  if (b && *b <= a) return GridOperator::zero();
  const std::int64_t lo = a.slots;
  const std::optional<std::int64_t> hi = b ? std::optional<std::int64_t>(b->slots) : std::nullopt;
  auto keep = [lo, hi](const GridVector& f) {
    GridVector out = empty_like(f);
    for (const auto& [slot, v] : f.entries())
      if (slot >= lo && (!hi || slot < *hi)) out.set(slot, v);
    return out;
  };
  return GridOperator(keep, keep, 0);
}

GridOperator cyclic_shift(const SpecPtr& spec, GridTime a, GridTime b, GridTime t) {
  (void)spec;
  if (!(a < b)) throw std::invalid_argument("cyclic_shift: empty window");
  const std::int64_t lo = a.slots;
  const std::int64_t len = b.slots - a.slots;
  const std::int64_t shift = positive_mod(t.slots, len);
  auto rotate = [lo, len](const GridVector& f, std::int64_t by) {
    GridVector out = empty_like(f);
    for (const auto& [slot, v] : f.entries()) {
      if (slot >= lo && slot < lo + len) {
        out.set(lo + positive_mod(slot - lo + by, len), v);
      } else {
        out.set(slot, v);
      }
    }
    return out;
  };
  return GridOperator([rotate, shift](const GridVector& f) { return rotate(f, shift); },
                      [rotate, shift](const GridVector& f) { return rotate(f, -shift); },
                      shift == 0 ? 0 : len - 1);
}

GridOperator multiplication_phase(const SpecPtr& spec, double t) {
  const double h = spec->step();
  auto phase = [h](const GridVector& f, double by) {
    GridVector out = empty_like(f);
    for (const auto& [slot, v] : f.entries())
      out.set(slot, v * std::polar(1.0, by * static_cast<double>(slot) * h));
    return out;
  };
  return GridOperator([phase, t](const GridVector& f) { return phase(f, t); },
                      [phase, t](const GridVector& f) { return phase(f, -t); }, 0);
}

GridOperator fiber_operator(const SpecPtr& spec, const ModuleOperator& op) {
  if (op.rows() != spec->fiber_rank() || op.cols() != spec->fiber_rank() || !(op.signature() == spec->signature()))
    throw ShapeError("fiber_operator: operator shape does not match the fiber");
  auto fwd = std::make_shared<const ModuleOperator>(op);
  auto bwd = std::make_shared<const ModuleOperator>(op.adjoint());
  auto act = [](const std::shared_ptr<const ModuleOperator>& m) {
    return [m](const GridVector& f) {
      GridVector out = empty_like(f);
      for (const auto& [slot, v] : f.entries()) out.set(slot, m->apply(v));
      return out;
    };
  };
  return GridOperator(act(fwd), act(bwd), 0);
}

GridOperator window_operator(const SpecPtr& spec, std::int64_t first, std::int64_t count, const ModuleOperator& op) {
  const int rank = spec->fiber_rank();
  if (count < 1 || op.rows() != op.cols() || op.rows() != count * rank || !(op.signature() == spec->signature()))
    throw ShapeError("window_operator: operator must have rank count * fiber_rank");
  auto fwd = std::make_shared<const ModuleOperator>(op);
  auto bwd = std::make_shared<const ModuleOperator>(op.adjoint());
  auto act = [first, count, rank](const std::shared_ptr<const ModuleOperator>& m) {
    return [m, first, count, rank](const GridVector& f) {
      GridVector out = empty_like(f);
      std::vector<ModuleVector> parts;
      parts.reserve(static_cast<std::size_t>(count));
      bool touched = false;
      for (const auto& [slot, v] : f.entries()) {
        if (slot >= first && slot < first + count) {
          touched = true;
        } else {
          out.set(slot, v);
        }
      }
      if (!touched) return out;
      for (std::int64_t j = first; j < first + count; ++j) parts.push_back(f.at(j));
      const auto mixed = unstack(m->apply(stack(parts)), rank);
      for (std::int64_t j = 0; j < count; ++j) out.set(first + j, mixed[static_cast<std::size_t>(j)]);
      return out;
    };
  };
  return GridOperator(act(fwd), act(bwd), count - 1);
}

// --- vectors ----------------------------------------------------------------

GridVector sample_profile(const SpecPtr& spec, const std::function<double(double)>& profile, const ModuleVector& y,
                          GridTime a, GridTime b) {
  if (!(a < b)) throw std::invalid_argument("sample_profile: empty window");
  GridVector out(spec);
  const ModuleVector py = spec->project_fiber(y);
  for (std::int64_t j = a.slots; j < b.slots; ++j) {
    const double value = profile(static_cast<double>(j) * spec->step());
    if (value != 0.0) out.set(j, py * Complex(value));
  }
  return out;
}

GridVector random_vector(const SpecPtr& spec, std::int64_t first, std::int64_t count, Rng& rng) {
  GridVector out(spec);
  for (std::int64_t j = first; j < first + count; ++j)
    out.set(j, spec->project_fiber(ModuleVector::random(spec->signature(), spec->fiber_rank(), rng)));
  const double n = norm(out);
  return n > 0.0 ? out * Complex(1.0 / n) : out;
}

std::vector<GridVector> basis_probes(const SpecPtr& spec, std::int64_t first, std::int64_t count) {
  std::vector<GridVector> out;
  for (std::int64_t j = first; j < first + count; ++j) {
    for (int k = 0; k < spec->fiber_rank(); ++k) {
      GridVector f(spec);
      f.set(j, spec->project_fiber(ModuleVector::basis(spec->signature(), spec->fiber_rank(), k)));
      out.push_back(std::move(f));
    }
  }
  return out;
}

ModuleVector flatten(const GridVector& f, std::int64_t first, std::int64_t count) {
  std::vector<ModuleVector> parts;
  parts.reserve(static_cast<std::size_t>(count));
  for (std::int64_t j = first; j < first + count; ++j) parts.push_back(f.at(j));
  return stack(parts) * Complex(std::sqrt(f.spec().step()));
}

GridVector unflatten(const SpecPtr& spec, const ModuleVector& x, std::int64_t first) {
  const auto parts = unstack(x * Complex(1.0 / std::sqrt(spec->step())), spec->fiber_rank());
  GridVector out(spec);
  for (std::size_t j = 0; j < parts.size(); ++j)
    if (!parts[j].is_zero()) out.set(first + static_cast<std::int64_t>(j), parts[j]);
  return out;
}

std::pair<std::int64_t, std::int64_t> common_window(std::span<const GridVector> vectors) {
  std::optional<std::int64_t> lo, hi;
  for (const auto& v : vectors) {
    if (auto r = v.support_range()) {
      lo = lo ? std::min(*lo, r->first) : r->first;
      hi = hi ? std::max(*hi, r->second) : r->second;
    }
  }
  if (!lo) return {0, 0};
  return {*lo, *hi - *lo + 1};
}

// --- diagnostics ------------------------------------------------------------

double operator_residual(const GridOperator& a, const GridOperator& b, std::span<const GridVector> probes) {
  double worst = 0.0;
  for (const auto& x : probes) worst = std::max(worst, norm(a.apply(x) - b.apply(x)));
  return worst;
}

double adjoint_pairing_residual(const GridOperator& t, const GridVector& f, const GridVector& g) {
  return distance(inner_product(t.apply(f), g), inner_product(f, t.adjoint_apply(g)));
}

bool respects_propagation(const GridOperator& t, const GridVector& f) {
  const auto in = f.support_range();
  const GridVector image = t.apply(f);
  const auto out = image.support_range();
  if (!out) return true;
  if (!in) return false;
  const std::int64_t k = t.propagation();
  return out->first >= in->first - k && out->second <= in->second + k;
}

}  // namespace shiftmod
