#include "shiftmod/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "shiftmod/cooper.hpp"

namespace shiftmod {

namespace {

GridVector power(const GridOperator& s, GridVector f, std::int64_t n) {
  for (std::int64_t k = 0; k < n; ++k) f = s(f);
  return f;
}

GridVector adjoint_power(const GridOperator& s, GridVector f, std::int64_t n) {
  for (std::int64_t k = 0; k < n; ++k) f = s.adjoint_apply(f);
  return f;
}

std::string pair_tag(std::int64_t r, std::int64_t t) {
  return "r=" + std::to_string(r) + " t=" + std::to_string(t);
}

// Element of C^K equal to `value` on every point.
ModuleVector constant_fiber(const AlgebraSignature& sig, Complex value) {
  ModuleVector y = ModuleVector::zero(sig, 1);
  for (std::size_t i = 0; i < sig.num_blocks(); ++i) y.block(i).setConstant(value);
  return y;
}

ModuleVector point_fiber(const AlgebraSignature& sig, std::size_t point, Complex value) {
  ModuleVector y = ModuleVector::zero(sig, 1);
  y.block(point).setConstant(value);
  return y;
}

}  // namespace

// --- tensor vectors ---------------------------------------------------------

TensorVector::TensorVector(SpecPtr base_space, int slots) : base(std::move(base_space)) {
  if (slots < 1) throw std::invalid_argument("tensor vector needs at least one slot");
  columns.assign(static_cast<std::size_t>(slots), GridVector(base));
}

bool TensorVector::empty() const {
  return std::all_of(columns.begin(), columns.end(), [](const GridVector& c) { return c.empty(); });
}

TensorVector& TensorVector::operator+=(const TensorVector& other) {
  if (other.slots() != slots()) throw ShapeError("tensor vector: slot count mismatch");
  for (std::size_t j = 0; j < columns.size(); ++j) columns[j] += other.columns[j];
  return *this;
}

TensorVector& TensorVector::operator-=(const TensorVector& other) {
  if (other.slots() != slots()) throw ShapeError("tensor vector: slot count mismatch");
  for (std::size_t j = 0; j < columns.size(); ++j) columns[j] -= other.columns[j];
  return *this;
}

AlgebraElement inner_product(const TensorVector& f, const TensorVector& g) {
  if (f.slots() != g.slots()) throw ShapeError("tensor inner product: slot count mismatch");
  AlgebraElement acc = AlgebraElement::zero(f.base->signature());
  for (std::size_t j = 0; j < f.columns.size(); ++j) acc += inner_product(f.columns[j], g.columns[j]);
  return acc * Complex(1.0 / f.slots());
}

double norm(const TensorVector& f) { return std::sqrt(inner_product(f, f).norm()); }

TensorOperator compose(const TensorOperator& a, const TensorOperator& b) {
  return {[a, b](const TensorVector& f) { return a.apply(b.apply(f)); },
          [a, b](const TensorVector& f) { return b.adjoint_apply(a.adjoint_apply(f)); }};
}

// --- interleaving -----------------------------------------------------------

InterleavedSemigroup interleave(const Isometry& base, int slots_per_unit) {
  if (slots_per_unit < 1) throw std::invalid_argument("interleave: slots per unit must be positive");
  const int n_slots = slots_per_unit;
  const GridOperator step = base.step;
  auto at = [step, n_slots](GridTime t) {
    if (t.slots < 0) throw std::invalid_argument("interleave: negative time");
    const std::int64_t n = t.slots / n_slots;
    const std::int64_t tau = t.slots % n_slots;
    auto apply = [step, n_slots, n, tau](const TensorVector& f) {
      TensorVector out(f.base, n_slots);
      for (std::int64_t j = 0; j < n_slots; ++j) {
        const std::int64_t k = j < n_slots - tau ? n : n + 1;
        out.columns[static_cast<std::size_t>((j + tau) % n_slots)] = power(step, f.columns[j], k);
      }
      return out;
    };
    auto adjoint = [step, n_slots, n, tau](const TensorVector& g) {
      TensorVector out(g.base, n_slots);
      for (std::int64_t j = 0; j < n_slots; ++j) {
        const std::int64_t k = j < n_slots - tau ? n : n + 1;
        out.columns[j] = adjoint_power(step, g.columns[static_cast<std::size_t>((j + tau) % n_slots)], k);
      }
      return out;
    };
    return TensorOperator{apply, adjoint};
  };
  auto fiber_power = [step, n_slots](std::int64_t n) {
    auto apply = [step, n_slots, n](const TensorVector& f) {
      TensorVector out(f.base, n_slots);
      for (int j = 0; j < n_slots; ++j) out.columns[j] = power(step, f.columns[j], n);
      return out;
    };
    auto adjoint = [step, n_slots, n](const TensorVector& f) {
      TensorVector out(f.base, n_slots);
      for (int j = 0; j < n_slots; ++j) out.columns[j] = adjoint_power(step, f.columns[j], n);
      return out;
    };
    return TensorOperator{apply, adjoint};
  };
  return {base, slots_per_unit, at, fiber_power};
}

TensorVector random_tensor_vector(const SpecPtr& base, int slots, std::int64_t first, std::int64_t count, Rng& rng) {
  TensorVector f(base, slots);
  for (auto& c : f.columns) c = random_vector(base, first, count, rng);
  return f;
}

StageReport verify_interleave(const InterleavedSemigroup& s, const std::vector<TensorVector>& probes, double tol) {
  StageReport rep{"interleave", {}, {}};
  const int n = s.slots_per_unit;
  auto residual = [&probes](const TensorOperator& a, const TensorOperator& b) {
    double worst = 0.0;
    for (const auto& x : probes) worst = std::max(worst, norm(a(x) - b(x)));
    return worst;
  };
  WorstCase short_branch, wrap_branch, iso, pairing, units;
  for (std::int64_t r = 0; r < n; ++r) {
    for (std::int64_t t = 0; t < n; ++t) {
      const double res = residual(compose(s.at(GridTime{r}), s.at(GridTime{t})), s.at(GridTime{r + t}));
      (r + t < n ? short_branch : wrap_branch).update(res, pair_tag(r, t));
    }
  }
  const TensorOperator one = s.fiber_power(1);
  for (std::int64_t t = 0; t < 2 * n; ++t) {
    const TensorOperator st = s.at(GridTime{t});
    const std::string where = "t=" + std::to_string(t);
    units.update(std::max(residual(compose(st, one), s.at(GridTime{t + n})),
                          residual(compose(one, st), s.at(GridTime{t + n}))),
                 where);
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const TensorVector& f = probes[k];
      const TensorVector& g = probes[(k + 1) % probes.size()];
      iso.update(distance(inner_product(st(f), st(g)), inner_product(f, g)), where);
      pairing.update(distance(inner_product(st(f), g), inner_product(f, st.adjoint_apply(g))), where);
    }
  }
  auto identity = TensorOperator{[](const TensorVector& f) { return f; }, [](const TensorVector& f) { return f; }};
  rep.add("identity_at_zero", residual(s.at(GridTime{0}), identity), tol);
  rep.add("unit_time_is_fiber_step", residual(s.at(GridTime{n}), one), tol);
  rep.add("law_branch_short", short_branch.value, tol, "tau_r+tau_t<N " + short_branch.where);
  if (n > 1) rep.add("law_branch_wrap", wrap_branch.value, tol, "tau_r+tau_t>=N " + wrap_branch.where);
  rep.add("commutes_with_units", units.value, tol, units.where);
  rep.add("isometry", iso.value, tol, iso.where);
  rep.add("adjoint_pairing", pairing.value, tol, pairing.where);
  rep.data["pairs_checked"] = n * n;
  return rep;
}

GridVector to_half_line(const TensorVector& f, const SpecPtr& half_line) {
  const int n = f.slots();
  if (half_line->slots_per_unit() != n) throw ShapeError("to_half_line: slots per unit mismatch");
  GridVector out(half_line);
  for (int j = 0; j < n; ++j)
    for (const auto& [m, v] : f.columns[j].entries()) out.set(m * n + j, v);
  return out;
}

TensorVector from_half_line(const GridVector& g, const SpecPtr& base, int slots) {
  TensorVector out(base, slots);
  for (const auto& [slot, v] : g.entries()) {
    if (slot < 0) throw std::out_of_range("from_half_line: negative slot");
    out.columns[static_cast<std::size_t>(slot % slots)].set(slot / slots, v);
  }
  return out;
}

StageReport interleave_is_shift(const FiberSpec& fiber, int slots_per_unit, std::int64_t horizon, int probe_count,
                                Rng& rng, double tol) {
  StageReport rep{"interleave_is_shift", {}, {}};
  const SpecPtr base = make_spec(1, IndexKind::unilateral, fiber);
  const SpecPtr half = make_spec(slots_per_unit, IndexKind::unilateral, fiber);
  const InterleavedSemigroup s = interleave(Isometry{base, standard_shift(base, GridTime{1})}, slots_per_unit);
  std::vector<TensorVector> probes;
  for (int i = 0; i < probe_count; ++i) probes.push_back(random_tensor_vector(base, slots_per_unit, 0, horizon, rng));
  probes.emplace_back(base, slots_per_unit);

  WorstCase all, integer, zero;
  double roundtrip = 0.0;
  for (std::int64_t t = 0; t <= horizon * slots_per_unit; ++t) {
    const TensorOperator st = s.at(GridTime{t});
    const GridOperator vt = standard_shift(half, GridTime{t});
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const double res = norm(to_half_line(st(probes[k]), half) - vt(to_half_line(probes[k], half)));
      all.update(res, "t=" + std::to_string(t));
      if (t % slots_per_unit == 0) integer.update(res, "t=" + std::to_string(t));
      if (k + 1 == probes.size()) zero.update(res, "t=" + std::to_string(t));
    }
  }
  for (const auto& x : probes)
    roundtrip = std::max(roundtrip, norm(from_half_line(to_half_line(x, half), base, slots_per_unit) - x));
  rep.add("matches_standard_shift", all.value, tol, all.where);
  rep.add("integer_times", integer.value, tol, integer.where);
  rep.add("zero_probe", zero.value, tol, zero.where);
  rep.add("identification_roundtrip", roundtrip, tol);
  return rep;
}

// --- sequence module examples -----------------------------------------------

namespace {

struct SequenceModel {
  AlgebraSignature sig;
  SpecPtr spec;
  GridVector f;
};

SequenceModel nondecex_model(int points) {
  if (points < 1) throw std::invalid_argument("nondecex: need at least one point");
  AlgebraSignature sig = AlgebraSignature::diagonal(points);
  SpecPtr spec = make_spec(1, IndexKind::unilateral, sig, 1);
  GridVector f(spec);
  for (int k = 1; k <= points; ++k) f.add(k - 1, point_fiber(sig, static_cast<std::size_t>(k - 1), 1.0));
  return {sig, spec, f};
}

}  // namespace

double nondecex_check(int points, int n, int m) {
  if (n < 0 || m < 0) throw std::invalid_argument("nondecex: powers must be nonnegative");
  const SequenceModel model = nondecex_model(points);
  const GridOperator vn = standard_shift(model.spec, GridTime{n});
  const GridOperator vm = standard_shift(model.spec, GridTime{m});
  return norm(vn(vn.adjoint_apply(model.f)) - vm(vm.adjoint_apply(model.f)));
}

std::vector<double> nondecex_decay(int points) {
  const SequenceModel model = nondecex_model(points);
  const GridOperator v = standard_shift(model.spec, GridTime{1});
  std::vector<double> out;
  GridVector y = model.f;
  for (int n = 0; n <= points; ++n) {
    out.push_back(norm(y));
    y = v.adjoint_apply(y);
  }
  return out;
}

double nonsc_check(int points, int slots_per_unit, GridTime t) {
  if (points < 1) throw std::invalid_argument("nonsc: need at least one point");
  const std::int64_t need = static_cast<std::int64_t>(points) * (points + 1);
  if (slots_per_unit < need)
    throw std::invalid_argument("nonsc: grid too coarse, need N >= K(K+1) = " + std::to_string(need));
  const AlgebraSignature sig = AlgebraSignature::diagonal(points);
  const SpecPtr spec = make_spec(slots_per_unit, IndexKind::unilateral, sig, 1);
  GridVector g(spec);
  for (int k = 1; k <= points; ++k) {
    const double height = std::sqrt(static_cast<double>(k) * (k + 1));
    // Slot j samples x_j = j / N; x_j in [1/(k+1), 1/k) in exact integer arithmetic.
    for (std::int64_t j = 0; j < slots_per_unit; ++j)
      if (j * (k + 1) >= slots_per_unit && j * k < slots_per_unit)
        g.add(j, point_fiber(sig, static_cast<std::size_t>(k - 1), height));
  }
  return norm(standard_shift(spec, t)(g) - g);
}

std::vector<RefinementRow> nonsc_continuous_probe(int points, const std::vector<int>& slots_per_unit) {
  const AlgebraSignature sig = AlgebraSignature::diagonal(points);
  std::vector<RefinementRow> rows;
  for (int n : slots_per_unit) {
    const SpecPtr spec = make_spec(n, IndexKind::unilateral, sig, 1);
    const GridVector x = sample_profile(
        spec, [](double u) { return std::sin(std::numbers::pi * u); }, constant_fiber(sig, 1.0), GridTime{0},
        GridTime{n});
    rows.push_back({n, norm(standard_shift(spec, GridTime{1})(x) - x)});
  }
  return rows;
}

// --- ideal-valued half line -------------------------------------------------

ShadowRow nonadex_shadow(int samples, GridTime t, std::int64_t window) {
  if (t.slots < 1) throw std::invalid_argument("nonadex_shadow: t must be at least one slot");
  const AlgebraSignature sig = AlgebraSignature::diagonal(samples);
  const SpecPtr spec = make_spec(1, IndexKind::bilateral, sig, 1);
  std::vector<Matrix> ideal_blocks;
  for (int i = 0; i < samples; ++i) ideal_blocks.push_back(Matrix::Constant(1, 1, i == 0 ? 0.0 : 1.0));
  const AlgebraElement ideal(sig, ideal_blocks);
  auto into_space = [ideal](const GridVector& f) {
    GridVector out(f.spec_ptr());
    for (const auto& [slot, v] : f.entries()) {
      ModuleVector w = slot < 0 ? v * ideal : v;
      if (!w.is_zero()) out.set(slot, std::move(w));
    }
    return out;
  };
  const GridOperator fwd = bilateral_shift(spec, t.slots);
  const GridOperator back = bilateral_shift(spec, -t.slots);
  auto complement = [&](const GridVector& x) { return x - fwd(into_space(back(x))); };

  ShadowRow row;
  row.samples = samples;
  std::vector<ModuleVector> images;
  const auto [first, count] = std::make_pair(-window, 2 * window);
  for (const auto& p : basis_probes(spec, -window, 2 * window)) {
    const GridVector x = into_space(p);
    if (x.empty()) continue;
    const GridVector cx = complement(x);
    row.complement_norm = std::max(row.complement_norm, norm(cx) / norm(x));
    images.push_back(flatten(cx, first, count));
  }
  const RangeFrame rf = range_frame(images);
  row.complement_dims = rf.block_dims;
  const auto met = std::count_if(rf.block_dims.begin(), rf.block_dims.end(), [](int d) { return d > 0; });
  row.fraction = static_cast<double>(met) / samples;
  return row;
}

DecompositionResult nonadex_full_ideal(int samples, std::int64_t window, double tol) {
  const AlgebraSignature sig = AlgebraSignature::diagonal(samples);
  const SpecPtr spec = make_spec(1, IndexKind::bilateral, sig, 1);
  return decompose(Isometry{spec, bilateral_shift(spec, 1)}, basis_probes(spec, -window, 2 * window),
                   static_cast<int>(2 * window + 2), tol);
}

// --- Weyl relations ---------------------------------------------------------

WeylResult weyl_check(int slots_per_unit, std::int64_t window, std::int64_t s_slots, double t, int probe_count,
                      Rng& rng) {
  const SpecPtr spec = make_spec(slots_per_unit, IndexKind::bilateral, AlgebraSignature::scalars(), 1);
  const GridOperator c = bilateral_shift(spec, s_slots) * multiplication_phase(spec, t) *
                         bilateral_shift(spec, -s_slots) * multiplication_phase(spec, -t);
  WeylResult out;
  out.expected_phase = std::polar(1.0, -static_cast<double>(s_slots) * spec->step() * t);
  for (int i = 0; i < probe_count; ++i) {
    const GridVector x = random_vector(spec, -window, 2 * window, rng);
    const GridVector cx = c(x);
    out.residual = std::max(out.residual, norm(cx - x * out.expected_phase));
    const Complex phase = inner_product(x, cx).block(0)(0, 0) / inner_product(x, x).block(0)(0, 0);
    out.probe_phases.push_back(phase);
  }
  for (const auto& ph : out.probe_phases)
    out.phase_spread = std::max(out.phase_spread, std::abs(ph - out.probe_phases.front()));
  return out;
}

}  // namespace shiftmod
