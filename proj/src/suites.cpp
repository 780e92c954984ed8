#include "shiftmod/suites.hpp"

#include <algorithm>

namespace shiftmod {

StageReport algebra_suite(const AlgebraSignature& sig, int rank, int samples, Rng& rng, double tol) {
  StageReport rep{"algebra", {}, {}};
  double conj = 0.0, linear = 0.0, positive = 0.0, cs = 0.0, pairing = 0.0, involution = 0.0, operator_norm = 0.0;
  for (int i = 0; i < samples; ++i) {
    const ModuleVector x = ModuleVector::random(sig, rank, rng);
    const ModuleVector y = ModuleVector::random(sig, rank, rng);
    const AlgebraElement b = AlgebraElement::random(sig, rng);
    const ModuleOperator t = ModuleOperator::random(sig, rank, rank, rng);
    conj = std::max(conj, distance(inner_product(x, y).star(), inner_product(y, x)));
    linear = std::max(linear, distance(inner_product(x, y * b), inner_product(x, y) * b));
    positive = std::max(positive, std::max(0.0, -inner_product(x, x).min_eigenvalue()));
    cs = std::max(cs, std::max(0.0, inner_product(x, y).norm() - norm(x) * norm(y)));
    pairing = std::max(pairing, distance(inner_product(t * x, y), inner_product(x, t.adjoint() * y)));
    involution = std::max(involution, (t.adjoint().adjoint() - t).norm());
    operator_norm = std::max(operator_norm, std::abs(t.adjoint().norm() - t.norm()));
  }
  rep.add("conjugate_symmetry", conj, tol);
  rep.add("module_linearity", linear, tol);
  rep.add("positivity", positive, tol);
  rep.add("cauchy_schwarz", cs, tol);
  rep.add("adjoint_pairing", pairing, tol);
  rep.add("adjoint_involution", involution, tol);
  rep.add("adjoint_isometric", operator_norm, tol);

  std::vector<ModuleVector> gens;
  for (int i = 0; i < rank + 1; ++i) gens.push_back(ModuleVector::random(sig, rank, rng));
  gens.push_back(gens.front() + gens.back());
  const RangeFrame once = range_frame(gens);
  const RangeFrame twice = range_frame(once.frame);
  rep.add("range_frame_span", once.span_residual, tol);
  rep.add("range_frame_idempotent",
          std::max(twice.span_residual, once.block_dims == twice.block_dims ? 0.0 : 1.0), tol);
  rep.data["samples"] = samples;
  return rep;
}

StageReport grid_suite(const SpecPtr& spec, std::int64_t horizon_units, int samples, Rng& rng, double tol) {
  StageReport rep{"grid", {}, {}};
  const std::int64_t span = horizon_units * spec->slots_per_unit();
  const int rank = spec->fiber_rank();
  const AlgebraSignature& sig = spec->signature();

  std::vector<GridVector> probes;
  for (int i = 0; i < samples; ++i) probes.push_back(random_vector(spec, 0, span, rng));

  struct Family {
    std::string name;
    GridOperator op;
  };
  const std::int64_t a = rng.index(span), b = a + 1 + rng.index(span - a);
  std::vector<Family> families;
  const GridTime t{rng.range(1, span)};
  families.push_back({"standard_shift", standard_shift(spec, t)});
  families.push_back({"indicator", indicator(spec, GridTime{a}, GridTime{b})});
  families.push_back({"cyclic_shift", cyclic_shift(spec, GridTime{a}, GridTime{b}, GridTime{rng.index(b - a)})});
  families.push_back({"multiplication_phase", multiplication_phase(spec, 2.0 * rng.uniform() - 1.0)});
  families.push_back({"fiber_operator", fiber_operator(spec, ModuleOperator::random(sig, rank, rank, rng))});
  const std::int64_t count = std::min<std::int64_t>(span, 4);
  families.push_back(
      {"window_operator", window_operator(spec, 0, count, ModuleOperator::random_unitary(sig, count * rank, rng))});

  WorstCase pairing;
  int propagation_violations = 0;
  for (const auto& fam : families) {
    for (std::size_t i = 0; i < probes.size(); ++i) {
      pairing.update(adjoint_pairing_residual(fam.op, probes[i], probes[(i + 1) % probes.size()]), fam.name);
      if (!respects_propagation(fam.op, probes[i])) ++propagation_violations;
    }
  }
  rep.add("adjoint_pairing", pairing.value, tol, pairing.where);
  rep.add("propagation", propagation_violations, 0.0);

  WorstCase iso, law, pure;
  for (int k = 0; k < samples; ++k) {
    const GridTime r{rng.range(0, span)}, s{rng.range(0, span)};
    const GridOperator vr = standard_shift(spec, r), vs = standard_shift(spec, s);
    const GridOperator vrs = standard_shift(spec, GridTime{r.slots + s.slots});
    const std::string where = "r=" + std::to_string(r.slots) + " t=" + std::to_string(s.slots);
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const GridVector& f = probes[i];
      const GridVector& g = probes[(i + 1) % probes.size()];
      iso.update(distance(inner_product(vr(f), vr(g)), inner_product(f, g)), where);
      law.update(norm(vr(vs(f)) - vrs(f)), where);
    }
  }
  const GridOperator beyond = standard_shift(spec, GridTime{span});
  for (const auto& f : probes) pure.update(norm(beyond.adjoint_apply(f)), "t=" + std::to_string(span));
  rep.add("shift_isometry", iso.value, tol, iso.where);
  rep.add("shift_semigroup_law", law.value, tol, law.where);
  rep.add("shift_pure_beyond_support", pure.value, tol, pure.where);
  rep.data["families"] = families.size();
  return rep;
}

}  // namespace shiftmod
