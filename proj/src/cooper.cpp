#include "shiftmod/cooper.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <utility>

namespace shiftmod {

namespace {

using Slots = std::int64_t;

std::string tag(std::initializer_list<std::pair<const char*, Slots>> items) {
  std::string out;
  for (const auto& [name, value] : items) {
    if (!out.empty()) out += ' ';
    out += name;
    out += '=';
    out += std::to_string(value);
  }
  return out;
}

Slots positive_mod(Slots a, Slots m) {
  const Slots r = a % m;
  return r < 0 ? r + m : r;
}

GridOperator p(const AbstractSemigroup& s, Slots a, std::optional<Slots> b) {
  return interval_projection(s, GridTime{a}, b ? TimeBound(GridTime{*b}) : std::nullopt).op;
}

GridOperator p(const AbstractSemigroup& s, Slots a, Slots b) { return p(s, a, std::optional<Slots>(b)); }

GridOperator p_inf(const AbstractSemigroup& s, Slots a) { return p(s, a, std::nullopt); }

GridOperator shift(const AbstractSemigroup& s, Slots t) { return s.at(GridTime{t}); }

double pairing_residual(const GridOperator& t, const std::vector<GridVector>& probes) {
  double worst = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& g = probes[(i + 1) % probes.size()];
    worst = std::max(worst, adjoint_pairing_residual(t, probes[i], g));
  }
  return worst;
}

double max_diff(const std::vector<GridVector>& probes, const std::function<GridVector(const GridVector&)>& lhs,
                const std::function<GridVector(const GridVector&)>& rhs) {
  double worst = 0.0;
  for (const auto& x : probes) worst = std::max(worst, norm(lhs(x) - rhs(x)));
  return worst;
}

std::pair<Slots, Slots> random_interval(Rng& rng, Slots max_slots) {
  const Slots a = rng.range(0, max_slots - 1);
  const Slots b = rng.range(a + 1, max_slots);
  return {a, b};
}

}  // namespace

// --- semigroups -------------------------------------------------------------

AbstractSemigroup standard_shift_semigroup(const SpecPtr& space) {
  if (space->kind() != IndexKind::unilateral)
    throw std::invalid_argument("standard shift semigroup needs a unilateral grid");
  return {space, [space](GridTime t) { return standard_shift(space, t); }, true, "standard_shift"};
}

AbstractSemigroup disguise(const AbstractSemigroup& s, const GridOperator& v) {
  auto inner = s.at;
  const GridOperator vd = v.adjoint();
  return {s.space, [inner, v, vd](GridTime t) { return v * inner(t) * vd; }, s.declared_pure,
          s.label + "+disguise"};
}

GridOperator random_window_unitary(const SpecPtr& space, std::int64_t window_units, Rng& rng) {
  if (window_units < 1) throw std::invalid_argument("disguise window must be at least one unit");
  if (space->fiber().projection)
    throw std::invalid_argument("random window unitary needs a free fiber (no fiber projection)");
  const std::int64_t count = window_units * space->slots_per_unit();
  const auto u = ModuleOperator::random_unitary(space->signature(), static_cast<int>(count) * space->fiber_rank(), rng);
  return window_operator(space, 0, count, u);
}

AbstractSemigroup nonpure_semigroup(int slots_per_unit, const AlgebraSignature& signature, int shift_rank,
                                    int unitary_rank) {
  if (shift_rank < 1 || unitary_rank < 1) throw std::invalid_argument("nonpure semigroup needs both parts");
  const int rank = shift_rank + unitary_rank;
  auto space = make_spec(slots_per_unit, IndexKind::bilateral, signature, rank);
  std::vector<int> unitary_coords;
  for (int k = shift_rank; k < rank; ++k) unitary_coords.push_back(k);
  const auto keep_unitary = ModuleOperator::coordinate_projection(signature, rank, unitary_coords);
  // Shift coordinates live on slots >= 0 only.
  auto restrict = [keep_unitary](const GridVector& f) {
    GridVector out(f.spec_ptr());
    for (const auto& [slot, v] : f.entries()) out.set(slot, slot < 0 ? keep_unitary.apply(v) : v);
    return out;
  };
  auto at = [space, restrict](GridTime t) {
    const GridOperator b = bilateral_shift(space, t.slots);
    const GridOperator back = bilateral_shift(space, -t.slots);
    return GridOperator([b](const GridVector& f) { return b.apply(f); },
                        [back, restrict](const GridVector& f) { return restrict(back.apply(f)); }, t.slots);
  };
  return {space, at, false, "shift+bilateral_unitary"};
}

// --- interval projections ---------------------------------------------------

IntervalProjection interval_projection(const AbstractSemigroup& s, GridTime a, TimeBound b,
                                       const std::vector<GridVector>* pairing_probes, double tol) {
  if (b && *b <= a) return {a, b, GridOperator::zero()};
  const GridOperator sa = s.at(a);
  if (pairing_probes && !pairing_probes->empty()) {
    const double r = pairing_residual(sa, *pairing_probes);
    if (!(r <= tol))
      throw DiagnosticError("semigroup adjoint failure at t=" + std::to_string(a.slots) +
                            " slots: pairing residual " + std::to_string(r));
  }
  GridOperator op = sa * sa.adjoint();
  if (b) {
    const GridOperator sb = s.at(*b);
    if (pairing_probes && !pairing_probes->empty()) {
      const double r = pairing_residual(sb, *pairing_probes);
      if (!(r <= tol))
        throw DiagnosticError("semigroup adjoint failure at t=" + std::to_string(b->slots) +
                              " slots: pairing residual " + std::to_string(r));
    }
    op = op - sb * sb.adjoint();
  }
  return {a, b, op};
}

StageReport verify_semigroup(const AbstractSemigroup& s, const std::vector<GridVector>& probes,
                             std::int64_t max_slots, int samples, Rng& rng, double tol) {
  StageReport rep{"semigroup", {}, {}};
  rep.add("identity_at_zero", operator_residual(shift(s, 0), GridOperator::identity(), probes), tol);
  WorstCase law, iso, pair, inverse;
  for (int i = 0; i < samples; ++i) {
    const Slots r = rng.range(0, max_slots);
    const Slots t = rng.range(0, max_slots);
    const std::string where = tag({{"r", r}, {"t", t}});
    law.update(operator_residual(shift(s, r) * shift(s, t), shift(s, r + t), probes), where);
    const GridOperator st = shift(s, t);
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const auto& f = probes[k];
      const auto& g = probes[(k + 1) % probes.size()];
      iso.update(distance(inner_product(st(f), st(g)), inner_product(f, g)), where);
      inverse.update(norm(st.adjoint_apply(st(f)) - f), where);
    }
    pair.update(pairing_residual(st, probes), where);
  }
  rep.add("semigroup_law", law.value, tol, law.where);
  rep.add("isometry", iso.value, tol, iso.where);
  rep.add("adjoint_left_inverse", inverse.value, tol, inverse.where);
  rep.add("adjoint_pairing", pair.value, tol, pair.where);
  return rep;
}

StageReport verify_pab_calculus(const AbstractSemigroup& s, const std::vector<GridVector>& probes,
                                std::int64_t max_slots, int samples, Rng& rng, double tol) {
  StageReport rep{"pab_calculus", {}, {}};
  WorstCase proj, product, product_inf, shift_left, shift_right, adj_left, adj_right;
  WorstCase maps_into, isometric, onto;
  for (int i = 0; i < samples; ++i) {
    const Slots t = i == 0 ? 0 : rng.range(0, max_slots);
    const auto [a, b] = random_interval(rng, max_slots);
    const auto [c, d] = random_interval(rng, max_slots);
    const std::string where = tag({{"t", t}, {"a", a}, {"b", b}, {"c", c}, {"d", d}});
    const GridOperator pab = p(s, a, b);
    const GridOperator st = shift(s, t);
    const GridOperator sd = st.adjoint();
    const Slots a_low = std::max<Slots>(a - t, 0);
    const Slots b_low = std::max<Slots>(b - t, 0);

    proj.update(std::max(operator_residual(pab * pab, pab, probes),
                         max_diff(probes, [&](const GridVector& x) { return pab.apply(x); },
                                  [&](const GridVector& x) { return pab.adjoint_apply(x); })),
                where);
    product.update(operator_residual(pab * p(s, c, d), p(s, std::max(a, c), std::min(b, d)), probes), where);
    product_inf.update(std::max({operator_residual(p_inf(s, a) * p(s, c, d), p(s, std::max(a, c), d), probes),
                                 operator_residual(pab * p_inf(s, c), p(s, std::max(a, c), b), probes),
                                 operator_residual(p_inf(s, a) * p_inf(s, c), p_inf(s, std::max(a, c)), probes)}),
                       where);
    shift_left.update(operator_residual(st * pab, p(s, a + t, b + t) * st, probes), where);
    shift_right.update(operator_residual(pab * st, st * p(s, a_low, b_low), probes), where);
    adj_left.update(operator_residual(sd * pab, p(s, a_low, b_low) * sd, probes), where);
    adj_right.update(operator_residual(pab * sd, sd * p(s, a + t, b + t), probes), where);

    const GridOperator target = p(s, a + t, b + t);
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const GridVector x = pab(probes[k]);
      const GridVector y = pab(probes[(k + 1) % probes.size()]);
      const GridVector sx = st(x);
      maps_into.update(norm(target(sx) - sx), where);
      isometric.update(distance(inner_product(sx, st(y)), inner_product(x, y)), where);
      const GridVector z = target(probes[k]);
      onto.update(norm(st(sd(z)) - z), where);
    }
  }
  rep.add("projection", proj.value, tol, proj.where);
  rep.add("product", product.value, tol, product.where);
  rep.add("product_infinite_end", product_inf.value, tol, product_inf.where);
  rep.add("shift_then_project", shift_left.value, tol, shift_left.where);
  rep.add("project_then_shift", shift_right.value, tol, shift_right.where);
  rep.add("adjoint_then_project", adj_left.value, tol, adj_left.where);
  rep.add("project_then_adjoint", adj_right.value, tol, adj_right.where);
  rep.add("restriction_maps_into", maps_into.value, tol, maps_into.where);
  rep.add("restriction_isometric", isometric.value, tol, isometric.where);
  rep.add("restriction_onto", onto.value, tol, onto.where);
  return rep;
}

// --- window groups ----------------------------------------------------------

WindowGroup window_group(const AbstractSemigroup& s, GridTime a, GridTime b) {
  if (!(a < b)) throw std::invalid_argument("window group needs a < b");
  const Slots lo = a.slots;
  const Slots hi = b.slots;
  const Slots len = hi - lo;
  auto at = [s, lo, hi, len](Slots t) {
    const Slots tau = positive_mod(t, len);
    if (tau == 0) return p(s, lo, hi);
    return shift(s, tau) * p(s, lo, hi - tau) + shift(s, len - tau).adjoint() * p(s, hi - tau, hi);
  };
  auto alt = [s, lo, hi, len](Slots t) {
    const Slots tau = positive_mod(t, len);
    if (tau == 0) return p(s, lo, hi);
    return p(s, lo + tau, hi) * shift(s, tau) + p(s, lo, lo + tau) * shift(s, len - tau).adjoint();
  };
  return {a, b, at, alt};
}

StageReport verify_window_group(const AbstractSemigroup& s, GridTime a, GridTime b,
                                const std::vector<GridVector>& probes, double tol) {
  StageReport rep{"window_group", {}, {}};
  const WindowGroup u = window_group(s, a, b);
  const Slots len = u.period();
  const GridOperator pab = p(s, a.slots, b.slots);
  std::vector<GridVector> inside;
  for (const auto& x : probes) inside.push_back(pab(x));

  WorstCase below, above, isometric, onto, forms, maps_into;
  std::vector<GridOperator> ops;
  for (Slots t = 0; t < len; ++t) ops.push_back(u.at(t));
  for (Slots r = 0; r < len; ++r) {
    for (Slots t = 0; t < len; ++t) {
      const std::string where = tag({{"r", r}, {"t", t}});
      const double res = operator_residual(ops[r] * ops[t], ops[positive_mod(r + t, len)], probes);
      (r + t < len ? below : above).update(res, where);
    }
  }
  for (Slots t = 0; t < len; ++t) {
    const std::string where = tag({{"t", t}});
    const GridOperator& ut = ops[t];
    forms.update(operator_residual(ut, u.at_alternate(t), probes), where);
    for (std::size_t k = 0; k < inside.size(); ++k) {
      const GridVector& x = inside[k];
      const GridVector& y = inside[(k + 1) % inside.size()];
      const GridVector ux = ut(x);
      isometric.update(distance(inner_product(ux, ut(y)), inner_product(x, y)), where);
      onto.update(std::max(norm(ut(ut.adjoint_apply(x)) - x), norm(ut.adjoint_apply(ux) - x)), where);
      maps_into.update(norm(pab(ux) - ux), where);
    }
  }
  // Period wrap: u_{t + L} = u_t.
  const double wrap = operator_residual(u.at(len + 1), ops[1 % len], probes);

  rep.add("identity_at_zero", operator_residual(u.at(0), pab, probes), tol);
  rep.add("group_law_short", below.value, tol, below.where.empty() ? "branch r+t<L" : "branch r+t<L " + below.where);
  if (len > 1) rep.add("group_law_wrap", above.value, tol, "branch r+t>=L " + above.where);
  rep.add("periodic_extension", wrap, tol);
  rep.add("forms_agree", forms.value, tol, forms.where);
  rep.add("unitary_isometric", isometric.value, tol, isometric.where);
  rep.add("unitary_onto", onto.value, tol, onto.where);
  rep.add("maps_into_window", maps_into.value, tol, maps_into.where);
  rep.data["period_slots"] = len;
  rep.data["pairs_checked"] = len * len;
  return rep;
}

// --- averaging --------------------------------------------------------------

GridOperator averaging_projection(const AbstractSemigroup& s, GridTime a, GridTime b) {
  const WindowGroup u = window_group(s, a, b);
  std::vector<GridOperator> ops;
  for (Slots t = 0; t < u.period(); ++t) ops.push_back(u.at(t));
  return average(std::move(ops));
}

StageReport verify_averaging(const AbstractSemigroup& s, GridTime a, GridTime b,
                             const std::vector<GridVector>& probes, double tol) {
  StageReport rep{"averaging", {}, {}};
  const GridOperator q = averaging_projection(s, a, b);
  const GridOperator pab = p(s, a.slots, b.slots);
  const WindowGroup u = window_group(s, a, b);
  std::vector<GridVector> qx;
  for (const auto& x : probes) qx.push_back(q(x));

  double idem = 0.0, selfadj = 0.0, sub = 0.0, inv = 0.0;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const GridVector& x = probes[k];
    idem = std::max(idem, norm(q(qx[k]) - qx[k]));
    selfadj = std::max({selfadj, norm(q.adjoint_apply(x) - qx[k]),
                        distance(inner_product(qx[k], probes[(k + 1) % probes.size()]),
                                 inner_product(x, qx[(k + 1) % probes.size()]))});
    sub = std::max({sub, norm(pab(qx[k]) - qx[k]), norm(q(pab(x)) - qx[k])});
  }
  WorstCase invariance;
  for (Slots r = 0; r < u.period(); ++r) {
    const GridOperator ur = u.at(r);
    for (const auto& z : qx) invariance.update(norm(ur(z) - z), tag({{"r", r}}));
  }
  inv = invariance.value;
  rep.add("idempotent", idem, tol);
  rep.add("self_adjoint", selfadj, tol);
  rep.add("subprojection", sub, tol);
  rep.add("window_invariance", inv, tol, invariance.where);
  return rep;
}

std::vector<NestedIntervals> random_nested_intervals(const GridSpec& spec, std::int64_t units, int count, Rng& rng) {
  const Slots max_slots = units * spec.slots_per_unit();
  if (max_slots < 2) throw std::invalid_argument("nested intervals need at least two slots");
  std::vector<NestedIntervals> out;
  for (int i = 0; i < count; ++i) {
    const Slots a = rng.range(0, max_slots - 2);
    const Slots b = rng.range(a + 2, max_slots);
    const Slots c = rng.range(a, b - 1);
    const Slots d = rng.range(c + 1, b);
    out.push_back({{a}, {b}, {c}, {d}});
  }
  return out;
}

StageReport verify_ratio(const AbstractSemigroup& s, const std::vector<NestedIntervals>& tuples,
                         const std::vector<GridVector>& probes, double tol) {
  StageReport rep{"ratio", {}, {}};
  WorstCase ratio;
  for (const auto& [a, b, c, d] : tuples) {
    if (!(a <= c && c < d && d <= b)) throw std::invalid_argument("ratio identity needs a <= c < d <= b");
    const GridOperator pcd = p(s, c.slots, d.slots);
    const GridOperator lhs = pcd * averaging_projection(s, a, b) * pcd;
    const double factor = static_cast<double>(d.slots - c.slots) / static_cast<double>(b.slots - a.slots);
    const GridOperator rhs = Complex(factor) * averaging_projection(s, c, d);
    ratio.update(operator_residual(lhs, rhs, probes),
                 tag({{"a", a.slots}, {"b", b.slots}, {"c", c.slots}, {"d", d.slots}}));
  }
  rep.add("ratio", ratio.value, tol, ratio.where);
  rep.data["tuples"] = tuples.size();
  return rep;
}

// --- convergence ------------------------------------------------------------

std::vector<ConvergenceRow> limit_convergence(const AbstractSemigroup& s, const GridVector& x,
                                              const std::vector<int>& n_values, double tol) {
  const Slots units = s.space->slots_per_unit();
  const GridVector px = p(s, 0, units)(x);
  if (!(norm(px - x) <= tol * std::max(1.0, norm(x))))
    throw std::invalid_argument("limit_convergence: x must lie in E_{0,1}");
  std::vector<ConvergenceRow> rows;
  for (int n : n_values) {
    if (n < 1 || units % n != 0)
      throw std::invalid_argument("limit_convergence: n = " + std::to_string(n) + " does not divide " +
                                  std::to_string(units) + " slots per unit");
    const Slots piece = units / n;
    GridVector sum(s.space);
    for (Slots k = 0; k < n; ++k) sum += averaging_projection(s, GridTime{k * piece}, GridTime{(k + 1) * piece})(x);
    double witness = 0.0;
    for (Slots t = 0; t <= piece; ++t) {
      const GridOperator st = shift(s, t);
      witness = std::max(witness, norm(st(x) - x) + norm(st.adjoint_apply(x) - x));
    }
    rows.push_back({n, norm(sum - x), witness});
  }
  return rows;
}

StageReport verify_limit(const std::vector<ConvergenceRow>& rows, double tol) {
  StageReport rep{"limit", {}, {}};
  WorstCase monotone, bound;
  bool strict = true;
  nlohmann::json table = nlohmann::json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    table.push_back({{"n", r.n}, {"residual", r.residual}, {"witness", r.witness}});
    bound.update(std::max(0.0, r.residual - r.witness), tag({{"n", r.n}}));
    if (i > 0) {
      monotone.update(std::max(0.0, r.residual - rows[i - 1].residual), tag({{"n", r.n}}));
      if (!(r.residual < rows[i - 1].residual)) strict = false;
    }
  }
  rep.add("monotone", monotone.value, tol, monotone.where);
  rep.add("witness_bound", bound.value, tol, bound.where);
  rep.data["table"] = table;
  rep.data["strictly_decreasing"] = strict;
  return rep;
}

StageReport verify_q_relations(const AbstractSemigroup& s, const std::vector<GridVector>& z,
                               const std::vector<GridVector>& w, const std::vector<GridVector>& probes,
                               int samples, Rng& rng, std::int64_t max_slots, double tol) {
  StageReport rep{"q_relations", {}, {}};
  const Slots units = s.space->slots_per_unit();
  const WindowGroup u01 = window_group(s, GridTime{0}, GridTime{units});
  WorstCase chain, commute, additivity, lebesgue;
  double disjoint = 0.0;
  for (int i = 0; i < samples; ++i) {
    if (units > 1) {
      const Slots r = rng.range(1, units - 1);
      const GridOperator sr = shift(s, r);
      const GridOperator end = p(s, r, units);
      for (const auto& zz : z) {
        const GridVector target = end(zz);
        const double res = std::max({norm(sr(p(s, 0, units - r)(zz)) - target), norm(end(sr(zz)) - target),
                                     norm(end(u01.at(r)(zz)) - target)});
        chain.update(res, tag({{"r", r}}));
      }
    }
    {
      const Slots r = rng.range(0, max_slots);
      const auto [a, b] = random_interval(rng, max_slots);
      const GridOperator lhs = shift(s, r) * averaging_projection(s, GridTime{a}, GridTime{b});
      const GridOperator rhs = averaging_projection(s, GridTime{a + r}, GridTime{b + r}) * shift(s, r);
      commute.update(operator_residual(lhs, rhs, probes), tag({{"r", r}, {"a", a}, {"b", b}}));
    }
    if (units > 1) {
      const Slots r = rng.range(1, units - 1);
      const Slots t = rng.range(1, std::max<Slots>(1, units - r));
      if (r + t <= units) {
        for (const auto& zz : z) {
          const GridVector lhs = p(s, 0, r + t)(zz);
          const GridVector rhs = p(s, 0, r)(zz) + shift(s, r)(p(s, 0, t)(zz));
          additivity.update(norm(lhs - rhs), tag({{"r", r}, {"t", t}}));
        }
      }
    }
    {
      const auto [c1, d1] = random_interval(rng, units);
      const auto [c2, d2] = random_interval(rng, units);
      const Slots overlap = std::max<Slots>(0, std::min(d1, d2) - std::max(c1, c2));
      const double mu = static_cast<double>(overlap) / static_cast<double>(units);
      for (std::size_t k = 0; k < z.size(); ++k) {
        const GridVector& zz = z[k];
        const GridVector& ww = w[k % w.size()];
        const AlgebraElement lhs = inner_product(p(s, c1, d1)(zz), p(s, c2, d2)(ww));
        lebesgue.update(distance(lhs, inner_product(zz, ww) * Complex(mu)),
                        tag({{"c1", c1}, {"d1", d1}, {"c2", c2}, {"d2", d2}}));
      }
    }
  }
  if (units > 1) {
    const Slots mid = units / 2;
    for (std::size_t k = 0; k < z.size(); ++k)
      disjoint = std::max(disjoint, inner_product(p(s, 0, mid)(z[k]), p(s, mid, units)(w[k % w.size()])).norm());
  }
  rep.add("shift_chain", chain.value, tol, chain.where);
  rep.add("shift_commutes_with_q", commute.value, tol, commute.where);
  rep.add("additivity", additivity.value, tol, additivity.where);
  rep.add("lebesgue_inner_product", lebesgue.value, tol, lebesgue.where);
  rep.add("disjoint_orthogonal", disjoint, tol);
  return rep;
}

// --- multiplicity module and the map M --------------------------------------

MultiplicityModule extract_multiplicity(const AbstractSemigroup& s, std::int64_t probe_slots, double rank_tol) {
  const SpecPtr& space = s.space;
  if (space->fiber_rank() < 1) throw DiagnosticError("extract_multiplicity: fiber rank 0, nothing to probe");
  if (probe_slots < 1) throw std::invalid_argument("extract_multiplicity: empty probe window");
  const Slots units = space->slots_per_unit();
  const auto probes = basis_probes(space, 0, probe_slots);
  const GridOperator q = averaging_projection(s, GridTime{0}, GridTime{units});
  std::vector<GridVector> images;
  images.reserve(probes.size());
  for (const auto& x : probes) images.push_back(q(x));

  const auto [first, count] = common_window(images);
  if (count == 0) throw DiagnosticError("extract_multiplicity: q_{0,1} annihilates every probe (rank collapse)");
  std::vector<ModuleVector> flat;
  flat.reserve(images.size());
  for (const auto& g : images) flat.push_back(flatten(g, first, count));
  RangeFrame rf = range_frame(flat, rank_tol);
  if (rf.frame.empty())
    throw DiagnosticError("extract_multiplicity: empty frame, input is not pure or degenerate");

  MultiplicityModule out{{}, rf.gram, rf.block_dims, rf.span_residual, 0.0, 0.0};
  for (const auto& f : rf.frame) out.frame.push_back(unflatten(space, f, first));

  const GridOperator far = shift(s, probe_slots);
  for (const auto& x : probes) {
    const double scale = norm(x);
    if (scale > 0.0) out.pureness_residual = std::max(out.pureness_residual, norm(far.adjoint_apply(x)) / scale);
  }
  const WindowGroup u01 = window_group(s, GridTime{0}, GridTime{units});
  for (Slots r = 0; r < units; ++r) {
    const GridOperator ur = u01.at(r);
    for (const auto& f : out.frame) out.invariance_residual = std::max(out.invariance_residual, norm(ur(f) - f));
  }
  return out;
}

EquivalenceMap build_equivalence(const AbstractSemigroup& s, const MultiplicityModule& f, std::int64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("build_equivalence: horizon must be at least 1");
  if (f.frame.empty()) throw std::invalid_argument("build_equivalence: empty multiplicity frame");
  const SpecPtr space = s.space;
  const Slots units = space->slots_per_unit();
  const int m = static_cast<int>(f.frame.size());
  const AlgebraSignature& sig = space->signature();
  SpecPtr source = make_spec(static_cast<int>(units), IndexKind::unilateral, FiberSpec{sig, m, f.gram});

  // pieces[j'][l] = p_{j', j'+1} f_l.
  auto pieces = std::make_shared<std::vector<std::vector<GridVector>>>();
  for (Slots j = 0; j < units; ++j) {
    const GridOperator pj = p(s, j, j + 1);
    std::vector<GridVector> row;
    for (const auto& fl : f.frame) row.push_back(pj(fl));
    pieces->push_back(std::move(row));
  }
  auto at = s.at;
  const double inv_h = static_cast<double>(units);

  auto forward = [space, pieces, at, units, horizon, m](const GridVector& g) {
    GridVector out(space);
    for (Slots k = 0; k < horizon; ++k) {
      GridVector unit(space);
      bool any = false;
      for (Slots jp = 0; jp < units; ++jp) {
        auto it = g.entries().find(k * units + jp);
        if (it == g.entries().end()) continue;
        any = true;
        for (int l = 0; l < m; ++l) unit += (*pieces)[jp][l] * it->second.entry(l);
      }
      if (any) out += at(GridTime{k * units})(unit);
    }
    if (auto r = g.support_range(); r && (r->first < 0 || r->second >= horizon * units))
      throw std::out_of_range("equivalence map: input supported outside the horizon");
    return out;
  };
  auto backward = [source, pieces, at, units, horizon, m, inv_h](const GridVector& x) {
    GridVector out(source);
    for (Slots k = 0; k < horizon; ++k) {
      const GridVector y = at(GridTime{k * units}).adjoint_apply(x);
      if (y.empty()) continue;
      for (Slots jp = 0; jp < units; ++jp) {
        std::vector<AlgebraElement> coeffs;
        coeffs.reserve(static_cast<std::size_t>(m));
        for (int l = 0; l < m; ++l) coeffs.push_back(inner_product((*pieces)[jp][l], y) * Complex(inv_h));
        ModuleVector v = ModuleVector::from_entries(coeffs);
        if (!v.is_zero()) out.set(k * units + jp, std::move(v));
      }
    }
    return out;
  };
  return {source, horizon, forward, backward};
}

StageReport verify_equivalence(const AbstractSemigroup& s, const MultiplicityModule& f, const EquivalenceMap& m,
                               const EquivalenceChecks& cfg, Rng& rng) {
  StageReport rep{"equivalence", {}, {}};
  const SpecPtr& space = s.space;
  const Slots units = space->slots_per_unit();
  const Slots span = m.horizon_units * units;
  const double tol = cfg.tol;

  double iso = 0.0, inverse = 0.0;
  for (int i = 0; i < cfg.pairs; ++i) {
    const GridVector a = random_vector(m.source, 0, span, rng);
    const GridVector b = random_vector(m.source, 0, span, rng);
    const GridVector ma = m.forward(a);
    iso = std::max({iso, distance(inner_product(ma, m.forward(b)), inner_product(a, b)),
                    distance(inner_product(ma, ma), inner_product(a, a))});
    inverse = std::max(inverse, norm(m.backward(ma) - a));
  }
  rep.add("isometry", iso, tol);
  rep.add("inverse", inverse, tol);

  double unit = 0.0;
  for (int l = 0; l < static_cast<int>(f.frame.size()); ++l) {
    GridVector g(m.source);
    const ModuleVector e =
        m.source->project_fiber(ModuleVector::basis(space->signature(), static_cast<int>(f.frame.size()), l));
    for (Slots j = 0; j < units; ++j) g.set(j, e);
    unit = std::max(unit, norm(m.forward(g) - f.frame[static_cast<std::size_t>(l)]));
  }
  rep.add("unit_indicator", unit, tol);

  WorstCase surj;
  const auto probes = basis_probes(space, 0, span);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double scale = norm(probes[i]);
    if (scale == 0.0) continue;
    surj.update(norm(probes[i] - m.forward(m.backward(probes[i]))) / scale, "probe " + std::to_string(i));
  }
  rep.add("surjectivity", surj.value, cfg.surjectivity_tol, surj.where);

  const WindowGroup u01 = window_group(s, GridTime{0}, GridTime{units});
  const GridOperator p01 = p(s, 0, units);
  WorstCase window, full;
  for (int i = 0; i < cfg.times; ++i) {
    const Slots t = rng.range(0, units - 1);
    const GridVector x = p01(random_vector(space, 0, span, rng));
    const GridVector lhs = m.backward(u01.at(t)(x));
    const GridVector rhs = cyclic_shift(m.source, GridTime{0}, GridTime{units}, GridTime{t})(m.backward(x));
    window.update(norm(lhs - rhs), tag({{"t", t}}));

    const Slots tt = rng.range(0, span - 1);
    const GridVector g = random_vector(m.source, 0, span - tt, rng);
    const GridVector moved = m.backward(s.at(GridTime{tt})(m.forward(g)));
    full.update(norm(moved - standard_shift(m.source, GridTime{tt})(g)), tag({{"t", tt}}));
  }
  rep.add("intertwining_window", window.value, tol, window.where);
  rep.add("intertwining_shift", full.value, tol, full.where);
  return rep;
}

// --- pipeline ---------------------------------------------------------------

bool EquivalenceReport::passed() const {
  return std::all_of(stages.begin(), stages.end(), [](const StageReport& r) { return r.passed(); });
}

EquivalenceReport reconstruct(const AbstractSemigroup& s, const ReconstructConfig& cfg) {
  EquivalenceReport out;
  Rng rng(cfg.seed);
  const SpecPtr& space = s.space;
  const Slots units = space->slots_per_unit();
  const Slots span = cfg.horizon * units;
  const double tol = cfg.tol;

  std::vector<GridVector> probes;
  for (int i = 0; i < cfg.probe_count; ++i) probes.push_back(random_vector(space, 0, span, rng));

  auto guarded = [&out](const std::string& stage, const std::function<StageReport()>& body) {
    try {
      out.stages.push_back(body());
      return true;
    } catch (const std::exception& e) {
      StageReport rep{stage, {}, {}};
      rep.fail("stage_error", e.what());
      out.stages.push_back(std::move(rep));
      return false;
    }
  };

  guarded("semigroup", [&] { return verify_semigroup(s, probes, span, cfg.samples, rng, tol); });
  guarded("pab_calculus", [&] { return verify_pab_calculus(s, probes, span, cfg.samples, rng, tol); });
  guarded("window_group", [&] { return verify_window_group(s, GridTime{0}, GridTime{units}, probes, tol); });
  guarded("averaging", [&] {
    StageReport rep = verify_averaging(s, GridTime{0}, GridTime{units}, probes, tol);
    const auto tuples = random_nested_intervals(*space, cfg.horizon, cfg.samples, rng);
    StageReport ratio = verify_ratio(s, tuples, probes, tol);
    for (auto& c : ratio.checks) rep.checks.push_back(std::move(c));
    return rep;
  });
  guarded("limit", [&] {
    std::vector<int> ns;
    for (int n : cfg.limit_n)
      if (n >= 1 && units % n == 0) ns.push_back(n);
    const GridVector x = p(s, 0, units)(probes.front());
    return verify_limit(limit_convergence(s, x, ns, tol), tol);
  });
  guarded("q_relations", [&] {
    const GridOperator q = averaging_projection(s, GridTime{0}, GridTime{units});
    std::vector<GridVector> z, w;
    for (int i = 0; i < 2; ++i) {
      z.push_back(q(random_vector(space, 0, span, rng)));
      w.push_back(q(random_vector(space, 0, span, rng)));
    }
    return verify_q_relations(s, z, w, probes, cfg.samples, rng, span, tol);
  });

  const bool have_fiber = guarded("multiplicity", [&] {
    MultiplicityModule f = extract_multiplicity(s, span, cfg.rank_tol);
    StageReport rep{"multiplicity", {}, {}};
    rep.add("pureness", f.pureness_residual, tol);
    rep.add("invariance", f.invariance_residual, tol);
    rep.add("span", f.span_residual, cfg.surjectivity_tol);
    rep.data["frame_size"] = f.frame.size();
    rep.data["block_dims"] = f.block_dims;
    out.fiber = std::move(f);
    return rep;
  });
  if (have_fiber && out.fiber) {
    guarded("equivalence", [&] {
      EquivalenceMap m = build_equivalence(s, *out.fiber, cfg.horizon);
      StageReport rep =
          verify_equivalence(s, *out.fiber, m, EquivalenceChecks{20, cfg.samples, tol, cfg.surjectivity_tol}, rng);
      out.map = std::move(m);
      return rep;
    });
  }
  return out;
}

}  // namespace shiftmod
