#include "shiftmod/wold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shiftmod/cooper.hpp"

namespace shiftmod {

namespace {

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

int block_rank(const IsometryBlock& b) {
  return std::visit(overloaded{[](const UnitaryBlock& u) { return u.unitary.rows(); },
                               [](const ShiftBlock& s) { return s.rank; }},
                    b);
}

// Orthogonal projection onto the span of `frame`, acting on the window
// [first, first + count) and annihilating everything outside it.
GridOperator span_projection(const SpecPtr& space, const std::vector<GridVector>& frame, std::int64_t first,
                             std::int64_t count) {
  if (frame.empty() || count == 0) return GridOperator::zero();
  std::vector<ModuleVector> flat;
  for (const auto& f : frame) flat.push_back(flatten(f, first, count));
  const int rank = static_cast<int>(count) * space->fiber_rank();
  auto proj = std::make_shared<const ModuleOperator>(frame_projection(flat, space->signature(), rank));
  auto apply = [space, proj, first, count](const GridVector& x) {
    return unflatten(space, proj->apply(flatten(x, first, count)), first);
  };
  return GridOperator(apply, apply, 0);
}

std::vector<GridVector> reduce(const SpecPtr& space, const std::vector<GridVector>& vectors, std::int64_t first,
                               std::int64_t count, double rank_tol, std::vector<int>& dims) {
  std::vector<ModuleVector> flat;
  for (const auto& v : vectors) flat.push_back(flatten(v, first, count));
  const RangeFrame rf = range_frame(flat, rank_tol);
  dims = rf.block_dims;
  if (dims.size() != space->signature().num_blocks()) dims.assign(space->signature().num_blocks(), 0);
  std::vector<GridVector> out;
  for (const auto& f : rf.frame) out.push_back(unflatten(space, f, first));
  return out;
}

double pairing(const GridOperator& t, const std::vector<GridVector>& probes) {
  double worst = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i)
    worst = std::max(worst, adjoint_pairing_residual(t, probes[i], probes[(i + 1) % probes.size()]));
  return worst;
}

}  // namespace

// --- StructuredIsometry -----------------------------------------------------

StructuredIsometry::StructuredIsometry(AlgebraSignature signature, std::vector<IsometryBlock> blocks,
                                       std::optional<DisguiseSpec> disguise)
    : signature_(std::move(signature)),
      blocks_(std::move(blocks)),
      step_(GridOperator::identity()),
      v_(GridOperator::identity()) {
  if (blocks_.empty()) throw std::invalid_argument("structured isometry needs at least one block");
  int rank = 0;
  for (const auto& b : blocks_) {
    const int r = block_rank(b);
    if (r < 1) throw std::invalid_argument("structured isometry: block rank must be positive");
    if (const auto* u = std::get_if<UnitaryBlock>(&b)) {
      if (!(u->unitary.signature() == signature_) || u->unitary.rows() != u->unitary.cols())
        throw ShapeError("structured isometry: unitary block must be square over the algebra");
      for (int k = 0; k < r; ++k) unitary_coords_.push_back(rank + k);
    } else {
      for (int k = 0; k < r; ++k) shift_coords_.push_back(rank + k);
    }
    rank += r;
  }
  space_ = make_spec(1, IndexKind::unilateral, signature_, rank);

  std::vector<std::vector<AlgebraElement>> entries(
      static_cast<std::size_t>(rank), std::vector<AlgebraElement>(static_cast<std::size_t>(rank),
                                                                  AlgebraElement::zero(signature_)));
  int offset = 0;
  for (const auto& b : blocks_) {
    const int r = block_rank(b);
    if (const auto* u = std::get_if<UnitaryBlock>(&b))
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) entries[offset + i][offset + j] = u->unitary.entry(i, j);
    offset += r;
  }
  const auto w = std::make_shared<const ModuleOperator>(ModuleOperator::from_entries(entries));
  const auto wd = std::make_shared<const ModuleOperator>(w->adjoint());
  const auto ps = std::make_shared<const ModuleOperator>(
      ModuleOperator::coordinate_projection(signature_, rank, shift_coords_));

  auto forward = [w, ps](const GridVector& f) {
    GridVector out(f.spec_ptr());
    for (const auto& [slot, v] : f.entries()) {
      if (auto a = w->apply(v); !a.is_zero()) out.add(slot, a);
      if (auto b = ps->apply(v); !b.is_zero()) out.add(slot + 1, b);
    }
    return out;
  };
  auto backward = [wd, ps](const GridVector& f) {
    GridVector out(f.spec_ptr());
    for (const auto& [slot, v] : f.entries()) {
      if (auto a = wd->apply(v); !a.is_zero()) out.add(slot, a);
      if (slot >= 1)
        if (auto b = ps->apply(v); !b.is_zero()) out.add(slot - 1, b);
    }
    return out;
  };
  step_ = GridOperator(forward, backward, 1);
  if (disguise) {
    Rng rng(disguise->seed);
    v_ = random_window_unitary(space_, disguise->window, rng);
    step_ = v_ * step_ * v_.adjoint();
  }
}

std::vector<GridVector> StructuredIsometry::basis(std::int64_t window) const {
  const int rank = space_->fiber_rank();
  std::vector<GridVector> out;
  for (int k : unitary_coords_) {
    GridVector f(space_);
    f.set(0, ModuleVector::basis(signature_, rank, k));
    out.push_back(std::move(f));
  }
  for (std::int64_t j = 0; j < window; ++j) {
    for (int k : shift_coords_) {
      GridVector f(space_);
      f.set(j, ModuleVector::basis(signature_, rank, k));
      out.push_back(std::move(f));
    }
  }
  return out;
}

std::vector<GridVector> StructuredIsometry::probes(std::int64_t window) const {
  std::vector<GridVector> out;
  for (const auto& b : basis(window)) out.push_back(v_(b));
  return out;
}

std::vector<int> StructuredIsometry::unitary_block_dims() const {
  std::vector<int> dims;
  for (int n : signature_.block_dims()) dims.push_back(static_cast<int>(unitary_coords_.size()) * n);
  return dims;
}

GridOperator StructuredIsometry::unitary_indicator() const {
  const auto pu = std::make_shared<const ModuleOperator>(
      ModuleOperator::coordinate_projection(signature_, space_->fiber_rank(), unitary_coords_));
  auto apply = [pu](const GridVector& f) {
    GridVector out(f.spec_ptr());
    if (auto it = f.entries().find(0); it != f.entries().end()) out.set(0, pu->apply(it->second));
    return out;
  };
  return GridOperator(apply, apply, 0);
}

GridOperator StructuredIsometry::shift_indicator(std::int64_t window) const {
  const auto ps = std::make_shared<const ModuleOperator>(
      ModuleOperator::coordinate_projection(signature_, space_->fiber_rank(), shift_coords_));
  auto apply = [ps, window](const GridVector& f) {
    GridVector out(f.spec_ptr());
    for (const auto& [slot, v] : f.entries())
      if (slot >= 0 && slot < window) out.set(slot, ps->apply(v));
    return out;
  };
  return GridOperator(apply, apply, 0);
}

// --- range projections ------------------------------------------------------

std::vector<GridOperator> range_projections(const Isometry& s, int n_max) {
  if (n_max < 1) throw std::invalid_argument("range_projections: n_max must be at least 1");
  std::vector<GridOperator> out{GridOperator::identity()};
  GridOperator power = GridOperator::identity();
  for (int n = 1; n <= n_max; ++n) {
    power = s.step * power;
    out.push_back(power * power.adjoint());
  }
  return out;
}

double monotonicity_violation(const std::vector<GridOperator>& r, const std::vector<GridVector>& probes) {
  double worst = 0.0;
  for (std::size_t n = 0; n + 1 < r.size(); ++n) {
    for (const auto& x : probes) {
      const AlgebraElement gap = inner_product(x, r[n](x)) - inner_product(x, r[n + 1](x));
      worst = std::max(worst, -gap.min_eigenvalue());
    }
  }
  return worst;
}

// --- decomposition ----------------------------------------------------------

DecompositionResult decompose(const Isometry& s, const std::vector<GridVector>& probes, int n_max, double tol,
                              double rank_tol) {
  if (probes.empty()) throw std::invalid_argument("decompose: no probes");
  // back[i] holds (S^dagger)^n x_i; r_n x_i = S^n back[i].
  std::vector<GridVector> back = probes;
  auto range_image = [&s](const GridVector& y, int n) {
    GridVector out = y;
    for (int k = 0; k < n; ++k) out = s.step(out);
    return out;
  };
  std::vector<GridVector> current = probes;
  std::vector<double> trace;
  int stable = -1;
  for (int n = 0; n < n_max; ++n) {
    std::vector<GridVector> next;
    double worst = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      back[i] = s.step.adjoint_apply(back[i]);
      next.push_back(range_image(back[i], n + 1));
      worst = std::max(worst, norm(next[i] - current[i]));
    }
    trace.push_back(worst);
    if (worst < tol) {
      stable = n;
      break;
    }
    current = std::move(next);
  }
  if (stable < 0) {
    std::ostringstream os;
    os << "decompose: r_n x did not stabilize within n_max = " << n_max << "; trace:";
    for (double t : trace) os << ' ' << t;
    throw DiagnosticError(os.str());
  }

  std::vector<GridVector> unitary_images = current;
  std::vector<GridVector> pure_images;
  for (std::size_t i = 0; i < probes.size(); ++i) pure_images.push_back(probes[i] - unitary_images[i]);
  std::vector<GridVector> all = probes;
  all.insert(all.end(), unitary_images.begin(), unitary_images.end());
  const auto [first, count] = common_window(all);

  std::vector<int> udims, pdims;
  auto uframe = reduce(s.space, unitary_images, first, count, rank_tol, udims);
  auto pframe = reduce(s.space, pure_images, first, count, rank_tol, pdims);
  GridOperator pu = span_projection(s.space, uframe, first, count);
  GridOperator pp = span_projection(s.space, pframe, first, count);

  StageReport rep{"wold", {}, {}};
  double u_idem = 0.0, p_idem = 0.0, orth = 0.0, sum = 0.0;
  for (const auto& x : probes) {
    const GridVector ux = pu(x);
    const GridVector px = pp(x);
    u_idem = std::max(u_idem, norm(pu(ux) - ux));
    p_idem = std::max(p_idem, norm(pp(px) - px));
    orth = std::max({orth, norm(pu(px)), norm(pp(ux))});
    sum = std::max(sum, norm(ux + px - x));
  }
  const auto r = range_projections(s, std::max(1, stable + 1));
  // S f stays in the intersection of the ranges r_n E, measured at the stabilized step.
  double u_inv = 0.0, u_onto = 0.0, p_inv = 0.0;
  for (const auto& f : uframe) {
    const GridVector sf = s.step(f);
    u_inv = std::max(u_inv, norm(sf - r.back()(sf)));
    u_onto = std::max(u_onto, norm(s.step(s.step.adjoint_apply(f)) - f));
  }
  for (const auto& f : pframe) {
    const GridVector sf = s.step.adjoint_apply(f);
    p_inv = std::max(p_inv, norm(sf - pp(sf)));
  }

  rep.add("stabilized", trace.back(), tol, "n=" + std::to_string(stable));
  rep.add("monotone", monotonicity_violation(r, probes), tol);
  rep.add("unitary_idempotent", u_idem, tol);
  rep.add("unitary_self_adjoint", pairing(pu, probes), tol);
  rep.add("pure_idempotent", p_idem, tol);
  rep.add("pure_self_adjoint", pairing(pp, probes), tol);
  rep.add("orthogonal", orth, tol);
  rep.add("sum_identity", sum, tol);
  rep.add("unitary_invariant", u_inv, tol);
  rep.add("unitary_onto", u_onto, tol);
  rep.add("pure_adjoint_invariant", p_inv, tol);
  rep.data["stabilization_step"] = stable;
  rep.data["trace"] = trace;
  rep.data["unitary_dims"] = udims;
  rep.data["pure_dims"] = pdims;

  double residual = 0.0;
  for (const auto& c : rep.checks) residual = std::max(residual, c.residual);
  return {pu, pp, std::move(uframe), std::move(pframe), udims, pdims, stable, trace, residual, std::move(rep)};
}

DecompositionResult decompose(const StructuredIsometry& s, std::int64_t window, int n_max, double tol,
                              double rank_tol) {
  return decompose(s.isometry(), s.probes(window), n_max, tol, rank_tol);
}

StageReport verify_against_blocks(const StructuredIsometry& s, const DecompositionResult& d, std::int64_t window,
                                  double tol) {
  StageReport rep{"wold_blocks", {}, {}};
  const GridOperator& v = s.disguise_unitary();
  const GridOperator iu = s.unitary_indicator();
  const GridOperator is = s.shift_indicator(window);
  double ru = 0.0, rp = 0.0;
  for (const auto& b : s.basis(window)) {
    const GridVector vb = v(b);
    ru = std::max(ru, norm(v.adjoint_apply(d.unitary_projection(vb)) - iu(b)));
    rp = std::max(rp, norm(v.adjoint_apply(d.pure_projection(vb)) - is(b)));
  }
  const auto expected = s.unitary_block_dims();
  rep.add("unitary_matches_blocks", ru, tol);
  rep.add("pure_matches_blocks", rp, tol);
  rep.add("unitary_dims_exact", d.unitary_dims == expected ? 0.0 : 1.0, 0.0);
  rep.data["expected_unitary_dims"] = expected;
  rep.data["recovered_unitary_dims"] = d.unitary_dims;
  return rep;
}

std::vector<PurenessRow> pureness_metric(const Isometry& s, const std::vector<GridVector>& probes, int n_max,
                                         double tol) {
  std::vector<PurenessRow> rows;
  for (const auto& x : probes) {
    PurenessRow row;
    GridVector y = x;
    row.decay.push_back(norm(y));
    for (int n = 1; n <= n_max; ++n) {
      y = s.step.adjoint_apply(y);
      row.decay.push_back(norm(y));
    }
    row.final_value = row.decay.back();
    row.pure = row.final_value <= tol;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace shiftmod
