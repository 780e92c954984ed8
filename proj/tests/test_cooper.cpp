#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "shiftmod/cooper.hpp"

using namespace shiftmod;

namespace {

const AlgebraSignature kMixed({1, 2});

SpecPtr half_line(int n, int rank = 1, const AlgebraSignature& sig = kMixed) {
  return make_spec(n, IndexKind::unilateral, sig, rank);
}

std::vector<GridVector> randoms(const SpecPtr& spec, std::int64_t count, int n, Rng& rng) {
  std::vector<GridVector> out;
  for (int i = 0; i < n; ++i) out.push_back(random_vector(spec, 0, count, rng));
  return out;
}

AbstractSemigroup disguised(const SpecPtr& spec, std::int64_t window, std::uint64_t seed) {
  Rng rng(seed);
  return disguise(standard_shift_semigroup(spec), random_window_unitary(spec, window, rng));
}

GridOperator p(const AbstractSemigroup& s, std::int64_t a, std::int64_t b) {
  return interval_projection(s, GridTime{a}, GridTime{b}).op;
}

// Matrix of a grid operator on the slots [first, first + count), in the basis of basis_probes.
ModuleOperator window_matrix(const GridOperator& op, const SpecPtr& spec, std::int64_t first, std::int64_t count) {
  const auto basis = basis_probes(spec, first, count);
  const Complex scale = 1.0 / std::sqrt(spec->step());
  std::vector<ModuleVector> columns;
  for (const auto& b : basis) columns.push_back(flatten(op(b), first, count));
  std::vector<std::vector<AlgebraElement>> entries(basis.size());
  for (std::size_t r = 0; r < basis.size(); ++r)
    for (std::size_t c = 0; c < basis.size(); ++c) entries[r].push_back(columns[c].entry(static_cast<int>(r)) * scale);
  return ModuleOperator::from_entries(entries);
}

void require_all_pass(const StageReport& rep, double bound) {
  for (const auto& c : rep.checks) {
    INFO(rep.stage << "." << c.name << " residual " << c.residual << " " << c.detail);
    CHECK(c.residual <= bound);
  }
}

}  // namespace

TEST_SUITE("cooper") {
  TEST_CASE("interval projections: empty, whole line, product rule") {
    Rng rng(1);
    const SpecPtr s = half_line(8);
    const AbstractSemigroup sg = standard_shift_semigroup(s);
    const auto probes = randoms(s, 24, 6, rng);
    CHECK(operator_residual(p(sg, 3, 3), GridOperator::zero(), probes) == 0.0);
    CHECK(operator_residual(p(sg, 5, 3), GridOperator::zero(), probes) == 0.0);
    CHECK(operator_residual(interval_projection(sg, GridTime{0}, std::nullopt).op, GridOperator::identity(), probes) ==
          0.0);
    CHECK(operator_residual(p(sg, 2, 6) * p(sg, 4, 8), p(sg, 4, 6), probes) <= 1e-13);
    CHECK(operator_residual(p(sg, 2, 6), indicator(s, GridTime{2}, GridTime{6}), probes) <= 1e-15);
  }

  TEST_CASE("interval projection reports a broken adjoint") {
    Rng rng(2);
    const SpecPtr s = half_line(4);
    AbstractSemigroup broken = standard_shift_semigroup(s);
    broken.at = [s](GridTime t) {
      const GridOperator v = standard_shift(s, t);
      return GridOperator([v](const GridVector& f) { return v(f); }, [](const GridVector& f) { return f; }, t.slots);
    };
    const auto probes = randoms(s, 8, 3, rng);
    CHECK_THROWS_AS(interval_projection(broken, GridTime{1}, GridTime{3}, &probes), DiagnosticError);
    CHECK_NOTHROW(interval_projection(standard_shift_semigroup(s), GridTime{1}, GridTime{3}, &probes));
  }

  TEST_CASE("semigroup and projection calculus, plain and disguised") {
    for (const AbstractSemigroup& sg : {standard_shift_semigroup(half_line(8)), disguised(half_line(8), 2, 5)}) {
      Rng rng(3);
      const auto probes = randoms(sg.space, 24, 4, rng);
      require_all_pass(verify_semigroup(sg, probes, 24, 10, rng, 1e-12), 1e-12);
      require_all_pass(verify_pab_calculus(sg, probes, 24, 10, rng, 1e-12), 1e-12);
    }
  }

  TEST_CASE("window group: both branches of the group law at N = 10") {
    const SpecPtr s = half_line(10);
    const AbstractSemigroup sg = standard_shift_semigroup(s);
    Rng rng(4);
    const auto probes = randoms(s, 30, 4, rng);
    const WindowGroup u = window_group(sg, GridTime{0}, GridTime{10});
    CHECK(operator_residual(u.at(4) * u.at(3), u.at(7), probes) <= 1e-12);
    CHECK(operator_residual(u.at(6) * u.at(7), u.at(3), probes) <= 1e-12);
    CHECK(operator_residual(u.at(0), p(sg, 0, 10), probes) <= 1e-15);
    CHECK(operator_residual(u.at(3), u.at_alternate(3), probes) <= 1e-12);
    CHECK(operator_residual(u.at(13), u.at(3), probes) <= 1e-15);
    // On the plain shift u^{0,1} is the cyclic shift of [0, 1) cut down by p_{0,1}.
    CHECK(operator_residual(u.at(3), cyclic_shift(s, GridTime{0}, GridTime{10}, GridTime{3}) * p(sg, 0, 10), probes) <=
          1e-15);
    require_all_pass(verify_window_group(sg, GridTime{0}, GridTime{10}, probes, 1e-12), 1e-12);
    CHECK_THROWS(window_group(sg, GridTime{4}, GridTime{4}));
  }

  TEST_CASE("averaging projection is a subprojection with window-constant fixed points") {
    const SpecPtr s = half_line(8);
    const AbstractSemigroup sg = standard_shift_semigroup(s);
    Rng rng(6);
    const auto probes = randoms(s, 24, 5, rng);
    require_all_pass(verify_averaging(sg, GridTime{0}, GridTime{8}, probes, 1e-12), 1e-12);
    require_all_pass(verify_averaging(sg, GridTime{5}, GridTime{17}, probes, 1e-12), 1e-12);

    const GridOperator q = averaging_projection(sg, GridTime{0}, GridTime{8});
    const ModuleVector y = ModuleVector::random(kMixed, 1, rng);
    const GridVector flat = sample_profile(s, [](double) { return 1.0; }, y, GridTime{0}, GridTime{8});
    CHECK(norm(q(flat) - flat) <= 1e-14);
    CHECK(is_projection(window_matrix(q, s, 0, 8), 1e-12));

    // On the plain shift q_{0,1} replaces a vector on [0, 1) by its window mean.
    const GridVector f = random_vector(s, 0, 8, rng);
    ModuleVector mean = ModuleVector::zero(kMixed, 1);
    for (const auto& [j, v] : f.entries()) mean += v * Complex(1.0 / 8);
    const GridVector expected = sample_profile(s, [](double) { return 1.0; }, mean, GridTime{0}, GridTime{8});
    CHECK(norm(q(f) - expected) <= 1e-14);
  }

  TEST_CASE("ratio identity with the exact factor") {
    const SpecPtr s = half_line(8);
    const AbstractSemigroup sg = standard_shift_semigroup(s);
    Rng rng(7);
    const auto probes = randoms(s, 16, 4, rng);
    const GridOperator lhs = p(sg, 2, 4) * averaging_projection(sg, GridTime{0}, GridTime{8}) * p(sg, 2, 4);
    const GridOperator rhs = Complex(0.25) * averaging_projection(sg, GridTime{2}, GridTime{4});
    CHECK(operator_residual(lhs, rhs, probes) <= 1e-12);
    require_all_pass(verify_ratio(sg, random_nested_intervals(*s, 2, 10, rng), probes, 1e-12), 1e-12);
    CHECK_THROWS(verify_ratio(sg, {NestedIntervals{GridTime{0}, GridTime{4}, GridTime{3}, GridTime{6}}}, probes, 1e-12));
  }

  TEST_CASE("limit convergence: step functions, zero, sine profile") {
    const SpecPtr s = half_line(64);
    const AbstractSemigroup sg = standard_shift_semigroup(s);
    const ModuleVector y = ModuleVector::basis(kMixed, 1, 0);
    const GridVector step = sample_profile(
        s, [](double x) { return x < 0.25 ? 1.0 : (x < 0.5 ? -2.0 : 0.5); }, y, GridTime{0}, GridTime{64});
    for (const auto& row : limit_convergence(sg, step, {4, 8, 16})) CHECK(row.residual <= 1e-12);
    for (const auto& row : limit_convergence(sg, GridVector(s), {1, 2, 4})) {
      CHECK(row.residual == 0.0);
      CHECK(row.witness == 0.0);
    }
    const GridVector wave =
        sample_profile(s, [](double x) { return std::sin(std::numbers::pi * x); }, y, GridTime{0}, GridTime{64});
    const auto rows = limit_convergence(sg, wave, {1, 2, 4, 8, 16});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].residual <= rows[i].witness);
      if (i > 0) CHECK(rows[i].residual < rows[i - 1].residual);
    }
    const StageReport rep = verify_limit(rows, 1e-12);
    CHECK(rep.passed());
    CHECK(rep.data["strictly_decreasing"].get<bool>());
    CHECK_THROWS(limit_convergence(sg, wave, {3}));
    Rng rng(1);
    CHECK_THROWS(limit_convergence(sg, random_vector(s, 0, 100, rng), {1}));
  }

  TEST_CASE("q relations: Lebesgue law, disjoint intervals, additivity") {
    const SpecPtr s = half_line(8);
    const AbstractSemigroup sg = standard_shift_semigroup(s);
    Rng rng(8);
    const GridOperator q = averaging_projection(sg, GridTime{0}, GridTime{8});
    const GridVector z = q(random_vector(s, 0, 8, rng)), w = q(random_vector(s, 0, 8, rng));
    CHECK(distance(inner_product(p(sg, 0, 4)(z), p(sg, 2, 8)(w)), inner_product(z, w) * Complex(0.25)) <= 1e-12);
    CHECK(inner_product(p(sg, 0, 3)(z), p(sg, 3, 8)(w)).norm() <= 1e-15);
    const GridOperator s2 = sg.at(GridTime{2});
    CHECK(norm(p(sg, 0, 4)(z) - p(sg, 0, 2)(z) - s2(p(sg, 0, 2)(z))) <= 1e-12);

    std::vector<GridVector> zs{z}, ws{w};
    const auto probes = randoms(s, 24, 3, rng);
    require_all_pass(verify_q_relations(sg, zs, ws, probes, 10, rng, 24, 1e-12), 1e-12);
  }

  TEST_CASE("multiplicity module dimensions, plain and disguised") {
    for (int rank : {1, 2}) {
      const SpecPtr s = half_line(4, rank);
      const std::vector<int> expected = {rank, 2 * rank};
      const MultiplicityModule plain = extract_multiplicity(standard_shift_semigroup(s), 8);
      CHECK(plain.block_dims == expected);
      CHECK(plain.invariance_residual <= 1e-12);
      CHECK(plain.pureness_residual <= 1e-12);
      const MultiplicityModule hidden = extract_multiplicity(disguised(s, 2, 9), 8);
      CHECK(hidden.block_dims == expected);
      CHECK(hidden.invariance_residual <= 1e-11);
    }
  }

  TEST_CASE("multiplicity extraction rejects a degenerate fiber") {
    const FiberSpec dead{kMixed, 1, ModuleOperator::zero(kMixed, 1, 1)};
    const SpecPtr s = make_spec(4, IndexKind::unilateral, dead);
    CHECK_THROWS_AS(extract_multiplicity(standard_shift_semigroup(s), 8), DiagnosticError);
  }

  TEST_CASE("equivalence map: unit indicator, isometry, intertwining at N = 8, K = 3") {
    const SpecPtr s = half_line(8);
    const AbstractSemigroup sg = standard_shift_semigroup(s);
    const MultiplicityModule f = extract_multiplicity(sg, 8);
    const EquivalenceMap m = build_equivalence(sg, f, 3);
    GridVector unit(m.source);
    const ModuleVector z = ModuleVector::basis(m.source->signature(), m.source->fiber_rank(), 0);
    for (std::int64_t j = 0; j < 8; ++j) unit.set(j, m.source->project_fiber(z));
    const GridVector image = m.forward(unit);
    CHECK(norm(image - f.frame.front()) <= 1e-12);
    Rng rng(10);
    const StageReport rep = verify_equivalence(sg, f, m, EquivalenceChecks{20, 10, 1e-11, 1e-8}, rng);
    require_all_pass(rep, 1e-11);
    GridVector outside(m.source);
    outside.set(24, m.source->project_fiber(z));
    CHECK_THROWS_AS(m.forward(outside), std::out_of_range);
  }

  TEST_CASE("reconstruct: plain shift over C") {
    ReconstructConfig cfg;
    cfg.horizon = 4;
    const EquivalenceReport rep = reconstruct(standard_shift_semigroup(half_line(8, 1, AlgebraSignature::scalars())), cfg);
    for (const auto& st : rep.stages) require_all_pass(st, 1e-11);
    REQUIRE(rep.fiber);
    CHECK(rep.fiber->block_dims == std::vector<int>{1});
    CHECK(rep.passed());
  }

  TEST_CASE("reconstruct: small disguised model keeps its fiber") {
    ReconstructConfig cfg;
    cfg.horizon = 2;
    const EquivalenceReport rep = reconstruct(disguised(half_line(4), 2, 3), cfg);
    for (const auto& st : rep.stages) require_all_pass(st, 1e-10);
    REQUIRE(rep.fiber);
    CHECK(rep.fiber->block_dims == std::vector<int>{1, 2});
  }

  TEST_CASE("reconstruct: non-pure control fails surjectivity") {
    ReconstructConfig cfg;
    cfg.horizon = 2;
    const EquivalenceReport rep = reconstruct(nonpure_semigroup(4, kMixed, 1, 1), cfg);
    CHECK_FALSE(rep.passed());
    const CheckRecord* surj = nullptr;
    for (const auto& st : rep.stages)
      if (st.stage == "equivalence") surj = st.find("surjectivity");
    REQUIRE(surj != nullptr);
    CHECK_FALSE(surj->pass);
  }

  TEST_CASE("disguise unitary needs a free fiber") {
    const FiberSpec projected{kMixed, 2, ModuleOperator::coordinate_projection(kMixed, 2, {0})};
    const SpecPtr s = make_spec(4, IndexKind::unilateral, projected);
    Rng rng(1);
    CHECK_THROWS(random_window_unitary(s, 2, rng));
  }
}
