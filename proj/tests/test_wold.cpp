#include <doctest.h>

#include "shiftmod/cooper.hpp"
#include "shiftmod/wold.hpp"

using namespace shiftmod;

namespace {

const AlgebraSignature kMixed({1, 2});

UnitaryBlock random_block(int rank, std::uint64_t seed) {
  Rng rng(seed);
  return UnitaryBlock{ModuleOperator::random_unitary(kMixed, rank, rng)};
}

}  // namespace

TEST_SUITE("wold") {
  TEST_CASE("structured isometry is an isometry with exact adjoint") {
    const StructuredIsometry s(kMixed, {random_block(2, 1), ShiftBlock{1}}, DisguiseSpec{3, 4});
    Rng rng(2);
    for (int i = 0; i < 10; ++i) {
      const GridVector f = random_vector(s.space(), 0, 8, rng), g = random_vector(s.space(), 0, 8, rng);
      CHECK(distance(inner_product(s.step()(f), s.step()(g)), inner_product(f, g)) <= 1e-13);
      CHECK(adjoint_pairing_residual(s.step(), f, g) <= 1e-13);
      CHECK(norm(s.step().adjoint_apply(s.step()(f)) - f) <= 1e-13);
    }
    CHECK(s.unitary_block_dims() == std::vector<int>{2, 4});
    CHECK(s.unitary_coordinates() == std::vector<int>{0, 1});
    CHECK(s.shift_coordinates() == std::vector<int>{2});
  }

  TEST_CASE("range projections: identity at zero, shift support, unitary block") {
    const StructuredIsometry s(kMixed, {random_block(1, 3), ShiftBlock{1}});
    const auto r = range_projections(s.isometry(), 5);
    REQUIRE(r.size() == 6);
    const auto basis = s.basis(4);
    for (const auto& x : basis) CHECK(norm(r[0](x) - x) == 0.0);
    CHECK(norm(r[5](basis[0]) - basis[0]) <= 1e-14);
    // basis[1 + j] is the shift coordinate at slot j.
    for (int j = 0; j < 4; ++j) {
      CHECK(norm(r[j](basis[1 + j]) - basis[1 + j]) == 0.0);
      CHECK(norm(r[j + 1](basis[1 + j])) == 0.0);
    }
    CHECK(monotonicity_violation(r, basis) <= 1e-14);
  }

  TEST_CASE("pure shift: no unitary part") {
    const StructuredIsometry s(kMixed, {ShiftBlock{2}});
    const DecompositionResult d = decompose(s, 5, 8, 1e-10);
    CHECK(d.report.passed());
    CHECK(d.unitary_dims == std::vector<int>{0, 0});
    CHECK(d.pure_dims == std::vector<int>{10, 20});
    for (const auto& x : s.basis(5)) {
      CHECK(norm(d.unitary_projection(x)) <= 1e-14);
      CHECK(norm(d.pure_projection(x) - x) <= 1e-14);
    }
  }

  TEST_CASE("unitary only: no pure part, stabilizes at once") {
    const StructuredIsometry s(kMixed, {random_block(2, 5)});
    const DecompositionResult d = decompose(s, 3, 4, 1e-10);
    CHECK(d.report.passed());
    CHECK(d.stabilization_step == 0);
    CHECK(d.pure_dims == std::vector<int>{0, 0});
    for (const auto& x : s.basis(3)) CHECK(norm(d.pure_projection(x)) <= 1e-14);
  }

  TEST_CASE("disguised unitary plus shift recovers the blocks") {
    const StructuredIsometry s(kMixed, {random_block(1, 6), ShiftBlock{2}}, DisguiseSpec{4, 7});
    const DecompositionResult d = decompose(s, 6, 14, 1e-10);
    CHECK(d.report.passed());
    CHECK(d.unitary_dims == s.unitary_block_dims());
    const StageReport blocks = verify_against_blocks(s, d, 6, 1e-10);
    CHECK(blocks.passed());
  }

  TEST_CASE("no stabilization within n_max reports the trace") {
    const StructuredIsometry s(kMixed, {ShiftBlock{1}});
    try {
      decompose(s, 6, 3, 1e-10);
      FAIL("expected a diagnostic");
    } catch (const DiagnosticError& e) {
      CHECK(std::string(e.what()).find("trace") != std::string::npos);
    }
  }

  TEST_CASE("pureness metric: shift, unitary and mixed probes") {
    const StructuredIsometry s(kMixed, {random_block(1, 8), ShiftBlock{1}}, DisguiseSpec{3, 9});
    const auto basis = s.basis(4);
    const GridOperator& v = s.disguise_unitary();
    const GridVector unitary = v(basis[0]);
    const GridVector shift = v(basis[3]);
    const GridVector mixed = v(basis[0] * Complex(0.6) + basis[3] * Complex(0.8));
    const auto rows = pureness_metric(s.isometry(), {unitary, shift, mixed}, 10, 1e-10);
    CHECK_FALSE(rows[0].pure);
    for (double value : rows[0].decay) CHECK(value == doctest::Approx(norm(unitary)).epsilon(1e-12));
    CHECK(rows[1].pure);
    CHECK(rows[1].final_value <= 1e-12);
    CHECK_FALSE(rows[2].pure);
    CHECK(rows[2].final_value == doctest::Approx(0.6).epsilon(1e-12));

    const StructuredIsometry plain(kMixed, {ShiftBlock{1}});
    const auto decay = pureness_metric(plain.isometry(), {plain.basis(4)[3]}, 6, 1e-10).front().decay;
    CHECK(decay[3] == doctest::Approx(1.0));
    CHECK(decay[4] == 0.0);
  }
}
