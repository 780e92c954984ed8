#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "shiftmod/json_io.hpp"

using namespace shiftmod;

namespace {

const AlgebraSignature kMixed({1, 2});

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("shiftmod_json_" + name);
  std::ofstream(path) << content;
  return path.string();
}

std::string location_of(const std::function<void()>& body) {
  try {
    body();
  } catch (const InputError& e) {
    return e.location();
  }
  return "<no error>";
}

}  // namespace

TEST_SUITE("json_io") {
  TEST_CASE("round trips") {
    Rng rng(1);
    const AlgebraElement b = AlgebraElement::random(kMixed, rng);
    CHECK(distance(algebra_element_from_json(to_json(b)), b) == 0.0);
    const ModuleVector x = ModuleVector::random(kMixed, 3, rng);
    CHECK(norm(module_vector_from_json(to_json(x)) - x) == 0.0);
    const ModuleOperator t = ModuleOperator::random(kMixed, 2, 3, rng);
    CHECK((module_operator_from_json(to_json(t)) - t).norm() == 0.0);

    const FiberSpec fiber{kMixed, 2, ModuleOperator::coordinate_projection(kMixed, 2, {1})};
    const SpecPtr spec = make_spec(4, IndexKind::bilateral, fiber);
    const GridVector f = random_vector(spec, -3, 6, rng);
    const GridVector g = grid_vector_from_json(to_json(f));
    CHECK(g.spec().slots_per_unit() == 4);
    CHECK(g.spec().kind() == IndexKind::bilateral);
    REQUIRE(g.spec().fiber().projection);
    GridVector diff(g.spec_ptr());
    for (const auto& [j, v] : f.entries()) diff.set(j, v);
    CHECK(norm(diff - g) == 0.0);
  }

  TEST_CASE("complex values are [re, im] pairs") {
    CHECK(to_json(Complex(1.5, -2.0)) == json::array({1.5, -2.0}));
    CHECK(complex_from_json(json::array({0.0, 3.0})) == Complex(0.0, 3.0));
    CHECK_THROWS_AS(complex_from_json(json::array({1.0})), InputError);
  }

  TEST_CASE("decoding errors carry a JSON pointer") {
    json v = to_json(ModuleVector::basis(kMixed, 2, 0));
    v["entries"][1][1][0][1] = "x";
    CHECK(location_of([&] { module_vector_from_json(v); }) == "/entries/1/1/0/1");
    v = to_json(ModuleVector::basis(kMixed, 2, 0));
    v["rank"] = 3;
    CHECK(location_of([&] { module_vector_from_json(v); }) == "/entries");
    CHECK(location_of([&] { signature_from_json(json::array({1, 0})); }) == "/1");
  }

  TEST_CASE("syntax errors carry line and column") {
    const std::string path = temp_file("bad.json", "{\n  \"kind\": \"semigroup\",\n  \"rank\": ]\n}\n");
    CHECK(location_of([&] { read_json_file(path); }) == "3:11");
    const std::string empty = temp_file("empty.json", "");
    CHECK_THROWS_AS(read_json_file(empty), InputError);
    CHECK_THROWS_AS(read_json_file("/nonexistent/shiftmod.json"), InputError);
  }

  TEST_CASE("semigroup fixtures") {
    const json j = json::parse(R"({"kind": "semigroup", "signature": [1, 2], "rank": 2,
                                   "disguise": {"window_units": 3, "seed": 9}})");
    const SemigroupFixture f = semigroup_fixture_from_json(j);
    CHECK(f.rank == 2);
    CHECK(f.disguise_window == 3);
    CHECK(f.disguise_seed == 9u);
    CHECK(semigroup_fixture_from_json(to_json(f)).disguise_seed == 9u);
    CHECK(location_of([] { semigroup_fixture_from_json(json::parse(R"({"kind": "isometry"})")); }) == "/kind");
    CHECK(location_of([] {
            semigroup_fixture_from_json(json::parse(R"({"kind": "semigroup", "signature": [1], "rank": 1,
                                                        "model": "weird"})"));
          }) == "/model");
  }

  TEST_CASE("isometry fixtures") {
    const json j = json::parse(R"({"kind": "isometry", "signature": [1, 2],
      "blocks": [{"type": "unitary", "rank": 2, "seed": 4}, {"type": "shift", "rank": 1}],
      "disguise": {"window": 3}})");
    CHECK(location_of([&] { isometry_fixture_from_json(j); }) == "/disguise");
    const IsometryFixture f = isometry_fixture_from_json(j, 5);
    REQUIRE(f.blocks.size() == 2);
    CHECK(std::get<UnitaryBlock>(f.blocks[0]).unitary.rows() == 2);
    CHECK(f.disguise->seed == 5u);
    const IsometryFixture again = isometry_fixture_from_json(to_json(f));
    CHECK((std::get<UnitaryBlock>(again.blocks[0]).unitary - std::get<UnitaryBlock>(f.blocks[0]).unitary).norm() == 0.0);

    json bad = j;
    bad["blocks"][0] = {{"type", "unitary"}, {"operator", to_json(ModuleOperator::identity(kMixed, 1) * Complex(2.0))}};
    CHECK(location_of([&] { isometry_fixture_from_json(bad, 1); }) == "/blocks/0/operator");
    bad["blocks"][0] = {{"type", "diagonal"}};
    CHECK(location_of([&] { isometry_fixture_from_json(bad, 1); }) == "/blocks/0/type");
  }
}
