#include "shiftmod/json_io.hpp"

#include <fstream>
#include <sstream>

namespace shiftmod {

namespace {

std::string child(const std::string& where, const std::string& key) { return where + "/" + key; }
std::string child(const std::string& where, std::size_t index) { return where + "/" + std::to_string(index); }

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw InputError(what, where.empty() ? "/" : where);
}

const json& member(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(where, "missing key \"" + key + "\"");
  return *it;
}

const json* optional_member(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

const json& array_at(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array");
  return j;
}

std::int64_t integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<std::int64_t>();
}

int positive_int(const json& j, const std::string& where) {
  const std::int64_t v = integer(j, where);
  if (v < 1 || v > 1'000'000) bad(where, "expected a positive integer");
  return static_cast<int>(v);
}

std::uint64_t unsigned_integer(const json& j, const std::string& where) {
  if (!j.is_number_unsigned()) bad(where, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, int rows, int cols, const std::string& where) {
  array_at(j, where);
  if (static_cast<int>(j.size()) != rows) bad(where, "expected " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const std::string rw = child(where, static_cast<std::size_t>(r));
    const json& row = array_at(j[r], rw);
    if (static_cast<int>(row.size()) != cols) bad(rw, "expected " + std::to_string(cols) + " columns");
    for (int c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[c], child(rw, static_cast<std::size_t>(c)));
  }
  return m;
}

json blocks_to_json(const AlgebraElement& b) {
  json out = json::array();
  for (const auto& m : b.blocks()) out.push_back(matrix_to_json(m));
  return out;
}

AlgebraElement blocks_from_json(const json& j, const AlgebraSignature& sig, const std::string& where) {
  array_at(j, where);
  if (j.size() != sig.num_blocks()) bad(where, "expected " + std::to_string(sig.num_blocks()) + " blocks");
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < sig.num_blocks(); ++i)
    blocks.push_back(matrix_from_json(j[i], sig.block_dim(i), sig.block_dim(i), child(where, i)));
  return AlgebraElement(sig, std::move(blocks));
}

json disguise_to_json(const DisguiseSpec& d) { return {{"window", d.window}, {"seed", d.seed}}; }

}  // namespace

// --- encoding ---------------------------------------------------------------

json to_json(Complex c) { return json::array({c.real(), c.imag()}); }

json to_json(const AlgebraSignature& sig) { return sig.block_dims(); }

json to_json(const AlgebraElement& b) { return {{"signature", to_json(b.signature())}, {"blocks", blocks_to_json(b)}}; }

json to_json(const ModuleVector& x) {
  json entries = json::array();
  for (const auto& e : x.entries()) entries.push_back(blocks_to_json(e));
  return {{"signature", to_json(x.signature())}, {"rank", x.rank()}, {"entries", std::move(entries)}};
}

json to_json(const ModuleOperator& t) {
  json rows = json::array();
  for (int r = 0; r < t.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < t.cols(); ++c) row.push_back(blocks_to_json(t.entry(r, c)));
    rows.push_back(std::move(row));
  }
  return {{"signature", to_json(t.signature())}, {"rows", t.rows()}, {"cols", t.cols()}, {"entries", std::move(rows)}};
}

json to_json(const GridSpec& spec) {
  json fiber = {{"signature", to_json(spec.signature())}, {"rank", spec.fiber_rank()}};
  if (spec.fiber().projection) fiber["projection"] = to_json(*spec.fiber().projection);
  return {{"slots_per_unit", spec.slots_per_unit()},
          {"index_kind", spec.kind() == IndexKind::unilateral ? "unilateral" : "bilateral"},
          {"fiber", std::move(fiber)}};
}

json to_json(const GridVector& f) {
  json entries = json::array();
  for (const auto& [slot, v] : f.entries()) entries.push_back({{"slot", slot}, {"vector", to_json(v)}});
  return {{"spec", to_json(f.spec())}, {"entries", std::move(entries)}};
}

// --- decoding ---------------------------------------------------------------

Complex complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    bad(where, "expected a complex number [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

AlgebraSignature signature_from_json(const json& j, const std::string& where) {
  array_at(j, where);
  if (j.empty()) bad(where, "signature must list at least one block");
  std::vector<int> dims;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const int d = positive_int(j[i], child(where, i));
    if (d > 64) bad(child(where, i), "block dimension too large");
    dims.push_back(d);
  }
  return AlgebraSignature(std::move(dims));
}

AlgebraElement algebra_element_from_json(const json& j, const std::string& where) {
  const AlgebraSignature sig = signature_from_json(member(j, "signature", where), child(where, "signature"));
  return blocks_from_json(member(j, "blocks", where), sig, child(where, "blocks"));
}

ModuleVector module_vector_from_json(const json& j, const std::string& where) {
  const AlgebraSignature sig = signature_from_json(member(j, "signature", where), child(where, "signature"));
  const int rank = positive_int(member(j, "rank", where), child(where, "rank"));
  const std::string ew = child(where, "entries");
  const json& entries = array_at(member(j, "entries", where), ew);
  if (static_cast<int>(entries.size()) != rank) bad(ew, "expected " + std::to_string(rank) + " entries");
  std::vector<AlgebraElement> parts;
  for (std::size_t k = 0; k < entries.size(); ++k) parts.push_back(blocks_from_json(entries[k], sig, child(ew, k)));
  return ModuleVector::from_entries(parts);
}

ModuleOperator module_operator_from_json(const json& j, const std::string& where) {
  const AlgebraSignature sig = signature_from_json(member(j, "signature", where), child(where, "signature"));
  const int rows = positive_int(member(j, "rows", where), child(where, "rows"));
  const int cols = positive_int(member(j, "cols", where), child(where, "cols"));
  const std::string ew = child(where, "entries");
  const json& entries = array_at(member(j, "entries", where), ew);
  if (static_cast<int>(entries.size()) != rows) bad(ew, "expected " + std::to_string(rows) + " rows");
  std::vector<std::vector<AlgebraElement>> parts;
  for (int r = 0; r < rows; ++r) {
    const std::string rw = child(ew, static_cast<std::size_t>(r));
    const json& row = array_at(entries[r], rw);
    if (static_cast<int>(row.size()) != cols) bad(rw, "expected " + std::to_string(cols) + " entries");
    std::vector<AlgebraElement> line;
    for (int c = 0; c < cols; ++c) line.push_back(blocks_from_json(row[c], sig, child(rw, static_cast<std::size_t>(c))));
    parts.push_back(std::move(line));
  }
  return ModuleOperator::from_entries(parts);
}

SpecPtr grid_spec_from_json(const json& j, const std::string& where) {
  const int n = positive_int(member(j, "slots_per_unit", where), child(where, "slots_per_unit"));
  const std::string kind = text(member(j, "index_kind", where), child(where, "index_kind"));
  IndexKind k;
  if (kind == "unilateral")
    k = IndexKind::unilateral;
  else if (kind == "bilateral")
    k = IndexKind::bilateral;
  else
    bad(child(where, "index_kind"), "expected \"unilateral\" or \"bilateral\"");
  const std::string fw = child(where, "fiber");
  const json& fj = member(j, "fiber", where);
  FiberSpec fiber{signature_from_json(member(fj, "signature", fw), child(fw, "signature")),
                  positive_int(member(fj, "rank", fw), child(fw, "rank")), std::nullopt};
  if (const json* p = optional_member(fj, "projection", fw))
    fiber.projection = module_operator_from_json(*p, child(fw, "projection"));
  try {
    return make_spec(n, k, std::move(fiber));
  } catch (const std::invalid_argument& e) {
    bad(where, e.what());
  }
}

GridVector grid_vector_from_json(const json& j, const std::string& where) {
  const SpecPtr spec = grid_spec_from_json(member(j, "spec", where), child(where, "spec"));
  GridVector f(spec);
  const std::string ew = child(where, "entries");
  const json& entries = array_at(member(j, "entries", where), ew);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string iw = child(ew, i);
    const std::int64_t slot = integer(member(entries[i], "slot", iw), child(iw, "slot"));
    ModuleVector v = module_vector_from_json(member(entries[i], "vector", iw), child(iw, "vector"));
    try {
      f.add(slot, v);
    } catch (const std::exception& e) {
      bad(iw, e.what());
    }
  }
  return f;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open fixture file '" + path + "'", "");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  try {
    return json::parse(content);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < content.size(); ++i) {
      if (content[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError("JSON syntax error in '" + path + "'", std::to_string(line) + ":" + std::to_string(col));
  }
}

// --- fixtures ---------------------------------------------------------------

namespace {

void expect_kind(const json& j, const std::string& kind) {
  const std::string got = text(member(j, "kind", ""), "/kind");
  if (got != kind) bad("/kind", "expected \"" + kind + "\", got \"" + got + "\"");
}

}  // namespace

SemigroupFixture semigroup_fixture_from_json(const json& j) {
  expect_kind(j, "semigroup");
  SemigroupFixture f;
  f.signature = signature_from_json(member(j, "signature", ""), "/signature");
  f.rank = positive_int(member(j, "rank", ""), "/rank");
  if (const json* m = optional_member(j, "model", "")) {
    const std::string model = text(*m, "/model");
    if (model == "standard")
      f.model = SemigroupFixture::Model::standard;
    else if (model == "nonpure")
      f.model = SemigroupFixture::Model::nonpure;
    else
      bad("/model", "expected \"standard\" or \"nonpure\"");
  }
  if (const json* u = optional_member(j, "unitary_rank", "")) f.unitary_rank = positive_int(*u, "/unitary_rank");
  if (const json* n = optional_member(j, "slots_per_unit", "")) f.slots_per_unit = positive_int(*n, "/slots_per_unit");
  if (const json* k = optional_member(j, "horizon", "")) f.horizon = positive_int(*k, "/horizon");
  if (const json* d = optional_member(j, "disguise", "")) {
    f.disguise_window = positive_int(member(*d, "window_units", "/disguise"), "/disguise/window_units");
    if (const json* s = optional_member(*d, "seed", "/disguise")) f.disguise_seed = unsigned_integer(*s, "/disguise/seed");
    if (f.model == SemigroupFixture::Model::nonpure) bad("/disguise", "the non-pure model takes no disguise");
  }
  return f;
}

IsometryFixture isometry_fixture_from_json(const json& j, std::optional<std::uint64_t> default_seed) {
  expect_kind(j, "isometry");
  IsometryFixture f;
  f.signature = signature_from_json(member(j, "signature", ""), "/signature");
  const json& blocks = array_at(member(j, "blocks", ""), "/blocks");
  if (blocks.empty()) bad("/blocks", "expected at least one block");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::string bw = child("/blocks", i);
    const std::string type = text(member(blocks[i], "type", bw), child(bw, "type"));
    if (type == "shift") {
      f.blocks.emplace_back(ShiftBlock{positive_int(member(blocks[i], "rank", bw), child(bw, "rank"))});
    } else if (type == "unitary") {
      if (const json* op = optional_member(blocks[i], "operator", bw)) {
        ModuleOperator u = module_operator_from_json(*op, child(bw, "operator"));
        if (!(u.signature() == f.signature)) bad(child(bw, "operator"), "signature differs from /signature");
        if (u.rows() != u.cols()) bad(child(bw, "operator"), "expected a square operator");
        const double defect = (u.adjoint() * u - ModuleOperator::identity(f.signature, u.rows())).norm();
        if (defect > 1e-10) bad(child(bw, "operator"), "operator is not unitary");
        f.blocks.emplace_back(UnitaryBlock{std::move(u)});
      } else {
        const int rank = positive_int(member(blocks[i], "rank", bw), child(bw, "rank"));
        std::optional<std::uint64_t> seed = default_seed;
        if (const json* s = optional_member(blocks[i], "seed", bw)) seed = unsigned_integer(*s, child(bw, "seed"));
        if (!seed) bad(bw, "unitary block needs \"operator\" or \"seed\"");
        Rng rng(*seed);
        f.blocks.emplace_back(UnitaryBlock{ModuleOperator::random_unitary(f.signature, rank, rng)});
      }
    } else {
      bad(child(bw, "type"), "expected \"unitary\" or \"shift\"");
    }
  }
  if (const json* d = optional_member(j, "disguise", "")) {
    DisguiseSpec spec;
    spec.window = positive_int(member(*d, "window", "/disguise"), "/disguise/window");
    if (const json* s = optional_member(*d, "seed", "/disguise"))
      spec.seed = unsigned_integer(*s, "/disguise/seed");
    else if (default_seed)
      spec.seed = *default_seed;
    else
      bad("/disguise", "missing key \"seed\"");
    f.disguise = spec;
  }
  if (const json* w = optional_member(j, "window", "")) f.window = positive_int(*w, "/window");
  if (const json* n = optional_member(j, "n_max", "")) f.n_max = positive_int(*n, "/n_max");
  return f;
}

json to_json(const SemigroupFixture& f) {
  json out = {{"kind", "semigroup"},
              {"signature", to_json(f.signature)},
              {"rank", f.rank},
              {"model", f.model == SemigroupFixture::Model::standard ? "standard" : "nonpure"}};
  if (f.model == SemigroupFixture::Model::nonpure) out["unitary_rank"] = f.unitary_rank;
  if (f.slots_per_unit) out["slots_per_unit"] = *f.slots_per_unit;
  if (f.horizon) out["horizon"] = *f.horizon;
  if (f.disguise_window) {
    out["disguise"] = {{"window_units", *f.disguise_window}};
    if (f.disguise_seed) out["disguise"]["seed"] = *f.disguise_seed;
  }
  return out;
}

json to_json(const IsometryFixture& f) {
  json blocks = json::array();
  for (const auto& b : f.blocks) {
    if (const auto* u = std::get_if<UnitaryBlock>(&b))
      blocks.push_back({{"type", "unitary"}, {"operator", to_json(u->unitary)}});
    else
      blocks.push_back({{"type", "shift"}, {"rank", std::get<ShiftBlock>(b).rank}});
  }
  json out = {{"kind", "isometry"}, {"signature", to_json(f.signature)}, {"blocks", std::move(blocks)}};
  if (f.disguise) out["disguise"] = disguise_to_json(*f.disguise);
  if (f.window) out["window"] = *f.window;
  if (f.n_max) out["n_max"] = *f.n_max;
  return out;
}

}  // namespace shiftmod
