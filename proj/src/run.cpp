#include "shiftmod/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "shiftmod/cooper.hpp"
#include "shiftmod/gallery.hpp"
#include "shiftmod/json_io.hpp"
#include "shiftmod/suites.hpp"
#include "shiftmod/wold.hpp"

namespace shiftmod {

namespace {

constexpr int kSchemaVersion = 1;
constexpr int kMaxGrid = 4096;
constexpr std::int64_t kMaxHorizon = 256;

struct Session {
  const RunConfig& cfg;
  json resolved = json::object();
  json input;
  json fiber;
  std::vector<StageReport> stages;
  std::vector<Curve> curves;
};

// Runs one stage; an exception inside it is recorded as a failed check.
void guarded(Session& s, const std::string& stage, const std::function<StageReport()>& body) {
  try {
    s.stages.push_back(body());
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    StageReport rep{stage, {}, {}};
    rep.fail("stage_error", e.what());
    s.stages.push_back(std::move(rep));
  }
}

int grid_or(const Session& s, std::optional<int> fixture_value, int fallback) {
  return s.cfg.grid.value_or(fixture_value.value_or(fallback));
}

std::int64_t horizon_or(const Session& s, std::optional<std::int64_t> fixture_value, std::int64_t fallback) {
  return s.cfg.horizon.value_or(fixture_value.value_or(fallback));
}

void check_range(std::int64_t v, std::int64_t lo, std::int64_t hi, const std::string& what) {
  if (v < lo || v > hi)
    throw InputError(what + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " +
                         std::to_string(v),
                     "");
}

Curve limit_curve(const StageReport& rep, const std::string& name) {
  Curve c{name, {}};
  if (rep.data.contains("table"))
    for (const auto& row : rep.data["table"])
      c.rows.push_back({row["n"].get<double>(), row["residual"].get<double>(), row["witness"].get<double>()});
  return c;
}

const StageReport* find_stage(const std::vector<StageReport>& stages, const std::string& name) {
  for (const auto& st : stages)
    if (st.stage == name) return &st;
  return nullptr;
}

// --- reconstruct / verify ---------------------------------------------------

struct BuiltSemigroup {
  AbstractSemigroup semigroup;
  int grid = 8;
  std::int64_t horizon = 4;
};

BuiltSemigroup build_semigroup(Session& s, const SemigroupFixture& f) {
  BuiltSemigroup out{standard_shift_semigroup(make_spec(1, IndexKind::unilateral, f.signature, f.rank)), 8, 4};
  out.grid = grid_or(s, f.slots_per_unit, 8);
  out.horizon = horizon_or(s, f.horizon, 4);
  check_range(out.grid, 1, kMaxGrid, "grid");
  check_range(out.horizon, 1, kMaxHorizon, "horizon");
  if (f.model == SemigroupFixture::Model::nonpure) {
    out.semigroup = nonpure_semigroup(out.grid, f.signature, f.rank, f.unitary_rank);
  } else {
    const SpecPtr space = make_spec(out.grid, IndexKind::unilateral, f.signature, f.rank);
    out.semigroup = standard_shift_semigroup(space);
    if (f.disguise_window) {
      if (*f.disguise_window > out.horizon)
        throw InputError("disguise window exceeds the horizon", "/disguise/window_units");
      Rng rng(f.disguise_seed.value_or(s.cfg.seed));
      out.semigroup = disguise(out.semigroup, random_window_unitary(space, *f.disguise_window, rng));
    }
  }
  s.resolved["grid"] = out.grid;
  s.resolved["horizon"] = out.horizon;
  s.resolved["model"] = out.semigroup.label;
  s.resolved["declared_pure"] = out.semigroup.declared_pure;
  return out;
}

SemigroupFixture load_semigroup_fixture(Session& s, SemigroupFixture fallback) {
  if (s.cfg.fixture.empty()) {
    s.input = to_json(fallback);
    return fallback;
  }
  const json j = read_json_file(s.cfg.fixture);
  SemigroupFixture f = semigroup_fixture_from_json(j);
  s.input = to_json(f);
  return f;
}

void run_reconstruct(Session& s) {
  const SemigroupFixture f = load_semigroup_fixture(s, SemigroupFixture{});
  const BuiltSemigroup b = build_semigroup(s, f);
  ReconstructConfig rc;
  rc.horizon = b.horizon;
  rc.tol = s.cfg.tol;
  rc.seed = s.cfg.seed;
  const EquivalenceReport rep = reconstruct(b.semigroup, rc);
  s.stages = rep.stages;
  if (rep.fiber) {
    json frame = json::array();
    for (const auto& v : rep.fiber->frame) frame.push_back(to_json(v));
    s.fiber = {{"block_dims", rep.fiber->block_dims},
               {"frame_size", rep.fiber->frame.size()},
               {"gram", to_json(rep.fiber->gram)},
               {"frame", std::move(frame)}};
  }
  if (const StageReport* lim = find_stage(s.stages, "limit")) s.curves.push_back(limit_curve(*lim, "limit_convergence"));
}

void run_verify(Session& s) {
  SemigroupFixture fallback;
  fallback.signature = AlgebraSignature({1, 2});
  const SemigroupFixture f = load_semigroup_fixture(s, fallback);
  const BuiltSemigroup b = build_semigroup(s, f);
  const AbstractSemigroup& sg = b.semigroup;
  const SpecPtr& space = sg.space;
  const int units = space->slots_per_unit();
  const std::int64_t span = b.horizon * units;
  const double tol = s.cfg.tol;
  const int samples = 25;
  Rng rng(s.cfg.seed);

  guarded(s, "algebra", [&] { return algebra_suite(f.signature, f.rank, 20, rng, tol); });
  guarded(s, "grid", [&] {
    const SpecPtr plain = make_spec(units, IndexKind::unilateral, f.signature, f.rank);
    return grid_suite(plain, b.horizon, 20, rng, tol);
  });
  std::vector<GridVector> probes;
  for (int i = 0; i < 4; ++i) probes.push_back(random_vector(space, 0, span, rng));
  guarded(s, "semigroup", [&] { return verify_semigroup(sg, probes, span, samples, rng, tol); });
  guarded(s, "pab_calculus", [&] { return verify_pab_calculus(sg, probes, span, samples, rng, tol); });
  guarded(s, "window_group", [&] { return verify_window_group(sg, GridTime{0}, GridTime{units}, probes, tol); });
  guarded(s, "averaging", [&] { return verify_averaging(sg, GridTime{0}, GridTime{units}, probes, tol); });
  guarded(s, "ratio", [&] {
    return verify_ratio(sg, random_nested_intervals(*space, b.horizon, 10, rng), probes, tol);
  });
  guarded(s, "limit", [&] {
    std::vector<int> ns;
    for (int n : {1, 2, 4, 8, 16})
      if (units % n == 0) ns.push_back(n);
    const IntervalProjection p01 = interval_projection(sg, GridTime{0}, GridTime{units});
    const GridVector x = p01.op(sample_profile(
        space, [](double u) { return std::sin(std::numbers::pi * u); }, ModuleVector::basis(f.signature, f.rank, 0),
        GridTime{0}, GridTime{units}));
    StageReport rep = verify_limit(limit_convergence(sg, x, ns, tol), tol);
    s.curves.push_back(limit_curve(rep, "limit_convergence"));
    return rep;
  });
  guarded(s, "q_relations", [&] {
    const GridOperator q = averaging_projection(sg, GridTime{0}, GridTime{units});
    std::vector<GridVector> z, w;
    for (int i = 0; i < 2; ++i) {
      z.push_back(q(random_vector(space, 0, span, rng)));
      w.push_back(q(random_vector(space, 0, span, rng)));
    }
    return verify_q_relations(sg, z, w, probes, samples, rng, span, tol);
  });
}

// --- wold -------------------------------------------------------------------

IsometryFixture default_isometry(std::uint64_t seed) {
  IsometryFixture f;
  f.signature = AlgebraSignature({1, 2});
  Rng rng(seed);
  f.blocks = {UnitaryBlock{ModuleOperator::random_unitary(f.signature, 1, rng)}, ShiftBlock{1}};
  f.disguise = DisguiseSpec{4, seed};
  return f;
}

void run_wold(Session& s) {
  IsometryFixture f;
  if (s.cfg.fixture.empty())
    f = default_isometry(s.cfg.seed);
  else
    f = isometry_fixture_from_json(read_json_file(s.cfg.fixture), s.cfg.seed);
  s.input = to_json(f);
  const std::int64_t window = s.cfg.horizon.value_or(f.window.value_or(6));
  check_range(window, 1, kMaxHorizon, "window");
  const std::int64_t disguise_window = f.disguise ? f.disguise->window : 0;
  check_range(disguise_window, 0, kMaxHorizon, "disguise window");
  const int n_max = f.n_max.value_or(static_cast<int>(window + disguise_window + 2));
  s.resolved["window"] = window;
  s.resolved["n_max"] = n_max;

  const StructuredIsometry iso(f.signature, f.blocks, f.disguise);
  const double tol = s.cfg.tol;
  std::optional<DecompositionResult> d;
  guarded(s, "wold", [&] {
    d = decompose(iso, window, n_max, tol);
    return d->report;
  });
  if (d) {
    guarded(s, "wold_blocks", [&] { return verify_against_blocks(iso, *d, window, tol); });
    s.fiber = {{"unitary_dims", d->unitary_dims},
               {"pure_dims", d->pure_dims},
               {"expected_unitary_dims", iso.unitary_block_dims()},
               {"stabilization_step", d->stabilization_step}};
  }

  guarded(s, "pureness", [&] {
    const auto basis = iso.basis(window);
    const std::size_t nu = iso.unitary_basis_size();
    const GridOperator& v = iso.disguise_unitary();
    struct Probe {
      std::string kind;
      GridVector x;
    };
    std::vector<Probe> probes;
    for (std::size_t i = 0; i < basis.size(); ++i) probes.push_back({i < nu ? "unitary" : "shift", v(basis[i])});
    if (nu > 0)
      for (std::size_t i = nu; i < basis.size(); ++i)
        probes.push_back({"mixed", v(basis[(i - nu) % nu] * Complex(0.6) + basis[i] * Complex(0.8))});
    std::vector<GridVector> xs;
    for (const auto& p : probes) xs.push_back(p.x);
    const auto rows = pureness_metric(iso.isometry(), xs, n_max, tol);
    const GridOperator unitary_part = iso.unitary_indicator();

    StageReport rep{"pureness", {}, {}};
    WorstCase plateau;
    int misclassified = 0;
    json classes = json::object();
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const double expected = norm(unitary_part(v.adjoint_apply(probes[i].x)));
      const bool expected_pure = expected <= tol;
      plateau.update(std::abs(rows[i].final_value - expected), probes[i].kind + " " + std::to_string(i));
      if (rows[i].pure != expected_pure) ++misclassified;
      json& c = classes[probes[i].kind];
      c["count"] = c.is_null() ? 1 : c["count"].get<int>() + 1;
      c["pure"] = (c.contains("pure") ? c["pure"].get<int>() : 0) + (rows[i].pure ? 1 : 0);
    }
    rep.add("classification", misclassified, 0.0);
    rep.add("plateau_matches_blocks", plateau.value, tol, plateau.where);
    rep.data["classes"] = classes;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      if (probes[i].kind != "mixed") continue;
      Curve c{"pureness_mixed_decay", {}};
      const double expected = norm(unitary_part(v.adjoint_apply(probes[i].x)));
      for (std::size_t n = 0; n < rows[i].decay.size(); ++n)
        c.rows.push_back({static_cast<double>(n), rows[i].decay[n], expected});
      s.curves.push_back(std::move(c));
      break;
    }
    return rep;
  });
}

// --- gallery ----------------------------------------------------------------

void gallery_interleave(Session& s) {
  const int n = s.cfg.grid.value_or(6);
  const std::int64_t horizon = s.cfg.horizon.value_or(3);
  check_range(n, 1, 64, "grid");
  check_range(horizon, 1, 32, "horizon");
  const double tol = s.cfg.tol;
  Rng rng(s.cfg.seed);
  const SpecPtr base = make_spec(1, IndexKind::unilateral, AlgebraSignature({1, 2}), 1);
  guarded(s, "interleave", [&] {
    const InterleavedSemigroup sg = interleave(Isometry{base, standard_shift(base, GridTime{1})}, n);
    std::vector<TensorVector> probes;
    for (int i = 0; i < 3; ++i) probes.push_back(random_tensor_vector(base, n, 0, horizon, rng));
    return verify_interleave(sg, probes, tol);
  });
  guarded(s, "interleave_is_shift", [&] { return interleave_is_shift(base->fiber(), n, horizon, 3, rng, tol); });
  s.resolved["interleave"] = {{"grid", n}, {"horizon", horizon}};
}

void gallery_nondecex(Session& s) {
  const std::int64_t k = s.cfg.horizon.value_or(16);
  check_range(k, 1, 64, "horizon");
  const int points = static_cast<int>(k);
  guarded(s, "nondecex", [&] {
    StageReport rep{"nondecex", {}, {}};
    WorstCase off, diag;
    for (int n = 0; n <= points; ++n) {
      for (int m = 0; m <= points; ++m) {
        const double v = nondecex_check(points, n, m);
        const std::string where = "n=" + std::to_string(n) + " m=" + std::to_string(m);
        if (n == m)
          diag.update(v, where);
        else
          off.update(std::abs(v - 1.0), where);
      }
    }
    const auto decay = nondecex_decay(points);
    rep.add("off_diagonal_exactly_one", off.value, 0.0, off.where);
    rep.add("diagonal_zero", diag.value, 0.0, diag.where);
    rep.add("pointwise_decay", decay.back(), 0.0);
    rep.data["points"] = points;
    Curve c{"nondecex_decay", {}};
    for (std::size_t n = 0; n < decay.size(); ++n) c.rows.push_back({static_cast<double>(n), decay[n], std::nullopt});
    s.curves.push_back(std::move(c));
    return rep;
  });
}

void gallery_nonsc(Session& s) {
  const int points = 8;
  const int n = s.cfg.grid.value_or(72);
  check_range(n, 1, kMaxGrid, "grid");
  if (n % points != 0 || n < points * (points + 1))
    throw InputError("nonsc needs a grid divisible by 8 and at least 72 slots per unit", "");
  guarded(s, "nonsc", [&] {
    StageReport rep{"nonsc", {}, {}};
    const double jump = nonsc_check(points, n, GridTime{n / points});
    const double bound = std::numbers::sqrt2 - 0.05;
    rep.add("jump_lower_bound", std::max(0.0, bound - jump), 0.0, "value " + std::to_string(jump));
    rep.add("zero_time", nonsc_check(points, n, GridTime{0}), 0.0);
    const auto rows = nonsc_continuous_probe(3, {8, 16, 32, 64, 128});
    double increase = 0.0, excess = 0.0;
    Curve c{"nonsc_continuous_probe", {}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double modulus = std::numbers::pi / rows[i].slots_per_unit;
      if (i > 0) increase = std::max(increase, rows[i].value - rows[i - 1].value);
      excess = std::max(excess, rows[i].value - modulus);
      c.rows.push_back({static_cast<double>(rows[i].slots_per_unit), rows[i].value, modulus});
    }
    rep.add("continuous_probe_decreasing", std::max(0.0, increase), 0.0);
    rep.add("continuous_probe_modulus", std::max(0.0, excess), s.cfg.tol);
    rep.data["jump"] = jump;
    rep.data["jump_bound"] = bound;
    s.curves.push_back(std::move(c));
    return rep;
  });
}

void gallery_nonadex(Session& s) {
  const std::int64_t window = s.cfg.horizon.value_or(4);
  check_range(window, 1, 64, "horizon");
  const double tol = s.cfg.tol;
  guarded(s, "nonadex_shadow", [&] {
    StageReport rep{"nonadex_shadow", {}, {}};
    Curve c{"nonadex_fraction", {}};
    double exact = 0.0, norm_dev = 0.0, previous = 2.0;
    int violations = 0;
    json rows = json::array();
    for (int m : {1, 4, 8, 16, 32}) {
      const ShadowRow r = nonadex_shadow(m, GridTime{1}, window);
      exact = std::max(exact, std::abs(r.fraction - 1.0 / m));
      norm_dev = std::max(norm_dev, std::abs(r.complement_norm - 1.0));
      if (!(r.fraction < previous)) ++violations;
      previous = r.fraction;
      c.rows.push_back({static_cast<double>(m), r.fraction, 1.0 / m});
      rows.push_back({{"samples", m}, {"fraction", r.fraction}, {"complement_norm", r.complement_norm}});
    }
    rep.add("fraction_exact", exact, 0.0);
    rep.add("fraction_strictly_decreasing", violations, 0.0);
    rep.add("complement_norm_one", norm_dev, tol);
    rep.data["rows"] = rows;
    s.curves.push_back(std::move(c));
    return rep;
  });
  guarded(s, "nonadex_full_ideal", [&] {
    const int m = 4;
    const DecompositionResult d = nonadex_full_ideal(m, window, tol);
    StageReport rep = d.report;
    rep.stage = "nonadex_full_ideal";
    int wrong = 0;
    for (std::size_t i = 0; i < d.unitary_dims.size(); ++i)
      if (d.unitary_dims[i] != 2 * window || d.pure_dims[i] != 0) ++wrong;
    rep.add("unitary_is_everything", wrong, 0.0);
    return rep;
  });
}

void gallery_weyl(Session& s) {
  const int n = s.cfg.grid.value_or(8);
  const std::int64_t units = s.cfg.horizon.value_or(2);
  check_range(n, 1, kMaxGrid, "grid");
  check_range(units, 1, 64, "horizon");
  const double tol = s.cfg.tol;
  guarded(s, "weyl", [&] {
    Rng rng(s.cfg.seed);
    const std::int64_t window = units * n;
    const WeylResult w = weyl_check(n, window, 3, 2.0 * std::numbers::pi, 10, rng);
    const WeylResult zero_s = weyl_check(n, window, 0, 2.0 * std::numbers::pi, 3, rng);
    const WeylResult zero_t = weyl_check(n, window, 3, 0.0, 3, rng);
    StageReport rep{"weyl", {}, {}};
    rep.add("phase_residual", w.residual, tol);
    rep.add("probe_independence", w.phase_spread, tol);
    rep.add("trivial_cases", std::max({zero_s.residual, zero_t.residual, std::abs(zero_s.expected_phase - 1.0),
                                       std::abs(zero_t.expected_phase - 1.0)}),
            tol);
    rep.data["sign"] = w.sign;
    rep.data["expected_phase"] = to_json(w.expected_phase);
    rep.data["s_slots"] = 3;
    rep.data["t"] = 2.0 * std::numbers::pi;
    Curve c{"weyl_probe_phases", {}};
    for (std::size_t i = 0; i < w.probe_phases.size(); ++i)
      c.rows.push_back({static_cast<double>(i), std::abs(w.probe_phases[i] - w.expected_phase), std::nullopt});
    s.curves.push_back(std::move(c));
    return rep;
  });
}

void run_gallery(Session& s) {
  const std::string& name = s.cfg.scenario;
  if (name.empty()) throw InputError("gallery needs a scenario", "");
  if (!s.cfg.fixture.empty()) throw InputError("gallery scenarios take no fixture", "");
  const bool all = name == "all";
  bool known = all;
  auto pick = [&](const char* scenario, void (*body)(Session&)) {
    if (all || name == scenario) {
      known = true;
      body(s);
    }
  };
  pick("interleave", gallery_interleave);
  pick("nondecex", gallery_nondecex);
  pick("nonsc", gallery_nonsc);
  pick("nonadex", gallery_nonadex);
  pick("weyl", gallery_weyl);
  if (!known) throw InputError("unknown gallery scenario '" + name + "'", "");
}

json config_json(const RunConfig& c) {
  json out = {{"command", to_string(c.command)}, {"tol", c.tol}, {"seed", c.seed}};
  out["grid"] = c.grid ? json(*c.grid) : json(nullptr);
  out["horizon"] = c.horizon ? json(*c.horizon) : json(nullptr);
  out["scenario"] = c.scenario.empty() ? json(nullptr) : json(c.scenario);
  out["fixture"] = c.fixture.empty() ? json(nullptr) : json(c.fixture);
  return out;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'", "");
  out << content;
  if (!out) throw InputError("cannot write '" + path.string() + "'", "");
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  if (name == "reconstruct") return Command::reconstruct;
  if (name == "wold") return Command::wold;
  if (name == "verify") return Command::verify;
  if (name == "gallery") return Command::gallery;
  return std::nullopt;
}

std::string to_string(Command c) {
  switch (c) {
    case Command::reconstruct:
      return "reconstruct";
    case Command::wold:
      return "wold";
    case Command::verify:
      return "verify";
    case Command::gallery:
      return "gallery";
  }
  return "unknown";
}

const std::vector<std::string>& gallery_scenarios() {
  static const std::vector<std::string> names = {"interleave", "nondecex", "nonsc", "nonadex", "weyl", "all"};
  return names;
}

RunResult run(const RunConfig& config) {
  Session s{config, json::object(), json(), json(), {}, {}};
  RunResult result;
  json error;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (!(config.tol > 0.0) || !std::isfinite(config.tol)) throw InputError("tolerance must be positive", "");
    if (config.grid) check_range(*config.grid, 1, kMaxGrid, "grid");
    if (config.horizon) check_range(*config.horizon, 1, kMaxHorizon, "horizon");
    switch (config.command) {
      case Command::reconstruct:
        run_reconstruct(s);
        break;
      case Command::wold:
        run_wold(s);
        break;
      case Command::verify:
        run_verify(s);
        break;
      case Command::gallery:
        run_gallery(s);
        break;
    }
  } catch (const InputError& e) {
    error = {{"kind", "input"}, {"message", e.message()}};
    if (!e.location().empty()) error["location"] = e.location();
  } catch (const std::exception& e) {
    error = {{"kind", "diagnostic"}, {"message", e.what()}};
  }

  json& r = result.report;
  r["schema_version"] = kSchemaVersion;
  r["tool"] = "shiftmod";
  r["command"] = to_string(config.command);
  r["config"] = config_json(config);
  if (!s.resolved.empty()) r["resolved"] = s.resolved;
  if (!s.input.is_null()) r["input"] = s.input;
  json stages = json::array();
  bool pass = error.is_null() && !s.stages.empty();
  for (const auto& st : s.stages) {
    stages.push_back(to_json(st));
    pass = pass && st.passed();
  }
  r["stages"] = std::move(stages);
  if (!s.fiber.is_null()) r["fiber"] = s.fiber;
  if (!error.is_null()) r["error"] = error;
  if (config.timing)
    r["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  r["pass"] = pass;

  result.curves = std::move(s.curves);
  if (!error.is_null() && error["kind"] == "input")
    result.exit_code = exit_input_error;
  else
    result.exit_code = pass ? exit_pass : exit_check_failure;
  return result;
}

std::string render_report(const json& report) { return report.dump(2) + "\n"; }

std::string render_csv(const Curve& curve) {
  std::string out = "x,value,bound\n";
  for (const auto& row : curve.rows) {
    out += format_number(row.x) + "," + format_number(row.value) + ",";
    if (row.bound) out += format_number(*row.bound);
    out += "\n";
  }
  return out;
}

int execute(const RunConfig& config) {
  const RunResult result = run(config);
  int code = result.exit_code;
  try {
    const std::string text = render_report(result.report);
    if (config.report.empty())
      std::cout << text;
    else
      write_file(config.report, text);
    if (!config.csv_dir.empty()) {
      std::filesystem::create_directories(config.csv_dir);
      for (const auto& c : result.curves)
        write_file(std::filesystem::path(config.csv_dir) / (c.name + ".csv"), render_csv(c));
    }
  } catch (const std::exception& e) {
    std::cerr << "shiftmod: " << e.what() << "\n";
    return exit_input_error;
  }
  if (result.report.contains("error")) {
    const json& err = result.report["error"];
    std::cerr << "shiftmod: " << (err.contains("location") ? err["location"].get<std::string>() + ": " : "")
              << err["message"].get<std::string>() << "\n";
  }
  return code;
}

}  // namespace shiftmod
