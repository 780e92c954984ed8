// Acceptance criteria AC1-AC9: one PASS/FAIL line each, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "shiftmod/cooper.hpp"
#include "shiftmod/gallery.hpp"
#include "shiftmod/run.hpp"
#include "shiftmod/wold.hpp"

using namespace shiftmod;

namespace {

const AlgebraSignature kScalar({1});
const AlgebraSignature kMixed({1, 2});

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [" << what << "]";
    }
  }
  // Every check of the stage within `tol`, regardless of the tolerance it was run with.
  void within(const StageReport& rep, double tol, const std::string& label) {
    double worst = 0.0;
    for (const auto& c : rep.checks) {
      if (!(c.residual <= tol) || !c.pass) require(false, label + "/" + c.name + " residual " + fmt(c.residual));
      if (c.residual > worst) worst = c.residual;
    }
    if (rep.checks.empty()) require(false, label + " has no checks");
    max_residual = std::max(max_residual, worst);
  }
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }
  double max_residual = 0.0;
};

struct Criterion {
  std::string id;
  std::string title;
  double seconds_limit;
  std::function<void(Verdict&)> body;
};

AbstractSemigroup shift_over(const AlgebraSignature& sig, int rank, int n, std::int64_t disguise_units,
                             std::uint64_t seed) {
  const SpecPtr space = make_spec(n, IndexKind::unilateral, sig, rank);
  AbstractSemigroup s = standard_shift_semigroup(space);
  if (disguise_units > 0) {
    Rng rng(seed);
    s = disguise(s, random_window_unitary(space, disguise_units, rng));
  }
  return s;
}

std::vector<GridVector> probes_on(const SpecPtr& space, std::int64_t span, int count, Rng& rng) {
  std::vector<GridVector> out;
  for (int i = 0; i < count; ++i) out.push_back(random_vector(space, 0, span, rng));
  return out;
}

constexpr double kTight = 1e-12;

void ac1(Verdict& v) {
  const int n = 8;
  const std::int64_t units = 4;
  for (const AlgebraSignature& sig : {kScalar, kMixed})
    for (std::int64_t window : {std::int64_t{0}, units}) {
      const AbstractSemigroup s = shift_over(sig, 1, n, window, 7);
      Rng rng(11);
      const auto probes = probes_on(s.space, units * n, 3, rng);
      const std::string label = std::string(sig.num_blocks() == 1 ? "C" : "C+M2") + (window ? " disguised" : "");
      const StageReport rep = verify_pab_calculus(s, probes, units * n, 25, rng, kTight);
      v.within(rep, kTight, label);
      v.require(rep.checks.size() >= 6, label + " covers the six identities");
    }
}

void ac2(Verdict& v) {
  const int n = 10;
  for (std::int64_t window : {std::int64_t{0}, std::int64_t{2}}) {
    const AbstractSemigroup s = shift_over(kMixed, 1, n, window, 5);
    Rng rng(12);
    const auto probes = probes_on(s.space, 3 * n, 3, rng);
    const StageReport rep = verify_window_group(s, GridTime{0}, GridTime{n}, probes, kTight);
    v.within(rep, kTight, window ? "disguised" : "plain");
    v.require(rep.find("group_law_short") && rep.find("group_law_wrap"), "both branches");
    const StageReport shifted = verify_window_group(s, GridTime{3}, GridTime{3 + n}, probes, kTight);
    v.within(shifted, kTight, "window [3, 13)");
  }
}

void ac3(Verdict& v) {
  const int n = 8;
  const std::int64_t units = 3;
  const AbstractSemigroup s = shift_over(kMixed, 1, n, 2, 9);
  Rng rng(13);
  const auto probes = probes_on(s.space, units * n, 3, rng);
  v.within(verify_averaging(s, GridTime{0}, GridTime{n}, probes, kTight), kTight, "averaging [0,1)");
  v.within(verify_averaging(s, GridTime{5}, GridTime{5 + 2 * n}, probes, kTight), kTight, "averaging [5,21)");
  const auto tuples = random_nested_intervals(*s.space, units, 10, rng);
  v.require(tuples.size() == 10, "ten nested tuples");
  v.within(verify_ratio(s, tuples, probes, kTight), kTight, "ratio");
  const GridOperator q = averaging_projection(s, GridTime{0}, GridTime{n});
  std::vector<GridVector> z, w;
  for (int i = 0; i < 2; ++i) {
    z.push_back(q(random_vector(s.space, 0, units * n, rng)));
    w.push_back(q(random_vector(s.space, 0, units * n, rng)));
  }
  const StageReport rel = verify_q_relations(s, z, w, probes, 10, rng, units * n, kTight);
  v.require(rel.find("lebesgue_inner_product") != nullptr, "lebesgue law checked");
  v.within(rel, kTight, "q relations");
}

void ac4(Verdict& v) {
  const int n = 64;
  const AbstractSemigroup s = shift_over(kMixed, 1, n, 0, 3);
  const ModuleVector y = ModuleVector::basis(kMixed, 1, 0);
  const GridOperator p01 = interval_projection(s, GridTime{0}, GridTime{n}).op;
  const GridVector x = p01(sample_profile(s.space, [](double u) { return std::sin(std::numbers::pi * u); }, y,
                                          GridTime{0}, GridTime{n}));
  const std::vector<int> ns{1, 2, 4, 8, 16};
  const auto rows = limit_convergence(s, x, ns, kTight);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    v.require(rows[i].residual <= rows[i].witness, "witness bound at n=" + std::to_string(rows[i].n));
    if (i > 0)
      v.require(rows[i].residual < rows[i - 1].residual, "strict decrease at n=" + std::to_string(rows[i].n));
  }
  v.detail << " r_16=" << Verdict::fmt(rows.back().residual);
  Rng rng(14);
  for (int m : ns) {
    std::vector<double> heights;
    for (int k = 0; k < m; ++k) heights.push_back(rng.normal());
    const GridVector step = p01(sample_profile(
        s.space, [&](double u) { return heights[std::min(m - 1, static_cast<int>(u * m))]; }, y, GridTime{0},
        GridTime{n}));
    const double r = limit_convergence(s, step, {m}, kTight).front().residual;
    v.require(r <= kTight, "step function aligned to 1/" + std::to_string(m) + " residual " + Verdict::fmt(r));
    v.max_residual = std::max(v.max_residual, r);
  }
}

void ac5(Verdict& v) {
  ReconstructConfig cfg;
  cfg.horizon = 4;
  cfg.tol = 1e-8;
  cfg.surjectivity_tol = 1e-8;
  struct Case {
    int rank;
    std::vector<int> dims;
  };
  for (const Case& c : {Case{1, {1, 2}}, Case{2, {2, 4}}}) {
    const AbstractSemigroup s = shift_over(kMixed, c.rank, 8, 4, 21);
    const EquivalenceReport rep = reconstruct(s, cfg);
    const std::string label = "rank " + std::to_string(c.rank);
    v.require(rep.fiber.has_value() && rep.fiber->block_dims == c.dims, label + " block dims");
    v.require(rep.passed(), label + " all stages");
    bool seen = false;
    for (const auto& st : rep.stages) {
      if (st.stage != "equivalence") continue;
      seen = true;
      for (const char* name : {"isometry", "surjectivity", "intertwining_window", "intertwining_shift"}) {
        const CheckRecord* ck = st.find(name);
        v.require(ck && ck->residual <= 1e-8, label + " " + name);
        if (ck) v.max_residual = std::max(v.max_residual, ck->residual);
      }
    }
    v.require(seen, label + " equivalence stage");
  }
  const EquivalenceReport control = reconstruct(nonpure_semigroup(8, kMixed, 1, 1), cfg);
  bool surjectivity_failed = false;
  for (const auto& st : control.stages)
    if (const CheckRecord* ck = st.find("surjectivity")) surjectivity_failed = surjectivity_failed || !ck->pass;
  v.require(surjectivity_failed, "negative control fails surjectivity");
}

void ac6(Verdict& v) {
  const SpecPtr base = make_spec(1, IndexKind::unilateral, kMixed, 1);
  const InterleavedSemigroup s = interleave(Isometry{base, standard_shift(base, GridTime{1})}, 6);
  Rng rng(15);
  std::vector<TensorVector> probes;
  for (int i = 0; i < 3; ++i) probes.push_back(random_tensor_vector(base, 6, 0, 4, rng));
  const StageReport law = verify_interleave(s, probes, kTight);
  v.require(law.find("law_branch_short") && law.find("law_branch_wrap"), "both branches");
  v.within(law, kTight, "interleave law");
  v.within(interleave_is_shift(base->fiber(), 6, 3, 3, rng, kTight), kTight, "interleave_is_shift");
}

void ac7(Verdict& v) {
  Rng rng(16);
  const StructuredIsometry iso(kMixed, {UnitaryBlock{ModuleOperator::random_unitary(kMixed, 1, rng)}, ShiftBlock{1}},
                               DisguiseSpec{4, 17});
  const std::int64_t window = 6;
  const int n_max = 12;
  const DecompositionResult d = decompose(iso, window, n_max, 1e-10);
  v.require(d.unitary_dims == iso.unitary_block_dims(), "unitary block dims");
  std::vector<int> pure_expected;
  for (std::size_t i = 0; i < kMixed.num_blocks(); ++i)
    pure_expected.push_back(static_cast<int>(window) * kMixed.block_dim(i));
  v.require(d.pure_dims == pure_expected, "pure block dims");

  const auto basis = iso.basis(window);
  const GridOperator& disguise = iso.disguise_unitary();
  const GridVector unitary = disguise(basis[0]);
  const GridVector shift = disguise(basis[3]);
  const GridVector mixed = disguise(basis[0] * Complex(0.6) + basis[3] * Complex(0.8));
  const auto rows = pureness_metric(iso.isometry(), {unitary, shift, mixed}, n_max, 1e-10);
  v.require(!rows[0].pure && std::abs(rows[0].final_value - 1.0) <= 1e-10, "unitary probe");
  v.require(rows[1].pure, "shift probe");
  v.require(!rows[2].pure && std::abs(rows[2].final_value - 0.6) <= 1e-10, "mixed probe plateau 0.6");
}

void ac8(Verdict& v) {
  for (int n = 0; n <= 16; ++n)
    for (int m = 0; m <= 16; ++m)
      v.require(nondecex_check(16, n, m) == (n == m ? 0.0 : 1.0),
                "nondecex (" + std::to_string(n) + "," + std::to_string(m) + ")");
  const double jump = nonsc_check(8, 72, GridTime{9});
  v.require(jump >= std::numbers::sqrt2 - 0.05, "nonsc jump " + Verdict::fmt(jump));
  const auto refine = nonsc_continuous_probe(8, {8, 16, 32, 64, 128});
  for (std::size_t i = 1; i < refine.size(); ++i)
    v.require(refine[i].value < refine[i - 1].value, "continuous probe decreases");
  v.require(refine.back().value <= std::numbers::pi / 128, "continuous probe tends to 0");
  Rng rng(18);
  const WeylResult w = weyl_check(8, 16, 3, 2 * std::numbers::pi, 10, rng);
  v.require(w.residual <= kTight && w.probe_phases.size() == 10, "weyl residual " + Verdict::fmt(w.residual));
  v.max_residual = std::max(v.max_residual, w.residual);
  for (int m : {4, 8, 16, 32}) {
    const ShadowRow r = nonadex_shadow(m, GridTime{1}, 4);
    v.require(r.fraction == 1.0 / m, "shadow fraction m=" + std::to_string(m));
  }
}

void ac9(Verdict& v) {
  std::vector<RunConfig> configs;
  for (Command c : {Command::reconstruct, Command::wold, Command::verify}) {
    RunConfig cfg;
    cfg.command = c;
    cfg.seed = 3;
    configs.push_back(cfg);
  }
  RunConfig gallery;
  gallery.command = Command::gallery;
  gallery.scenario = "all";
  configs.push_back(gallery);
#ifdef SHIFTMOD_FIXTURE_DIR
  RunConfig fixture;
  fixture.command = Command::reconstruct;
  fixture.fixture = std::string(SHIFTMOD_FIXTURE_DIR) + "/disguised_shift.json";
  configs.push_back(fixture);
#endif
  for (const RunConfig& cfg : configs) {
    const RunResult a = run(cfg), b = run(cfg);
    const std::string label = to_string(cfg.command) + (cfg.fixture.empty() ? "" : " fixture");
    v.require(render_report(a.report) == render_report(b.report), label + " report bytes");
    v.require(a.curves.size() == b.curves.size(), label + " curve count");
    for (std::size_t i = 0; i < std::min(a.curves.size(), b.curves.size()); ++i)
      v.require(render_csv(a.curves[i]) == render_csv(b.curves[i]), label + " csv " + a.curves[i].name);
    v.require(a.exit_code == exit_pass, label + " exit code " + std::to_string(a.exit_code));
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"AC1", "projection calculus", 10, ac1},   {"AC2", "window group", 30, ac2},
      {"AC3", "averaging and ratio", 1e9, ac3},  {"AC4", "limit convergence", 60, ac4},
      {"AC5", "reconstruction round trip", 120, ac5}, {"AC6", "interleaving", 1e9, ac6},
      {"AC7", "wold decomposition", 1e9, ac7},   {"AC8", "gallery", 1e9, ac8},
      {"AC9", "determinism", 1e9, ac9},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds >= c.seconds_limit) v.require(false, "runtime " + Verdict::fmt(seconds) + " s");
    if (!v.pass) ++failures;
    std::printf("%s %s: %s (max residual %s, %.2f s)%s\n", v.pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(),
                Verdict::fmt(v.max_residual).c_str(), seconds, v.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
