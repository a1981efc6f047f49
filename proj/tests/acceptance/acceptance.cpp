// End-to-end acceptance checks for the invariant toolkit. Each criterion
// prints exactly one [PASS]/[FAIL] line; arguments select criteria by number
// (default: all). Exits nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <json.hpp>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "tropinv/infer_eq.hpp"
#include "tropinv/infer_ineq.hpp"
#include "tropinv/kip.hpp"
#include "tropinv/minilang.hpp"
#include "tropinv/pipeline.hpp"
#include "tropinv/smt.hpp"
#include "tropinv/tropical.hpp"
#include "tropinv/vcgen.hpp"

using namespace tropinv;
using nlohmann::json;
using V = ProofResult::Verdict;

namespace {

struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

SolverConfig live_config() {
  SolverConfig cfg;
  cfg.command = default_solver_command();
  return cfg;
}

TraceSet collect(const std::string& corpus_file, int runs, unsigned long long seed, long long lo,
                 long long hi) {
  Program p = parse_program(testutil::corpus(corpus_file));
  return collect_traces(p, "L", runs, seed, lo, hi);
}

std::vector<std::string> proved_texts(const VerifyOutcome& out) {
  std::vector<std::string> texts;
  for (const auto& vc : out.partition.independent) texts.push_back(vc.cand.text);
  for (const auto& vc : out.partition.redundant) texts.push_back(vc.cand.text);
  return texts;
}

const VerifiedCandidate* find_vc(const std::vector<VerifiedCandidate>& bucket,
                                 const std::string& text) {
  for (const auto& vc : bucket)
    if (vc.cand.text == text) return &vc;
  return nullptr;
}

// Conjunction of `premises` entails every formula in `goals`. Rebuilt from
// reset() per attempt, so a transport failure is retried on a fresh session.
void expect_entails(Check& c, SolverSession& s, const std::vector<std::string>& premises,
                    const std::vector<std::string>& goals, const std::string& tag) {
  for (int attempt = 0;; ++attempt) {
    try {
      s.reset();
      for (const auto& p : premises) s.assert_formula(parse_candidate(p).formula);
      for (const auto& g : goals) {
        EntailResult r = s.entail(parse_candidate(g).formula);
        c.expect(r.status == EntailStatus::Entailed, tag + ": does not entail '" + g + "'");
      }
      return;
    } catch (const SolverFailure&) {
      if (attempt >= 2) throw;
    }
  }
}

// ---- criterion 1: bent-line program, defaults, single worker ----

void criterion1(Check& c) {
  PipelineConfig cfg;
  cfg.program_text = testutil::corpus("ex1.prog");
  cfg.program_name = "ex1";
  cfg.jobs = 1;
  cfg.solver = live_config();
  cfg.inject = {"x >= -1", "x - y >= -6"};

  auto t0 = std::chrono::steady_clock::now();
  PipelineReport rep = run_pipeline(cfg);
  double secs =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
          .count() /
      1000.0;
  c.expect(!rep.outcome.solver_failed, "solver failed");
  c.expect(secs < 30.0, "single-worker runtime " + std::to_string(secs) + "s exceeds 30s");

  std::vector<std::string> proved = proved_texts(rep.outcome);
  c.expect(!proved.empty(), "no proved invariants");
  std::vector<std::string> documented = {"y <= 11", "y >= 5", "x - y <= 0",
                                         "max(0, x - 5) >= y - 5"};
  SolverSession s(live_config());
  expect_entails(c, s, proved, documented, "proved set");
  expect_entails(c, s, documented, proved, "documented set");

  bool x_le_11_redundant = find_vc(rep.outcome.partition.redundant, "x <= 11") != nullptr;
  c.expect(x_le_11_redundant, "'x <= 11' not classified redundant");

  TransitionSystem ts = extract_transition_system(parse_program(cfg.program_text), "L");
  for (const std::string& inj : {std::string("x >= -1"), std::string("x - y >= -6")}) {
    const VerifiedCandidate* vc = find_vc(rep.outcome.partition.disproved, inj);
    c.expect(vc != nullptr, "injected '" + inj + "' not disproved");
    if (!vc) continue;
    c.expect(vc->cand.provenance == "injected", "'" + inj + "' lost its provenance");
    c.expect(vc->result.cex.has_value(), "'" + inj + "' has no counterexample");
    if (vc->result.cex)
      c.expect(replay_cex(ts, *vc->result.cex, parse_candidate(inj).formula),
               "counterexample for '" + inj + "' does not replay");
  }
}

// ---- criterion 2: square root, exact verdicts ----

void criterion2(Check& c) {
  Program p = parse_program(testutil::corpus("sqrt.prog"));
  TransitionSystem ts = extract_transition_system(p, "L");
  std::vector<Candidate> cands = {
      parse_candidate("t = 2*a + 1"),       parse_candidate("4*s = t*t + 2*t + 1"),
      parse_candidate("s = (a + 1) * (a + 1)"), parse_candidate("s >= t"),
      parse_candidate("x <= 9989"),
  };
  VerifyOutcome out = verify_set(ts, cands, 5, live_config(), 2);
  c.expect(!out.solver_failed, "solver failed");

  auto get = [&](const std::string& text) -> const VerifiedCandidate* {
    for (const auto* bucket : {&out.partition.independent, &out.partition.redundant,
                               &out.partition.disproved, &out.partition.unproved})
      if (const auto* vc = find_vc(*bucket, text)) return vc;
    return nullptr;
  };
  auto expect_proved = [&](const std::string& text, int k, int round) {
    const auto* vc = get(text);
    c.expect(vc != nullptr, "'" + text + "' missing");
    if (!vc) return;
    c.expect(vc->result.verdict == V::Proved, "'" + text + "' not proved");
    c.expect(vc->result.k == k, "'" + text + "' proved at k=" + std::to_string(vc->result.k) +
                                    ", expected " + std::to_string(k));
    c.expect(vc->round == round, "'" + text + "' proved in round " + std::to_string(vc->round) +
                                     ", expected " + std::to_string(round));
  };
  expect_proved("t = 2*a + 1", 0, 1);
  expect_proved("4*s = t*t + 2*t + 1", 0, 1);
  expect_proved("s = (a + 1) * (a + 1)", 1, 1);

  // Not provable at depth 0: one step of unrolling is essential.
  Prover shallow(ts, live_config());
  c.expect(shallow.kprove(parse_candidate("s = (a + 1) * (a + 1)").formula, 0).verdict ==
               V::Unproved,
           "'s = (a + 1) * (a + 1)' unexpectedly proved at k=0");

  const auto* monotone = get("s >= t");
  c.expect(monotone != nullptr, "'s >= t' missing");
  if (monotone) {
    c.expect(monotone->result.verdict == V::Proved, "'s >= t' not proved");
    c.expect(monotone->round > 1, "'s >= t' proved without lemmas in round 1");
  }
  const auto* bound = get("x <= 9989");
  c.expect(bound && bound->result.verdict == V::Disproved, "'x <= 9989' not disproved");
}

// ---- criterion 3: boolean-flag traces, disjunctive relations ----

void criterion3(Check& c) {
  TraceSet ts = parse_traces(testutil::corpus("ex2_paper.trace"));
  c.expect(ts.rows.size() == 6, "expected the 6 documented rows");
  std::set<std::string> emitted;
  for (const auto& cand : infer_all(ts, 1, kAllForms)) emitted.insert(cand.text);
  std::vector<std::string> documented = {"b <= 1", "b >= 0", "max(0, y - 10) >= b",
                                         "b + 10 >= min(11, y)"};
  for (const auto& text : documented)
    c.expect(emitted.count(text) == 1, "missing relation '" + text + "'");

  // Their conjunction pins the flag semantics b = (y > 10).
  SolverSession s(live_config());
  expect_entails(c, s, documented,
                 {"(!(b = 0) || y <= 10) && (!(b = 1) || y > 10)", "b = 0 || b = 1"},
                 "flag relations");
}

// ---- criterion 4: weak template count law ----

void criterion4(Check& c) {
  std::vector<std::string> pool = {"a", "b", "c", "d", "e"};
  std::vector<long long> expected = {8, 32, 96, 256, 640};
  for (int k = 1; k <= 5; ++k) {
    std::vector<std::string> vars(pool.begin(), pool.begin() + k);
    for (auto kind : {TropicalKind::Max, TropicalKind::Min}) {
      long long got = static_cast<long long>(enumerate_weak_templates(vars, kind).size());
      c.expect(got == expected[k - 1],
               "k=" + std::to_string(k) + ": got " + std::to_string(got) + " templates, want " +
                   std::to_string(expected[k - 1]));
    }
  }
}

// ---- criterion 5: rotation machine, stable k ----

void criterion5(Check& c) {
  TransitionSystem rot = parse_transition_system(
      "vars: x, y, z\ninit: x@0 = 0 && y@0 = 1 && z@0 = 2\n"
      "trans: x@n = y@n-1 && y@n = z@n-1 && z@n = x@n-1\n");
  Expr goal = parse_formula_text("x != y");

  Prover shallow(rot, live_config());
  c.expect(shallow.kprove(goal, 0).verdict != V::Proved, "proved at k=0");

  std::vector<int> ks;
  for (int run = 0; run < 3; ++run) {
    Prover prover(rot, live_config());
    ProofResult r = prover.kprove(goal, 3);
    c.expect(r.verdict == V::Proved, "run " + std::to_string(run) + " did not prove x != y");
    ks.push_back(r.k);
  }
  for (int k : ks) c.expect(k >= 1 && k <= 3, "k=" + std::to_string(k) + " outside (0, 3]");
  c.expect(ks[0] == ks[1] && ks[1] == ks[2], "recorded k not stable across runs");
  c.expect(ks[0] == 2, "recorded k=" + std::to_string(ks[0]) + ", implementation pins 2");
}

// ---- criterion 6: underapproximation on random point sets ----

std::optional<BigRat> fold_weak(const WeakTemplate& t, const Valuation& v) {
  std::optional<BigRat> acc;
  auto push = [&](const BigRat& x) {
    if (!acc)
      acc = x;
    else
      acc = t.kind == TropicalKind::Max ? std::max(*acc, x) : std::min(*acc, x);
  };
  if (t.with_constant) push(BigRat(0));
  for (const auto& sv : t.side_vars) push(v.at(sv));
  return acc;
}

TraceSet random_set(std::mt19937_64& rng, int mode) {
  int nvars = 1 + static_cast<int>(rng() % 3);
  const std::vector<std::string> pool = {"p", "q", "r"};
  std::vector<std::string> vars(pool.begin(), pool.begin() + nvars);
  int npoints = 1 + static_cast<int>(rng() % 200);
  std::uniform_int_distribution<long long> wide(-50, 50), narrow(-3, 3);
  std::vector<std::vector<long long>> rows;
  for (int i = 0; i < npoints; ++i) {
    std::vector<long long> row;
    for (int j = 0; j < nvars; ++j) row.push_back(mode == 3 ? narrow(rng) : wide(rng));
    if (mode == 1 && nvars >= 2) row[1] = row[0] + 7;                       // shifted line
    if (mode == 2 && nvars >= 2) row[1] = std::max(0LL, row[0] - 5) + 5;    // bent line
    rows.push_back(row);
  }
  return testutil::make_traces(vars, rows);
}

void criterion6(Check& c) {
  std::mt19937_64 rng(2026);
  for (int set = 0; set < 100; ++set) {
    TraceSet ts = random_set(rng, set % 4);
    std::string tag = "set " + std::to_string(set);

    for (auto kind : {TropicalKind::Max, TropicalKind::Min}) {
      for (const auto& tmpl : enumerate_weak_templates(ts.variables, kind)) {
        auto fit = fit_parameter(tmpl, ts);
        if (!fit) continue;
        bool tight = false;
        for (const auto& row : ts.rows) {
          if (!check_relation(fit->relation, row)) {
            c.expect(false, tag + ": weak fit '" + fit->relation.text() + "' violated");
            return;
          }
          if (*fold_weak(tmpl, row) == row.at(tmpl.target) + fit->d) tight = true;
        }
        if (!tight) {
          c.expect(false, tag + ": weak fit '" + fit->relation.text() + "' never tight");
          return;
        }
      }
    }
    for (const auto& rel : infer_tropical_relations(ts))
      for (const auto& row : ts.rows)
        if (!check_relation(rel, row)) {
          c.expect(false, tag + ": tropical relation '" + rel.text() + "' violated");
          return;
        }
    for (const auto& bd : infer_template_bounds(ts, IneqFamily::Zone))
      for (const auto& row : ts.rows)
        if (!bd.holds_on(row)) {
          c.expect(false, tag + ": zone bound '" + bd.text() + "' violated");
          return;
        }
    for (const auto& eq : infer_equalities(ts, 2))
      for (const auto& row : ts.rows)
        if (!eq.holds_on(row)) {
          c.expect(false, tag + ": equality '" + eq.text() + "' violated");
          return;
        }
  }
}

// ---- criterion 7: min-plus / max-plus duality ----

void criterion7(Check& c) {
  std::mt19937_64 rng(31337);
  for (int set = 0; set < 50; ++set) {
    TraceSet ts = random_set(rng, set % 4);
    TropicalOptions min_only;
    min_only.weak_max = min_only.general_max = false;
    TropicalOptions max_only;
    max_only.weak_min = max_only.general_min = false;

    std::vector<std::string> direct;
    for (const auto& r : infer_tropical_relations(ts, min_only)) direct.push_back(r.text());
    std::vector<std::string> mirrored;
    for (const auto& r : infer_tropical_relations(negate_traces(ts), max_only))
      mirrored.push_back(negate_relation(r).text());
    std::sort(direct.begin(), direct.end());
    std::sort(mirrored.begin(), mirrored.end());
    if (direct != mirrored) {
      c.expect(false, "set " + std::to_string(set) + ": duality mismatch (" +
                          std::to_string(direct.size()) + " vs " +
                          std::to_string(mirrored.size()) + " relations)");
      return;
    }
  }
}

// ---- criterion 8: simulation and replay oracles over criteria 1-3 ----

void criterion8(Check& c) {
  // Re-run the bent-line pipeline (parallel this time) and the square-root
  // verification, then stress every verdict against fresh executions.
  PipelineConfig cfg;
  cfg.program_text = testutil::corpus("ex1.prog");
  cfg.program_name = "ex1";
  cfg.solver = live_config();
  cfg.inject = {"x >= -1", "x - y >= -6"};
  PipelineReport rep = run_pipeline(cfg);
  c.expect(!rep.outcome.solver_failed,
           "bent-line pipeline solver failure: " + rep.outcome.failure);

  // Each run of ex1 takes at most 17 loop steps, sqrt below stays under 50.
  Program ex1 = parse_program(cfg.program_text);
  TraceSet fresh1 = collect_traces(ex1, "L", 200, 4242, -100, 100);
  for (const auto& text : proved_texts(rep.outcome)) {
    Candidate cand = parse_candidate(text);
    for (const auto& row : fresh1.rows)
      if (!holds_on(cand, row)) {
        c.expect(false, "proved '" + text + "' fails on a fresh bent-line trace");
        return;
      }
  }
  TransitionSystem ts1 = extract_transition_system(ex1, "L");
  for (const auto& vc : rep.outcome.partition.disproved) {
    c.expect(vc.result.cex.has_value(), "disproved '" + vc.cand.text + "' lacks a cex");
    if (vc.result.cex)
      c.expect(replay_cex(ts1, *vc.result.cex, vc.cand.formula),
               "cex for '" + vc.cand.text + "' does not replay");
  }

  Program sq = parse_program(testutil::corpus("sqrt.prog"));
  TransitionSystem ts2 = extract_transition_system(sq, "L");
  std::vector<Candidate> cands = {
      parse_candidate("t = 2*a + 1"),       parse_candidate("4*s = t*t + 2*t + 1"),
      parse_candidate("s = (a + 1) * (a + 1)"), parse_candidate("s >= t"),
      parse_candidate("x <= 9989"),
  };
  VerifyOutcome out = verify_set(ts2, cands, 5, live_config(), 2);
  c.expect(!out.solver_failed, "square-root verification solver failure: " + out.failure);
  TraceSet fresh2 = collect_traces(sq, "L", 200, 999, 0, 2400);
  for (const auto& text : proved_texts(out)) {
    Candidate cand = parse_candidate(text);
    for (const auto& row : fresh2.rows)
      if (!holds_on(cand, row)) {
        c.expect(false, "proved '" + text + "' fails on a fresh square-root trace");
        return;
      }
  }
  for (const auto& vc : out.partition.disproved) {
    c.expect(vc.result.cex.has_value(), "disproved '" + vc.cand.text + "' lacks a cex");
    if (vc.result.cex)
      c.expect(replay_cex(ts2, *vc.result.cex, vc.cand.formula),
               "cex for '" + vc.cand.text + "' does not replay");
  }
}

// ---- criterion 9: nonlinear kernels, documented equalities in the basis ----

int policy_degree(const std::vector<std::string>& vars, int floor_deg) {
  // Raise the degree while the monomial count stays within the 200-term cap.
  int d = floor_deg;
  for (int t = floor_deg + 1; t <= 10; ++t) {
    try {
      gen_terms(vars, t, 200);
      d = t;
    } catch (const TraceError&) {
      break;
    }
  }
  return d;
}

void criterion9(Check& c) {
  using testutil::mono;
  using testutil::poly;
  struct Kernel {
    const char* file;
    int floor_degree;
    int runs;
    long long hi;
    std::vector<std::vector<std::pair<Term, long long>>> targets;
    std::vector<const char*> names;
  };
  std::vector<Kernel> kernels = {
      {"sqrt1.prog",
       2,
       40,
       400,
       {{{mono({{"t", 1}}), 1}, {mono({{"a", 1}}), -2}, {mono({}), -1}},
        {{mono({{"s", 1}}), 4}, {mono({{"t", 2}}), -1}, {mono({{"t", 1}}), -2}, {mono({}), -1}},
        {{mono({{"s", 1}}), 1}, {mono({{"a", 2}}), -1}, {mono({{"a", 1}}), -2}, {mono({}), -1}}},
       {"t = 2a + 1", "4s = t^2 + 2t + 1", "s = (a + 1)^2"}},
      {"ps2.prog",
       2,
       30,
       50,
       {{{mono({{"x", 1}}), 2}, {mono({{"y", 2}}), -1}, {mono({{"y", 1}}), -1}}},
       {"2x = y^2 + y"}},
      {"ps3.prog",
       3,
       30,
       50,
       {{{mono({{"x", 1}}), 6},
         {mono({{"y", 3}}), -2},
         {mono({{"y", 2}}), -3},
         {mono({{"y", 1}}), -1}}},
       {"6x = 2y^3 + 3y^2 + y"}},
      {"freire1.prog",
       2,
       40,
       400,
       {{{mono({{"x", 1}}), 2},
         {mono({{"a", 1}}), -2},
         {mono({{"r", 2}}), -1},
         {mono({{"r", 1}}), 1}}},
       {"2x = 2a + r^2 - r"}},
      {"cohencb.prog",
       3,
       30,
       40,
       {{{mono({{"x", 1}}), 1}, {mono({{"n", 3}}), -1}},
        {{mono({{"y", 1}}), 1}, {mono({{"n", 2}}), -3}, {mono({{"n", 1}}), -3}, {mono({}), -1}},
        {{mono({{"z", 1}}), 1}, {mono({{"n", 1}}), -6}, {mono({}), -6}}},
       {"x = n^3", "y = 3n^2 + 3n + 1", "z = 6n + 6"}},
  };

  for (const auto& kern : kernels) {
    TraceSet ts = collect(kern.file, kern.runs, 1, 0, kern.hi);
    int degree = policy_degree(ts.variables, kern.floor_degree);
    std::vector<PolyEquality> basis = infer_equalities(ts, degree, 200);
    c.expect(!basis.empty(), std::string(kern.file) + ": empty basis");
    for (const auto& eq : basis)
      for (const auto& row : ts.rows)
        if (!eq.holds_on(row)) {
          c.expect(false, std::string(kern.file) + ": '" + eq.text() + "' violates a trace row");
          return;
        }
    for (size_t i = 0; i < kern.targets.size(); ++i)
      c.expect(testutil::reduces_to_zero(poly(ts.variables, kern.targets[i]), basis),
               std::string(kern.file) + ": '" + kern.names[i] + "' not in the basis span");
  }
}

// ---- criterion 10: worker-count determinism of the JSON report ----

void criterion10(Check& c) {
  const std::string cli = TROPINV_CLI_PATH;
  const std::string prog = testutil::corpus_path("ex1.prog");
  auto run = [&](int jobs) {
    return testutil::run_cmd(cli + " pipeline '" + prog + "' --jobs " + std::to_string(jobs) +
                             " --json");
  };
  auto a = run(1);
  auto b = run(8);
  c.expect(a.exit_code == 0, "--jobs 1 exited " + std::to_string(a.exit_code));
  c.expect(b.exit_code == 0, "--jobs 8 exited " + std::to_string(b.exit_code));
  if (a.exit_code != 0 || b.exit_code != 0) return;
  json ja = json::parse(a.out);
  json jb = json::parse(b.out);
  ja.erase("timings");
  jb.erase("timings");
  c.expect(ja.dump(2) == jb.dump(2), "reports differ beyond timings");
}

struct Criterion {
  int id;
  const char* label;
  void (*fn)(Check&);
};

const Criterion kCriteria[] = {
    {1, "bent-line pipeline: proved set, redundancy, disproved injections", criterion1},
    {2, "square root: exact verdicts, lemma round, disproved bound", criterion2},
    {3, "boolean flag: disjunctive relations and their consequence", criterion3},
    {4, "weak template enumeration count law", criterion4},
    {5, "rotation machine: k above plain induction, stable", criterion5},
    {6, "random point sets: every relation holds, weak fits tight", criterion6},
    {7, "min-plus fitting is the mirror of max-plus fitting", criterion7},
    {8, "proved invariants survive simulation, counterexamples replay", criterion8},
    {9, "nonlinear kernels: documented equalities in the basis span", criterion9},
    {10, "pipeline JSON identical across worker counts", criterion10},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    int id = std::atoi(argv[i]);
    if (id < 1 || id > 10) {
      std::fprintf(stderr, "usage: %s [criterion-number...]\n", argv[0]);
      return 2;
    }
    selected.push_back(id);
  }
  if (selected.empty())
    for (const auto& cr : kCriteria) selected.push_back(cr.id);

  int failed = 0;
  for (int id : selected) {
    const Criterion& cr = kCriteria[id - 1];
    Check check;
    auto t0 = std::chrono::steady_clock::now();
    try {
      cr.fn(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count() /
                  1000.0;
    if (check.failures.empty()) {
      std::printf("[PASS] criterion %d: %s (%.1fs)\n", cr.id, cr.label, secs);
    } else {
      ++failed;
      std::printf("[FAIL] criterion %d: %s (%.1fs)\n", cr.id, cr.label, secs);
      for (const auto& f : check.failures) std::printf("       %s\n", f.c_str());
    }
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
