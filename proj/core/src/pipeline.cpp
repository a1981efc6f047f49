#include "tropinv/pipeline.hpp"

#include <chrono>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tropinv/infer_eq.hpp"
#include "tropinv/infer_ineq.hpp"
#include "tropinv/tropical.hpp"
#include "tropinv/vcgen.hpp"

namespace tropinv {

using ordered_json = nlohmann::ordered_json;

TraceSet collect_traces(const Program& p, const std::string& location, int runs,
                        unsigned long long seed, long long lo, long long hi) {
  auto inputs = gen_random_inputs(p, runs, seed, lo, hi);
  TraceSet merged;
  std::set<std::vector<BigRat>> seen;
  bool first = true;
  for (const auto& in : inputs) {
    TraceSet t = run_traced(p, in, location);
    if (first) {
      merged.location = t.location;
      merged.variables = t.variables;
      first = false;
    }
    for (auto& row : t.rows) {
      std::vector<BigRat> key;
      for (const auto& v : merged.variables) key.push_back(row.at(v));
      if (seen.insert(std::move(key)).second) merged.rows.push_back(std::move(row));
    }
  }
  if (first) {
    merged.location = location;
    merged.variables = p.traced_vars(location);
  }
  return merged;
}

std::vector<Candidate> infer_all(const TraceSet& traces, int degree,
                                 const std::set<std::string>& forms) {
  std::vector<Candidate> out;
  std::set<std::string> seen;
  auto add = [&](Candidate c) {
    if (seen.insert(c.text).second) out.push_back(std::move(c));
  };
  if (forms.count("eq"))
    for (const auto& eq : infer_equalities(traces, degree)) add(eq.to_candidate());
  if (forms.count("ieq"))
    for (const auto& iq : infer_template_bounds(traces, IneqFamily::Octagon)) {
      const char* shape = iq.lhs.size() == 1          ? "box"
                          : iq.lhs.back().second == -1 ? "zone"
                                                        : "octagon";
      add(iq.to_candidate(shape));
    }
  TropicalOptions topts;
  topts.weak_max = forms.count("maxplus") > 0;
  topts.weak_min = forms.count("minplus") > 0;
  topts.general_max = topts.general_min = forms.count("pairs-general") > 0;
  if (topts.weak_max || topts.weak_min || topts.general_max)
    for (const auto& rel : infer_tropical_relations(traces, topts))
      add(rel.to_candidate(rel.kind == TropicalKind::Max ? "maxplus" : "minplus"));
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

[[noreturn]] void stage_fail(const char* stage, const std::exception& e) {
  throw std::runtime_error(std::string(stage) + ": " + e.what());
}

std::string fmt_verdict(const ProofResult& r) {
  switch (r.verdict) {
    case ProofResult::Verdict::Proved:
      return "proved, k=" + std::to_string(r.k);
    case ProofResult::Verdict::Disproved:
      return "disproved, k=" + std::to_string(r.k);
    default:
      return "unproved";
  }
}

std::string fmt_cex(const Cex& cex) {
  std::ostringstream os;
  bool outer = false;
  if (!cex.ghosts.empty()) {
    for (const auto& [name, val] : cex.ghosts) {
      if (outer) os << ", ";
      os << name << "@in=" << to_string(val);
      outer = true;
    }
  }
  for (size_t i = 0; i < cex.steps.size(); ++i) {
    if (outer) os << "; ";
    os << "step " << i << ": ";
    bool inner = false;
    for (const auto& [name, val] : cex.steps[i].entries) {
      if (inner) os << ", ";
      os << name << "=" << to_string(val);
      inner = true;
    }
    outer = true;
  }
  return os.str();
}

bool is_disjunctive(const Candidate& c) {
  return c.provenance == "maxplus" || c.provenance == "minplus";
}

void list_group(std::ostream& os, const std::vector<VerifiedCandidate>& vcs) {
  bool any_conj = false, any_disj = false;
  for (const auto& vc : vcs) (is_disjunctive(vc.cand) ? any_disj : any_conj) = true;
  if (any_conj) {
    os << "  conjunctive:\n";
    for (const auto& vc : vcs)
      if (!is_disjunctive(vc.cand))
        os << "    " << vc.cand.text << "  [" << vc.cand.provenance << ", "
           << fmt_verdict(vc.result) << ", round " << vc.round << "]\n";
  }
  if (any_disj) {
    os << "  disjunctive:\n";
    for (const auto& vc : vcs)
      if (is_disjunctive(vc.cand))
        os << "    " << vc.cand.text << "  [" << vc.cand.provenance << ", "
           << fmt_verdict(vc.result) << ", round " << vc.round << "]\n";
  }
}

ordered_json vc_json(const VerifiedCandidate& vc) {
  ordered_json j;
  j["text"] = vc.cand.text;
  j["provenance"] = vc.cand.provenance;
  switch (vc.result.verdict) {
    case ProofResult::Verdict::Proved:
    case ProofResult::Verdict::Disproved:
      j["k"] = vc.result.k;
      break;
    default:
      j["reason"] = vc.result.reason;
      break;
  }
  j["round"] = vc.round;
  if (vc.result.cex) {
    ordered_json cx;
    cx["ghosts"] = ordered_json::object();
    for (const auto& [name, val] : vc.result.cex->ghosts)
      cx["ghosts"][name] = to_string(val);
    cx["steps"] = ordered_json::array();
    for (const auto& step : vc.result.cex->steps) {
      ordered_json row = ordered_json::object();
      for (const auto& [name, val] : step.entries) row[name] = to_string(val);
      cx["steps"].push_back(std::move(row));
    }
    j["cex"] = std::move(cx);
  }
  return j;
}

void verification_text_into(std::ostream& os, const VerifyOutcome& outcome) {
  os << "verification: " << outcome.rounds
     << (outcome.rounds == 1 ? " round" : " rounds") << "\n";
  if (!outcome.partition.independent.empty()) {
    os << "invariants (independent)\n";
    list_group(os, outcome.partition.independent);
  }
  if (!outcome.partition.redundant.empty()) {
    os << "invariants (redundant)\n";
    list_group(os, outcome.partition.redundant);
  }
  if (!outcome.partition.disproved.empty()) {
    os << "disproved\n";
    for (const auto& vc : outcome.partition.disproved) {
      os << "  " << vc.cand.text << "  [" << vc.cand.provenance << ", "
         << fmt_verdict(vc.result) << "]\n";
      if (vc.result.cex) os << "    cex: " << fmt_cex(*vc.result.cex) << "\n";
    }
  }
  if (!outcome.partition.unproved.empty()) {
    os << "unproved\n";
    for (const auto& vc : outcome.partition.unproved)
      os << "  " << vc.cand.text << "  [" << vc.cand.provenance << ", round " << vc.round
         << "]: " << vc.result.reason << "\n";
  }
  if (outcome.solver_failed) os << "solver failure: " << outcome.failure << "\n";
}

ordered_json verification_json(const VerifyOutcome& outcome) {
  ordered_json ver;
  ver["rounds"] = outcome.rounds;
  ver["solver_failed"] = outcome.solver_failed;
  if (outcome.solver_failed) ver["failure"] = outcome.failure;
  for (auto [key, bucket] : {std::pair{"independent", &outcome.partition.independent},
                             {"redundant", &outcome.partition.redundant},
                             {"disproved", &outcome.partition.disproved},
                             {"unproved", &outcome.partition.unproved}}) {
    ordered_json arr = ordered_json::array();
    for (const auto& vc : *bucket) arr.push_back(vc_json(vc));
    ver[key] = std::move(arr);
  }
  return ver;
}

}  // namespace

std::string PipelineReport::to_text() const {
  std::ostringstream os;
  os << "program " << config.program_name << ", location " << config.location << "\n";
  os << "traces: " << trace_rows << " rows over ";
  for (size_t i = 0; i < variables.size(); ++i) os << (i ? ", " : "") << variables[i];
  os << "\n";
  os << "candidates: " << inferred << " inferred, " << filtered << " after filtering, "
     << candidates.size() - filtered << " injected\n";
  os << "transition system\n  init:  " << init_text << "\n  trans: " << trans_text << "\n";
  verification_text_into(os, outcome);
  return os.str();
}

std::string PipelineReport::to_json_text() const {
  ordered_json j;
  j["schema"] = 1;
  ordered_json& cfg = j["config"];
  cfg["program"] = config.program_name;
  cfg["location"] = config.location;
  cfg["runs"] = config.runs;
  cfg["filter_runs"] = config.filter_runs;
  cfg["range"] = {config.lo, config.hi};
  cfg["seed"] = config.seed;
  cfg["degree"] = config.degree;
  cfg["maxk"] = config.maxk;
  cfg["forms"] = config.forms;
  cfg["solver_command"] =
      config.solver.command.empty() ? default_solver_command() : config.solver.command;
  cfg["timeout_ms"] = config.solver.timeout_ms;
  cfg["inject"] = config.inject;
  j["trace"] = {{"variables", variables}, {"rows", trace_rows}};
  j["inference"] = {{"inferred", inferred},
                    {"filtered", filtered},
                    {"injected", candidates.size() - filtered}};
  j["transition_system"] = {{"init", init_text}, {"trans", trans_text}};
  ordered_json cands = ordered_json::array();
  for (const auto& c : candidates)
    cands.push_back(ordered_json{{"text", c.text}, {"provenance", c.provenance}});
  j["candidates"] = std::move(cands);
  j["verification"] = verification_json(outcome);
  ordered_json t = ordered_json::object();
  for (const auto& st : timings) t[st.stage] = st.ms;
  j["timings"] = std::move(t);
  return j.dump(2) + "\n";
}

std::string verification_text(const VerifyOutcome& outcome) {
  std::ostringstream os;
  verification_text_into(os, outcome);
  return os.str();
}

std::string verification_json_text(const VerifyOutcome& outcome) {
  ordered_json j;
  j["schema"] = 1;
  j["verification"] = verification_json(outcome);
  return j.dump(2) + "\n";
}

PipelineReport run_pipeline(const PipelineConfig& cfg) {
  PipelineReport rep;
  rep.config = cfg;
  auto total0 = Clock::now();

  Program prog;
  try {
    prog = parse_program(cfg.program_text);
    if (!prog.locations.count(cfg.location))
      throw MinilangError("location '" + cfg.location + "' not found in program '" +
                          prog.name + "'");
  } catch (const std::exception& e) {
    stage_fail("parse", e);
  }

  TraceSet traces;
  auto t0 = Clock::now();
  try {
    traces = collect_traces(prog, cfg.location, cfg.runs, cfg.seed, cfg.lo, cfg.hi);
  } catch (const std::exception& e) {
    stage_fail("trace", e);
  }
  rep.timings.push_back({"trace", ms_since(t0)});
  rep.variables = traces.variables;
  rep.trace_rows = traces.rows.size();

  std::vector<Candidate> cands;
  t0 = Clock::now();
  try {
    cands = infer_all(traces, cfg.degree, cfg.forms);
  } catch (const std::exception& e) {
    stage_fail("infer", e);
  }
  rep.timings.push_back({"infer", ms_since(t0)});
  rep.inferred = cands.size();

  t0 = Clock::now();
  try {
    TraceSet fresh =
        collect_traces(prog, cfg.location, cfg.filter_runs, cfg.seed + 1, cfg.lo, cfg.hi);
    cands = filter_candidates(cands, fresh);
    std::set<std::string> have;
    for (const auto& c : cands) have.insert(c.text);
    rep.filtered = cands.size();
    for (const auto& text : cfg.inject) {
      Candidate c = parse_candidate(text, "injected");
      if (have.insert(c.text).second) cands.push_back(std::move(c));
    }
  } catch (const std::exception& e) {
    stage_fail("filter", e);
  }
  rep.timings.push_back({"filter", ms_since(t0)});
  rep.candidates = cands;

  TransitionSystem ts;
  t0 = Clock::now();
  try {
    ts = extract_transition_system(prog, cfg.location);
  } catch (const std::exception& e) {
    stage_fail("vcgen", e);
  }
  rep.timings.push_back({"vcgen", ms_since(t0)});
  rep.init_text = to_text(ts.init);
  rep.trans_text = to_text(ts.trans, [](const VarRef& v) -> std::string {
    if (v.ghost()) return v.name + "@in";
    if (v.index == 0) return v.name + "@n-1";
    if (v.index == 1) return v.name + "@n";
    return v.name + "@" + std::to_string(v.index);
  });

  t0 = Clock::now();
  try {
    rep.outcome = verify_set(ts, cands, cfg.maxk, cfg.solver, cfg.jobs);
  } catch (const std::exception& e) {
    stage_fail("verify", e);
  }
  rep.timings.push_back({"verify", ms_since(t0)});
  rep.timings.push_back({"total", ms_since(total0)});
  return rep;
}

}  // namespace tropinv
