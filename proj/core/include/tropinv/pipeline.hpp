#pragma once
// End-to-end driver: trace a labeled loop on random inputs, infer candidate
// relations, filter them on fresh traces, extract the transition system, and
// verify the survivors by iterative k-induction.

#include <set>
#include <string>
#include <vector>

#include "tropinv/candidate.hpp"
#include "tropinv/kip.hpp"
#include "tropinv/minilang.hpp"
#include "tropinv/smt.hpp"
#include "tropinv/trace.hpp"

namespace tropinv {

inline const std::set<std::string> kAllForms = {"eq", "ieq", "maxplus", "minplus",
                                                "pairs-general"};

struct PipelineConfig {
  std::string program_text;
  std::string program_name = "<inline>";  // echoed in reports
  std::string location = "L";
  int runs = 300;         // inputs for candidate generation
  int filter_runs = 100;  // fresh inputs for the filter pass
  long long lo = -100;
  long long hi = 100;
  unsigned long long seed = 1;
  int degree = 1;
  int maxk = 5;
  std::set<std::string> forms = kAllForms;
  int jobs = 4;
  SolverConfig solver;
  std::vector<std::string> inject;  // extra candidate texts, verified unfiltered
};

// Union of the traces of `runs` random inputs, rows deduplicated first-seen.
TraceSet collect_traces(const Program& p, const std::string& location, int runs,
                        unsigned long long seed, long long lo, long long hi);

// Every enabled inference pass over one trace set, deduplicated by text.
// Provenance: "eq", "box"/"zone"/"octagon" by template shape, and
// "maxplus"/"minplus" by tropical kind.
std::vector<Candidate> infer_all(const TraceSet& traces, int degree,
                                 const std::set<std::string>& forms);

struct StageTiming {
  std::string stage;
  double ms = 0;
};

struct PipelineReport {
  PipelineConfig config;
  std::vector<std::string> variables;
  size_t trace_rows = 0;
  size_t inferred = 0;                // candidates out of inference
  size_t filtered = 0;                // survivors of the filter pass
  std::vector<Candidate> candidates;  // filtered + injected, as verified
  std::string init_text;
  std::string trans_text;
  VerifyOutcome outcome;
  std::vector<StageTiming> timings;

  // Paper-style listing, proved relations grouped conjunctive/disjunctive.
  std::string to_text() const;
  // Versioned schema, stable field order, exact values as strings. Identical
  // configs give byte-identical output apart from the "timings" object.
  std::string to_json_text() const;
};

// Runs all stages; failures carry a "stage: " prefix in the exception text.
PipelineReport run_pipeline(const PipelineConfig& cfg);

// Stand-alone renderings of a verification outcome (the `verify` subcommand
// reports these without the surrounding pipeline context).
std::string verification_text(const VerifyOutcome& outcome);
std::string verification_json_text(const VerifyOutcome& outcome);

}  // namespace tropinv
