// Command-line surface: trace collection, candidate inference, k-induction
// verification, and the end-to-end pipeline.
//
// Exit codes: 0 success, 2 usage, 3 program/stage error, 4 solver failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tropinv/pipeline.hpp"
#include "tropinv/vcgen.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Opts {
  std::string program_path;
  std::string traces_path;  // infer: inference input instead of a program
  std::string location = "L";
  int runs = 300;
  int filter_runs = 100;
  std::string range = "-100:100";
  unsigned long long seed = 1;
  int degree = 1;
  int maxk = 5;
  std::vector<std::string> forms;
  int jobs = 4;
  std::string solver_cmd;
  int timeout_ms = 10000;
  bool json = false;
  std::vector<std::string> inject;  // pipeline: extra candidates; verify: the candidates
  std::string cand_file;
};

std::pair<long long, long long> parse_range(const std::string& s) {
  auto pos = s.find(':', s.empty() || s[0] != '-' ? 0 : 1);
  if (pos == std::string::npos || pos + 1 >= s.size())
    throw UsageError("--range expects lo:hi, got '" + s + "'");
  try {
    long long lo = std::stoll(s.substr(0, pos));
    long long hi = std::stoll(s.substr(pos + 1));
    if (lo > hi) throw UsageError("--range lower bound exceeds upper bound");
    return {lo, hi};
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("--range expects lo:hi, got '" + s + "'");
  }
}

std::set<std::string> parse_forms(const std::vector<std::string>& forms) {
  if (forms.empty()) return tropinv::kAllForms;
  std::set<std::string> out;
  for (const auto& f : forms) {
    if (!tropinv::kAllForms.count(f)) {
      std::string known;
      for (const auto& k : tropinv::kAllForms) known += (known.empty() ? "" : ", ") + k;
      throw UsageError("unknown form '" + f + "' (known: " + known + ")");
    }
    out.insert(f);
  }
  return out;
}

tropinv::PipelineConfig to_config(const Opts& o) {
  tropinv::PipelineConfig cfg;
  cfg.program_text = read_file(o.program_path);
  cfg.program_name = o.program_path;
  cfg.location = o.location;
  cfg.runs = o.runs;
  cfg.filter_runs = o.filter_runs;
  std::tie(cfg.lo, cfg.hi) = parse_range(o.range);
  cfg.seed = o.seed;
  cfg.degree = o.degree;
  cfg.maxk = o.maxk;
  cfg.forms = parse_forms(o.forms);
  cfg.jobs = o.jobs;
  if (!o.solver_cmd.empty()) cfg.solver.command = o.solver_cmd;
  cfg.solver.timeout_ms = o.timeout_ms;
  cfg.inject = o.inject;
  return cfg;
}

std::vector<tropinv::Candidate> gather_candidates(const Opts& o) {
  std::vector<tropinv::Candidate> cands;
  for (const auto& text : o.inject) cands.push_back(tropinv::parse_candidate(text));
  if (!o.cand_file.empty()) {
    std::istringstream in(read_file(o.cand_file));
    std::string line;
    while (std::getline(in, line)) {
      auto start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos || line[start] == '#') continue;
      auto end = line.find_last_not_of(" \t\r");
      cands.push_back(tropinv::parse_candidate(line.substr(start, end - start + 1)));
    }
  }
  return cands;
}

int cmd_trace(const Opts& o) {
  auto [lo, hi] = parse_range(o.range);
  tropinv::Program prog = tropinv::parse_program(read_file(o.program_path));
  if (!prog.locations.count(o.location))
    throw std::runtime_error("location '" + o.location + "' not found in program '" +
                             prog.name + "'");
  tropinv::TraceSet traces =
      tropinv::collect_traces(prog, o.location, o.runs, o.seed, lo, hi);
  std::cout << tropinv::serialize_traces(traces);
  return 0;
}

int cmd_infer(const Opts& o) {
  std::vector<tropinv::Candidate> cands;
  if (!o.traces_path.empty()) {
    // Inference straight over a trace file: no program, no filter pass.
    tropinv::TraceSet traces = tropinv::parse_traces(read_file(o.traces_path));
    cands = tropinv::infer_all(traces, o.degree, parse_forms(o.forms));
  } else {
    if (o.program_path.empty())
      throw UsageError("infer needs a program file or --traces");
    auto [lo, hi] = parse_range(o.range);
    tropinv::Program prog = tropinv::parse_program(read_file(o.program_path));
    if (!prog.locations.count(o.location))
      throw std::runtime_error("location '" + o.location + "' not found in program '" +
                               prog.name + "'");
    tropinv::TraceSet traces =
        tropinv::collect_traces(prog, o.location, o.runs, o.seed, lo, hi);
    cands = tropinv::infer_all(traces, o.degree, parse_forms(o.forms));
    tropinv::TraceSet fresh =
        tropinv::collect_traces(prog, o.location, o.filter_runs, o.seed + 1, lo, hi);
    cands = tropinv::filter_candidates(cands, fresh);
  }
  if (o.json) {
    std::string out = "[";
    for (size_t i = 0; i < cands.size(); ++i) {
      out += (i ? ",\n " : "\n ");
      std::string esc;
      for (char c : cands[i].text) {
        if (c == '"' || c == '\\') esc += '\\';
        esc += c;
      }
      out += "{\"text\": \"" + esc + "\", \"provenance\": \"" + cands[i].provenance + "\"}";
    }
    out += "\n]\n";
    std::cout << out;
  } else {
    for (const auto& c : cands) std::cout << c.text << "  [" << c.provenance << "]\n";
  }
  return 0;
}

int cmd_verify(const Opts& o) {
  tropinv::Program prog = tropinv::parse_program(read_file(o.program_path));
  tropinv::TransitionSystem ts = tropinv::extract_transition_system(prog, o.location);
  std::vector<tropinv::Candidate> cands = gather_candidates(o);
  if (cands.empty()) throw UsageError("verify needs --cand or --cand-file");
  tropinv::SolverConfig scfg;
  if (!o.solver_cmd.empty()) scfg.command = o.solver_cmd;
  scfg.timeout_ms = o.timeout_ms;
  tropinv::VerifyOutcome outcome = tropinv::verify_set(ts, cands, o.maxk, scfg, o.jobs);
  std::cout << (o.json ? tropinv::verification_json_text(outcome)
                       : tropinv::verification_text(outcome));
  return outcome.solver_failed ? 4 : 0;
}

int cmd_pipeline(const Opts& o) {
  tropinv::PipelineReport report = tropinv::run_pipeline(to_config(o));
  std::cout << (o.json ? report.to_json_text() : report.to_text());
  return report.outcome.solver_failed ? 4 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trace-driven invariant inference with k-induction verification"};
  app.require_subcommand(1);
  Opts o;

  auto add_common = [&](CLI::App* sub, bool needs_prog) {
    if (needs_prog)
      sub->add_option("program", o.program_path, "program source file")->required();
    sub->add_option("--loc", o.location, "sampling location label (default L)");
  };
  auto add_gen = [&](CLI::App* sub) {
    sub->add_option("--runs", o.runs, "random inputs for trace generation (default 300)");
    sub->add_option("--range", o.range, "input range lo:hi (default -100:100)");
    sub->add_option("--seed", o.seed, "random seed (default 1)");
  };
  auto add_infer = [&](CLI::App* sub) {
    sub->add_option("--filter-runs", o.filter_runs,
                    "fresh inputs for the filter pass (default 100)");
    sub->add_option("--degree", o.degree, "max term degree for equalities (default 1)");
    sub->add_option("--forms", o.forms,
                    "candidate forms: eq, ieq, maxplus, minplus, pairs-general "
                    "(default all)")
        ->delimiter(',');
  };
  auto add_verify = [&](CLI::App* sub) {
    sub->add_option("--maxk", o.maxk, "max induction depth (default 5)");
    sub->add_option("--jobs", o.jobs, "parallel solver workers (default 4)");
    sub->add_option("--solver-cmd", o.solver_cmd, "SMT solver command (SMT-LIB2 on stdio)");
    sub->add_option("--timeout", o.timeout_ms,
                    "per-query solver timeout in milliseconds (default 10000)");
  };

  CLI::App* trace = app.add_subcommand("trace", "run a program on random inputs and dump traces");
  add_common(trace, true);
  add_gen(trace);

  CLI::App* infer = app.add_subcommand("infer", "infer candidate relations from traces");
  add_common(infer, false);
  infer->add_option("program", o.program_path, "program source file");
  infer->add_option("--traces", o.traces_path, "trace file to use instead of a program");
  add_gen(infer);
  add_infer(infer);
  infer->add_flag("--json", o.json, "JSON output");

  CLI::App* verify = app.add_subcommand("verify", "verify given candidates by k-induction");
  add_common(verify, true);
  verify->add_option("--cand", o.inject, "candidate relation text (repeatable)")
      ->type_size(1);
  verify->add_option("--cand-file", o.cand_file, "file with one candidate per line");
  add_verify(verify);
  verify->add_flag("--json", o.json, "JSON output");

  CLI::App* pipeline =
      app.add_subcommand("pipeline", "trace, infer, filter, and verify end to end");
  add_common(pipeline, true);
  add_gen(pipeline);
  add_infer(pipeline);
  add_verify(pipeline);
  pipeline->add_option("--inject", o.inject,
                       "extra candidate text verified without filtering (repeatable)")
      ->type_size(1);
  pipeline->add_flag("--json", o.json, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }

  try {
    if (trace->parsed()) return cmd_trace(o);
    if (infer->parsed()) return cmd_infer(o);
    if (verify->parsed()) return cmd_verify(o);
    return cmd_pipeline(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const tropinv::SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
