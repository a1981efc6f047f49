#include "tropinv/kip.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

namespace tropinv {

namespace {

Env cex_env(const TransitionSystem& ts, const Cex& cex) {
  (void)ts;
  return [&cex](const VarRef& r) -> std::optional<BigRat> {
    if (r.ghost()) {
      auto it = cex.ghosts.find(r.name);
      return it != cex.ghosts.end() ? it->second : BigRat(0);
    }
    int i = r.plain() ? 0 : r.index;
    if (i < 0 || i >= static_cast<int>(cex.steps.size())) return BigRat(0);
    const auto& entries = cex.steps[static_cast<size_t>(i)].entries;
    auto it = entries.find(r.name);
    return it != entries.end() ? it->second : BigRat(0);
  };
}

// Reads the state vector at steps 0..k and the init ghosts out of a model.
Cex model_to_cex(const TransitionSystem& ts, const Model& m, int k) {
  Cex cex;
  for (int i = 0; i <= k; ++i) {
    Valuation v;
    for (const auto& name : ts.vars) {
      auto it = m.find(VarRef{name, i});
      v.entries[name] = it != m.end() ? it->second : BigRat(0);
    }
    cex.steps.push_back(std::move(v));
  }
  for (const auto& r : collect_vars(ts.init))
    if (r.ghost()) {
      auto it = m.find(r);
      cex.ghosts[r.name] = it != m.end() ? it->second : BigRat(0);
    }
  return cex;
}

}  // namespace

bool replay_cex(const TransitionSystem& ts, const Cex& cex, const Expr& p) {
  if (cex.steps.empty()) return false;
  Env env = cex_env(ts, cex);
  if (!eval_bool(ts.init, env)) return false;
  int k = static_cast<int>(cex.steps.size()) - 1;
  for (int i = 0; i < k; ++i)
    if (!eval_bool(shift_index(ts.trans, i), env)) return false;
  return !eval_bool(at_index(p, k), env);
}

Prover::Prover(TransitionSystem ts, SolverConfig cfg)
    : ts_(std::move(ts)), cfg_(std::move(cfg)), base_(cfg_), step_(cfg_) {}

ProofResult Prover::kprove(const Expr& p, int maxk, const std::vector<Expr>& lemmas) {
  // A transport hiccup kills the session and surfaces as SolverFailure; both
  // sessions rebuild from scratch per attempt, so rerunning the whole query
  // on a fresh solver process is safe. Persistent failures still propagate.
  for (int attempt = 0;; ++attempt) {
    try {
      return kprove_attempt(p, maxk, lemmas);
    } catch (const SolverFailure&) {
      if (attempt >= 2) throw;
    }
  }
}

ProofResult Prover::kprove_attempt(const Expr& p, int maxk, const std::vector<Expr>& lemmas) {
  base_.reset();
  step_.reset();
  ProofResult res;
  for (int k = 0; k <= maxk; ++k) {
    // Base: unroll one more step, then require p at the new frontier.
    if (k == 0)
      base_.assert_formula(ts_.init);
    else
      base_.assert_formula(shift_index(ts_.trans, k - 1));
    EntailResult b = base_.entail(at_index(p, k));
    if (b.status == EntailStatus::Counterexample) {
      Cex cex = model_to_cex(ts_, b.model, k);
      if (!replay_cex(ts_, cex, p))
        throw SolverFailure("counterexample failed concrete replay");
      res.verdict = ProofResult::Verdict::Disproved;
      res.k = k;
      res.cex = std::move(cex);
      return res;
    }
    if (b.status == EntailStatus::Unknown) {
      res.verdict = ProofResult::Verdict::Unproved;
      res.reason = "base case at depth " + std::to_string(k) + ": " + b.reason;
      return res;
    }
    // Step: p at states k..0 of a candidate stretch plus one transition must
    // force p at the next state; lemmas hold at every index in the stretch.
    if (k == 0)
      for (const auto& l : lemmas) step_.assert_formula(at_index(l, 0));
    step_.assert_formula(at_index(p, k));
    step_.assert_formula(shift_index(ts_.trans, k));
    for (const auto& l : lemmas) step_.assert_formula(at_index(l, k + 1));
    EntailResult s = step_.entail(at_index(p, k + 1));
    if (s.status == EntailStatus::Entailed) {
      res.verdict = ProofResult::Verdict::Proved;
      res.k = k;
      return res;
    }
    // Counterexample-to-induction or unknown: deepen.
  }
  res.verdict = ProofResult::Verdict::Unproved;
  res.reason = "no proof within depth " + std::to_string(maxk);
  return res;
}

ProofResult kprove(const TransitionSystem& ts, const Expr& p, int maxk,
                   const std::vector<Expr>& lemmas, const SolverConfig& cfg) {
  Prover prover(ts, cfg);
  return prover.kprove(p, maxk, lemmas);
}

namespace {

std::pair<std::vector<size_t>, std::vector<size_t>> check_redundancy_attempt(
    const std::vector<Candidate>& proved, SolverSession& session) {
  session.reset();
  std::vector<size_t> order(proved.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const std::string& ta = proved[a].text;
    const std::string& tb = proved[b].text;
    return ta.size() != tb.size() ? ta.size() < tb.size() : ta < tb;
  });
  std::vector<bool> redundant(proved.size(), false);
  for (size_t oi : order) {
    session.push();
    for (size_t j = 0; j < proved.size(); ++j)
      if (j != oi && !redundant[j]) session.assert_formula(at_index(proved[j].formula, 0));
    EntailResult r = session.entail(at_index(proved[oi].formula, 0));
    session.pop();
    if (r.status == EntailStatus::Entailed) redundant[oi] = true;
  }
  std::pair<std::vector<size_t>, std::vector<size_t>> out;
  for (size_t i = 0; i < proved.size(); ++i)
    (redundant[i] ? out.second : out.first).push_back(i);
  return out;
}

}  // namespace

std::pair<std::vector<size_t>, std::vector<size_t>> check_redundancy(
    const std::vector<Candidate>& proved, SolverSession& session) {
  // Deterministic and rebuilt from reset() each time, so a killed session is
  // recoverable by rerunning the whole pass.
  for (int attempt = 0;; ++attempt) {
    try {
      return check_redundancy_attempt(proved, session);
    } catch (const SolverFailure&) {
      if (attempt >= 2) throw;
    }
  }
}

VerifyOutcome verify_set(const TransitionSystem& ts, const std::vector<Candidate>& cands,
                         int maxk, const SolverConfig& cfg, int jobs) {
  std::set<std::string> known(ts.vars.begin(), ts.vars.end());
  for (const auto& c : cands)
    for (const auto& v : collect_vars(c.formula)) {
      if (!v.plain())
        throw std::invalid_argument("candidate '" + c.text + "' uses an indexed variable");
      if (!known.count(v.name))
        throw std::invalid_argument("candidate '" + c.text +
                                    "' mentions a variable the transition system lacks: " +
                                    v.name);
    }

  size_t n = cands.size();
  std::vector<std::optional<ProofResult>> results(n);
  std::vector<int> round_of(n, 0);
  std::vector<size_t> pending(n);
  std::iota(pending.begin(), pending.end(), size_t{0});
  std::vector<Expr> lemmas;
  VerifyOutcome out;

  int jobs_eff = std::max(1, jobs);
  std::vector<std::unique_ptr<Prover>> provers;
  for (int w = 0; w < jobs_eff; ++w) provers.push_back(std::make_unique<Prover>(ts, cfg));

  int round = 0;
  while (!pending.empty()) {
    ++round;
    std::vector<std::optional<ProofResult>> attempt(pending.size());
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mu;
    std::string failmsg;
    auto work = [&](int w) {
      while (!failed.load()) {
        size_t i = next.fetch_add(1);
        if (i >= pending.size()) break;
        try {
          attempt[i] = provers[w]->kprove(cands[pending[i]].formula, maxk, lemmas);
        } catch (const SolverFailure& e) {
          std::lock_guard<std::mutex> lk(mu);
          if (!failed.exchange(true)) failmsg = e.what();
        }
      }
    };
    int nw = static_cast<int>(std::min<size_t>(jobs_eff, pending.size()));
    if (nw <= 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < nw; ++w) pool.emplace_back(work, w);
      for (auto& t : pool) t.join();
    }
    out.rounds = round;
    if (failed.load()) {
      out.solver_failed = true;
      out.failure = failmsg;
    }

    std::vector<size_t> still;
    std::vector<size_t> newly_proved;
    for (size_t i = 0; i < pending.size(); ++i) {
      size_t ci = pending[i];
      if (!attempt[i]) {  // not attempted before the abort
        still.push_back(ci);
        continue;
      }
      results[ci] = std::move(attempt[i]);
      round_of[ci] = round;
      switch (results[ci]->verdict) {
        case ProofResult::Verdict::Proved:
          newly_proved.push_back(ci);
          break;
        case ProofResult::Verdict::Disproved:
          break;
        case ProofResult::Verdict::Unproved:
          still.push_back(ci);
          break;
      }
    }
    pending = std::move(still);
    if (out.solver_failed) break;
    for (size_t ci : newly_proved) lemmas.push_back(cands[ci].formula);
    if (newly_proved.empty()) break;
  }

  if (out.solver_failed)
    for (size_t ci : pending) {
      ProofResult aborted;
      aborted.verdict = ProofResult::Verdict::Unproved;
      aborted.reason = "aborted: solver failure";
      results[ci] = std::move(aborted);
      round_of[ci] = round;
    }

  std::vector<size_t> proved_idx;
  for (size_t ci = 0; ci < n; ++ci)
    if (results[ci] && results[ci]->verdict == ProofResult::Verdict::Proved)
      proved_idx.push_back(ci);

  std::vector<bool> redundant(n, false);
  if (!out.solver_failed && !proved_idx.empty()) {
    std::vector<Candidate> proved_c;
    for (size_t ci : proved_idx) proved_c.push_back(cands[ci]);
    try {
      SolverSession sess(cfg);
      auto [ind, red] = check_redundancy(proved_c, sess);
      for (size_t pi : red) redundant[proved_idx[pi]] = true;
    } catch (const SolverFailure& e) {
      // Proved verdicts stand; only the independent/redundant split is lost.
      out.solver_failed = true;
      out.failure = e.what();
    }
  }

  for (size_t ci = 0; ci < n; ++ci) {
    if (!results[ci]) continue;
    VerifiedCandidate vc{cands[ci], *results[ci], round_of[ci]};
    switch (results[ci]->verdict) {
      case ProofResult::Verdict::Proved:
        (redundant[ci] ? out.partition.redundant : out.partition.independent)
            .push_back(std::move(vc));
        break;
      case ProofResult::Verdict::Disproved:
        out.partition.disproved.push_back(std::move(vc));
        break;
      case ProofResult::Verdict::Unproved:
        out.partition.unproved.push_back(std::move(vc));
        break;
    }
  }
  return out;
}

}  // namespace tropinv
