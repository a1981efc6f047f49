#include "tropinv/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <sstream>

#ifndef TROPINV_DEFAULT_SOLVER_CMD
#define TROPINV_DEFAULT_SOLVER_CMD "z3 -in"
#endif

namespace tropinv {

std::string default_solver_command() {
  if (const char* env = std::getenv("TROPINV_SOLVER_CMD"); env && *env) return env;
  return TROPINV_DEFAULT_SOLVER_CMD;
}

std::string smt_name(const VarRef& v) {
  if (v.ghost()) return v.name + "__in";
  if (v.plain()) return v.name;
  return v.name + "__" + std::to_string(v.index);
}

VarRef parse_smt_name(const std::string& name) {
  auto pos = name.rfind("__");
  if (pos == std::string::npos || pos == 0) return VarRef{name, VarRef::kPlain};
  std::string suffix = name.substr(pos + 2);
  if (suffix == "in") return VarRef{name.substr(0, pos), VarRef::kGhost};
  if (!suffix.empty() && std::all_of(suffix.begin(), suffix.end(), [](unsigned char c) {
        return std::isdigit(c);
      }))
    return VarRef{name.substr(0, pos), std::stoi(suffix)};
  return VarRef{name, VarRef::kPlain};
}

namespace {

std::string int_text(const BigInt& n) {
  return n < 0 ? "(- " + BigInt(-n).str() + ")" : n.str();
}

// An integer-valued s-expression `text` denoting text/den, den > 0.
struct Scaled {
  std::string text;
  BigInt den;
};

std::string scale(const Scaled& s, const BigInt& factor) {
  if (factor == 1) return s.text;
  return "(* " + int_text(factor) + " " + s.text + ")";
}

std::string enc_bool(const Expr& e);

Scaled enc_arith(const Expr& e) {
  switch (e.op()) {
    case Op::Const: {
      const BigRat& v = e.value();
      return {int_text(numer(v)), denom(v)};
    }
    case Op::BoolConst:
      return {e.bval() ? "1" : "0", 1};
    case Op::Var:
      return {smt_name(e.varref()), 1};
    case Op::Add:
    case Op::Sub: {
      Scaled a = enc_arith(e.kids()[0]), b = enc_arith(e.kids()[1]);
      BigInt l = lcm(a.den, b.den);
      const char* op = e.op() == Op::Add ? "+" : "-";
      return {"(" + std::string(op) + " " + scale(a, l / a.den) + " " + scale(b, l / b.den) +
                  ")",
              l};
    }
    case Op::Neg: {
      Scaled a = enc_arith(e.kids()[0]);
      return {"(- " + a.text + ")", a.den};
    }
    case Op::Mul: {
      Scaled a = enc_arith(e.kids()[0]), b = enc_arith(e.kids()[1]);
      return {"(* " + a.text + " " + b.text + ")", a.den * b.den};
    }
    case Op::Max:
    case Op::Min: {
      BigInt l = 1;
      std::vector<Scaled> kids;
      for (const auto& k : e.kids()) {
        kids.push_back(enc_arith(k));
        l = lcm(l, kids.back().den);
      }
      std::string acc = scale(kids[0], l / kids[0].den);
      const char* cmp = e.op() == Op::Max ? ">" : "<";
      for (size_t i = 1; i < kids.size(); ++i) {
        std::string k = scale(kids[i], l / kids[i].den);
        acc = "(ite (" + std::string(cmp) + " " + acc + " " + k + ") " + acc + " " + k + ")";
      }
      return {acc, l};
    }
    default:
      // A comparison or connective used as a 0/1 value.
      return {"(ite " + enc_bool(e) + " 1 0)", 1};
  }
}

std::string enc_bool(const Expr& e) {
  switch (e.op()) {
    case Op::BoolConst:
      return e.bval() ? "true" : "false";
    case Op::Cmp: {
      Scaled a = enc_arith(e.kids()[0]), b = enc_arith(e.kids()[1]);
      BigInt l = lcm(a.den, b.den);
      std::string sa = scale(a, l / a.den), sb = scale(b, l / b.den);
      switch (e.cmpop()) {
        case CmpOp::Lt: return "(< " + sa + " " + sb + ")";
        case CmpOp::Le: return "(<= " + sa + " " + sb + ")";
        case CmpOp::Gt: return "(> " + sa + " " + sb + ")";
        case CmpOp::Ge: return "(>= " + sa + " " + sb + ")";
        case CmpOp::Eq: return "(= " + sa + " " + sb + ")";
        case CmpOp::Ne: return "(not (= " + sa + " " + sb + "))";
      }
      throw SolverFailure("bad comparison operator");
    }
    case Op::And:
      return "(and " + enc_bool(e.kids()[0]) + " " + enc_bool(e.kids()[1]) + ")";
    case Op::Or:
      return "(or " + enc_bool(e.kids()[0]) + " " + enc_bool(e.kids()[1]) + ")";
    case Op::Not:
      return "(not " + enc_bool(e.kids()[0]) + ")";
    default: {
      // Arithmetic truthiness: nonzero is true.
      Scaled a = enc_arith(e);
      return "(not (= " + a.text + " 0))";
    }
  }
}

}  // namespace

std::string encode(const Expr& formula) { return enc_bool(formula); }

std::string encode_at(const Expr& formula, int i) { return encode(at_index(formula, i)); }

Env model_env(const Model& m) {
  return [m](const VarRef& r) -> std::optional<BigRat> {
    auto it = m.find(r);
    if (it != m.end()) return it->second;
    return BigRat(0);
  };
}

// ---------------------------------------------------------------------------
// Session / process plumbing
// ---------------------------------------------------------------------------

struct SolverSession::Impl {
  SolverConfig cfg;
  pid_t pid = -1;
  int in_fd = -1;
  int out_fd = -1;
  std::string rbuf;
  long sync_id = 0;
  // Declarations and assertions are scoped like the solver's own stack.
  std::vector<std::set<std::string>> declared{{}};
  std::vector<std::vector<Expr>> asserted{{}};

  ~Impl() { shutdown(); }

  void shutdown() {
    if (pid > 0) {
      if (in_fd >= 0) {
        std::string bye = "(exit)\n";
        (void)!write(in_fd, bye.data(), bye.size());
      }
      if (in_fd >= 0) close(in_fd);
      if (out_fd >= 0) close(out_fd);
      in_fd = out_fd = -1;
      int st = 0;
      for (int i = 0; i < 50 && waitpid(pid, &st, WNOHANG) == 0; ++i) usleep(10000);
      if (waitpid(pid, &st, WNOHANG) == 0) {
        kill(pid, SIGKILL);
        waitpid(pid, &st, 0);
      }
      pid = -1;
    } else {
      if (in_fd >= 0) close(in_fd);
      if (out_fd >= 0) close(out_fd);
      in_fd = out_fd = -1;
    }
  }

  void kill_now(const std::string& why) {
    if (pid > 0) {
      kill(pid, SIGKILL);
      int st = 0;
      waitpid(pid, &st, 0);
      pid = -1;
    }
    if (in_fd >= 0) close(in_fd);
    if (out_fd >= 0) close(out_fd);
    in_fd = out_fd = -1;
    throw SolverFailure(why);
  }

  void spawn() {
    static bool sigpipe_ignored = [] {
      struct sigaction sa{};
      sa.sa_handler = SIG_IGN;
      sigaction(SIGPIPE, &sa, nullptr);
      return true;
    }();
    (void)sigpipe_ignored;

    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
      throw SolverFailure("cannot create solver pipes");
    pid_t child = fork();
    if (child < 0) throw SolverFailure("cannot fork solver process");
    if (child == 0) {
      dup2(to_child[0], 0);
      dup2(from_child[1], 1);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      execl("/bin/sh", "sh", "-c", cfg.command.c_str(), (char*)nullptr);
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    pid = child;
    in_fd = to_child[1];
    out_fd = from_child[0];
    rbuf.clear();
  }

  void write_all(const std::string& s) {
    size_t off = 0;
    while (off < s.size()) {
      ssize_t n = write(in_fd, s.data() + off, s.size() - off);
      if (n < 0) kill_now("solver process rejected input (" + cfg.command + ")");
      off += static_cast<size_t>(n);
    }
  }

  // Sends a command batch followed by an echo marker; returns all output
  // lines that arrive before the marker.
  std::vector<std::string> send(const std::string& batch) {
    if (pid < 0) spawn();
    std::string marker = "<sync-" + std::to_string(++sync_id) + ">";
    write_all(batch + "\n(echo \"" + marker + "\")\n");

    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::milliseconds(cfg.timeout_ms + cfg.hard_grace_ms);
    std::vector<std::string> lines;
    std::string cur;
    size_t scanned = 0;
    while (true) {
      // Drain complete lines from the buffer.
      while (true) {
        auto nl = rbuf.find('\n', scanned);
        if (nl == std::string::npos) {
          scanned = rbuf.size();
          break;
        }
        std::string line = rbuf.substr(0, nl);
        rbuf.erase(0, nl + 1);
        scanned = 0;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line == marker) return lines;
        if (!line.empty()) lines.push_back(line);
      }
      auto now = std::chrono::steady_clock::now();
      if (now >= deadline)
        kill_now("solver did not respond within the hard deadline");
      int wait_ms = static_cast<int>(
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
      struct pollfd pfd{out_fd, POLLIN, 0};
      int pr = poll(&pfd, 1, std::max(1, std::min(wait_ms, 200)));
      if (pr < 0) kill_now("poll on solver output failed");
      if (pr == 0) continue;
      char buf[4096];
      ssize_t n = read(out_fd, buf, sizeof(buf));
      if (n <= 0) kill_now("solver process closed its output");
      rbuf.append(buf, static_cast<size_t>(n));
    }
  }

  void send_silent(const std::string& batch) {
    auto lines = send(batch);
    if (!lines.empty()) {
      std::string all;
      for (const auto& l : lines) all += (all.empty() ? "" : " | ") + l;
      kill_now("unexpected solver output: " + all);
    }
  }

  bool is_declared(const std::string& name) const {
    for (const auto& level : declared)
      if (level.count(name)) return true;
    return false;
  }

  std::string declare_lines(const Expr& f) {
    std::string out;
    for (const auto& v : collect_vars(f)) {
      std::string n = smt_name(v);
      if (is_declared(n)) continue;
      declared.back().insert(n);
      out += "(declare-const " + n + " Int)\n";
    }
    return out;
  }
};

SolverSession::SolverSession(SolverConfig cfg) : impl_(std::make_unique<Impl>()) {
  impl_->cfg = std::move(cfg);
  if (impl_->cfg.command.empty()) impl_->cfg.command = default_solver_command();
}

SolverSession::~SolverSession() = default;

void SolverSession::reset() {
  std::string preamble;
  if (impl_->pid >= 0) preamble += "(reset)\n";
  preamble += "(set-option :print-success false)\n";
  preamble += "(set-option :timeout " + std::to_string(impl_->cfg.timeout_ms) + ")\n";
  preamble += "(set-logic " + impl_->cfg.logic + ")";
  impl_->send_silent(preamble);
  impl_->declared = {{}};
  impl_->asserted = {{}};
}

void SolverSession::push() {
  impl_->send_silent("(push 1)");
  impl_->declared.emplace_back();
  impl_->asserted.emplace_back();
}

void SolverSession::pop() {
  impl_->send_silent("(pop 1)");
  impl_->declared.pop_back();
  impl_->asserted.pop_back();
}

void SolverSession::assert_formula(const Expr& f) {
  std::string batch = impl_->declare_lines(f);
  batch += "(assert " + encode(f) + ")";
  impl_->send_silent(batch);
  impl_->asserted.back().push_back(f);
}

namespace {

// Pulls define-fun integer bindings out of a (get-model) response.
Model parse_model(const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  std::vector<std::string> toks;
  std::string cur;
  for (char c : text) {
    if (c == '(' || c == ')') {
      if (!cur.empty()) toks.push_back(cur), cur.clear();
      toks.push_back(std::string(1, c));
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) toks.push_back(cur), cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) toks.push_back(cur);

  Model m;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (toks[i] != "define-fun" || i + 1 >= toks.size()) continue;
    std::string name = toks[i + 1];
    size_t j = i + 2;
    // Skip the (possibly empty) argument list and the result sort.
    if (j < toks.size() && toks[j] == "(") {
      int depth = 0;
      for (; j < toks.size(); ++j) {
        if (toks[j] == "(") ++depth;
        if (toks[j] == ")" && --depth == 0) {
          ++j;
          break;
        }
      }
    }
    if (j < toks.size() && toks[j] != "(" && toks[j] != ")") ++j;  // sort name
    if (j >= toks.size()) continue;
    BigInt val;
    if (toks[j] == "(") {
      if (j + 2 < toks.size() && toks[j + 1] == "-") {
        auto parsed = parse_int(toks[j + 2]);
        if (!parsed) continue;
        val = -*parsed;
      } else {
        continue;
      }
    } else {
      auto parsed = parse_int(toks[j]);
      if (!parsed) continue;
      val = *parsed;
    }
    m[parse_smt_name(name)] = BigRat(val);
  }
  return m;
}

}  // namespace

EntailResult SolverSession::entail(const Expr& goal) {
  // Declare ahead of the push so the names survive the bracket.
  std::string decls = impl_->declare_lines(goal);
  if (!decls.empty()) {
    decls.pop_back();  // trailing newline
    impl_->send_silent(decls);
  }
  push();
  impl_->send_silent("(assert (not " + encode(goal) + "))");
  auto lines = impl_->send("(check-sat)");
  if (lines.size() != 1) {
    std::string all;
    for (const auto& l : lines) all += (all.empty() ? "" : " | ") + l;
    impl_->kill_now("unexpected check-sat reply: " + all);
  }
  const std::string& verdict = lines[0];
  EntailResult res;
  if (verdict == "unsat") {
    pop();
    res.status = EntailStatus::Entailed;
    return res;
  }
  if (verdict == "unknown") {
    pop();
    res.status = EntailStatus::Unknown;
    res.reason = "solver returned unknown";
    return res;
  }
  if (verdict != "sat") impl_->kill_now("unexpected check-sat reply: " + verdict);

  Model m = parse_model(impl_->send("(get-model)"));
  // Validate: the model must satisfy every asserted formula and falsify the
  // goal under the exact evaluator.
  Env env = model_env(m);
  for (const auto& level : impl_->asserted)
    for (const auto& f : level)
      if (!eval_bool(f, env))
        impl_->kill_now("model fails an asserted formula: " + to_text(f));
  if (eval_bool(goal, env)) impl_->kill_now("model does not falsify the goal");
  pop();
  res.status = EntailStatus::Counterexample;
  res.model = std::move(m);
  return res;
}

}  // namespace tropinv
