#include "qfp/sat.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>
#include <sys/wait.h>

namespace qfp {

bool satisfiesAll(const Cnf& cnf, const std::vector<bool>& assignment) {
  for (const auto& clause : cnf.clauses) {
    bool sat = false;
    for (int lit : clause) {
      auto v = static_cast<std::size_t>(std::abs(lit));
      if (v >= assignment.size()) return false;
      if (assignment[v] == (lit > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

//===----------------------------------------------------------------------===//
// CDCL engine
//===----------------------------------------------------------------------===//

namespace {

// Internal literal: 2 * var + sign, var 0-based. sign = 1 means negated.
using Lit = std::uint32_t;
constexpr Lit mkLit(std::uint32_t var, bool neg) { return 2 * var + (neg ? 1 : 0); }
constexpr std::uint32_t varOf(Lit l) { return l >> 1; }
constexpr bool isNeg(Lit l) { return l & 1; }
constexpr Lit negLit(Lit l) { return l ^ 1; }

enum : std::int8_t { kValTrue = 1, kValFalse = -1, kValUndef = 0 };

constexpr std::uint32_t kNoReason = UINT32_MAX;

struct Clause {
  std::vector<Lit> lits;
  bool learnt = false;
  bool deleted = false;
  double activity = 0;
};

struct Watcher {
  std::uint32_t clause;
  Lit blocker;
};

double luby(double y, std::uint64_t x) {
  std::uint64_t size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

struct CdclSolver::Impl {
  SolverOptions opts;
  std::uint32_t numVars = 0;
  std::vector<Clause> clauses;
  std::vector<std::vector<Watcher>> watches;  // indexed by literal that became false
  std::vector<std::int8_t> assigns;
  std::vector<std::uint32_t> reason;
  std::vector<int> level;
  std::vector<bool> polarity;  // saved phase, true = negative
  std::vector<double> activity;
  std::vector<Lit> trail;
  std::vector<std::size_t> trailLim;
  std::size_t qhead = 0;
  double varInc = 1;
  double claInc = 1;
  bool trivialUnsat = false;
  std::uint64_t conflicts = 0;
  std::vector<std::vector<int>> learned;
  std::size_t numLearnts = 0;
  double maxLearnts = 0;

  // binary max-heap over activity
  std::vector<std::uint32_t> heap;
  std::vector<int> heapIndex;

  std::vector<bool> seen;

  explicit Impl(const Cnf& cnf, SolverOptions o) : opts(o) {
    numVars = static_cast<std::uint32_t>(cnf.numVars);
    watches.resize(2 * numVars);
    assigns.assign(numVars, kValUndef);
    reason.assign(numVars, kNoReason);
    level.assign(numVars, 0);
    polarity.assign(numVars, true);
    activity.assign(numVars, 0);
    heapIndex.assign(numVars, -1);
    seen.assign(numVars, false);
    for (std::uint32_t v = 0; v < numVars; ++v) heapInsert(v);
    for (const auto& c : cnf.clauses) {
      if (trivialUnsat) break;
      addInputClause(c);
    }
    maxLearnts = std::max<double>(static_cast<double>(clauses.size()) / 3.0, 2000.0);
  }

  std::int8_t value(Lit l) const {
    std::int8_t v = assigns[varOf(l)];
    return isNeg(l) ? static_cast<std::int8_t>(-v) : v;
  }

  int decisionLevel() const { return static_cast<int>(trailLim.size()); }

  // --- heap ---
  bool heapLess(std::uint32_t a, std::uint32_t b) const {
    if (activity[a] != activity[b]) return activity[a] > activity[b];
    return a < b;
  }
  void heapUp(std::size_t i) {
    std::uint32_t v = heap[i];
    while (i > 0) {
      std::size_t p = (i - 1) / 2;
      if (!heapLess(v, heap[p])) break;
      heap[i] = heap[p];
      heapIndex[heap[i]] = static_cast<int>(i);
      i = p;
    }
    heap[i] = v;
    heapIndex[v] = static_cast<int>(i);
  }
  void heapDown(std::size_t i) {
    std::uint32_t v = heap[i];
    for (;;) {
      std::size_t c = 2 * i + 1;
      if (c >= heap.size()) break;
      if (c + 1 < heap.size() && heapLess(heap[c + 1], heap[c])) ++c;
      if (!heapLess(heap[c], v)) break;
      heap[i] = heap[c];
      heapIndex[heap[i]] = static_cast<int>(i);
      i = c;
    }
    heap[i] = v;
    heapIndex[v] = static_cast<int>(i);
  }
  void heapInsert(std::uint32_t v) {
    if (heapIndex[v] >= 0) return;
    heap.push_back(v);
    heapUp(heap.size() - 1);
  }
  std::uint32_t heapPop() {
    std::uint32_t top = heap.front();
    heapIndex[top] = -1;
    heap.front() = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heapIndex[heap.front()] = 0;
      heapDown(0);
    }
    return top;
  }

  void bumpVar(std::uint32_t v) {
    activity[v] += varInc;
    if (activity[v] > 1e100) {
      for (auto& a : activity) a *= 1e-100;
      varInc *= 1e-100;
    }
    if (heapIndex[v] >= 0) heapUp(static_cast<std::size_t>(heapIndex[v]));
  }

  void bumpClause(Clause& c) {
    c.activity += claInc;
    if (c.activity > 1e20) {
      for (auto& cl : clauses)
        if (cl.learnt) cl.activity *= 1e-20;
      claInc *= 1e-20;
    }
  }

  void enqueue(Lit l, std::uint32_t why) {
    std::uint32_t v = varOf(l);
    assigns[v] = isNeg(l) ? kValFalse : kValTrue;
    reason[v] = why;
    level[v] = decisionLevel();
    trail.push_back(l);
  }

  void addInputClause(const std::vector<int>& raw) {
    std::vector<Lit> lits;
    for (int x : raw) lits.push_back(mkLit(static_cast<std::uint32_t>(std::abs(x) - 1), x < 0));
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    std::vector<Lit> kept;
    for (std::size_t i = 0; i < lits.size(); ++i) {
      if (i + 1 < lits.size() && lits[i + 1] == negLit(lits[i])) return;  // tautology
      std::int8_t val = value(lits[i]);
      if (val == kValTrue) return;
      if (val == kValFalse) continue;
      kept.push_back(lits[i]);
    }
    if (kept.empty()) {
      trivialUnsat = true;
      return;
    }
    if (kept.size() == 1) {
      enqueue(kept[0], kNoReason);
      if (propagate() != kNoReason) trivialUnsat = true;
      return;
    }
    attach(std::move(kept), false);
  }

  std::uint32_t attach(std::vector<Lit> lits, bool learnt) {
    auto idx = static_cast<std::uint32_t>(clauses.size());
    watches[negLit(lits[0])].push_back({idx, lits[1]});
    watches[negLit(lits[1])].push_back({idx, lits[0]});
    Clause c;
    c.lits = std::move(lits);
    c.learnt = learnt;
    clauses.push_back(std::move(c));
    if (learnt) ++numLearnts;
    return idx;
  }

  // Returns the index of a conflicting clause, or kNoReason.
  std::uint32_t propagate() {
    while (qhead < trail.size()) {
      Lit p = trail[qhead++];  // p is true; clauses watching ~p must react
      std::vector<Watcher>& ws = watches[p];
      std::size_t i = 0, j = 0;
      const Lit falseLit = negLit(p);
      while (i < ws.size()) {
        Watcher w = ws[i];
        if (clauses[w.clause].deleted) {
          ++i;
          continue;
        }
        if (value(w.blocker) == kValTrue) {
          ws[j++] = ws[i++];
          continue;
        }
        Clause& c = clauses[w.clause];
        if (c.lits[0] == falseLit) std::swap(c.lits[0], c.lits[1]);
        ++i;
        Lit first = c.lits[0];
        if (first != w.blocker && value(first) == kValTrue) {
          ws[j++] = {w.clause, first};
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.lits.size(); ++k) {
          if (value(c.lits[k]) != kValFalse) {
            std::swap(c.lits[1], c.lits[k]);
            watches[negLit(c.lits[1])].push_back({w.clause, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = {w.clause, first};
        if (value(first) == kValFalse) {
          while (i < ws.size()) ws[j++] = ws[i++];
          ws.resize(j);
          qhead = trail.size();
          return w.clause;
        }
        enqueue(first, w.clause);
      }
      ws.resize(j);
    }
    return kNoReason;
  }

  bool redundant(Lit l) const {
    std::uint32_t r = reason[varOf(l)];
    if (r == kNoReason) return false;
    for (Lit q : clauses[r].lits) {
      std::uint32_t v = varOf(q);
      if (v == varOf(l)) continue;
      if (!seen[v] && level[v] > 0) return false;
    }
    return true;
  }

  void analyze(std::uint32_t confl, std::vector<Lit>& out, int& backtrackLevel) {
    out.clear();
    out.push_back(0);  // placeholder for the asserting literal
    int pathCount = 0;
    Lit p = 0;
    bool first = true;
    std::size_t index = trail.size();
    do {
      Clause& c = clauses[confl];
      if (c.learnt) bumpClause(c);
      for (Lit q : c.lits) {
        if (!first && q == p) continue;
        std::uint32_t v = varOf(q);
        if (seen[v] || level[v] == 0) continue;
        seen[v] = true;
        bumpVar(v);
        if (level[v] >= decisionLevel())
          ++pathCount;
        else
          out.push_back(q);
      }
      first = false;
      while (!seen[varOf(trail[--index])]) {
      }
      p = trail[index];
      confl = reason[varOf(p)];
      seen[varOf(p)] = false;
      --pathCount;
    } while (pathCount > 0);
    out[0] = negLit(p);

    std::vector<Lit> toClear(out.begin() + 1, out.end());
    std::size_t j = 1;
    for (std::size_t i = 1; i < out.size(); ++i)
      if (!redundant(out[i])) out[j++] = out[i];
    out.resize(j);
    for (Lit l : toClear) seen[varOf(l)] = false;

    backtrackLevel = 0;
    if (out.size() > 1) {
      std::size_t maxI = 1;
      for (std::size_t i = 2; i < out.size(); ++i)
        if (level[varOf(out[i])] > level[varOf(out[maxI])]) maxI = i;
      std::swap(out[1], out[maxI]);
      backtrackLevel = level[varOf(out[1])];
    }
  }

  void cancelUntil(int lvl) {
    if (decisionLevel() <= lvl) return;
    for (std::size_t c = trail.size(); c-- > trailLim[static_cast<std::size_t>(lvl)];) {
      std::uint32_t v = varOf(trail[c]);
      assigns[v] = kValUndef;
      reason[v] = kNoReason;
      polarity[v] = isNeg(trail[c]);
      heapInsert(v);
    }
    trail.resize(trailLim[static_cast<std::size_t>(lvl)]);
    trailLim.resize(static_cast<std::size_t>(lvl));
    qhead = trail.size();
  }

  bool locked(std::uint32_t ci) const {
    const Clause& c = clauses[ci];
    std::uint32_t v = varOf(c.lits[0]);
    return reason[v] == ci && value(c.lits[0]) == kValTrue;
  }

  void reduceDb() {
    std::vector<std::uint32_t> learnts;
    for (std::uint32_t i = 0; i < clauses.size(); ++i)
      if (clauses[i].learnt && !clauses[i].deleted) learnts.push_back(i);
    std::sort(learnts.begin(), learnts.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (clauses[a].activity != clauses[b].activity) return clauses[a].activity < clauses[b].activity;
      return a < b;
    });
    std::size_t target = learnts.size() / 2;
    for (std::size_t i = 0; i < target; ++i) {
      std::uint32_t ci = learnts[i];
      if (clauses[ci].lits.size() > 2 && !locked(ci)) {
        clauses[ci].deleted = true;
        clauses[ci].lits.shrink_to_fit();
        --numLearnts;
      }
    }
  }

  std::optional<Lit> pickBranch() {
    while (!heap.empty()) {
      std::uint32_t v = heapPop();
      if (assigns[v] == kValUndef) return mkLit(v, polarity[v]);
    }
    return std::nullopt;
  }

  // kValTrue = sat, kValFalse = unsat, kValUndef = restart
  std::int8_t search(std::uint64_t conflictLimit) {
    std::uint64_t local = 0;
    std::vector<Lit> learntClause;
    for (;;) {
      std::uint32_t confl = propagate();
      if (confl != kNoReason) {
        ++conflicts;
        ++local;
        if (decisionLevel() == 0) return kValFalse;
        if (opts.conflictBudget && conflicts > *opts.conflictBudget)
          throw ResourceLimit("conflict budget exhausted after " + std::to_string(conflicts - 1) +
                              " conflicts");
        int bt = 0;
        analyze(confl, learntClause, bt);
        cancelUntil(bt);
        if (opts.recordLearned) {
          std::vector<int> ext;
          for (Lit l : learntClause)
            ext.push_back(isNeg(l) ? -static_cast<int>(varOf(l) + 1) : static_cast<int>(varOf(l) + 1));
          learned.push_back(std::move(ext));
        }
        if (learntClause.size() == 1) {
          enqueue(learntClause[0], kNoReason);
        } else {
          std::uint32_t ci = attach(learntClause, true);
          bumpClause(clauses[ci]);
          enqueue(learntClause[0], ci);
        }
        varInc /= opts.varDecay;
        claInc /= opts.clauseDecay;
        continue;
      }
      if (local >= conflictLimit) {
        cancelUntil(0);
        return kValUndef;
      }
      if (static_cast<double>(numLearnts) >= maxLearnts + static_cast<double>(trail.size())) {
        reduceDb();
        maxLearnts *= 1.1;
      }
      auto next = pickBranch();
      if (!next) return kValTrue;
      trailLim.push_back(trail.size());
      enqueue(*next, kNoReason);
    }
  }

  SatResult run() {
    SatResult result;
    if (trivialUnsat || propagate() != kNoReason) {
      result.status = SatStatus::Unsat;
      return result;
    }
    for (std::uint64_t restart = 0;; ++restart) {
      auto limit = static_cast<std::uint64_t>(luby(2, restart) * opts.restartBase);
      std::int8_t status = search(limit);
      if (status == kValFalse) {
        result.status = SatStatus::Unsat;
        return result;
      }
      if (status == kValTrue) {
        result.status = SatStatus::Sat;
        result.assignment.assign(numVars + 1, false);
        for (std::uint32_t v = 0; v < numVars; ++v) result.assignment[v + 1] = assigns[v] == kValTrue;
        cancelUntil(0);
        return result;
      }
    }
  }
};

CdclSolver::CdclSolver(const Cnf& cnf, SolverOptions opts) : impl_(new Impl(cnf, opts)) {}
CdclSolver::~CdclSolver() { delete impl_; }

SatResult CdclSolver::solve() { return impl_->run(); }

const std::vector<std::vector<int>>& CdclSolver::learnedClauses() const { return impl_->learned; }
std::uint64_t CdclSolver::conflicts() const { return impl_->conflicts; }

SatResult solve(const Cnf& cnf, const SolverOptions& opts) {
  CdclSolver solver(cnf, opts);
  SatResult r = solver.solve();
  if (r.status == SatStatus::Sat && !satisfiesAll(cnf, r.assignment))
    throw std::logic_error("internal error: CDCL model violates a clause");
  return r;
}

//===----------------------------------------------------------------------===//
// External solver
//===----------------------------------------------------------------------===//

namespace {

class TempFile {
 public:
  TempFile() {
    const char* dir = std::getenv("TMPDIR");
    std::string pattern = std::string(dir ? dir : "/tmp") + "/qfp-XXXXXX.cnf";
    std::vector<char> buf(pattern.begin(), pattern.end());
    buf.push_back('\0');
    int fd = mkstemps(buf.data(), 4);
    if (fd < 0) throw ExternalSolverError("cannot create temporary DIMACS file");
    close(fd);
    path_ = buf.data();
  }
  ~TempFile() { std::remove(path_.c_str()); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace

SatResult solveExternal(const Cnf& cnf, const std::string& command) {
  TempFile file;
  {
    std::ofstream out(file.path());
    emitDimacs(cnf, out);
    if (!out) throw ExternalSolverError("cannot write " + file.path());
  }
  std::string cmdline = command + " '" + file.path() + "'";
  FILE* pipe = popen(cmdline.c_str(), "r");
  if (!pipe) throw ExternalSolverError("cannot launch: " + command);
  std::string output;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, got);
  int status = pclose(pipe);
  int exitCode = WIFEXITED(status) ? WEXITSTATUS(status) : -1;

  std::optional<SatStatus> verdict;
  std::vector<bool> assignment(static_cast<std::size_t>(cnf.numVars) + 1, false);
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("s ", 0) == 0) {
      std::string word = line.substr(2);
      while (!word.empty() && std::isspace(static_cast<unsigned char>(word.back()))) word.pop_back();
      if (word == "SATISFIABLE")
        verdict = SatStatus::Sat;
      else if (word == "UNSATISFIABLE")
        verdict = SatStatus::Unsat;
      else
        throw ExternalSolverError("external solver answered: " + word);
    } else if (line.rfind("v ", 0) == 0 || line == "v") {
      std::istringstream vs(line.substr(1));
      long long lit;
      while (vs >> lit) {
        if (lit == 0) continue;
        auto v = static_cast<std::size_t>(std::llabs(lit));
        if (v >= assignment.size()) throw ExternalSolverError("model mentions unknown variable");
        assignment[v] = lit > 0;
      }
    }
  }
  if (!verdict)
    throw ExternalSolverError("no status line from external solver (exit code " +
                              std::to_string(exitCode) + ")");
  SatResult r;
  r.status = *verdict;
  if (r.status == SatStatus::Sat) {
    if (!satisfiesAll(cnf, assignment))
      throw ExternalSolverError("external model violates the CNF");
    r.assignment = std::move(assignment);
  }
  return r;
}

}  // namespace qfp
