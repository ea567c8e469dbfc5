#include "qfp/driver.hpp"

#include "qfp/ackermann.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace qfp {

OptimizationFlags presetFlags(const std::string& name) {
  OptimizationFlags f;
  if (name == "base") return f;
  if (name == "coeff") {
    f.coeff = true;
  } else if (name == "const") {
    f.constTerms = true;
  } else if (name == "all") {
    f.coeff = true;
    f.constTerms = true;
  } else {
    throw std::invalid_argument("unknown optimization preset '" + name + "'");
  }
  return f;
}

void setBackend(SolveConfig& config, const std::string& text) {
  if (text == "embedded") {
    config.backend = Backend::Embedded;
    config.externalCommand.clear();
  } else if (text.rfind("ext:", 0) == 0 && text.size() > 4) {
    config.backend = Backend::External;
    config.externalCommand = text.substr(4);
  } else {
    throw std::invalid_argument("solver must be 'embedded' or 'ext:<command>'");
  }
}

Prepared prepare(Problem problem, bool ackermann) {
  Formula f = problem.formula();
  if (hasApplications(f)) {
    if (!ackermann)
      throw std::invalid_argument(
          "formula contains uninterpreted functions; rerun with --ackermann");
    f = ackermannize(f, problem.symbols, problem.functions);
  }
  Formula nnf = toNnf(normalize(f));
  return Prepared{std::move(problem), std::move(nnf)};
}

SatResult runBackend(const Cnf& cnf, const SolveConfig& config) {
  if (config.backend == Backend::External) return solveExternal(cnf, config.externalCommand);
  SolverOptions opts;
  opts.conflictBudget = config.conflictBudget;
  return solve(cnf, opts);
}

namespace {

Model decodeOriginal(const SatResult& r, const Encoding& enc, const FormulaAnalysis& analysis) {
  Model m = decodeModel(r.assignment, enc.map);
  for (const auto& [v, alpha] : analysis.offsets) {
    auto it = m.find(v);
    if (it != m.end()) it->second -= alpha;
  }
  return m;
}

}  // namespace

SolveOutcome solveFormula(const Formula& nnf, const SolveConfig& config) {
  SolveOutcome out;
  out.analysis = analyze(nnf, config.opts);
  const EncodingPlan full = planFromAnalysis(out.analysis);
  unsigned maxWidth = 1;
  for (const auto& [v, e] : full.vars) maxWidth = std::max(maxWidth, e.bitWidth);
  for (unsigned w : full.anchorWidths) maxWidth = std::max(maxWidth, w);

  EncodeOptions eopts;
  eopts.structuralHashing = config.structuralHashing;
  unsigned cap = config.mode == Mode::Iterative ? std::min(8u, maxWidth) : maxWidth;
  for (;;) {
    const bool atFullWidth = cap >= maxWidth;
    out.stageCaps.push_back(cap);
    Encoding enc = encode(out.analysis.formula, atFullWidth ? full : capWidths(full, cap), eopts);
    out.cnfVars = static_cast<std::size_t>(enc.cnf.numVars);
    out.cnfClauses = enc.cnf.clauses.size();
    SatResult r = runBackend(enc.cnf, config);
    if (r.status == SatStatus::Sat) {
      Model m = decodeOriginal(r, enc, out.analysis);
      if (!evaluate(nnf, m)) throw UnsoundModel("decoded model does not satisfy the formula");
      out.verdict = Verdict::Sat;
      out.model = std::move(m);
      return out;
    }
    if (atFullWidth) {
      out.verdict = Verdict::Unsat;
      return out;
    }
    cap = std::min(maxWidth, cap * 2);
  }
}

SolveOutcome solvePrepared(const Prepared& prepared, const SolveConfig& config) {
  SolveOutcome out = solveFormula(prepared.nnf, config);
  if (out.verdict == Verdict::Sat) {
    for (VarId v : prepared.problem.declared) out.model.emplace(v, 0);
    if (prepared.problem.functions.empty() && !evaluate(prepared.problem.formula(), out.model))
      throw UnsoundModel("model does not satisfy the input assertions");
  }
  return out;
}

std::string renderModel(const Problem& problem, const Model& model) {
  std::vector<std::pair<std::string, BigInt>> rows;
  for (VarId v : problem.declared) {
    auto it = model.find(v);
    rows.emplace_back(problem.symbols.name(v), it == model.end() ? BigInt(0) : it->second);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::ostringstream os;
  os << "(\n";
  for (const auto& [name, value] : rows) {
    os << "  (define-fun " << name << " () Int ";
    if (value < 0)
      os << "(- " << BigInt(-value) << ")";
    else
      os << value;
    os << ")\n";
  }
  os << ")\n";
  return os.str();
}

std::string renderBoundTable(const FormulaAnalysis& analysis, bool csv) {
  std::ostringstream os;
  const std::size_t widest = analysis.widestClass();
  if (csv) {
    os << "class,n,m,k,w,amax,bmax,kind,domain,d,bits,widest\n";
  } else {
    os << std::left << std::setw(7) << "class" << std::right << std::setw(6) << "n" << std::setw(7)
       << "m" << std::setw(5) << "k" << std::setw(4) << "w" << std::setw(8) << "aMax"
       << std::setw(12) << "bMax" << "  " << std::left << std::setw(11) << "kind" << std::setw(9)
       << "domain" << std::right << std::setw(26) << "d" << std::setw(6) << "bits" << "\n";
  }
  for (std::size_t i = 0; i < analysis.classes.size(); ++i) {
    const ClassReport& c = analysis.classes[i];
    const ClassParameters& p = c.params;
    const char* marker = i == widest ? "*" : "";
    if (csv) {
      os << i << "," << p.n << "," << p.m << "," << p.k << "," << p.w << "," << p.aMax << ","
         << p.bMax << "," << kindName(c.cls.kind) << "," << domainName(c.bound.domain) << ","
         << c.bound.d << "," << c.bound.bitWidth << "," << (i == widest ? 1 : 0) << "\n";
    } else {
      os << std::left << std::setw(7) << (std::to_string(i) + marker) << std::right << std::setw(6)
         << p.n << std::setw(7) << p.m << std::setw(5) << p.k << std::setw(4) << p.w << std::setw(8)
         << p.aMax << std::setw(12) << p.bMax << "  " << std::left << std::setw(11)
         << kindName(c.cls.kind) << std::setw(9) << domainName(c.bound.domain) << std::right
         << std::setw(26) << c.bound.d << std::setw(6) << c.bound.bitWidth << "\n";
    }
  }
  return os.str();
}

FormulaStats formulaStats(const Formula& nnf) {
  FormulaStats s;
  for (const auto& atom : collectAtoms(nnf)) {
    ++s.atoms;
    AtomShape shape = classifyConstraint(atom);
    if (!isNonDifference(shape.kind)) continue;
    ++s.nonDifference;
    s.maxNonDifferenceWidth = std::max(s.maxNonDifferenceWidth.value_or(0), shape.width);
  }
  s.fraction = s.atoms == 0 ? 0.0 : static_cast<double>(s.nonDifference) / static_cast<double>(s.atoms);
  return s;
}

CorpusStats analyzeCorpus(const std::vector<std::string>& paths) {
  CorpusStats corpus;
  for (const auto& path : paths) {
    FormulaStats s;
    try {
      Prepared p = prepare(parseFile(path), true);
      s = formulaStats(p.nnf);
    } catch (const std::exception& e) {
      s.error = e.what();
    }
    s.path = path;
    if (!s.error) {
      corpus.maxFraction = std::max(corpus.maxFraction, s.fraction);
      if (s.maxNonDifferenceWidth)
        corpus.maxNonDifferenceWidth =
            std::max(corpus.maxNonDifferenceWidth.value_or(0), *s.maxNonDifferenceWidth);
    }
    corpus.files.push_back(std::move(s));
  }
  return corpus;
}

std::string renderCorpusStats(const CorpusStats& stats, bool csv) {
  std::ostringstream os;
  auto width = [](const std::optional<std::size_t>& w) { return w ? std::to_string(*w) : std::string(); };
  auto fraction = [](double f) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << f;
    return s.str();
  };
  if (csv) os << "file,atoms,non_difference,fraction,max_width\n";
  for (const auto& f : stats.files) {
    if (f.error) {
      os << (csv ? f.path + ",error,,," : f.path + "  error: " + *f.error) << "\n";
      continue;
    }
    if (csv)
      os << f.path << "," << f.atoms << "," << f.nonDifference << "," << fraction(f.fraction) << ","
         << width(f.maxNonDifferenceWidth) << "\n";
    else
      os << f.path << "  atoms " << f.atoms << "  non-difference " << f.nonDifference
         << "  fraction " << fraction(f.fraction) << "  width "
         << (f.maxNonDifferenceWidth ? width(f.maxNonDifferenceWidth) : "-") << "\n";
  }
  if (csv)
    os << "TOTAL,,," << fraction(stats.maxFraction) << "," << width(stats.maxNonDifferenceWidth) << "\n";
  else
    os << "max fraction " << fraction(stats.maxFraction) << "  max width "
       << (stats.maxNonDifferenceWidth ? width(stats.maxNonDifferenceWidth) : "-") << "\n";
  return os.str();
}

}  // namespace qfp
