#include "qfp/driver.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

using namespace qfp;

namespace {

struct Options {
  std::string opt = "base";
  bool shift = false;
  std::string solver = "embedded";
  std::string mode = "eager";
  bool ackermann = false;
  std::uint64_t seed = 1;
  bool csv = false;
  std::string out;
  std::vector<std::string> paths;
  GenParams gen;
  std::string aMax = "1";
  std::string bMax = "0";
};

void addCommon(CLI::App* cmd, Options& o) {
  cmd->add_option("--opt", o.opt, "Optimization preset")
      ->check(CLI::IsMember({"base", "coeff", "const", "all"}));
  cmd->add_flag("--shift", o.shift, "Shift the origin of variable domains");
  cmd->add_option("--solver", o.solver, "embedded or ext:<command>");
  cmd->add_option("--mode", o.mode, "eager or iterative")->check(CLI::IsMember({"eager", "iterative"}));
  cmd->add_flag("--ackermann", o.ackermann, "Eliminate uninterpreted functions");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_flag("--csv", o.csv, "Machine-readable output");
  cmd->add_option("--out", o.out, "Write output to this path");
}

SolveConfig configFrom(const Options& o) {
  SolveConfig c;
  c.opts = presetFlags(o.opt);
  c.opts.shift = o.shift;
  setBackend(c, o.solver);
  c.mode = o.mode == "iterative" ? Mode::Iterative : Mode::Eager;
  c.ackermann = o.ackermann;
  c.seed = o.seed;
  return c;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + o.out);
  f << text;
}

int runSolve(const Options& o) {
  SolveConfig config = configFrom(o);
  Prepared p = prepare(parseFile(o.paths.at(0)), config.ackermann);
  SolveOutcome r = solvePrepared(p, config);
  if (r.verdict == Verdict::Sat) {
    emit(o, "sat\n" + renderModel(p.problem, r.model));
    return 10;
  }
  emit(o, "unsat\n");
  return 20;
}

int runBound(const Options& o) {
  SolveConfig config = configFrom(o);
  Prepared p = prepare(parseFile(o.paths.at(0)), config.ackermann);
  emit(o, renderBoundTable(analyze(p.nnf, config.opts), o.csv));
  return 0;
}

int runAnalyze(const Options& o) {
  CorpusStats stats = analyzeCorpus(o.paths);
  emit(o, renderCorpusStats(stats, o.csv));
  for (const auto& f : stats.files)
    if (f.error) std::cerr << f.path << ": " << *f.error << "\n";
  return 0;
}

int runGen(Options o) {
  o.gen.aMax = BigInt(o.aMax);
  o.gen.bMax = BigInt(o.bMax);
  o.gen.seed = o.seed;
  emit(o, generateFormula(o.gen));
  return 0;
}

int runDimacs(const Options& o) {
  SolveConfig config = configFrom(o);
  Prepared p = prepare(parseFile(o.paths.at(0)), config.ackermann);
  FormulaAnalysis a = analyze(p.nnf, config.opts);
  EncodeOptions eopts;
  eopts.structuralHashing = config.structuralHashing;
  Encoding enc = encode(a.formula, planFromAnalysis(a), eopts);
  std::vector<std::string> comments = describeVarMap(enc.map, p.problem.symbols);
  for (const auto& [v, alpha] : a.offsets)
    comments.push_back("offset " + p.problem.symbols.name(v) + " " + toString(alpha));
  std::ostringstream os;
  emitDimacs(enc.cnf, os, comments);
  emit(o, os.str());
  std::cerr << "variables " << enc.map.vars.size() << "  total bits " << enc.map.totalBits()
            << "  cnf variables " << enc.cnf.numVars << "  clauses " << enc.cnf.clauses.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision procedure for quantifier-free Presburger arithmetic"};
  app.require_subcommand(1);
  Options o;

  auto* solve = app.add_subcommand("solve", "Decide a formula and print a model");
  addCommon(solve, o);
  solve->add_option("file", o.paths, "SMT-LIB input")->required()->expected(1);

  auto* bound = app.add_subcommand("bound", "Report per-class solution bounds");
  addCommon(bound, o);
  bound->add_option("file", o.paths, "SMT-LIB input")->required()->expected(1);

  auto* an = app.add_subcommand("analyze", "Non-difference constraint statistics");
  addCommon(an, o);
  an->add_option("files", o.paths, "SMT-LIB inputs")->required();

  auto* gen = app.add_subcommand("gen", "Generate a random formula");
  addCommon(gen, o);
  gen->add_option("--n", o.gen.n, "Variables")->required();
  gen->add_option("--m", o.gen.m, "Atoms")->required();
  gen->add_option("--k", o.gen.k, "Non-difference atoms");
  gen->add_option("--w", o.gen.w, "Maximum non-difference width");
  gen->add_option("--amax", o.aMax, "Maximum coefficient magnitude");
  gen->add_option("--bmax", o.bMax, "Maximum constant magnitude");
  gen->add_option("--depth", o.gen.depth, "And/or skeleton depth");

  auto* dimacs = app.add_subcommand("dimacs", "Emit the propositional encoding");
  addCommon(dimacs, o);
  dimacs->add_option("file", o.paths, "SMT-LIB input")->required()->expected(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*solve) return runSolve(o);
    if (*bound) return runBound(o);
    if (*an) return runAnalyze(o);
    if (*gen) return runGen(o);
    if (*dimacs) return runDimacs(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
