#include "qfp/driver.hpp"
#include "qfp/encoder.hpp"
#include "qfp/oracle.hpp"
#include "qfp/sat.hpp"
#include "support/random_instances.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace qfp;

namespace {

LinearAtom atomOf(std::map<VarId, BigInt> coeffs, BigInt bound) {
  LinearAtom a;
  a.coeffs = std::move(coeffs);
  a.bound = std::move(bound);
  return a;
}

EncodingPlan plainPlan(const std::vector<VarId>& vars, DomainKind domain, unsigned width) {
  EncodingPlan p;
  for (VarId v : vars) p.vars[v] = VarEncoding{domain, width, std::nullopt};
  return p;
}

SearchSpace planSpace(const EncodingPlan& plan) {
  SearchSpace s;
  for (const auto& [v, e] : plan.vars) {
    BigInt top = BigInt(1) << e.bitWidth;
    if (e.domain == DomainKind::Unsigned)
      s.dims.push_back({v, {BigInt(0), BigInt(top - 1)}});
    else
      s.dims.push_back({v, {BigInt(-(top / 2)), BigInt(top / 2 - 1)}});
  }
  return s;
}

std::optional<Model> solveEncoding(const Formula& f, const EncodingPlan& plan, bool hashing = true) {
  Encoding enc = encode(f, plan, {hashing});
  SatResult r = solve(enc.cnf);
  if (r.status == SatStatus::Unsat) return std::nullopt;
  Model m = decodeModel(r.assignment, enc.map);
  EXPECT_TRUE(evaluate(f, m));
  return m;
}

}  // namespace

TEST(Encode, NonNegativeVariable) {
  Formula f = Formula::atom(atomOf({{0, 1}}, 0));
  auto m = solveEncoding(f, plainPlan({0}, DomainKind::Unsigned, 2));
  ASSERT_TRUE(m);
  EXPECT_GE(m->at(0), 0);
  EXPECT_LE(m->at(0), 3);
}

TEST(Encode, ContradictoryBounds) {
  Formula f = Formula::conjunction({Formula::atom(atomOf({{0, 1}}, 1)), Formula::atom(atomOf({{0, -1}}, 0))});
  EXPECT_FALSE(solveEncoding(f, plainPlan({0}, DomainKind::Signed, 4)));
  EXPECT_FALSE(solveEncoding(f, plainPlan({0}, DomainKind::Unsigned, 4)));
}

TEST(Encode, NoWrapAroundAtExtremes) {
  // 7x >= 20 has no model in [-8, 7] only if arithmetic wraps; it must find x = 3..7.
  Formula f = Formula::atom(atomOf({{0, 7}}, 20));
  auto m = solveEncoding(f, plainPlan({0}, DomainKind::Signed, 4));
  ASSERT_TRUE(m);
  // x = -8 would wrap to a large positive product in 4-bit arithmetic
  Formula g = Formula::conjunction({f, Formula::atom(atomOf({{0, -1}}, 7))});
  EXPECT_FALSE(solveEncoding(g, plainPlan({0}, DomainKind::Signed, 4)));
}

TEST(Encode, LargeConstants) {
  BigInt big("1000000000000000000000");
  Formula f = Formula::conjunction({Formula::atom(atomOf({{0, 1}, {1, -1}}, big)),
                                    Formula::atom(atomOf({{1, 1}}, 0))});
  FormulaAnalysis a = analyze(f, {});
  Encoding enc = encode(f, planFromAnalysis(a));
  SatResult r = solve(enc.cnf);
  ASSERT_EQ(r.status, SatStatus::Sat);
  Model m = decodeModel(r.assignment, enc.map);
  EXPECT_TRUE(evaluate(f, m));
  EXPECT_GE(m.at(0), big);
}

TEST(Encode, ConstantRoots) {
  Encoding t = encode(Formula::constant(true), {});
  EXPECT_EQ(t.cnf.numVars, 0);
  EXPECT_TRUE(t.cnf.clauses.empty());
  EXPECT_EQ(toDimacs(t.cnf), "p cnf 0 0\n");
  Encoding f = encode(Formula::constant(false), {});
  ASSERT_EQ(f.cnf.clauses.size(), 1u);
  EXPECT_TRUE(f.cnf.clauses[0].empty());
  EXPECT_EQ(solve(f.cnf).status, SatStatus::Unsat);
}

TEST(Encode, MissingPlanEntryThrows) {
  Formula f = Formula::atom(atomOf({{0, 1}, {1, 1}}, 0));
  EXPECT_THROW(encode(f, plainPlan({0}, DomainKind::Signed, 3)), std::invalid_argument);
}

TEST(Encode, DistinctBooleanIds) {
  Formula f = Formula::conjunction({Formula::atom(atomOf({{0, 2}, {1, -3}}, 1)),
                                    Formula::atom(atomOf({{1, 1}, {2, 1}}, -2))});
  EncodingPlan plan = plainPlan({0, 1, 2}, DomainKind::Signed, 5);
  Encoding enc = encode(f, plan);
  std::set<int> ids;
  for (const auto& [v, b] : enc.map.vars) {
    EXPECT_EQ(b.bits.size(), 5u);
    for (int id : b.bits) {
      EXPECT_TRUE(ids.insert(id).second);
      EXPECT_GE(id, 1);
      EXPECT_LE(id, enc.cnf.numVars);
    }
  }
  EXPECT_EQ(enc.map.totalBits(), 15u);
  for (const auto& c : enc.cnf.clauses)
    for (int lit : c) {
      EXPECT_NE(lit, 0);
      EXPECT_LE(std::abs(lit), enc.cnf.numVars);
    }
}

TEST(Encode, WidthsFollowAnalysis) {
  fuzz::InstanceGen gen(41);
  for (int i = 0; i < 100; ++i) {
    Formula f = toNnf(gen.mixed());
    FormulaAnalysis a = analyze(f, {});
    EncodingPlan plan = planFromAnalysis(a);
    for (const auto& [v, ci] : a.classOf) {
      const BoundReport& b = a.classes[ci].bound;
      const VarEncoding& e = plan.vars.at(v);
      EXPECT_EQ(e.bitWidth, b.bitWidth);
      EXPECT_EQ(e.domain, b.domain);
      BigInt top = BigInt(1) << e.bitWidth;
      if (b.domain == DomainKind::Signed)
        EXPECT_GE(top / 2 - 1, b.d);
      else
        EXPECT_GE(top - 1, b.d);
      EXPECT_EQ(e.anchor.has_value(), a.classes[ci].zeroAnchor);
    }
  }
}

TEST(Encode, VerdictMatchesOracleOnPlanDomains) {
  fuzz::InstanceGen gen(43);
  int sat = 0;
  for (int i = 0; i < 300; ++i) {
    Formula f = toNnf(gen.mixed());
    std::vector<VarId> vars = collectVariables(f);
    DomainKind kind = gen.uniform(0, 1) ? DomainKind::Signed : DomainKind::Unsigned;
    EncodingPlan plan = plainPlan(vars, kind, static_cast<unsigned>(gen.uniform(1, 4)));
    auto expected = bruteForceSolve(f, planSpace(plan));
    auto got = solveEncoding(f, plan);
    EXPECT_EQ(expected.has_value(), got.has_value()) << i;
    if (got) {
      ++sat;
      for (const auto& [v, iv] : planSpace(plan).dims) {
        EXPECT_GE(got->at(v), iv.lo);
        EXPECT_LE(got->at(v), iv.hi);
      }
    }
  }
  EXPECT_GT(sat, 50);
}

TEST(Encode, AnchoredDifferenceClassesMatchOracle) {
  fuzz::InstanceGen gen(47);
  for (int i = 0; i < 200; ++i) {
    Formula f = toNnf(gen.differenceOnly());
    FormulaAnalysis a = analyze(f, {});
    auto got = solveEncoding(f, planFromAnalysis(a));
    auto expected = fuzz::oracleSolve(f, SearchSpace::uniform(collectVariables(f), -60, 60));
    EXPECT_EQ(expected.has_value(), got.has_value()) << i;
  }
}

TEST(Encode, StructuralHashingKeepsVerdicts) {
  fuzz::InstanceGen gen(53);
  for (int i = 0; i < 150; ++i) {
    Formula f = toNnf(gen.mixed());
    EncodingPlan plan = planFromAnalysis(analyze(f, {}));
    Encoding on = encode(f, plan, {true});
    Encoding off = encode(f, plan, {false});
    EXPECT_LE(on.cnf.numVars, off.cnf.numVars);
    EXPECT_EQ(solve(on.cnf).status, solve(off.cnf).status) << i;
  }
}

TEST(Encode, DeterministicOutput) {
  fuzz::InstanceGen gen(59);
  Formula f = toNnf(gen.mixed());
  EncodingPlan plan = planFromAnalysis(analyze(f, {}));
  EXPECT_EQ(toDimacs(encode(f, plan).cnf), toDimacs(encode(f, plan).cnf));
}

TEST(Encode, CapWidths) {
  EncodingPlan plan = plainPlan({0, 1}, DomainKind::Signed, 12);
  plan.vars[1].bitWidth = 3;
  plan.anchorWidths = {20};
  EncodingPlan capped = capWidths(plan, 8);
  EXPECT_EQ(capped.vars[0].bitWidth, 8u);
  EXPECT_EQ(capped.vars[1].bitWidth, 3u);
  EXPECT_EQ(capped.anchorWidths[0], 8u);
}

TEST(Decode, TwosComplement) {
  EXPECT_EQ(decodeBits({true, false, false}, DomainKind::Signed), 1);
  EXPECT_EQ(decodeBits({true, true, true}, DomainKind::Signed), -1);
  EXPECT_EQ(decodeBits({false, false, true}, DomainKind::Signed), -4);
  EXPECT_EQ(decodeBits({true, true, true}, DomainKind::Unsigned), 7);
  EXPECT_EQ(decodeBits({}, DomainKind::Unsigned), 0);
}

TEST(Decode, MissingAssignmentThrows) {
  Formula f = Formula::atom(atomOf({{0, 1}}, 1));
  Encoding enc = encode(f, plainPlan({0}, DomainKind::Signed, 4));
  std::vector<bool> shortAssignment(2, false);
  EXPECT_THROW(decodeModel(shortAssignment, enc.map), DecodeError);
}

TEST(Decode, RoundTripFixedPoints) {
  fuzz::InstanceGen gen(61);
  for (int i = 0; i < 100; ++i) {
    unsigned width = static_cast<unsigned>(gen.uniform(2, 9));
    DomainKind kind = gen.uniform(0, 1) ? DomainKind::Signed : DomainKind::Unsigned;
    Formula f = Formula::atom(atomOf({{0, 1}, {1, 1}}, -1000));
    Encoding enc = encode(f, plainPlan({0, 1}, kind, width));
    BigInt top = BigInt(1) << width;
    Model point;
    Cnf cnf = enc.cnf;
    for (VarId v : {0u, 1u}) {
      BigInt value = kind == DomainKind::Signed ? BigInt(gen.uniform(0, static_cast<int>(top) - 1) - top / 2)
                                                : BigInt(gen.uniform(0, static_cast<int>(top) - 1));
      point[v] = value;
      BigInt raw = value < 0 ? BigInt(value + top) : value;
      const auto& bits = enc.map.vars.at(v).bits;
      for (std::size_t b = 0; b < bits.size(); ++b)
        cnf.clauses.push_back({bit_test(raw, static_cast<unsigned>(b)) ? bits[b] : -bits[b]});
    }
    SatResult r = solve(cnf);
    ASSERT_EQ(r.status, SatStatus::Sat);
    EXPECT_EQ(decodeModel(r.assignment, enc.map), point);
  }
}

TEST(Dimacs, Format) {
  Cnf c;
  c.numVars = 2;
  c.clauses = {{1, -2}, {2}};
  EXPECT_EQ(toDimacs(c), "p cnf 2 2\n1 -2 0\n2 0\n");
  EXPECT_EQ(toDimacs(Cnf{}), "p cnf 0 0\n");
  std::ostringstream os;
  emitDimacs(c, os, {"var x"});
  EXPECT_EQ(os.str(), "c var x\np cnf 2 2\n1 -2 0\n2 0\n");
}

TEST(Dimacs, RoundTrip) {
  fuzz::InstanceGen gen(67);
  for (int i = 0; i < 50; ++i) {
    Cnf c = gen.cnf(gen.uniform(1, 30), gen.uniform(0, 60), 5);
    std::istringstream in("c comment\n" + toDimacs(c));
    EXPECT_EQ(parseDimacs(in), c);
  }
  Formula f = toNnf(fuzz::InstanceGen(3).mixed());
  Cnf enc = encode(f, planFromAnalysis(analyze(f, {}))).cnf;
  std::istringstream in(toDimacs(enc));
  EXPECT_EQ(parseDimacs(in), enc);
}

TEST(Dimacs, ParseErrors) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return parseDimacs(in);
  };
  EXPECT_THROW(parse("1 2 0\n"), std::runtime_error);
  EXPECT_THROW(parse("p cnf 2 1\n1 3 0\n"), std::runtime_error);
  EXPECT_THROW(parse("p cnf 2 2\n1 2 0\n"), std::runtime_error);
  EXPECT_THROW(parse("p cnf 2 1\n1 x 0\n"), std::runtime_error);
}

TEST(VarMapDescription, ListsEveryVariable) {
  Problem p = parseProblem("(declare-fun x () Int)(declare-fun y () Int)(assert (>= (- x y) 2))");
  Prepared prep = prepare(p, false);
  FormulaAnalysis a = analyze(prep.nnf, {});
  Encoding enc = encode(a.formula, planFromAnalysis(a));
  auto lines = describeVarMap(enc.map, prep.problem.symbols);
  ASSERT_GE(lines.size(), 2u);
  EXPECT_NE(lines[0].find("x"), std::string::npos);
  EXPECT_NE(lines[1].find("y"), std::string::npos);
}
