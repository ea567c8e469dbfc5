#include "qfp/ackermann.hpp"
#include "qfp/driver.hpp"
#include "qfp/formula.hpp"
#include "qfp/oracle.hpp"
#include "qfp/parser.hpp"
#include "support/random_instances.hpp"

#include <gtest/gtest.h>

using namespace qfp;

namespace {

LinearAtom atomOf(std::map<VarId, BigInt> coeffs, BigInt bound) {
  LinearAtom a;
  a.coeffs = std::move(coeffs);
  a.bound = std::move(bound);
  return a;
}

Formula normalized(const std::string& text) { return normalize(parseProblem(text).formula()); }

ParseErrorKind parseErrorKind(const std::string& text) {
  try {
    parseProblem(text);
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no parse error for: " << text;
  return ParseErrorKind::Syntax;
}

bool sameOnBox(const Formula& a, const Formula& b, std::size_t n, int r) {
  bool same = true;
  fuzz::forEachPoint(n, -r, r, [&](const Model& m) {
    if (same && evaluate(a, m) != evaluate(b, m)) same = false;
  });
  return same;
}

bool negationFree(const Formula& f) {
  if (f.kind() == NodeKind::Not || f.kind() == NodeKind::Rel) return false;
  for (const auto& c : f.children())
    if (!negationFree(c)) return false;
  return true;
}

}  // namespace

TEST(Parse, DifferenceAtom) {
  Problem p = parseProblem("(declare-fun x () Int)(declare-fun y () Int)(assert (>= (- x y) 5))");
  Formula f = normalize(p.formula());
  ASSERT_EQ(f.kind(), NodeKind::Atom);
  VarId x = *p.symbols.find("x");
  VarId y = *p.symbols.find("y");
  EXPECT_EQ(f.atom(), atomOf({{x, 1}, {y, -1}}, 5));
}

TEST(Parse, RejectsNonlinearProduct) {
  EXPECT_EQ(parseErrorKind("(declare-fun x () Int)(declare-fun y () Int)(assert (* x y))"),
            ParseErrorKind::Nonlinear);
  EXPECT_EQ(parseErrorKind("(declare-fun x () Int)(declare-fun y () Int)(assert (>= (* x y) 1))"),
            ParseErrorKind::Nonlinear);
}

TEST(Parse, KeepsFunctionApplications) {
  Problem p = parseProblem(
      "(set-logic QF_UFLIA)(declare-fun f (Int) Int)(declare-fun x () Int)(declare-fun y () Int)"
      "(assert (= (f x) (f y)))");
  Formula f = p.formula();
  ASSERT_EQ(f.kind(), NodeKind::Rel);
  EXPECT_EQ(f.lhs().apps.size(), 1u);
  EXPECT_EQ(f.rhs().apps.size(), 1u);
  EXPECT_TRUE(hasApplications(f));
  ASSERT_EQ(p.functions.size(), 1u);
  EXPECT_EQ(p.functions[0].arity, 1u);
}

TEST(Parse, ErrorsCarryPosition) {
  try {
    parseProblem("(declare-fun x () Int)\n(assert (>= x 1)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::Syntax);
    EXPECT_EQ(e.line(), 2);
    EXPECT_GE(e.column(), 1);
  }
  try {
    parseProblem("(declare-fun x () Int)\n  (assert (>= z 1))");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::Undeclared);
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 15);
  }
}

TEST(Parse, SortErrors) {
  EXPECT_EQ(parseErrorKind("(declare-fun b () Bool)"), ParseErrorKind::Sort);
  EXPECT_EQ(parseErrorKind("(declare-fun x () Int)(assert (+ x 1))"), ParseErrorKind::Sort);
  EXPECT_EQ(parseErrorKind("(declare-fun x () Int)(assert (and x true))"), ParseErrorKind::Sort);
}

TEST(Parse, ArityErrors) {
  EXPECT_EQ(parseErrorKind("(declare-fun f (Int) Int)(declare-fun x () Int)(assert (= (f x x) 0))"),
            ParseErrorKind::Arity);
}

TEST(Parse, UnboundedIntegersAndComments) {
  Problem p = parseProblem(
      "; header\n(set-logic QF_LIA)\n(declare-const x Int) ; trailing\n"
      "(assert (<= (* 123456789012345678901234567890 x) (- 5)))\n(check-sat)\n(exit)\n");
  Formula f = normalize(p.formula());
  ASSERT_EQ(f.kind(), NodeKind::Atom);
  EXPECT_EQ(f.atom().coeffs.begin()->second, BigInt("-123456789012345678901234567890"));
  EXPECT_EQ(f.atom().bound, 5);
}

TEST(Parse, DistinctAndChainedRelations) {
  Formula f = normalized(
      "(declare-fun a () Int)(declare-fun b () Int)(declare-fun c () Int)"
      "(assert (and (distinct a b c) (< a b c)))");
  EXPECT_TRUE(evaluate(f, {{0, 0}, {1, 1}, {2, 2}}));
  EXPECT_FALSE(evaluate(f, {{0, 0}, {1, 2}, {2, 2}}));
  EXPECT_FALSE(evaluate(f, {{0, 1}, {1, 0}, {2, 2}}));
}

TEST(Normalize, SignFlipForLessOrEqual) {
  Formula f = normalized("(declare-fun x () Int)(declare-fun y () Int)(assert (<= (+ x y) 7))");
  ASSERT_EQ(f.kind(), NodeKind::Atom);
  EXPECT_EQ(f.atom(), atomOf({{0, -1}, {1, -1}}, -7));
}

TEST(Normalize, EqualitySplits) {
  Formula f = normalized("(declare-fun x () Int)(assert (= x 3))");
  ASSERT_EQ(f.kind(), NodeKind::And);
  ASSERT_EQ(f.children().size(), 2u);
  EXPECT_EQ(f.children()[0].atom(), atomOf({{0, 1}}, 3));
  EXPECT_EQ(f.children()[1].atom(), atomOf({{0, -1}}, -3));
}

TEST(Normalize, StrictAndDisequalityRules) {
  Formula gt = normalized("(declare-fun x () Int)(assert (> x 4))");
  EXPECT_EQ(gt.atom(), atomOf({{0, 1}}, 5));
  Formula lt = normalized("(declare-fun x () Int)(assert (< x 4))");
  EXPECT_EQ(lt.atom(), atomOf({{0, -1}}, -3));
  Formula ne = normalized("(declare-fun x () Int)(assert (distinct x 4))");
  ASSERT_EQ(ne.kind(), NodeKind::Or);
  EXPECT_EQ(ne.children()[0].atom(), atomOf({{0, 1}}, 5));
  EXPECT_EQ(ne.children()[1].atom(), atomOf({{0, -1}}, -3));
}

TEST(Normalize, MovesConstantsRight) {
  Formula f = normalized("(declare-fun x () Int)(assert (>= (+ x 3) (- 2 x)))");
  EXPECT_EQ(f.atom(), atomOf({{0, 2}}, -1));
}

TEST(Normalize, FoldsGroundAtoms) {
  EXPECT_TRUE(normalized("(assert (>= 2 5))").isConst(false));
  EXPECT_TRUE(normalized("(declare-fun x () Int)(assert (>= (- x x) 0))").isConst(true));
  Formula f = normalized("(declare-fun x () Int)(assert (and (>= 2 1) (>= x 0)))");
  EXPECT_EQ(f.kind(), NodeKind::Atom);
  EXPECT_TRUE(normalized("(declare-fun x () Int)(assert (or (>= x 0) (< 1 2)))").isConst(true));
}

TEST(NegateAtom, Examples) {
  EXPECT_EQ(negateAtom(atomOf({{0, 1}, {1, -1}}, 5)), atomOf({{0, -1}, {1, 1}}, -4));
  LinearAtom a = atomOf({{0, 1}}, 0);
  EXPECT_EQ(negateAtom(negateAtom(a)), a);
  EXPECT_EQ(negateAtom(atomOf({{0, 3}, {1, 2}}, 0)), atomOf({{0, -3}, {1, -2}}, 1));
}

TEST(NegateAtom, ComplementsOnSmallPoints) {
  fuzz::InstanceGen gen(11);
  for (int i = 0; i < 200; ++i) {
    LinearAtom a = gen.mixedAtom(3);
    EXPECT_EQ(negateAtom(negateAtom(a)), a);
    LinearAtom na = negateAtom(a);
    fuzz::forEachPoint(3, -6, 6, [&](const Model& m) {
      ASSERT_NE(evaluate(a, m), evaluate(na, m));
    });
  }
}

TEST(ToNnf, DeMorganOverConjunction) {
  LinearAtom a = atomOf({{0, 1}}, 2);
  LinearAtom b = atomOf({{1, 1}, {0, -1}}, 0);
  Formula f = toNnf(Formula::negation(Formula::conjunction({Formula::atom(a), Formula::atom(b)})));
  ASSERT_EQ(f.kind(), NodeKind::Or);
  EXPECT_EQ(f.children()[0].atom(), negateAtom(a));
  EXPECT_EQ(f.children()[1].atom(), negateAtom(b));
}

TEST(ToNnf, NegatedDisjunction) {
  Formula f = toNnf(Formula::negation(
      Formula::disjunction({Formula::atom(atomOf({{0, 1}}, 1)), Formula::atom(atomOf({{1, 1}}, 1))})));
  ASSERT_EQ(f.kind(), NodeKind::And);
  EXPECT_EQ(f.children()[0].atom(), atomOf({{0, -1}}, 0));
  EXPECT_EQ(f.children()[1].atom(), atomOf({{1, -1}}, 0));
}

TEST(ToNnf, IdentityOnNnfInput) {
  Formula f = Formula::conjunction({Formula::atom(atomOf({{0, 1}}, 1)),
                                    Formula::disjunction({Formula::atom(atomOf({{1, 2}}, 3)),
                                                          Formula::atom(atomOf({{0, -1}}, 0))})});
  Symbols s;
  s.intern("x");
  s.intern("y");
  EXPECT_EQ(toString(toNnf(f), s), toString(f, s));
}

TEST(ToNnf, DoubleNegationAndConstants) {
  LinearAtom a = atomOf({{0, 1}}, 0);
  Formula f = toNnf(Formula::negation(Formula::negation(Formula::atom(a))));
  EXPECT_EQ(f.kind(), NodeKind::Atom);
  EXPECT_EQ(f.atom(), a);
  EXPECT_TRUE(toNnf(Formula::negation(Formula::constant(true))).isConst(false));
}

TEST(ToNnf, PreservesEvaluationFuzz) {
  fuzz::InstanceGen gen(23, {3, 6, 3, 8, 3});
  for (int i = 0; i < 150; ++i) {
    Formula f = gen.mixed();
    Formula g = toNnf(f);
    EXPECT_TRUE(negationFree(g));
    EXPECT_TRUE(sameOnBox(f, g, 3, 8)) << i;
  }
}

TEST(Normalize, PreservesEvaluationFuzz) {
  fuzz::InstanceGen gen(29);
  const RelOp ops[] = {RelOp::Eq, RelOp::Ne, RelOp::Lt, RelOp::Le, RelOp::Gt, RelOp::Ge};
  for (int i = 0; i < 150; ++i) {
    auto leaf = [&] {
      Term l = Term::ofConstant(gen.uniform(-4, 4));
      Term r = Term::ofConstant(gen.uniform(-4, 4));
      for (VarId v = 0; v < 3; ++v) {
        l += Term::ofVar(v).scale(gen.uniform(-2, 2));
        r += Term::ofVar(v).scale(gen.uniform(-2, 2));
      }
      return Formula::relation(ops[gen.uniform(0, 5)], l, r);
    };
    Formula f = gen.skeleton(3, leaf);
    Formula g = normalize(f);
    EXPECT_TRUE(sameOnBox(f, g, 3, 8)) << i;
  }
}

TEST(Evaluate, Examples) {
  Formula a = Formula::atom(atomOf({{0, 1}, {1, -1}}, 5));
  EXPECT_TRUE(evaluate(a, {{0, 7}, {1, 2}}));
  EXPECT_FALSE(evaluate(a, {{0, 7}, {1, 3}}));
  Formula c = Formula::conjunction({Formula::constant(true), Formula::atom(atomOf({{0, 1}}, 0))});
  EXPECT_TRUE(evaluate(c, {{0, 0}}));
}

TEST(Evaluate, UnboundVariableThrows) {
  Formula a = Formula::atom(atomOf({{0, 1}, {1, -1}}, 5));
  EXPECT_THROW(evaluate(a, {{0, 7}}), EvaluationError);
}

TEST(Evaluate, ApplicationsThrow) {
  Problem p = parseProblem("(declare-fun f (Int) Int)(declare-fun x () Int)(assert (>= (f x) 0))");
  EXPECT_THROW(evaluate(p.formula(), {{*p.symbols.find("x"), 0}}), EvaluationError);
}

TEST(Evaluate, SurfaceRelations) {
  Problem p = parseProblem("(declare-fun x () Int)(assert (=> (> x 2) (= (* 2 x) 8)))");
  EXPECT_TRUE(evaluate(p.formula(), {{0, 1}}));
  EXPECT_TRUE(evaluate(p.formula(), {{0, 4}}));
  EXPECT_FALSE(evaluate(p.formula(), {{0, 3}}));
}

TEST(Atom, RejectsZeroCoefficientAndGroundAtoms) {
  EXPECT_THROW(Formula::atom(atomOf({{0, 0}}, 1)), std::invalid_argument);
  EXPECT_THROW(Formula::atom(atomOf({}, 1)), std::invalid_argument);
}

TEST(Ackermann, TwoApplicationsOfOneFunction) {
  Problem p = parseProblem(
      "(declare-fun f (Int) Int)(declare-fun x () Int)(declare-fun y () Int)"
      "(assert (= (f x) (f y)))");
  std::size_t before = p.symbols.size();
  Formula g = ackermannize(p.formula(), p.symbols, p.functions);
  EXPECT_FALSE(hasApplications(g));
  ASSERT_EQ(p.symbols.size(), before + 2);
  VarId x = *p.symbols.find("x"), y = *p.symbols.find("y");
  VarId v1 = *p.symbols.find("f!1"), v2 = *p.symbols.find("f!2");
  // v1 = v2 and (x = y => v1 = v2)
  Formula expected = Formula::conjunction(
      {Formula::relation(RelOp::Eq, Term::ofVar(v1), Term::ofVar(v2)),
       Formula::implication(Formula::relation(RelOp::Eq, Term::ofVar(x), Term::ofVar(y)),
                            Formula::relation(RelOp::Eq, Term::ofVar(v1), Term::ofVar(v2)))});
  fuzz::forEachPoint(4, -2, 2, [&](const Model& m) {
    Model mm{{x, m.at(0)}, {y, m.at(1)}, {v1, m.at(2)}, {v2, m.at(3)}};
    ASSERT_EQ(evaluate(g, mm), evaluate(expected, mm));
  });
}

TEST(Ackermann, SingleApplicationHasNoCongruence) {
  Problem p = parseProblem("(declare-fun f (Int) Int)(declare-fun x () Int)(assert (>= (f x) x))");
  std::size_t before = p.symbols.size();
  Formula g = ackermannize(p.formula(), p.symbols, p.functions);
  EXPECT_EQ(p.symbols.size(), before + 1);
  Formula n = normalize(g);
  ASSERT_EQ(n.kind(), NodeKind::Atom);
  EXPECT_EQ(n.atom().width(), 2u);
}

TEST(Ackermann, IdenticalApplicationsShareOneVariable) {
  Problem p = parseProblem(
      "(declare-fun f (Int) Int)(declare-fun x () Int)(assert (distinct (f x) (f (+ 0 x))))");
  std::size_t before = p.symbols.size();
  Formula g = toNnf(normalize(ackermannize(p.formula(), p.symbols, p.functions)));
  EXPECT_EQ(p.symbols.size(), before + 1);
  EXPECT_TRUE(g.isConst(false));
}

TEST(Ackermann, CongruenceForcesUnsat) {
  Problem p = parseProblem(
      "(declare-fun f (Int Int) Int)(declare-fun x () Int)(declare-fun y () Int)"
      "(assert (and (= x (+ y 1)) (distinct (f x 2) (f (+ y 1) 2))))");
  Prepared prep = prepare(p, true);
  EXPECT_EQ(solvePrepared(prep, {}).verdict, Verdict::Unsat);
}

TEST(Ackermann, NestedApplications) {
  Problem p = parseProblem(
      "(declare-fun f (Int) Int)(declare-fun x () Int)(declare-fun y () Int)"
      "(assert (and (= x y) (distinct (f (f x)) (f (f y)))))");
  Formula g = ackermannize(p.formula(), p.symbols, p.functions);
  EXPECT_FALSE(hasApplications(g));
  EXPECT_EQ(solveFormula(toNnf(normalize(g)), {}).verdict, Verdict::Unsat);
}

TEST(Ackermann, ArityMismatchThrows) {
  Problem p;
  VarId x = p.symbols.intern("x");
  p.functions.push_back({"f", 2});
  Formula f = Formula::relation(RelOp::Ge, Term::ofApp(0, {Term::ofVar(x)}), Term::ofConstant(0));
  EXPECT_THROW(ackermannize(f, p.symbols, p.functions), ArityError);
}

TEST(Ackermann, FunctionFreeInputUnchanged) {
  Problem p = parseProblem("(declare-fun x () Int)(assert (>= x 1))");
  std::size_t before = p.symbols.size();
  Formula g = ackermannize(p.formula(), p.symbols, p.functions);
  EXPECT_EQ(p.symbols.size(), before);
  EXPECT_EQ(normalize(g).atom(), atomOf({{0, 1}}, 1));
}

TEST(CollectAtoms, DistinctInFirstOccurrenceOrder) {
  LinearAtom a = atomOf({{0, 1}}, 1), b = atomOf({{1, 1}}, 2);
  Formula f = Formula::conjunction(
      {Formula::atom(b), Formula::disjunction({Formula::atom(a), Formula::atom(b)})});
  auto atoms = collectAtoms(f);
  ASSERT_EQ(atoms.size(), 2u);
  EXPECT_EQ(atoms[0], b);
  EXPECT_EQ(atoms[1], a);
  EXPECT_EQ(collectVariables(f), (std::vector<VarId>{0, 1}));
}
