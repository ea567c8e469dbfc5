#pragma once

// Formula representation for quantifier-free Presburger arithmetic.
//
// Two layers share one node type. The surface layer, produced by the parser,
// carries relations {=, !=, <, <=, >, >=} between integer terms that may
// contain uninterpreted-function applications. The normalized layer contains
// only And/Or/Not/Const/Atom, where every atom reads  sum a_j x_j >= b.

#include "qfp/bigint.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace qfp {

using VarId = std::uint32_t;
using FunId = std::uint32_t;

/// Integer variable names. Ids are dense and assigned in interning order.
class Symbols {
 public:
  VarId intern(const std::string& name);
  /// Allocates a variable whose name does not collide with any existing one.
  VarId fresh(const std::string& prefix);
  std::optional<VarId> find(const std::string& name) const;
  const std::string& name(VarId id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, VarId> index_;
};

struct FunSymbol {
  std::string name;
  std::size_t arity = 0;
};

struct FunApp;

/// Linear integer term  sum c_j x_j + sum c_i f_i(...) + constant.
struct Term {
  std::map<VarId, BigInt> vars;
  std::vector<std::pair<BigInt, std::shared_ptr<const FunApp>>> apps;
  BigInt constant = 0;

  static Term ofConstant(BigInt c);
  static Term ofVar(VarId v);
  static Term ofApp(FunId fn, std::vector<Term> args);

  bool hasApps() const;
  bool isConstant() const { return vars.empty() && apps.empty(); }

  Term& operator+=(const Term& other);
  Term& scale(const BigInt& factor);
};

Term operator+(Term a, const Term& b);
Term operator-(Term a, const Term& b);

struct FunApp {
  FunId fn = 0;
  std::vector<Term> args;
};

/// One normalized constraint  sum a_j x_j >= bound.  No stored coefficient is
/// zero and at least one variable is present.
struct LinearAtom {
  std::map<VarId, BigInt> coeffs;
  BigInt bound = 0;

  std::size_t width() const { return coeffs.size(); }

  friend bool operator==(const LinearAtom&, const LinearAtom&) = default;
  friend bool operator<(const LinearAtom& a, const LinearAtom& b) {
    if (a.coeffs != b.coeffs) return a.coeffs < b.coeffs;
    return a.bound < b.bound;
  }
};

/// The atom satisfied by exactly the integer points violating `a`.
LinearAtom negateAtom(const LinearAtom& a);

enum class RelOp { Eq, Ne, Lt, Le, Gt, Ge };

enum class NodeKind { Const, Atom, Rel, Not, And, Or };

class Formula;

struct FormulaNode {
  NodeKind kind = NodeKind::Const;
  bool value = false;         // Const
  LinearAtom atom;            // Atom
  RelOp op = RelOp::Ge;       // Rel
  Term lhs, rhs;              // Rel
  std::vector<Formula> children;  // Not (one child), And, Or
};

/// Immutable formula handle with cheap copies.
class Formula {
 public:
  Formula();  // BoolConst(true)

  static Formula constant(bool value);
  static Formula atom(LinearAtom a);
  static Formula relation(RelOp op, Term lhs, Term rhs);
  static Formula negation(Formula f);
  static Formula conjunction(std::vector<Formula> children);
  static Formula disjunction(std::vector<Formula> children);
  static Formula implication(Formula premise, Formula conclusion);

  NodeKind kind() const { return node_->kind; }
  bool value() const { return node_->value; }
  const LinearAtom& atom() const { return node_->atom; }
  RelOp op() const { return node_->op; }
  const Term& lhs() const { return node_->lhs; }
  const Term& rhs() const { return node_->rhs; }
  const std::vector<Formula>& children() const { return node_->children; }

  bool isConst(bool v) const { return kind() == NodeKind::Const && value() == v; }

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const FormulaNode> node_;
};

using Model = std::map<VarId, BigInt>;

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rewrites every relation into >= atoms, folds ground atoms and boolean
/// constants. Precondition: no function applications remain.
Formula normalize(const Formula& f);

/// Pushes negations down to atoms and removes them with negateAtom.
/// Precondition: `f` is normalized.
Formula toNnf(const Formula& f);

/// Exact truth value. Works on surface (application-free) and normalized
/// formulas. Throws EvaluationError on unbound variables or applications.
bool evaluate(const Formula& f, const Model& m);
bool evaluate(const LinearAtom& a, const Model& m);
BigInt evaluate(const Term& t, const Model& m);

/// Variables occurring anywhere in the formula, ascending.
std::vector<VarId> collectVariables(const Formula& f);

/// Distinct atoms of a normalized formula in first-occurrence (DFS) order.
std::vector<LinearAtom> collectAtoms(const Formula& f);

bool hasApplications(const Formula& f);

/// Replaces atoms according to `rewrite` (atoms not in the map are kept).
Formula substituteAtoms(const Formula& f, const std::map<LinearAtom, LinearAtom>& rewrite);

std::string toString(const LinearAtom& a, const Symbols& syms);
std::string toString(const Formula& f, const Symbols& syms);

}  // namespace qfp
