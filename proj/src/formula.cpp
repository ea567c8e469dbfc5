#include "qfp/formula.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace qfp {

//===----------------------------------------------------------------------===//
// Symbols
//===----------------------------------------------------------------------===//

VarId Symbols::intern(const std::string& name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  auto id = static_cast<VarId>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  return id;
}

VarId Symbols::fresh(const std::string& prefix) {
  for (std::size_t k = 1;; ++k) {
    std::string candidate = prefix + "!" + std::to_string(k);
    if (!index_.contains(candidate)) return intern(candidate);
  }
}

std::optional<VarId> Symbols::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

//===----------------------------------------------------------------------===//
// Terms
//===----------------------------------------------------------------------===//

Term Term::ofConstant(BigInt c) {
  Term t;
  t.constant = std::move(c);
  return t;
}

Term Term::ofVar(VarId v) {
  Term t;
  t.vars.emplace(v, 1);
  return t;
}

Term Term::ofApp(FunId fn, std::vector<Term> args) {
  Term t;
  auto app = std::make_shared<FunApp>();
  app->fn = fn;
  app->args = std::move(args);
  t.apps.emplace_back(BigInt(1), std::move(app));
  return t;
}

bool Term::hasApps() const { return !apps.empty(); }

Term& Term::operator+=(const Term& other) {
  for (const auto& [v, c] : other.vars) {
    BigInt& slot = vars[v];
    slot += c;
    if (slot == 0) vars.erase(v);
  }
  apps.insert(apps.end(), other.apps.begin(), other.apps.end());
  constant += other.constant;
  return *this;
}

Term& Term::scale(const BigInt& factor) {
  if (factor == 0) {
    *this = Term::ofConstant(0);
    return *this;
  }
  for (auto& [v, c] : vars) c *= factor;
  for (auto& [c, app] : apps) c *= factor;
  constant *= factor;
  return *this;
}

Term operator+(Term a, const Term& b) {
  a += b;
  return a;
}

Term operator-(Term a, const Term& b) {
  Term nb = b;
  nb.scale(-1);
  a += nb;
  return a;
}

LinearAtom negateAtom(const LinearAtom& a) {
  LinearAtom out;
  for (const auto& [v, c] : a.coeffs) out.coeffs.emplace(v, -c);
  out.bound = -a.bound + 1;
  return out;
}

//===----------------------------------------------------------------------===//
// Formula construction
//===----------------------------------------------------------------------===//

Formula::Formula() : Formula(constant(true)) {}

Formula Formula::constant(bool value) {
  FormulaNode n;
  n.kind = NodeKind::Const;
  n.value = value;
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

Formula Formula::atom(LinearAtom a) {
  if (a.coeffs.empty()) throw std::invalid_argument("atom without variables");
  for (const auto& [v, c] : a.coeffs)
    if (c == 0) throw std::invalid_argument("atom with zero coefficient");
  FormulaNode n;
  n.kind = NodeKind::Atom;
  n.atom = std::move(a);
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

Formula Formula::relation(RelOp op, Term lhs, Term rhs) {
  FormulaNode n;
  n.kind = NodeKind::Rel;
  n.op = op;
  n.lhs = std::move(lhs);
  n.rhs = std::move(rhs);
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

Formula Formula::negation(Formula f) {
  FormulaNode n;
  n.kind = NodeKind::Not;
  n.children.push_back(std::move(f));
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

Formula Formula::conjunction(std::vector<Formula> children) {
  FormulaNode n;
  n.kind = NodeKind::And;
  n.children = std::move(children);
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

Formula Formula::disjunction(std::vector<Formula> children) {
  FormulaNode n;
  n.kind = NodeKind::Or;
  n.children = std::move(children);
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

Formula Formula::implication(Formula premise, Formula conclusion) {
  return disjunction({negation(std::move(premise)), std::move(conclusion)});
}

//===----------------------------------------------------------------------===//
// Normalization
//===----------------------------------------------------------------------===//

namespace {

// Folds constants and flattens nested nodes of the same connective.
Formula foldJunction(NodeKind kind, std::vector<Formula> parts) {
  const bool absorbing = kind == NodeKind::Or;
  std::vector<Formula> kept;
  for (auto& p : parts) {
    if (p.kind() == NodeKind::Const) {
      if (p.value() == absorbing) return Formula::constant(absorbing);
      continue;
    }
    if (p.kind() == kind) {
      for (const auto& c : p.children()) kept.push_back(c);
      continue;
    }
    kept.push_back(std::move(p));
  }
  if (kept.empty()) return Formula::constant(!absorbing);
  if (kept.size() == 1) return kept.front();
  return kind == NodeKind::And ? Formula::conjunction(std::move(kept))
                               : Formula::disjunction(std::move(kept));
}

// sum coeffs + rhsConstant  >=  0   as an atom or a folded constant.
Formula geqZero(const std::map<VarId, BigInt>& coeffs, const BigInt& constant) {
  if (coeffs.empty()) return Formula::constant(constant >= 0);
  LinearAtom a;
  a.coeffs = coeffs;
  a.bound = -constant;
  return Formula::atom(std::move(a));
}

Formula normalizeRelation(const Formula& f) {
  if (f.lhs().hasApps() || f.rhs().hasApps())
    throw std::invalid_argument("normalize: function application present");
  // e = lhs - rhs, relation e ~ 0.
  Term e = f.lhs() - f.rhs();
  std::map<VarId, BigInt> neg;
  for (const auto& [v, c] : e.vars) neg.emplace(v, -c);
  const BigInt& c = e.constant;
  switch (f.op()) {
    case RelOp::Ge:  // e >= 0
      return geqZero(e.vars, c);
    case RelOp::Gt:  // e >= 1
      return geqZero(e.vars, c - 1);
    case RelOp::Le:  // -e >= 0
      return geqZero(neg, -c);
    case RelOp::Lt:  // -e >= 1
      return geqZero(neg, -c - 1);
    case RelOp::Eq:
      return foldJunction(NodeKind::And, {geqZero(e.vars, c), geqZero(neg, -c)});
    case RelOp::Ne:
      return foldJunction(NodeKind::Or, {geqZero(e.vars, c - 1), geqZero(neg, -c - 1)});
  }
  throw std::logic_error("unknown relation");
}

}  // namespace

Formula normalize(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::Const:
    case NodeKind::Atom:
      return f;
    case NodeKind::Rel:
      return normalizeRelation(f);
    case NodeKind::Not: {
      Formula inner = normalize(f.children().front());
      if (inner.kind() == NodeKind::Const) return Formula::constant(!inner.value());
      return Formula::negation(std::move(inner));
    }
    case NodeKind::And:
    case NodeKind::Or: {
      std::vector<Formula> parts;
      parts.reserve(f.children().size());
      for (const auto& c : f.children()) parts.push_back(normalize(c));
      return foldJunction(f.kind(), std::move(parts));
    }
  }
  throw std::logic_error("unknown node");
}

namespace {

Formula nnf(const Formula& f, bool negated) {
  switch (f.kind()) {
    case NodeKind::Const:
      return Formula::constant(f.value() != negated);
    case NodeKind::Atom:
      return negated ? Formula::atom(negateAtom(f.atom())) : f;
    case NodeKind::Rel:
      throw std::invalid_argument("toNnf: formula is not normalized");
    case NodeKind::Not:
      return nnf(f.children().front(), !negated);
    case NodeKind::And:
    case NodeKind::Or: {
      NodeKind kind = f.kind();
      if (negated) kind = kind == NodeKind::And ? NodeKind::Or : NodeKind::And;
      std::vector<Formula> parts;
      parts.reserve(f.children().size());
      for (const auto& c : f.children()) parts.push_back(nnf(c, negated));
      return foldJunction(kind, std::move(parts));
    }
  }
  throw std::logic_error("unknown node");
}

}  // namespace

Formula toNnf(const Formula& f) { return nnf(f, false); }

//===----------------------------------------------------------------------===//
// Evaluation
//===----------------------------------------------------------------------===//

namespace {

const BigInt& lookup(const Model& m, VarId v) {
  auto it = m.find(v);
  if (it == m.end()) throw EvaluationError("unbound variable v" + std::to_string(v));
  return it->second;
}

}  // namespace

BigInt evaluate(const Term& t, const Model& m) {
  if (t.hasApps()) throw EvaluationError("cannot evaluate uninterpreted function application");
  BigInt sum = t.constant;
  for (const auto& [v, c] : t.vars) sum += c * lookup(m, v);
  return sum;
}

bool evaluate(const LinearAtom& a, const Model& m) {
  BigInt sum = 0;
  for (const auto& [v, c] : a.coeffs) sum += c * lookup(m, v);
  return sum >= a.bound;
}

bool evaluate(const Formula& f, const Model& m) {
  switch (f.kind()) {
    case NodeKind::Const:
      return f.value();
    case NodeKind::Atom:
      return evaluate(f.atom(), m);
    case NodeKind::Rel: {
      BigInt l = evaluate(f.lhs(), m);
      BigInt r = evaluate(f.rhs(), m);
      switch (f.op()) {
        case RelOp::Eq: return l == r;
        case RelOp::Ne: return l != r;
        case RelOp::Lt: return l < r;
        case RelOp::Le: return l <= r;
        case RelOp::Gt: return l > r;
        case RelOp::Ge: return l >= r;
      }
      throw std::logic_error("unknown relation");
    }
    case NodeKind::Not:
      return !evaluate(f.children().front(), m);
    case NodeKind::And:
      for (const auto& c : f.children())
        if (!evaluate(c, m)) return false;
      return true;
    case NodeKind::Or:
      for (const auto& c : f.children())
        if (evaluate(c, m)) return true;
      return false;
  }
  throw std::logic_error("unknown node");
}

//===----------------------------------------------------------------------===//
// Traversals
//===----------------------------------------------------------------------===//

namespace {

void termVariables(const Term& t, std::set<VarId>& out) {
  for (const auto& [v, c] : t.vars) out.insert(v);
  for (const auto& [c, app] : t.apps)
    for (const auto& arg : app->args) termVariables(arg, out);
}

void variables(const Formula& f, std::set<VarId>& out) {
  switch (f.kind()) {
    case NodeKind::Const:
      return;
    case NodeKind::Atom:
      for (const auto& [v, c] : f.atom().coeffs) out.insert(v);
      return;
    case NodeKind::Rel:
      termVariables(f.lhs(), out);
      termVariables(f.rhs(), out);
      return;
    default:
      for (const auto& c : f.children()) variables(c, out);
  }
}

void atoms(const Formula& f, std::set<LinearAtom>& seen, std::vector<LinearAtom>& out) {
  if (f.kind() == NodeKind::Atom) {
    if (seen.insert(f.atom()).second) out.push_back(f.atom());
    return;
  }
  for (const auto& c : f.children()) atoms(c, seen, out);
}

}  // namespace

std::vector<VarId> collectVariables(const Formula& f) {
  std::set<VarId> vars;
  variables(f, vars);
  return {vars.begin(), vars.end()};
}

std::vector<LinearAtom> collectAtoms(const Formula& f) {
  std::set<LinearAtom> seen;
  std::vector<LinearAtom> out;
  atoms(f, seen, out);
  return out;
}

bool hasApplications(const Formula& f) {
  if (f.kind() == NodeKind::Rel) return f.lhs().hasApps() || f.rhs().hasApps();
  for (const auto& c : f.children())
    if (hasApplications(c)) return true;
  return false;
}

Formula substituteAtoms(const Formula& f, const std::map<LinearAtom, LinearAtom>& rewrite) {
  switch (f.kind()) {
    case NodeKind::Atom: {
      auto it = rewrite.find(f.atom());
      return it == rewrite.end() ? f : Formula::atom(it->second);
    }
    case NodeKind::Const:
    case NodeKind::Rel:
      return f;
    case NodeKind::Not:
      return Formula::negation(substituteAtoms(f.children().front(), rewrite));
    case NodeKind::And:
    case NodeKind::Or: {
      std::vector<Formula> parts;
      for (const auto& c : f.children()) parts.push_back(substituteAtoms(c, rewrite));
      return f.kind() == NodeKind::And ? Formula::conjunction(std::move(parts))
                                       : Formula::disjunction(std::move(parts));
    }
  }
  throw std::logic_error("unknown node");
}

//===----------------------------------------------------------------------===//
// Printing
//===----------------------------------------------------------------------===//

namespace {

void printLinear(std::ostream& os, const std::map<VarId, BigInt>& coeffs, const Symbols& syms) {
  bool first = true;
  for (const auto& [v, c] : coeffs) {
    if (c < 0)
      os << (first ? "-" : " - ");
    else if (!first)
      os << " + ";
    BigInt mag = absValue(c);
    if (mag != 1) os << mag << "*";
    os << (v < syms.size() ? syms.name(v) : "v" + std::to_string(v));
    first = false;
  }
  if (first) os << "0";
}

void printTerm(std::ostream& os, const Term& t, const Symbols& syms) {
  printLinear(os, t.vars, syms);
  for (const auto& [c, app] : t.apps) {
    os << " + " << c << "*@" << app->fn << "(";
    for (std::size_t i = 0; i < app->args.size(); ++i) {
      if (i) os << ", ";
      printTerm(os, app->args[i], syms);
    }
    os << ")";
  }
  if (t.constant != 0) os << " + " << t.constant;
}

const char* relName(RelOp op) {
  switch (op) {
    case RelOp::Eq: return "=";
    case RelOp::Ne: return "!=";
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Gt: return ">";
    case RelOp::Ge: return ">=";
  }
  return "?";
}

void print(std::ostream& os, const Formula& f, const Symbols& syms) {
  switch (f.kind()) {
    case NodeKind::Const:
      os << (f.value() ? "true" : "false");
      return;
    case NodeKind::Atom:
      os << toString(f.atom(), syms);
      return;
    case NodeKind::Rel:
      printTerm(os, f.lhs(), syms);
      os << " " << relName(f.op()) << " ";
      printTerm(os, f.rhs(), syms);
      return;
    case NodeKind::Not:
      os << "!(";
      print(os, f.children().front(), syms);
      os << ")";
      return;
    case NodeKind::And:
    case NodeKind::Or: {
      const char* sep = f.kind() == NodeKind::And ? " & " : " | ";
      os << "(";
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) os << sep;
        print(os, f.children()[i], syms);
      }
      os << ")";
      return;
    }
  }
}

}  // namespace

std::string toString(const LinearAtom& a, const Symbols& syms) {
  std::ostringstream os;
  printLinear(os, a.coeffs, syms);
  os << " >= " << a.bound;
  return os.str();
}

std::string toString(const Formula& f, const Symbols& syms) {
  std::ostringstream os;
  print(os, f, syms);
  return os.str();
}

}  // namespace qfp
