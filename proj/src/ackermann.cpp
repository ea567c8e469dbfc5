#include "qfp/ackermann.hpp"

#include <map>
#include <sstream>

namespace qfp {

namespace {

struct Instance {
  std::vector<Term> args;
  VarId var;
};

class Ackermannizer {
 public:
  Ackermannizer(Symbols& symbols, const std::vector<FunSymbol>& functions)
      : symbols_(symbols), functions_(functions) {}

  Formula rewrite(const Formula& f) {
    switch (f.kind()) {
      case NodeKind::Const:
      case NodeKind::Atom:
        return f;
      case NodeKind::Rel:
        return Formula::relation(f.op(), rewrite(f.lhs()), rewrite(f.rhs()));
      case NodeKind::Not:
        return Formula::negation(rewrite(f.children().front()));
      case NodeKind::And:
      case NodeKind::Or: {
        std::vector<Formula> parts;
        for (const auto& c : f.children()) parts.push_back(rewrite(c));
        return f.kind() == NodeKind::And ? Formula::conjunction(std::move(parts))
                                         : Formula::disjunction(std::move(parts));
      }
    }
    throw std::logic_error("unknown node");
  }

  std::vector<Formula> congruences() const {
    std::vector<Formula> out;
    for (const auto& [fn, instances] : instances_) {
      for (std::size_t i = 0; i < instances.size(); ++i) {
        for (std::size_t j = i + 1; j < instances.size(); ++j) {
          const Instance& a = instances[i];
          const Instance& b = instances[j];
          std::vector<Formula> equalities;
          for (std::size_t p = 0; p < a.args.size(); ++p)
            equalities.push_back(Formula::relation(RelOp::Eq, a.args[p], b.args[p]));
          Formula premise = equalities.size() == 1 ? equalities.front()
                                                   : Formula::conjunction(std::move(equalities));
          out.push_back(Formula::implication(
              std::move(premise),
              Formula::relation(RelOp::Eq, Term::ofVar(a.var), Term::ofVar(b.var))));
        }
      }
    }
    return out;
  }

 private:
  static std::string key(FunId fn, const std::vector<Term>& args) {
    std::ostringstream os;
    os << fn << "(";
    for (const auto& t : args) {
      for (const auto& [v, c] : t.vars) os << c << "*" << v << "+";
      os << t.constant << ",";
    }
    os << ")";
    return os.str();
  }

  Term rewrite(const Term& t) {
    Term out;
    out.vars = t.vars;
    out.constant = t.constant;
    for (const auto& [coeff, app] : t.apps) {
      if (app->fn >= functions_.size()) throw ArityError("unknown function symbol");
      const FunSymbol& sym = functions_[app->fn];
      if (app->args.size() != sym.arity)
        throw ArityError("arity mismatch for " + sym.name + ": expected " +
                         std::to_string(sym.arity) + ", got " + std::to_string(app->args.size()));
      std::vector<Term> args;
      for (const auto& a : app->args) args.push_back(rewrite(a));
      VarId var = applicationVar(app->fn, std::move(args));
      Term piece = Term::ofVar(var);
      out += piece.scale(coeff);
    }
    return out;
  }

  VarId applicationVar(FunId fn, std::vector<Term> args) {
    std::string k = key(fn, args);
    auto it = byKey_.find(k);
    if (it != byKey_.end()) return it->second;
    VarId var = symbols_.fresh(functions_[fn].name);
    byKey_.emplace(std::move(k), var);
    instances_[fn].push_back({std::move(args), var});
    return var;
  }

  Symbols& symbols_;
  const std::vector<FunSymbol>& functions_;
  std::map<std::string, VarId> byKey_;
  std::map<FunId, std::vector<Instance>> instances_;
};

}  // namespace

Formula ackermannize(const Formula& f, Symbols& symbols, const std::vector<FunSymbol>& functions) {
  Ackermannizer ack(symbols, functions);
  Formula body = ack.rewrite(f);
  std::vector<Formula> congruences = ack.congruences();
  if (congruences.empty()) return body;
  std::vector<Formula> parts{std::move(body)};
  for (auto& c : congruences) parts.push_back(std::move(c));
  return Formula::conjunction(std::move(parts));
}

}  // namespace qfp
