#pragma once

#include "qfp/formula.hpp"

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfp {

enum class ParseErrorKind { Syntax, Sort, Nonlinear, Arity, Undeclared };

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, int line, int column, const std::string& message);

  ParseErrorKind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  ParseErrorKind kind_;
  int line_;
  int column_;
};

/// A parsed SMT-LIB script: declarations plus the conjunction of assertions.
struct Problem {
  std::string logic;
  Symbols symbols;
  std::vector<VarId> declared;  // user-declared 0-ary Int symbols, in order
  std::vector<FunSymbol> functions;
  std::vector<Formula> assertions;

  Formula formula() const;
};

/// Parses the QF_LIA / QF_UFLIA subset: set-logic, set-info, set-option,
/// declare-fun, declare-const, assert, check-sat, get-model, exit.
Problem parseProblem(std::istream& in);
Problem parseProblem(const std::string& text);
Problem parseFile(const std::string& path);

}  // namespace qfp
