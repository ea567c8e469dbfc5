#include "qfp/parser.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace qfp {

ParseError::ParseError(ParseErrorKind kind, int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      kind_(kind),
      line_(line),
      column_(column) {}

Formula Problem::formula() const {
  if (assertions.size() == 1) return assertions.front();
  return Formula::conjunction(assertions);
}

namespace {

struct SExpr {
  bool isAtom = true;
  std::string text;
  std::vector<SExpr> items;
  int line = 0;
  int column = 0;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Returns false at end of input.
  bool next(SExpr& out) {
    skipBlanks();
    if (in_.peek() == EOF) return false;
    out = read();
    return true;
  }

 private:
  int get() {
    int c = in_.get();
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else if (c != EOF) {
      ++column_;
    }
    return c;
  }

  void skipBlanks() {
    for (;;) {
      int c = in_.peek();
      if (c == ';') {
        while (in_.peek() != '\n' && in_.peek() != EOF) get();
      } else if (c != EOF && std::isspace(c)) {
        get();
      } else {
        return;
      }
    }
  }

  SExpr read() {
    skipBlanks();
    SExpr e;
    e.line = line_;
    e.column = column_;
    int c = in_.peek();
    if (c == EOF) throw ParseError(ParseErrorKind::Syntax, line_, column_, "unexpected end of input");
    if (c == ')') throw ParseError(ParseErrorKind::Syntax, line_, column_, "unexpected ')'");
    if (c == '(') {
      get();
      e.isAtom = false;
      for (;;) {
        skipBlanks();
        int p = in_.peek();
        if (p == EOF)
          throw ParseError(ParseErrorKind::Syntax, e.line, e.column, "unbalanced '('");
        if (p == ')') {
          get();
          return e;
        }
        e.items.push_back(read());
      }
    }
    if (c == '|') {
      get();
      while (in_.peek() != '|') {
        if (in_.peek() == EOF)
          throw ParseError(ParseErrorKind::Syntax, e.line, e.column, "unterminated quoted symbol");
        e.text.push_back(static_cast<char>(get()));
      }
      get();
      return e;
    }
    if (c == '"') {
      get();
      e.text.push_back('"');
      while (in_.peek() != '"') {
        if (in_.peek() == EOF)
          throw ParseError(ParseErrorKind::Syntax, e.line, e.column, "unterminated string");
        e.text.push_back(static_cast<char>(get()));
      }
      get();
      e.text.push_back('"');
      return e;
    }
    while (in_.peek() != EOF && !std::isspace(in_.peek()) && in_.peek() != '(' &&
           in_.peek() != ')' && in_.peek() != ';')
      e.text.push_back(static_cast<char>(get()));
    return e;
  }

  std::istream& in_;
  int line_ = 1;
  int column_ = 1;
};

bool isNumeral(const std::string& s) {
  std::size_t start = (!s.empty() && s[0] == '-') ? 1 : 0;
  if (s.size() == start) return false;
  for (std::size_t i = start; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

[[noreturn]] void fail(ParseErrorKind kind, const SExpr& at, const std::string& msg) {
  throw ParseError(kind, at.line, at.column, msg);
}

class ScriptParser {
 public:
  Problem run(std::istream& in) {
    Reader reader(in);
    SExpr cmd;
    while (reader.next(cmd)) command(cmd);
    return std::move(problem_);
  }

 private:
  void command(const SExpr& cmd) {
    if (cmd.isAtom || cmd.items.empty() || !cmd.items[0].isAtom)
      fail(ParseErrorKind::Syntax, cmd, "expected a command");
    const std::string& head = cmd.items[0].text;
    if (head == "set-logic") {
      expectArity(cmd, 2);
      problem_.logic = cmd.items[1].text;
      if (problem_.logic != "QF_LIA" && problem_.logic != "QF_UFLIA" && problem_.logic != "QF_IDL" &&
          problem_.logic != "ALL")
        fail(ParseErrorKind::Syntax, cmd.items[1], "unsupported logic " + problem_.logic);
    } else if (head == "set-info" || head == "set-option" || head == "check-sat" ||
               head == "get-model" || head == "exit") {
      return;
    } else if (head == "declare-fun") {
      expectArity(cmd, 4);
      const SExpr& args = cmd.items[2];
      if (args.isAtom) fail(ParseErrorKind::Syntax, args, "expected argument sort list");
      for (const auto& s : args.items) expectIntSort(s);
      expectIntSort(cmd.items[3]);
      declare(cmd.items[1], args.items.size());
    } else if (head == "declare-const") {
      expectArity(cmd, 3);
      expectIntSort(cmd.items[2]);
      declare(cmd.items[1], 0);
    } else if (head == "assert") {
      expectArity(cmd, 2);
      problem_.assertions.push_back(formula(cmd.items[1]));
    } else {
      fail(ParseErrorKind::Syntax, cmd.items[0], "unsupported command " + head);
    }
  }

  void expectArity(const SExpr& cmd, std::size_t n) {
    if (cmd.items.size() != n)
      fail(ParseErrorKind::Syntax, cmd, "wrong number of arguments to " + cmd.items[0].text);
  }

  void expectIntSort(const SExpr& s) {
    if (!s.isAtom || s.text != "Int")
      fail(ParseErrorKind::Sort, s, "only sort Int is supported");
  }

  void declare(const SExpr& nameExpr, std::size_t arity) {
    if (!nameExpr.isAtom || nameExpr.text.empty())
      fail(ParseErrorKind::Syntax, nameExpr, "expected a symbol");
    const std::string& name = nameExpr.text;
    if (functions_.contains(name) || problem_.symbols.find(name))
      fail(ParseErrorKind::Syntax, nameExpr, "redeclaration of " + name);
    if (arity == 0) {
      problem_.declared.push_back(problem_.symbols.intern(name));
    } else {
      functions_.emplace(name, static_cast<FunId>(problem_.functions.size()));
      problem_.functions.push_back({name, arity});
    }
  }

  static bool isArithmetic(const std::string& h) {
    return h == "+" || h == "-" || h == "*";
  }

  Term term(const SExpr& e) {
    if (e.isAtom) {
      if (isNumeral(e.text)) return Term::ofConstant(BigInt(e.text));
      if (e.text == "true" || e.text == "false")
        fail(ParseErrorKind::Sort, e, "expected an Int term, found Bool");
      auto v = problem_.symbols.find(e.text);
      if (!v) {
        if (functions_.contains(e.text))
          fail(ParseErrorKind::Arity, e, "function " + e.text + " used without arguments");
        fail(ParseErrorKind::Undeclared, e, "undeclared symbol " + e.text);
      }
      return Term::ofVar(*v);
    }
    if (e.items.empty() || !e.items[0].isAtom) fail(ParseErrorKind::Syntax, e, "malformed term");
    const std::string& head = e.items[0].text;
    const std::size_t argc = e.items.size() - 1;
    if (head == "+") {
      Term sum;
      for (std::size_t i = 1; i < e.items.size(); ++i) sum += term(e.items[i]);
      return sum;
    }
    if (head == "-") {
      if (argc == 0) fail(ParseErrorKind::Syntax, e, "'-' needs arguments");
      Term t = term(e.items[1]);
      if (argc == 1) return t.scale(-1);
      for (std::size_t i = 2; i < e.items.size(); ++i) t = t - term(e.items[i]);
      return t;
    }
    if (head == "*") {
      if (argc == 0) fail(ParseErrorKind::Syntax, e, "'*' needs arguments");
      BigInt factor = 1;
      std::optional<Term> symbolic;
      for (std::size_t i = 1; i < e.items.size(); ++i) {
        Term t = term(e.items[i]);
        if (t.isConstant()) {
          factor *= t.constant;
        } else if (symbolic) {
          fail(ParseErrorKind::Nonlinear, e, "nonlinear multiplication");
        } else {
          symbolic = std::move(t);
        }
      }
      Term result = symbolic ? std::move(*symbolic) : Term::ofConstant(1);
      return result.scale(factor);
    }
    auto fn = functions_.find(head);
    if (fn != functions_.end()) {
      const FunSymbol& sym = problem_.functions[fn->second];
      if (argc != sym.arity)
        fail(ParseErrorKind::Arity, e, "function " + head + " expects " +
                                           std::to_string(sym.arity) + " arguments");
      std::vector<Term> args;
      for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(term(e.items[i]));
      return Term::ofApp(fn->second, std::move(args));
    }
    if (isRelation(head) || isConnective(head))
      fail(ParseErrorKind::Sort, e, "expected an Int term, found Bool");
    fail(ParseErrorKind::Undeclared, e.items[0], "unknown function " + head);
  }

  static bool isRelation(const std::string& h) {
    return h == "=" || h == "distinct" || h == "<" || h == "<=" || h == ">" || h == ">=";
  }

  static bool isConnective(const std::string& h) {
    return h == "and" || h == "or" || h == "not" || h == "=>";
  }

  Formula formula(const SExpr& e) {
    if (e.isAtom) {
      if (e.text == "true") return Formula::constant(true);
      if (e.text == "false") return Formula::constant(false);
      term(e);  // reports undeclared symbols precisely
      fail(ParseErrorKind::Sort, e, "expected a Bool formula, found Int");
    }
    if (e.items.empty() || !e.items[0].isAtom) fail(ParseErrorKind::Syntax, e, "malformed formula");
    const std::string& head = e.items[0].text;
    const std::size_t argc = e.items.size() - 1;
    if (head == "and" || head == "or") {
      std::vector<Formula> parts;
      for (std::size_t i = 1; i < e.items.size(); ++i) parts.push_back(formula(e.items[i]));
      if (parts.empty()) return Formula::constant(head == "and");
      return head == "and" ? Formula::conjunction(std::move(parts))
                           : Formula::disjunction(std::move(parts));
    }
    if (head == "not") {
      if (argc != 1) fail(ParseErrorKind::Syntax, e, "'not' takes one argument");
      return Formula::negation(formula(e.items[1]));
    }
    if (head == "=>") {
      if (argc < 2) fail(ParseErrorKind::Syntax, e, "'=>' takes at least two arguments");
      // right associative
      Formula result = formula(e.items.back());
      for (std::size_t i = e.items.size() - 2; i >= 1; --i)
        result = Formula::implication(formula(e.items[i]), std::move(result));
      return result;
    }
    if (isRelation(head)) {
      if (argc < 2) fail(ParseErrorKind::Syntax, e, "'" + head + "' takes at least two arguments");
      std::vector<Term> args;
      for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(term(e.items[i]));
      std::vector<Formula> parts;
      if (head == "distinct") {
        for (std::size_t i = 0; i < args.size(); ++i)
          for (std::size_t j = i + 1; j < args.size(); ++j)
            parts.push_back(Formula::relation(RelOp::Ne, args[i], args[j]));
      } else {
        RelOp op = head == "=" ? RelOp::Eq
                   : head == "<" ? RelOp::Lt
                   : head == "<=" ? RelOp::Le
                   : head == ">" ? RelOp::Gt
                                 : RelOp::Ge;
        for (std::size_t i = 0; i + 1 < args.size(); ++i)
          parts.push_back(Formula::relation(op, args[i], args[i + 1]));
      }
      if (parts.size() == 1) return parts.front();
      return Formula::conjunction(std::move(parts));
    }
    if (isArithmetic(head) || functions_.contains(head)) {
      term(e);  // nonlinearity and arity errors take precedence
      fail(ParseErrorKind::Sort, e, "expected a Bool formula, found Int");
    }
    fail(ParseErrorKind::Syntax, e.items[0], "unsupported operator " + head);
  }

  Problem problem_;
  std::unordered_map<std::string, FunId> functions_;
};

}  // namespace

Problem parseProblem(std::istream& in) { return ScriptParser().run(in); }

Problem parseProblem(const std::string& text) {
  std::istringstream in(text);
  return parseProblem(in);
}

Problem parseFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parseProblem(in);
}

}  // namespace qfp
