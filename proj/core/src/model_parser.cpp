#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "ctmdp/errors.hpp"
#include "ctmdp/formats.hpp"

namespace ctmdp {
namespace {

enum class Tok {
  End, Ident, Number, String,
  LBracket, RBracket, LParen, RParen, Semi, Colon, Comma, Arrow, Prime,
  Eq, Neq, Lt, Le, Gt, Ge, Plus, Minus, Star, Slash, And, Or, Not, Implies, Question, DotDot,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  bool integral = false;
  std::size_t line = 0;
  std::size_t column = 0;
};

class Lexer {
 public:
  Lexer(const std::string& text, const std::string& origin) : text_(text), origin_(origin) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      const char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
          advance();
        }
        t.kind = Tok::Ident;
        t.text = text_.substr(start, pos_ - start);
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && peek(1) != '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
        lex_number(t);
      } else if (c == '"') {
        advance();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != '"' && text_[pos_] != '\n') advance();
        if (pos_ >= text_.size() || text_[pos_] != '"') fail(t, "unterminated string");
        t.kind = Tok::String;
        t.text = text_.substr(start, pos_ - start);
        advance();
      } else {
        lex_symbol(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char peek(std::size_t k) const { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#' || (c == '/' && peek(1) == '/')) {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  void lex_number(Token& t) {
    const std::size_t start = pos_;
    bool integral = true;
    while (std::isdigit(static_cast<unsigned char>(peek(0)))) advance();
    if (peek(0) == '.' && peek(1) != '.') {
      integral = false;
      advance();
      while (std::isdigit(static_cast<unsigned char>(peek(0)))) advance();
    }
    if (peek(0) == 'e' || peek(0) == 'E') {
      const std::size_t save = pos_, save_col = col_;
      advance();
      if (peek(0) == '+' || peek(0) == '-') advance();
      if (std::isdigit(static_cast<unsigned char>(peek(0)))) {
        integral = false;
        while (std::isdigit(static_cast<unsigned char>(peek(0)))) advance();
      } else {
        pos_ = save;
        col_ = save_col;
      }
    }
    t.kind = Tok::Number;
    t.text = text_.substr(start, pos_ - start);
    t.number = std::strtod(t.text.c_str(), nullptr);
    t.integral = integral;
  }

  void lex_symbol(Token& t) {
    const char c = text_[pos_];
    const char n = peek(1);
    auto two = [&](Tok k, const char* s) {
      t.kind = k;
      t.text = s;
      advance();
      advance();
    };
    auto one = [&](Tok k) {
      t.kind = k;
      t.text = std::string(1, c);
      advance();
    };
    if (c == '-' && n == '>') return two(Tok::Arrow, "->");
    if (c == '=' && n == '>') return two(Tok::Implies, "=>");
    if (c == '!' && n == '=') return two(Tok::Neq, "!=");
    if (c == '<' && n == '=') return two(Tok::Le, "<=");
    if (c == '>' && n == '=') return two(Tok::Ge, ">=");
    if (c == '.' && n == '.') return two(Tok::DotDot, "..");
    switch (c) {
      case '[': return one(Tok::LBracket);
      case ']': return one(Tok::RBracket);
      case '(': return one(Tok::LParen);
      case ')': return one(Tok::RParen);
      case ';': return one(Tok::Semi);
      case ':': return one(Tok::Colon);
      case ',': return one(Tok::Comma);
      case '\'': return one(Tok::Prime);
      case '=': return one(Tok::Eq);
      case '<': return one(Tok::Lt);
      case '>': return one(Tok::Gt);
      case '+': return one(Tok::Plus);
      case '-': return one(Tok::Minus);
      case '*': return one(Tok::Star);
      case '/': return one(Tok::Slash);
      case '&': return one(Tok::And);
      case '|': return one(Tok::Or);
      case '!': return one(Tok::Not);
      case '?': return one(Tok::Question);
      default: break;
    }
    fail(t, std::string("unexpected character '") + c + "'");
  }

  [[noreturn]] void fail(const Token& at, const std::string& msg) const {
    throw ParseError(origin_, at.line, at.column, msg);
  }

  const std::string& text_;
  const std::string& origin_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

enum class Type { Int, Double, Bool };

const char* type_name(Type t) {
  switch (t) {
    case Type::Int: return "int";
    case Type::Double: return "double";
    case Type::Bool: return "bool";
  }
  return "?";
}

enum class Op {
  Lit, Var, Neg, Not, Add, Sub, Mul, Div, And, Or, Implies,
  Eq, Neq, Lt, Le, Gt, Ge, Ite, Min, Max, Floor, Ceil, Pow, Mod,
};

struct Node {
  Op op = Op::Lit;
  Type type = Type::Int;
  double value = 0.0;
  std::size_t var = 0;
  std::vector<int> args;
};

// Expression pool; evaluation works on a valuation of integer-coded variables.
struct Pool {
  std::vector<Node> nodes;

  int add(Node n) {
    nodes.push_back(std::move(n));
    return static_cast<int>(nodes.size() - 1);
  }

  double eval(int id, const std::vector<int>& vals) const {
    const Node& n = nodes[static_cast<std::size_t>(id)];
    auto a = [&](std::size_t i) { return eval(n.args[i], vals); };
    switch (n.op) {
      case Op::Lit: return n.value;
      case Op::Var: return vals[n.var];
      case Op::Neg: return -a(0);
      case Op::Not: return a(0) != 0.0 ? 0.0 : 1.0;
      case Op::Add: return a(0) + a(1);
      case Op::Sub: return a(0) - a(1);
      case Op::Mul: return a(0) * a(1);
      case Op::Div: return a(0) / a(1);
      case Op::And: return (a(0) != 0.0 && a(1) != 0.0) ? 1.0 : 0.0;
      case Op::Or: return (a(0) != 0.0 || a(1) != 0.0) ? 1.0 : 0.0;
      case Op::Implies: return (a(0) == 0.0 || a(1) != 0.0) ? 1.0 : 0.0;
      case Op::Eq: return a(0) == a(1) ? 1.0 : 0.0;
      case Op::Neq: return a(0) != a(1) ? 1.0 : 0.0;
      case Op::Lt: return a(0) < a(1) ? 1.0 : 0.0;
      case Op::Le: return a(0) <= a(1) ? 1.0 : 0.0;
      case Op::Gt: return a(0) > a(1) ? 1.0 : 0.0;
      case Op::Ge: return a(0) >= a(1) ? 1.0 : 0.0;
      case Op::Ite: return a(0) != 0.0 ? a(1) : a(2);
      case Op::Min: {
        double v = a(0);
        for (std::size_t i = 1; i < n.args.size(); ++i) v = std::min(v, a(i));
        return v;
      }
      case Op::Max: {
        double v = a(0);
        for (std::size_t i = 1; i < n.args.size(); ++i) v = std::max(v, a(i));
        return v;
      }
      case Op::Floor: return std::floor(a(0));
      case Op::Ceil: return std::ceil(a(0));
      case Op::Pow: return std::pow(a(0), a(1));
      case Op::Mod: {
        const double x = a(0), y = a(1);
        return y == 0.0 ? std::nan("") : x - y * std::floor(x / y);
      }
    }
    return 0.0;
  }
};

struct Variable {
  std::string name;
  int lo = 0;
  int hi = 0;
  int init = 0;
  bool is_bool = false;
};

struct Update {
  int rate = -1;  // expression id
  std::vector<std::pair<std::size_t, int>> assignments;  // variable, expression
};

struct Command {
  std::string action;
  int guard = -1;
  std::vector<Update> updates;
  std::size_t line = 0;
};

struct Label {
  std::string name;
  int expr = -1;
};

struct Program {
  Pool pool;
  std::string module_name;
  std::vector<Variable> vars;
  std::vector<Command> commands;
  std::vector<Label> labels;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, const std::string& origin)
      : toks_(std::move(toks)), origin_(origin) {}

  Program run() {
    expect_keyword("ctmdp", "expected 'ctmdp' model type header");
    bool have_module = false;
    while (cur().kind != Tok::End) {
      if (is_keyword("const")) {
        parse_const();
      } else if (is_keyword("module")) {
        if (have_module) fail(cur(), "only one module is supported");
        parse_module();
        have_module = true;
      } else if (is_keyword("label")) {
        parse_label();
      } else {
        fail(cur(), "expected 'const', 'module' or 'label', found '" + cur().text + "'");
      }
    }
    if (!have_module) fail(cur(), "missing module");
    return std::move(prog_);
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& look(std::size_t k) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool is_keyword(const char* kw) const { return cur().kind == Tok::Ident && cur().text == kw; }

  [[noreturn]] void fail(const Token& at, const std::string& msg) const {
    throw ParseError(origin_, at.line, at.column, msg);
  }

  const Token& expect(Tok kind, const char* what) {
    if (cur().kind != kind) {
      fail(cur(), std::string("expected ") + what + ", found '" +
                      (cur().kind == Tok::End ? std::string("end of input") : cur().text) + "'");
    }
    return toks_[pos_++];
  }

  void expect_keyword(const char* kw, const std::string& msg) {
    if (!is_keyword(kw)) fail(cur(), msg);
    ++pos_;
  }

  bool accept(Tok kind) {
    if (cur().kind != kind) return false;
    ++pos_;
    return true;
  }

  std::string identifier(const char* what) {
    const Token& t = expect(Tok::Ident, what);
    static const char* reserved[] = {"ctmdp", "const", "int", "double", "bool", "module",
                                     "endmodule", "label", "init", "true", "false",
                                     "min", "max", "floor", "ceil", "pow", "mod"};
    for (const char* r : reserved) {
      if (t.text == r) fail(t, "'" + t.text + "' is a reserved word");
    }
    return t.text;
  }

  void check_fresh(const Token& at, const std::string& name) {
    if (consts_.count(name) != 0 || var_index_.count(name) != 0) {
      fail(at, "duplicate declaration of '" + name + "'");
    }
  }

  double const_value(int expr, const Token& at) {
    if (!is_constant(expr)) fail(at, "expression must be constant");
    const double v = prog_.pool.eval(expr, {});
    if (!std::isfinite(v)) fail(at, "constant expression is not finite");
    return v;
  }

  bool is_constant(int id) const {
    const Node& n = prog_.pool.nodes[static_cast<std::size_t>(id)];
    if (n.op == Op::Var) return false;
    return std::all_of(n.args.begin(), n.args.end(), [&](int a) { return is_constant(a); });
  }

  int int_constant(const Token& at) {
    const int e = expression();
    if (type_of(e) != Type::Int) fail(at, "expected an integer constant expression");
    return static_cast<int>(const_value(e, at));
  }

  void parse_const() {
    ++pos_;
    Type declared = Type::Int;
    if (is_keyword("int")) {
      ++pos_;
    } else if (is_keyword("double")) {
      declared = Type::Double;
      ++pos_;
    } else if (is_keyword("bool")) {
      declared = Type::Bool;
      ++pos_;
    }
    const Token& at = cur();
    const std::string name = identifier("constant name");
    check_fresh(at, name);
    expect(Tok::Eq, "'=' (constants need a value)");
    const Token& vat = cur();
    const int e = expression();
    const Type t = type_of(e);
    if (declared == Type::Double ? t == Type::Bool : t != declared) {
      fail(vat, std::string("constant '") + name + "' declared " + type_name(declared) +
                    " but given a " + type_name(t) + " value");
    }
    double v = const_value(e, vat);
    if (declared == Type::Int && v != std::floor(v)) fail(vat, "integer constant is not integral");
    expect(Tok::Semi, "';'");
    Node lit;
    lit.op = Op::Lit;
    lit.type = declared;
    lit.value = v;
    consts_[name] = prog_.pool.add(lit);
  }

  void parse_module() {
    ++pos_;
    prog_.module_name = identifier("module name");
    const Token& body = cur();
    while (!is_keyword("endmodule")) {
      if (cur().kind == Tok::End) fail(cur(), "missing 'endmodule'");
      if (cur().kind == Tok::LBracket) {
        parse_command();
      } else if (cur().kind == Tok::Ident && look(1).kind == Tok::Colon) {
        if (!prog_.commands.empty()) fail(cur(), "variable declarations must precede commands");
        parse_variable();
      } else {
        fail(cur(), "expected a variable declaration or a command");
      }
    }
    if (prog_.commands.empty()) fail(body, "no commands");
    if (prog_.vars.empty()) fail(body, "module declares no variables");
    ++pos_;
  }

  void parse_variable() {
    const Token& at = cur();
    Variable v;
    v.name = identifier("variable name");
    check_fresh(at, v.name);
    expect(Tok::Colon, "':'");
    if (is_keyword("bool")) {
      ++pos_;
      v.is_bool = true;
      v.lo = 0;
      v.hi = 1;
      v.init = 0;
      if (is_keyword("init")) {
        ++pos_;
        const Token& it = cur();
        const int e = expression();
        if (type_of(e) != Type::Bool) fail(it, "boolean variable needs a boolean initial value");
        v.init = const_value(e, it) != 0.0 ? 1 : 0;
      }
    } else {
      expect(Tok::LBracket, "'[' or 'bool'");
      const Token& lo_at = cur();
      v.lo = int_constant(lo_at);
      expect(Tok::DotDot, "'..'");
      v.hi = int_constant(cur());
      expect(Tok::RBracket, "']'");
      if (v.hi < v.lo) fail(lo_at, "empty range for variable '" + v.name + "'");
      v.init = v.lo;
      if (is_keyword("init")) {
        ++pos_;
        const Token& it = cur();
        v.init = int_constant(it);
        if (v.init < v.lo || v.init > v.hi) {
          fail(it, "initial value of '" + v.name + "' outside its range");
        }
      }
    }
    expect(Tok::Semi, "';'");
    var_index_[v.name] = prog_.vars.size();
    prog_.vars.push_back(v);
  }

  bool at_update() const {
    if (cur().kind == Tok::Ident && cur().text == "true") return true;
    return cur().kind == Tok::LParen && look(1).kind == Tok::Ident && look(2).kind == Tok::Prime;
  }

  void parse_command() {
    Command c;
    c.line = cur().line;
    ++pos_;
    const Token& act = cur();
    if (cur().kind == Tok::RBracket) fail(act, "commands need an action name");
    c.action = identifier("action name");
    expect(Tok::RBracket, "']'");
    const Token& gat = cur();
    c.guard = expression();
    if (type_of(c.guard) != Type::Bool) fail(gat, "guard must be boolean");
    expect(Tok::Arrow, "'->'");
    do {
      Update u;
      if (at_update()) {
        Node one;
        one.type = Type::Int;
        one.value = 1.0;
        u.rate = prog_.pool.add(one);
      } else {
        const Token& rat = cur();
        u.rate = expression();
        if (type_of(u.rate) == Type::Bool) fail(rat, "rate must be numeric");
        expect(Tok::Colon, "':' after rate");
      }
      parse_assignments(u);
      c.updates.push_back(std::move(u));
    } while (accept(Tok::Plus));
    expect(Tok::Semi, "';'");
    prog_.commands.push_back(std::move(c));
  }

  void parse_assignments(Update& u) {
    if (is_keyword("true")) {
      ++pos_;
      return;
    }
    do {
      expect(Tok::LParen, "'('");
      const Token& at = cur();
      const std::string name = expect(Tok::Ident, "variable name").text;
      const auto it = var_index_.find(name);
      if (it == var_index_.end()) fail(at, "assignment to undeclared variable '" + name + "'");
      expect(Tok::Prime, "'''");
      expect(Tok::Eq, "'='");
      const Token& eat = cur();
      const int e = expression();
      const Variable& v = prog_.vars[it->second];
      const Type t = type_of(e);
      if (v.is_bool ? t != Type::Bool : t != Type::Int) {
        fail(eat, "value assigned to '" + name + "' has type " + type_name(t));
      }
      for (const auto& [var, _] : u.assignments) {
        if (var == it->second) fail(at, "variable '" + name + "' assigned twice");
      }
      u.assignments.emplace_back(it->second, e);
      expect(Tok::RParen, "')'");
    } while (accept(Tok::And));
  }

  void parse_label() {
    ++pos_;
    const Token& at = cur();
    const std::string name = expect(Tok::String, "label name in quotes").text;
    if (name.empty()) fail(at, "empty label name");
    for (const auto& l : prog_.labels) {
      if (l.name == name) fail(at, "duplicate label \"" + name + "\"");
    }
    expect(Tok::Eq, "'='");
    const Token& eat = cur();
    const int e = expression();
    if (type_of(e) != Type::Bool) fail(eat, "label \"" + name + "\" must be boolean");
    expect(Tok::Semi, "';'");
    prog_.labels.push_back({name, e});
  }

  Type type_of(int id) const { return prog_.pool.nodes[static_cast<std::size_t>(id)].type; }

  int make(Op op, Type t, std::vector<int> args) {
    Node n;
    n.op = op;
    n.type = t;
    n.args = std::move(args);
    return prog_.pool.add(std::move(n));
  }

  void need_numeric(int e, const Token& at) {
    if (type_of(e) == Type::Bool) fail(at, "numeric operand expected");
  }
  void need_bool(int e, const Token& at) {
    if (type_of(e) != Type::Bool) fail(at, "boolean operand expected");
  }

  static Type arith(Type a, Type b) {
    return (a == Type::Double || b == Type::Double) ? Type::Double : Type::Int;
  }

  int expression() {
    const Token& at = cur();
    const int c = implication();
    if (!accept(Tok::Question)) return c;
    need_bool(c, at);
    const Token& tat = cur();
    const int a = expression();
    expect(Tok::Colon, "':' in conditional");
    const int b = expression();
    const Type ta = type_of(a), tb = type_of(b);
    Type t = ta;
    if (ta != tb) {
      if (ta == Type::Bool || tb == Type::Bool) fail(tat, "conditional branches differ in type");
      t = Type::Double;
    }
    return make(Op::Ite, t, {c, a, b});
  }

  int implication() {
    const Token& at = cur();
    int l = disjunction();
    while (cur().kind == Tok::Implies) {
      ++pos_;
      need_bool(l, at);
      const Token& rat = cur();
      const int r = disjunction();
      need_bool(r, rat);
      l = make(Op::Implies, Type::Bool, {l, r});
    }
    return l;
  }

  int disjunction() {
    const Token& at = cur();
    int l = conjunction();
    while (cur().kind == Tok::Or) {
      ++pos_;
      need_bool(l, at);
      const Token& rat = cur();
      const int r = conjunction();
      need_bool(r, rat);
      l = make(Op::Or, Type::Bool, {l, r});
    }
    return l;
  }

  int conjunction() {
    const Token& at = cur();
    int l = negation();
    // `&` between updates is handled by the caller; here it is always boolean
    while (cur().kind == Tok::And) {
      ++pos_;
      need_bool(l, at);
      const Token& rat = cur();
      const int r = negation();
      need_bool(r, rat);
      l = make(Op::And, Type::Bool, {l, r});
    }
    return l;
  }

  int negation() {
    if (cur().kind == Tok::Not) {
      ++pos_;
      const Token& at = cur();
      const int e = negation();
      need_bool(e, at);
      return make(Op::Not, Type::Bool, {e});
    }
    return relation();
  }

  int relation() {
    const Token& at = cur();
    const int l = additive();
    Op op;
    switch (cur().kind) {
      case Tok::Eq: op = Op::Eq; break;
      case Tok::Neq: op = Op::Neq; break;
      case Tok::Lt: op = Op::Lt; break;
      case Tok::Le: op = Op::Le; break;
      case Tok::Gt: op = Op::Gt; break;
      case Tok::Ge: op = Op::Ge; break;
      default: return l;
    }
    ++pos_;
    const Token& rat = cur();
    const int r = additive();
    const bool lb = type_of(l) == Type::Bool, rb = type_of(r) == Type::Bool;
    if (op == Op::Eq || op == Op::Neq) {
      if (lb != rb) fail(rat, "comparison between boolean and numeric values");
    } else {
      need_numeric(l, at);
      need_numeric(r, rat);
    }
    return make(op, Type::Bool, {l, r});
  }

  int additive() {
    const Token& at = cur();
    int l = multiplicative();
    while (cur().kind == Tok::Plus || cur().kind == Tok::Minus) {
      const Op op = cur().kind == Tok::Plus ? Op::Add : Op::Sub;
      ++pos_;
      need_numeric(l, at);
      const Token& rat = cur();
      const int r = multiplicative();
      need_numeric(r, rat);
      l = make(op, arith(type_of(l), type_of(r)), {l, r});
    }
    return l;
  }

  int multiplicative() {
    const Token& at = cur();
    int l = unary();
    while (cur().kind == Tok::Star || cur().kind == Tok::Slash) {
      const Op op = cur().kind == Tok::Star ? Op::Mul : Op::Div;
      ++pos_;
      need_numeric(l, at);
      const Token& rat = cur();
      const int r = unary();
      need_numeric(r, rat);
      const Type t = op == Op::Div ? Type::Double : arith(type_of(l), type_of(r));
      l = make(op, t, {l, r});
    }
    return l;
  }

  int unary() {
    if (cur().kind == Tok::Minus) {
      ++pos_;
      const Token& at = cur();
      const int e = unary();
      need_numeric(e, at);
      return make(Op::Neg, type_of(e), {e});
    }
    return primary();
  }

  int primary() {
    const Token& t = cur();
    if (t.kind == Tok::Number) {
      ++pos_;
      Node n;
      n.type = t.integral ? Type::Int : Type::Double;
      n.value = t.number;
      return prog_.pool.add(n);
    }
    if (t.kind == Tok::LParen) {
      ++pos_;
      const int e = expression();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (t.kind != Tok::Ident) {
      fail(t, "expected an expression, found '" +
                  (t.kind == Tok::End ? std::string("end of input") : t.text) + "'");
    }
    ++pos_;
    if (t.text == "true" || t.text == "false") {
      Node n;
      n.type = Type::Bool;
      n.value = t.text == "true" ? 1.0 : 0.0;
      return prog_.pool.add(n);
    }
    static const std::map<std::string, std::pair<Op, int>> functions = {
        {"min", {Op::Min, -2}}, {"max", {Op::Max, -2}}, {"floor", {Op::Floor, 1}},
        {"ceil", {Op::Ceil, 1}}, {"pow", {Op::Pow, 2}},  {"mod", {Op::Mod, 2}}};
    if (const auto f = functions.find(t.text); f != functions.end()) {
      expect(Tok::LParen, "'(' after function name");
      std::vector<int> args;
      do {
        const Token& at = cur();
        const int a = expression();
        need_numeric(a, at);
        args.push_back(a);
      } while (accept(Tok::Comma));
      expect(Tok::RParen, "')'");
      const int arity = f->second.second;
      if (arity > 0 ? static_cast<int>(args.size()) != arity
                    : static_cast<int>(args.size()) < -arity) {
        fail(t, "wrong number of arguments to " + t.text);
      }
      Type ty = Type::Int;
      for (int a : args) ty = arith(ty, type_of(a));
      if (f->second.first == Op::Floor || f->second.first == Op::Ceil) ty = Type::Int;
      if (f->second.first == Op::Pow) ty = Type::Double;
      return make(f->second.first, ty, std::move(args));
    }
    if (const auto c = consts_.find(t.text); c != consts_.end()) return c->second;
    if (const auto v = var_index_.find(t.text); v != var_index_.end()) {
      Node n;
      n.op = Op::Var;
      n.var = v->second;
      n.type = prog_.vars[v->second].is_bool ? Type::Bool : Type::Int;
      return prog_.pool.add(n);
    }
    fail(t, "undefined identifier '" + t.text + "'");
  }

  std::vector<Token> toks_;
  const std::string& origin_;
  std::size_t pos_ = 0;
  Program prog_;
  std::unordered_map<std::string, int> consts_;
  std::unordered_map<std::string, std::size_t> var_index_;
};

std::string valuation_name(const Program& p, const std::vector<int>& vals) {
  std::string out;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i > 0) out += ',';
    out += p.vars[i].name + '=';
    out += p.vars[i].is_bool ? (vals[i] != 0 ? "true" : "false") : std::to_string(vals[i]);
  }
  return out;
}

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (int x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ULL;
    return h;
  }
};

Ctmdp explore(const Program& p, const std::string& origin) {
  Ctmdp m;
  for (const auto& l : p.labels) m.propositions.push_back(l.name);
  if (m.propositions.size() > kMaxPropositions) {
    throw ValidationError(origin + ": more than 64 labels");
  }
  std::unordered_map<std::string, ActionId> action_id;
  for (const auto& c : p.commands) {
    if (action_id.emplace(c.action, static_cast<ActionId>(m.action_names.size())).second) {
      m.action_names.push_back(c.action);
    }
  }

  std::unordered_map<std::vector<int>, StateId, VecHash> index;
  std::vector<std::vector<int>> states;
  std::vector<int> init;
  for (const auto& v : p.vars) init.push_back(v.init);
  index.emplace(init, 0);
  states.push_back(init);

  const auto describe = [&](const Command& c) {
    return origin + ":" + std::to_string(c.line) + ": command [" + c.action + "]";
  };

  for (std::size_t k = 0; k < states.size(); ++k) {
    const std::vector<int> vals = states[k];
    std::map<ActionId, std::map<StateId, double>> merged;
    std::vector<std::pair<ActionId, std::vector<std::pair<StateId, double>>>> ordered;
    for (const auto& c : p.commands) {
      if (p.pool.eval(c.guard, vals) == 0.0) continue;
      const ActionId a = action_id.at(c.action);
      auto& row = merged[a];
      for (const auto& u : c.updates) {
        const double rate = p.pool.eval(u.rate, vals);
        if (!std::isfinite(rate)) {
          throw ValidationError(describe(c) + " has a non-finite rate in state " +
                                valuation_name(p, vals));
        }
        if (rate < 0.0) {
          throw ValidationError(describe(c) + " has negative rate " + format_number(rate) +
                                " in state " + valuation_name(p, vals));
        }
        std::vector<int> next = vals;
        for (const auto& [var, expr] : u.assignments) {
          const double v = p.pool.eval(expr, vals);
          const Variable& decl = p.vars[var];
          if (v != std::floor(v) || v < decl.lo || v > decl.hi) {
            throw ValidationError(describe(c) + " assigns " + format_number(v) + " to '" +
                                  decl.name + "', outside [" + std::to_string(decl.lo) + ".." +
                                  std::to_string(decl.hi) + "], in state " +
                                  valuation_name(p, vals));
          }
          next[var] = static_cast<int>(v);
        }
        if (rate == 0.0) continue;
        auto [it, fresh] = index.emplace(next, static_cast<StateId>(states.size()));
        if (fresh) states.push_back(next);
        row[it->second] += rate;
      }
    }
    std::vector<Choice> choices;
    for (const auto& [a, row] : merged) {
      Choice c{a, {}};
      for (const auto& [t, r] : row) c.transitions.push_back({t, r});
      if (c.transitions.empty()) {
        throw ValidationError(origin + ": action '" + m.action_names[a] +
                              "' has zero exit rate in state " + valuation_name(p, vals));
      }
      choices.push_back(std::move(c));
    }
    if (choices.empty()) {
      throw ValidationError(origin + ": state " + valuation_name(p, vals) +
                            " has no enabled action");
    }
    m.choices.push_back(std::move(choices));
  }

  for (const auto& vals : states) {
    m.state_names.push_back(valuation_name(p, vals));
    Letter l = 0;
    for (std::size_t i = 0; i < p.labels.size(); ++i) {
      if (p.pool.eval(p.labels[i].expr, vals) != 0.0) l |= Letter{1} << i;
    }
    m.labels.push_back(l);
  }
  m.initial = 0;
  require_valid(m);
  return m;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ModelSource read_model_file(const std::string& path) { return {slurp(path), path}; }
HoaSource read_hoa_file(const std::string& path) { return {slurp(path), path}; }

Ctmdp parse_model(const ModelSource& src) {
  Lexer lexer(src.text, src.origin);
  Parser parser(lexer.run(), src.origin);
  const Program prog = parser.run();
  return explore(prog, src.origin.empty() ? std::string("<input>") : src.origin);
}

}  // namespace ctmdp
