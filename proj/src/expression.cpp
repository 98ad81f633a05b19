#include "curvglue/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

namespace curvglue {

namespace {

std::string located(const std::string& msg, int line, int column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg;
}

}  // namespace

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error(located(msg, line, column)), detail_(msg), line_(line), column_(column) {}

enum class Fn { sin, cos, tan, exp, log, sqrt };

struct Expression::Node {
  enum Kind { number, variable, negate, add, sub, mul, div, pow, call } kind;
  double value = 0.0;
  int var = 0;  // 0-based
  Fn fn = Fn::sin;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

struct Token {
  enum Kind { number, ident, op, lparen, rparen, end } kind;
  std::string text;
  double value = 0.0;
  int column = 0;
};

class Parser {
 public:
  Parser(std::string_view s, int n, int line, int column) : s_(s), n_(n), line_(line), col0_(column) {
    tokenize();
  }

  NodePtr parse() {
    NodePtr e = expr(1);
    if (peek().kind != Token::end) fail("unexpected '" + peek().text + "'", peek().column);
    return e;
  }

 private:
  std::string_view s_;
  int n_, line_, col0_;
  std::vector<Token> toks_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg, int col) const { throw ParseError(msg, line_, col0_ + col); }

  void tokenize() {
    size_t i = 0;
    while (i < s_.size()) {
      const char c = s_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      const int col = static_cast<int>(i);
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        size_t j = i;
        while (j < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[j])) || s_[j] == '.')) ++j;
        if (j < s_.size() && (s_[j] == 'e' || s_[j] == 'E')) {
          size_t k = j + 1;
          if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) ++k;
          if (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) {
            while (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) ++k;
            j = k;
          }
        }
        const std::string txt(s_.substr(i, j - i));
        if (std::count(txt.begin(), txt.end(), '.') > 1 || txt == ".") fail("malformed number '" + txt + "'", col);
        toks_.push_back({Token::number, txt, std::strtod(txt.c_str(), nullptr), col});
        i = j;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t j = i;
        while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
        toks_.push_back({Token::ident, std::string(s_.substr(i, j - i)), 0.0, col});
        i = j;
      } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
        toks_.push_back({Token::op, std::string(1, c), 0.0, col});
        ++i;
      } else if (c == '(') {
        toks_.push_back({Token::lparen, "(", 0.0, col});
        ++i;
      } else if (c == ')') {
        toks_.push_back({Token::rparen, ")", 0.0, col});
        ++i;
      } else {
        fail(std::string("unexpected character '") + c + "'", col);
      }
    }
    toks_.push_back({Token::end, "end of input", 0.0, static_cast<int>(s_.size())});
  }

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  static int precedence(const std::string& op) {
    if (op == "+" || op == "-") return 1;
    if (op == "*" || op == "/") return 2;
    return 3;
  }

  static NodePtr make(Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr expr(int min_prec) {
    NodePtr lhs = unary();
    while (peek().kind == Token::op && precedence(peek().text) >= min_prec) {
      const std::string op = next().text;
      const int p = precedence(op);
      NodePtr rhs = expr(op == "^" ? p : p + 1);
      Node::Kind k = op == "+" ? Node::add : op == "-" ? Node::sub : op == "*" ? Node::mul : op == "/" ? Node::div
                                                                                                 : Node::pow;
      lhs = make(k, lhs, rhs);
    }
    return lhs;
  }

  // Unary minus binds looser than '^': -x^2 = -(x^2).
  NodePtr unary() {
    if (peek().kind == Token::op && (peek().text == "-" || peek().text == "+")) {
      const bool neg = next().text == "-";
      NodePtr operand = expr(3);
      return neg ? make(Node::negate, operand) : operand;
    }
    return primary();
  }

  NodePtr primary() {
    const Token t = next();
    switch (t.kind) {
      case Token::number: {
        auto n = std::make_shared<Node>();
        n->kind = Node::number;
        n->value = t.value;
        return n;
      }
      case Token::lparen: {
        NodePtr e = expr(1);
        if (peek().kind != Token::rparen) fail("expected ')' to close '(' at column " + std::to_string(col0_ + t.column), peek().column);
        next();
        return e;
      }
      case Token::ident: return identifier(t);
      default: fail("expected an operand, found '" + t.text + "'", t.column);
    }
  }

  NodePtr identifier(const Token& t) {
    static const std::pair<const char*, Fn> fns[] = {{"sin", Fn::sin}, {"cos", Fn::cos}, {"tan", Fn::tan},
                                                     {"exp", Fn::exp}, {"log", Fn::log}, {"sqrt", Fn::sqrt}};
    for (auto& [name, fn] : fns) {
      if (t.text != name) continue;
      const Token open = next();
      if (open.kind != Token::lparen) fail("expected '(' after function " + t.text, open.column);
      NodePtr arg = expr(1);
      if (peek().kind != Token::rparen)
        fail("expected ')' to close " + t.text + "( at column " + std::to_string(col0_ + open.column), peek().column);
      next();
      auto n = std::make_shared<Node>();
      n->kind = Node::call;
      n->fn = fn;
      n->a = arg;
      return n;
    }
    if (t.text == "pi") {
      auto n = std::make_shared<Node>();
      n->kind = Node::number;
      n->value = std::numbers::pi;
      return n;
    }
    int idx = -1;
    if (t.text == "xn") {
      idx = n_ - 1;
    } else if (t.text.size() > 1 && t.text.size() < 8 && t.text[0] == 'x' &&
               std::all_of(t.text.begin() + 1, t.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      idx = std::stoi(t.text.substr(1)) - 1;
    }
    if (idx < 0 || idx >= n_) fail("unknown identifier '" + t.text + "'", t.column);
    auto n = std::make_shared<Node>();
    n->kind = Node::variable;
    n->var = idx;
    return n;
  }
};

double eval(const Node& n, const Vec& x) {
  switch (n.kind) {
    case Node::number: return n.value;
    case Node::variable: return x(n.var);
    case Node::negate: return -eval(*n.a, x);
    case Node::add: return eval(*n.a, x) + eval(*n.b, x);
    case Node::sub: return eval(*n.a, x) - eval(*n.b, x);
    case Node::mul: return eval(*n.a, x) * eval(*n.b, x);
    case Node::div: return eval(*n.a, x) / eval(*n.b, x);
    case Node::pow: {
      const double b = eval(*n.a, x), e = eval(*n.b, x);
      if (e == 2.0) return b * b;
      return std::pow(b, e);
    }
    case Node::call: {
      const double v = eval(*n.a, x);
      switch (n.fn) {
        case Fn::sin: return std::sin(v);
        case Fn::cos: return std::cos(v);
        case Fn::tan: return std::tan(v);
        case Fn::exp: return std::exp(v);
        case Fn::log: return std::log(v);
        case Fn::sqrt: return std::sqrt(v);
      }
    }
  }
  return 0.0;
}

void print(const Node& n, std::string& out) {
  static const char* fn_names[] = {"sin", "cos", "tan", "exp", "log", "sqrt"};
  switch (n.kind) {
    case Node::number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case Node::variable: out += "x" + std::to_string(n.var + 1); return;
    case Node::negate:
      out += "(-";
      print(*n.a, out);
      out += ")";
      return;
    case Node::call:
      out += fn_names[static_cast<int>(n.fn)];
      out += "(";
      print(*n.a, out);
      out += ")";
      return;
    default: {
      const char op = n.kind == Node::add ? '+' : n.kind == Node::sub ? '-' : n.kind == Node::mul ? '*'
                                                   : n.kind == Node::div ? '/'
                                                                         : '^';
      out += "(";
      print(*n.a, out);
      out += ' ';
      out += op;
      out += ' ';
      print(*n.b, out);
      out += ")";
    }
  }
}

int max_var(const Node& n) {
  int m = n.kind == Node::variable ? n.var + 1 : 0;
  if (n.a) m = std::max(m, max_var(*n.a));
  if (n.b) m = std::max(m, max_var(*n.b));
  return m;
}

}  // namespace

double Expression::operator()(const Vec& x) const { return root_ ? eval(*root_, x) : 0.0; }

std::string Expression::print() const {
  std::string s;
  if (root_) curvglue::print(*root_, s);
  return s;
}

int Expression::max_variable() const { return root_ ? max_var(*root_) : 0; }

Expression parse_expression(std::string_view text, int n, int line, int column) {
  Parser p(text, n, line, column);
  Expression e;
  e.root_ = p.parse();
  return e;
}

}  // namespace curvglue
