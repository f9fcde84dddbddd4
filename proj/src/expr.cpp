#include "finsler/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "finsler/errors.hpp"
#include "finsler/random.hpp"

namespace finsler {

enum class NodeKind { number, var, add, sub, mul, div, pow, call };
enum class FuncKind { fsqrt, fsin, fcos, fexp, flog };

struct ExprNode {
  NodeKind kind;
  double number = 0.0;
  bool is_fiber = false;  // var: y (true) or x (false)
  int var_index = 0;      // var: 0-based coordinate index
  int exponent = 1;       // pow
  FuncKind func = FuncKind::fsqrt;
  std::shared_ptr<const ExprNode> lhs, rhs;
};

namespace {

struct Token {
  enum Kind { number, word, op, end } kind;
  double num = 0.0;
  std::string text;
  char ch = 0;
  int line = 1, column = 1;
};

class Lexer {
 public:
  Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= src_.size()) {
      t.kind = Token::end;
      return t;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      t.kind = Token::number;
      size_t start = pos_;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        advance();
      if (pos_ < src_.size() && src_[pos_] == '.') {
        advance();
        if (pos_ >= src_.size() ||
            !std::isdigit(static_cast<unsigned char>(src_[pos_])))
          throw SyntaxError("malformed number: digits expected after '.'",
                            line_, col_);
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_])))
          advance();
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        size_t mark = pos_;
        int mark_col = col_;
        advance();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
          advance();
        if (pos_ < src_.size() &&
            std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          while (pos_ < src_.size() &&
                 std::isdigit(static_cast<unsigned char>(src_[pos_])))
            advance();
        } else {
          // Not an exponent suffix; rewind so 'e' lexes as a word.
          pos_ = mark;
          col_ = mark_col;
        }
      }
      t.num = std::strtod(std::string(src_.substr(start, pos_ - start)).c_str(),
                          nullptr);
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      t.kind = Token::word;
      size_t start = pos_;
      while (pos_ < src_.size() &&
             std::isalpha(static_cast<unsigned char>(src_[pos_])))
        advance();
      // Variable names are a single letter followed by digits.
      if (pos_ - start == 1 && (src_[start] == 'x' || src_[start] == 'y')) {
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_])))
          advance();
      }
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (std::string("+-*/^()").find(c) != std::string::npos) {
      t.kind = Token::op;
      t.ch = c;
      advance();
      return t;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", line_,
                      col_);
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      advance();
  }
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

using NodePtr = std::shared_ptr<const ExprNode>;

class Parser {
 public:
  Parser(std::string_view src, int dim) : lex_(src), dim_(dim) {
    cur_ = lex_.next();
  }

  NodePtr parse() {
    NodePtr e = expr();
    if (cur_.kind != Token::end)
      throw SyntaxError("unexpected trailing input", cur_.line, cur_.column);
    return e;
  }

 private:
  NodePtr expr() {
    NodePtr lhs = term();
    while (cur_.kind == Token::op && (cur_.ch == '+' || cur_.ch == '-')) {
      char op = cur_.ch;
      next();
      NodePtr rhs = term();
      lhs = binary(op == '+' ? NodeKind::add : NodeKind::sub, lhs, rhs);
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (cur_.kind == Token::op && (cur_.ch == '*' || cur_.ch == '/')) {
      char op = cur_.ch;
      next();
      NodePtr rhs = factor();
      lhs = binary(op == '*' ? NodeKind::mul : NodeKind::div, lhs, rhs);
    }
    return lhs;
  }

  NodePtr factor() {
    NodePtr b = base();
    if (cur_.kind == Token::op && cur_.ch == '^') {
      Token caret = cur_;
      next();
      if (cur_.kind != Token::number || cur_.text.find('.') != std::string::npos ||
          cur_.text.find('e') != std::string::npos ||
          cur_.text.find('E') != std::string::npos)
        throw SyntaxError("integer exponent expected after '^'", caret.line,
                          caret.column);
      auto n = std::make_shared<ExprNode>();
      n->kind = NodeKind::pow;
      n->exponent = int(cur_.num);
      n->lhs = b;
      next();
      return n;
    }
    return b;
  }

  NodePtr base() {
    if (cur_.kind == Token::number) {
      auto n = std::make_shared<ExprNode>();
      n->kind = NodeKind::number;
      n->number = cur_.num;
      next();
      return n;
    }
    if (cur_.kind == Token::op && cur_.ch == '(') {
      next();
      NodePtr e = expr();
      expect_close();
      return e;
    }
    if (cur_.kind == Token::word) {
      Token w = cur_;
      if ((w.text[0] == 'x' || w.text[0] == 'y') && w.text.size() > 1 &&
          std::isdigit(static_cast<unsigned char>(w.text[1]))) {
        int idx = std::atoi(w.text.c_str() + 1);
        if (idx < 1 || idx > dim_)
          throw UnknownSymbol("variable " + w.text + " out of range for dimension " +
                                  std::to_string(dim_),
                              w.line, w.column);
        auto n = std::make_shared<ExprNode>();
        n->kind = NodeKind::var;
        n->is_fiber = (w.text[0] == 'y');
        n->var_index = idx - 1;
        next();
        return n;
      }
      FuncKind f;
      if (w.text == "sqrt")
        f = FuncKind::fsqrt;
      else if (w.text == "sin")
        f = FuncKind::fsin;
      else if (w.text == "cos")
        f = FuncKind::fcos;
      else if (w.text == "exp")
        f = FuncKind::fexp;
      else if (w.text == "log")
        f = FuncKind::flog;
      else
        throw UnknownSymbol("unknown function or symbol '" + w.text + "'",
                            w.line, w.column);
      next();
      if (!(cur_.kind == Token::op && cur_.ch == '('))
        throw SyntaxError("'(' expected after function name", cur_.line,
                          cur_.column);
      next();
      NodePtr arg = expr();
      expect_close();
      auto n = std::make_shared<ExprNode>();
      n->kind = NodeKind::call;
      n->func = f;
      n->lhs = arg;
      return n;
    }
    throw SyntaxError("number, variable, '(' or function expected", cur_.line,
                      cur_.column);
  }

  void expect_close() {
    if (!(cur_.kind == Token::op && cur_.ch == ')'))
      throw SyntaxError("')' expected", cur_.line, cur_.column);
    next();
  }

  NodePtr binary(NodeKind k, NodePtr l, NodePtr r) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  void next() { cur_ = lex_.next(); }

  Lexer lex_;
  int dim_;
  Token cur_;
};

Jet eval_node(const ExprNode& n, const VectorXd& x, const VectorXd& y,
              int nvars, int order) {
  switch (n.kind) {
    case NodeKind::number:
      return Jet::constant(nvars, order, n.number);
    case NodeKind::var: {
      int var = n.is_fiber ? int(x.size()) + n.var_index : n.var_index;
      double v = n.is_fiber ? y[n.var_index] : x[n.var_index];
      return Jet::variable(nvars, order, var, v);
    }
    case NodeKind::add:
      return eval_node(*n.lhs, x, y, nvars, order) +
             eval_node(*n.rhs, x, y, nvars, order);
    case NodeKind::sub:
      return eval_node(*n.lhs, x, y, nvars, order) -
             eval_node(*n.rhs, x, y, nvars, order);
    case NodeKind::mul:
      return eval_node(*n.lhs, x, y, nvars, order) *
             eval_node(*n.rhs, x, y, nvars, order);
    case NodeKind::div:
      return eval_node(*n.lhs, x, y, nvars, order) /
             eval_node(*n.rhs, x, y, nvars, order);
    case NodeKind::pow:
      return pow_int(eval_node(*n.lhs, x, y, nvars, order), n.exponent);
    case NodeKind::call: {
      Jet a = eval_node(*n.lhs, x, y, nvars, order);
      switch (n.func) {
        case FuncKind::fsqrt:
          return sqrt(a);
        case FuncKind::fsin:
          return sin(a);
        case FuncKind::fcos:
          return cos(a);
        case FuncKind::fexp:
          return exp(a);
        case FuncKind::flog:
          return log(a);
      }
    }
  }
  throw Error("corrupt expression tree");
}

bool tree_references(const ExprNode& n, bool fiber) {
  if (n.kind == NodeKind::var) return n.is_fiber == fiber;
  bool r = false;
  if (n.lhs) r = r || tree_references(*n.lhs, fiber);
  if (n.rhs) r = r || tree_references(*n.rhs, fiber);
  return r;
}

}  // namespace

Jet MetricExpression::eval(const VectorXd& x, const VectorXd& y,
                           int order) const {
  if (!root_) throw Error("empty expression");
  if (x.size() != n_ || y.size() != n_)
    throw DimensionMismatch("point dimension does not match expression");
  Jet j = eval_node(*root_, x, y, 2 * n_, order);
  if (!j.finite())
    throw NonSmoothPoint("expression evaluated to a non-finite value");
  return j;
}

double MetricExpression::value(const VectorXd& x, const VectorXd& y) const {
  return eval(x, y, 0).value();
}

bool MetricExpression::references_fiber() const {
  return root_ && tree_references(*root_, true);
}

bool MetricExpression::references_base() const {
  return root_ && tree_references(*root_, false);
}

MetricExpression parse_metric(std::string_view source, int dimension) {
  if (dimension < 1 || dimension > 4)
    throw UnsupportedDimension("dimension must be between 1 and 4");
  Parser p(source, dimension);
  MetricExpression m;
  m.root_ = p.parse();
  m.src_ = std::string(source);
  m.n_ = dimension;
  return m;
}

HomogeneityCheck check_homogeneity(const MetricExpression& expr, int samples,
                                   double tol, const ChartBox& base_box,
                                   uint64_t seed) {
  Rng rng(seed);
  const int n = expr.dimension();
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    VectorXd x = rng.in_box(base_box);
    VectorXd y = rng.on_sphere(n) * rng.uniform(0.5, 2.0);
    double lam = rng.uniform(0.1, 10.0);
    double f = expr.value(x, y);
    double fs = expr.value(x, lam * y);
    double res = std::abs(fs - lam * f) / (1.0 + std::abs(lam * f));
    worst = std::max(worst, res);
  }
  return {worst <= tol, worst, samples};
}

}  // namespace finsler
