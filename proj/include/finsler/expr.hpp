#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "finsler/jet.hpp"
#include "finsler/types.hpp"

namespace finsler {

// Scalar expression in the base coordinates x1..xn and fiber coordinates
// y1..yn, parsed from the grammar:
//
//   expr    := term (('+' | '-') term)*
//   term    := factor (('*' | '/') factor)*
//   factor  := base ('^' integer)?
//   base    := number | ident | '(' expr ')' | func '(' expr ')'
//   ident   := ('x' | 'y') digit+
//   func    := 'sqrt' | 'sin' | 'cos' | 'exp' | 'log'
//
// Exponents are non-negative integer literals; numbers are unsigned floating
// literals (use subtraction or division for signs and reciprocals). There is
// no abs(): expressions are smooth wherever they evaluate.
struct ExprNode;

class MetricExpression {
 public:
  MetricExpression() = default;

  const std::string& source() const { return src_; }
  int dimension() const { return n_; }

  // Jet of the expression at (x, y) in the 2n variables
  // (x1..xn = 0..n-1, y1..yn = n..2n-1), total derivative order <= 4.
  Jet eval(const VectorXd& x, const VectorXd& y, int order) const;
  double value(const VectorXd& x, const VectorXd& y) const;

  bool references_fiber() const;  // any y variable present
  bool references_base() const;   // any x variable present

 private:
  std::shared_ptr<const ExprNode> root_;
  std::string src_;
  int n_ = 0;
  friend MetricExpression parse_metric(std::string_view, int);
};

// Parses source against the grammar above. Throws SyntaxError on malformed
// input and UnknownSymbol for out-of-range variable indices or unknown
// function names, both with 1-based line/column.
MetricExpression parse_metric(std::string_view source, int dimension);

struct HomogeneityCheck {
  bool ok;
  double max_residual;
  int samples;
};

// Verifies F(x, s*y) = s*F(x, y) for positive scalings at sampled (x, y, s).
// Sampling is seeded and confined to the given base box; residuals are
// relative to 1 + |s*F|.
HomogeneityCheck check_homogeneity(const MetricExpression& expr, int samples,
                                   double tol, const ChartBox& base_box,
                                   uint64_t seed = 42);

}  // namespace finsler
