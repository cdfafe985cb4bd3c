#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "normlab/errors.hpp"
#include "normlab/phase.hpp"

namespace nlab {

enum class VarKind : unsigned char { X, V, P, U };
enum class Func : unsigned char { Sin, Cos, Exp, Ln, Sqrt, Tanh };
enum class BinOp : unsigned char { Add, Sub, Mul, Div, Pow };

const char* func_name(Func f) noexcept;

struct Node {
  enum class Kind : unsigned char { Number, Variable, Negate, Binary, Call };

  Kind kind = Kind::Number;
  double number = 0.0;
  VarKind var = VarKind::X;
  int index = 0;  // 0-based variable index
  BinOp op = BinOp::Add;
  Func func = Func::Sin;
  std::shared_ptr<const Node> lhs;  // operand of Negate and Call
  std::shared_ptr<const Node> rhs;
};

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_number(double value);
NodePtr make_variable(VarKind kind, int index);
NodePtr make_negate(NodePtr operand);
NodePtr make_binary(BinOp op, NodePtr lhs, NodePtr rhs);
NodePtr make_call(Func f, NodePtr operand);

bool structurally_equal(const Node& a, const Node& b) noexcept;

// Immutable scalar expression over chart variables x1..xn and the fiber
// variables of one representation (or over surface parameters u1..uk).
class Expression {
 public:
  Expression();  // the constant 0
  Expression(NodePtr root, int dimension);

  const Node& root() const noexcept { return *root_; }
  const NodePtr& root_ptr() const noexcept { return root_; }
  int dimension() const noexcept { return dimension_; }

  // Fiber representation referenced by the expression, if any.
  std::optional<Representation> fiber_rep() const noexcept { return fiber_; }
  bool uses_fiber() const noexcept { return fiber_.has_value(); }
  bool is_zero_literal() const noexcept;

  std::string to_string() const;

  friend bool operator==(const Expression& a, const Expression& b) noexcept {
    return a.dimension_ == b.dimension_ &&
           structurally_equal(*a.root_, *b.root_);
  }

 private:
  NodePtr root_;
  int dimension_ = 0;
  std::optional<Representation> fiber_;
};

// Grammar: + - * / ^ (right-assoc), unary minus binding looser than ^,
// functions sin cos exp ln sqrt tanh, variables x<i>, v<i>, p<i> (1-based).
Expression parse(std::string_view source, int dimension);

// Same grammar over surface parameters u1..u<param_count> only.
Expression parse_parametric(std::string_view source, int param_count);

Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);

double eval_scalar(const Expression& e, const PhasePoint& point);
double eval_parametric(const Expression& e, const std::vector<double>& u);

// Scalar kernels used by every evaluation type; they raise EvalError on
// domain violations.
namespace scalar {
double divide(double a, double b);
double ln(double a);
double sqrt(double a);
double pow(double base, double exponent);
bool is_integer(double value) noexcept;
}  // namespace scalar

}  // namespace nlab
