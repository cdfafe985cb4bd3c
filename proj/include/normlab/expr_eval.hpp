#pragma once

// Generic tree walker shared by the scalar, jet and nested-jet evaluators.
// A scalar type S plugs in through ScalarOps<S>.

#include <cmath>

#include "normlab/expr.hpp"

namespace nlab {

template <class S>
struct ScalarOps;

template <>
struct ScalarOps<double> {
  static double call(Func f, double a) {
    switch (f) {
      case Func::Sin: return std::sin(a);
      case Func::Cos: return std::cos(a);
      case Func::Exp: return std::exp(a);
      case Func::Ln: return scalar::ln(a);
      case Func::Sqrt: return scalar::sqrt(a);
      case Func::Tanh: return std::tanh(a);
    }
    return 0.0;
  }
  static double divide(double a, double b) { return scalar::divide(a, b); }
  static double power(double a, double b) { return scalar::pow(a, b); }
};

// `variable(kind, index)` and `constant(value)` produce leaves of type S.
template <class S, class VariableFn, class ConstantFn>
S evaluate(const Node& node, const VariableFn& variable,
           const ConstantFn& constant) {
  switch (node.kind) {
    case Node::Kind::Number:
      return constant(node.number);
    case Node::Kind::Variable:
      return variable(node.var, node.index);
    case Node::Kind::Negate:
      return -evaluate<S>(*node.lhs, variable, constant);
    case Node::Kind::Call:
      return ScalarOps<S>::call(node.func,
                                evaluate<S>(*node.lhs, variable, constant));
    case Node::Kind::Binary: {
      S a = evaluate<S>(*node.lhs, variable, constant);
      S b = evaluate<S>(*node.rhs, variable, constant);
      switch (node.op) {
        case BinOp::Add: return a + b;
        case BinOp::Sub: return a - b;
        case BinOp::Mul: return a * b;
        case BinOp::Div: return ScalarOps<S>::divide(a, b);
        case BinOp::Pow: return ScalarOps<S>::power(a, b);
      }
    }
  }
  return constant(0.0);
}

}  // namespace nlab
