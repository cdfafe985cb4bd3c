#include "normlab/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "normlab/expr_eval.hpp"

namespace nlab {

const char* func_name(Func f) noexcept {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Ln: return "ln";
    case Func::Sqrt: return "sqrt";
    case Func::Tanh: return "tanh";
  }
  return "?";
}

const char* representation_name(Representation rep) noexcept {
  return rep == Representation::V ? "v" : "p";
}

NodePtr make_number(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Number;
  n->number = value;
  return n;
}

NodePtr make_variable(VarKind kind, int index) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Variable;
  n->var = kind;
  n->index = index;
  return n;
}

NodePtr make_negate(NodePtr operand) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Negate;
  n->lhs = std::move(operand);
  return n;
}

NodePtr make_binary(BinOp op, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Binary;
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr make_call(Func f, NodePtr operand) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Call;
  n->func = f;
  n->lhs = std::move(operand);
  return n;
}

bool structurally_equal(const Node& a, const Node& b) noexcept {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Node::Kind::Number:
      return a.number == b.number;
    case Node::Kind::Variable:
      return a.var == b.var && a.index == b.index;
    case Node::Kind::Negate:
      return structurally_equal(*a.lhs, *b.lhs);
    case Node::Kind::Call:
      return a.func == b.func && structurally_equal(*a.lhs, *b.lhs);
    case Node::Kind::Binary:
      return a.op == b.op && structurally_equal(*a.lhs, *b.lhs) &&
             structurally_equal(*a.rhs, *b.rhs);
  }
  return false;
}

namespace {

void scan_fiber(const Node& n, bool& has_v, bool& has_p) {
  switch (n.kind) {
    case Node::Kind::Number:
      return;
    case Node::Kind::Variable:
      has_v |= n.var == VarKind::V;
      has_p |= n.var == VarKind::P;
      return;
    case Node::Kind::Negate:
    case Node::Kind::Call:
      scan_fiber(*n.lhs, has_v, has_p);
      return;
    case Node::Kind::Binary:
      scan_fiber(*n.lhs, has_v, has_p);
      scan_fiber(*n.rhs, has_v, has_p);
      return;
  }
}

void print(const Node& n, std::string& out) {
  switch (n.kind) {
    case Node::Kind::Number: {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof buf, n.number);
      out.append(buf, res.ptr);
      return;
    }
    case Node::Kind::Variable: {
      static constexpr char kNames[] = {'x', 'v', 'p', 'u'};
      out += kNames[static_cast<int>(n.var)];
      out += std::to_string(n.index + 1);
      return;
    }
    case Node::Kind::Negate:
      out += "(-";
      print(*n.lhs, out);
      out += ')';
      return;
    case Node::Kind::Call:
      out += func_name(n.func);
      out += '(';
      print(*n.lhs, out);
      out += ')';
      return;
    case Node::Kind::Binary: {
      static constexpr const char* kOps[] = {" + ", " - ", " * ", " / ", "^"};
      out += '(';
      print(*n.lhs, out);
      out += kOps[static_cast<int>(n.op)];
      print(*n.rhs, out);
      out += ')';
      return;
    }
  }
}

// Recursive-descent parser. Precedence: ^ > unary minus > * / > + -.
class Parser {
 public:
  Parser(std::string_view src, int dimension, bool parametric)
      : src_(src), dimension_(dimension), parametric_(parametric) {}

  NodePtr parse_all() {
    NodePtr e = parse_sum();
    skip_space();
    if (pos_ < src_.size()) fail("unexpected character '" +
                                 std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw SyntaxError(message, line_, column_);
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      advance();
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      advance();
      return true;
    }
    return false;
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary(BinOp::Add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = make_binary(BinOp::Sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary(BinOp::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_binary(BinOp::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_negate(parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) return make_binary(BinOp::Pow, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      advance();
      NodePtr inner = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    const int start_col = column_;
    auto digits = [&] {
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        advance();
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-'))
        ++look;
      if (look < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[look]))) {
        while (pos_ < look) advance();
        digits();
      }
    }
    double value = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last) {
      throw SyntaxError("malformed number", line_, start_col);
    }
    skip_space();
    if (pos_ < src_.size() &&
        (std::isalpha(static_cast<unsigned char>(src_[pos_])) ||
         src_[pos_] == '(')) {
      fail("implicit multiplication is not allowed");
    }
    return make_number(value);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    const int start_col = column_;
    while (pos_ < src_.size() &&
           std::isalpha(static_cast<unsigned char>(src_[pos_])))
      advance();
    const std::string_view word = src_.substr(start, pos_ - start);
    const std::size_t digits_start = pos_;
    while (pos_ < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_])))
      advance();
    const std::string_view digits =
        src_.substr(digits_start, pos_ - digits_start);

    if (digits.empty()) {
      static constexpr Func kFuncs[] = {Func::Sin,  Func::Cos,  Func::Exp,
                                        Func::Ln,   Func::Sqrt, Func::Tanh};
      for (Func f : kFuncs) {
        if (word == func_name(f)) {
          if (!accept('(')) fail("expected '(' after " + std::string(word));
          NodePtr arg = parse_sum();
          if (!accept(')')) fail("expected ')'");
          return make_call(f, arg);
        }
      }
      throw SyntaxError("unknown identifier '" + std::string(word) + "'",
                        line_, start_col);
    }

    VarKind kind;
    if (word == "x") {
      kind = VarKind::X;
    } else if (word == "v") {
      kind = VarKind::V;
    } else if (word == "p") {
      kind = VarKind::P;
    } else if (word == "u") {
      kind = VarKind::U;
    } else {
      throw SyntaxError("unknown identifier '" + std::string(word) +
                            std::string(digits) + "'",
                        line_, start_col);
    }
    if (parametric_ != (kind == VarKind::U)) {
      throw SyntaxError(
          parametric_ ? "only surface parameters u<i> are allowed here"
                      : "surface parameter not allowed in a phase expression",
          line_, start_col);
    }
    int index = 0;
    auto res = std::from_chars(digits.data(), digits.data() + digits.size(),
                               index);
    if (res.ec != std::errc() || index < 1 || index > dimension_) {
      throw DimensionError("variable " + std::string(word) +
                           std::string(digits) + " outside 1.." +
                           std::to_string(dimension_));
    }
    return make_variable(kind, index - 1);
  }

  std::string_view src_;
  int dimension_;
  bool parametric_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

Expression::Expression() : Expression(make_number(0.0), 0) {}

Expression::Expression(NodePtr root, int dimension)
    : root_(std::move(root)), dimension_(dimension) {
  bool has_v = false;
  bool has_p = false;
  scan_fiber(*root_, has_v, has_p);
  if (has_v && has_p)
    throw MixedRepresentationError(
        "expression mixes velocity and momentum variables");
  if (has_v) fiber_ = Representation::V;
  if (has_p) fiber_ = Representation::P;
}

bool Expression::is_zero_literal() const noexcept {
  return root_->kind == Node::Kind::Number && root_->number == 0.0;
}

std::string Expression::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

Expression parse(std::string_view source, int dimension) {
  if (dimension < 1) throw InvalidArgument("dimension must be positive");
  return Expression(Parser(source, dimension, false).parse_all(), dimension);
}

Expression parse_parametric(std::string_view source, int param_count) {
  if (param_count < 1) throw InvalidArgument("parameter count must be positive");
  return Expression(Parser(source, param_count, true).parse_all(),
                    param_count);
}

Expression operator+(const Expression& a, const Expression& b) {
  return Expression(make_binary(BinOp::Add, a.root_ptr(), b.root_ptr()),
                    std::max(a.dimension(), b.dimension()));
}

Expression operator-(const Expression& a) {
  return Expression(make_negate(a.root_ptr()), a.dimension());
}

namespace scalar {

bool is_integer(double value) noexcept {
  return std::isfinite(value) && std::floor(value) == value;
}

double divide(double a, double b) {
  if (b == 0.0) throw EvalError("division by zero");
  return a / b;
}

double ln(double a) {
  if (!(a > 0.0)) throw EvalError("ln of non-positive value");
  return std::log(a);
}

double sqrt(double a) {
  if (a < 0.0) throw EvalError("sqrt of negative value");
  return std::sqrt(a);
}

double pow(double base, double exponent) {
  if (base == 0.0 && exponent < 0.0) throw EvalError("division by zero");
  if (base < 0.0 && !is_integer(exponent))
    throw EvalError("non-integer power of negative base");
  return std::pow(base, exponent);
}

}  // namespace scalar

double eval_scalar(const Expression& e, const PhasePoint& point) {
  if (e.fiber_rep() && *e.fiber_rep() != point.rep)
    throw InvalidArgument("expression uses " +
                          std::string(representation_name(*e.fiber_rep())) +
                          " variables but point is in " +
                          representation_name(point.rep) + "-representation");
  if (e.dimension() > point.dimension())
    throw DimensionError("point dimension smaller than expression dimension");
  return evaluate<double>(e.root(), [&](VarKind kind, int index) {
    if (kind == VarKind::X) return point.x[static_cast<std::size_t>(index)];
    return point.fiber[static_cast<std::size_t>(index)];
  }, [](double c) { return c; });
}

double eval_parametric(const Expression& e, const std::vector<double>& u) {
  if (static_cast<int>(u.size()) < e.dimension())
    throw DimensionError("too few surface parameters");
  return evaluate<double>(
      e.root(), [&](VarKind, int index) { return u[static_cast<std::size_t>(index)]; },
      [](double c) { return c; });
}

SyntaxError::SyntaxError(const std::string& message, int line, int column)
    : Error(ErrorCode::kSyntax, "syntax error at " + std::to_string(line) +
                                    ":" + std::to_string(column) + ": " +
                                    message),
      detail_(message),
      line_(line),
      column_(column) {}

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kSyntax: return "SyntaxError";
    case ErrorCode::kDimension: return "DimensionError";
    case ErrorCode::kMixedRepresentation: return "MixedRepresentationError";
    case ErrorCode::kEval: return "EvalError";
    case ErrorCode::kSingularMetric: return "SingularMetric";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kDegeneratePoint: return "DegeneratePoint";
    case ErrorCode::kMissingJets: return "MissingJets";
    case ErrorCode::kMissingGaugeTensor: return "MissingGaugeTensor";
    case ErrorCode::kAsymmetricGauge: return "AsymmetricGauge";
    case ErrorCode::kDegenerateSurface: return "DegenerateSurface";
    case ErrorCode::kIntegrationFailure: return "IntegrationFailure";
    case ErrorCode::kFile: return "FileError";
    case ErrorCode::kValidation: return "ValidationError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInternal: return "InternalError";
  }
  return "UnknownError";
}

}  // namespace nlab
