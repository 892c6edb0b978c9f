#include "holodisc/expression.hpp"
#include "holodisc/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>

namespace holodisc {

struct Expression::Node {
  enum class Kind { Constant, Variable, Unary, Binary, Call };
  Kind kind = Kind::Constant;
  cplx value{};
  std::size_t variable = 0;
  char op = 0;
  std::string function;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

const std::map<std::string, int, std::less<>>& function_arity() {
  static const std::map<std::string, int, std::less<>> table = {
      {"exp", 1}, {"log", 1}, {"sqrt", 1}, {"sin", 1}, {"cos", 1}, {"conj", 1},
      {"re", 1},  {"im", 1},  {"abs", 1},  {"arg", 1}, {"pow", 2},
  };
  return table;
}

class Parser {
public:
  Parser(std::string_view text, const std::vector<std::string>& variables, int line, int offset)
      : text_(text), variables_(variables), line_(line), offset_(offset) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_, offset_ + static_cast<int>(pos_) + 1);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr binary(char op, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->op = op;
    n->args = {std::move(lhs), std::move(rhs)};
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = binary('+', lhs, term());
      else if (accept('-')) lhs = binary('-', lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = binary('*', lhs, unary());
      else if (accept('/')) lhs = binary('/', lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Unary;
      n->op = '-';
      n->args = {unary()};
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return binary('^', base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    // strtod needs a terminated buffer.
    std::string buf(text_.substr(pos_));
    char* end = nullptr;
    double v = std::strtod(buf.c_str(), &end);
    std::size_t used = static_cast<std::size_t>(end - buf.c_str());
    if (used == 0) fail("malformed number");
    pos_ += used;
    auto n = std::make_shared<Node>();
    n->value = v;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      auto it = function_arity().find(name);
      if (it == function_arity().end()) {
        pos_ = start;
        fail("unknown function '" + name + "'");
      }
      ++pos_;
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Call;
      n->function = name;
      n->args.push_back(expr());
      while (accept(',')) n->args.push_back(expr());
      if (!accept(')')) fail("expected ')'");
      if (static_cast<int>(n->args.size()) != it->second)
        fail("function '" + name + "' takes " + std::to_string(it->second) + " argument(s)");
      return n;
    }
    for (std::size_t k = 0; k < variables_.size(); ++k) {
      if (variables_[k] == name) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Variable;
        n->variable = k;
        return n;
      }
    }
    auto n = std::make_shared<Node>();
    if (name == "i") n->value = I;
    else if (name == "pi") n->value = kPi;
    else {
      pos_ = start;
      fail("unknown name '" + name + "'");
    }
    return n;
  }

  std::string_view text_;
  const std::vector<std::string>& variables_;
  int line_;
  int offset_;
  std::size_t pos_ = 0;
};

cplx eval_node(const Node& n, std::span<const cplx> values) {
  switch (n.kind) {
  case Node::Kind::Constant:
    return n.value;
  case Node::Kind::Variable:
    return values[n.variable];
  case Node::Kind::Unary:
    return -eval_node(*n.args[0], values);
  case Node::Kind::Binary: {
    const cplx a = eval_node(*n.args[0], values);
    const cplx b = eval_node(*n.args[1], values);
    switch (n.op) {
    case '+': return a + b;
    case '-': return a - b;
    case '*': return a * b;
    case '/': return a / b;
    default: {
      // Integer exponents by repeated multiplication keep polynomials exact.
      if (b.imag() == 0.0 && b.real() == std::round(b.real()) && std::abs(b.real()) <= 64) {
        int k = static_cast<int>(b.real());
        cplx r = 1.0;
        for (int j = 0; j < std::abs(k); ++j) r *= a;
        return k >= 0 ? r : 1.0 / r;
      }
      return std::pow(a, b);
    }
    }
  }
  case Node::Kind::Call: {
    const cplx a = eval_node(*n.args[0], values);
    const std::string& f = n.function;
    if (f == "exp") return std::exp(a);
    if (f == "log") return std::log(a);
    if (f == "sqrt") return std::sqrt(a);
    if (f == "sin") return std::sin(a);
    if (f == "cos") return std::cos(a);
    if (f == "conj") return std::conj(a);
    if (f == "re") return a.real();
    if (f == "im") return a.imag();
    if (f == "abs") return std::abs(a);
    if (f == "arg") return std::arg(a);
    if (f == "pow") return std::pow(a, eval_node(*n.args[1], values));
    break;
  }
  }
  return {};
}

} // namespace

Expression Expression::parse(std::string_view text, std::vector<std::string> variables, int line,
                             int column_offset) {
  Expression e;
  Parser parser(text, variables, line, column_offset);
  e.root_ = parser.parse();
  e.variables_ = std::move(variables);
  e.source_ = std::string(text);
  return e;
}

cplx Expression::evaluate(std::span<const cplx> values) const {
  if (!root_) throw Error(ErrorCode::InvalidArgument, "empty expression");
  if (values.size() != variables_.size())
    throw Error(ErrorCode::InvalidArgument, "expression expects " +
                                                std::to_string(variables_.size()) + " values");
  return eval_node(*root_, values);
}

std::vector<std::string> coordinate_variables(int n) {
  std::vector<std::string> names;
  for (const char* prefix : {"z", "zb", "x", "y"})
    for (int j = 1; j <= n; ++j) names.push_back(prefix + std::to_string(j));
  return names;
}

std::vector<cplx> coordinate_values(const CVector& z) {
  const auto n = z.size();
  std::vector<cplx> v(static_cast<std::size_t>(4 * n));
  for (Eigen::Index j = 0; j < n; ++j) {
    v[j] = z(j);
    v[n + j] = std::conj(z(j));
    v[2 * n + j] = z(j).real();
    v[3 * n + j] = z(j).imag();
  }
  return v;
}

} // namespace holodisc
