#pragma once

/**
 * @file expr.hpp
 * @brief Scalar expressions in one variable `s`, parsed by recursive descent
 * and evaluated over any dual scalar type.
 *
 * Grammar (whitespace insignificant):
 * @code
 *   expr   := term (("+" | "-") term)*
 *   term   := factor (("*" | "/") factor)*
 *   factor := unary ("^" unary)?
 *   unary  := "-" unary | atom
 *   atom   := number | "s" | ident "(" expr ")" | "(" expr ")"
 * @endcode
 * The exponent of `^` must be a numeric literal (optionally negated). Note
 * that `-s^2` therefore reads as `(-s)^2`. U+2212 is accepted as a minus.
 *
 * Evaluating at s₀ + ε·1 yields the value and the exact derivative at s₀.
 */

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "dl3/dual.hpp"
#include "dl3/error.hpp"

namespace dl3::expr {

enum class BinOp { Add, Sub, Mul, Div };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Number {
  double value;
};
struct Variable {};
struct Negate {
  NodePtr operand;
};
struct Binary {
  BinOp op;
  NodePtr lhs;
  NodePtr rhs;
};
struct Power {
  NodePtr base;
  double exponent;
};
struct Call {
  Fn fn;
  NodePtr arg;
};

struct Node {
  std::variant<Number, Variable, Negate, Binary, Power, Call> kind;
  std::size_t offset = 0;
  std::size_t length = 0;
};

inline constexpr std::pair<std::string_view, Fn> kFunctions[] = {
    {"sin", Fn::Sin},   {"cos", Fn::Cos}, {"sinh", Fn::Sinh}, {"cosh", Fn::Cosh},
    {"exp", Fn::Exp},   {"ln", Fn::Ln},   {"sqrt", Fn::Sqrt}, {"tanh", Fn::Tanh},
};

inline std::optional<Fn> function_by_name(std::string_view name) {
  for (const auto& [n, f] : kFunctions) {
    if (n == name) return f;
  }
  return std::nullopt;
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::size_t length;
  double number = 0.0;
  std::string_view text{};
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    std::size_t start = pos_;
    if (pos_ >= src_.size()) return {Tok::End, start, 0};
    char c = src_[pos_];
    auto single = [&](Tok k) {
      ++pos_;
      return Token{k, start, 1};
    };
    switch (c) {
      case '+': return single(Tok::Plus);
      case '-': return single(Tok::Minus);
      case '*': return single(Tok::Star);
      case '/': return single(Tok::Slash);
      case '^': return single(Tok::Caret);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      default: break;
    }
    if (src_.substr(pos_, 3) == "\xE2\x88\x92") {  // U+2212 MINUS SIGN
      pos_ += 3;
      return {Tok::Minus, start, 3};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(start);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      return {Tok::Ident, start, pos_ - start, 0.0, src_.substr(start, pos_ - start)};
    }
    throw SourceError(Errc::Parse, std::string("unexpected character '") + c + "'", start, 1);
  }

 private:
  Token number(std::size_t start) {
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    std::string_view text = src_.substr(start, pos_ - start);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw SourceError(Errc::Parse, "malformed number '" + std::string(text) + "'", start, text.size());
    }
    return {Tok::Number, start, text.size(), value, text};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src), src_(src) { advance(); }

  NodePtr parse_all() {
    NodePtr root = expr();
    if (tok_.kind != Tok::End) {
      if (tok_.kind == Tok::RParen) throw SourceError(Errc::Parse, "unbalanced parenthesis", tok_.offset, 1);
      throw SourceError(Errc::Parse, "unexpected trailing token", tok_.offset, tok_.length);
    }
    return root;
  }

 private:
  void advance() { tok_ = lexer_.next(); }

  static NodePtr make(Node node) { return std::make_shared<const Node>(std::move(node)); }

  static std::size_t end_of(const NodePtr& n) { return n->offset + n->length; }

  NodePtr expr() {
    NodePtr lhs = term();
    while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
      BinOp op = tok_.kind == Tok::Plus ? BinOp::Add : BinOp::Sub;
      advance();
      NodePtr rhs = term();
      std::size_t off = lhs->offset;
      lhs = make({Binary{op, lhs, rhs}, off, end_of(rhs) - off});
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
      BinOp op = tok_.kind == Tok::Star ? BinOp::Mul : BinOp::Div;
      advance();
      NodePtr rhs = factor();
      std::size_t off = lhs->offset;
      lhs = make({Binary{op, lhs, rhs}, off, end_of(rhs) - off});
    }
    return lhs;
  }

  NodePtr factor() {
    NodePtr base = unary();
    if (tok_.kind != Tok::Caret) return base;
    advance();
    NodePtr exponent = unary();
    std::optional<double> value = literal_value(*exponent);
    if (!value) {
      throw SourceError(Errc::Parse, "exponent must be a numeric literal", exponent->offset, exponent->length);
    }
    std::size_t off = base->offset;
    return make({Power{base, *value}, off, end_of(exponent) - off});
  }

  static std::optional<double> literal_value(const Node& n) {
    if (const auto* num = std::get_if<Number>(&n.kind)) return num->value;
    if (const auto* neg = std::get_if<Negate>(&n.kind)) {
      if (auto v = literal_value(*neg->operand)) return -*v;
    }
    return std::nullopt;
  }

  NodePtr unary() {
    if (tok_.kind == Tok::Minus) {
      std::size_t off = tok_.offset;
      advance();
      NodePtr operand = unary();
      return make({Negate{operand}, off, end_of(operand) - off});
    }
    return atom();
  }

  NodePtr atom() {
    Token t = tok_;
    switch (t.kind) {
      case Tok::Number:
        advance();
        return make({Number{t.number}, t.offset, t.length});
      case Tok::Ident: {
        advance();
        if (t.text == "s") return make({Variable{}, t.offset, t.length});
        std::optional<Fn> fn = function_by_name(t.text);
        if (!fn) {
          throw SourceError(Errc::Parse, "unknown identifier '" + std::string(t.text) + "'", t.offset, t.length);
        }
        if (tok_.kind != Tok::LParen) {
          throw SourceError(Errc::Parse, "expected '(' after function name", tok_.offset, tok_.length);
        }
        advance();
        NodePtr arg = expr();
        std::size_t close = expect_close();
        return make({Call{*fn, arg}, t.offset, close + 1 - t.offset});
      }
      case Tok::LParen: {
        advance();
        NodePtr inner = expr();
        std::size_t close = expect_close();
        // Parentheses do not create nodes; widen the span to include them.
        Node widened = *inner;
        widened.offset = t.offset;
        widened.length = close + 1 - t.offset;
        return make(std::move(widened));
      }
      case Tok::End:
        throw SourceError(Errc::Parse, "unexpected end of input", t.offset);
      case Tok::RParen:
        throw SourceError(Errc::Parse, "unbalanced parenthesis", t.offset, 1);
      default:
        throw SourceError(Errc::Parse, "unexpected token", t.offset, t.length);
    }
  }

  std::size_t expect_close() {
    if (tok_.kind != Tok::RParen) {
      throw SourceError(Errc::Parse, "unbalanced parenthesis", tok_.offset, tok_.length);
    }
    std::size_t at = tok_.offset;
    advance();
    return at;
  }

  Lexer lexer_;
  std::string_view src_;
  Token tok_{Tok::End, 0, 0};
};

template <typename T>
T eval_node(const Node& n, const T& s, std::string_view src) {
  try {
    return std::visit(
        [&](const auto& k) -> T {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Number>) {
            return T(k.value);
          } else if constexpr (std::is_same_v<K, Variable>) {
            return s;
          } else if constexpr (std::is_same_v<K, Negate>) {
            return -eval_node(*k.operand, s, src);
          } else if constexpr (std::is_same_v<K, Binary>) {
            T a = eval_node(*k.lhs, s, src);
            T b = eval_node(*k.rhs, s, src);
            switch (k.op) {
              case BinOp::Add: return a + b;
              case BinOp::Sub: return a - b;
              case BinOp::Mul: return a * b;
              case BinOp::Div:
                if constexpr (std::is_same_v<T, double>) {
                  if (b == 0.0) throw Error(Errc::PureDualDivisor, "division by zero");
                  return a / b;
                } else {
                  return div(a, b);
                }
            }
            return a;
          } else if constexpr (std::is_same_v<K, Power>) {
            return lift_pow(eval_node(*k.base, s, src), k.exponent);
          } else {
            return lift(k.fn, eval_node(*k.arg, s, src));
          }
        },
        n.kind);
  } catch (const SourceError&) {
    throw;
  } catch (const Error& e) {
    std::string_view text = src.substr(std::min(n.offset, src.size()), n.length);
    throw SourceError(e.code(), std::string(e.what()) + " in '" + std::string(text) + "'", n.offset, n.length);
  }
}

inline void print_node(const Node& n, std::string& out);

inline void print_base(const Node& n, std::string& out) {
  bool wrap = std::holds_alternative<Binary>(n.kind) || std::holds_alternative<Power>(n.kind);
  if (wrap) out += '(';
  print_node(n, out);
  if (wrap) out += ')';
}

inline void print_node(const Node& n, std::string& out) {
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Number>) {
          out += format_number(k.value);
        } else if constexpr (std::is_same_v<K, Variable>) {
          out += 's';
        } else if constexpr (std::is_same_v<K, Negate>) {
          out += '-';
          print_base(*k.operand, out);
        } else if constexpr (std::is_same_v<K, Binary>) {
          static constexpr char ops[] = {'+', '-', '*', '/'};
          out += '(';
          print_node(*k.lhs, out);
          out += ' ';
          out += ops[static_cast<int>(k.op)];
          out += ' ';
          print_node(*k.rhs, out);
          out += ')';
        } else if constexpr (std::is_same_v<K, Power>) {
          print_base(*k.base, out);
          out += '^';
          out += format_number(k.exponent);
        } else {
          for (const auto& [name, f] : kFunctions) {
            if (f == k.fn) out += name;
          }
          out += '(';
          print_node(*k.arg, out);
          out += ')';
        }
      },
      n.kind);
}

}  // namespace detail

/// An immutable parsed expression; cheap to copy and safe to share.
class Expr {
 public:
  Expr() = default;
  Expr(NodePtr root, std::string source) : root_(std::move(root)), source_(std::move(source)) {}

  const Node& root() const { return *root_; }
  const std::string& source() const { return source_; }
  bool empty() const { return !root_; }

  template <typename T>
  T eval(const T& s) const {
    return detail::eval_node(*root_, s, source_);
  }

  /// Canonical, fully parenthesised text; parses back to the same tree.
  std::string to_string() const {
    std::string out;
    detail::print_node(*root_, out);
    return out;
  }

 private:
  NodePtr root_;
  std::string source_;
};

inline Expr parse(std::string_view text) {
  detail::Parser parser(text);
  NodePtr root = parser.parse_all();
  return Expr(std::move(root), std::string(text));
}

inline DualScalar eval(const Expr& e, const DualScalar& s) { return e.eval(s); }

/// Structural equality, ignoring source spans.
inline bool same_tree(const Node& a, const Node& b) {
  if (a.kind.index() != b.kind.index()) return false;
  return std::visit(
      [&](const auto& ka) {
        using K = std::decay_t<decltype(ka)>;
        const K& kb = std::get<K>(b.kind);
        if constexpr (std::is_same_v<K, Number>) {
          return ka.value == kb.value;
        } else if constexpr (std::is_same_v<K, Variable>) {
          return true;
        } else if constexpr (std::is_same_v<K, Negate>) {
          return same_tree(*ka.operand, *kb.operand);
        } else if constexpr (std::is_same_v<K, Binary>) {
          return ka.op == kb.op && same_tree(*ka.lhs, *kb.lhs) && same_tree(*ka.rhs, *kb.rhs);
        } else if constexpr (std::is_same_v<K, Power>) {
          return ka.exponent == kb.exponent && same_tree(*ka.base, *kb.base);
        } else {
          return ka.fn == kb.fn && same_tree(*ka.arg, *kb.arg);
        }
      },
      a.kind);
}

}  // namespace dl3::expr
