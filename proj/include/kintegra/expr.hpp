#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kintegra {

// Parse failure with the byte offset of the offending token in the source.
// `message` is the bare text; what() appends the offset.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (offset " + std::to_string(offset) + ")"),
        message(msg),
        offset(offset) {}
  std::string message;
  std::size_t offset;
};

// Immutable arithmetic expression over variables x1..xn with + - * /, integer
// powers, unary minus and sin/cos/exp/log/sqrt. '^' binds tighter than unary
// minus and its exponent is an integer literal (optionally signed).
class Expr {
 public:
  struct Node;  // opaque; defined in the implementation file

  Expr() = default;

  static Expr parse(std::string_view src);

  double eval(std::span<const double> vars) const;
  std::string str() const;           // reparses to an identical tree
  bool same_tree(const Expr& o) const;
  int max_var_index() const;         // 0 when constant
  bool empty() const { return root_ == nullptr; }

 private:
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
  friend class ExprParser;
};

}  // namespace kintegra
