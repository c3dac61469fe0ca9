#pragma once

// Reader for rational-function strings such as "(q^2 - 1)/(3*q + z)".
// Accepts everything RatFunc::to_string produces.

#include <cctype>
#include <string>
#include <string_view>

#include "mirrorkit/rational_function.hpp"

namespace mirrorkit {

namespace detail {

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view s) : s_(s) {}

  RatFunc parse() {
    RatFunc r = expr();
    skip();
    if (pos_ != s_.size()) fail("trailing characters");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorKind::ParseError, why + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  RatFunc expr() {
    RatFunc acc = term();
    while (true) {
      if (eat('+')) acc += term();
      else if (eat('-')) acc -= term();
      else return acc;
    }
  }
  RatFunc term() {
    RatFunc acc = unary();
    while (true) {
      if (eat('*')) acc *= unary();
      else if (eat('/')) acc /= unary();
      else return acc;
    }
  }
  RatFunc unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  RatFunc power() {
    RatFunc base = atom();
    if (eat('^')) {
      skip();
      bool neg = false;
      if (eat('-')) neg = true;
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected exponent");
      int e = std::stoi(std::string(s_.substr(start, pos_ - start)));
      return base.pow(neg ? -e : e);
    }
    return base;
  }
  RatFunc atom() {
    skip();
    if (eat('(')) {
      RatFunc r = expr();
      if (!eat(')')) fail("expected ')'");
      return r;
    }
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return RatFunc(Rational(Integer(std::string(s_.substr(start, pos_ - start)))));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      auto id = var::parse(name);
      if (!id) fail("unknown variable '" + name + "'");
      return RatFunc::variable(*id);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline RatFunc parse_ratfunc(std::string_view s) { return detail::ExpressionParser(s).parse(); }

}  // namespace mirrorkit
