// Recursive-descent parser for polynomial strings over x1..xl, w1..wn,
// cw1..cwn, with ^ powers, * products, +/- sums, parentheses, real numeric
// literals and the imaginary unit i. Re(...), Im(...) and abs2(...) expand to
// (p+conj p)/2, (p-conj p)/2i and p*conj p.
#pragma once

#include <cctype>
#include <charconv>
#include <sstream>
#include <string>

#include "crx/layout.hpp"
#include "crx/poly.hpp"

namespace crx {

class PolyParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

class ExprParser {
 public:
  ExprParser(std::string_view s, GraphLayout lay) : s_(s), lay_(lay) {}

  Poly parse() {
    Poly p = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return p;
  }

 private:
  Poly expr() {
    skip_ws();
    bool neg = false;
    if (peek() == '+' || peek() == '-') neg = (get() == '-');
    Poly p = term();
    if (neg) p *= Complex(-1);
    for (;;) {
      skip_ws();
      char c = peek();
      if (c == '+' || c == '-') {
        get();
        Poly q = term();
        if (c == '-') q *= Complex(-1);
        p += q;
      } else {
        return p;
      }
    }
  }

  Poly term() {
    Poly p = factor();
    for (;;) {
      skip_ws();
      if (peek() == '*') {
        get();
        p = p * factor();
      } else {
        return p;
      }
    }
  }

  Poly factor() {
    Poly p = base();
    skip_ws();
    if (peek() == '^') {
      get();
      skip_ws();
      int k = integer();
      Poly r = Poly::constant(lay_.nvars(), Complex(1));
      for (int j = 0; j < k; ++j) r = r * p;
      return r;
    }
    return p;
  }

  Poly base() {
    skip_ws();
    char c = peek();
    if (c == '(') {
      get();
      Poly p = expr();
      expect(')');
      return p;
    }
    if (std::isdigit((unsigned char)c) || c == '.') return number();
    if (std::isalpha((unsigned char)c)) return ident();
    fail("unexpected character");
    return Poly();  // unreachable
  }

  Poly number() {
    size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isdigit((unsigned char)s_[pos_]) || s_[pos_] == '.' ||
            s_[pos_] == 'e' || s_[pos_] == 'E' ||
            ((s_[pos_] == '+' || s_[pos_] == '-') && pos_ > start &&
             (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E'))))
      ++pos_;
    double v = 0;
    auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (res.ec != std::errc()) fail("bad numeric literal");
    pos_ = res.ptr - s_.data();
    return Poly::constant(lay_.nvars(), Complex(v));
  }

  Poly ident() {
    size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum((unsigned char)s_[pos_])))
      ++pos_;
    std::string name(s_.substr(start, pos_ - start));
    if (name == "i") return Poly::constant(lay_.nvars(), Complex(0, 1));
    if (name == "Re" || name == "Im" || name == "abs2") {
      expect('(');
      Poly p = expr();
      expect(')');
      Poly pc = crx::conj(p, lay_);
      if (name == "Re") return (p + pc) * Complex(0.5);
      if (name == "Im") return (p - pc) * Complex(0, -0.5);
      return p * pc;
    }
    auto var = [&](const char* prefix, int count, auto index) -> Poly {
      size_t plen = std::string(prefix).size();
      int k = 0;
      auto res = std::from_chars(name.data() + plen, name.data() + name.size(), k);
      if (res.ec != std::errc() || res.ptr != name.data() + name.size() ||
          k < 1 || k > count)
        fail("unknown variable '" + name + "'");
      return Poly::variable(lay_.nvars(), index(k - 1));
    };
    if (name.rfind("cw", 0) == 0)
      return var("cw", lay_.n, [&](int j) { return lay_.cw(j); });
    if (name.rfind("x", 0) == 0)
      return var("x", lay_.l, [&](int j) { return lay_.x(j); });
    if (name.rfind("w", 0) == 0)
      return var("w", lay_.n, [&](int j) { return lay_.w(j); });
    fail("unknown identifier '" + name + "'");
    return Poly();  // unreachable
  }

  int integer() {
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
    if (pos_ == start) fail("expected integer exponent");
    return std::stoi(std::string(s_.substr(start, pos_ - start)));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  char get() { return s_[pos_++]; }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    get();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "parse error at offset " << pos_ << ": " << msg;
    throw PolyParseError(os.str());
  }

  std::string_view s_;
  GraphLayout lay_;
  size_t pos_ = 0;
};

}  // namespace detail

inline Poly parse_poly(std::string_view s, const GraphLayout& lay) {
  return detail::ExprParser(s, lay).parse();
}

// Canonical printing; parse_poly(print_poly(p)) reconstructs p exactly.
inline std::string print_poly(const Poly& p, const GraphLayout& lay) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.real();
    if (c.imag() >= 0)
      os << "+" << c.imag() << "*i)";
    else
      os << "-" << -c.imag() << "*i)";
    for (int j = 0; j < lay.l; ++j)
      if (m.e[lay.x(j)]) os << "*x" << (j + 1) << "^" << m.e[lay.x(j)];
    for (int j = 0; j < lay.n; ++j)
      if (m.e[lay.w(j)]) os << "*w" << (j + 1) << "^" << m.e[lay.w(j)];
    for (int j = 0; j < lay.n; ++j)
      if (m.e[lay.cw(j)]) os << "*cw" << (j + 1) << "^" << m.e[lay.cw(j)];
  }
  return os.str();
}

}  // namespace crx
