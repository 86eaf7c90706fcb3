#include "ncfree/dsl.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <system_error>

namespace ncfree {

namespace {

class Parser {
 public:
  Parser(std::string_view text, int d, int q) : s_(text), d_(d), q_(q) {}

  NcExpr run() {
    NcExpr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NcExpr expr() {
    bool negate = accept('-');
    NcExpr e = term();
    if (negate) e *= -1.0;
    for (;;) {
      if (accept('+')) {
        e += term();
      } else if (accept('-')) {
        e -= term();
      } else {
        return e;
      }
    }
  }

  NcExpr term() {
    NcExpr e = factor();
    while (accept('*')) e = e * factor();
    return e;
  }

  NcExpr factor() {
    NcExpr e = atom();
    while (accept('\'')) e = adjoint(e);
    return e;
  }

  // Unsigned decimal at the cursor, without skipping whitespace.
  std::optional<double> decimal() {
    const std::size_t start = pos_;
    std::size_t p = pos_;
    auto digits = [&] {
      const std::size_t from = p;
      while (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) ++p;
      return p - from;
    };
    std::size_t n = digits();
    if (p < s_.size() && s_[p] == '.') {
      ++p;
      n += digits();
    }
    if (n == 0) return std::nullopt;
    if (p < s_.size() && (s_[p] == 'e' || s_[p] == 'E')) {
      std::size_t save = p;
      ++p;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (digits() == 0) p = save;
    }
    double v = 0.0;
    auto res = std::from_chars(s_.data() + start, s_.data() + p, v);
    if (res.ec != std::errc{}) return std::nullopt;
    pos_ = p;
    return v;
  }

  std::optional<double> signed_decimal() {
    skip_ws();
    const std::size_t save = pos_;
    double sign = 1.0;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
      if (s_[pos_] == '-') sign = -1.0;
      ++pos_;
      skip_ws();
    }
    auto v = decimal();
    if (!v) {
      pos_ = save;
      return std::nullopt;
    }
    return sign * *v;
  }

  std::optional<cplx> complex_scalar() {
    const std::size_t save = pos_;
    if (!accept('(')) return std::nullopt;
    auto re = signed_decimal();
    if (re) {
      skip_ws();
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
        const double sign = s_[pos_] == '-' ? -1.0 : 1.0;
        ++pos_;
        skip_ws();
        auto im = decimal();
        if (im && accept('i') && accept(')')) return cplx{*re, sign * *im};
      }
    }
    pos_ = save;
    return std::nullopt;
  }

  int integer() {
    const std::size_t start = pos_;
    int v = 0;
    auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (res.ec != std::errc{} || res.ptr == s_.data() + start) fail("expected letter index");
    pos_ = static_cast<std::size_t>(res.ptr - s_.data());
    return v;
  }

  NcExpr exp_atom() {
    expect('(');
    expect('i');
    double scale = 1.0;
    const std::size_t save = pos_;
    if (auto v = signed_decimal()) {
      skip_ws();
      const bool operand_follows = pos_ < s_.size() && s_[pos_] != '*' && s_[pos_] != '+' && s_[pos_] != '-' &&
                                   s_[pos_] != ')' && s_[pos_] != '\'';
      if (operand_follows) {
        scale = *v;
      } else {
        pos_ = save;
      }
    }
    const std::size_t base_pos = pos_;
    NcExpr base = expr();
    expect(')');
    if (!is_self_adjoint(base)) {
      pos_ = base_pos;
      fail("exponential base is not self-adjoint");
    }
    return NcExpr::exp(scale, base);
  }

  NcExpr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      if (auto z = complex_scalar()) return NcExpr::scalar(*z, d_, q_);
      ++pos_;
      NcExpr e = expr();
      expect(')');
      return e;
    }
    if (c == 'X' || c == 'A') {
      ++pos_;
      const int idx = integer();
      return NcExpr::letter(c == 'X' ? Letter::x(idx) : Letter::a(idx), d_, q_);
    }
    if (s_.substr(pos_, 3) == "exp") {
      pos_ += 3;
      return exp_atom();
    }
    if (auto v = decimal()) return NcExpr::scalar(*v, d_, q_);
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int d_;
  int q_;
};

std::string letter_text(const Letter& l) {
  switch (l.kind) {
    case Letter::Kind::X:
      return "X" + std::to_string(l.index);
    case Letter::Kind::A:
      return "A" + std::to_string(l.index);
    case Letter::Kind::AStar:
      return "A" + std::to_string(l.index) + "'";
  }
  return {};
}

std::string complex_text(cplx c) {
  std::string s = "(" + format_double(c.real());
  s += std::signbit(c.imag()) ? "-" : "+";
  s += format_double(std::abs(c.imag())) + "i)";
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

NcExpr parse(std::string_view text, int d, int q) { return Parser(text, d, q).run(); }

std::string to_text(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k > 0) s += "*";
    if (const auto* l = std::get_if<Letter>(&w[k])) {
      s += letter_text(*l);
      continue;
    }
    const auto& atom = std::get<ExpAtom>(w[k]);
    if (!atom.scale.is_constant()) throw std::invalid_argument("cannot render an atom with a quadrature-dependent scale");
    s += "exp(i " + format_double(atom.scale.constant_term()) + " (" + to_text(*atom.base) + "))";
  }
  return s;
}

std::string to_text(const NcExpr& e) {
  if (e.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [w, c] : e.terms()) {
    std::string body;
    bool negative = false;
    if (c.imag() == 0.0) {
      negative = std::signbit(c.real());
      const double mag = std::abs(c.real());
      if (w.empty()) {
        body = format_double(mag);
      } else if (mag == 1.0) {
        body = to_text(w);
      } else {
        body = format_double(mag) + "*" + to_text(w);
      }
    } else {
      body = complex_text(c);
      if (!w.empty()) body += "*" + to_text(w);
    }
    if (first) {
      s += negative ? "-" + body : body;
    } else {
      s += negative ? " - " + body : " + " + body;
    }
    first = false;
  }
  return s;
}

}  // namespace ncfree
