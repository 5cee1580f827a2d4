#include "steinlab/mpoly.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace steinlab {

namespace {

void check_dims(const MPoly& a, const MPoly& b) {
  if (a.dim != b.dim)
    throw std::invalid_argument("polynomial dimension mismatch: " +
                                std::to_string(a.dim) + " vs " + std::to_string(b.dim));
}

// (k-1)!! for even k >= 0; the moment E x^k under the standard Gaussian.
double double_factorial_moment(int k) {
  double v = 1.0;
  for (int j = k - 1; j >= 2; j -= 2) v *= j;
  return v;
}

std::string format_coeff(double c) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", c);
  return buf;
}

}  // namespace

MPoly MPoly::constant(int n, double v) {
  MPoly p(n);
  if (v != 0.0) p.terms.emplace(Mono(static_cast<std::size_t>(n), 0), v);
  return p;
}

MPoly MPoly::variable(int n, int i) {
  if (i < 0 || i >= n) throw std::invalid_argument("variable index out of range");
  MPoly p(n);
  Mono m(static_cast<std::size_t>(n), 0);
  m[static_cast<std::size_t>(i)] = 1;
  p.terms.emplace(std::move(m), 1.0);
  return p;
}

void MPoly::add_term(const Mono& m, double coeff) {
  if (static_cast<int>(m.size()) != dim)
    throw std::invalid_argument("exponent vector length does not match dimension");
  if (coeff == 0.0) return;
  auto it = terms.find(m);
  if (it == terms.end()) {
    terms.emplace(m, coeff);
  } else {
    it->second += coeff;
    if (it->second == 0.0) terms.erase(it);
  }
}

bool MPoly::is_zero(double tol) const {
  for (const auto& [m, c] : terms)
    if (std::abs(c) > tol) return false;
  return true;
}

int MPoly::total_degree() const {
  int deg = 0;
  for (const auto& [m, c] : terms) {
    int d = 0;
    for (auto e : m) d += e;
    if (d > deg) deg = d;
  }
  return deg;
}

MPoly MPoly::d(int i) const {
  if (i < 0 || i >= dim) throw std::invalid_argument("derivative index out of range");
  MPoly out(dim);
  for (const auto& [m, c] : terms) {
    const auto e = m[static_cast<std::size_t>(i)];
    if (e == 0) continue;
    Mono mm = m;
    mm[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(e - 1);
    out.add_term(mm, c * static_cast<double>(e));
  }
  return out;
}

double MPoly::eval(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != dim)
    throw std::invalid_argument("evaluation point length does not match dimension");
  double sum = 0.0;
  for (const auto& [m, c] : terms) {
    double t = c;
    for (std::size_t j = 0; j < m.size(); ++j) {
      const double xj = x[j];
      for (int e = 0; e < m[j]; ++e) t *= xj;
    }
    sum += t;
  }
  return sum;
}

std::string MPoly::str() const {
  if (terms.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms) {
    double mag = std::abs(c);
    const bool neg = c < 0.0;
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;

    std::string vars;
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m[j] == 0) continue;
      if (!vars.empty()) vars += "*";
      vars += "x" + std::to_string(j + 1);
      if (m[j] > 1) vars += "^" + std::to_string(m[j]);
    }
    if (vars.empty()) {
      out += format_coeff(mag);
    } else if (mag == 1.0) {
      out += vars;
    } else {
      out += format_coeff(mag) + "*" + vars;
    }
  }
  return out;
}

MPoly operator+(const MPoly& a, const MPoly& b) {
  check_dims(a, b);
  MPoly out = a;
  for (const auto& [m, c] : b.terms) out.add_term(m, c);
  return out;
}

MPoly operator-(const MPoly& a, const MPoly& b) {
  check_dims(a, b);
  MPoly out = a;
  for (const auto& [m, c] : b.terms) out.add_term(m, -c);
  return out;
}

MPoly operator*(const MPoly& a, const MPoly& b) {
  check_dims(a, b);
  MPoly out(a.dim);
  for (const auto& [ma, ca] : a.terms) {
    for (const auto& [mb, cb] : b.terms) {
      MPoly::Mono m(ma.size());
      for (std::size_t j = 0; j < m.size(); ++j) {
        const unsigned s = static_cast<unsigned>(ma[j]) + static_cast<unsigned>(mb[j]);
        if (s > 0xffffu) throw std::overflow_error("monomial exponent overflow");
        m[j] = static_cast<std::uint16_t>(s);
      }
      out.add_term(m, ca * cb);
    }
  }
  return out;
}

MPoly operator*(double s, const MPoly& a) {
  MPoly out(a.dim);
  if (s == 0.0) return out;
  for (const auto& [m, c] : a.terms) out.terms.emplace(m, s * c);
  return out;
}

namespace {

struct Scanner {
  const std::string& s;
  std::size_t i = 0;

  explicit Scanner(const std::string& text) : s(text) {}

  bool done() const { return i >= s.size(); }
  char peek() const { return done() ? '\0' : s[i]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("polynomial parse error at position " +
                                std::to_string(i) + ": " + what);
  }

  double number() {
    const std::size_t start = i;
    while (!done() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (!done() && s[i] == '.') {
      ++i;
      while (!done() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    }
    if (i == start || (i == start + 1 && s[start] == '.')) fail("expected a number");
    if (!done() && (s[i] == 'e' || s[i] == 'E')) {
      std::size_t j = i + 1;
      if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
      std::size_t k = j;
      while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
      if (k > j) i = k;  // otherwise leave the 'e' for the caller to reject
    }
    return std::stod(s.substr(start, i - start));
  }

  long integer() {
    const std::size_t start = i;
    while (!done() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start) fail("expected an integer");
    return std::stol(s.substr(start, i - start));
  }
};

}  // namespace

MPoly parse_mpoly(const std::string& text, int dim) {
  if (dim <= 0) throw std::invalid_argument("dimension must be positive");
  std::string compact;
  compact.reserve(text.size());
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) compact.push_back(ch);
  if (compact.empty()) throw std::invalid_argument("empty polynomial text");

  MPoly out(dim);
  Scanner sc(compact);
  while (!sc.done()) {
    double sign = 1.0;
    if (sc.peek() == '+' || sc.peek() == '-') {
      if (sc.peek() == '-') sign = -1.0;
      ++sc.i;
    }
    double coeff = sign;
    MPoly::Mono mono(static_cast<std::size_t>(dim), 0);
    bool expect_factor = true;
    while (expect_factor) {
      const char c = sc.peek();
      if (c == 'x') {
        ++sc.i;
        const long idx = sc.integer();
        if (idx < 1 || idx > dim)
          sc.fail("variable x" + std::to_string(idx) + " outside dimension " +
                  std::to_string(dim));
        long power = 1;
        if (sc.peek() == '^') {
          ++sc.i;
          power = sc.integer();
          if (power < 0) sc.fail("negative exponent");
        }
        const long e = mono[static_cast<std::size_t>(idx - 1)] + power;
        if (e > 0xffff) sc.fail("exponent too large");
        mono[static_cast<std::size_t>(idx - 1)] = static_cast<std::uint16_t>(e);
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        coeff *= sc.number();
      } else {
        sc.fail("expected a coefficient or a variable");
      }
      if (sc.peek() == '*') {
        ++sc.i;
        if (sc.done()) sc.fail("dangling '*'");
      } else {
        expect_factor = false;
      }
    }
    if (!sc.done() && sc.peek() != '+' && sc.peek() != '-')
      sc.fail(std::string("unexpected character '") + sc.peek() + "'");
    out.add_term(mono, coeff);
  }
  return out;
}

double gaussian_expectation(const MPoly& p) {
  double sum = 0.0;
  for (const auto& [m, c] : p.terms) {
    double t = c;
    bool odd = false;
    for (auto e : m) {
      if (e % 2 == 1) {
        odd = true;
        break;
      }
      t *= double_factorial_moment(e);
    }
    if (!odd) sum += t;
  }
  return sum;
}

}  // namespace steinlab
