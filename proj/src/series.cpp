#include "igrowth/series.hpp"

#include <numeric>
#include <sstream>

namespace igrowth::series {

TruncSeries::TruncSeries(int order, std::vector<BigInt> low) : coeffs_(order + 1, 0) {
  for (size_t i = 0; i < low.size() && i < coeffs_.size(); ++i) coeffs_[i] = std::move(low[i]);
}

TruncSeries TruncSeries::one(int order) {
  TruncSeries s(order);
  s[0] = 1;
  return s;
}

TruncSeries TruncSeries::z(int order) {
  TruncSeries s(order);
  if (order >= 1) s[1] = 1;
  return s;
}

std::string TruncSeries::str() const {
  std::ostringstream out;
  bool any = false;
  for (int i = 0; i <= order(); ++i) {
    if (coeffs_[i] == 0) continue;
    if (any) out << " + ";
    any = true;
    if (i == 0 || coeffs_[i] != 1) out << coeffs_[i].get_str() << (i ? "*" : "");
    if (i == 1) out << "z";
    if (i > 1) out << "z^" << i;
  }
  if (!any) out << "0";
  return out.str();
}

namespace {
void require_same_order(const TruncSeries& a, const TruncSeries& b) {
  if (a.order() != b.order())
    throw Error("series order mismatch: " + std::to_string(a.order()) + " vs " +
                std::to_string(b.order()));
}
}  // namespace

TruncSeries operator+(const TruncSeries& a, const TruncSeries& b) {
  require_same_order(a, b);
  TruncSeries c(a.order());
  for (int i = 0; i <= a.order(); ++i) c[i] = a[i] + b[i];
  return c;
}

TruncSeries operator-(const TruncSeries& a, const TruncSeries& b) {
  require_same_order(a, b);
  TruncSeries c(a.order());
  for (int i = 0; i <= a.order(); ++i) c[i] = a[i] - b[i];
  return c;
}

TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) {
  require_same_order(a, b);
  int n = a.order();
  TruncSeries c(n);
  for (int i = 0; i <= n; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; i + j <= n; ++j) {
      if (b[j] == 0) continue;
      mpz_addmul(c[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
  }
  return c;
}

TruncSeries operator/(const TruncSeries& a, const TruncSeries& b) {
  require_same_order(a, b);
  if (b[0] != 1 && b[0] != -1)
    throw Error("series division requires a unit constant term, got " + b[0].get_str());
  int n = a.order();
  TruncSeries q(n);
  std::vector<BigInt> rem = a.coeffs();
  for (int k = 0; k <= n; ++k) {
    q[k] = b[0] == 1 ? rem[k] : -rem[k];
    if (q[k] == 0) continue;
    for (int j = 0; k + j <= n; ++j)
      if (b[j] != 0) mpz_submul(rem[k + j].get_mpz_t(), q[k].get_mpz_t(), b[j].get_mpz_t());
  }
  return q;
}

TruncSeries expand_rational(const std::vector<BigInt>& p, const std::vector<BigInt>& q, int order) {
  if (q.empty() || (q[0] != 1 && q[0] != -1))
    throw Error("rational expansion requires Q(0) = 1 or -1");
  return TruncSeries(order, p) / TruncSeries(order, q);
}

// ---------------------------------------------------------------------------
// Polynomial fraction parser: sums/differences of juxtaposed factors, each
// factor an integer, 'z', or a parenthesized subexpression, optionally
// raised with ^k. A single top-level '/' splits numerator and denominator.

namespace {

using Poly = std::vector<BigInt>;

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

Poly poly_add(Poly a, const Poly& b, int sign) {
  if (b.size() > a.size()) a.resize(b.size(), 0);
  for (size_t i = 0; i < b.size(); ++i) a[i] += sign * b[i];
  return a;
}

struct PolyParser {
  std::string s;
  size_t i = 0;

  void skip() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw Error("malformed rational spec: " + what + " at position " + std::to_string(i));
  }

  Poly parse_expr() {
    skip();
    int sign = 1;
    if (eat('-')) sign = -1;
    else eat('+');
    Poly acc = poly_add({0}, parse_term(), sign);
    while (true) {
      skip();
      if (eat('+')) acc = poly_add(acc, parse_term(), 1);
      else if (eat('-')) acc = poly_add(acc, parse_term(), -1);
      else break;
    }
    return acc;
  }

  Poly parse_term() {
    Poly acc = parse_factor();
    while (true) {
      skip();
      if (i >= s.size()) break;
      char c = s[i];
      if (c == '*') {
        ++i;
        acc = poly_mul(acc, parse_factor());
      } else if (c == '(' || c == 'z' || (c >= '0' && c <= '9')) {
        acc = poly_mul(acc, parse_factor());  // juxtaposition
      } else {
        break;
      }
    }
    return acc;
  }

  Poly parse_factor() {
    Poly base = parse_base();
    skip();
    if (eat('^')) {
      skip();
      size_t j = i;
      while (j < s.size() && s[j] >= '0' && s[j] <= '9') ++j;
      if (j == i) fail("expected exponent");
      int e = std::stoi(s.substr(i, j - i));
      i = j;
      Poly acc = {1};
      for (int k = 0; k < e; ++k) acc = poly_mul(acc, base);
      return acc;
    }
    return base;
  }

  Poly parse_base() {
    skip();
    if (i >= s.size()) fail("unexpected end");
    char c = s[i];
    if (c == '(') {
      ++i;
      Poly inner = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (c == 'z') {
      ++i;
      return {0, 1};
    }
    if (c >= '0' && c <= '9') {
      size_t j = i;
      while (j < s.size() && s[j] >= '0' && s[j] <= '9') ++j;
      Poly p = {BigInt(s.substr(i, j - i))};
      i = j;
      return p;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

Poly parse_poly(const std::string& str) {
  PolyParser pp{str};
  Poly p = pp.parse_expr();
  pp.skip();
  if (pp.i != str.size()) pp.fail("trailing input");
  while (p.size() > 1 && p.back() == 0) p.pop_back();
  return p;
}

}  // namespace

std::pair<std::vector<BigInt>, std::vector<BigInt>> parse_rational(const std::string& spec) {
  int depth = 0;
  size_t slash = std::string::npos;
  for (size_t i = 0; i < spec.size(); ++i) {
    if (spec[i] == '(') ++depth;
    if (spec[i] == ')') --depth;
    if (spec[i] == '/' && depth == 0) {
      if (slash != std::string::npos) throw Error("malformed rational spec: several top-level '/'");
      slash = i;
    }
  }
  if (slash == std::string::npos) return {parse_poly(spec), {BigInt(1)}};
  return {parse_poly(spec.substr(0, slash)), parse_poly(spec.substr(slash + 1))};
}

// ---------------------------------------------------------------------------
// Reference sequences

CountVector reference_sequence(ReferenceKind kind, int order) {
  CountVector out;
  out.coeffs.assign(order + 1, 0);
  switch (kind) {
    case ReferenceKind::partitions: {
      out.coeffs[0] = 1;  // p(0) = 1 by convention
      for (int part = 1; part <= order; ++part)
        for (int m = part; m <= order; ++m) out.coeffs[m] += out.coeffs[m - part];
      break;
    }
    case ReferenceKind::tau: {
      for (int n = 1; n <= order; ++n)
        for (int d = 1; d <= n; ++d)
          if (n % d == 0) out.coeffs[n] += 1;
      break;
    }
    case ReferenceKind::sigma: {
      for (int n = 1; n <= order; ++n)
        for (int d = 1; d <= n; ++d)
          if (n % d == 0) out.coeffs[n] += d;
      break;
    }
    case ReferenceKind::phi: {
      for (int n = 1; n <= order; ++n)
        for (int i = 1; i < n; ++i)
          if (std::gcd(i, n) == 1) out.coeffs[n] += 1;
      break;
    }
    case ReferenceKind::pow2_floor_sqrt: {
      for (int n = 0; n <= order; ++n) {
        int r = 0;
        while ((r + 1) * (r + 1) <= n) ++r;
        BigInt v = 1;
        v <<= r;
        out.coeffs[n] = v;
      }
      break;
    }
  }
  return out;
}

ReferenceKind parse_reference_kind(const std::string& name) {
  if (name == "partitions") return ReferenceKind::partitions;
  if (name == "tau") return ReferenceKind::tau;
  if (name == "sigma") return ReferenceKind::sigma;
  if (name == "phi") return ReferenceKind::phi;
  if (name == "pow2_floor_sqrt") return ReferenceKind::pow2_floor_sqrt;
  throw Error("unknown reference sequence '" + name + "'");
}

CountVector diagonal_sum(const BivariateGrid& grid, int order) {
  if (grid.nx < order || grid.ny < order)
    throw Error("grid bounds insufficient for diagonal sums up to order " + std::to_string(order));
  CountVector out;
  out.coeffs.assign(order + 1, 0);
  for (int n = 0; n <= order; ++n)
    for (int i = 0; i <= n; ++i) out.coeffs[n] += grid.at(i, n - i);
  return out;
}

}  // namespace igrowth::series
