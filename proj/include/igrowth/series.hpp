#pragma once

#include <string>
#include <vector>

#include "igrowth/common.hpp"

namespace igrowth::series {

// Formal power series truncated at a fixed order N: coefficients c_0..c_N,
// exact integers. Arithmetic never consults discarded orders; mixing orders
// is a caller error, not silent truncation.
class TruncSeries {
 public:
  TruncSeries() = default;
  explicit TruncSeries(int order) : coeffs_(order + 1, 0) {}
  TruncSeries(int order, std::vector<BigInt> low);  // low coefficients, rest 0

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const BigInt& operator[](int i) const { return coeffs_[i]; }
  BigInt& operator[](int i) { return coeffs_[i]; }
  const std::vector<BigInt>& coeffs() const { return coeffs_; }

  bool operator==(const TruncSeries& o) const { return coeffs_ == o.coeffs_; }

  static TruncSeries zero(int order) { return TruncSeries(order); }
  static TruncSeries one(int order);
  static TruncSeries z(int order);

  std::string str() const;  // "1 + 2*z^2 + ..." for diagnostics

 private:
  std::vector<BigInt> coeffs_;
};

TruncSeries operator+(const TruncSeries& a, const TruncSeries& b);
TruncSeries operator-(const TruncSeries& a, const TruncSeries& b);
TruncSeries operator*(const TruncSeries& a, const TruncSeries& b);
// Quotient q with q*b = a at every retained order; b must have constant
// term 1 or -1.
TruncSeries operator/(const TruncSeries& a, const TruncSeries& b);

// Truncated expansion of P/Q from polynomial coefficient lists; Q(0) = +-1.
TruncSeries expand_rational(const std::vector<BigInt>& p, const std::vector<BigInt>& q, int order);

// Parses a polynomial-fraction spec like "z^4(1+3z)/((1-z)^3(1+z)^2)".
// Returns {P, Q} coefficient lists (Q = {1} if there is no '/').
std::pair<std::vector<BigInt>, std::vector<BigInt>> parse_rational(const std::string& spec);

enum class CountMode { distinct_words, derivations };

struct CountVector {
  std::vector<BigInt> coeffs;  // c_0..c_N
  CountMode mode = CountMode::distinct_words;
  bool truncated = false;
};

enum class ReferenceKind { partitions, tau, sigma, phi, pow2_floor_sqrt };

// Named reference sequences, computed by elementary independent algorithms
// (partition DP, trial division, gcd loop), never via the grammar machinery.
// Indexing: partitions has c_0 = 1; tau, sigma, phi have c_0 = 0 (and
// phi(1) = 0, counting 1 <= i < n coprime to n); pow2_floor_sqrt has c_0 = 1.
CountVector reference_sequence(ReferenceKind kind, int order);
ReferenceKind parse_reference_kind(const std::string& name);  // throws Error

struct BivariateGrid {
  int nx = 0, ny = 0;
  std::vector<BigInt> cells;  // dense, (nx+1)*(ny+1), row-major over x

  BivariateGrid() = default;
  BivariateGrid(int nx, int ny) : nx(nx), ny(ny), cells((nx + 1) * (ny + 1), 0) {}
  const BigInt& at(int i, int j) const { return cells[i * (ny + 1) + j]; }
  BigInt& at(int i, int j) { return cells[i * (ny + 1) + j]; }
};

// c_n = sum over i+j = n of grid[i,j]; requires nx >= order and ny >= order.
CountVector diagonal_sum(const BivariateGrid& grid, int order);

}  // namespace igrowth::series
