#pragma once

// Exact integer / rational linear algebra on small dense matrices:
// rank, linear solves, Smith normal form, Hermite normal form.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <utility>
#include <vector>

#include "mirrorkit/polynomial.hpp"

namespace mirrorkit {

using IntMatrix = std::vector<std::vector<std::int64_t>>;
using RatMatrix = std::vector<std::vector<Rational>>;

inline IntMatrix identity_int(std::size_t n) {
  IntMatrix m(n, std::vector<std::int64_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix r(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (auto v : m[i]) r[i].emplace_back(static_cast<long>(v));
  return r;
}

inline std::size_t rank(RatMatrix a) {
  std::size_t rows = a.size(), cols = rows ? a[0].size() : 0, r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c] / a[r][c];
      for (std::size_t k = c; k < cols; ++k) a[i][k] -= f * a[r][k];
    }
    ++r;
  }
  return r;
}

inline Rational determinant(RatMatrix a) {
  std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      if (a[i][c] == 0) continue;
      Rational f = a[i][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[i][k] -= f * a[c][k];
    }
  }
  return det;
}

/// Unique solution of a square nonsingular system, or nullopt.
inline std::optional<std::vector<Rational>> solve(RatMatrix a, std::vector<Rational> b) {
  std::size_t n = a.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      Rational f = a[i][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[i][k] -= f * a[c][k];
      b[i] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

/// left * m * right = diag(invariants) padded with zero columns.
struct SmithForm {
  IntMatrix left;    // K x K, unimodular
  IntMatrix right;   // N x N, unimodular
  std::vector<std::int64_t> invariants;
};

inline SmithForm smith_normal_form(const IntMatrix& m) {
  std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  IntMatrix a = m, L = identity_int(rows), R = identity_int(cols);
  auto swap_rows = [&](std::size_t i, std::size_t j) {
    std::swap(a[i], a[j]);
    std::swap(L[i], L[j]);
  };
  auto swap_cols = [&](std::size_t i, std::size_t j) {
    for (auto& row : a) std::swap(row[i], row[j]);
    for (auto& row : R) std::swap(row[i], row[j]);
  };
  auto add_row = [&](std::size_t dst, std::size_t src, std::int64_t f) {  // row_dst += f row_src
    for (std::size_t k = 0; k < cols; ++k) a[dst][k] += f * a[src][k];
    for (std::size_t k = 0; k < rows; ++k) L[dst][k] += f * L[src][k];
  };
  auto add_col = [&](std::size_t dst, std::size_t src, std::int64_t f) {
    for (std::size_t k = 0; k < rows; ++k) a[k][dst] += f * a[k][src];
    for (std::size_t k = 0; k < cols; ++k) R[k][dst] += f * R[k][src];
  };

  std::size_t t = 0;
  for (; t < std::min(rows, cols); ++t) {
    // smallest nonzero entry of the trailing block becomes the pivot
    while (true) {
      std::int64_t best = 0;
      std::size_t bi = 0, bj = 0;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (a[i][j] != 0 && (best == 0 || std::llabs(a[i][j]) < best)) {
            best = std::llabs(a[i][j]);
            bi = i;
            bj = j;
          }
      if (best == 0) goto done;
      swap_rows(t, bi);
      swap_cols(t, bj);
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        std::int64_t f = a[i][t] / a[t][t];
        if (f) add_row(i, t, -f);
        if (a[i][t]) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        std::int64_t f = a[t][j] / a[t][t];
        if (f) add_col(j, t, -f);
        if (a[t][j]) clean = false;
      }
      if (!clean) continue;
      // divisibility of the remaining block
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (a[i][j] % a[t][t] != 0) {
            add_row(t, i, 1);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (a[t][t] < 0) {
      for (std::size_t k = 0; k < cols; ++k) a[t][k] = -a[t][k];
      for (std::size_t k = 0; k < rows; ++k) L[t][k] = -L[t][k];
    }
  }
done:
  SmithForm s{L, R, {}};
  for (std::size_t i = 0; i < std::min(rows, cols); ++i)
    if (a[i][i] != 0) s.invariants.push_back(a[i][i]);
  return s;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Row-style Hermite normal form of a full-row-rank integer matrix: pivots
/// positive, entries above each pivot reduced into [0, pivot).
inline IntMatrix hermite_normal_form(IntMatrix a) {
  std::size_t rows = a.size(), cols = rows ? a[0].size() : 0, r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    while (true) {
      std::size_t p = rows;
      for (std::size_t i = r; i < rows; ++i)
        if (a[i][c] != 0 && (p == rows || std::llabs(a[i][c]) < std::llabs(a[p][c]))) p = i;
      if (p == rows) break;
      std::swap(a[p], a[r]);
      bool clean = true;
      for (std::size_t i = r + 1; i < rows; ++i) {
        std::int64_t f = a[i][c] / a[r][c];
        for (std::size_t k = 0; k < cols; ++k) a[i][k] -= f * a[r][k];
        if (a[i][c]) clean = false;
      }
      if (clean) break;
    }
    if (r < rows && a[r][c] != 0) {
      if (a[r][c] < 0)
        for (auto& v : a[r]) v = -v;
      for (std::size_t i = 0; i < r; ++i) {
        std::int64_t f = floor_div(a[i][c], a[r][c]);
        for (std::size_t k = 0; k < cols; ++k) a[i][k] -= f * a[r][k];
      }
      ++r;
    }
  }
  return a;
}

}  // namespace mirrorkit
