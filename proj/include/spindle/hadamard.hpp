#pragma once

#include "spindle/matrix.hpp"

#include <vector>

namespace spindle {

// +-1 matrix of order d = 2^q built by the doubling recursion
//   H_1 = [1],  H_{2d} = [[H_d, H_d], [H_d, -H_d]].
// Entries are kept as exact integers; dense() converts to double (exact for
// +-1). First row and first column are all ones.
struct HadamardMatrix {
  int dim = 0;          // d, a power of two
  int log2_dim = 0;     // q with d = 2^q
  IntMatrix entries;    // d x d, entries in {-1, +1}

  Matrix dense() const { return entries.cast<double>(); }
};

// The (d-1) x d matrix left after removing the constant first row.
struct StrippedHadamard {
  int dim = 0;          // d of the source matrix; this has d-1 rows
  IntMatrix entries;

  Matrix dense() const { return entries.cast<double>(); }
};

// A +-1 pattern of length q; expands to a vector of length 2^q.
using BitPattern = std::vector<int>;

// Largest supported order is 2^12 = 4096 (the dense d x d buffer stays near
// 128 MiB of int64 there; beyond that this construction is the wrong tool).
inline constexpr int kMaxLog2Dim = 12;

// Builds H_{2^q}. Throws std::invalid_argument for q < 0 or q > kMaxLog2Dim.
HadamardMatrix sylvester(int q);

StrippedHadamard strip_first_row(const HadamardMatrix& h);

// The bit pattern b with b[j] = +1 when bit j of t is 0 and -1 when it is 1;
// psi_expand(bit_pattern_for_row(q, t)) equals row t of sylvester(q).
BitPattern bit_pattern_for_row(int q, int t);

// psi(b)[u] = product of b[j] over the set bits j of u, for u = 0..2^|b|-1
// (so psi(b)[0] = 1). Computed in integer arithmetic.
IntVector psi_expand(const BitPattern& b);

// product_i (1 + b[i]*c[i]), which equals psi(b) . psi(c) exactly: 2^q when
// b == c and 0 otherwise. Throws on length mismatch or non +-1 entries.
std::int64_t kernel_dot(const BitPattern& b, const BitPattern& c);

}  // namespace spindle
