#include "spindle/hadamard.hpp"

#include <stdexcept>
#include <string>

namespace spindle {

namespace {

void check_pattern(const BitPattern& b, const char* name) {
  if (b.empty() || b.size() > static_cast<size_t>(kMaxLog2Dim))
    throw std::invalid_argument(std::string(name) + ": pattern length must be in [1, " +
                                std::to_string(kMaxLog2Dim) + "]");
  for (int v : b)
    if (v != 1 && v != -1)
      throw std::invalid_argument(std::string(name) + ": pattern entries must be +-1");
}

}  // namespace

HadamardMatrix sylvester(int q) {
  if (q < 0 || q > kMaxLog2Dim)
    throw std::invalid_argument("sylvester: q must be in [0, " + std::to_string(kMaxLog2Dim) +
                                "], got " + std::to_string(q));
  IntMatrix h(1, 1);
  h(0, 0) = 1;
  for (int step = 0; step < q; ++step) {
    const Eigen::Index d = h.rows();
    IntMatrix next(2 * d, 2 * d);
    next.topLeftCorner(d, d) = h;
    next.topRightCorner(d, d) = h;
    next.bottomLeftCorner(d, d) = h;
    next.bottomRightCorner(d, d) = -h;
    h = std::move(next);
  }
  HadamardMatrix out;
  out.dim = 1 << q;
  out.log2_dim = q;
  out.entries = std::move(h);
  return out;
}

StrippedHadamard strip_first_row(const HadamardMatrix& h) {
  if (h.dim < 2) throw std::invalid_argument("strip_first_row: need dim >= 2");
  StrippedHadamard out;
  out.dim = h.dim;
  out.entries = h.entries.bottomRows(h.dim - 1);
  return out;
}

BitPattern bit_pattern_for_row(int q, int t) {
  if (q < 1 || q > kMaxLog2Dim) throw std::invalid_argument("bit_pattern_for_row: bad q");
  if (t < 0 || t >= (1 << q)) throw std::invalid_argument("bit_pattern_for_row: bad row index");
  BitPattern b(static_cast<size_t>(q));
  for (int j = 0; j < q; ++j) b[static_cast<size_t>(j)] = (t >> j) & 1 ? -1 : 1;
  return b;
}

IntVector psi_expand(const BitPattern& b) {
  check_pattern(b, "psi_expand");
  const int q = static_cast<int>(b.size());
  IntVector out(Eigen::Index(1) << q);
  out(0) = 1;
  for (int j = 0; j < q; ++j) {
    const Eigen::Index half = Eigen::Index(1) << j;
    for (Eigen::Index u = 0; u < half; ++u) out(half + u) = out(u) * b[static_cast<size_t>(j)];
  }
  return out;
}

std::int64_t kernel_dot(const BitPattern& b, const BitPattern& c) {
  check_pattern(b, "kernel_dot");
  check_pattern(c, "kernel_dot");
  if (b.size() != c.size()) throw std::invalid_argument("kernel_dot: pattern length mismatch");
  std::int64_t prod = 1;
  for (size_t i = 0; i < b.size(); ++i) prod *= 1 + static_cast<std::int64_t>(b[i]) * c[i];
  return prod;
}

}  // namespace spindle
