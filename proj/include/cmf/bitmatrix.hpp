#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cmf {

// Dense symmetric bit matrix: one bit per entry, 64-entry words per row.
// Dense storage is deliberate — the model evaluates every pair each step.
class BitMatrix {
 public:
  BitMatrix() = default;
  explicit BitMatrix(int n)
      : n_(n), wpr_((n + 63) / 64), w_(static_cast<std::size_t>(n) * wpr_, 0) {
    if (n < 0) throw std::invalid_argument("BitMatrix: negative size");
  }

  int size() const { return n_; }
  int words_per_row() const { return wpr_; }

  bool get(int i, int j) const {
    return (w_[static_cast<std::size_t>(i) * wpr_ + (j >> 6)] >> (j & 63)) & 1u;
  }

  void set(int i, int j, bool v) {
    std::uint64_t& word = w_[static_cast<std::size_t>(i) * wpr_ + (j >> 6)];
    const std::uint64_t mask = std::uint64_t{1} << (j & 63);
    if (v)
      word |= mask;
    else
      word &= ~mask;
  }

  // Sets both (i,j) and (j,i).
  void set_sym(int i, int j, bool v) {
    set(i, j, v);
    if (i != j) set(j, i, v);
  }

  const std::uint64_t* row(int i) const { return w_.data() + static_cast<std::size_t>(i) * wpr_; }

  // Row popcount; with a unit diagonal this is the self-loop-inclusive degree.
  int degree(int i) const {
    const std::uint64_t* r = row(i);
    int c = 0;
    for (int w = 0; w < wpr_; ++w) c += std::popcount(r[w]);
    return c;
  }

  // |N(i) ∩ N(j)| via word-wise AND.
  int common_neighbors(int i, int j) const {
    const std::uint64_t* a = row(i);
    const std::uint64_t* b = row(j);
    int c = 0;
    for (int w = 0; w < wpr_; ++w) c += std::popcount(a[w] & b[w]);
    return c;
  }

  std::uint64_t count_ones() const {
    std::uint64_t c = 0;
    for (std::uint64_t w : w_) c += std::popcount(w);
    return c;
  }

  void fill_diagonal(bool v) {
    for (int i = 0; i < n_; ++i) set(i, i, v);
  }

  bool is_symmetric() const {
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (get(i, j) != get(j, i)) return false;
    return true;
  }

  static BitMatrix identity(int n) {
    BitMatrix m(n);
    m.fill_diagonal(true);
    return m;
  }

  static BitMatrix full(int n) {
    BitMatrix m(n);
    for (auto& w : m.w_) w = ~std::uint64_t{0};
    // Clear the padding bits beyond column n-1.
    const int tail = n & 63;
    if (tail != 0 && m.wpr_ > 0) {
      const std::uint64_t mask = (std::uint64_t{1} << tail) - 1;
      for (int i = 0; i < n; ++i) m.w_[static_cast<std::size_t>(i) * m.wpr_ + m.wpr_ - 1] = mask;
    }
    return m;
  }

  bool operator==(const BitMatrix&) const = default;

 private:
  int n_ = 0;
  int wpr_ = 0;
  std::vector<std::uint64_t> w_;
};

}  // namespace cmf
