#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace crq {

/// Label of one real spectral basis function: bidegree (p, q) and position m in 0..p+q.
struct HarmonicMode {
  int p = 0;
  int q = 0;
  int m = 0;

  int degree() const { return p + q; }
  /// CR pluriharmonic modes: the kernel of the Paneitz operator.
  bool is_pluriharmonic() const { return p == 0 || q == 0; }

  friend bool operator==(const HarmonicMode&, const HarmonicMode&) = default;
};

/// Closed-form eigenvalue 2pq + p + q of -Delta_b on H_{p,q}, used for Folland-Stein weights.
inline double sublaplacian_weight(int p, int q) { return 2.0 * p * q + p + q; }

/// All modes with p + q <= N in a fixed order: degree ascending, then p descending,
/// then m ascending. Each (p, q) bidegree occupies a contiguous block.
class ModeSet {
 public:
  explicit ModeSet(int truncation);

  int truncation() const { return truncation_; }
  std::size_t size() const { return modes_.size(); }
  const HarmonicMode& operator[](std::size_t i) const { return modes_[i]; }
  const std::vector<HarmonicMode>& modes() const { return modes_; }

  std::size_t index(int p, int q, int m) const;
  std::size_t index(const HarmonicMode& mode) const { return index(mode.p, mode.q, mode.m); }
  bool contains(int p, int q, int m) const;

  /// [begin, end) of the (p, q) block.
  std::pair<std::size_t, std::size_t> block(int p, int q) const;
  /// Bidegrees (p, q) in storage order.
  const std::vector<std::pair<int, int>>& bidegrees() const { return bidegrees_; }

  const std::vector<std::size_t>& kernel_indices() const { return kernel_; }
  const std::vector<std::size_t>& perp_indices() const { return perp_; }

  /// sum_{k=0..N} (k+1)^2
  static std::size_t count(int truncation);

 private:
  int truncation_;
  std::vector<HarmonicMode> modes_;
  std::vector<std::pair<int, int>> bidegrees_;
  std::vector<std::size_t> block_start_;
  std::vector<std::size_t> kernel_;
  std::vector<std::size_t> perp_;
};

}  // namespace crq
