#include "crq/mode.hpp"

#include <stdexcept>
#include <string>

namespace crq {

namespace {

// Position of block (p, q) among all bidegrees in storage order.
std::size_t block_ordinal(int p, int q) {
  const int k = p + q;
  return static_cast<std::size_t>(k) * (k + 1) / 2 + static_cast<std::size_t>(k - p);
}

}  // namespace

ModeSet::ModeSet(int truncation) : truncation_(truncation) {
  if (truncation < 0) throw std::invalid_argument("ModeSet: negative truncation");
  modes_.reserve(count(truncation));
  for (int k = 0; k <= truncation; ++k) {
    for (int p = k; p >= 0; --p) {
      const int q = k - p;
      bidegrees_.emplace_back(p, q);
      block_start_.push_back(modes_.size());
      for (int m = 0; m <= k; ++m) {
        const HarmonicMode mode{p, q, m};
        (mode.is_pluriharmonic() ? kernel_ : perp_).push_back(modes_.size());
        modes_.push_back(mode);
      }
    }
  }
  block_start_.push_back(modes_.size());
}

std::size_t ModeSet::count(int truncation) {
  std::size_t n = 0;
  for (int k = 0; k <= truncation; ++k) n += static_cast<std::size_t>(k + 1) * (k + 1);
  return n;
}

bool ModeSet::contains(int p, int q, int m) const {
  return p >= 0 && q >= 0 && p + q <= truncation_ && m >= 0 && m <= p + q;
}

std::size_t ModeSet::index(int p, int q, int m) const {
  if (!contains(p, q, m)) {
    throw std::out_of_range("ModeSet: no mode (" + std::to_string(p) + "," + std::to_string(q) +
                            "," + std::to_string(m) + ")");
  }
  return block_start_[block_ordinal(p, q)] + static_cast<std::size_t>(m);
}

std::pair<std::size_t, std::size_t> ModeSet::block(int p, int q) const {
  if (!contains(p, q, 0)) throw std::out_of_range("ModeSet: no such block");
  const std::size_t b = block_ordinal(p, q);
  return {block_start_[b], block_start_[b + 1]};
}

}  // namespace crq
