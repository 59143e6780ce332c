#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace pbrf {

// Flat bit vector used for per-tree row masks (predictions, mistakes, OOB
// membership). Unused high bits of the last word are kept zero so the fused
// popcount helpers below can run over whole words.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t n_bits)
      : n_bits_(n_bits), words_((n_bits + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1;
  }
  std::size_t size() const { return n_bits_; }
  std::size_t word_count() const { return words_.size(); }
  const std::uint64_t* data() const { return words_.data(); }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

 private:
  std::size_t n_bits_ = 0;
  std::vector<std::uint64_t> words_;
};

inline std::size_t count_and(const BitVec& a, const BitVec& b) {
  std::size_t c = 0;
  const auto *pa = a.data(), *pb = b.data();
  for (std::size_t k = 0; k < a.word_count(); ++k)
    c += std::popcount(pa[k] & pb[k]);
  return c;
}

// One pass per tree pair: |mask_i & mask_j|, disagreements (pred_i xor
// pred_j) and joint mistakes (wrong_i and wrong_j) restricted to the mask.
struct PairCounts {
  std::size_t common = 0;
  std::size_t disagree = 0;
  std::size_t joint_wrong = 0;
};

inline PairCounts count_pair(const BitVec& pred_i, const BitVec& pred_j,
                             const BitVec& wrong_i, const BitVec& wrong_j,
                             const BitVec& mask_i, const BitVec& mask_j) {
  PairCounts out;
  const auto *pi = pred_i.data(), *pj = pred_j.data();
  const auto *wi = wrong_i.data(), *wj = wrong_j.data();
  const auto *mi = mask_i.data(), *mj = mask_j.data();
  for (std::size_t k = 0; k < pred_i.word_count(); ++k) {
    const std::uint64_t m = mi[k] & mj[k];
    out.common += std::popcount(m);
    out.disagree += std::popcount((pi[k] ^ pj[k]) & m);
    out.joint_wrong += std::popcount(wi[k] & wj[k] & m);
  }
  return out;
}

// Same counts on a fully-included block (no mask), used for validation rows.
inline PairCounts count_pair_full(const BitVec& pred_i, const BitVec& pred_j,
                                  const BitVec& wrong_i, const BitVec& wrong_j) {
  PairCounts out;
  out.common = pred_i.size();
  const auto *pi = pred_i.data(), *pj = pred_j.data();
  const auto *wi = wrong_i.data(), *wj = wrong_j.data();
  for (std::size_t k = 0; k < pred_i.word_count(); ++k) {
    out.disagree += std::popcount(pi[k] ^ pj[k]);
    out.joint_wrong += std::popcount(wi[k] & wj[k]);
  }
  return out;
}

}  // namespace pbrf
