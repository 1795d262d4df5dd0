#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace obtl {

/// Ordered integer partition kappa = (k_1 >= k_2 >= ... >= 1).
/// The empty partition (weight 0) is represented by an empty parts vector.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<int> parts);

  const std::vector<int>& parts() const { return parts_; }
  int weight() const { return weight_; }
  int num_parts() const { return static_cast<int>(parts_.size()); }
  int part(int i) const { return i < num_parts() ? parts_[i] : 0; }

  bool operator==(const Partition& other) const { return parts_ == other.parts_; }

  /// Weak dominance: sum of the first j parts of *this >= same sum of other,
  /// for all j (both partitions must have the same weight to be comparable).
  bool dominates(const Partition& other) const;

  /// Lexicographic comparison on the parts vector (3 > 2,1 > 1,1,1).
  bool lex_less(const Partition& other) const { return parts_ < other.parts_; }

 private:
  std::vector<int> parts_;
  int weight_ = 0;
};

/// All partitions of k with at most max_parts parts, lexicographically
/// decreasing. k=0 yields the single empty partition.
std::vector<Partition> enumerate_partitions(int k, int max_parts);

struct PartitionHash {
  std::size_t operator()(const Partition& p) const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (int v : p.parts()) h = h * 1099511628211ull + static_cast<std::size_t>(v);
    return h;
  }
};

}  // namespace obtl
