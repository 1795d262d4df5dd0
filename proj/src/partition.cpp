#include "obtl/partition.hpp"

#include <numeric>
#include "obtl/errors.hpp"

namespace obtl {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] < 1) throw DomainError("partition parts must be positive");
    if (i > 0 && parts_[i] > parts_[i - 1])
      throw DomainError("partition parts must be non-increasing");
  }
  weight_ = std::accumulate(parts_.begin(), parts_.end(), 0);
}

bool Partition::dominates(const Partition& other) const {
  if (weight_ != other.weight_) return false;
  int n = std::max(num_parts(), other.num_parts());
  int a = 0, b = 0;
  for (int i = 0; i < n; ++i) {
    a += part(i);
    b += other.part(i);
    if (a < b) return false;
  }
  return true;
}

namespace {

void enumerate_rec(int remaining, int max_part, int slots, std::vector<int>& cur,
                   std::vector<Partition>& out) {
  if (remaining == 0) {
    out.emplace_back(cur);
    return;
  }
  if (slots == 0) return;
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    cur.push_back(p);
    enumerate_rec(remaining - p, p, slots - 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Partition> enumerate_partitions(int k, int max_parts) {
  if (k < 0) throw DomainError("enumerate_partitions: k must be >= 0");
  if (max_parts < 1) throw DomainError("enumerate_partitions: max_parts must be >= 1");
  std::vector<Partition> out;
  std::vector<int> cur;
  enumerate_rec(k, k, max_parts, cur, out);
  return out;
}

}  // namespace obtl
