#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace lss {

using Index = Eigen::Index;

// Sorted set of unique vertex indices. Used for elements E_k, extended
// elements Q_k and element-id neighbor lists N_k.
class IndexSet {
 public:
  IndexSet() = default;

  // Takes ownership of an already strictly increasing list; throws otherwise.
  explicit IndexSet(std::vector<Index> sorted);

  static IndexSet from_unsorted(std::vector<Index> values);
  static IndexSet range(Index begin, Index end);

  static IndexSet set_union(const IndexSet& a, const IndexSet& b);
  static IndexSet set_intersection(const IndexSet& a, const IndexSet& b);

  Index size() const noexcept { return static_cast<Index>(data_.size()); }
  bool empty() const noexcept { return data_.empty(); }
  Index operator[](Index k) const { return data_[static_cast<std::size_t>(k)]; }

  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  const std::vector<Index>& indices() const noexcept { return data_; }
  std::span<const Index> view() const noexcept { return data_; }

  bool contains(Index v) const noexcept {
    return std::binary_search(data_.begin(), data_.end(), v);
  }

  // Local position of v inside the set, if present.
  std::optional<Index> position_of(Index v) const noexcept;

  bool is_subset_of(const IndexSet& other) const noexcept {
    return std::includes(other.data_.begin(), other.data_.end(), data_.begin(), data_.end());
  }

  bool intersects(const IndexSet& other) const noexcept;

  // Throws InputError if any index lies outside [0, n).
  void check_bounds(Index n) const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<Index> data_;
};

}  // namespace lss
