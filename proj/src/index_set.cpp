#include "lss/index_set.hpp"

#include <iterator>
#include <string>

#include "lss/error.hpp"

namespace lss {

IndexSet::IndexSet(std::vector<Index> sorted) : data_(std::move(sorted)) {
  for (std::size_t k = 1; k < data_.size(); ++k) {
    if (data_[k] <= data_[k - 1]) {
      throw InputError("IndexSet: indices must be strictly increasing (position " +
                       std::to_string(k) + ")");
    }
  }
}

IndexSet IndexSet::from_unsorted(std::vector<Index> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  IndexSet s;
  s.data_ = std::move(values);
  return s;
}

IndexSet IndexSet::range(Index begin, Index end) {
  IndexSet s;
  if (end > begin) {
    s.data_.resize(static_cast<std::size_t>(end - begin));
    for (Index v = begin; v < end; ++v) s.data_[static_cast<std::size_t>(v - begin)] = v;
  }
  return s;
}

IndexSet IndexSet::set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet s;
  s.data_.reserve(a.data_.size() + b.data_.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(s.data_));
  return s;
}

IndexSet IndexSet::set_intersection(const IndexSet& a, const IndexSet& b) {
  IndexSet s;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(s.data_));
  return s;
}

std::optional<Index> IndexSet::position_of(Index v) const noexcept {
  auto it = std::lower_bound(data_.begin(), data_.end(), v);
  if (it == data_.end() || *it != v) return std::nullopt;
  return static_cast<Index>(it - data_.begin());
}

bool IndexSet::intersects(const IndexSet& other) const noexcept {
  auto a = data_.begin();
  auto b = other.data_.begin();
  while (a != data_.end() && b != other.data_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      return true;
    }
  }
  return false;
}

void IndexSet::check_bounds(Index n) const {
  if (data_.empty()) return;
  if (data_.front() < 0 || data_.back() >= n) {
    throw InputError("IndexSet: index out of range [0, " + std::to_string(n) + ")");
  }
}

}  // namespace lss
