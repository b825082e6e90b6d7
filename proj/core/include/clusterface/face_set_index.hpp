#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "clusterface/embedding.hpp"

namespace clusterface {

/// Owning collection of face sets with id lookup. Enforces unique set ids and
/// a single shared dimension; insertion order is preserved.
class FaceSetIndex {
 public:
  FaceSetIndex() = default;
  explicit FaceSetIndex(std::vector<FaceSet> sets);

  std::size_t size() const noexcept { return sets_.size(); }
  bool empty() const noexcept { return sets_.empty(); }
  std::span<const FaceSet> sets() const noexcept { return sets_; }

  /// Dimension of the shared feature space; throws when the index is empty.
  std::size_t dimension() const;

  bool contains(const std::string& set_id) const;
  const FaceSet& at(const std::string& set_id) const;
  const Embedding& representative(const std::string& set_id) const;

  /// Set ids in insertion order.
  std::vector<std::string> ids() const;

  /// set_id -> identity for every labeled set.
  std::map<std::string, std::string> labels() const;

 private:
  std::vector<FaceSet> sets_;
  std::map<std::string, std::size_t> by_id_;
};

}  // namespace clusterface
