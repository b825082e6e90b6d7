#include "clusterface/face_set_index.hpp"

namespace clusterface {

FaceSetIndex::FaceSetIndex(std::vector<FaceSet> sets) : sets_(std::move(sets)) {
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    const FaceSet& s = sets_[i];
    if (!by_id_.emplace(s.set_id(), i).second) {
      throw ValidationError("duplicate set id '" + s.set_id() + "'");
    }
    if (s.dimension() != sets_.front().dimension()) {
      throw ValidationError("dimension mismatch between sets '" +
                            sets_.front().set_id() + "' and '" + s.set_id() +
                            "': " + std::to_string(sets_.front().dimension()) +
                            " vs " + std::to_string(s.dimension()));
    }
  }
}

std::size_t FaceSetIndex::dimension() const {
  if (sets_.empty()) {
    throw ValidationError("empty face set index has no dimension");
  }
  return sets_.front().dimension();
}

bool FaceSetIndex::contains(const std::string& set_id) const {
  return by_id_.count(set_id) != 0;
}

const FaceSet& FaceSetIndex::at(const std::string& set_id) const {
  auto it = by_id_.find(set_id);
  if (it == by_id_.end()) {
    throw ValidationError("unknown set id '" + set_id + "'");
  }
  return sets_[it->second];
}

const Embedding& FaceSetIndex::representative(const std::string& set_id) const {
  return at(set_id).representative();
}

std::vector<std::string> FaceSetIndex::ids() const {
  std::vector<std::string> out;
  out.reserve(sets_.size());
  for (const FaceSet& s : sets_) out.push_back(s.set_id());
  return out;
}

std::map<std::string, std::string> FaceSetIndex::labels() const {
  std::map<std::string, std::string> out;
  for (const FaceSet& s : sets_) {
    if (s.label().has_value()) out.emplace(s.set_id(), *s.label());
  }
  return out;
}

}  // namespace clusterface
