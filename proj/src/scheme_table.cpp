#include "asilcheck/scheme_table.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include "asilcheck/error.hpp"

namespace asilcheck {

AsilMultiset make_multiset(std::vector<AsilLevel> levels) {
  std::sort(levels.begin(), levels.end(), std::greater<>());
  return levels;
}

SchemeTable SchemeTable::defaults() {
  using enum AsilLevel;
  SchemeTable table;
  table.add(D, {C, A});
  table.add(D, {B, B});
  table.add(D, {D, QM});
  table.add(C, {B, A});
  table.add(C, {C, QM});
  table.add(B, {A, A});
  table.add(B, {B, QM});
  table.add(A, {A, QM});
  return table;
}

void SchemeTable::add(AsilLevel parent, std::vector<AsilLevel> children) {
  const std::string parent_name{to_string(parent)};
  if (children.size() < 2) {
    throw Error(ErrorKind::range_violation, parent_name, "config.decomposition_schemes",
                "a decomposition needs at least two child levels");
  }
  for (AsilLevel child : children) {
    if (child > parent) {
      throw Error(ErrorKind::range_violation, parent_name, "config.decomposition_schemes",
                  "child level " + std::string(to_string(child)) + " exceeds the decomposed level");
    }
  }
  entries_[parent].insert(make_multiset(std::move(children)));
}

bool SchemeTable::allows(AsilLevel parent, const std::vector<AsilLevel>& children) const {
  auto it = entries_.find(parent);
  if (it == entries_.end()) {
    return false;
  }
  return it->second.contains(make_multiset(children));
}

}  // namespace asilcheck
