#pragma once

#include <map>
#include <set>
#include <vector>

#include "asilcheck/asil.hpp"

namespace asilcheck {

/// Child ASILs of one decomposition, kept sorted from highest to lowest so
/// that {A, C} and {C, A} compare equal.
using AsilMultiset = std::vector<AsilLevel>;

AsilMultiset make_multiset(std::vector<AsilLevel> levels);

/// Allowed ASIL decompositions, keyed by the level being decomposed.
class SchemeTable {
 public:
  SchemeTable() = default;

  /// D -> {C,A} {B,B} {D,QM}; C -> {B,A} {C,QM}; B -> {A,A} {B,QM}; A -> {A,QM}.
  static SchemeTable defaults();

  /// Throws Error(range_violation) if a multiset has fewer than two members
  /// or contains a level above `parent`.
  void add(AsilLevel parent, std::vector<AsilLevel> children);

  bool allows(AsilLevel parent, const std::vector<AsilLevel>& children) const;

  const std::map<AsilLevel, std::set<AsilMultiset>>& entries() const noexcept { return entries_; }

  friend bool operator==(const SchemeTable&, const SchemeTable&) = default;

 private:
  std::map<AsilLevel, std::set<AsilMultiset>> entries_;
};

}  // namespace asilcheck
