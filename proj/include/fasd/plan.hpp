#ifndef FASD_PLAN_HPP
#define FASD_PLAN_HPP

#include "fasd/config.hpp"

#include <string>
#include <vector>

namespace fasd {

class Problem;

/// span{phi_node} on `level` when node >= 0, otherwise the whole level space.
struct SubspaceDescriptor {
  int level = 0;
  int node = -1;
  bool exact = false; ///< solved to tolerance by Newton on the level energy

  bool is_nodal() const { return node >= 0; }
};

std::string to_string(const SubspaceDescriptor& d);

struct SubspacePlan {
  Decomposition decomposition = Decomposition::MultilevelNodal;
  std::vector<SubspaceDescriptor> entries;

  /// Descriptors must reference valid levels and nodes; multilevel plans carry
  /// exactly one exact entry, on the coarsest level.
  void validate(const Problem& problem) const;
};

/**
   Multilevel nodal: the nodes of every level above the coarsest, then an exact
   solve on the coarsest level (fine_to_coarse), or the reverse. The symmetric
   order appends the levels above the coarsest again, coarse to fine, with
   node order reversed.
   Level spaces: one entry per level, coarsest exact.
   Finest nodal: the finest level's nodes only.
*/
SubspacePlan build_plan(const Problem& problem, Decomposition decomposition, SweepOrder order);

} // namespace fasd

#endif // FASD_PLAN_HPP
