#include "fasd/plan.hpp"

#include "fasd/problem.hpp"

#include <stdexcept>

namespace fasd {

std::string to_string(const SubspaceDescriptor& d)
{
  std::string s = "level " + std::to_string(d.level);
  if (d.is_nodal()) {
    s += " node " + std::to_string(d.node);
  }
  if (d.exact) {
    s += " (exact)";
  }
  return s;
}

void SubspacePlan::validate(const Problem& problem) const
{
  int exact = 0;
  for (const auto& d : entries) {
    if (d.level < 0 || d.level >= problem.num_levels()) {
      throw std::invalid_argument("plan: descriptor references level " + std::to_string(d.level));
    }
    if (d.is_nodal() && d.node >= problem.model().size(d.level)) {
      throw std::invalid_argument("plan: node " + std::to_string(d.node) + " not on level " +
                                  std::to_string(d.level));
    }
    if (d.exact) {
      if (d.is_nodal() || d.level != 0) {
        throw std::invalid_argument("plan: only the coarsest level space can be solved exactly");
      }
      ++exact;
    }
  }
  if (decomposition != Decomposition::FinestNodal && exact != 1) {
    throw std::invalid_argument("plan: multilevel plans need exactly one exact coarsest entry");
  }
}

SubspacePlan build_plan(const Problem& problem, Decomposition decomposition, SweepOrder order)
{
  SubspacePlan plan;
  plan.decomposition = decomposition;
  const int finest = problem.finest();
  auto add_level = [&](int l) {
    if (l == 0 && decomposition != Decomposition::FinestNodal) {
      plan.entries.push_back({0, -1, true});
    } else if (decomposition == Decomposition::LevelSpaces) {
      plan.entries.push_back({l, -1, false});
    } else {
      for (int i = 0; i < problem.model().size(l); ++i) {
        plan.entries.push_back({l, i, false});
      }
    }
  };
  if (decomposition == Decomposition::FinestNodal) {
    add_level(finest);
  } else if (order != SweepOrder::CoarseToFine) {
    for (int l = finest; l >= 0; --l) {
      add_level(l);
    }
    if (order == SweepOrder::Symmetric) {
      for (int l = 1; l <= finest; ++l) {
        if (decomposition == Decomposition::LevelSpaces) {
          plan.entries.push_back({l, -1, false});
          continue;
        }
        for (int i = problem.model().size(l) - 1; i >= 0; --i) {
          plan.entries.push_back({l, i, false});
        }
      }
    }
  } else {
    for (int l = 0; l <= finest; ++l) {
      add_level(l);
    }
  }
  plan.validate(problem);
  return plan;
}

} // namespace fasd
