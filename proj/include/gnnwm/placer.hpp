#pragma once

#include "gnnwm/constraints.hpp"
#include "gnnwm/detailed_place.hpp"
#include "gnnwm/global_place.hpp"
#include "gnnwm/legalize.hpp"
#include "gnnwm/netlist.hpp"
#include "gnnwm/wirelength.hpp"

namespace gnnwm {

/// Full flow from a (possibly random) initial placement.
inline Placement place_design(const Netlist& nl, const Placement& init, const RegionConstraintSet& cons,
                              const PlacerConfig& cfg) {
    const Placement gp = global_place(nl, init, cons, cfg);
    const Placement lg = legalize(nl, gp, cons);
    return detailed_place(nl, lg, cons, cfg);
}

inline Placement place_design(const Netlist& nl, const Placement& init, const PlacerConfig& cfg) {
    return place_design(nl, init, RegionConstraintSet::from_fences(nl), cfg);
}

/// Re-places an existing legal placement under extra constraints: cells are
/// projected onto their regions, then legalized and refined locally. Cells
/// already satisfying every constraint keep their sites unless refinement
/// finds a shorter wirelength.
inline Placement place_incremental(const Netlist& nl, const Placement& base, const RegionConstraintSet& cons,
                                   const PlacerConfig& cfg) {
    check_constraints_feasible(nl, cons);
    Placement pl = base;
    project_constraints(nl, cons, pl);
    const Placement lg = legalize(nl, pl, cons);
    return detailed_place(nl, lg, cons, cfg);
}

}  // namespace gnnwm
