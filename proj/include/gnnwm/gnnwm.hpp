#pragma once

#include "gnnwm/attacks.hpp"
#include "gnnwm/baselines.hpp"
#include "gnnwm/bookshelf.hpp"
#include "gnnwm/constraints.hpp"
#include "gnnwm/detailed_place.hpp"
#include "gnnwm/error.hpp"
#include "gnnwm/experiment.hpp"
#include "gnnwm/gcn.hpp"
#include "gnnwm/global_place.hpp"
#include "gnnwm/graph.hpp"
#include "gnnwm/legalize.hpp"
#include "gnnwm/netlist.hpp"
#include "gnnwm/placer.hpp"
#include "gnnwm/report.hpp"
#include "gnnwm/rng.hpp"
#include "gnnwm/synth.hpp"
#include "gnnwm/validate.hpp"
#include "gnnwm/watermark.hpp"
#include "gnnwm/wirelength.hpp"
