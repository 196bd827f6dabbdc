#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "gnnwm/gnnwm.hpp"

namespace testutil {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(GNNWM_FIXTURES) / rel; }

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("gnnwm_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

/// Rows [0, rows) of `sites` sites, row height `rh` sites.
inline gnnwm::Netlist empty_core(int sites, int rows, double rh = 1.0) {
    gnnwm::Netlist nl;
    nl.row_height = rh;
    for (int y = 0; y < rows; ++y) nl.rows.push_back({y, 0, sites});
    return nl;
}

inline gnnwm::CellId add_cell(gnnwm::Netlist& nl, const std::string& name, int w = 1, int h = 1, bool movable = true) {
    nl.cells.push_back({name, w, h, movable ? gnnwm::CellKind::standard : gnnwm::CellKind::macro, movable});
    nl.fence_of.push_back(-1);
    return static_cast<gnnwm::CellId>(nl.cells.size() - 1);
}

inline void add_net(gnnwm::Netlist& nl, std::vector<gnnwm::CellId> cells, std::optional<std::size_t> driver = 0) {
    gnnwm::Net n;
    n.name = "n" + std::to_string(nl.nets.size());
    for (auto c : cells) n.pins.push_back({c, 0.0, 0.0});
    n.driver = driver;
    nl.nets.push_back(std::move(n));
}

/// Small synthetic design that places in well under a second.
inline gnnwm::SynthParams small_synth(std::uint64_t seed, std::size_t cells = 300) {
    gnnwm::SynthParams p;
    p.num_cells = cells;
    p.num_nets = cells + cells / 10;
    p.util = 0.6;
    p.num_macros = 1;
    p.num_fences = 1;
    p.seed = seed;
    return p;
}

}  // namespace testutil
