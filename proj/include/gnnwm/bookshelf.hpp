#pragma once

// Bookshelf reader/writer (.aux/.nodes/.nets/.pl/.scl) plus a .regions
// sidecar for fence regions:
//
//   fence <id> <cell-name-glob> ; rect x0 y0 x1 y1 [rect x0 y0 x1 y1 ...]
//
// Region rects are in site/row units; everything else is physical. Repeating
// a fence id on another line adds members (and any new rects) to that fence.
//
// .nodes trailing flags: `terminal` (fixed macro), `terminal_NI` (fixed
// standard cell), `macro` (movable macro).

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fnmatch.h>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gnnwm/error.hpp"
#include "gnnwm/netlist.hpp"

namespace gnnwm {

namespace detail {

struct Line {
    std::size_t number = 0;
    std::vector<std::string> tokens;
};

/// Whitespace-split lines with `#` comments and blank lines removed.
/// ':' is always its own token so "NumNodes:5" and "NumNodes : 5" agree.
inline std::vector<Line> tokenize_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<Line> out;
    std::string text;
    std::size_t n = 0;
    while (std::getline(in, text)) {
        ++n;
        if (auto h = text.find('#'); h != std::string::npos) text.erase(h);
        Line line{n, {}};
        std::string cur;
        auto flush = [&] {
            if (!cur.empty()) line.tokens.push_back(std::move(cur));
            cur.clear();
        };
        for (char c : text) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                flush();
            } else if (c == ':') {
                flush();
                line.tokens.emplace_back(":");
            } else {
                cur.push_back(c);
            }
        }
        flush();
        if (!line.tokens.empty()) out.push_back(std::move(line));
    }
    return out;
}

inline double parse_number(const std::string& tok, const std::string& file, std::size_t line) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v))
        throw ParseError(file, line, "expected a number, got '" + tok + "'");
    return v;
}

inline long long parse_integer(const std::string& tok, const std::string& file, std::size_t line) {
    long long v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw ParseError(file, line, "expected an integer, got '" + tok + "'");
    return v;
}

inline std::string format_number(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

inline bool is_header(const Line& l) { return l.tokens[0] == "UCLA"; }

inline std::vector<std::string> strip_colons(const std::vector<std::string>& toks) {
    std::vector<std::string> v;
    for (const auto& t : toks)
        if (t != ":") v.push_back(t);
    return v;
}

inline int to_units(double physical, double unit) {
    // physical sizes are rounded up to whole sites/rows
    return static_cast<int>(std::ceil(physical / unit - 1e-9));
}

struct AuxFiles {
    std::filesystem::path nodes, nets, pl, scl;
    std::optional<std::filesystem::path> regions;
};

inline AuxFiles read_aux(const std::filesystem::path& aux) {
    auto lines = tokenize_file(aux);
    AuxFiles files;
    const auto dir = aux.parent_path();
    for (const auto& l : lines) {
        for (const auto& t : l.tokens) {
            std::filesystem::path p = dir / t;
            const auto ext = p.extension().string();
            if (ext == ".nodes") files.nodes = p;
            else if (ext == ".nets") files.nets = p;
            else if (ext == ".pl") files.pl = p;
            else if (ext == ".scl") files.scl = p;
            else if (ext == ".regions") files.regions = p;
        }
    }
    const std::string name = aux.string();
    if (files.nodes.empty()) throw ParseError(name, 1, "aux does not reference a .nodes file");
    if (files.nets.empty()) throw ParseError(name, 1, "aux does not reference a .nets file");
    if (files.pl.empty()) throw ParseError(name, 1, "aux does not reference a .pl file");
    if (files.scl.empty()) throw ParseError(name, 1, "aux does not reference a .scl file");
    if (!files.regions) {
        auto sidecar = aux;
        sidecar.replace_extension(".regions");
        if (std::filesystem::exists(sidecar)) files.regions = sidecar;
    }
    for (const auto* p : {&files.nodes, &files.nets, &files.pl, &files.scl})
        if (!std::filesystem::exists(*p)) throw IoError("missing file '" + p->string() + "'");
    if (files.regions && !std::filesystem::exists(*files.regions))
        throw IoError("missing file '" + files.regions->string() + "'");
    return files;
}

inline void read_scl(const std::filesystem::path& path, Netlist& nl) {
    const std::string file = path.string();
    auto lines = tokenize_file(path);
    struct RawRow {
        double coord = 0, height = 0, sitewidth = 0, origin = 0;
        long long sites = 0;
        std::size_t line = 0;
    };
    std::vector<RawRow> raw;
    std::optional<RawRow> cur;
    for (const auto& l : lines) {
        if (is_header(l)) continue;
        const auto t = strip_colons(l.tokens);
        const auto& key = t[0];
        if (key == "NumRows" || key == "Numrows") continue;
        if (key == "CoreRow") {
            if (cur) throw ParseError(file, l.number, "CoreRow inside an unterminated row");
            cur = RawRow{};
            cur->line = l.number;
            continue;
        }
        if (!cur) throw ParseError(file, l.number, "unexpected '" + key + "' outside a CoreRow");
        if (key == "End") {
            if (cur->height <= 0 || cur->sitewidth <= 0 || cur->sites <= 0)
                throw ParseError(file, l.number, "row missing Height, Sitewidth or NumSites");
            raw.push_back(*cur);
            cur.reset();
        } else if (key == "Coordinate" && t.size() >= 2) {
            cur->coord = parse_number(t[1], file, l.number);
        } else if (key == "Height" && t.size() >= 2) {
            cur->height = parse_number(t[1], file, l.number);
        } else if (key == "Sitewidth" && t.size() >= 2) {
            cur->sitewidth = parse_number(t[1], file, l.number);
        } else if (key == "SubrowOrigin" && t.size() >= 4 && t[2] == "NumSites") {
            cur->origin = parse_number(t[1], file, l.number);
            cur->sites = parse_integer(t[3], file, l.number);
        } else if (key == "Sitespacing" || key == "Siteorient" || key == "Sitesymmetry") {
            // ignored
        } else {
            throw ParseError(file, l.number, "malformed row record '" + key + "'");
        }
    }
    if (cur) throw ParseError(file, lines.empty() ? 1 : lines.back().number, "unterminated CoreRow");
    if (raw.empty()) throw ParseError(file, 1, "no rows");
    nl.row_height = raw[0].height;
    nl.site_width = raw[0].sitewidth;
    nl.origin_y = raw[0].coord;
    for (const auto& r : raw) {
        if (r.height != nl.row_height) throw ParseError(file, r.line, "non-uniform row height");
        if (r.sitewidth != nl.site_width) throw ParseError(file, r.line, "non-uniform site width");
        nl.origin_y = std::min(nl.origin_y, r.coord);
    }
    for (const auto& r : raw) {
        const double yi = (r.coord - nl.origin_y) / nl.row_height;
        const double xi = r.origin / nl.site_width;
        if (yi != std::floor(yi) || xi != std::floor(xi))
            throw ParseError(file, r.line, "row not aligned to the site/row grid");
        nl.rows.push_back({static_cast<int>(yi), static_cast<int>(xi), static_cast<int>(r.sites)});
    }
    std::sort(nl.rows.begin(), nl.rows.end(), [](const Row& a, const Row& b) { return a.y < b.y; });
}

inline void read_nodes(const std::filesystem::path& path, Netlist& nl) {
    const std::string file = path.string();
    std::set<std::string> names;
    for (const auto& l : tokenize_file(path)) {
        if (is_header(l)) continue;
        const auto& key = l.tokens[0];
        if (key == "NumNodes" || key == "NumTerminals") continue;
        if (l.tokens.size() < 3) throw ParseError(file, l.number, "expected 'name width height [flag]'");
        Cell c;
        c.name = key;
        c.width = to_units(parse_number(l.tokens[1], file, l.number), nl.site_width);
        c.height = to_units(parse_number(l.tokens[2], file, l.number), nl.row_height);
        if (c.width <= 0 || c.height <= 0) throw ParseError(file, l.number, "non-positive cell size");
        if (l.tokens.size() >= 4) {
            const auto& flag = l.tokens[3];
            if (flag == "terminal") {
                c.kind = CellKind::macro;
                c.movable = false;
            } else if (flag == "terminal_NI") {
                c.movable = false;
            } else if (flag == "macro") {
                c.kind = CellKind::macro;
            } else {
                throw ParseError(file, l.number, "unknown node flag '" + flag + "'");
            }
        }
        if (!names.insert(c.name).second) throw ParseError(file, l.number, "duplicate cell name '" + c.name + "'");
        nl.cells.push_back(std::move(c));
    }
}

inline void read_nets(const std::filesystem::path& path, Netlist& nl) {
    const std::string file = path.string();
    const auto index = nl.name_index();
    auto lines = tokenize_file(path);
    std::size_t i = 0;
    while (i < lines.size()) {
        const auto& l = lines[i];
        if (is_header(l) || l.tokens[0] == "NumNets" || l.tokens[0] == "NumPins") {
            ++i;
            continue;
        }
        const auto t = strip_colons(l.tokens);
        if (t[0] != "NetDegree" || t.size() < 2) throw ParseError(file, l.number, "expected 'NetDegree : k'");
        const long long degree = parse_integer(t[1], file, l.number);
        if (degree < 1) throw ParseError(file, l.number, "net degree must be >= 1");
        Net net;
        net.name = t.size() >= 3 ? t[2] : "n" + std::to_string(nl.nets.size());
        ++i;
        for (long long k = 0; k < degree; ++k, ++i) {
            if (i >= lines.size()) throw ParseError(file, l.number, "net truncated");
            const auto& pl = lines[i];
            const auto pt = strip_colons(pl.tokens);
            if (pt[0] == "NetDegree") throw ParseError(file, pl.number, "net has fewer pins than its degree");
            auto it = index.find(pt[0]);
            if (it == index.end()) throw ParseError(file, pl.number, "pin references undeclared cell '" + pt[0] + "'");
            Pin pin{it->second, 0.0, 0.0};
            std::size_t next = 1;
            if (pt.size() > next && (pt[next] == "I" || pt[next] == "O" || pt[next] == "B")) {
                if (pt[next] == "O" && !net.driver) net.driver = net.pins.size();
                ++next;
            }
            if (pt.size() >= next + 2) {
                pin.dx = parse_number(pt[next], file, pl.number) / nl.site_width;
                pin.dy = parse_number(pt[next + 1], file, pl.number) / nl.row_height;
            } else if (pt.size() != next) {
                throw ParseError(file, pl.number, "malformed pin line");
            }
            net.pins.push_back(pin);
        }
        nl.nets.push_back(std::move(net));
    }
}

inline Placement read_pl(const std::filesystem::path& path, const Netlist& nl, bool require_complete) {
    const std::string file = path.string();
    const auto index = nl.name_index();
    Placement pl(nl.num_cells());
    for (const auto& l : tokenize_file(path)) {
        if (is_header(l)) continue;
        const auto t = strip_colons(l.tokens);
        if (t.size() < 3) throw ParseError(file, l.number, "expected 'name x y : orient'");
        auto it = index.find(t[0]);
        if (it == index.end()) throw ParseError(file, l.number, "unknown cell '" + t[0] + "'");
        const double x = parse_number(t[1], file, l.number);
        const double y = parse_number(t[2], file, l.number);
        pl[it->second] = {x / nl.site_width, (y - nl.origin_y) / nl.row_height};
    }
    if (require_complete) {
        for (CellId c = 0; c < nl.num_cells(); ++c)
            if (nl.cells[c].movable && !pl.placed(c))
                throw ParseError(file, 0, "movable cell '" + nl.cells[c].name + "' has no position");
    }
    return pl;
}

inline void read_regions(const std::filesystem::path& path, Netlist& nl) {
    const std::string file = path.string();
    nl.fence_of.assign(nl.num_cells(), -1);
    std::map<int, std::size_t> by_id;
    for (const auto& l : tokenize_file(path)) {
        const auto& t = l.tokens;
        if (t[0] != "fence" || t.size() < 4 || t[3] != ";")
            throw ParseError(file, l.number, "expected 'fence <id> <glob> ; rect x0 y0 x1 y1 ...'");
        const int id = static_cast<int>(parse_integer(t[1], file, l.number));
        const std::string& glob = t[2];
        std::vector<Rect> rects;
        std::size_t k = 4;
        while (k < t.size()) {
            if (t[k] != "rect") throw ParseError(file, l.number, "malformed rect list");
            if (k + 4 >= t.size()) throw ParseError(file, l.number, "rect needs four coordinates");
            Rect r{static_cast<int>(parse_integer(t[k + 1], file, l.number)),
                   static_cast<int>(parse_integer(t[k + 2], file, l.number)),
                   static_cast<int>(parse_integer(t[k + 3], file, l.number)),
                   static_cast<int>(parse_integer(t[k + 4], file, l.number))};
            if (r.empty()) throw ParseError(file, l.number, "rect has non-positive area");
            rects.push_back(r);
            k += 5;
        }
        auto [it, fresh] = by_id.emplace(id, nl.fences.size());
        if (fresh) {
            if (rects.empty()) throw ParseError(file, l.number, "fence needs at least one rect");
            nl.fences.push_back(Region{id, {}, RegionKind::fence});
        }
        auto& fence = nl.fences[it->second];
        for (const auto& r : rects)
            if (std::find(fence.rects.begin(), fence.rects.end(), r) == fence.rects.end()) fence.rects.push_back(r);
        for (CellId c = 0; c < nl.num_cells(); ++c) {
            if (fnmatch(glob.c_str(), nl.cells[c].name.c_str(), 0) != 0) continue;
            if (!nl.cells[c].movable)
                throw ParseError(file, l.number, "fixed cell '" + nl.cells[c].name + "' cannot be a fence member");
            const int idx = static_cast<int>(it->second);
            if (nl.fence_of[c] >= 0 && nl.fence_of[c] != idx)
                throw ParseError(file, l.number, "cell '" + nl.cells[c].name + "' is in two fences");
            nl.fence_of[c] = idx;
        }
    }
}

inline void write_or_throw(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline bool glob_special(const std::string& s) {
    return s.find_first_of("*?[\\") != std::string::npos;
}

}  // namespace detail

/// Reads a Bookshelf design referenced by an .aux file.
inline std::pair<Netlist, Placement> parse_bookshelf(const std::filesystem::path& aux_path) {
    if (!std::filesystem::exists(aux_path)) throw IoError("missing file '" + aux_path.string() + "'");
    const auto files = detail::read_aux(aux_path);
    Netlist nl;
    nl.name = aux_path.stem().string();
    detail::read_scl(files.scl, nl);
    detail::read_nodes(files.nodes, nl);
    detail::read_nets(files.nets, nl);
    nl.fence_of.assign(nl.num_cells(), -1);
    if (files.regions) detail::read_regions(*files.regions, nl);
    Placement pl = detail::read_pl(files.pl, nl, true);
    check_netlist(nl);
    return {std::move(nl), std::move(pl)};
}

/// Reads a standalone .pl against an existing netlist.
inline Placement read_placement(const Netlist& nl, const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw IoError("missing file '" + path.string() + "'");
    return detail::read_pl(path, nl, true);
}

inline std::string format_placement(const Netlist& nl, const Placement& pl) {
    std::ostringstream out;
    out << "UCLA pl 1.0\n\n";
    for (CellId c = 0; c < nl.num_cells(); ++c) {
        if (!pl.placed(c)) {
            if (nl.cells[c].movable)
                throw InvalidArgument("incomplete placement: movable cell '" + nl.cells[c].name + "' is unplaced");
            continue;
        }
        out << nl.cells[c].name << ' ' << detail::format_number(pl[c].x * nl.site_width) << ' '
            << detail::format_number(pl[c].y * nl.row_height + nl.origin_y) << " : N";
        if (!nl.cells[c].movable) out << " /FIXED";
        out << '\n';
    }
    return out.str();
}

inline void write_placement(const Netlist& nl, const Placement& pl, const std::filesystem::path& path) {
    if (pl.size() != nl.num_cells()) throw InvalidArgument("incomplete placement: size mismatch");
    detail::write_or_throw(path, format_placement(nl, pl));
}

/// Writes <dir>/<basename>.{aux,nodes,nets,pl,scl[,regions]}; returns the aux path.
inline std::filesystem::path write_bookshelf(const Netlist& nl, const Placement& pl,
                                             const std::filesystem::path& dir, const std::string& basename) {
    std::filesystem::create_directories(dir);
    using detail::format_number;
    {
        std::ostringstream o;
        o << "UCLA nodes 1.0\n\n";
        std::size_t terminals = 0;
        for (const auto& c : nl.cells) terminals += !c.movable;
        o << "NumNodes : " << nl.num_cells() << "\nNumTerminals : " << terminals << "\n";
        for (const auto& c : nl.cells) {
            o << c.name << ' ' << format_number(c.width * nl.site_width) << ' '
              << format_number(c.height * nl.row_height);
            if (!c.movable) o << (c.kind == CellKind::macro ? " terminal" : " terminal_NI");
            else if (c.kind == CellKind::macro) o << " macro";
            o << '\n';
        }
        detail::write_or_throw(dir / (basename + ".nodes"), o.str());
    }
    {
        std::ostringstream o;
        std::size_t pins = 0;
        for (const auto& n : nl.nets) pins += n.pins.size();
        o << "UCLA nets 1.0\n\nNumNets : " << nl.num_nets() << "\nNumPins : " << pins << "\n";
        for (const auto& n : nl.nets) {
            o << "NetDegree : " << n.pins.size() << ' ' << n.name << '\n';
            for (std::size_t k = 0; k < n.pins.size(); ++k) {
                const auto& p = n.pins[k];
                o << "  " << nl.cells[p.cell].name << ' ' << (n.driver == k ? 'O' : 'I') << " : "
                  << format_number(p.dx * nl.site_width) << ' ' << format_number(p.dy * nl.row_height) << '\n';
            }
        }
        detail::write_or_throw(dir / (basename + ".nets"), o.str());
    }
    {
        std::ostringstream o;
        o << "UCLA scl 1.0\n\nNumRows : " << nl.rows.size() << "\n\n";
        for (const auto& r : nl.rows) {
            o << "CoreRow Horizontal\n"
              << "  Coordinate : " << format_number(r.y * nl.row_height + nl.origin_y) << '\n'
              << "  Height : " << format_number(nl.row_height) << '\n'
              << "  Sitewidth : " << format_number(nl.site_width) << '\n'
              << "  Sitespacing : " << format_number(nl.site_width) << '\n'
              << "  Siteorient : 1\n  Sitesymmetry : 1\n"
              << "  SubrowOrigin : " << format_number(r.x_start * nl.site_width) << " NumSites : " << r.num_sites
              << "\nEnd\n";
        }
        detail::write_or_throw(dir / (basename + ".scl"), o.str());
    }
    write_placement(nl, pl, dir / (basename + ".pl"));
    std::string aux = "RowBasedPlacement : " + basename + ".nodes " + basename + ".nets " + basename + ".pl " +
                      basename + ".scl";
    if (!nl.fences.empty()) {
        std::ostringstream o;
        o << "# fence <id> <cell-name-glob> ; rect x0 y0 x1 y1 ...\n";
        for (std::size_t f = 0; f < nl.fences.size(); ++f) {
            std::vector<std::string> members;
            for (CellId c = 0; c < nl.num_cells(); ++c)
                if (nl.fence_of[c] == static_cast<int>(f)) members.push_back(nl.cells[c].name);
            std::string rects;
            for (const auto& r : nl.fences[f].rects)
                rects += " rect " + std::to_string(r.x0) + ' ' + std::to_string(r.y0) + ' ' + std::to_string(r.x1) +
                         ' ' + std::to_string(r.y1);
            // one glob line when a common prefix selects exactly the members
            std::string prefix = members.empty() ? std::string() : members.front();
            for (const auto& m : members) {
                std::size_t k = 0;
                while (k < prefix.size() && k < m.size() && prefix[k] == m[k]) ++k;
                prefix.resize(k);
            }
            bool single = !members.empty() && !prefix.empty() && !detail::glob_special(prefix);
            if (single) {
                std::size_t matched = 0;
                for (const auto& c : nl.cells) matched += c.name.rfind(prefix, 0) == 0;
                single = matched == members.size();
            }
            const std::string id = std::to_string(nl.fences[f].id);
            if (single) {
                o << "fence " << id << ' ' << prefix << "* ;" << rects << '\n';
            } else if (members.empty()) {
                o << "fence " << id << " - ;" << rects << '\n';
            } else {
                for (std::size_t k = 0; k < members.size(); ++k) {
                    if (detail::glob_special(members[k]))
                        throw InvalidArgument("cell name '" + members[k] + "' cannot be written as a fence glob");
                    o << "fence " << id << ' ' << members[k] << " ;" << (k == 0 ? rects : std::string()) << '\n';
                }
            }
        }
        detail::write_or_throw(dir / (basename + ".regions"), o.str());
        aux += " " + basename + ".regions";
    }
    const auto aux_path = dir / (basename + ".aux");
    detail::write_or_throw(aux_path, aux + "\n");
    return aux_path;
}

}  // namespace gnnwm
