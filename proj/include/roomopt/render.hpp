#pragma once

// Deterministic SVG floorplans.
//
// Layer ids: room, openings, zones, pathway, primary, secondary, tertiary,
// labels. "room" and "openings" are always drawn.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "roomopt/geometry.hpp"
#include "roomopt/metrics.hpp"
#include "roomopt/scene.hpp"

namespace roomopt {

inline constexpr std::array<std::string_view, 6> kOptionalLayers{"zones",     "primary",  "secondary",
                                                                  "tertiary", "pathway", "labels"};

struct RenderOptions {
  double scale = 100.0;   // pixels per meter
  double margin = 40.0;   // pixels around the room
  std::set<std::string> layers{"zones", "primary", "secondary", "tertiary", "labels"};
  std::string palette = "default";  // default | mono

  bool has(std::string_view layer) const { return layers.count(std::string(layer)) > 0; }
};

class RenderError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Model (meters, y up) to SVG (pixels, y down) and back.
struct SvgTransform {
  double scale = 100.0;
  double margin = 40.0;
  double room_length = 0.0;

  Point2 to_svg(Point2 p) const { return {margin + scale * p.x, margin + scale * (room_length - p.y)}; }
  Point2 to_model(Point2 q) const { return {(q.x - margin) / scale, room_length - (q.y - margin) / scale}; }
};

namespace detail {

struct Palette {
  const char* background;
  const char* wall;
  const char* door;
  const char* window;
  const char* socket;
  std::array<const char*, 3> tiers;
  std::array<const char*, 6> zones;
  const char* pathway;
  const char* text;
};

inline const Palette& palette(const std::string& name) {
  static const Palette kDefault{"#ffffff", "#222222", "#b5651d", "#3a7bd5", "#d62728",
                                {"#4c72b0", "#55a868", "#c44e52"},
                                {"#fde9c9", "#d9ecf7", "#e4f2dc", "#f4dcec", "#efe7d7", "#e0e0f4"},
                                "#999999", "#111111"};
  static const Palette kMono{"#ffffff", "#000000", "#555555", "#777777", "#333333",
                             {"#444444", "#888888", "#bbbbbb"},
                             {"#f2f2f2", "#e6e6e6", "#dadada", "#cecece", "#c2c2c2", "#b6b6b6"},
                             "#999999", "#000000"};
  if (name == "default") return kDefault;
  if (name == "mono") return kMono;
  throw RenderError("unknown palette '" + name + "'");
}

inline std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

inline std::string points_attr(const SvgTransform& t, const std::vector<Point2>& pts) {
  std::string s;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point2 q = t.to_svg(pts[i]);
    if (i) s += ' ';
    s += fmt(q.x) + "," + fmt(q.y);
  }
  return s;
}

inline std::string escape(const std::string& text) {
  std::string s;
  for (char c : text) {
    switch (c) {
      case '&': s += "&amp;"; break;
      case '<': s += "&lt;"; break;
      case '>': s += "&gt;"; break;
      case '"': s += "&quot;"; break;
      default: s += c;
    }
  }
  return s;
}

inline std::string_view tier_layer(Tier t) {
  switch (t) {
    case Tier::primary: return "primary";
    case Tier::secondary: return "secondary";
    case Tier::tertiary: return "tertiary";
  }
  return "primary";
}

}  // namespace detail

inline std::string render_svg(const LayoutGraph& g, const PlacementSet& placements,
                              const std::optional<MetricsReport>& metrics = std::nullopt,
                              const RenderOptions& options = {}) {
  if (!(options.scale > 0.0)) throw RenderError("scale must be positive");
  for (const auto& l : options.layers)
    if (std::find(kOptionalLayers.begin(), kOptionalLayers.end(), l) == kOptionalLayers.end())
      throw RenderError("unknown layer '" + l + "'");
  const auto& pal = detail::palette(options.palette);

  std::vector<std::string> missing;
  for (std::size_t i = 0; i < g.objects.size(); ++i) {
    if (!options.has(detail::tier_layer(g.objects[i].tier))) continue;
    if (i >= placements.size() || !placements[i]) missing.push_back(g.objects[i].name);
  }
  if (!missing.empty()) {
    std::string msg = "missing placements for:";
    for (const auto& m : missing) msg += " " + m;
    throw RenderError(msg);
  }

  using detail::fmt;
  const SvgTransform t{options.scale, options.margin, g.room.length};
  const double w_px = 2.0 * options.margin + options.scale * g.room.width;
  const double h_px = 2.0 * options.margin + options.scale * g.room.length + (metrics ? 24.0 : 0.0);
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(w_px) + "\" height=\"" +
       fmt(h_px) + "\" viewBox=\"0 0 " + fmt(w_px) + " " + fmt(h_px) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + fmt(w_px) + "\" height=\"" + fmt(h_px) + "\" fill=\"" + pal.background +
       "\"/>\n";

  const ConvexPolygon room = room_polygon(g.room.extent());
  if (options.has("zones") && !g.zones.empty()) {
    s += "<g id=\"zones\">\n";
    std::vector<Point2> cents;
    for (const auto& z : g.zones) cents.push_back(z.centroid);
    for (std::size_t k = 0; k < g.zones.size(); ++k) {
      const auto cell = voronoi_cell(k, cents, g.room.extent());
      if (cell.empty()) continue;
      s += "<polygon class=\"zone\" data-zone=\"" + detail::escape(g.zones[k].label) + "\" points=\"" +
           detail::points_attr(t, cell.vertices()) + "\" fill=\"" + pal.zones[k % pal.zones.size()] +
           "\" stroke=\"none\"/>\n";
    }
    s += "</g>\n";
  }

  s += "<g id=\"room\">\n<polygon class=\"room\" points=\"" + detail::points_attr(t, room.vertices()) +
       "\" fill=\"none\" stroke=\"" + pal.wall + "\" stroke-width=\"4\"/>\n</g>\n";

  const RoomFeatures features(g.room);
  s += "<g id=\"openings\">\n";
  const auto wall_segment = [&](Wall w, double offset, double width, const char* cls, const char* color) {
    const Point2 a = g.room.wall_point(w, offset - 0.5 * width);
    const Point2 b = g.room.wall_point(w, offset + 0.5 * width);
    const Point2 qa = t.to_svg(a);
    const Point2 qb = t.to_svg(b);
    s += std::string("<line class=\"") + cls + "\" x1=\"" + fmt(qa.x) + "\" y1=\"" + fmt(qa.y) + "\" x2=\"" +
         fmt(qb.x) + "\" y2=\"" + fmt(qb.y) + "\" stroke=\"" + color + "\" stroke-width=\"6\"/>\n";
  };
  for (std::size_t d = 0; d < g.room.doors.size(); ++d) {
    const auto& door = g.room.doors[d];
    wall_segment(door.wall, door.offset, door.width, "door", pal.door);
    s += "<polygon class=\"door-swing\" points=\"" + detail::points_attr(t, features.door_swings[d].vertices()) +
         "\" fill=\"none\" stroke=\"" + pal.door + "\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (const auto& win : g.room.windows) wall_segment(win.wall, win.offset, win.width, "window", pal.window);
  for (const auto& p : features.socket_points) {
    const Point2 q = t.to_svg(p);
    s += "<circle class=\"socket\" cx=\"" + fmt(q.x) + "\" cy=\"" + fmt(q.y) + "\" r=\"5\" fill=\"" + pal.socket +
         "\"/>\n";
  }
  s += "</g>\n";

  if (options.has("pathway")) {
    const double cell = 0.05;
    s += "<g id=\"pathway\">\n";
    for (const auto& p : pathway_points(g.room, cell)) {
      const Point2 q = t.to_svg({p.x - 0.5 * cell, p.y + 0.5 * cell});
      s += "<rect class=\"pathway\" x=\"" + fmt(q.x) + "\" y=\"" + fmt(q.y) + "\" width=\"" +
           fmt(cell * options.scale) + "\" height=\"" + fmt(cell * options.scale) + "\" fill=\"" + pal.pathway +
           "\" fill-opacity=\"0.25\"/>\n";
    }
    s += "</g>\n";
  }

  for (Tier tier : {Tier::primary, Tier::secondary, Tier::tertiary}) {
    const auto layer = detail::tier_layer(tier);
    if (!options.has(layer)) continue;
    const char* color = pal.tiers[static_cast<std::size_t>(tier)];
    s += "<g id=\"" + std::string(layer) + "\">\n";
    for (std::size_t i = 0; i < g.objects.size(); ++i) {
      const auto& o = g.objects[i];
      if (o.tier != tier) continue;
      const OrientedBox box = footprint_box(o, *placements[i]);
      const auto corners = obb_corners(box);
      const std::string dash = o.attach == Attach::ceiling ? "\" stroke-dasharray=\"3 2" : "";
      s += "<polygon class=\"footprint\" data-object=\"" + detail::escape(o.name) + "\" points=\"" +
           detail::points_attr(t, {corners.begin(), corners.end()}) + "\" fill=\"" + color +
           "\" fill-opacity=\"0.55\" stroke=\"" + color + dash + "\"/>\n";
      const Point2 a = t.to_svg(box.center);
      const Point2 b = t.to_svg(box.center + (0.5 * box.length) * box.front());
      s += "<line class=\"front\" data-object=\"" + detail::escape(o.name) + "\" x1=\"" + fmt(a.x) + "\" y1=\"" +
           fmt(a.y) + "\" x2=\"" + fmt(b.x) + "\" y2=\"" + fmt(b.y) + "\" stroke=\"" + pal.text +
           "\" stroke-width=\"2\"/>\n";
    }
    s += "</g>\n";
  }

  if (options.has("labels")) {
    s += "<g id=\"labels\">\n";
    for (std::size_t i = 0; i < g.objects.size(); ++i) {
      if (!options.has(detail::tier_layer(g.objects[i].tier))) continue;
      const Point2 q = t.to_svg(placements[i]->position());
      s += "<text x=\"" + fmt(q.x) + "\" y=\"" + fmt(q.y) + "\" font-family=\"sans-serif\" font-size=\"10\" "
           "text-anchor=\"middle\" fill=\"" + std::string(pal.text) + "\">" + detail::escape(g.objects[i].name) +
           "</text>\n";
    }
    s += "</g>\n";
  }

  if (metrics) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "OOR %.4f%%  OOB %.4f%%  pathway %.3f", metrics->oor_percent(),
                  metrics->oob_percent(), metrics->pathway_cost);
    s += "<text class=\"metrics\" x=\"" + fmt(options.margin) + "\" y=\"" + fmt(h_px - 10.0) +
         "\" font-family=\"monospace\" font-size=\"12\" fill=\"" + pal.text + "\">" + buf + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace roomopt
