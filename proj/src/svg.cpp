#include <array>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "evseq/layout.hpp"

namespace evseq {

namespace {

// Okabe-Ito, cycled for scales with more categories than entries.
constexpr std::array<const char*, 8> kCategorical = {"#E69F00", "#56B4E9", "#009E73", "#F0E442",
                                                     "#0072B2", "#D55E00", "#CC79A7", "#000000"};
constexpr std::array<const char*, 4> kQuartileFill = {"#d9d9d9", "#a6bddb", "#74a9cf", "#d9d9d9"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Stable XML-name-safe token.
std::string id_token(const std::string& s) {
  std::string out;
  char buf[8];
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '.') {
      out.push_back(static_cast<char>(c));
    } else {
      std::snprintf(buf, sizeof buf, "_%02X", c);
      out += buf;
    }
  }
  return out;
}

std::string axis_label(const TimeScaleSpec& axis) {
  if (axis.kind == TimeScaleKind::Absolute) {
    auto ts = [](double ms) { return format_timestamp(Timestamp{std::chrono::milliseconds{static_cast<long long>(ms)}}); };
    return std::string("absolute: ") + ts(axis.t0) + " .. " + ts(axis.tN);
  }
  return std::string(to_string(axis.kind)) + ": " + num(axis.t0) + " .. " + num(axis.tN);
}

}  // namespace

std::string render_svg(const OverviewLayout& layout) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(layout.width)
    << "\" height=\"" << num(layout.height) << "\" viewBox=\"0 0 " << num(layout.width) << ' '
    << num(layout.height) << "\">\n";

  o << "<g id=\"axis\" class=\"axis\">\n";
  o << "<text x=\"" << num(8) << "\" y=\"" << num(16) << "\" font-size=\"12\">vertical axis "
    << escape(axis_label(layout.axis)) << "</text>\n";
  for (const auto& col : layout.columns) {
    if (!col.anchor) continue;
    o << "<text class=\"anchor-label\" id=\"anchor-c" << col.index << "\" x=\"" << num(col.x) << "\" y=\""
      << num(32) << "\" font-size=\"10\">" << escape(*col.anchor) << "</text>\n";
  }
  o << "</g>\n";

  for (const auto& row : layout.rows) {
    o << "<g id=\"row-" << row.index << "\" class=\"row\" data-frequency=\"" << row.frequency << "\"";
    if (row.breakdown_weekday) o << " data-breakdown=\"" << weekday_name(*row.breakdown_weekday) << "\"";
    o << ">\n";
    for (const auto& box : row.boxes) {
      std::string base = "r" + std::to_string(row.index) + "-c" + std::to_string(box.column);
      o << "<g id=\"" << base << "\" class=\"event-box\" data-event-type=\"" << escape(box.event_type) << "\">\n";
      if (box.lod.collapsed()) {
        o << "<rect class=\"point-glyph\" id=\"" << base << "-glyph\" x=\"" << num(box.x) << "\" y=\""
          << num(box.y) << "\" width=\"" << num(box.width) << "\" height=\"" << num(box.height)
          << "\" fill=\"#636363\"/>\n";
      } else {
        o << "<rect class=\"box-frame\" id=\"" << base << "-frame\" x=\"" << num(box.x) << "\" y=\""
          << num(box.y) << "\" width=\"" << num(box.width) << "\" height=\"" << num(box.height)
          << "\" fill=\"none\" stroke=\"#636363\" stroke-width=\"0.5\"/>\n";
        for (const auto& r : box.quartile_rects) {
          o << "<rect class=\"quartile q" << r.fill << "\" id=\"" << base << "-q" << r.fill << "\" x=\""
            << num(r.x) << "\" y=\"" << num(box.y) << "\" width=\"" << num(r.width) << "\" height=\""
            << num(box.height) << "\" fill=\"" << kQuartileFill[static_cast<std::size_t>(r.fill)] << "\"/>\n";
        }
        bool uniform = box.lod.color_mode() == ColorMode::UniformAlpha;
        for (const auto& p : box.points) {
          if (!p.visible) continue;
          const char* fill = "#000000";
          if (!uniform && p.color_key) fill = kCategorical[static_cast<std::size_t>(*p.color_key) % kCategorical.size()];
          o << "<circle class=\"" << (p.is_outlier ? "point outlier" : "point quartile-point") << "\" id=\""
            << base << "-p-" << id_token(p.member_ref) << "\" cx=\"" << num(p.x) << "\" cy=\"" << num(p.y)
            << "\" r=\"1.5\" fill=\"" << fill << "\"";
          if (uniform) o << " fill-opacity=\"0.2\"";
          o << "/>\n";
        }
      }
      o << "</g>\n";
    }
    o << "</g>\n";
  }

  double ly = layout.height - 16.0;
  o << "<g id=\"legend\" class=\"legend\">\n";
  double lx = 8.0;
  for (const auto& e : layout.color_legend) {
    o << "<rect class=\"legend-swatch\" id=\"legend-" << e.index << "\" x=\"" << num(lx) << "\" y=\"" << num(ly)
      << "\" width=\"8\" height=\"8\" fill=\"" << kCategorical[static_cast<std::size_t>(e.index) % kCategorical.size()]
      << "\"/>\n";
    o << "<text x=\"" << num(lx + 10) << "\" y=\"" << num(ly + 8) << "\" font-size=\"9\">" << escape(e.label)
      << "</text>\n";
    lx += 48.0;
  }
  o << "</g>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace evseq
