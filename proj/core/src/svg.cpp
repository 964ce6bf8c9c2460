#include "audit/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "audit/errors.hpp"

namespace audit {

namespace {

std::string fmt(double v, int decimals = 1) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Linear two-stop ramp, light to dark.
std::string ramp(double v, int r0, int g0, int b0, int r1, int g1, int b1) {
  v = std::clamp(v, 0.0, 1.0);
  const int r = static_cast<int>(r0 + (r1 - r0) * v + 0.5);
  const int g = static_cast<int>(g0 + (g1 - g0) * v + 0.5);
  const int b = static_cast<int>(b0 + (b1 - b0) * v + 0.5);
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string blues(double v) { return ramp(v, 247, 251, 255, 8, 48, 107); }
std::string heat(double v) { return ramp(v, 255, 245, 204, 178, 24, 43); }

}  // namespace

std::string render_heatmap(const OverlapMatrix& matrix, const Schema& schema) {
  const std::size_t n = matrix.criterion_ids.size();
  if (n == 0) throw InputError("cannot render an empty overlap matrix");

  const int cell = 44;
  const int left = 110;
  const int top = 70;
  const int legend_h = 60;
  const int width = left + static_cast<int>(n) * cell + 30;
  const int height = top + static_cast<int>(n) * cell + legend_h + 30;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" font-family=\"sans-serif\">\n";
  svg << "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" "
         "patternTransform=\"rotate(45)\" patternUnits=\"userSpaceOnUse\">"
         "<rect width=\"6\" height=\"6\" fill=\"#e8e8e8\"/>"
         "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#9a9a9a\" "
         "stroke-width=\"2\"/></pattern></defs>\n";
  svg << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\">Directed conditional "
         "overlap, t=" << matrix.threshold << " (row engaged &#8594; column engaged)"
      << "</text>\n";

  for (std::size_t i = 0; i < n; ++i) {
    const int x = left + static_cast<int>(i) * cell;
    const int y = top + static_cast<int>(i) * cell;
    svg << "<text x=\"" << x + cell / 2 << "\" y=\"" << top - 8
        << "\" font-size=\"12\" text-anchor=\"middle\">"
        << escape_xml(matrix.criterion_ids[i]) << "</text>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << y + cell / 2 + 4
        << "\" font-size=\"12\" text-anchor=\"end\">"
        << escape_xml(matrix.criterion_ids[i]) << "</text>\n";
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const int x = left + static_cast<int>(j) * cell;
      const int y = top + static_cast<int>(i) * cell;
      const auto value = matrix.at(i, j);
      const bool masked = matrix.mask_within_category && matrix.is_within_category(i, j);
      if (masked) {
        svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
            << "\" height=\"" << cell << "\" fill=\"url(#hatch)\" stroke=\"#cccccc\"/>\n";
      } else if (!value) {
        svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
            << "\" height=\"" << cell
            << "\" fill=\"#ffffff\" stroke=\"#cccccc\"/>\n"
            << "<line x1=\"" << x + 10 << "\" y1=\"" << y + 10 << "\" x2=\""
            << x + cell - 10 << "\" y2=\"" << y + cell - 10
            << "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n"
            << "<line x1=\"" << x + cell - 10 << "\" y1=\"" << y + 10 << "\" x2=\""
            << x + 10 << "\" y2=\"" << y + cell - 10
            << "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
      } else {
        svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
            << "\" height=\"" << cell << "\" fill=\"" << blues(*value)
            << "\" stroke=\"#cccccc\"/>\n";
        svg << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
            << "\" font-size=\"11\" text-anchor=\"middle\" fill=\""
            << (*value > 0.6 ? "#ffffff" : "#222222") << "\">" << fmt(*value, 2)
            << "</text>\n";
      }
    }
  }

  // Outline within-category blocks so cross-category leakage stands out.
  std::size_t block_start = 0;
  while (block_start < n) {
    const auto& cat = schema.criterion(matrix.criterion_ids[block_start]).category_id;
    std::size_t block_end = block_start + 1;
    while (block_end < n &&
           schema.criterion(matrix.criterion_ids[block_end]).category_id == cat) {
      ++block_end;
    }
    const int x = left + static_cast<int>(block_start) * cell;
    const int y = top + static_cast<int>(block_start) * cell;
    const int span = static_cast<int>(block_end - block_start) * cell;
    svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << span
        << "\" height=\"" << span
        << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2.5\"/>\n";
    block_start = block_end;
  }

  const int ly = top + static_cast<int>(n) * cell + 26;
  svg << "<rect x=\"" << left << "\" y=\"" << ly << "\" width=\"16\" height=\"16\" "
         "fill=\"url(#hatch)\" stroke=\"#cccccc\"/>"
      << "<text x=\"" << left + 22 << "\" y=\"" << ly + 12
      << "\" font-size=\"12\">masked (within category)</text>\n";
  svg << "<rect x=\"" << left + 220 << "\" y=\"" << ly
      << "\" width=\"16\" height=\"16\" fill=\"#ffffff\" stroke=\"#cccccc\"/>"
      << "<line x1=\"" << left + 223 << "\" y1=\"" << ly + 3 << "\" x2=\""
      << left + 233 << "\" y2=\"" << ly + 13
      << "\" stroke=\"#bbbbbb\"/><text x=\"" << left + 242 << "\" y=\"" << ly + 12
      << "\" font-size=\"12\">absent (never engaged)</text>\n";
  for (int i = 0; i <= 10; ++i) {
    svg << "<rect x=\"" << left + i * 14 << "\" y=\"" << ly + 26
        << "\" width=\"14\" height=\"10\" fill=\"" << blues(i / 10.0) << "\"/>\n";
  }
  svg << "<text x=\"" << left << "\" y=\"" << ly + 50 << "\" font-size=\"11\">0</text>"
      << "<text x=\"" << left + 10 * 14 << "\" y=\"" << ly + 50
      << "\" font-size=\"11\">1</text>\n";

  svg << "</svg>\n";
  return svg.str();
}

std::string render_stability_landscape(const std::vector<StabilityRow>& rows,
                                       int threshold) {
  if (rows.empty()) throw InputError("cannot render an empty stability table");

  const int plot_w = 460;
  const int plot_h = 360;
  const int left = 70;
  const int top = 50;
  const int width = left + plot_w + 40;
  const int height = top + plot_h + 110;

  double max_act = 0.0;
  double max_nt = 0.0;
  std::vector<std::string> omitted;
  for (const auto& r : rows) {
    if (!r.near_tie) {
      omitted.push_back(r.criterion_id);
      continue;
    }
    max_act = std::max(max_act, r.activation);
    max_nt = std::max(max_nt, *r.near_tie);
  }
  // Round axis tops up to a tidy 5% step.
  auto axis_top = [](double v) {
    double top_v = 0.05;
    while (top_v < v - 1e-12) top_v += 0.05;
    return top_v;
  };
  const double act_top = axis_top(std::max(max_act, 0.05));
  const double nt_top = axis_top(std::max(max_nt, 0.05));

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" font-family=\"sans-serif\">\n";
  svg << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\">Stability landscape, t="
      << threshold << "</text>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"#fafafa\" stroke=\"#888888\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double fx = i / 4.0;
    const int x = left + static_cast<int>(fx * plot_w);
    const int y = top + plot_h - static_cast<int>(fx * plot_h);
    svg << "<text x=\"" << x << "\" y=\"" << top + plot_h + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(fx * act_top * 100.0)
        << "%</text>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(fx * nt_top * 100.0)
        << "%</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << top + plot_h + 40
      << "\" font-size=\"13\" text-anchor=\"middle\">activation rate</text>\n";
  svg << "<text x=\"18\" y=\"" << top + plot_h / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + plot_h / 2 << ")\">near-tie rate</text>\n";

  for (const auto& r : rows) {
    if (!r.near_tie) continue;
    const double fx = act_top > 0 ? r.activation / act_top : 0.0;
    const double fy = nt_top > 0 ? *r.near_tie / nt_top : 0.0;
    const int x = left + static_cast<int>(fx * plot_w);
    const int y = top + plot_h - static_cast<int>(fy * plot_h);
    svg << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"7\" fill=\""
        << heat(r.unanimous.value_or(0.0)) << "\" stroke=\"#333333\"/>\n";
    svg << "<text x=\"" << x + 10 << "\" y=\"" << y - 6 << "\" font-size=\"12\">"
        << escape_xml(r.criterion_id) << "</text>\n";
  }

  const int ly = top + plot_h + 58;
  svg << "<text x=\"" << left << "\" y=\"" << ly
      << "\" font-size=\"12\">color encodes unanimity:</text>\n";
  for (int i = 0; i <= 10; ++i) {
    svg << "<rect x=\"" << left + 160 + i * 14 << "\" y=\"" << ly - 10
        << "\" width=\"14\" height=\"12\" fill=\"" << heat(i / 10.0) << "\"/>\n";
  }
  svg << "<text x=\"" << left + 160 << "\" y=\"" << ly + 16
      << "\" font-size=\"11\">0</text><text x=\"" << left + 160 + 140 << "\" y=\""
      << ly + 16 << "\" font-size=\"11\">1</text>\n";
  if (!omitted.empty()) {
    std::string joined;
    for (std::size_t i = 0; i < omitted.size(); ++i) {
      if (i) joined += ", ";
      joined += omitted[i];
    }
    svg << "<text x=\"" << left << "\" y=\"" << ly + 36
        << "\" font-size=\"12\">omitted (empty focus set): " << escape_xml(joined)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace audit
