#include "budget_stream/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "budget_stream/error.hpp"

namespace budget_stream {
namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(std::string text, std::size_t row, std::size_t column) {
  while (!text.empty() && (text.back() == '\r' || text.back() == ' ')) text.pop_back();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw ParseError("non-numeric cell '" + text + "'", row, column);
  return v;
}

// Policies in first-appearance order with their points sorted by alpha.
std::vector<std::pair<std::string, std::vector<SweepAggregate>>> series(const std::vector<SweepAggregate>& aggs) {
  std::vector<std::pair<std::string, std::vector<SweepAggregate>>> out;
  for (const auto& a : aggs) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& s) { return s.first == a.policy; });
    if (it == out.end()) {
      out.push_back({a.policy, {}});
      it = out.end() - 1;
    }
    it->second.push_back(a);
  }
  for (auto& s : out)
    std::sort(s.second.begin(), s.second.end(), [](const auto& x, const auto& y) { return x.alpha < y.alpha; });
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::vector<SweepAggregate> read_aggregate_csv(std::istream& in) {
  std::vector<SweepAggregate> out;
  std::string line;
  std::size_t row = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    if (header) {
      header = false;
      continue;
    }
    const auto cells = split_commas(line);
    if (cells.size() != 4) throw ParseError(fmt::format("expected 4 cells, found {}", cells.size()), row, cells.size());
    if (cells[0].empty()) throw ParseError("empty policy name", row, 1);
    out.push_back({cells[0], parse_cell(cells[1], row, 2), parse_cell(cells[2], row, 3), parse_cell(cells[3], row, 4)});
  }
  if (out.empty()) throw SchemaError("results table has no data rows");
  return out;
}

std::string render_svg(const std::vector<SweepAggregate>& aggregates) {
  if (aggregates.empty()) throw SchemaError("nothing to plot");
  const auto lines = series(aggregates);

  constexpr double width = 720, height = 440;
  constexpr double left = 70, right = 190, top = 40, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double x_min = aggregates.front().alpha, x_max = x_min;
  double y_min = aggregates.front().mean_auc, y_max = y_min;
  for (const auto& a : aggregates) {
    x_min = std::min(x_min, a.alpha);
    x_max = std::max(x_max, a.alpha);
    y_min = std::min(y_min, a.mean_auc);
    y_max = std::max(y_max, a.mean_auc);
  }
  if (x_max - x_min < 1e-9) {
    x_min -= 0.05;
    x_max += 0.05;
  }
  y_min = std::floor(y_min * 20.0) / 20.0;
  y_max = std::ceil(y_max * 20.0) / 20.0;
  if (y_max - y_min < 0.05) y_max = y_min + 0.05;

  auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return top + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      width, height, width, height);
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width, height);
  svg += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">Mean AUC by budget fraction</text>\n",
                     left + plot_w / 2);
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left, top,
                     plot_w, plot_h);

  for (int i = 0; i <= 5; ++i) {
    const double y = y_min + (y_max - y_min) * i / 5.0;
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#dddddd\"/>\n", left,
                       py(y), left + plot_w, py(y));
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.3f}</text>\n", left - 6, py(y) + 4, y);
  }
  std::set<double> ticks;
  for (const auto& a : aggregates) ticks.insert(a.alpha);
  for (double x : ticks)
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", px(x), top + plot_h + 18, x);
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">budget fraction (alpha)</text>\n",
                     left + plot_w / 2, height - 14);
  svg += fmt::format("<text x=\"18\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2f})\">mean AUC</text>\n",
                     top + plot_h / 2, top + plot_h / 2);

  for (std::size_t s = 0; s < lines.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    std::string points;
    for (const auto& a : lines[s].second) points += fmt::format("{:.2f},{:.2f} ", px(a.alpha), py(a.mean_auc));
    if (!points.empty()) points.pop_back();
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n", color, points);
    for (const auto& a : lines[s].second)
      svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", px(a.alpha), py(a.mean_auc), color);
    const double ly = top + 10 + 20.0 * static_cast<double>(s);
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                       left + plot_w + 15, ly, left + plot_w + 40, ly, color);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", left + plot_w + 46, ly + 4, lines[s].first);
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_markdown(const std::vector<SweepAggregate>& aggregates) {
  const auto lines = series(aggregates);
  std::set<double> alphas;
  for (const auto& a : aggregates) alphas.insert(a.alpha);

  std::string md = "| policy |";
  std::string rule = "|---|";
  for (double a : alphas) {
    md += fmt::format(" {} |", a);
    rule += "---|";
  }
  md += "\n" + rule + "\n";
  for (const auto& [name, points] : lines) {
    md += "| " + name + " |";
    for (double a : alphas) {
      auto it = std::find_if(points.begin(), points.end(), [&](const auto& p) { return p.alpha == a; });
      md += it == points.end() ? " |" : fmt::format(" {:.4f} ± {:.4f} |", it->mean_auc, it->std_auc);
    }
    md += "\n";
  }
  return md;
}

}  // namespace budget_stream
