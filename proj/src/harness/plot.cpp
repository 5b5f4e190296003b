#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mcb/error.hpp"
#include "mcb/harness.hpp"

namespace mcb {
namespace {

struct KindInfo {
  const char* kind;
  const char* param;
  const char* title;
  const char* xlabel;
};

constexpr KindInfo kKinds[] = {
    {"fig2a", "S", "Suboptimality vs contexts", "S"},
    {"fig2b", "A", "Suboptimality vs actions", "A"},
    {"fig2c", "T_over_L", "Suboptimality vs per-user interactions", "T/L"},
    {"fig2d", "alpha", "Robustness to the corruption rate", "alpha"},
    {"fig3a", "L", "Effective corruption rate", "L"},
    {"fig3b", "alpha", "Misspecified alpha_hat", "true alpha"},
    {"fig3c", "eps0", "Heterogeneous users", "eps0"},
};

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<SummaryRow>& summary, const std::string& kind) {
  if (summary.empty()) fail(ErrorCode::kInvalidArgument, "plot: empty result");
  const std::string param = summary.front().param;
  std::string title = "Suboptimality vs " + param;
  std::string xlabel = param;
  if (kind != "auto") {
    const auto it = std::find_if(std::begin(kKinds), std::end(kKinds), [&](const KindInfo& k) { return kind == k.kind; });
    if (it == std::end(kKinds)) fail(ErrorCode::kUnknownKind, "plot: unknown kind '" + kind + "'");
    if (param != it->param) {
      fail(ErrorCode::kInvalidArgument,
           "plot: kind " + kind + " expects a sweep over " + it->param + ", data sweeps " + param);
    }
    title = it->title;
    xlabel = it->xlabel;
  }

  std::vector<std::string> algos;
  std::map<std::string, std::vector<const SummaryRow*>> series;
  double xmin = summary.front().x, xmax = xmin, ymax = 0.0;
  for (const auto& s : summary) {
    if (!series.count(s.algorithm)) algos.push_back(s.algorithm);
    series[s.algorithm].push_back(&s);
    xmin = std::min(xmin, s.x);
    xmax = std::max(xmax, s.x);
    ymax = std::max(ymax, s.mean + s.stderr_mean);
  }
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  ymax = ymax > 0.0 ? ymax * 1.1 : 1.0;

  const double W = 680, H = 420, left = 70, right = 180, top = 40, bottom = 55;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + ph - y / ymax * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0;
    const double yv = ymax * k / 4.0;
    svg << "<line x1=\"" << num(px(xv)) << "\" y1=\"" << top + ph << "\" x2=\"" << num(px(xv)) << "\" y2=\""
        << top + ph + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(px(xv)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << num(xv)
        << "</text>\n";
    svg << "<line x1=\"" << left - 5 << "\" y1=\"" << num(py(yv)) << "\" x2=\"" << left << "\" y2=\"" << num(py(yv))
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
        << "</text>\n";
  }
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << escape(xlabel)
      << "</text>\n";
  svg << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + ph / 2 << ")\">suboptimality</text>\n";

  for (std::size_t a = 0; a < algos.size(); ++a) {
    auto pts = series[algos[a]];
    std::stable_sort(pts.begin(), pts.end(), [](const SummaryRow* p, const SummaryRow* q) { return p->x < q->x; });
    const char* color = kPalette[a % std::size(kPalette)];
    std::string band, line;
    for (const auto* p : pts) band += num(px(p->x)) + "," + num(py(p->mean + p->stderr_mean)) + " ";
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      band += num(px((*it)->x)) + "," + num(py(std::max(0.0, (*it)->mean - (*it)->stderr_mean))) + " ";
    }
    for (const auto* p : pts) line += num(px(p->x)) + "," + num(py(p->mean)) + " ";
    svg << "<polygon points=\"" << band << "\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    svg << "<polyline points=\"" << line << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    for (const auto* p : pts) {
      svg << "<circle cx=\"" << num(px(p->x)) << "\" cy=\"" << num(py(p->mean)) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    const double ly = top + 10 + 20.0 * static_cast<double>(a);
    svg << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + pw + 45 << "\" y=\"" << ly + 4 << "\">" << escape(algos[a]) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

PlotFiles emit_plots(const SweepResult& result, const std::string& kind, const std::string& prefix) {
  if (result.rows.empty()) fail(ErrorCode::kInvalidArgument, "plot: empty result");
  const auto summary = aggregate(result);
  render_svg(summary, kind);  // reject bad kinds before touching the filesystem
  PlotFiles files{prefix + ".summary.csv", prefix + ".svg"};
  {
    std::ofstream os(files.summary_csv, std::ios::binary);
    if (!os) fail(ErrorCode::kIo, "cannot write " + files.summary_csv);
    write_summary_csv(os, summary);
  }
  std::ifstream is(files.summary_csv, std::ios::binary);
  const std::string rendered = render_svg(read_summary_csv(is), kind);
  std::ofstream os(files.svg, std::ios::binary);
  if (!os) fail(ErrorCode::kIo, "cannot write " + files.svg);
  os << rendered;
  return files;
}

}  // namespace mcb
