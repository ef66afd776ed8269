#include "vigfgan/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "vigfgan/errors.hpp"

namespace vig {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
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

bool to_number(const std::string& s, double& v) {
  if (s.empty()) return false;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(v);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Mean over finite values of column y grouped by the x column, within rows matching `keep`.
template <class Keep>
Series grouped(const CsvTable& t, int x, int y, int group, const std::string& name, bool line, Keep keep) {
  std::map<double, std::vector<double>> acc;
  for (const auto& r : t.rows) {
    double xv, yv;
    if (!keep(r) || !to_number(r[x], xv) || !to_number(r[y], yv)) continue;
    acc[xv].push_back(yv);
  }
  Series s{name, {}, line};
  for (auto& [xv, ys] : acc) {
    if (group < 0) {
      double m = 0.0;
      for (double v : ys) m += v;
      s.points.emplace_back(xv, m / ys.size());
    } else {
      for (double v : ys) s.points.emplace_back(xv, v);
    }
  }
  return s;
}

std::vector<SvgFile> plot_experiment_a(const std::string& stem, const CsvTable& t) {
  const int obj = t.column("objective"), mu = t.column("mu"), kde = t.column("kde_loglik"),
            seed = t.column("seed");
  std::set<std::string> objectives;
  for (const auto& r : t.rows) objectives.insert(r[obj]);
  std::vector<SvgFile> out;
  for (const auto& o : objectives) {
    auto is = [&](const std::vector<std::string>& r) { return r[obj] == o; };
    std::vector<Series> ss = {grouped(t, mu, kde, seed, "runs", false, is),
                              grouped(t, mu, kde, -1, "mean over seeds", true, is)};
    out.push_back({stem + "_" + o + ".svg", svg_plot(stem + " (" + o + ")", "mu (1 = ReLU)", "final KDE log-likelihood", ss)});
  }
  return out;
}

std::vector<SvgFile> plot_experiment_b(const std::string& stem, const CsvTable& t) {
  const int obj = t.column("objective"), link = t.column("link"), kde = t.column("kde_loglik"),
            seed = t.column("seed");
  std::set<std::string> objectives;
  for (const auto& r : t.rows) objectives.insert(r[obj]);
  std::vector<SvgFile> out;
  for (const auto& o : objectives) {
    std::set<std::string> links;
    for (const auto& r : t.rows)
      if (r[obj] == o) links.insert(r[link]);
    std::vector<Series> ss;
    for (const auto& l : links)
      ss.push_back(grouped(t, seed, kde, seed, l, true,
                           [&](const std::vector<std::string>& r) { return r[obj] == o && r[link] == l; }));
    out.push_back({stem + "_" + o + ".svg", svg_plot(stem + " (" + o + ")", "seed", "final KDE log-likelihood", ss)});
  }
  return out;
}

std::vector<SvgFile> plot_generic(const std::string& stem, const CsvTable& t) {
  std::vector<int> numeric;
  for (int c = 0; c < static_cast<int>(t.header.size()); ++c) {
    bool any = false, all = true;
    for (const auto& r : t.rows) {
      double v;
      if (to_number(r[c], v)) any = true;
      else if (!r[c].empty() && r[c] != "nan") all = false;
    }
    if (any && all) numeric.push_back(c);
  }
  if (numeric.size() < 2) throw DomainError("no two numeric columns to plot in " + stem);
  const int x = numeric[0];
  std::vector<Series> ss;
  for (size_t k = 1; k < numeric.size() && ss.size() < 6; ++k) {
    Series s{t.header[numeric[k]], {}, false};
    for (const auto& r : t.rows) {
      double xv, yv;
      if (to_number(r[x], xv) && to_number(r[numeric[k]], yv)) s.points.emplace_back(xv, yv);
    }
    ss.push_back(std::move(s));
  }
  return {{stem + ".svg", svg_plot(stem, t.header[x], "value", ss)}};
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line) || line.empty()) throw DomainError("empty csv");
  t.header = split(line);
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    auto r = split(line);
    if (r.size() != t.header.size()) throw DomainError("ragged csv row: " + line);
    t.rows.push_back(std::move(r));
  }
  return t;
}

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<Series>& series) {
  const double W = 640, H = 420, left = 70, right = 150, top = 40, bottom = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      x0 = std::min(x0, x), x1 = std::max(x1, x);
      y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad, y1 += pad;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (W - left - right); };
  auto py = [&](double y) { return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right << "\" height=\"" << H - top - bottom
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + k * (x1 - x0) / 4, yv = y0 + k * (y1 - y0) / 4;
    os << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(H - bottom + 15) << "\" text-anchor=\"middle\">" << label(xv) << "</text>\n";
    os << "<text x=\"" << num(left - 5) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << label(yv) << "</text>\n";
  }
  os << "<text x=\"" << num((left + W - right) / 2) << "\" y=\"" << num(H - 12) << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
  os << "<text transform=\"translate(16," << num((top + H - bottom) / 2) << ") rotate(-90)\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n";
  for (size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* c = kColors[i % (sizeof kColors / sizeof *kColors)];
    if (s.line && s.points.size() > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
      for (auto [x, y] : s.points) os << num(px(x)) << ',' << num(py(y)) << ' ';
      os << "\"/>\n";
    }
    for (auto [x, y] : s.points)
      os << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"2.5\" fill=\"" << c << "\"/>\n";
    const double ly = top + 14 + 16 * static_cast<double>(i);
    os << "<rect x=\"" << num(W - right + 10) << "\" y=\"" << num(ly - 8) << "\" width=\"10\" height=\"10\" fill=\"" << c << "\"/>\n";
    os << "<text x=\"" << num(W - right + 25) << "\" y=\"" << num(ly + 1) << "\">" << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<SvgFile> plot_csv(const std::string& stem, const std::string& text) {
  const auto t = parse_csv(text);
  if (t.column("mu") >= 0 && t.column("objective") >= 0 && t.column("kde_loglik") >= 0 && t.column("seed") >= 0)
    return plot_experiment_a(stem, t);
  if (t.column("link") >= 0 && t.column("objective") >= 0 && t.column("kde_loglik") >= 0 && t.column("seed") >= 0)
    return plot_experiment_b(stem, t);
  return plot_generic(stem, t);
}

}  // namespace vig
