#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "study.hpp"

namespace qmcap {

inline std::string fmt_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

inline const char* sweep_csv_header() { return "protocol,d,delta0,N,lambda1,sigma1,nz,nt,nw,checked,flagged,error"; }

inline std::string sweep_csv(const SweepResult& s) {
  std::ostringstream o;
  o << sweep_csv_header() << "\n";
  for (const auto& p : s.points) {
    std::string err = p.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    o << to_string(s.protocol) << "," << fmt_num(p.d) << "," << fmt_num(p.delta0) << "," << p.N << ","
      << fmt_num(p.lambda1) << "," << fmt_num(p.sigma1) << "," << p.grid.nz << "," << p.grid.nt << "," << p.grid.nw
      << "," << (p.checked ? 1 : 0) << "," << (p.flagged ? 1 : 0) << "," << err << "\n";
  }
  return o.str();
}

struct SweepRow {
  std::string protocol;
  double d = 0;
  double N = 0;
  bool failed = false;
};

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline bool parse_double(const std::string& s, double& x) {
  if (s.empty()) return false;
  char* end = nullptr;
  x = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(x);
}

}  // namespace detail

// Reads a sweep CSV (needs d and N columns). Rows carrying an error are kept
// but marked failed. Row numbers in messages count the header as row 1.
inline std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(bool(std::getline(in, line)), "malformed sweep CSV: row 1: missing header");
  auto head = detail::split(line, ',');
  auto col = [&](const std::string& name) {
    auto it = std::find(head.begin(), head.end(), name);
    return it == head.end() ? -1 : int(it - head.begin());
  };
  int cd = col("d"), cn = col("N"), cp = col("protocol"), ce = col("error");
  require(cd >= 0 && cn >= 0, "malformed sweep CSV: row 1: header lacks d or N column");
  std::vector<SweepRow> rows;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto f = detail::split(line, ',');
    require(f.size() == head.size(), "malformed sweep CSV: row " + std::to_string(row) + ": expected " +
                                         std::to_string(head.size()) + " fields, got " + std::to_string(f.size()));
    SweepRow r;
    if (cp >= 0) r.protocol = f[cp];
    r.failed = ce >= 0 && !f[ce].empty();
    require(detail::parse_double(f[cd], r.d), "malformed sweep CSV: row " + std::to_string(row) + ": bad d '" + f[cd] + "'");
    require(detail::parse_double(f[cn], r.N), "malformed sweep CSV: row " + std::to_string(row) + ": bad N '" + f[cn] + "'");
    rows.push_back(r);
  }
  return rows;
}

// Static line chart of N against d, one polyline per protocol.
inline std::string svg_chart(const std::vector<SweepRow>& rows, const std::string& title = "capacity") {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  double xmax = 0, ymax = 0;
  for (const auto& r : rows) {
    if (r.failed) continue;
    series[r.protocol.empty() ? "series" : r.protocol].emplace_back(r.d, r.N);
    xmax = std::max(xmax, r.d);
    ymax = std::max(ymax, r.N);
  }
  if (xmax <= 0) xmax = 1;
  if (ymax <= 0) ymax = 1;
  auto nice = [](double v) {
    double p = std::pow(10.0, std::floor(std::log10(v)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (m * p >= v) return m * p;
    return 10 * p;
  };
  xmax = nice(xmax);
  ymax = nice(ymax);
  const double W = 640, H = 420, l = 60, r = 20, t = 40, b = 50;
  auto X = [&](double x) { return l + (W - l - r) * x / xmax; };
  auto Y = [&](double y) { return H - b - (H - t - b) * y / ymax; };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\">" << title << "</text>\n";
  o << "<line x1=\"" << l << "\" y1=\"" << H - b << "\" x2=\"" << W - r << "\" y2=\"" << H - b << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << l << "\" y1=\"" << t << "\" x2=\"" << l << "\" y2=\"" << H - b << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    double xv = xmax * i / 5, yv = ymax * i / 5;
    o << "<line x1=\"" << X(xv) << "\" y1=\"" << H - b << "\" x2=\"" << X(xv) << "\" y2=\"" << H - b + 5
      << "\" stroke=\"black\"/><text x=\"" << X(xv) << "\" y=\"" << H - b + 18
      << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << fmt_num(xv) << "</text>\n";
    o << "<line x1=\"" << l - 5 << "\" y1=\"" << Y(yv) << "\" x2=\"" << l << "\" y2=\"" << Y(yv)
      << "\" stroke=\"black\"/><text x=\"" << l - 8 << "\" y=\"" << Y(yv) + 4
      << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt_num(yv) << "</text>\n";
  }
  o << "<text x=\"" << (l + W - r) / 2 << "\" y=\"" << H - 12
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\">d</text>\n";
  o << "<text x=\"16\" y=\"" << (t + H - b) / 2 << "\" font-family=\"sans-serif\">N</text>\n";
  int ci = 0;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const char* c = colors[ci % 6];
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) o << (i ? " " : "") << X(pts[i].first) << "," << Y(pts[i].second);
    o << "\"/>\n";
    o << "<text x=\"" << l + 12 << "\" y=\"" << t + 16 * (ci + 1) << "\" fill=\"" << c
      << "\" font-size=\"12\" font-family=\"sans-serif\">" << name << "</text>\n";
    ++ci;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace qmcap
