// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "vqebo/aggregate.hpp"
#include "vqebo/options.hpp"
#include "vqebo/run.hpp"

namespace vqebo {

inline constexpr const char* kCsvHeader = "method,seed,n_obs,energy,fidelity,kappa,gamma,wall_ms";

struct CsvRow {
  std::string method;
  std::uint64_t seed = 0;
  long n_obs = 0;
  double energy = 0.0;
  std::optional<double> fidelity;
  std::optional<double> kappa;
  std::optional<double> gamma;
  double wall_ms = 0.0;
};

inline std::vector<CsvRow> to_csv_rows(const std::vector<TrialRecord>& records) {
  std::vector<CsvRow> rows;
  for (const auto& r : records) {
    for (const auto& t : r.rows) rows.push_back({r.method, r.seed, t.n_obs, t.energy, t.fidelity, t.kappa, t.gamma, t.wall_ms});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const CsvRow& a, const CsvRow& b) {
    return std::tie(a.method, a.seed, a.n_obs) < std::tie(b.method, b.seed, b.n_obs);
  });
  return rows;
}

inline void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  os << kCsvHeader << "\n";
  for (const auto& r : rows) {
    os << r.method << ',' << r.seed << ',' << r.n_obs << ',' << format_double(r.energy) << ',' << opt(r.fidelity)
       << ',' << opt(r.kappa) << ',' << opt(r.gamma) << ',' << format_double(r.wall_ms) << "\n";
  }
}

inline std::vector<CsvRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != kCsvHeader) throw std::invalid_argument("unexpected CSV header");
  std::vector<CsvRow> rows;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 8) throw std::invalid_argument("CSV row has " + std::to_string(f.size()) + " fields: " + line);
    auto opt = [](const std::string& s) -> std::optional<double> {
      if (trim(s).empty()) return std::nullopt;
      return parse_double(s);
    };
    CsvRow r;
    r.method = f[0];
    r.seed = static_cast<std::uint64_t>(parse_int(f[1], "seed"));
    r.n_obs = parse_int(f[2], "n_obs");
    r.energy = parse_double(f[3], "energy");
    r.fidelity = opt(f[4]);
    r.kappa = opt(f[5]);
    r.gamma = opt(f[6]);
    r.wall_ms = parse_double(f[7], "wall_ms");
    rows.push_back(r);
  }
  return rows;
}

enum class Metric { energy, fidelity };

/// Per-seed traces of one metric for one method. Traces missing the metric
/// anywhere are skipped.
inline std::vector<Trace> traces_for(const std::vector<CsvRow>& rows, const std::string& method, Metric metric) {
  std::map<std::uint64_t, Trace> by_seed;
  std::map<std::uint64_t, bool> complete;
  for (const auto& r : rows) {
    if (r.method != method) continue;
    auto& t = by_seed[r.seed];
    complete.try_emplace(r.seed, true);
    const std::optional<double> v = metric == Metric::energy ? std::optional<double>(r.energy) : r.fidelity;
    if (!v) {
      complete[r.seed] = false;
      continue;
    }
    t.x.push_back(static_cast<double>(r.n_obs));
    t.y.push_back(*v);
  }
  std::vector<Trace> out;
  for (auto& [seed, t] : by_seed) {
    if (complete[seed] && !t.x.empty()) out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<std::string> methods_in(const std::vector<CsvRow>& rows) {
  std::vector<std::string> m;
  for (const auto& r : rows) {
    if (std::find(m.begin(), m.end(), r.method) == m.end()) m.push_back(r.method);
  }
  return m;
}

struct MethodSummary {
  std::string method;
  std::size_t trials = 0;
  double n_obs = 0.0;
  Band energy;
  std::optional<Band> fidelity;
};

/// Quartiles at the largest observation count reached by the method.
inline std::vector<MethodSummary> summarize(const std::vector<CsvRow>& rows) {
  std::vector<MethodSummary> out;
  for (const auto& m : methods_in(rows)) {
    MethodSummary s;
    s.method = m;
    const auto e = traces_for(rows, m, Metric::energy);
    if (e.empty()) continue;
    s.trials = e.size();
    for (const auto& t : e) s.n_obs = std::max(s.n_obs, t.x.back());
    s.energy = aggregate(e).back();
    const auto f = traces_for(rows, m, Metric::fidelity);
    if (f.size() == e.size()) s.fidelity = aggregate(f).back();
    out.push_back(s);
  }
  return out;
}

inline void print_summary(std::ostream& os, const std::vector<MethodSummary>& summaries) {
  os << std::left << std::setw(10) << "method" << std::right << std::setw(7) << "trials" << std::setw(8) << "n_obs"
     << std::setw(12) << "ENG med" << std::setw(22) << "ENG [q25, q75]" << std::setw(10) << "FID med" << std::setw(20)
     << "FID [q25, q75]" << "\n";
  os << std::fixed << std::setprecision(4);
  for (const auto& s : summaries) {
    os << std::left << std::setw(10) << s.method << std::right << std::setw(7) << s.trials << std::setw(8)
       << static_cast<long>(s.n_obs) << std::setw(12) << s.energy.median << "   [" << std::setw(8) << s.energy.q25
       << ", " << std::setw(8) << s.energy.q75 << "]";
    if (s.fidelity) {
      os << std::setw(10) << s.fidelity->median << "   [" << std::setw(6) << s.fidelity->q25 << ", " << std::setw(6)
         << s.fidelity->q75 << "]";
    } else {
      os << std::setw(10) << "n/a";
    }
    os << "\n";
  }
  os.unsetf(std::ios::floatfield);
}

/// Gaussian KDE with Silverman's rule-of-thumb bandwidth.
inline std::vector<std::pair<double, double>> kde(const std::vector<double>& v, double lo, double hi, int points = 200) {
  std::vector<std::pair<double, double>> out;
  if (v.empty() || points < 2) return out;
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double sd = v.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  const double iqr = v.size() > 1 ? percentile(v, 75.0) - percentile(v, 25.0) : 0.0;
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd > 0.0 ? sd : std::max(1e-3, 0.01 * (hi - lo));
  const double bw = 0.9 * spread * std::pow(n, -0.2);
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    double d = 0.0;
    for (double s : v) d += std::exp(-0.5 * std::pow((x - s) / bw, 2));
    out.emplace_back(x, d / (n * bw * std::sqrt(2.0 * std::numbers::pi)));
  }
  return out;
}

namespace detail {

struct Panel {
  double x0, y0, w, h;
  double xmin, xmax, ymin, ymax;
  double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
  double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

inline const char* color(std::size_t i) {
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
  return kColors[i % 6];
}

inline void axes(std::ostream& os, const Panel& p, const std::string& title, const std::string& xlabel) {
  os << "<rect x='" << p.x0 << "' y='" << p.y0 << "' width='" << p.w << "' height='" << p.h
     << "' fill='none' stroke='#444'/>\n";
  os << "<text x='" << p.x0 + p.w / 2 << "' y='" << p.y0 - 8 << "' text-anchor='middle' font-size='13'>" << title
     << "</text>\n";
  os << "<text x='" << p.x0 + p.w / 2 << "' y='" << p.y0 + p.h + 32 << "' text-anchor='middle' font-size='11'>"
     << xlabel << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = p.xmin + (p.xmax - p.xmin) * k / 4.0, yv = p.ymin + (p.ymax - p.ymin) * k / 4.0;
    os << "<text x='" << p.px(xv) << "' y='" << p.y0 + p.h + 14 << "' text-anchor='middle' font-size='10'>"
       << format_double(std::round(xv * 100.0) / 100.0) << "</text>\n";
    os << "<text x='" << p.x0 - 4 << "' y='" << p.py(yv) + 3 << "' text-anchor='end' font-size='10'>"
       << format_double(std::round(yv * 100.0) / 100.0) << "</text>\n";
  }
}

inline void bands(std::ostream& os, const Panel& p, const std::vector<Band>& b, const char* col) {
  if (b.empty()) return;
  os << "<polygon fill='" << col << "' fill-opacity='0.2' stroke='none' points='";
  for (const auto& v : b) os << p.px(v.x) << ',' << p.py(v.q75) << ' ';
  for (auto it = b.rbegin(); it != b.rend(); ++it) os << p.px(it->x) << ',' << p.py(it->q25) << ' ';
  os << "'/>\n<polyline fill='none' stroke='" << col << "' stroke-width='1.5' points='";
  for (const auto& v : b) os << p.px(v.x) << ',' << p.py(v.median) << ' ';
  os << "'/>\n";
}

}  // namespace detail

/// Median/IQR curves of energy and fidelity plus a KDE of final energies.
inline void write_svg(std::ostream& os, const std::vector<CsvRow>& rows, std::optional<double> ground_energy) {
  const auto methods = methods_in(rows);
  std::map<std::string, std::vector<Band>> eb, fb;
  std::map<std::string, std::vector<double>> finals;
  double xmax = 1.0, emin = std::numeric_limits<double>::infinity(), emax = -emin;
  bool any_fid = false;
  for (const auto& m : methods) {
    const auto e = traces_for(rows, m, Metric::energy);
    if (e.empty()) continue;
    eb[m] = aggregate(e);
    finals[m] = final_values(e);
    for (const auto& b : eb[m]) {
      xmax = std::max(xmax, b.x);
      emin = std::min(emin, b.q25);
      emax = std::max(emax, b.q75);
    }
    const auto f = traces_for(rows, m, Metric::fidelity);
    if (!f.empty()) {
      fb[m] = aggregate(f);
      any_fid = true;
    }
  }
  if (ground_energy) emin = std::min(emin, *ground_energy);
  if (!std::isfinite(emin)) emin = 0.0, emax = 1.0;
  if (emax - emin < 1e-9) emax = emin + 1.0;
  const double pad = 0.05 * (emax - emin);
  emin -= pad;
  emax += pad;

  os << "<svg xmlns='http://www.w3.org/2000/svg' width='1100' height='360' font-family='sans-serif'>\n";
  os << "<rect width='1100' height='360' fill='white'/>\n";
  const detail::Panel pe{60, 30, 380, 270, 0.0, xmax, emin, emax};
  detail::axes(os, pe, "energy (median, 25-75%)", "observations");
  if (ground_energy) {
    os << "<line x1='" << pe.x0 << "' x2='" << pe.x0 + pe.w << "' y1='" << pe.py(*ground_energy) << "' y2='"
       << pe.py(*ground_energy) << "' stroke='#888' stroke-dasharray='4 3'/>\n";
  }
  std::size_t ci = 0;
  for (const auto& m : methods) {
    if (eb.count(m)) detail::bands(os, pe, eb[m], detail::color(ci));
    os << "<text x='" << pe.x0 + 8 << "' y='" << pe.y0 + 16 + 14 * ci << "' font-size='11' fill='" << detail::color(ci)
       << "'>" << m << "</text>\n";
    ++ci;
  }
  if (any_fid) {
    const detail::Panel pf{510, 30, 300, 270, 0.0, xmax, 0.0, 1.0};
    detail::axes(os, pf, "fidelity (median, 25-75%)", "observations");
    ci = 0;
    for (const auto& m : methods) {
      if (fb.count(m)) detail::bands(os, pf, fb[m], detail::color(ci));
      ++ci;
    }
  }
  std::vector<std::vector<std::pair<double, double>>> dens;
  double dmax = 0.0;
  for (const auto& m : methods) {
    dens.push_back(kde(finals[m], emin, emax));
    for (const auto& [x, d] : dens.back()) dmax = std::max(dmax, d);
  }
  if (dmax > 0.0) {
    const detail::Panel pk{870, 30, 200, 270, 0.0, dmax, emin, emax};
    detail::axes(os, pk, "final energy density", "density");
    for (std::size_t i = 0; i < dens.size(); ++i) {
      os << "<polyline fill='none' stroke='" << detail::color(i) << "' points='";
      for (const auto& [x, d] : dens[i]) os << pk.px(d) << ',' << pk.py(x) << ' ';
      os << "'/>\n";
    }
  }
  os << "</svg>\n";
}

}  // namespace vqebo
