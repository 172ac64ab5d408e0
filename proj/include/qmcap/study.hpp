#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "kernels.hpp"
#include "mb_solver.hpp"
#include "protocol.hpp"
#include "schmidt.hpp"

namespace qmcap {

inline constexpr const char* version = "qmcap-1.0.0";

using json = nlohmann::json;

// Base grid sizes; scale multiplies every resolution (2 = refinement check).
struct GridConfig {
  int nz = 400;
  int nt = 600;
  int nw = 801;
  int scale = 1;
};

struct GridMeta {
  int nz = 0, nt = 0, nw = 0;
};

struct Evaluation {
  SingularSpectrum spectrum;
  GridMeta grid;
};

inline json to_json(const ProtocolSpec& s) {
  json j{{"protocol", to_string(s.protocol)}, {"d", s.d}, {"gamma", s.gamma}, {"delta0", s.delta0}};
  if (s.protocol == Protocol::afc) j["M"] = s.M;
  if (s.protocol == Protocol::raman) {
    j["delta"] = s.delta;
    if (s.control)
      j["control"] = {{"amplitude", s.control->amplitude}, {"center", s.control->center}, {"width", s.control->width}};
  }
  return j;
}

inline json to_json(const GridMeta& g) { return {{"nz", g.nz}, {"nt", g.nt}, {"nw", g.nw}}; }

inline json to_json(const GridConfig& g) {
  return {{"nz", g.nz}, {"nt", g.nt}, {"nw", g.nw}, {"scale", g.scale}};
}

inline json to_json(const SingularSpectrum& s) {
  return {{"values", s.values}, {"kind", to_string(s.kind)}, {"resolution", s.resolution}, {"warnings", s.warnings}};
}

inline SingularSpectrum spectrum_from_json(const json& j) {
  SingularSpectrum s;
  s.values = j.at("values").get<std::vector<double>>();
  std::string k = j.at("kind").get<std::string>();
  s.kind = k == "storage" ? KernelKind::storage : k == "total" ? KernelKind::total : KernelKind::product;
  if (k != "storage" && k != "total" && k != "product") throw std::runtime_error("bad kind");
  s.resolution = j.at("resolution").get<std::vector<std::size_t>>();
  s.warnings = j.at("warnings").get<std::vector<std::string>>();
  return s;
}

// ---- spectrum evaluation per protocol -----------------------------------

inline double frequency_half_width(const ProtocolSpec& s) { return 0.5 * s.delta0 + 20.0 * s.gamma; }

inline int frequency_core_nodes(const ProtocolSpec& s, const GridConfig& g, double max_spacing) {
  double W = frequency_half_width(s);
  int n = std::max(g.nw, int(std::ceil(2.0 * W / max_spacing)) + 1);
  return g.scale * (n - 1) + 1;
}

inline Evaluation evaluate_spectrum(const ProtocolSpec& spec, const GridConfig& g = {}) {
  spec.validate();
  require(g.nz >= 16 && g.nt >= 16 && g.nw >= 16 && g.scale >= 1, "grid sizes: nz, nt, nw >= 16 and scale >= 1");
  Evaluation ev;
  switch (spec.protocol) {
    case Protocol::unbroadened: {
      int nz = g.nz * g.scale;
      ev.grid.nz = nz;
      ev.spectrum = hermitian_eigen_spectrum(unbroadened_antinormal_kernel(spec, gauss_legendre_grid(nz, 0.0, 1.0)));
      break;
    }
    case Protocol::tcrib: {
      int n = frequency_core_nodes(spec, g, 1.0);
      ev.grid.nw = n;
      Grid w = tailed_frequency_grid(n, frequency_half_width(spec), 48 * g.scale);
      ev.spectrum = singular_spectrum(tcrib_total_kernel(spec, w));
      break;
    }
    case Protocol::afc: {
      int n = frequency_core_nodes(spec, g, 0.5);
      ev.grid.nw = n;
      Grid w = tailed_frequency_grid(n, frequency_half_width(spec), 48 * g.scale);
      ev.spectrum = singular_spectrum(afc_total_kernel(spec, w));
      break;
    }
    case Protocol::lcrib_numeric: {
      SolverConfig cfg;
      cfg.n_z = g.nz * g.scale;
      MaxwellBloch probe(spec, cfg);
      cfg.n_t = probe.config().n_t * g.scale;
      MaxwellBloch mb(spec, cfg);
      ev.grid.nz = cfg.n_z;
      ev.grid.nt = cfg.n_t;
      ev.spectrum = singular_spectrum(mb.greens_function());
      break;
    }
    case Protocol::raman: {
      int nz = g.scale * std::max(g.nz, int(std::ceil(0.2 * spec.delta0)) + 48);
      int nt = g.scale * std::max(g.nt, int(std::ceil(2.0 * spec.delta0)));
      ev.grid.nz = nz;
      ev.grid.nt = nt;
      RamanMediumOptions opt;
      opt.dk /= g.scale;
      auto K = raman_medium_kernel(spec, gauss_legendre_grid(nz, 0.0, 1.0),
                                   midpoint_grid(nt, -0.5, 0.5, Axis::time), opt);
      ev.spectrum = singular_spectrum(K);
      break;
    }
    case Protocol::lcrib_analytic:
      throw ValidationError("lcrib-analytic is a validation kernel; use lcrib-numeric for capacity");
  }
  return ev;
}

// ---- cache ---------------------------------------------------------------

inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

inline json cache_request(const ProtocolSpec& spec, const GridConfig& g) {
  return {{"spec", to_json(spec)}, {"grid", to_json(g)}, {"version", version}};
}

// Returns the stored spectrum for `request` or computes and stores it.
// Warnings about unreadable entries are appended to the result.
inline Evaluation cached_evaluate(const json& request, const std::function<Evaluation()>& compute,
                                  const std::string& cache_dir, bool* hit = nullptr) {
  if (hit) *hit = false;
  if (cache_dir.empty()) return compute();
  namespace fs = std::filesystem;
  std::string canon = request.dump();
  fs::path path = fs::path(cache_dir) / (fnv1a_hex(canon) + ".json");
  std::string corrupt;
  if (fs::exists(path)) {
    try {
      std::ifstream in(path);
      json doc = json::parse(in);
      if (doc.at("request") == request && doc.at("version") == version) {
        Evaluation ev;
        ev.spectrum = spectrum_from_json(doc.at("spectrum"));
        ev.grid = {doc.at("grid").at("nz").get<int>(), doc.at("grid").at("nt").get<int>(),
                   doc.at("grid").at("nw").get<int>()};
        if (hit) *hit = true;
        return ev;
      }
    } catch (const std::exception& e) {
      corrupt = std::string("cache entry ") + path.filename().string() + " unreadable, recomputed";
    }
  }
  Evaluation ev = compute();
  json doc{{"request", request}, {"version", version}, {"spectrum", to_json(ev.spectrum)}, {"grid", to_json(ev.grid)}};
  std::error_code ec;
  fs::create_directories(cache_dir, ec);
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
         std::to_string(counter++);
  {
    std::ofstream out(tmp);
    out << doc.dump(1) << "\n";
  }
  fs::rename(tmp, path, ec);
  if (ec) fs::remove(tmp, ec);
  if (!corrupt.empty()) ev.spectrum.warnings.push_back(corrupt);
  return ev;
}

// Spectrum evaluation with an optional on-disk cache.
struct Evaluator {
  GridConfig grid;
  std::string cache_dir;

  Evaluation operator()(const ProtocolSpec& spec, int scale = 1) const {
    GridConfig g = grid;
    g.scale *= scale;
    return cached_evaluate(cache_request(spec, g), [&] { return evaluate_spectrum(spec, g); }, cache_dir);
  }
};

// ---- broadening optimization --------------------------------------------

struct SearchConfig {
  double lo = 0;  // 0: protocol default
  double hi = 0;
  int scan_points = 25;
  int golden_iterations = 12;
};

inline std::pair<double, double> default_search_bounds(Protocol p, double d) {
  if (p == Protocol::raman) return {std::max(1.0, d / 200.0), d / 2.0};
  return {std::max(1.0, d / 200.0), 10.0 * d};
}

struct OptimizeResult {
  double delta0 = 0;
  CapacityResult capacity;
  Evaluation evaluation;
  std::vector<std::string> warnings;
  int evaluations = 0;
};

inline double capacity_objective(const CapacityResult& c) { return c.N + c.next_lambda(); }

inline OptimizeResult optimize_broadening(ProtocolSpec spec, double theta, SearchConfig cfg = {},
                                          const Evaluator& eval = {}) {
  require(spec.protocol == Protocol::tcrib || spec.protocol == Protocol::lcrib_numeric ||
              spec.protocol == Protocol::raman,
          std::string("optimize_broadening: protocol in {tcrib, lcrib-numeric, raman} (got ") +
              to_string(spec.protocol) + ")");
  auto [dlo, dhi] = default_search_bounds(spec.protocol, spec.d);
  double lo = cfg.lo > 0 ? cfg.lo : dlo;
  double hi = cfg.hi > 0 ? cfg.hi : dhi;
  require(lo > 0 && lo <= hi, "search bounds: 0 < lo <= hi");
  require(cfg.scan_points >= 1, "search: scan_points >= 1");

  OptimizeResult best;
  double best_obj = -1;
  auto try_point = [&](double delta0) {
    spec.delta0 = delta0;
    Evaluation ev = eval(spec);
    CapacityResult c = capacity(ev.spectrum, theta);
    double obj = capacity_objective(c);
    ++best.evaluations;
    if (obj > best_obj) {
      best_obj = obj;
      int n = best.evaluations;
      best.delta0 = delta0;
      best.capacity = c;
      best.evaluation = ev;
      best.evaluations = n;
    }
    return obj;
  };

  if (lo == hi || cfg.scan_points == 1) {
    try_point(lo);
  } else {
    const int n = cfg.scan_points;
    std::vector<double> xs(n), obj(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) {
      xs[i] = i == n - 1 ? hi : std::exp(llo + (lhi - llo) * i / (n - 1));
      obj[i] = try_point(xs[i]);
    }
    int ib = int(std::max_element(obj.begin(), obj.end()) - obj.begin());
    double a = std::log(xs[std::max(ib - 1, 0)]), b = std::log(xs[std::min(ib + 1, n - 1)]);
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = try_point(std::exp(x1)), f2 = try_point(std::exp(x2));
    for (int it = 0; it < cfg.golden_iterations; ++it) {
      if (f1 >= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - r * (b - a);
        f1 = try_point(std::exp(x1));
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + r * (b - a);
        f2 = try_point(std::exp(x2));
      }
    }
  }
  best.warnings = best.evaluation.spectrum.warnings;
  if (best.capacity.N == 0) best.warnings.push_back("no broadening width in the search bounds gives N >= 1");
  return best;
}

// ---- sweeps ----------------------------------------------------------------

struct SweepPoint {
  double d = 0;
  double delta0 = 0;
  int N = 0;
  double lambda1 = 0;
  double sigma1 = 0;
  GridMeta grid;
  bool checked = false;   // refinement check was run
  bool flagged = false;   // refinement changed N, or the point failed
  std::string error;
  std::vector<std::string> warnings;
};

struct SweepResult {
  Protocol protocol = Protocol::unbroadened;
  double theta = 0.7;
  std::vector<SweepPoint> points;
  std::string provenance;
};

struct SweepOptions {
  bool optimize = false;
  bool stability_check = false;
  SearchConfig search;
  int jobs = 0;  // 0: hardware concurrency
};

// Runs f(i) for i in [0,n) on a small pool; results land by index.
inline void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
  if (jobs <= 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) f(i);
    });
  for (auto& th : pool) th.join();
}

inline SweepPoint evaluate_point(ProtocolSpec spec, double theta, const SweepOptions& opt, const Evaluator& eval) {
  SweepPoint p;
  p.d = spec.d;
  try {
    Evaluation ev;
    CapacityResult c;
    if (opt.optimize) {
      OptimizeResult r = optimize_broadening(spec, theta, opt.search, eval);
      spec.delta0 = r.delta0;
      ev = r.evaluation;
      c = r.capacity;
      p.warnings = r.warnings;
    } else {
      ev = eval(spec);
      c = capacity(ev.spectrum, theta);
      p.warnings = ev.spectrum.warnings;
    }
    p.delta0 = spec.delta0;
    p.N = c.N;
    p.lambda1 = c.lambda_bar.empty() ? 0.0 : c.lambda_bar[0];
    p.sigma1 = ev.spectrum.values.empty() ? 0.0 : ev.spectrum.values[0];
    p.grid = ev.grid;
    if (opt.stability_check) {
      Evaluation fine = eval(spec, 2);
      p.checked = true;
      p.flagged = capacity(fine.spectrum, theta).N != p.N;
    }
  } catch (const std::exception& e) {
    p.error = e.what();
    p.flagged = true;
  }
  return p;
}

// `make(d)` builds the parameter point for depth d.
inline SweepResult capacity_curve(const std::function<ProtocolSpec(double)>& make, std::vector<double> d_list,
                                  double theta, const SweepOptions& opt = {}, const Evaluator& eval = {}) {
  require(!d_list.empty(), "sweep: d list nonempty");
  require(std::is_sorted(d_list.begin(), d_list.end()), "sweep: d list ascending");
  require(theta > 0 && theta < 1, "theta in (0,1)");
  SweepResult res;
  res.protocol = make(d_list.front()).protocol;
  res.theta = theta;
  res.points.resize(d_list.size());
  parallel_for(int(d_list.size()), opt.jobs, [&](int i) {
    try {
      res.points[i] = evaluate_point(make(d_list[i]), theta, opt, eval);
    } catch (const std::exception& e) {
      res.points[i].d = d_list[i];
      res.points[i].error = e.what();
      res.points[i].flagged = true;
    }
  });
  json specs = json::array();
  for (std::size_t i = 0; i < d_list.size(); ++i) {
    try {
      specs.push_back(to_json(make(d_list[i])));
    } catch (const std::exception&) {
      specs.push_back({{"d", d_list[i]}, {"error", res.points[i].error}});
    }
  }
  json prov{{"specs", specs}, {"theta", theta}, {"optimize", opt.optimize}, {"grid", to_json(eval.grid)},
            {"version", version}};
  res.provenance = fnv1a_hex(prov.dump());
  return res;
}

inline SweepResult capacity_curve(const ProtocolSpec& base, std::vector<double> d_list, double theta,
                                  const SweepOptions& opt = {}, const Evaluator& eval = {}) {
  return capacity_curve([&](double d) { ProtocolSpec s = base; s.d = d; return s; }, std::move(d_list), theta, opt,
                        eval);
}

// ---- scaling fits ----------------------------------------------------------

enum class FitModel { sqrt, linear };

inline const char* to_string(FitModel m) { return m == FitModel::sqrt ? "sqrt" : "linear"; }

struct FitResult {
  FitModel model = FitModel::sqrt;
  double a = 0;
  double residual = 0;
  double r_squared = 0;
};

// Least squares N = a f(d) through the origin.
inline FitResult fit_scaling(const std::vector<std::pair<double, double>>& pts, FitModel model) {
  require(pts.size() >= 3, "insufficient points: fit needs >= 3 (got " + std::to_string(pts.size()) + ")");
  auto feat = [&](double d) { return model == FitModel::sqrt ? std::sqrt(d) : d; };
  double sfn = 0, sff = 0, mean = 0;
  for (auto [d, n] : pts) {
    require(d >= 0 && std::isfinite(d) && std::isfinite(n), "fit: d >= 0 and finite values");
    sfn += feat(d) * n;
    sff += feat(d) * feat(d);
    mean += n;
  }
  require(sff > 0, "fit: at least one d > 0");
  mean /= double(pts.size());
  FitResult r;
  r.model = model;
  r.a = std::max(0.0, sfn / sff);
  double ssr = 0, sst = 0;
  for (auto [d, n] : pts) {
    double e = n - r.a * feat(d);
    ssr += e * e;
    sst += (n - mean) * (n - mean);
  }
  r.residual = std::sqrt(ssr);
  r.r_squared = sst > 0 ? std::clamp(1.0 - ssr / sst, 0.0, 1.0) : (ssr == 0 ? 1.0 : 0.0);
  return r;
}

inline std::vector<std::pair<double, double>> fit_points(const SweepResult& s) {
  std::vector<std::pair<double, double>> p;
  for (const auto& x : s.points)
    if (x.error.empty()) p.emplace_back(x.d, double(x.N));
  return p;
}

}  // namespace qmcap
