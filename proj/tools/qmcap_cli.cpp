// qmcap: multimode capacity of ensemble quantum memories.
#include <CLI11.hpp>
#include <qmcap/qmcap.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace qmcap;

namespace {

struct Options {
  std::string protocol = "unbroadened";
  std::string d_text;
  std::string d_range;
  double delta0 = 0;
  bool optimize = false;
  double delta0_lo = 0, delta0_hi = 0;
  int M = 1;
  double finesse = 0;
  double delta = NAN;
  double control_amplitude = NAN, control_width = 0.1, control_center = 0;
  double theta = 0.7;
  int nz = 400, nt = 600, nw = 801;
  std::string format;
  std::string cache_dir;
  bool seed_check = false;
  int jobs = 0;
  std::string output;
  std::vector<std::string> inputs;
  std::string model = "sqrt";
  bool verbose = false;
};

std::vector<double> parse_depths(const Options& o) {
  std::vector<double> ds;
  if (!o.d_range.empty()) {
    auto f = detail::split(o.d_range, ':');
    double lo, hi, steps;
    require(f.size() == 3 && detail::parse_double(f[0], lo) && detail::parse_double(f[1], hi) &&
                detail::parse_double(f[2], steps) && steps >= 1 && steps == std::floor(steps),
            "--d-range expects lo:hi:steps");
    int n = int(steps);
    require(n == 1 || lo < hi, "--d-range: lo < hi");
    for (int i = 0; i < n; ++i) ds.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  }
  if (!o.d_text.empty()) {
    for (auto& t : detail::split(o.d_text, ',')) {
      double x;
      require(detail::parse_double(t, x), "--d: not a number '" + t + "'");
      ds.push_back(x);
    }
  }
  require(!ds.empty(), "--d or --d-range is required");
  return ds;
}

ProtocolSpec make_spec(const Options& o, double d) {
  ProtocolSpec s;
  s.protocol = protocol_from_string(o.protocol);
  s.d = d;
  s.delta0 = o.delta0;
  s.M = o.M;
  if (s.protocol == Protocol::afc) {
    require(o.M >= 1, "M >= 1 (got " + std::to_string(o.M) + ")");
    if (o.finesse > 0) s.delta0 = 2.0 * o.finesse * (o.M - 1);
  }
  if (s.protocol == Protocol::raman) {
    s.delta = std::isnan(o.delta) ? std::sqrt(90.0 * d) : o.delta;
    s.control = ControlPulse{std::isnan(o.control_amplitude) ? std::sqrt(10.0 * d) : o.control_amplitude,
                             o.control_center, o.control_width};
  }
  s.validate();
  return s;
}

Evaluator make_evaluator(const Options& o) {
  Evaluator e;
  e.grid = {o.nz, o.nt, o.nw, 1};
  e.cache_dir = o.cache_dir;
  return e;
}

void emit(const Options& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.output);
    require(bool(f), "cannot open output '" + o.output + "'");
    f << text;
  }
}

void warn(const std::vector<std::string>& ws) {
  for (const auto& w : ws) std::cerr << "warning: " << w << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  require(bool(f), "cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Single point: optional optimization of the broadening width.
struct Point {
  ProtocolSpec spec;
  Evaluation ev;
  CapacityResult cap;
  std::vector<std::string> warnings;
};

Point run_point(const Options& o) {
  auto ds = parse_depths(o);
  require(ds.size() == 1, "--d takes a single value for this command");
  Point p;
  p.spec = make_spec(o, ds[0]);
  Evaluator ev = make_evaluator(o);
  if (o.optimize) {
    SearchConfig sc;
    sc.lo = o.delta0_lo;
    sc.hi = o.delta0_hi;
    auto r = optimize_broadening(p.spec, o.theta, sc, ev);
    p.spec.delta0 = r.delta0;
    p.ev = r.evaluation;
    p.cap = r.capacity;
    p.warnings = r.warnings;
  } else {
    p.ev = ev(p.spec);
    p.cap = capacity(p.ev.spectrum, o.theta);
    p.warnings = p.ev.spectrum.warnings;
  }
  return p;
}

int cmd_spectrum(const Options& o) {
  Point p = run_point(o);
  warn(p.warnings);
  std::string fmt = o.format.empty() ? "csv" : o.format;
  require(fmt == "csv" || fmt == "json", "--format for spectrum is csv or json");
  if (fmt == "csv") {
    std::ostringstream s;
    s << "k,sigma,efficiency\n";
    for (std::size_t k = 0; k < p.ev.spectrum.values.size(); ++k)
      s << k + 1 << "," << fmt_num(p.ev.spectrum.values[k]) << "," << fmt_num(p.cap.efficiencies[k]) << "\n";
    emit(o, s.str());
  } else {
    json j{{"parameters", to_json(p.spec)}, {"kind", to_string(p.ev.spectrum.kind)},
           {"values", p.ev.spectrum.values}, {"efficiencies", p.cap.efficiencies}, {"grid", to_json(p.ev.grid)},
           {"version", version}};
    emit(o, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_capacity(const Options& o) {
  Point p = run_point(o);
  warn(p.warnings);
  json j{{"N", p.cap.N},
         {"theta", p.cap.theta},
         {"lambda_bar", p.cap.lambda_bar},
         {"efficiencies", p.cap.efficiencies},
         {"parameters", to_json(p.spec)},
         {"grid", to_json(p.ev.grid)},
         {"version", version}};
  if (o.seed_check) {
    Evaluator ev = make_evaluator(o);
    int n2 = capacity(ev(p.spec, 2).spectrum, o.theta).N;
    j["refined_N"] = n2;
    j["stable"] = n2 == p.cap.N;
  }
  std::string fmt = o.format.empty() ? "json" : o.format;
  require(fmt == "csv" || fmt == "json", "--format for capacity is csv or json");
  if (fmt == "json") {
    emit(o, j.dump(2) + "\n");
  } else {
    std::ostringstream s;
    s << "protocol,d,delta0,theta,N,lambda1\n"
      << to_string(p.spec.protocol) << "," << fmt_num(p.spec.d) << "," << fmt_num(p.spec.delta0) << ","
      << fmt_num(o.theta) << "," << p.cap.N << "," << fmt_num(p.cap.lambda_bar.empty() ? 0 : p.cap.lambda_bar[0])
      << "\n";
    emit(o, s.str());
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  auto ds = parse_depths(o);
  std::sort(ds.begin(), ds.end());
  for (double d : ds) make_spec(o, d);  // validate every point up front
  SweepOptions so;
  so.optimize = o.optimize;
  so.stability_check = o.seed_check;
  so.search.lo = o.delta0_lo;
  so.search.hi = o.delta0_hi;
  so.jobs = o.jobs;
  SweepResult r = capacity_curve([&](double d) { return make_spec(o, d); }, ds, o.theta, so, make_evaluator(o));
  for (const auto& p : r.points) {
    warn(p.warnings);
    if (!p.error.empty()) std::cerr << "warning: d=" << fmt_num(p.d) << " failed: " << p.error << "\n";
  }
  std::string fmt = o.format.empty() ? "csv" : o.format;
  if (fmt == "csv") {
    emit(o, sweep_csv(r));
  } else if (fmt == "svg") {
    emit(o, svg_chart(parse_sweep_csv(sweep_csv(r)), std::string(to_string(r.protocol)) + " capacity"));
  } else if (fmt == "json") {
    json pts = json::array();
    for (const auto& p : r.points)
      pts.push_back({{"d", p.d}, {"delta0", p.delta0}, {"N", p.N}, {"lambda1", p.lambda1}, {"sigma1", p.sigma1},
                     {"grid", to_json(p.grid)}, {"checked", p.checked}, {"flagged", p.flagged}, {"error", p.error}});
    json j{{"protocol", to_string(r.protocol)}, {"theta", r.theta}, {"points", pts}, {"provenance", r.provenance},
           {"version", version}};
    emit(o, j.dump(2) + "\n");
  } else {
    throw ValidationError("--format is csv, json or svg");
  }
  int failed = 0;
  for (const auto& p : r.points) failed += !p.error.empty();
  return failed == int(r.points.size()) ? 3 : 0;
}

int cmd_fit(const Options& o) {
  require(o.inputs.size() == 1, "fit takes one --input sweep CSV");
  auto rows = parse_sweep_csv(read_file(o.inputs[0]));
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows)
    if (!r.failed) pts.emplace_back(r.d, r.N);
  require(o.model == "sqrt" || o.model == "linear", "--model is sqrt or linear");
  FitResult f = fit_scaling(pts, o.model == "sqrt" ? FitModel::sqrt : FitModel::linear);
  std::string fmt = o.format.empty() ? "json" : o.format;
  if (fmt == "json") {
    json j{{"model", to_string(f.model)}, {"a", f.a}, {"residual", f.residual}, {"r_squared", f.r_squared},
           {"points", pts.size()}};
    emit(o, j.dump(2) + "\n");
  } else if (fmt == "csv") {
    emit(o, "model,a,residual,r_squared\n" + std::string(to_string(f.model)) + "," + fmt_num(f.a) + "," +
                fmt_num(f.residual) + "," + fmt_num(f.r_squared) + "\n");
  } else {
    throw ValidationError("--format for fit is csv or json");
  }
  return 0;
}

int cmd_plot(const Options& o) {
  require(!o.inputs.empty(), "plot needs at least one --input sweep CSV");
  std::vector<SweepRow> rows;
  for (const auto& in : o.inputs) {
    auto r = parse_sweep_csv(read_file(in));
    rows.insert(rows.end(), r.begin(), r.end());
  }
  emit(o, svg_chart(rows));
  return 0;
}

void add_physics(CLI::App* c, Options& o) {
  c->add_option("--protocol", o.protocol, "unbroadened, tcrib, lcrib-numeric, raman, afc");
  c->add_option("--d", o.d_text, "optical depth (comma list allowed for sweep)");
  c->add_option("--d-range", o.d_range, "lo:hi:steps (sweep)");
  c->add_option("--delta0", o.delta0, "broadening width in units of gamma");
  c->add_flag("--optimize-delta0", o.optimize, "maximize capacity over the broadening width");
  c->add_option("--delta0-lo", o.delta0_lo, "lower search bound");
  c->add_option("--delta0-hi", o.delta0_hi, "upper search bound");
  c->add_option("--M", o.M, "comb tooth count (afc)");
  c->add_option("--finesse", o.finesse, "comb finesse, sets delta0 = 2F(M-1) (afc)");
  c->add_option("--delta", o.delta, "Raman detuning (default sqrt(90 d))");
  c->add_option("--control-amplitude", o.control_amplitude, "control peak Rabi frequency (default sqrt(10 d))");
  c->add_option("--control-width", o.control_width, "control Gaussian width");
  c->add_option("--control-center", o.control_center, "control centre time");
  c->add_option("--theta", o.theta, "threshold efficiency");
  c->add_option("--grid-nz", o.nz, "position nodes");
  c->add_option("--grid-nt", o.nt, "time nodes");
  c->add_option("--grid-nw", o.nw, "frequency core nodes");
  c->add_option("--format", o.format, "csv, json or svg");
  c->add_option("--cache-dir", o.cache_dir, "spectrum cache directory");
  c->add_flag("--seed-check", o.seed_check, "repeat at doubled grids and compare N");
  c->add_option("--jobs", o.jobs, "parallel sweep points");
  c->add_option("-o,--output", o.output, "output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimode capacity of ensemble quantum memories"};
  app.require_subcommand(1);
  Options o;
  auto* spectrum = app.add_subcommand("spectrum", "singular spectrum and per-mode efficiencies");
  auto* cap = app.add_subcommand("capacity", "capacity at one parameter point");
  auto* sweep = app.add_subcommand("sweep", "capacity against optical depth");
  auto* fit = app.add_subcommand("fit", "fit N = a sqrt(d) or N = a d to a sweep CSV");
  auto* plot = app.add_subcommand("plot", "SVG chart from sweep CSVs");
  for (auto* c : {spectrum, cap, sweep}) add_physics(c, o);
  for (auto* c : {fit, plot}) {
    c->add_option("--input", o.inputs, "sweep CSV")->required();
    c->add_option("-o,--output", o.output, "output file (default stdout)");
  }
  fit->add_option("--model", o.model, "sqrt or linear");
  fit->add_option("--format", o.format, "json or csv");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "error: validation: " << msg << "\n";
    return 2;
  }
  try {
    if (*spectrum) return cmd_spectrum(o);
    if (*cap) return cmd_capacity(o);
    if (*sweep) return cmd_sweep(o);
    if (*fit) return cmd_fit(o);
    if (*plot) return cmd_plot(o);
  } catch (const ValidationError& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: numerical: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: numerical: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
