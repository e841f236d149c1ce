#include "qrc/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qrc/config.hpp"
#include "qrc/version.hpp"

namespace qrc {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  // shortest representation that parses back to the same double
  std::string best;
  for (int prec = 1; prec <= 17; ++prec) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v && (best.empty() || std::strlen(buf) < best.size()))
      best = buf;
  }
  if (best.empty()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    best = buf;
  }
  return best;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

constexpr const char* kRowHeader =
    "model,dim,n_out,train_size,noise_kind,noise_sigma_over_alpha,reservoir_index,"
    "rms_error,gamma,fixed_dt,noise_scale_s,status";

constexpr const char* kAggregateHeader =
    "model,dim,train_size,noise_sigma_over_alpha,rms_mean,rms_std,rms_best,rms_worst,"
    "spread_factor,gamma_mode";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void write_rows_csv(const std::string& path, const std::vector<RowResult>& rows) {
  auto out = open_out(path);
  out << kRowHeader << '\n';
  for (const RowResult& r : rows) {
    out << to_string(r.model) << ',' << r.dim << ',' << r.n_out << ',' << r.train_size << ','
        << to_string(r.noise_kind) << ',' << format_double(r.noise_sigma_over_alpha) << ','
        << r.reservoir_index << ',' << format_double(r.rms) << ',' << format_double(r.gamma) << ','
        << format_double(r.fixed_dt) << ',' << format_double(r.noise_scale_s) << ',' << r.status
        << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<RowResult> read_rows_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty rows file: " + path);
  if (line != kRowHeader) throw IoError("unexpected rows header in " + path);
  std::vector<RowResult> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 12) throw IoError("malformed row in " + path + ": " + line);
    RowResult r;
    r.model = model_from_string(cells[0]);
    r.dim = std::stoi(cells[1]);
    r.n_out = std::stoi(cells[2]);
    r.train_size = std::stoi(cells[3]);
    r.noise_kind = noise_kind_from_string(cells[4]);
    r.noise_sigma_over_alpha = std::strtod(cells[5].c_str(), nullptr);
    r.reservoir_index = std::stoi(cells[6]);
    r.rms = std::strtod(cells[7].c_str(), nullptr);
    r.gamma = std::strtod(cells[8].c_str(), nullptr);
    r.fixed_dt = std::strtod(cells[9].c_str(), nullptr);
    r.noise_scale_s = std::strtod(cells[10].c_str(), nullptr);
    r.status = cells[11];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& aggregates) {
  auto out = open_out(path);
  out << kAggregateHeader << '\n';
  for (const AggregateRow& a : aggregates) {
    out << to_string(a.model) << ',' << a.dim << ',' << a.train_size << ','
        << format_double(a.noise_sigma_over_alpha) << ',' << format_double(a.stats.rms_mean) << ','
        << format_double(a.stats.rms_std) << ',' << format_double(a.stats.rms_best) << ','
        << format_double(a.stats.rms_worst) << ',' << format_double(a.stats.spread_factor) << ','
        << format_double(a.gamma_mode) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_ensemble_csv(const std::string& path, const std::vector<ReservoirParams>& ensemble) {
  auto out = open_out(path);
  out << "index,K,kappa,alpha,omega_u\n";
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const ReservoirParams& p = ensemble[i];
    out << i << ',' << format_double(p.kerr) << ',' << format_double(p.kappa) << ','
        << format_double(p.drive_amp) << ',' << format_double(p.drive_freq) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_feature_series_csv(const std::string& path, const FeatureSeries& fs) {
  auto out = open_out(path);
  out << "time,channel,value\n";
  for (int s = 0; s < fs.n_samples(); ++s)
    for (int c = 0; c < fs.n_out; ++c)
      out << format_double(fs.times[static_cast<std::size_t>(s)]) << ',' << c << ','
          << format_double(fs.value(c, s)) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void write_manifest(const std::string& path, const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["tool"] = "qrc";
  j["version"] = kVersion;
  j["experiment"] = to_string(cfg.experiment);
  j["seed"] = cfg.seed;
  j["config"] = config_to_json(cfg);
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// SVG chart rendering

namespace {

struct Mapper {
  double lo = 0.0, hi = 1.0;
  double px0 = 0.0, px1 = 1.0;
  bool log = false;

  double operator()(double v) const {
    const double t = log ? std::log10(v) : v;
    return px0 + (t - lo) / (hi - lo) * (px1 - px0);
  }
};

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) ticks.push_back(v);
  return ticks;
}

std::vector<double> decade_ticks(double lo_log, double hi_log) {
  std::vector<double> ticks;
  const int k0 = static_cast<int>(std::floor(lo_log));
  const int k1 = static_cast<int>(std::ceil(hi_log));
  int stride = 1;
  while ((k1 - k0) / stride > 8) ++stride;
  for (int k = k0; k <= k1; k += stride) ticks.push_back(std::pow(10.0, k));
  return ticks;
}

}  // namespace

void write_svg_chart(const std::string& path, const ChartSpec& spec) {
  constexpr double kW = 760, kH = 480;
  constexpr double kLeft = 84, kRight = 20, kTop = 44, kBottom = 60;

  // data ranges over finite (and, for log axes, positive) values
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  auto scan = [&](const std::vector<double>& xs, const std::vector<double>& ys) {
    for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
      const double x = xs[i], y = ys[i];
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (spec.log_x && !(x > 0.0)) continue;
      if (spec.log_y && !(y > 0.0)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  };
  for (const auto& s : spec.series) scan(s.x, s.y);
  for (const auto& b : spec.bands) {
    scan(b.x, b.y_lo);
    scan(b.x, b.y_hi);
  }
  if (!std::isfinite(xmin) || !std::isfinite(ymin)) return;  // nothing plottable
  if (xmin == xmax) {
    xmin -= 0.5;
    xmax += 0.5;
    if (spec.log_x) {
      xmin = std::max(xmin + 0.5, xmax - 0.5) / 2.0;
      xmax = xmax * 2.0;
    }
  }
  if (ymin == ymax) {
    if (spec.log_y) {
      ymin /= 2.0;
      ymax *= 2.0;
    } else {
      ymin -= 0.5;
      ymax += 0.5;
    }
  }

  Mapper mx, my;
  mx.log = spec.log_x;
  my.log = spec.log_y;
  const double xl = spec.log_x ? std::log10(xmin) : xmin;
  const double xh = spec.log_x ? std::log10(xmax) : xmax;
  const double yl = spec.log_y ? std::log10(ymin) : ymin;
  const double yh = spec.log_y ? std::log10(ymax) : ymax;
  const double xpad = 0.03 * (xh - xl), ypad = 0.06 * (yh - yl);
  mx.lo = xl - xpad;
  mx.hi = xh + xpad;
  my.lo = yl - ypad;
  my.hi = yh + ypad;
  mx.px0 = kLeft;
  mx.px1 = kW - kRight;
  my.px0 = kH - kBottom;  // y grows downward in SVG
  my.px1 = kTop;

  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << spec.title << "</text>\n";

  const auto xticks = spec.log_x ? decade_ticks(mx.lo, mx.hi) : linear_ticks(mx.lo, mx.hi);
  const auto yticks = spec.log_y ? decade_ticks(my.lo, my.hi) : linear_ticks(my.lo, my.hi);
  out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (double tv : xticks) {
    const double px = mx(tv);
    if (px < kLeft - 0.5 || px > kW - kRight + 0.5) continue;
    out << "<line x1=\"" << svg_num(px) << "\" y1=\"" << kTop << "\" x2=\"" << svg_num(px)
        << "\" y2=\"" << kH - kBottom << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << svg_num(px) << "\" y=\"" << kH - kBottom + 16
        << "\" text-anchor=\"middle\">" << tick_label(tv) << "</text>\n";
  }
  for (double tv : yticks) {
    const double py = my(tv);
    if (py < kTop - 0.5 || py > kH - kBottom + 0.5) continue;
    out << "<line x1=\"" << kLeft << "\" y1=\"" << svg_num(py) << "\" x2=\"" << kW - kRight
        << "\" y2=\"" << svg_num(py) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << svg_num(py + 4)
        << "\" text-anchor=\"end\">" << tick_label(tv) << "</text>\n";
  }
  out << "</g>\n";

  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kW - kLeft - kRight
      << "\" height=\"" << kH - kTop - kBottom << "\" fill=\"none\" stroke=\"#333\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << spec.x_label
      << "</text>\n";
  out << "<text x=\"20\" y=\"" << kH / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 "
         "20 "
      << kH / 2 << ")\">" << spec.y_label << "</text>\n";

  auto usable = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return false;
    if (spec.log_x && !(x > 0.0)) return false;
    if (spec.log_y && !(y > 0.0)) return false;
    return true;
  };

  for (const ChartBand& b : spec.bands) {
    std::string pts;
    bool valid = !b.x.empty() && b.x.size() == b.y_lo.size() && b.x.size() == b.y_hi.size();
    if (!valid) continue;
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      if (!usable(b.x[i], b.y_hi[i])) {
        valid = false;
        break;
      }
      pts += svg_num(mx(b.x[i])) + "," + svg_num(my(b.y_hi[i])) + " ";
    }
    for (std::size_t i = b.x.size(); valid && i-- > 0;) {
      if (!usable(b.x[i], b.y_lo[i])) {
        valid = false;
        break;
      }
      pts += svg_num(mx(b.x[i])) + "," + svg_num(my(b.y_lo[i])) + " ";
    }
    if (valid)
      out << "<polygon points=\"" << pts << "\" fill=\"" << b.color
          << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
  }

  for (const ChartSeries& s : spec.series) {
    std::string segment;
    auto flush = [&]() {
      if (segment.empty()) return;
      out << "<polyline points=\"" << segment << "\" fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"1.8\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
      segment.clear();
    };
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) {
        flush();
        continue;
      }
      segment += svg_num(mx(s.x[i])) + "," + svg_num(my(s.y[i])) + " ";
    }
    flush();
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      out << "<circle cx=\"" << svg_num(mx(s.x[i])) << "\" cy=\"" << svg_num(my(s.y[i]))
          << "\" r=\"2.4\" fill=\"" << s.color << "\"/>\n";
    }
  }

  double ly = kTop + 14;
  for (const ChartSeries& s : spec.series) {
    if (s.label.empty()) continue;
    const double lx = kW - kRight - 170;
    out << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 26 << "\" y2=\""
        << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    out << "<text x=\"" << lx + 32 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
    ly += 16;
  }

  out << "</svg>\n";
  if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Figure analogues built from aggregate rows

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                          "#bcbd22", "#17becf"};

std::string group_label(Model m, int dim, bool multi_dim) {
  std::string label = to_string(m);
  if (multi_dim && dim > 0) label += " d=" + std::to_string(dim);
  return label;
}

// noise charts use a log x axis; a zero level is drawn one decade below the
// smallest positive level so the baseline stays visible
double log_x_for_sigma(double sigma, double min_positive) {
  return sigma > 0.0 ? sigma : min_positive / 10.0;
}

struct SeriesKey {
  Model model;
  int dim;
  bool operator<(const SeriesKey& o) const {
    return std::tie(model, dim) < std::tie(o.model, o.dim);
  }
};

std::vector<std::pair<std::string, ChartSpec>> build_charts(const std::vector<AggregateRow>& aggs,
                                                            Experiment experiment) {
  std::vector<std::pair<std::string, ChartSpec>> charts;
  if (aggs.empty()) return charts;

  std::set<int> dims;
  std::set<SeriesKey> keys;
  for (const auto& a : aggs) {
    keys.insert({a.model, a.dim});
    if (a.dim > 0) dims.insert(a.dim);
  }
  const bool multi_dim = dims.size() > 1;

  auto color_of = [&](const SeriesKey& k) {
    std::size_t i = 0;
    for (const auto& key : keys) {
      if (!(key < k) && !(k < key)) break;
      ++i;
    }
    return std::string(kPalette[i % (sizeof kPalette / sizeof kPalette[0])]);
  };

  if (experiment == Experiment::output_noise_sweep || experiment == Experiment::input_noise_sweep) {
    ChartSpec spec;
    spec.title = experiment == Experiment::output_noise_sweep ? "RMS error vs output noise"
                                                              : "RMS error vs input noise";
    spec.x_label = "noise sigma / alpha (0 shown at left edge)";
    spec.y_label = "RMS error";
    spec.log_x = true;
    spec.log_y = true;
    double min_pos = std::numeric_limits<double>::infinity();
    for (const auto& a : aggs)
      if (a.noise_sigma_over_alpha > 0.0) min_pos = std::min(min_pos, a.noise_sigma_over_alpha);
    if (!std::isfinite(min_pos)) min_pos = 1.0;
    for (const SeriesKey& k : keys) {
      ChartSeries s;
      s.label = group_label(k.model, k.dim, multi_dim);
      s.color = color_of(k);
      for (const auto& a : aggs) {
        if (a.model != k.model || a.dim != k.dim || a.count == 0) continue;
        s.x.push_back(log_x_for_sigma(a.noise_sigma_over_alpha, min_pos));
        s.y.push_back(a.stats.rms_mean);
      }
      if (!s.x.empty()) spec.series.push_back(std::move(s));
    }
    charts.emplace_back("fig_rms_vs_noise.svg", std::move(spec));
    return charts;
  }

  // mean RMS (with best/worst companions) vs training-set size
  {
    ChartSpec spec;
    spec.title = "RMS error vs training set size";
    spec.x_label = "training set size";
    spec.y_label = "RMS error";
    spec.log_y = true;
    for (const SeriesKey& k : keys) {
      ChartSeries mean_s, best_s, worst_s;
      ChartBand band;
      const std::string color = color_of(k);
      mean_s.label = group_label(k.model, k.dim, multi_dim);
      mean_s.color = best_s.color = worst_s.color = band.color = color;
      best_s.dashed = worst_s.dashed = true;
      for (const auto& a : aggs) {
        if (a.model != k.model || a.dim != k.dim || a.count == 0) continue;
        mean_s.x.push_back(a.train_size);
        mean_s.y.push_back(a.stats.rms_mean);
        best_s.x.push_back(a.train_size);
        best_s.y.push_back(a.stats.rms_best);
        worst_s.x.push_back(a.train_size);
        worst_s.y.push_back(a.stats.rms_worst);
        band.x.push_back(a.train_size);
        band.y_lo.push_back(a.stats.rms_mean - a.stats.rms_std);
        band.y_hi.push_back(a.stats.rms_mean + a.stats.rms_std);
      }
      if (mean_s.x.empty()) continue;
      if (k.model == Model::qrc || k.model == Model::full_qrc) spec.bands.push_back(std::move(band));
      if (mean_s.x.size() > 0) {
        spec.series.push_back(std::move(mean_s));
        if (keys.size() <= 2) {  // best/worst companions only when uncluttered
          spec.series.push_back(std::move(best_s));
          spec.series.push_back(std::move(worst_s));
        }
      }
    }
    charts.emplace_back("fig_rms_vs_train_size.svg", std::move(spec));
  }

  if (experiment == Experiment::dimension_sweep) {
    std::set<int> sizes;
    for (const auto& a : aggs) sizes.insert(a.train_size);
    {
      ChartSpec spec;
      spec.title = "RMS error vs Hilbert dimension";
      spec.x_label = "Hilbert space dimension";
      spec.y_label = "RMS error";
      spec.log_y = true;
      std::size_t ci = 0;
      for (int m : sizes) {
        ChartSeries s;
        s.label = "M = " + std::to_string(m);
        s.color = kPalette[ci++ % (sizeof kPalette / sizeof kPalette[0])];
        for (const auto& a : aggs) {
          if (a.train_size != m || a.count == 0) continue;
          s.x.push_back(a.dim);
          s.y.push_back(a.stats.rms_mean);
        }
        if (!s.x.empty()) spec.series.push_back(std::move(s));
      }
      charts.emplace_back("fig_rms_vs_dim_by_train_size.svg", std::move(spec));
    }
    if (sizes.count(30) != 0) {
      ChartSpec spec;
      spec.title = "RMS error vs Hilbert dimension (M = 30)";
      spec.x_label = "Hilbert space dimension";
      spec.y_label = "RMS error";
      spec.log_y = true;
      ChartSeries s;
      ChartBand band;
      s.label = "mean";
      for (const auto& a : aggs) {
        if (a.train_size != 30 || a.count == 0) continue;
        s.x.push_back(a.dim);
        s.y.push_back(a.stats.rms_mean);
        band.x.push_back(a.dim);
        band.y_lo.push_back(a.stats.rms_mean - a.stats.rms_std);
        band.y_hi.push_back(a.stats.rms_mean + a.stats.rms_std);
      }
      spec.bands.push_back(std::move(band));
      spec.series.push_back(std::move(s));
      charts.emplace_back("fig_rms_vs_dim_m30.svg", std::move(spec));
    }
  }

  if (experiment == Experiment::model_comparison || experiment == Experiment::train_size_sweep) {
    ChartSpec spec;
    spec.title = "RMS error spread factor vs training set size";
    spec.x_label = "training set size";
    spec.y_label = "(worst - best) / mean";
    spec.log_y = false;
    for (const SeriesKey& k : keys) {
      ChartSeries s;
      s.label = group_label(k.model, k.dim, multi_dim);
      s.color = color_of(k);
      for (const auto& a : aggs) {
        if (a.model != k.model || a.dim != k.dim || a.count == 0) continue;
        s.x.push_back(a.train_size);
        s.y.push_back(a.stats.spread_factor);
      }
      if (!s.x.empty()) spec.series.push_back(std::move(s));
    }
    charts.emplace_back("fig_spread_vs_train_size.svg", std::move(spec));
  }

  return charts;
}

Experiment infer_experiment(const std::vector<RowResult>& rows) {
  for (const auto& r : rows) {
    if (r.noise_kind == NoiseKind::output) return Experiment::output_noise_sweep;
    if (r.noise_kind == NoiseKind::input) return Experiment::input_noise_sweep;
  }
  std::set<int> dims;
  std::set<Model> models;
  for (const auto& r : rows) {
    models.insert(r.model);
    if (r.dim > 0) dims.insert(r.dim);
  }
  if (models.size() == 1 && models.count(Model::qrc) != 0 && dims.size() > 1)
    return Experiment::dimension_sweep;
  if (models.size() > 2) return Experiment::model_comparison;
  return Experiment::train_size_sweep;
}

}  // namespace

void emit_outputs(const ExperimentResult& result, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

  const fs::path base(out_dir);
  write_rows_csv((base / "rows.csv").string(), result.rows);
  write_aggregate_csv((base / "aggregate.csv").string(), result.aggregates);
  write_ensemble_csv((base / "ensemble.csv").string(), result.ensemble);
  write_manifest((base / "manifest.json").string(), result.config);

  for (auto& [name, spec] : build_charts(result.aggregates, result.config.experiment))
    write_svg_chart((base / name).string(), spec);
}

void replot(const std::string& rows_csv_path, const std::string& out_dir) {
  const auto rows = read_rows_csv(rows_csv_path);
  const auto aggregates = aggregate_rows(rows);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
  const fs::path base(out_dir);
  write_aggregate_csv((base / "aggregate.csv").string(), aggregates);
  for (auto& [name, spec] : build_charts(aggregates, infer_experiment(rows)))
    write_svg_chart((base / name).string(), spec);
}

}  // namespace qrc
