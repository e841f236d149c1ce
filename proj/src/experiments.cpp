#include "qrc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qrc {

namespace {

// Substream purposes under the run seed.
constexpr std::uint64_t kStreamParams = 1;
constexpr std::uint64_t kStreamTestPhases = 2;
constexpr std::uint64_t kStreamOutputNoiseTrain = 3;
constexpr std::uint64_t kStreamOutputNoiseTest = 4;
constexpr std::uint64_t kStreamInputNoise = 5;
constexpr std::uint64_t kStreamValPhases = 6;

constexpr std::uint64_t kRoleTrain = 0;
constexpr std::uint64_t kRoleTest = 1;

// One simulated model at one Hilbert dimension. dim_label is what rows
// report: the truncation for quantum models, 0 for classical ones.
struct Variant {
  Model model = Model::qrc;
  int dim_label = 0;
  int sim_dim = 2;
};

struct TrajJob {
  int variant = 0;
  int reservoir = 0;
  double phase = 0.0;
  int slot = 0;
  // input-noise runs only
  int sigma_index = -1;
  std::uint64_t noise_role = 0;
  std::uint64_t noise_instance = 0;
};

struct TrainBlock {
  int train_size = 0;
  std::vector<double> phases;
  std::vector<int> slots;
  int row_index = 0;
};

struct RowGroup {
  int variant = 0;
  int reservoir = 0;
  int sigma_index = -1;  // >= 0 for noise experiments
  std::vector<int> test_slots;
  std::vector<int> val_slots;
  std::vector<TrainBlock> trains;
};

struct Plan {
  std::vector<Variant> variants;
  std::vector<TrajJob> jobs;
  std::vector<RowGroup> groups;
  std::vector<RowResult> rows;  // metadata prefilled
  int n_slots = 0;
};

std::vector<Variant> make_variants(const ExperimentConfig& cfg) {
  std::vector<Variant> out;
  for (Model m : cfg.models) {
    switch (m) {
      case Model::qrc:
        for (int d : cfg.dims) out.push_back({m, d, d});
        break;
      case Model::full_qrc:
      case Model::hvrc:
        out.push_back({m, 2, 2});
        break;
      case Model::crc:
      case Model::full_crc:
        out.push_back({m, 0, 2});
        break;
    }
  }
  return out;
}

ReservoirParams variant_params(const Variant& v, const ReservoirParams& base) {
  ReservoirParams p = base;
  p.dim = v.sim_dim;
  return p;
}

FeatureSeries simulate_clean(const Variant& v, const ReservoirParams& p, double phase,
                             std::span<const double> times, const ExperimentConfig& cfg) {
  switch (v.model) {
    case Model::qrc:
      return simulate_qrc(p, phase, times, false);
    case Model::full_qrc:
      return simulate_qrc(p, phase, times, true);
    case Model::hvrc:
      return simulate_hvrc(p, phase, times, cfg.radius_form);
    case Model::crc:
      return simulate_crc(p, phase, times, false, cfg.classical_form);
    case Model::full_crc:
      return simulate_crc(p, phase, times, true, cfg.classical_form);
  }
  throw std::logic_error("simulate_clean: unknown model");
}

FeatureSeries simulate_noisy(const Variant& v, const ReservoirParams& p, double phase,
                             std::span<const double> times, std::span<const double> noise,
                             const ExperimentConfig& cfg, const IntegratorConfig& icfg) {
  switch (v.model) {
    case Model::qrc:
      return simulate_qrc_input_noise(p, phase, times, noise, false, icfg);
    case Model::full_qrc:
      return simulate_qrc_input_noise(p, phase, times, noise, true, icfg);
    case Model::hvrc:
      return simulate_hvrc_input_noise(p, phase, times, noise, cfg.radius_form, icfg);
    case Model::crc:
      return simulate_crc_input_noise(p, phase, times, noise, false, cfg.classical_form, icfg);
    case Model::full_crc:
      return simulate_crc_input_noise(p, phase, times, noise, true, cfg.classical_form, icfg);
  }
  throw std::logic_error("simulate_noisy: unknown model");
}

// Clean experiments: per (variant, reservoir) one shared test block plus one
// training block per training-set size.
Plan plan_clean(const ExperimentConfig& cfg, const std::vector<ReservoirParams>& ensemble,
                std::span<const double> test_ph, std::span<const double> val_ph) {
  Plan plan;
  plan.variants = make_variants(cfg);
  const int n_res = static_cast<int>(ensemble.size());
  const int n_sizes = static_cast<int>(cfg.train_sizes.size());

  std::vector<std::vector<double>> grids;
  grids.reserve(cfg.train_sizes.size());
  for (int m : cfg.train_sizes) grids.push_back(training_phases(m));

  plan.rows.resize(plan.variants.size() * static_cast<std::size_t>(n_sizes) * n_res);
  int slot = 0;
  for (int vi = 0; vi < static_cast<int>(plan.variants.size()); ++vi) {
    const Variant& v = plan.variants[static_cast<std::size_t>(vi)];
    for (int r = 0; r < n_res; ++r) {
      RowGroup g;
      g.variant = vi;
      g.reservoir = r;
      for (std::size_t j = 0; j < test_ph.size(); ++j) {
        plan.jobs.push_back({vi, r, test_ph[j], slot});
        g.test_slots.push_back(slot++);
      }
      for (std::size_t j = 0; j < val_ph.size(); ++j) {
        plan.jobs.push_back({vi, r, val_ph[j], slot});
        g.val_slots.push_back(slot++);
      }
      for (int mi = 0; mi < n_sizes; ++mi) {
        TrainBlock block;
        block.train_size = cfg.train_sizes[static_cast<std::size_t>(mi)];
        block.phases = grids[static_cast<std::size_t>(mi)];
        for (double phase : block.phases) {
          plan.jobs.push_back({vi, r, phase, slot});
          block.slots.push_back(slot++);
        }
        block.row_index = (vi * n_sizes + mi) * n_res + r;
        RowResult& row = plan.rows[static_cast<std::size_t>(block.row_index)];
        row.model = v.model;
        row.dim = v.dim_label;
        row.n_out = model_output_channels(v.model);
        row.train_size = block.train_size;
        row.reservoir_index = r;
        g.trains.push_back(std::move(block));
      }
      plan.groups.push_back(std::move(g));
    }
  }
  plan.n_slots = slot;
  return plan;
}

// Output-noise sweep: clean features are simulated once per variant; each
// noise level perturbs copies of them in its row group.
Plan plan_output_noise(const ExperimentConfig& cfg, const std::vector<ReservoirParams>& ensemble,
                       std::span<const double> test_ph) {
  Plan plan;
  plan.variants = make_variants(cfg);
  (void)ensemble;
  const int n_sigma = static_cast<int>(cfg.noise_grid.size());
  const int train_size = cfg.train_sizes.front();
  const auto train_grid = training_phases(train_size);

  plan.rows.resize(plan.variants.size() * static_cast<std::size_t>(n_sigma));
  int slot = 0;
  for (int vi = 0; vi < static_cast<int>(plan.variants.size()); ++vi) {
    const Variant& v = plan.variants[static_cast<std::size_t>(vi)];
    std::vector<int> test_slots, train_slots;
    for (std::size_t j = 0; j < test_ph.size(); ++j) {
      plan.jobs.push_back({vi, 0, test_ph[j], slot});
      test_slots.push_back(slot++);
    }
    for (double phase : train_grid) {
      plan.jobs.push_back({vi, 0, phase, slot});
      train_slots.push_back(slot++);
    }
    for (int si = 0; si < n_sigma; ++si) {
      RowGroup g;
      g.variant = vi;
      g.reservoir = 0;
      g.sigma_index = si;
      g.test_slots = test_slots;
      TrainBlock block;
      block.train_size = train_size;
      block.phases = train_grid;
      block.slots = train_slots;
      block.row_index = vi * n_sigma + si;
      RowResult& row = plan.rows[static_cast<std::size_t>(block.row_index)];
      row.model = v.model;
      row.dim = v.dim_label;
      row.n_out = model_output_channels(v.model);
      row.train_size = train_size;
      row.noise_kind = NoiseKind::output;
      row.noise_sigma_over_alpha = cfg.noise_grid[static_cast<std::size_t>(si)];
      g.trains.push_back(std::move(block));
      plan.groups.push_back(std::move(g));
    }
  }
  plan.n_slots = slot;
  return plan;
}

// Input-noise sweep: the noise perturbs the dynamics, so every noise level
// re-simulates its own feature blocks with the fixed-step solver.
Plan plan_input_noise(const ExperimentConfig& cfg, std::span<const double> test_ph) {
  Plan plan;
  plan.variants = make_variants(cfg);
  const int n_sigma = static_cast<int>(cfg.noise_grid.size());
  const int train_size = cfg.train_sizes.front();
  const auto train_grid = training_phases(train_size);

  plan.rows.resize(plan.variants.size() * static_cast<std::size_t>(n_sigma));
  int slot = 0;
  for (int vi = 0; vi < static_cast<int>(plan.variants.size()); ++vi) {
    const Variant& v = plan.variants[static_cast<std::size_t>(vi)];
    for (int si = 0; si < n_sigma; ++si) {
      RowGroup g;
      g.variant = vi;
      g.reservoir = 0;
      g.sigma_index = si;
      for (std::size_t j = 0; j < test_ph.size(); ++j) {
        plan.jobs.push_back({vi, 0, test_ph[j], slot, si, kRoleTest, j});
        g.test_slots.push_back(slot++);
      }
      TrainBlock block;
      block.train_size = train_size;
      block.phases = train_grid;
      for (std::size_t j = 0; j < train_grid.size(); ++j) {
        plan.jobs.push_back({vi, 0, train_grid[j], slot, si, kRoleTrain, j});
        block.slots.push_back(slot++);
      }
      block.row_index = vi * n_sigma + si;
      RowResult& row = plan.rows[static_cast<std::size_t>(block.row_index)];
      row.model = v.model;
      row.dim = v.dim_label;
      row.n_out = model_output_channels(v.model);
      row.train_size = train_size;
      row.noise_kind = NoiseKind::input;
      row.noise_sigma_over_alpha = cfg.noise_grid[static_cast<std::size_t>(si)];
      row.fixed_dt = cfg.fixed_dt;
      g.trains.push_back(std::move(block));
      plan.groups.push_back(std::move(g));
    }
  }
  plan.n_slots = slot;
  return plan;
}

template <class Fn>
void run_items(RunMode mode, std::size_t count, Fn&& fn) {
  if (mode == RunMode::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(count); ++i) fn(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < count; ++i) fn(i);
  }
}

Eigen::MatrixXd matrix_from_slots(const std::vector<FeatureSeries>& features,
                                  std::span<const int> slots) {
  if (slots.empty()) throw std::logic_error("matrix_from_slots: empty slot list");
  const std::size_t rows = features[static_cast<std::size_t>(slots[0])].values.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(slots.size()));
  for (std::size_t j = 0; j < slots.size(); ++j) {
    const auto& vals = features[static_cast<std::size_t>(slots[j])].values;
    if (vals.size() != rows) throw std::logic_error("matrix_from_slots: inconsistent feature lengths");
    m.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(rows));
  }
  return m;
}

std::string first_slot_error(const std::vector<std::string>& slot_errors, std::span<const int> slots) {
  for (int s : slots) {
    const auto& e = slot_errors[static_cast<std::size_t>(s)];
    if (!e.empty()) return e;
  }
  return {};
}

std::string sanitize_status(std::string msg) {
  for (char& c : msg)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return "failed: " + msg;
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::train_size_sweep: return "train_size_sweep";
    case Experiment::dimension_sweep: return "dimension_sweep";
    case Experiment::model_comparison: return "model_comparison";
    case Experiment::output_noise_sweep: return "output_noise_sweep";
    case Experiment::input_noise_sweep: return "input_noise_sweep";
  }
  return "?";
}

std::string to_string(Model m) {
  switch (m) {
    case Model::qrc: return "qrc";
    case Model::full_qrc: return "full_qrc";
    case Model::crc: return "crc";
    case Model::full_crc: return "full_crc";
    case Model::hvrc: return "hvrc";
  }
  return "?";
}

std::string to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::none: return "none";
    case NoiseKind::output: return "output";
    case NoiseKind::input: return "input";
  }
  return "?";
}

std::string to_string(ClassicalForm f) {
  return f == ClassicalForm::literal ? "literal" : "normal_ordered";
}

std::string to_string(RadiusForm f) { return f == RadiusForm::literal ? "literal" : "conventional"; }

std::string to_string(GammaSelection g) { return g == GammaSelection::test_set ? "test" : "holdout"; }

Experiment experiment_from_string(const std::string& s) {
  if (s == "train_size_sweep") return Experiment::train_size_sweep;
  if (s == "dimension_sweep") return Experiment::dimension_sweep;
  if (s == "model_comparison") return Experiment::model_comparison;
  if (s == "output_noise_sweep") return Experiment::output_noise_sweep;
  if (s == "input_noise_sweep") return Experiment::input_noise_sweep;
  throw ConfigError("unknown experiment '" + s + "'");
}

Model model_from_string(const std::string& s) {
  if (s == "qrc") return Model::qrc;
  if (s == "full_qrc") return Model::full_qrc;
  if (s == "crc") return Model::crc;
  if (s == "full_crc") return Model::full_crc;
  if (s == "hvrc") return Model::hvrc;
  throw ConfigError("unknown model '" + s + "'");
}

NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "none") return NoiseKind::none;
  if (s == "output") return NoiseKind::output;
  if (s == "input") return NoiseKind::input;
  throw ConfigError("unknown noise kind '" + s + "'");
}

ClassicalForm classical_form_from_string(const std::string& s) {
  if (s == "literal") return ClassicalForm::literal;
  if (s == "normal_ordered") return ClassicalForm::normal_ordered;
  throw ConfigError("unknown classical form '" + s + "' (expected literal or normal_ordered)");
}

RadiusForm radius_form_from_string(const std::string& s) {
  if (s == "literal") return RadiusForm::literal;
  if (s == "conventional") return RadiusForm::conventional;
  throw ConfigError("unknown radius form '" + s + "' (expected literal or conventional)");
}

GammaSelection gamma_selection_from_string(const std::string& s) {
  if (s == "test") return GammaSelection::test_set;
  if (s == "holdout") return GammaSelection::holdout;
  throw ConfigError("unknown gamma selection '" + s + "' (expected test or holdout)");
}

int model_output_channels(Model m) {
  switch (m) {
    case Model::qrc:
    case Model::crc:
      return 1;
    case Model::full_crc:
      return 2;
    case Model::full_qrc:
    case Model::hvrc:
      return 3;
  }
  return 1;
}

void ExperimentConfig::validate() const {
  if (models.empty()) throw ConfigError("models must be non-empty");
  if (train_sizes.empty()) throw ConfigError("train_sizes must be non-empty");
  for (int m : train_sizes)
    if (m < 2) throw ConfigError("every training size must be >= 2");
  if (test_size < 1) throw ConfigError("test_size must be >= 1");
  if (n_reservoirs < 1) throw ConfigError("n_reservoirs must be >= 1");
  if (rel_std < 0.0) throw ConfigError("rel_std must be >= 0");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (!(t_signal > 0.0)) throw ConfigError("t_signal must be > 0");
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");

  const bool has_qrc = std::find(models.begin(), models.end(), Model::qrc) != models.end();
  if (has_qrc) {
    if (dims.empty()) throw ConfigError("dims must be non-empty when the qrc model is requested");
    for (int d : dims)
      if (d < 2) throw ConfigError("every Hilbert dimension must be >= 2");
  }
  {
    std::vector<int> sorted_dims = dims;
    std::sort(sorted_dims.begin(), sorted_dims.end());
    if (std::adjacent_find(sorted_dims.begin(), sorted_dims.end()) != sorted_dims.end())
      throw ConfigError("dims must be distinct");
  }
  {
    std::vector<Model> m = models;
    std::sort(m.begin(), m.end());
    if (std::adjacent_find(m.begin(), m.end()) != m.end()) throw ConfigError("models must be distinct");
  }

  const bool noise_run =
      experiment == Experiment::output_noise_sweep || experiment == Experiment::input_noise_sweep;
  if (noise_run) {
    if (noise_grid.empty()) throw ConfigError("noise_grid must be non-empty");
    double prev = -1.0;
    for (double s : noise_grid) {
      if (s < 0.0) throw ConfigError("noise levels must be >= 0");
      if (!(s > prev)) throw ConfigError("noise_grid must be strictly increasing");
      prev = s;
    }
    if (n_reservoirs != 1)
      throw ConfigError("noise sweeps run a single parameter set (n_reservoirs must be 1)");
    if (train_sizes.size() != 1)
      throw ConfigError("noise sweeps use a single training-set size");
    if (gamma_selection == GammaSelection::holdout)
      throw ConfigError("holdout gamma selection is not supported for noise sweeps");
  }

  switch (experiment) {
    case Experiment::train_size_sweep: {
      const bool has_crc = std::find(models.begin(), models.end(), Model::crc) != models.end();
      if (!has_qrc || !has_crc)
        throw ConfigError("train_size_sweep compares the qrc and crc models; both must be present");
      break;
    }
    case Experiment::dimension_sweep: {
      if (models.size() != 1 || models.front() != Model::qrc)
        throw ConfigError("dimension_sweep runs the qrc model only");
      for (int d : dims)
        if (d < 2 || d > 12) throw ConfigError("dimension_sweep dims must lie in [2, 12]");
      if (std::find(train_sizes.begin(), train_sizes.end(), 30) == train_sizes.end())
        throw ConfigError("dimension_sweep requires training size 30 (the reported slice)");
      break;
    }
    case Experiment::model_comparison: {
      if (has_qrc && (dims.size() != 1 || dims.front() != 2))
        throw ConfigError("model_comparison runs the qubit models; dims must be {2}");
      break;
    }
    case Experiment::input_noise_sweep: {
      if (!(fixed_dt > 0.0)) throw ConfigError("fixed_dt must be > 0");
      const double spacing = t_signal / static_cast<double>(n_samples);
      const double ratio = spacing / fixed_dt;
      if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
        throw ConfigError("fixed_dt must divide the output sample spacing evenly");
      const ParameterDistribution dist{};
      const double bound = std::min(spacing, 1.0 / dist.means.drive_freq) / 20.0;
      if (fixed_dt > bound * (1.0 + 1e-12))
        throw ConfigError("fixed_dt too coarse for white-noise injection (must be <= " +
                          std::to_string(bound) + ")");
      break;
    }
    case Experiment::output_noise_sweep:
      break;
  }
}

ExperimentConfig experiment_defaults(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::train_size_sweep:
      break;  // struct defaults
    case Experiment::dimension_sweep:
      c.models = {Model::qrc};
      c.dims = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
      break;
    case Experiment::model_comparison:
      c.models = {Model::qrc, Model::full_qrc, Model::hvrc, Model::crc, Model::full_crc};
      c.dims = {2};
      break;
    case Experiment::output_noise_sweep:
      c.train_sizes = {10};
      c.n_reservoirs = 1;
      break;
    case Experiment::input_noise_sweep:
      c.train_sizes = {10};
      c.n_reservoirs = 1;
      c.test_size = 100;
      break;
  }
  return c;
}

std::vector<AggregateRow> aggregate_rows(const std::vector<RowResult>& rows) {
  using Key = std::tuple<int, int, int, double>;
  std::map<Key, std::size_t> index;
  std::vector<AggregateRow> out;
  std::vector<std::vector<double>> rms_by_group;
  std::vector<std::vector<double>> gamma_by_group;

  for (const RowResult& r : rows) {
    const Key key{static_cast<int>(r.model), r.dim, r.train_size, r.noise_sigma_over_alpha};
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      AggregateRow agg;
      agg.model = r.model;
      agg.dim = r.dim;
      agg.train_size = r.train_size;
      agg.noise_sigma_over_alpha = r.noise_sigma_over_alpha;
      out.push_back(agg);
      rms_by_group.emplace_back();
      gamma_by_group.emplace_back();
    }
    if (r.ok()) {
      rms_by_group[it->second].push_back(r.rms);
      gamma_by_group[it->second].push_back(r.gamma);
    }
  }

  for (std::size_t g = 0; g < out.size(); ++g) {
    const auto& rms = rms_by_group[g];
    out[g].count = static_cast<int>(rms.size());
    if (rms.empty()) continue;
    PerformanceStats st;
    st.rms_best = *std::min_element(rms.begin(), rms.end());
    st.rms_worst = *std::max_element(rms.begin(), rms.end());
    double sum = 0.0;
    for (double v : rms) sum += v;
    st.rms_mean = sum / static_cast<double>(rms.size());
    double var = 0.0;
    for (double v : rms) var += (v - st.rms_mean) * (v - st.rms_mean);
    st.rms_std = std::sqrt(var / static_cast<double>(rms.size()));
    st.spread_factor = st.rms_mean > 0.0 ? spread_factor(st.rms_best, st.rms_worst, st.rms_mean) : 0.0;
    out[g].stats = st;

    std::map<double, int> counts;
    for (double v : gamma_by_group[g]) ++counts[v];
    int best_count = 0;
    for (const auto& [gamma, count] : counts) {
      if (count >= best_count) {  // >= keeps the larger gamma on ties
        best_count = count;
        out[g].gamma_mode = gamma;
      }
    }
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, RunMode mode) {
  cfg.validate();
#ifdef _OPENMP
  if (mode == RunMode::parallel && cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif

  ExperimentResult result;
  result.config = cfg;

  ParameterDistribution dist;
  dist.rel_std = cfg.rel_std;
  dist.count = cfg.n_reservoirs - 1;
  result.ensemble.push_back(dist.means);  // index 0: the exact mean parameter set
  {
    Rng prng = derive_stream(cfg.seed, {kStreamParams});
    auto draws = sample_parameters(dist, prng);
    result.ensemble.insert(result.ensemble.end(), draws.begin(), draws.end());
  }

  TaskConfig task;
  task.t_signal = cfg.t_signal;
  task.n_samples = cfg.n_samples;
  const std::vector<double> sample_times = task.sample_times();

  std::vector<double> test_ph;
  {
    Rng trng = derive_stream(cfg.seed, {kStreamTestPhases});
    test_ph = test_phases(cfg.test_size, trng);
  }
  std::vector<double> val_ph;
  if (cfg.gamma_selection == GammaSelection::holdout) {
    Rng vrng = derive_stream(cfg.seed, {kStreamValPhases});
    val_ph = test_phases(cfg.test_size, vrng);
  }

  Plan plan;
  switch (cfg.experiment) {
    case Experiment::train_size_sweep:
    case Experiment::dimension_sweep:
    case Experiment::model_comparison:
      plan = plan_clean(cfg, result.ensemble, test_ph, val_ph);
      break;
    case Experiment::output_noise_sweep:
      plan = plan_output_noise(cfg, result.ensemble, test_ph);
      break;
    case Experiment::input_noise_sweep:
      plan = plan_input_noise(cfg, test_ph);
      break;
  }

  // Stage 1: every trajectory is an independent work item writing to its own
  // slot; random streams are derived from the item identity, never shared.
  std::vector<FeatureSeries> features(static_cast<std::size_t>(plan.n_slots));
  std::vector<std::string> slot_errors(static_cast<std::size_t>(plan.n_slots));
  const bool input_noise = cfg.experiment == Experiment::input_noise_sweep;

  IntegratorConfig icfg;
  icfg.fixed_dt = cfg.fixed_dt;
  const long n_steps = input_noise ? std::lround(sample_times.back() / cfg.fixed_dt) : 0;

  run_items(mode, plan.jobs.size(), [&](std::size_t i) {
    const TrajJob& job = plan.jobs[i];
    const Variant& v = plan.variants[static_cast<std::size_t>(job.variant)];
    const ReservoirParams p =
        variant_params(v, result.ensemble[static_cast<std::size_t>(job.reservoir)]);
    try {
      if (input_noise) {
        const double sigma_step =
            cfg.noise_grid[static_cast<std::size_t>(job.sigma_index)] * p.drive_amp;
        std::vector<double> noise(static_cast<std::size_t>(n_steps), 0.0);
        if (sigma_step > 0.0) {
          Rng nrng = derive_stream(cfg.seed, {kStreamInputNoise,
                                              static_cast<std::uint64_t>(job.sigma_index),
                                              job.noise_role, job.noise_instance});
          for (auto& x : noise) x = sigma_step * nrng.gaussian();
        }
        features[static_cast<std::size_t>(job.slot)] =
            simulate_noisy(v, p, job.phase, sample_times, noise, cfg, icfg);
      } else {
        features[static_cast<std::size_t>(job.slot)] =
            simulate_clean(v, p, job.phase, sample_times, cfg);
      }
    } catch (const std::exception& e) {
      slot_errors[static_cast<std::size_t>(job.slot)] = e.what();
    }
  });

  // Stage 2: readout training and evaluation per row group.
  result.rows = plan.rows;
  run_items(mode, plan.groups.size(), [&](std::size_t gi) {
    const RowGroup& g = plan.groups[gi];
    const bool output_noise = cfg.experiment == Experiment::output_noise_sweep && g.sigma_index >= 0;
    const double sigma_over_alpha =
        g.sigma_index >= 0 ? cfg.noise_grid[static_cast<std::size_t>(g.sigma_index)] : 0.0;
    const double alpha = result.ensemble[static_cast<std::size_t>(g.reservoir)].drive_amp;

    std::string block_error = first_slot_error(slot_errors, g.test_slots);
    if (block_error.empty() && !g.val_slots.empty())
      block_error = first_slot_error(slot_errors, g.val_slots);

    Eigen::MatrixXd test_mat, val_mat;
    if (block_error.empty()) {
      test_mat = matrix_from_slots(features, g.test_slots);
      if (output_noise && sigma_over_alpha > 0.0) {
        const double sigma_abs = sigma_over_alpha * alpha;
        for (std::size_t j = 0; j < g.test_slots.size(); ++j) {
          Rng nrng = derive_stream(cfg.seed, {kStreamOutputNoiseTest,
                                              static_cast<std::uint64_t>(g.sigma_index),
                                              static_cast<std::uint64_t>(j)});
          for (Eigen::Index k = 0; k < test_mat.rows(); ++k)
            test_mat(k, static_cast<Eigen::Index>(j)) += sigma_abs * nrng.gaussian();
        }
      }
      if (!g.val_slots.empty()) val_mat = matrix_from_slots(features, g.val_slots);
    }

    for (const TrainBlock& block : g.trains) {
      RowResult& row = result.rows[static_cast<std::size_t>(block.row_index)];
      if (row.noise_kind == NoiseKind::input) {
        row.noise_scale_s =
            row.noise_sigma_over_alpha * alpha / std::sqrt(cfg.fixed_dt);
      }
      if (!block_error.empty()) {
        row.status = sanitize_status(block_error);
        continue;
      }
      const std::string train_error = first_slot_error(slot_errors, block.slots);
      if (!train_error.empty()) {
        row.status = sanitize_status(train_error);
        continue;
      }
      try {
        TrainingSet ts;
        ts.phases = block.phases;
        ts.features = matrix_from_slots(features, block.slots);
        if (output_noise && sigma_over_alpha > 0.0) {
          const double sigma_abs = sigma_over_alpha * alpha;
          for (std::size_t j = 0; j < block.slots.size(); ++j) {
            Rng nrng = derive_stream(cfg.seed, {kStreamOutputNoiseTrain,
                                                static_cast<std::uint64_t>(g.sigma_index),
                                                static_cast<std::uint64_t>(j)});
            for (Eigen::Index k = 0; k < ts.features.rows(); ++k)
              ts.features(k, static_cast<Eigen::Index>(j)) += sigma_abs * nrng.gaussian();
          }
        }
        const GammaSweepResult sweep =
            cfg.gamma_selection == GammaSelection::holdout
                ? gamma_sweep_holdout(ts, val_mat, val_ph, test_mat, test_ph)
                : gamma_sweep(ts, test_mat, test_ph);
        row.rms = sweep.rms;
        row.gamma = sweep.weights.gamma;
      } catch (const std::exception& e) {
        row.status = sanitize_status(e.what());
      }
    }
  });

  // Paired-pipeline check: hvrc features must be the pointwise spherical
  // transform of the full_qrc features.
  if (cfg.experiment == Experiment::model_comparison) {
    int vi_full = -1, vi_hv = -1;
    for (std::size_t vi = 0; vi < plan.variants.size(); ++vi) {
      if (plan.variants[vi].model == Model::full_qrc) vi_full = static_cast<int>(vi);
      if (plan.variants[vi].model == Model::hvrc) vi_hv = static_cast<int>(vi);
    }
    if (vi_full >= 0 && vi_hv >= 0) {
      const RowGroup* g_full = nullptr;
      const RowGroup* g_hv = nullptr;
      for (const RowGroup& g : plan.groups) {
        if (g.reservoir != 0) continue;
        if (g.variant == vi_full) g_full = &g;
        if (g.variant == vi_hv) g_hv = &g;
      }
      if (g_full && g_hv) {
        double worst = 0.0;
        bool valid = true;
        for (std::size_t j = 0; j < g_full->test_slots.size(); ++j) {
          const auto& full_fs = features[static_cast<std::size_t>(g_full->test_slots[j])];
          const auto& hv_fs = features[static_cast<std::size_t>(g_hv->test_slots[j])];
          if (full_fs.values.empty() || hv_fs.values.empty()) {
            valid = false;
            break;
          }
          const FeatureSeries mapped = hv_transform_series(full_fs, cfg.radius_form);
          for (std::size_t k = 0; k < mapped.values.size(); ++k)
            worst = std::max(worst, std::abs(mapped.values[k] - hv_fs.values[k]));
        }
        if (valid) result.hvrc_transform_check = worst;
      }
    }
  }

  result.aggregates = aggregate_rows(result.rows);
  return result;
}

}  // namespace qrc
