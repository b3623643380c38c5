#include "cli.hpp"

#include "pagets/error.hpp"
#include "pagets/evaluation.hpp"
#include "pagets/incremental_model.hpp"
#include "pagets/ingestion.hpp"
#include "pagets/metrics.hpp"
#include "pagets/persistence.hpp"
#include "pagets/query.hpp"
#include "pagets/rng.hpp"
#include "pagets/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>
#include <unistd.h>

namespace pagets::cli {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Rows of strings printed either as CSV or as an aligned table.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void print(std::ostream& os, const std::string& format) const {
    if (format == "csv") {
      print_row(os, header_, ",", {});
      for (const auto& r : rows_) print_row(os, r, ",", {});
      return;
    }
    std::vector<std::size_t> width(header_.size());
    for (std::size_t c = 0; c < header_.size(); ++c) width[c] = header_[c].size();
    for (const auto& r : rows_)
      for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    print_row(os, header_, "  ", width);
    for (const auto& r : rows_) print_row(os, r, "  ", width);
  }

 private:
  static void print_row(std::ostream& os, const std::vector<std::string>& r, const char* sep,
                        const std::vector<std::size_t>& width) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) os << sep;
      if (width.empty())
        os << r[c];
      else
        os << std::setw(static_cast<int>(width[c])) << r[c];
    }
    os << "\n";
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string num(double v, int precision = 10) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

struct HpFlags {
  std::int64_t T0 = HyperParams{}.T0;
  std::int64_t Tprime = HyperParams{}.Tprime;
  double gamma = HyperParams{}.gamma;
  std::optional<Index> L, k1, k2;
  Index coeff_window = HyperParams{}.coeff_window;

  void attach(CLI::App* app) {
    app->add_option("--T0", T0, "Observations before the first training")->capture_default_str();
    app->add_option("--Tprime", Tprime, "Observations spanned by one sub-model")->capture_default_str();
    app->add_option("--gamma", gamma, "Geometric retrain growth factor")->capture_default_str();
    app->add_option("--L", L, "Fixed Page-matrix rows");
    app->add_option("--k1", k1, "Mean-model rank");
    app->add_option("--k2", k2, "Variance-model rank");
    app->add_option("--coeff-window", coeff_window, "Sub-models averaged for forecasting")->capture_default_str();
  }

  HyperParams params() const {
    HyperParams hp;
    hp.T0 = T0;
    hp.Tprime = Tprime;
    hp.gamma = gamma;
    hp.L = L;
    hp.k1 = k1;
    hp.k2 = k2;
    hp.coeff_window = coeff_window;
    hp.validate();
    return hp;
  }
};

std::int64_t gcd_of_gaps(const TimeSeriesBatch& b) {
  std::int64_t g = 0;
  for (Index j = 1; j < b.length(); ++j) g = std::gcd(g, b.timestamp_of(j) - b.timestamp_of(j - 1));
  return std::max<std::int64_t>(g, 1);
}

// Irregular timestamps go onto the grid given by their common spacing.
TimeSeriesBatch regularise(TimeSeriesBatch batch, std::ostream& err) {
  if (batch.timestamps.empty()) return batch;
  const std::int64_t step = gcd_of_gaps(batch);
  err << "note: irregular timestamps placed on a grid of step " << step << "\n";
  return aggregate(batch, step, AggregateFn::Last);
}

TimeSeriesBatch read_input(const std::string& path, const std::string& time_col,
                           const std::vector<std::string>& cols, std::int64_t interval, const std::string& fn,
                           std::ostream& err) {
  TimeSeriesBatch batch = load_csv(path, time_col, cols);
  if (interval > 0) {
    const auto f = parse_aggregate_fn(fn);
    if (!f) throw Error(ErrorCode::InvalidParams, "unknown aggregate function '" + fn + "'");
    return aggregate(batch, interval, *f);
  }
  return regularise(std::move(batch), err);
}

void print_events(std::ostream& out, const PredictionModel& model, std::size_t from) {
  const auto& ev = model.retrain_events();
  for (std::size_t i = from; i < ev.size(); ++i)
    out << "retrain submodel=" << ev[i].submodel << " observations=" << ev[i].observations
        << " segment_obs=" << ev[i].segment_obs << " L=" << ev[i].L << " k1=" << ev[i].k1 << " k2=" << ev[i].k2
        << "\n";
}

void print_training(std::ostream& out, const PredictionModel& model, double secs, std::int64_t records) {
  out << "train_seconds=" << num(secs, 6) << "\n";
  out << "per_record_us=" << num(records > 0 ? secs * 1e6 / static_cast<double>(records) : 0.0, 6) << "\n";
  out << "series=" << model.num_series() << " steps=" << model.length() << " observations=" << model.observations()
      << " submodels=" << model.submodels().size() << " trained=" << model.trained_count() << "\n";
  if (!model.trained()) out << "mode=fallback\n";
}

// ---------------------------------------------------------------- create
struct CreateCmd {
  std::string input, time_col = "t", model_dir, agg_fn = "mean";
  std::vector<std::string> cols;
  std::int64_t interval = 0;
  bool overwrite = false;
  HpFlags hp;

  void attach(CLI::App* app) {
    app->add_option("--input", input, "CSV file")->required();
    app->add_option("--model", model_dir, "Model directory")->required();
    app->add_option("--time-col", time_col, "Time column name")->capture_default_str();
    app->add_option("--value-cols", cols, "Value columns (default: all others)")->delimiter(',');
    app->add_option("--interval", interval, "Aggregation interval in ticks");
    app->add_option("--agg", agg_fn, "mean|min|max|sum|last")->capture_default_str();
    app->add_flag("--overwrite", overwrite, "Replace an existing model");
    hp.attach(app);
  }

  int run(std::ostream& out, std::ostream& err) const {
    if (fs::exists(fs::path(model_dir) / "manifest.txt") && !overwrite)
      throw Error(ErrorCode::IoError, "model " + model_dir + " exists; pass --overwrite");
    const HyperParams params = hp.params();
    const TimeSeriesBatch batch = read_input(input, time_col, cols, interval, agg_fn, err);
    const auto t0 = Clock::now();
    const PredictionModel model = create_model(batch, params);
    save_model(model, model_dir);
    const double secs = seconds_since(t0);
    print_events(out, model, 0);
    print_training(out, model, secs, model.observations());
    return 0;
  }
};

// ---------------------------------------------------------------- insert
struct InsertCmd {
  std::string input, time_col = "t", model_dir;

  void attach(CLI::App* app) {
    app->add_option("--input", input, "CSV file with the model's series")->required();
    app->add_option("--model", model_dir, "Model directory")->required();
    app->add_option("--time-col", time_col, "Time column name")->capture_default_str();
  }

  int run(std::ostream& out, std::ostream&) const {
    PredictionModel model = load_model(model_dir);
    const TimeSeriesBatch batch = load_csv(input, time_col, model.names());
    // Place every row on the model's time grid; skipped steps become missing.
    std::vector<Index> steps;
    for (Index j = 0; j < batch.length(); ++j) {
      const std::int64_t offset = batch.timestamp_of(j) - model.time_origin();
      if (offset < 0 || offset % model.time_step() != 0)
        throw Error(ErrorCode::OutOfOrder, "timestamp " + std::to_string(batch.timestamp_of(j)) +
                                               " is not on the model grid");
      const Index t = static_cast<Index>(offset / model.time_step());
      if (t < model.length() || (!steps.empty() && t <= steps.back()))
        throw Error(ErrorCode::OutOfOrder,
                    "timestamp " + std::to_string(batch.timestamp_of(j)) + " does not follow the stored data");
      steps.push_back(t);
    }
    const std::size_t events_before = model.retrain_events().size();
    const auto t0 = Clock::now();
    std::vector<double> row(static_cast<std::size_t>(model.num_series()), kMissing);
    std::int64_t records = 0;
    for (Index j = 0; j < batch.length(); ++j) {
      std::fill(row.begin(), row.end(), kMissing);
      while (model.length() < steps[static_cast<std::size_t>(j)]) model.insert(row);
      for (Index n = 0; n < model.num_series(); ++n) row[static_cast<std::size_t>(n)] = batch.values(n, j);
      model.insert(row);
      records += model.num_series();
    }
    save_model(model, model_dir);
    const double secs = seconds_since(t0);
    print_events(out, model, events_before);
    print_training(out, model, secs, records);
    return 0;
  }
};

// ---------------------------------------------------------------- predict
struct PredictCmd {
  std::string model_dir, series, range, interval = "gaussian", format = "csv";
  std::optional<std::int64_t> t;
  double confidence = 95.0;
  bool no_uq = false;

  void attach(CLI::App* app) {
    app->add_option("--model", model_dir, "Model directory")->required();
    app->add_option("--series", series, "Series name")->required();
    auto* t_opt = app->add_option("--t", t, "Time index (0-based)");
    auto* r_opt = app->add_option("--range", range, "Inclusive time index range A:B");
    t_opt->excludes(r_opt);
    app->add_option("--confidence", confidence, "Interval confidence in (0, 100)")->capture_default_str();
    app->add_option("--interval", interval, "gaussian|chebyshev")->capture_default_str();
    app->add_flag("--no-uq", no_uq, "Mean only");
    app->add_option("--format", format, "csv|table")->check(CLI::IsMember({"csv", "table"}))->capture_default_str();
  }

  int run(std::ostream& out, std::ostream&) const {
    Index t1 = 0, t2 = 0;
    if (t) {
      t1 = t2 = static_cast<Index>(*t);
    } else if (!range.empty()) {
      const auto colon = range.find(':');
      if (colon == std::string::npos) throw Error(ErrorCode::OutOfRange, "range must look like A:B");
      try {
        std::size_t used_a = 0, used_b = 0;
        const std::string a = range.substr(0, colon), b = range.substr(colon + 1);
        t1 = std::stoll(a, &used_a);
        t2 = std::stoll(b, &used_b);
        if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument(range);
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::OutOfRange, "range must look like A:B, got '" + range + "'");
      }
      if (t2 < t1) throw Error(ErrorCode::OutOfRange, "range end precedes its start");
    } else {
      throw Error(ErrorCode::InvalidParams, "one of --t or --range is required");
    }
    QueryOptions opts;
    opts.confidence = confidence;
    opts.method = parse_interval_method(interval);
    opts.with_uq = !no_uq;
    const PredictionModel model = load_model(model_dir);
    const Index n = series_index(model, series);
    const auto results = predict_range(model, n, t1, t2, opts);

    std::vector<std::string> header{"t", "timestamp", "series", "mean"};
    if (opts.with_uq) header.insert(header.end(), {"variance", "lo", "hi"});
    header.push_back("kind");
    Table table(header);
    for (Index t_i = t1; t_i <= t2; ++t_i) {
      const PredictionResult& r = results[static_cast<std::size_t>(t_i - t1)];
      std::vector<std::string> row{std::to_string(t_i), std::to_string(model.time_origin() + t_i * model.time_step()),
                                   series, num(r.mean, 17)};
      if (opts.with_uq) row.insert(row.end(), {num(r.variance, 17), num(r.lo, 17), num(r.hi, 17)});
      row.push_back(std::string(to_string(r.kind)) + (r.fallback ? "-fallback" : ""));
      table.add(std::move(row));
    }
    table.print(out, format);
    return 0;
  }
};

// ---------------------------------------------------------------- synth
struct SynthCmd {
  std::string kind = "I", preset = "default", out_dir;
  std::uint64_t seed = 1;
  std::optional<Index> T, n, m, r, K, R_max, N;
  double noise = 0.0, missing = 0.0;

  void attach(CLI::App* app) {
    app->add_option("--kind", kind, "I|II|III|lrf")->check(CLI::IsMember({"I", "II", "III", "lrf"}))->capture_default_str();
    app->add_option("--out", out_dir, "Output directory")->required();
    app->add_option("--seed", seed, "Generator seed")->capture_default_str();
    app->add_option("--preset", preset, "Synthetic I preset: default|scalability")->capture_default_str();
    app->add_option("--T", T, "Series length");
    app->add_option("--n", n, "Tensor rows (I, II)");
    app->add_option("--m", m, "Tensor columns (I, II)");
    app->add_option("--r", r, "Tensor rank (I)");
    app->add_option("--noise", noise, "Gaussian observation noise sd (I)");
    app->add_option("--missing", missing, "Missing probability (I)");
    app->add_option("--K", K, "Fundamental LRFs (lrf)");
    app->add_option("--R-max", R_max, "Maximum LRF order (lrf)");
    app->add_option("--N", N, "Series (lrf)");
  }

  static void write_set(const fs::path& dir, const std::string& stem, const SyntheticTruth& s, std::ostream& out) {
    write_csv(s.observations, dir / (stem + "_obs.csv"));
    TimeSeriesBatch mean = TimeSeriesBatch::from_values(s.latent_mean, s.observations.names);
    TimeSeriesBatch var = TimeSeriesBatch::from_values(s.latent_var, s.observations.names);
    write_csv(mean, dir / (stem + "_mean.csv"));
    write_csv(var, dir / (stem + "_var.csv"));
    out << stem << " " << s.kind << " N=" << s.observations.num_series() << " T=" << s.observations.length() << " "
        << s.params << "\n";
  }

  int run(std::ostream& out, std::ostream&) const {
    fs::create_directories(out_dir);
    if (kind == "I") {
      SynthIParams p = synth_I_preset(preset);
      if (T) p.T = *T;
      if (n) p.n = *n;
      if (m) p.m = *m;
      if (r) p.r = *r;
      p.noise_sd = noise;
      p.missing_prob = missing;
      write_set(out_dir, "synthI", gen_synthetic_I(p, seed), out);
    } else if (kind == "II") {
      SynthIIParams p;
      if (T) p.T = *T;
      if (n) p.n = *n;
      if (m) p.m = *m;
      for (const SyntheticTruth& s : gen_synthetic_II(p, seed)) {
        std::string stem = "synthII_" + s.kind.substr(s.kind.find('/') + 1);
        std::replace(stem.begin(), stem.end(), '/', '_');
        std::replace(stem.begin(), stem.end(), '+', '_');
        write_set(out_dir, stem, s, out);
      }
    } else if (kind == "III") {
      SynthIIIParams p;
      if (T) p.T = *T;
      for (const SyntheticTruth& s : gen_synthetic_III(p, seed))
        write_set(out_dir, "synthIII_" + s.kind.substr(s.kind.find('/') + 1), s, out);
    } else {
      write_set(out_dir, "lrf", gen_lrf(K.value_or(2), R_max.value_or(2), N.value_or(4), T.value_or(1000), seed), out);
    }
    return 0;
  }
};

// ---------------------------------------------------------------- bench
struct BenchCmd {
  std::string preset = "synthI", input, time_col = "t", format = "table";
  std::vector<Index> vary_N;
  std::vector<std::int64_t> vary_Tprime;
  std::vector<double> vary_gamma;
  Index T = 2000, N = 10, test = 0, block = 10, queries = 200;
  unsigned threads = 1;
  double noise = 0.0, missing = 0.0;
  std::uint64_t seed = 1;
  HpFlags hp;

  void attach(CLI::App* app) {
    app->add_option("--preset", preset, "synthI|scalability")->capture_default_str();
    app->add_option("--input", input, "CSV instead of a synthetic preset");
    app->add_option("--time-col", time_col, "Time column of --input")->capture_default_str();
    app->add_option("--vary-N", vary_N, "Series counts")->delimiter(',');
    app->add_option("--vary-Tprime", vary_Tprime, "Sub-model spans")->delimiter(',');
    app->add_option("--vary-gamma", vary_gamma, "Retrain growth factors")->delimiter(',');
    app->add_option("--T", T, "Synthetic length")->capture_default_str();
    app->add_option("--N", N, "Series when N is not varied")->capture_default_str();
    app->add_option("--test", test, "Held-out steps (default T/10)");
    app->add_option("--block", block, "Forecast horizon per block")->capture_default_str();
    app->add_option("--queries", queries, "predict_point calls per configuration")->capture_default_str();
    app->add_option("--threads", threads, "Concurrent query threads")->capture_default_str();
    app->add_option("--noise", noise, "Observation noise sd (synthetic)")->capture_default_str();
    app->add_option("--missing", missing, "Missing probability (synthetic)")->capture_default_str();
    app->add_option("--seed", seed, "Seed")->capture_default_str();
    app->add_option("--format", format, "csv|table")->check(CLI::IsMember({"csv", "table"}))->capture_default_str();
    hp.attach(app);
  }

  struct Config {
    Index N;
    HyperParams hp;
  };

  int run(std::ostream& out, std::ostream& err) const {
    Eigen::MatrixXd obs, truth;
    std::vector<std::string> names;
    if (!input.empty()) {
      const TimeSeriesBatch b = regularise(load_csv(input, time_col), err);
      obs = b.values;
      truth = b.values;
      names = b.names;
    } else {
      SynthIParams p = synth_I_preset(preset == "synthI" ? "default" : preset);
      p.T = T;
      p.noise_sd = noise;
      p.missing_prob = missing;
      const SyntheticTruth s = gen_synthetic_I(p, seed);
      obs = s.observations.values;
      truth = s.latent_mean;
      names = s.observations.names;
    }
    const Index total = obs.cols();
    const Index n_test = test > 0 ? test : std::max<Index>(1, total / 10);
    if (n_test >= total) throw Error(ErrorCode::InvalidParams, "--test leaves no training data");
    const Index n_train = total - n_test;

    std::vector<Config> configs;
    const HyperParams base = hp.params();
    for (Index n_i : vary_N.empty() ? std::vector<Index>{std::min<Index>(N, obs.rows())} : vary_N)
      for (std::int64_t tp : vary_Tprime.empty() ? std::vector<std::int64_t>{base.Tprime} : vary_Tprime)
        for (double g : vary_gamma.empty() ? std::vector<double>{base.gamma} : vary_gamma) {
          HyperParams h = base;
          h.Tprime = tp;
          h.gamma = g;
          h.validate();
          if (n_i < 1 || n_i > obs.rows())
            throw Error(ErrorCode::InvalidParams, "N=" + std::to_string(n_i) + " exceeds the available series");
          configs.push_back({n_i, h});
        }

    Table table({"N", "Tprime", "gamma", "train_s", "per_record_us", "p50_us", "p99_us", "nrmse", "submodels"});
    const fs::path tmp = fs::temp_directory_path() / ("pagets-bench-" + std::to_string(::getpid()));
    for (const Config& c : configs) {
      TimeSeriesBatch train = TimeSeriesBatch::from_values(obs.topLeftCorner(c.N, n_train),
                                                           {names.begin(), names.begin() + c.N});
      if (static_cast<std::int64_t>(c.N) * n_train < c.hp.T0)
        err << "warning: N=" << c.N << " has fewer than T0 observations; the model stays in fallback mode\n";
      const auto t0 = Clock::now();
      PredictionModel model = create_model(train, c.hp);
      save_model(model, tmp);
      const double train_s = seconds_since(t0);

      const std::vector<double> lat = query_latencies(model, c.N);
      const RollingForecast fc = rolling_forecast(model, obs.block(0, n_train, c.N, n_test), block);
      double err_val = std::numeric_limits<double>::quiet_NaN();
      try {
        err_val = pooled_nrmse(fc.mean, truth.block(0, n_train, c.N, n_test));
      } catch (const Error&) {
      }
      table.add({std::to_string(c.N), std::to_string(c.hp.Tprime), num(c.hp.gamma, 6), num(train_s, 6),
                 num(train_s * 1e6 / static_cast<double>(c.N * n_train), 6), num(percentile(lat, 0.5), 6),
                 num(percentile(lat, 0.99), 6), num(err_val, 6), std::to_string(model.submodels().size())});
    }
    std::error_code ec;
    fs::remove_all(tmp, ec);
    table.print(out, format);
    return 0;
  }

  static double percentile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) - 1;
    return v[std::min(idx, v.size() - 1)];
  }

  // Microseconds per predict_point: half imputation, half forecast, spread over `threads`.
  std::vector<double> query_latencies(const PredictionModel& model, Index n_series) const {
    const unsigned workers = std::max(1u, threads);
    std::vector<std::vector<double>> per(workers);
    auto work = [&](unsigned w) {
      Rng rng(seed, 1000 + w);
      for (Index q = w; q < queries; q += workers) {
        const Index n = static_cast<Index>(rng.uniform() * static_cast<double>(n_series));
        const Index t = q % 2 == 0 ? static_cast<Index>(rng.uniform() * static_cast<double>(model.length()))
                                   : model.length() + static_cast<Index>(rng.uniform() * 10.0);
        const auto t0 = Clock::now();
        predict_point(model, n, t);
        per[w].push_back(seconds_since(t0) * 1e6);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
    work(0);
    for (auto& th : pool) th.join();
    std::vector<double> all;
    for (auto& v : per) all.insert(all.end(), v.begin(), v.end());
    return all;
  }
};

// ---------------------------------------------------------------- eval
struct EvalCmd {
  std::string manifest, time_col = "t", format = "table";

  void attach(CLI::App* app) {
    app->add_option("--manifest", manifest, "CSV: algorithm,experiment,prediction,truth")->required();
    app->add_option("--time-col", time_col, "Time column of the CSV pairs")->capture_default_str();
    app->add_option("--format", format, "csv|table")->check(CLI::IsMember({"csv", "table"}))->capture_default_str();
  }

  int run(std::ostream& out, std::ostream&) const {
    std::ifstream in(manifest);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + manifest);
    const fs::path base = fs::path(manifest).parent_path();
    std::string line;
    std::getline(in, line);
    struct Entry {
      std::string algo, exp;
      double err;
    };
    std::vector<Entry> entries;
    std::vector<std::string> algos, exps;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::vector<std::string> f;
      std::stringstream ss(line);
      for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
      if (f.size() != 4) throw Error(ErrorCode::InvalidParams, "manifest rows need 4 fields: " + line);
      const TimeSeriesBatch pred = load_csv(base / f[2], time_col);
      const TimeSeriesBatch truth = load_csv(base / f[3], time_col, pred.names);
      if (pred.length() != truth.length())
        throw Error(ErrorCode::LengthMismatch, f[2] + " and " + f[3] + " differ in length");
      entries.push_back({f[0], f[1], pooled_nrmse(pred.values, truth.values)});
      if (std::find(algos.begin(), algos.end(), f[0]) == algos.end()) algos.push_back(f[0]);
      if (std::find(exps.begin(), exps.end(), f[1]) == exps.end()) exps.push_back(f[1]);
    }
    ExperimentGrid grid{algos, exps,
                        Eigen::MatrixXd::Constant(static_cast<Index>(algos.size()), static_cast<Index>(exps.size()),
                                                  std::numeric_limits<double>::quiet_NaN())};
    for (const Entry& e : entries) {
      const auto a = std::find(algos.begin(), algos.end(), e.algo) - algos.begin();
      const auto x = std::find(exps.begin(), exps.end(), e.exp) - exps.begin();
      grid.errors(a, x) = e.err;
    }
    const Eigen::VectorXd scores = wbc(grid);
    Table table({"algorithm", "mean_nrmse", "wbc"});
    for (std::size_t a = 0; a < algos.size(); ++a)
      table.add({algos[a], num(grid.errors.row(static_cast<Index>(a)).mean(), 8), num(scores(static_cast<Index>(a)), 8)});
    table.print(out, format);
    return 0;
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Incremental multivariate time-series imputation and forecasting"};
  app.require_subcommand(1);
  CreateCmd create;
  InsertCmd insert;
  PredictCmd predict;
  SynthCmd synth;
  BenchCmd bench;
  EvalCmd eval;
  auto* c_create = app.add_subcommand("create", "Train a model from CSV and store it");
  auto* c_insert = app.add_subcommand("insert", "Append CSV rows to a stored model");
  auto* c_predict = app.add_subcommand("predict", "Impute or forecast one series");
  auto* c_synth = app.add_subcommand("synth", "Write synthetic benchmark data as CSV");
  auto* c_bench = app.add_subcommand("bench", "Measure training time, query latency and accuracy");
  auto* c_eval = app.add_subcommand("eval", "Score prediction/truth CSV pairs");
  create.attach(c_create);
  insert.attach(c_insert);
  predict.attach(c_predict);
  synth.attach(c_synth);
  bench.attach(c_bench);
  eval.attach(c_eval);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    if (c_create->parsed()) return create.run(out, err);
    if (c_insert->parsed()) return insert.run(out, err);
    if (c_predict->parsed()) return predict.run(out, err);
    if (c_synth->parsed()) return synth.run(out, err);
    if (c_bench->parsed()) return bench.run(out, err);
    if (c_eval->parsed()) return eval.run(out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace pagets::cli
