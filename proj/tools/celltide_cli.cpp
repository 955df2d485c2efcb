// celltide command-line tool: ingest, synth, train, arima, compare.

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "celltide/celltide.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError {
  std::string message;
};

struct RuntimeError {
  std::string message;
};

void check(ct_status status, const std::string& what) {
  if (status != CT_OK) throw RuntimeError{what + ": " + ct_last_error()};
}

struct SeriesDeleter {
  void operator()(ct_series* s) const { ct_series_free(s); }
};
struct ModelDeleter {
  void operator()(ct_model* m) const { ct_model_free(m); }
};
struct HistoryDeleter {
  void operator()(ct_history* h) const { ct_history_free(h); }
};
using SeriesPtr = std::unique_ptr<ct_series, SeriesDeleter>;
using ModelPtr = std::unique_ptr<ct_model, ModelDeleter>;
using HistoryPtr = std::unique_ptr<ct_history, HistoryDeleter>;

SeriesPtr load_series(const std::string& path) {
  ct_series* raw = nullptr;
  check(ct_series_read_csv(path.c_str(), &raw), "reading " + path);
  return SeriesPtr(raw);
}

// CELLTIDE_SEED overrides the built-in default; an explicit --seed wins over both.
std::uint64_t default_seed() {
  const char* env = std::getenv("CELLTIDE_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const std::string text(env);
    if (text.front() == '-') throw std::invalid_argument("negative");
    const auto value = std::stoull(text, &used, 10);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw UsageError{std::string("CELLTIDE_SEED must be a nonnegative integer, got '") + env + "'"};
  }
}

void log_split(std::size_t n_total, double frac) {
  std::size_t n_train = 0, n_val = 0, n_test = 0;
  check(ct_split(n_total, frac, &n_train, &n_val, &n_test), "split");
  std::printf("split %zu/%zu/%zu\n", n_train, n_val, n_test);
}

struct IngestArgs {
  std::string input_dir;
  int grid = 1;
  std::string channel = "internet";
  std::string out;
};

void run_ingest(const IngestArgs& a) {
  if (!ct_channel_valid(a.channel.c_str())) {
    throw UsageError{"unknown channel '" + a.channel + "' (expected sms_in, sms_out, call_in, call_out or internet)"};
  }
  ct_series* raw = nullptr;
  check(ct_series_ingest_dir(a.input_dir.c_str(), a.grid, a.channel.c_str(), &raw), "ingest");
  SeriesPtr series(raw);
  check(ct_series_write_csv(series.get(), a.out.c_str()), "writing " + a.out);
  std::printf("%zu slots\n", ct_series_length(series.get()));
}

struct SynthArgs {
  std::size_t days = 62;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void run_synth(const SynthArgs& a) {
  ct_series* raw = nullptr;
  check(ct_series_synthetic(a.days, a.seed.value_or(default_seed()), &raw), "synth");
  SeriesPtr series(raw);
  check(ct_series_write_csv(series.get(), a.out.c_str()), "writing " + a.out);
  std::printf("%zu slots\n", ct_series_length(series.get()));
}

struct NetArgs {
  std::string model = "lstm";
  std::string series;
  double train_frac = 0.8;
  std::size_t window = 12;
  std::size_t epochs = 20;
  std::optional<std::uint64_t> seed;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t hidden = 50;
  std::string out_model;
  std::string out_history;
  std::string out_dir;
};

ct_train_options train_options(const NetArgs& a) {
  ct_train_options opts;
  ct_train_options_init(&opts);
  opts.kind = a.model == "ffnn" ? CT_MODEL_FFNN : CT_MODEL_LSTM;
  opts.train_frac = a.train_frac;
  opts.window = a.window;
  opts.epochs = a.epochs;
  opts.seed = a.seed.value_or(default_seed());
  opts.learning_rate = a.learning_rate;
  opts.batch_size = a.batch_size;
  opts.hidden = a.hidden;
  return opts;
}

void run_train(const NetArgs& a) {
  const auto series = load_series(a.series);
  const auto opts = train_options(a);
  log_split(ct_series_length(series.get()), opts.train_frac);
  std::printf("training %s, %zu epochs, seed %llu\n", a.model.c_str(), opts.epochs,
              static_cast<unsigned long long>(opts.seed));

  ct_model* model_raw = nullptr;
  ct_history* history_raw = nullptr;
  check(ct_train(series.get(), &opts, &model_raw, &history_raw), "train");
  ModelPtr model(model_raw);
  HistoryPtr history(history_raw);

  for (std::size_t i = 0; i < ct_history_length(history.get()); ++i) {
    double train_mae = 0.0, val_mae = 0.0, wall_ms = 0.0;
    check(ct_history_get(history.get(), i, &train_mae, &val_mae, &wall_ms), "history");
    std::printf("epoch %zu train_mae %.6f val_mae %.6f\n", i + 1, train_mae, val_mae);
  }
  double mae = 0.0, mae_norm = 0.0;
  check(ct_model_evaluate(model.get(), series.get(), opts.train_frac, nullptr, &mae, &mae_norm), "evaluate");
  std::printf("test mae %.6f (normalized %.6f)\n", mae, mae_norm);

  check(ct_model_save(model.get(), a.out_model.c_str()), "writing " + a.out_model);
  check(ct_history_write_csv(history.get(), a.out_history.c_str()), "writing " + a.out_history);
}

struct ArimaArgs {
  std::string series;
  double train_frac = 0.8;
  std::optional<int> p, d, q;
  bool auto_order = false;
  std::string out_model;
  std::string out_predictions;
};

void run_arima(const ArimaArgs& a) {
  const bool manual = a.p || a.d || a.q;
  if (manual && a.auto_order) throw UsageError{"--auto cannot be combined with --p/--d/--q"};
  const auto series = load_series(a.series);

  ct_arima_options opts;
  ct_arima_options_init(&opts);
  opts.train_frac = a.train_frac;
  opts.auto_order = manual ? 0 : 1;
  opts.p = a.p.value_or(0);
  opts.d = a.d.value_or(0);
  opts.q = a.q.value_or(0);
  log_split(ct_series_length(series.get()), opts.train_frac);

  ct_model* raw = nullptr;
  check(ct_arima_fit(series.get(), &opts, &raw), "arima");
  ModelPtr model(raw);
  int p = 0, d = 0, q = 0;
  check(ct_model_arima_order(model.get(), &p, &d, &q), "arima");
  std::printf("order (%d,%d,%d)%s\n", p, d, q, manual ? "" : " chosen by AIC");

  double mae = 0.0, mae_norm = 0.0;
  check(ct_model_evaluate(model.get(), series.get(), opts.train_frac, a.out_predictions.c_str(), &mae, &mae_norm),
        "evaluate");
  std::printf("test mae %.6f (normalized %.6f)\n", mae, mae_norm);
  check(ct_model_save(model.get(), a.out_model.c_str()), "writing " + a.out_model);
}

void run_compare(const NetArgs& a) {
  const auto series = load_series(a.series);
  const auto opts = train_options(a);
  log_split(ct_series_length(series.get()), opts.train_frac);
  check(ct_compare(series.get(), &opts, a.out_dir.c_str()), "compare");
  std::printf("wrote %s\n", a.out_dir.c_str());
}

const CLI::Validator kTrainFraction(
    [](std::string& text) -> std::string {
      double f = 0.0;
      if (!CLI::detail::lexical_cast(text, f)) return "not a number: " + text;
      return f > 0.0 && f <= 0.8 ? std::string() : "must be in (0, 0.8]";
    },
    "(0, 0.8]", "train fraction");

void add_network_flags(CLI::App* cmd, NetArgs& a) {
  cmd->add_option("--series", a.series, "Series CSV")->required();
  cmd->add_option("--train-frac", a.train_frac, "Training fraction")->capture_default_str()->check(kTrainFraction);
  cmd->add_option("--window", a.window, "Input window length T")->capture_default_str();
  cmd->add_option("--epochs", a.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Random seed (default: $CELLTIDE_SEED or 0)");
  cmd->add_option("--learning-rate", a.learning_rate, "Adam step size")->capture_default_str();
  cmd->add_option("--batch-size", a.batch_size, "Mini-batch size")->capture_default_str();
  cmd->add_option("--hidden", a.hidden, "LSTM cells")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cellular traffic forecasting with LSTM, FFNN and ARIMA baselines"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ct_version()));

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Aggregate raw CDR day files into one activity series");
  ingest_cmd->add_option("--input-dir", ingest.input_dir, "Directory of tab-separated CDR files")->required();
  ingest_cmd->add_option("--grid", ingest.grid, "Grid square id")->capture_default_str();
  ingest_cmd->add_option("--channel", ingest.channel, "sms_in|sms_out|call_in|call_out|internet")
      ->capture_default_str();
  ingest_cmd->add_option("--out", ingest.out, "Output series CSV")->required();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic diurnal traffic series");
  synth_cmd->add_option("--days", synth.days, "Number of days")->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth.seed, "Random seed (default: $CELLTIDE_SEED or 0)");
  synth_cmd->add_option("--out", synth.out, "Output series CSV")->required();

  NetArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train an LSTM or FFNN forecaster");
  train_cmd->add_option("--model", train.model, "lstm|ffnn")
      ->capture_default_str()
      ->check(CLI::IsMember({"lstm", "ffnn"}));
  add_network_flags(train_cmd, train);
  train_cmd->add_option("--out-model", train.out_model, "Model JSON")->required();
  train_cmd->add_option("--out-history", train.out_history, "History CSV")->required();

  ArimaArgs arima;
  auto* arima_cmd = app.add_subcommand("arima", "Fit the ARIMA baseline and forecast the test slice");
  arima_cmd->add_option("--series", arima.series, "Series CSV")->required();
  arima_cmd->add_option("--train-frac", arima.train_frac, "Training fraction")
      ->capture_default_str()
      ->check(kTrainFraction);
  arima_cmd->add_option("--p", arima.p, "AR order")->check(CLI::Range(0, 5));
  arima_cmd->add_option("--d", arima.d, "Differencing order")->check(CLI::Range(0, 2));
  arima_cmd->add_option("--q", arima.q, "MA order")->check(CLI::Range(0, 5));
  arima_cmd->add_flag("--auto", arima.auto_order, "Pick the order by AIC (default when no order is given)");
  arima_cmd->add_option("--out-model", arima.out_model, "Model JSON")->required();
  arima_cmd->add_option("--out-predictions", arima.out_predictions, "Predictions CSV")->required();

  NetArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "Run LSTM, FFNN and ARIMA on one split");
  add_network_flags(compare_cmd, compare);
  compare_cmd->add_option("--out-dir", compare.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*ingest_cmd) run_ingest(ingest);
    if (*synth_cmd) run_synth(synth);
    if (*train_cmd) run_train(train);
    if (*arima_cmd) run_arima(arima);
    if (*compare_cmd) run_compare(compare);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return kExitUsage;
  } catch (const RuntimeError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
