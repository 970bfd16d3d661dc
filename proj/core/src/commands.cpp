#include "cvsel/commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cvsel/criterion.hpp"
#include "cvsel/diagnostics.hpp"
#include "cvsel/errors.hpp"
#include "cvsel/io.hpp"
#include "cvsel/model_space.hpp"
#include "cvsel/schemes.hpp"
#include "report_json.hpp"

namespace cvsel {

namespace {

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string seconds_label(double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    fn();
    return 0;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

int parse_int_token(const std::string& raw, const std::string& what) {
  const std::string s = trimmed(raw);
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ConfigError(what + ": cannot parse integer \"" + raw + "\"");
  }
  return v;
}

double parse_double_token(const std::string& raw, const std::string& what) {
  const std::string s = trimmed(raw);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ConfigError(what + ": cannot parse number \"" + raw + "\"");
  }
  return v;
}

SpaceSpec parse_models_spec(const std::string& spec, int ambient_p) {
  SpaceSpec s;
  s.ambient_p = ambient_p;
  if (spec == "nested") {
    s.kind = SpaceSpec::Kind::nested;
    return s;
  }
  if (spec == "all" || spec.rfind("all:", 0) == 0) {
    s.kind = SpaceSpec::Kind::all_subsets;
    s.max_size = spec == "all" ? 0 : parse_int_token(spec.substr(4), "models");
    return s;
  }
  if (spec.rfind("file:", 0) == 0) {
    s.kind = SpaceSpec::Kind::explicit_list;
    const std::string path = spec.substr(5);
    const std::string text = read_text_file(path);
    int line_no = 0;
    for (const std::string& raw_line : split_on(text, '\n')) {
      ++line_no;
      const std::string line = trimmed(raw_line);
      if (line.empty() || line[0] == '#') continue;
      ModelAlpha alpha;
      for (const std::string& tok : split_on(line, ',')) {
        alpha.columns.push_back(
            parse_int_token(tok, "models file " + path + ", line " + std::to_string(line_no)));
      }
      s.models.push_back(std::move(alpha));
    }
    if (s.models.empty()) throw ConfigError("models file " + path + ": no models found");
    return s;
  }
  throw ConfigError("models: expected \"nested\", \"all[:<max>]\", or \"file:<path>\", got \"" +
                    spec + "\"");
}

TrainingScheme parse_scheme_spec(const std::string& spec, int n, int train_size) {
  if (spec == "disjoint") return disjoint_scheme(n, train_size, BlockLayout::consecutive);
  if (spec == "disjoint:consecutive") {
    return disjoint_scheme(n, train_size, BlockLayout::consecutive);
  }
  if (spec == "disjoint:strided") return disjoint_scheme(n, train_size, BlockLayout::strided);
  if (spec == "rotation") {
    const int r = n / std::gcd(n, train_size);  // smallest balanced sample count
    return rotation_scheme(n, train_size, r);
  }
  if (spec.rfind("rotation:", 0) == 0) {
    return rotation_scheme(n, train_size, parse_int_token(spec.substr(9), "scheme"));
  }
  throw ConfigError(
      "scheme: expected \"disjoint[:consecutive|:strided]\" or \"rotation[:<r>]\", got \"" +
      spec + "\"");
}

Vector parse_mu(const std::string& text, Eigen::Index n) {
  const std::vector<std::string> toks = split_on(text, ',');
  if (static_cast<Eigen::Index>(toks.size()) != n) {
    throw ConfigError("truth-mu: expected " + std::to_string(n) + " values, got " +
                      std::to_string(toks.size()));
  }
  Vector mu(n);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    mu[static_cast<Eigen::Index>(i)] =
        parse_double_token(toks[i], "truth-mu value " + std::to_string(i + 1));
  }
  return mu;
}

std::string model_label(const ModelAlpha& alpha) {
  std::string s;
  for (std::size_t i = 0; i < alpha.columns.size(); ++i) {
    if (i) s += '+';
    s += std::to_string(alpha.columns[i]);
  }
  return s.empty() ? "none" : s;
}

void check_common(int train_size, const std::optional<double>& sigma2) {
  if (train_size < 1) throw ConfigError("train size must be at least 1");
  if (sigma2 && !(std::isfinite(*sigma2) && *sigma2 > 0.0)) {
    throw ConfigError("sigma2 must be a positive finite number");
  }
}

Json scheme_json(const TrainingScheme& scheme) {
  Json s;
  s["n"] = scheme.n;
  s["train_size"] = scheme.train_size;
  s["r"] = scheme.r();
  s["coverage"] = scheme.coverage;
  s["lambda"] = lambda_n(scheme.n, scheme.train_size);
  return s;
}

// Artifact to file when a path was given (with a one-line summary on `out`),
// otherwise the raw JSON to `out` and the summary line to `err`.
void emit_artifact(const std::string& text, const std::string& line,
                   const std::string& out_path, std::ostream& out, std::ostream& err) {
  if (!out_path.empty()) {
    write_text_file(out_path, text);
    out << line << "\n";
    out << "report: " << out_path << "\n";
  } else {
    err << line << "\n";
    out << text;
  }
}

}  // namespace

int cmd_select(const SelectOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Timer timer;
    check_common(opts.train_size, opts.sigma2);
    const Dataset ds = load_csv(opts.data_path, opts.response);
    const int n = static_cast<int>(ds.response.size());
    const int p = static_cast<int>(ds.predictors.cols());
    const ModelSpace space = enumerate_models(parse_models_spec(opts.models, p));
    const TrainingScheme scheme = parse_scheme_spec(opts.scheme, n, opts.train_size);
    const Variant variant = opts.sigma2 ? Variant::known_sigma : Variant::unknown_sigma;

    CriterionEngine engine(ds.predictors, space, scheme);
    const SelectionReport report = engine.select(ds.response, variant, opts.sigma2);
    const Vector fitted = predict_future(ds.predictors, ds.response, report.selected);
    const ConditionReport conditions = build_condition_report(engine, 2, nullptr);

    Json artifact;
    artifact["schema_version"] = 1;
    artifact["tool"] = tool_json();
    artifact["kind"] = "selection";
    Json cfg;
    cfg["data"] = opts.data_path;
    cfg["response"] = opts.response;
    cfg["models"] = opts.models;
    cfg["scheme"] = opts.scheme;
    cfg["train_size"] = opts.train_size;
    cfg["sigma2"] = opts.sigma2 ? Json(*opts.sigma2) : Json(nullptr);
    cfg["seed"] = opts.seed;
    artifact["config"] = std::move(cfg);
    artifact["n"] = n;
    artifact["p"] = p;
    artifact["scheme"] = scheme_json(scheme);
    artifact["selection"] = selection_report_json(report);
    artifact["fitted"] = std::vector<double>(fitted.data(), fitted.data() + fitted.size());
    artifact["conditions"] = condition_report_json(conditions);
    artifact["timing_seconds"] = timer.seconds();

    const std::string line = "selected: " + model_label(report.selected) + " (dim " +
                             std::to_string(report.selected.dim()) + ", criterion " +
                             format_double(report.values[report.selected_index].value) +
                             ", " + variant_name(variant) +
                             (report.tie_broken ? ", tie broken)" : ")");
    emit_artifact(dump_json(artifact), line, opts.out_path, out, err);
  });
}

int cmd_diagnose(const DiagnoseOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Timer timer;
    check_common(opts.train_size, opts.sigma2);
    if (opts.m < 1) throw ConfigError("m must be at least 1");
    const Dataset ds = load_csv(opts.data_path, opts.response);
    const int n = static_cast<int>(ds.response.size());
    const int p = static_cast<int>(ds.predictors.cols());
    const ModelSpace space = enumerate_models(parse_models_spec(opts.models, p));
    const TrainingScheme scheme = parse_scheme_spec(opts.scheme, n, opts.train_size);

    std::optional<TruthSpec> truth;
    if (opts.truth_mu) {
      if (!opts.sigma2) {
        throw ConfigError("truth-dependent diagnostics need --sigma2 for the risk scale");
      }
      truth = TruthSpec{parse_mu(*opts.truth_mu, ds.response.size()), *opts.sigma2};
    }

    CriterionEngine engine(ds.predictors, space, scheme);
    const ConditionReport conditions =
        build_condition_report(engine, opts.m, truth ? &*truth : nullptr);

    Json artifact;
    artifact["schema_version"] = 1;
    artifact["tool"] = tool_json();
    artifact["kind"] = "conditions";
    Json cfg;
    cfg["data"] = opts.data_path;
    cfg["response"] = opts.response;
    cfg["models"] = opts.models;
    cfg["scheme"] = opts.scheme;
    cfg["train_size"] = opts.train_size;
    cfg["sigma2"] = opts.sigma2 ? Json(*opts.sigma2) : Json(nullptr);
    cfg["m"] = opts.m;
    cfg["truth_mu_given"] = opts.truth_mu.has_value();
    artifact["config"] = std::move(cfg);
    artifact["n"] = n;
    artifact["p"] = p;
    artifact["scheme"] = scheme_json(scheme);
    artifact["conditions"] = condition_report_json(conditions);
    artifact["timing_seconds"] = timer.seconds();

    std::string line = "conditions: n=" + std::to_string(n) +
                       " r=" + std::to_string(scheme.r()) +
                       " lambda=" + format_double(conditions.lambda) +
                       " max|mean a_in|/n=" + format_double(conditions.max_abs_mean_ain_over_n);
    if (conditions.has_truth) line += " n_correct=" + std::to_string(conditions.n_correct);
    emit_artifact(dump_json(artifact), line, opts.out_path, out, err);
  });
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Timer timer;
    if (opts.config_path.empty()) throw ConfigError("config path required");
    if (opts.out_prefix.empty()) throw ConfigError("output prefix required");
    const ExperimentConfig config = parse_experiment_config(read_text_file(opts.config_path));

    int threads = opts.threads;
    if (const char* env = std::getenv("CVSELECT_THREADS")) {
      const int v = std::atoi(env);
      if (v >= 1) threads = v;  // the environment wins over the flag
    }

    const ExperimentReport report = run_experiment(config, threads);

    const std::string json_path = opts.out_prefix + ".json";
    const std::string reps_path = opts.out_prefix + "_reps.csv";
    const std::string summary_path = opts.out_prefix + "_summary.csv";
    write_text_file(json_path, experiment_report_json(report));
    write_text_file(reps_path, experiment_reps_csv(report));
    write_text_file(summary_path, experiment_summary_csv(report));

    for (const GridResult& g : report.per_n) {
      out << "n=" << g.n << " train=" << g.train_size << " r=" << g.r
          << " median_ratio=" << format_double(g.ratio_q50);
      if (g.correct_frequency) {
        out << " frequency=" << format_double(*g.correct_frequency);
      }
      out << " failures=" << g.failures << "\n";
    }
    out << "report: " << json_path << "\n";
    out << "reps: " << reps_path << "\n";
    out << "summary: " << summary_path << "\n";
    // wall time never goes into the report files: they must be byte-stable
    err << "time: " << seconds_label(timer.seconds()) << " s\n";
  });
}

}  // namespace cvsel
