// Acceptance suite: nine end-to-end checks of the selection criterion, its
// algebraic identities, the Monte Carlo harness, and determinism. Prints one
// PASS/FAIL line per check; the exit code is the number of failures, so 0
// means fully green. Tolerances and seeds are pinned here on purpose.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cvsel/commands.hpp"
#include "cvsel/criterion.hpp"
#include "cvsel/diagnostics.hpp"
#include "cvsel/errors.hpp"
#include "cvsel/io.hpp"
#include "cvsel/linalg.hpp"
#include "cvsel/model_space.hpp"
#include "cvsel/oracle.hpp"
#include "cvsel/rng.hpp"
#include "cvsel/schemes.hpp"
#include "cvsel/simulate.hpp"
#include "cvsel/types.hpp"
#include "support/oracles.hpp"

using namespace cvsel;
namespace ts = testsupport;

namespace {

// Seeds are pinned so the suite is a fixed, replayable computation. The
// convergence checks are finite-sample surrogates for limit statements, so
// their thresholds are meaningful only for a fixed draw.
constexpr std::uint64_t kSeedOracleRatio = 2001;
constexpr std::uint64_t kSeedConsistency = 17;

struct Outcome {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string seq(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += " -> ";
    out += num(v[i]);
  }
  return out;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

bool nonincreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1]) return false;
  }
  return true;
}

bool nondecreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) return false;
  }
  return true;
}

ModelSpace nested_space(int p) {
  SpaceSpec spec;
  spec.kind = SpaceSpec::Kind::nested;
  spec.ambient_p = p;
  return enumerate_models(spec);
}

ModelSpace all_subsets_space(int p) {
  SpaceSpec spec;
  spec.kind = SpaceSpec::Kind::all_subsets;
  spec.ambient_p = p;
  return enumerate_models(spec);
}

Matrix random_design(Rng& rng, int n, int p) {
  Matrix x(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
  }
  return x;
}

// Straight-line tie-break used by the brute-force reimplementations: smallest
// value, then smallest dimension, then lexicographic columns. Value ties use
// exact floating-point equality, matching the library's contract.
int straight_line_argmin(const std::vector<double>& values,
                         const std::vector<ModelAlpha>& models) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    const double v = values[static_cast<std::size_t>(i)];
    const double b = values[static_cast<std::size_t>(best)];
    if (v < b) {
      best = i;
      continue;
    }
    if (v > b) continue;
    const ModelAlpha& mi = models[static_cast<std::size_t>(i)];
    const ModelAlpha& mb = models[static_cast<std::size_t>(best)];
    if (mi.dim() < mb.dim()) {
      best = i;
      continue;
    }
    if (mi.dim() > mb.dim()) continue;
    if (std::lexicographical_compare(mi.columns.begin(), mi.columns.end(),
                                     mb.columns.begin(), mb.columns.end())) {
      best = i;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// 1. The averaged log predictive score and the residual-form criterion are the
//    same object up to a model-free constant when the noise variance is known.

Outcome check_criterion_equivalence() {
  Outcome out{1, "known-variance criterion equivalence", false, "", 0.0};
  Stopwatch watch;
  constexpr double kTol = 1e-8;
  constexpr int kInstances = 50;

  Rng rng(90210);
  double worst = 0.0;
  for (int inst = 0; inst < kInstances; ++inst) {
    const int p = 1 + inst % 4;
    const int r = 2 + inst % 3;
    const int t_lo = std::max(p + 2, (24 + r - 1) / r);
    const int t_hi = 120 / r;
    const int t = t_lo + static_cast<int>(rng.uniform01() * (t_hi - t_lo + 1));
    const int n = r * t;

    const Matrix x = random_design(rng, n, p);
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = 2.0 * rng.normal() + 0.5;
    const double s2 = 0.5 + 3.5 * rng.uniform01();
    const BlockLayout layout =
        inst % 2 == 0 ? BlockLayout::strided : BlockLayout::consecutive;
    const TrainingScheme scheme = disjoint_scheme(n, t, layout);

    const double k = static_cast<double>(scheme.validation_size());
    const double expected = k * s2 / n * std::log(2.0 * std::numbers::pi * s2);
    for (const ModelAlpha& alpha : nested_space(p).models) {
      const double cv = cv_score(x, y, alpha, scheme, Variant::known_sigma, s2);
      const double gamma = gamma_known(x, y, alpha, scheme, s2).value;
      worst = std::max(worst, std::abs(-2.0 * s2 / n * cv - gamma - expected));
    }
  }

  out.seconds = watch.seconds();
  out.pass = worst <= kTol && out.seconds < 10.0;
  out.detail = "max |(-2s2/n)CV - criterion - const| = " + num(worst) + " over " +
               std::to_string(kInstances) + " instances (tol " + num(kTol) + ")";
  return out;
}

// ---------------------------------------------------------------------------
// 2. The closed-form predictive densities match direct numerical quadrature of
//    the defining integrals (flat prior on coefficients; 1/s2 prior on the
//    variance in the unknown-variance case).

Outcome check_predictive_quadrature() {
  Outcome out{2, "predictive density vs quadrature", false, "", 0.0};
  Stopwatch watch;
  constexpr double kTol = 1e-4;

  Rng rng(31415);
  double worst_known = 0.0;
  double worst_unknown = 0.0;
  const std::vector<IndexList> train_sets = {{1, 2, 3, 4}, {1, 2, 5, 6}, {2, 3, 4, 6}};

  for (int trial = 0; trial < 3; ++trial) {
    const int n = 6;
    Matrix x(n, 1);
    Vector y(n);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = 0.5 + rng.uniform01();  // bounded away from zero
      y[i] = 1.5 * x(i, 0) + 0.8 * rng.normal();
    }
    const ts::Mat xd = ts::from_eigen(x);
    const ts::Vec yd = ts::from_eigen(y);
    const IndexList& train = train_sets[static_cast<std::size_t>(trial)];
    const std::vector<int> train_i(train.begin(), train.end());
    const ModelAlpha alpha{{1}};

    for (double s2 : {0.7, 1.3}) {
      const double lib = log_cv_predictive_known_sigma(x, y, alpha, train, s2);
      const double ora = ts::log_predictive_known_quadrature(xd, yd, 1, train_i, s2);
      worst_known = std::max(worst_known, std::abs(lib - ora));
    }
    const double lib_u = log_cv_predictive_unknown_sigma(x, y, alpha, train, true);
    const double ora_u = ts::log_predictive_unknown_quadrature(xd, yd, 1, train_i);
    worst_unknown = std::max(worst_unknown, std::abs(lib_u - ora_u));
  }

  out.seconds = watch.seconds();
  out.pass = worst_known <= kTol && worst_unknown <= kTol && out.seconds < 30.0;
  out.detail = "max gap known = " + num(worst_known) +
               ", unknown = " + num(worst_unknown) + " (tol " + num(kTol) + ")";
  return out;
}

// ---------------------------------------------------------------------------
// 3. Residual decompositions, the loss decomposition, the projection split
//    identities, and the training-average bias bound, on random instances.

Outcome check_algebraic_identities() {
  Outcome out{3, "algebraic identities", false, "", 0.0};
  Stopwatch watch;
  constexpr double kRel = 1e-8;
  constexpr int kInstances = 100;

  Rng rng(27182);
  double worst = 0.0;            // relative gap over all equality identities
  double worst_sandwich = 0.0;   // bound violation (positive = broken)

  auto rel_gap = [](double lhs, double rhs) {
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
  };

  for (int inst = 0; inst < kInstances; ++inst) {
    const int p = 1 + inst % 4;
    const int r = 2 + inst % 4;
    const int t = p + 2 + static_cast<int>(rng.uniform01() * 6);
    const int n = r * t;

    const Matrix x = random_design(rng, n, p);
    Vector mu(n), e(n);
    const double w = 1.0 + 8.0 * rng.uniform01();
    const double c1 = rng.normal(), c2 = rng.normal(), c3 = rng.normal();
    const double sd = 0.5 + rng.uniform01();
    for (int i = 0; i < n; ++i) {
      const double ti = static_cast<double>(i + 1) / n;
      mu[i] = c1 * std::sin(w * ti) + c2 * ti + c3;
      e[i] = sd * rng.normal();
    }
    const Vector y = mu + e;
    const TruthSpec truth{mu, sd * sd};
    const BlockLayout layout =
        inst % 2 == 0 ? BlockLayout::strided : BlockLayout::consecutive;
    const TrainingScheme scheme = disjoint_scheme(n, t, layout);
    const ModelSpace space = nested_space(p);

    for (const ModelAlpha& alpha : space.models) {
      const Matrix xa = submatrix(x, alpha);
      const FitSummary fy = ls_fit(xa, y);
      const FitSummary fe = ls_fit(xa, e);
      const FitSummary fm = ls_fit(xa, mu);
      const Vector bias_res = mu - fm.fitted;

      // Full-data residual decomposition: the observed residual sum splits
      // into noise, loss, and two projection cross terms.
      {
        const double lhs = fy.rss / n;
        const double rhs = e.squaredNorm() / n + loss(x, y, alpha, truth) -
                           2.0 / n * e.dot(fe.fitted) + 2.0 / n * e.dot(bias_res);
        worst = std::max(worst, rel_gap(lhs, rhs));
      }

      // Same split restricted to each training block.
      for (const IndexList& rows : scheme.samples) {
        const Matrix xt = submatrix(x, alpha, rows);
        Vector yt(static_cast<Index>(rows.size())), mt(yt.size()), et(yt.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
          const Index row = static_cast<Index>(rows[i] - 1);
          yt[static_cast<Index>(i)] = y[row];
          mt[static_cast<Index>(i)] = mu[row];
          et[static_cast<Index>(i)] = e[row];
        }
        const FitSummary ft = ls_fit(xt, yt);
        const FitSummary ftm = ls_fit(xt, mt);
        const FitSummary fte = ls_fit(xt, et);
        const double lhs = ft.rss;
        const double rhs = ftm.rss + 2.0 * et.dot(mt - ftm.fitted) +
                           et.squaredNorm() - et.dot(fte.fitted);
        worst = std::max(worst, rel_gap(lhs, rhs));
      }

      // Loss decomposition: n * loss = n * bias + fitted-noise energy.
      {
        const double lhs = static_cast<double>(n) * loss(x, y, alpha, truth);
        const double rhs =
            static_cast<double>(n) * delta_n(x, alpha, truth) + e.dot(fe.fitted);
        worst = std::max(worst, rel_gap(lhs, rhs));
      }

      // Projection split identities for the first training block.
      {
        const SplitIdentityGaps gaps =
            split_identity_gaps(x, alpha, mu, scheme.samples.front());
        worst = std::max({worst, gaps.split_rel, gaps.complement_rel, gaps.inverse_rel});
        worst_sandwich = std::max(worst_sandwich, -gaps.psd_slack);
      }
    }

    // Training-average bias ratio stays inside [0, train/n] for balanced
    // schemes.
    const UniformRatios ur = empirical_uniform_ratios(space, x, truth, scheme, e);
    if (ur.max_train_bias_ratio.has_value()) {
      worst_sandwich = std::max(
          worst_sandwich, *ur.max_train_bias_ratio - ur.train_bias_bound * (1.0 + kRel));
      worst_sandwich = std::max(worst_sandwich, -(*ur.max_train_bias_ratio) - kRel);
    }
  }

  out.seconds = watch.seconds();
  out.pass = worst <= kRel && worst_sandwich <= 0.0 && out.seconds < 10.0;
  out.detail = "max relative gap = " + num(worst) + " (tol " + num(kRel) +
               "), bound slack violation = " + num(std::max(0.0, worst_sandwich));
  return out;
}

// ---------------------------------------------------------------------------
// 4. The centered unknown-variance criterion differs from the raw one by an
//    explicit model-free shift, so the selected model ignores the reference
//    scale.

Outcome check_reference_scale_invariance() {
  Outcome out{4, "reference-scale shift and argmin invariance", false, "", 0.0};
  Stopwatch watch;
  constexpr double kTol = 1e-10;

  Rng rng(16180);
  double worst = 0.0;
  bool argmin_stable = true;

  for (int inst = 0; inst < 25; ++inst) {
    const int p = 1 + inst % 4;
    const int r = 2 + inst % 3;
    const int t = p + 3 + static_cast<int>(rng.uniform01() * 5);
    const int n = r * t;
    const Matrix x = random_design(rng, n, p);
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.normal() * 1.3 + 0.7;
    const TrainingScheme scheme = disjoint_scheme(n, t, BlockLayout::strided);
    const ModelSpace space = nested_space(p);

    const double k = static_cast<double>(scheme.validation_size());
    for (double s2 : {0.5, 1.0, 4.0}) {
      for (const ModelAlpha& alpha : space.models) {
        const double raw = gamma_unknown(x, y, alpha, scheme).value;
        const double centered = gamma1_unknown(x, y, alpha, scheme, s2);
        const double shift = k / n * std::log(n * s2);
        worst = std::max(worst, std::abs(raw - shift - centered));
      }
    }

    std::vector<double> raw_values;
    for (const ModelAlpha& alpha : space.models) {
      raw_values.push_back(gamma_unknown(x, y, alpha, scheme).value);
    }
    const int base = argmin_with_tiebreak(raw_values, space.models, nullptr);
    for (double s2 : {0.1, 1.0, 10.0}) {
      std::vector<double> centered;
      for (const ModelAlpha& alpha : space.models) {
        centered.push_back(gamma1_unknown(x, y, alpha, scheme, s2));
      }
      if (argmin_with_tiebreak(centered, space.models, nullptr) != base) {
        argmin_stable = false;
      }
    }
  }

  out.seconds = watch.seconds();
  out.pass = worst <= kTol && argmin_stable;
  out.detail = "max |raw - shift - centered| = " + num(worst) + " (tol " + num(kTol) +
               "), argmin " + (argmin_stable ? "stable" : "UNSTABLE");
  return out;
}

// ---------------------------------------------------------------------------
// Shared Monte Carlo configurations for the convergence checks.

ExperimentConfig oracle_ratio_config(Variant variant) {
  ExperimentConfig cfg;
  cfg.n_grid = {100, 400, 1600};
  cfg.replications = 200;
  cfg.design.id = "equispaced-polynomial";
  cfg.design.p = 5;
  cfg.truth.id = "smooth-nonlinear";
  cfg.truth.g = "exp";
  cfg.truth.scale = 1.0;
  cfg.errors.dist = "normal";
  cfg.errors.sigma = 1.0;
  cfg.scheme.kind = "disjoint";
  cfg.scheme.layout = BlockLayout::strided;
  cfg.train_rule.kind = "power";
  cfg.train_rule.c = 1.0;
  cfg.train_rule.gamma = 0.6;
  cfg.train_rule.round_to_divisor = true;
  cfg.space.kind = SpaceSpec::Kind::nested;
  cfg.variant = variant;
  cfg.diagnostics_m = 2;
  cfg.seed = kSeedOracleRatio;
  return cfg;
}

ExperimentConfig consistency_config() {
  ExperimentConfig cfg = oracle_ratio_config(Variant::known_sigma);
  cfg.n_grid = {200, 800, 3200};
  cfg.truth = TruthGenSpec{};
  cfg.truth.id = "linear-in-subset";
  cfg.truth.alpha_star = ModelAlpha{{1, 2}};
  cfg.truth.beta_star = {1.0, 1.0};
  cfg.seed = kSeedConsistency;
  return cfg;
}

struct Artifacts {
  ExperimentReport report;
  std::string json;
  std::string reps_csv;
  std::string summary_csv;
};

Artifacts run_artifacts(const ExperimentConfig& cfg, int threads) {
  Artifacts a;
  a.report = run_experiment(cfg, threads);
  a.json = experiment_report_json(a.report);
  a.reps_csv = experiment_reps_csv(a.report);
  a.summary_csv = experiment_summary_csv(a.report);
  return a;
}

// ---------------------------------------------------------------------------
// 5. Selected-over-best loss ratio medians shrink toward 1 when no candidate
//    model is exactly right.

Outcome check_oracle_ratio(const Artifacts& known, const Artifacts& unknown,
                           double run_seconds) {
  Outcome out{5, "loss-ratio convergence (no correct candidate)", false, "", run_seconds};
  constexpr double kTail = 1.15;

  bool pass = run_seconds < 600.0;
  std::string detail;
  for (const auto* art : {&known, &unknown}) {
    const bool is_known = art == &known;
    std::vector<double> med;
    for (const GridResult& g : art->report.per_n) med.push_back(g.ratio_q50);
    const bool mono = nonincreasing(med);
    const bool tail = med.back() <= kTail;
    pass = pass && mono && tail;
    detail += std::string(is_known ? "known: " : "; unknown: ") + seq(med) +
              (mono ? "" : " NOT nonincreasing") +
              (tail ? "" : " tail > " + num(kTail));
  }
  out.pass = pass;
  out.detail = detail + " (tail tol " + num(kTail) + ")";
  return out;
}

// ---------------------------------------------------------------------------
// 6. With a correct low-dimensional candidate, the selector settles on the
//    most parsimonious correct model and its loss ratio median approaches 1.

Outcome check_consistency(const Artifacts& art, double run_seconds) {
  Outcome out{6, "selection consistency (correct candidate present)", false, "",
              run_seconds};
  constexpr double kFreq = 0.90;
  constexpr double kRatio = 1.1;

  std::vector<double> freq, med;
  for (const GridResult& g : art.report.per_n) {
    freq.push_back(g.correct_frequency.value_or(-1.0));
    med.push_back(g.ratio_q50);
  }
  const bool have = std::all_of(freq.begin(), freq.end(), [](double f) { return f >= 0.0; });
  const bool mono = have && nondecreasing(freq);
  const bool tail_freq = have && freq.back() >= kFreq;
  const bool tail_ratio = med.back() <= kRatio;
  out.pass = have && mono && tail_freq && tail_ratio && run_seconds < 600.0;
  out.detail = "frequency " + seq(freq) + (mono ? "" : " NOT nondecreasing") +
               ", ratio medians " + seq(med) + " (freq >= " + num(kFreq) +
               ", ratio <= " + num(kRatio) + " at the largest n)";
  return out;
}

// ---------------------------------------------------------------------------
// 7. The finite-n regularity diagnostics move the right way along the grid,
//    and the training log-residual positivity condition holds every time.

Outcome check_diagnostic_trajectories(const Artifacts& model_false,
                                      const Artifacts& model_true) {
  Outcome out{7, "diagnostic trajectories", false, "", 0.0};
  Stopwatch watch;

  std::string detail;
  bool pass = true;

  auto pull = [](const Artifacts& art,
                 const std::function<double(const ConditionReport&)>& f) {
    std::vector<double> v;
    for (const GridResult& g : art.report.per_n) v.push_back(f(g.conditions));
    return v;
  };
  auto check_seq = [&](const char* label, const std::vector<double>& v) {
    const bool ok = strictly_decreasing(v);
    if (!ok) {
      pass = false;
      detail += std::string(detail.empty() ? "" : "; ") + label + " " + seq(v) +
                " NOT decreasing";
    }
  };

  // No correct candidate: risk sums and ratios over the whole space.
  check_seq("inv-risk sum", pull(model_false, [](const ConditionReport& c) {
              return c.sum_inv_risk_all.value_or(std::nan(""));
            }));
  check_seq("dim-lambda/min-risk", pull(model_false, [](const ConditionReport& c) {
              return c.dim_lambda_over_min_risk_all.value_or(std::nan(""));
            }));
  check_seq("alignment/risk", pull(model_false, [](const ConditionReport& c) {
              return c.max_mean_ain_over_risk.value_or(std::nan(""));
            }));
  check_seq("mean-square truth (no correct candidate)",
            pull(model_false, [](const ConditionReport& c) {
              return c.mean_sq_mu.value_or(std::nan(""));
            }));

  // Correct candidate present: the same quantities restricted to the
  // incorrect set, plus the alignment spread over the correct set.
  check_seq("incorrect inv-risk sum", pull(model_true, [](const ConditionReport& c) {
              return c.sum_inv_risk_incorrect.value_or(std::nan(""));
            }));
  check_seq("incorrect dim-lambda/min-risk",
            pull(model_true, [](const ConditionReport& c) {
              return c.dim_lambda_over_min_risk_incorrect.value_or(std::nan(""));
            }));
  check_seq("correct-set alignment", pull(model_true, [](const ConditionReport& c) {
              return c.max_mean_ain_over_dim_lambda_correct.value_or(std::nan(""));
            }));
  check_seq("mean-square truth (correct candidate)",
            pull(model_true, [](const ConditionReport& c) {
              return c.mean_sq_mu.value_or(std::nan(""));
            }));

  // Positivity of the training log-residual sums, every replication.
  for (const auto* art : {&model_false, &model_true}) {
    for (const GridResult& g : art->report.per_n) {
      if (g.train_logrss_positive_freq != 1.0) {
        pass = false;
        detail += std::string(detail.empty() ? "" : "; ") +
                  "log-residual positivity frequency " +
                  num(g.train_logrss_positive_freq) + " at n=" + std::to_string(g.n);
      }
    }
  }

  out.seconds = watch.seconds();
  out.pass = pass;
  out.detail = pass ? "all trajectories decreasing; positivity frequency 1 everywhere"
                    : detail;
  return out;
}

// ---------------------------------------------------------------------------
// 8. Reports are byte-identical across reruns and thread counts.

Outcome check_determinism(const ExperimentConfig& cfg_false,
                          const Artifacts& base_false,
                          const ExperimentConfig& cfg_true,
                          const Artifacts& base_true) {
  Outcome out{8, "byte-identical reports across reruns and threads", false, "", 0.0};
  Stopwatch watch;

  bool pass = true;
  std::string detail;
  auto compare = [&](const char* label, const Artifacts& base,
                     const ExperimentConfig& cfg) {
    const Artifacts one_a = run_artifacts(cfg, 1);
    const Artifacts one_b = run_artifacts(cfg, 1);
    const bool ok = one_a.json == one_b.json && one_a.json == base.json &&
                    one_a.reps_csv == one_b.reps_csv &&
                    one_a.reps_csv == base.reps_csv &&
                    one_a.summary_csv == one_b.summary_csv &&
                    one_a.summary_csv == base.summary_csv;
    if (!ok) {
      pass = false;
      detail += std::string(detail.empty() ? "" : "; ") + label + " differs";
    }
  };
  compare("no-correct-candidate config", base_false, cfg_false);
  compare("correct-candidate config", base_true, cfg_true);

  out.seconds = watch.seconds();
  out.pass = pass;
  out.detail = pass ? "json + csv artifacts identical for threads {1,1,8}" : detail;
  return out;
}

// ---------------------------------------------------------------------------
// 9. Selection and the loss oracle agree with brute-force reimplementations.

Outcome check_brute_force_agreement() {
  Outcome out{9, "brute-force selection agreement", false, "", 0.0};
  Stopwatch watch;

  Rng rng(60221);
  int mismatches = 0;
  constexpr int kInstances = 30;

  for (int inst = 0; inst < kInstances; ++inst) {
    const int p = 4;
    const int r = 2 + inst % 3;
    const int t = p + 2 + static_cast<int>(rng.uniform01() * 7);
    const int n = r * t;
    const Matrix x = random_design(rng, n, p);
    Vector mu(n), e(n);
    for (int i = 0; i < n; ++i) {
      const double ti = static_cast<double>(i + 1) / n;
      mu[i] = std::sin(3.0 * ti) + 0.3 * rng.normal();
      e[i] = rng.normal();
    }
    const Vector y = mu + e;
    const TruthSpec truth{mu, 1.0};
    const TrainingScheme scheme = disjoint_scheme(
        n, t, inst % 2 == 0 ? BlockLayout::strided : BlockLayout::consecutive);
    const ModelSpace space = all_subsets_space(p);  // 15 candidate models

    const ts::Mat xd = ts::from_eigen(x);
    const ts::Vec yd = ts::from_eigen(y);
    const ts::Vec mud = ts::from_eigen(mu);
    ts::SchemeRows rows;
    rows.n = n;
    for (const IndexList& s : scheme.samples) {
      rows.samples.emplace_back(s.begin(), s.end());
    }

    std::vector<double> brute_known, brute_unknown, brute_loss;
    for (const ModelAlpha& alpha : space.models) {
      const std::vector<int> cols(alpha.columns.begin(), alpha.columns.end());
      brute_known.push_back(ts::criterion_known(xd, yd, cols, rows, 1.3));
      brute_unknown.push_back(ts::criterion_unknown(xd, yd, cols, rows));
      brute_loss.push_back(ts::loss_direct(xd, yd, cols, mud));
    }

    const SelectionReport sel_known =
        select_model(space, x, y, scheme, Variant::known_sigma, 1.3);
    const SelectionReport sel_unknown =
        select_model(space, x, y, scheme, Variant::unknown_sigma);
    const OracleResult orc = oracle_model(space, x, y, truth);

    const int bk = straight_line_argmin(brute_known, space.models);
    const int bu = straight_line_argmin(brute_unknown, space.models);
    const int bl = straight_line_argmin(brute_loss, space.models);

    if (sel_known.selected.columns != space.models[static_cast<std::size_t>(bk)].columns)
      ++mismatches;
    if (sel_unknown.selected.columns !=
        space.models[static_cast<std::size_t>(bu)].columns)
      ++mismatches;
    if (orc.alpha.columns != space.models[static_cast<std::size_t>(bl)].columns)
      ++mismatches;
  }

  out.seconds = watch.seconds();
  out.pass = mismatches == 0;
  out.detail = std::to_string(mismatches) + " mismatches over " +
               std::to_string(kInstances) + " instances x 3 selectors";
  return out;
}

}  // namespace

int main() {
  std::vector<Outcome> results;
  auto guard = [&](const std::function<Outcome()>& fn, int id, const char* name) {
    try {
      results.push_back(fn());
    } catch (const std::exception& ex) {
      results.push_back(Outcome{id, name, false, std::string("exception: ") + ex.what(),
                                0.0});
    }
  };

  guard(check_criterion_equivalence, 1, "known-variance criterion equivalence");
  guard(check_predictive_quadrature, 2, "predictive density vs quadrature");
  guard(check_algebraic_identities, 3, "algebraic identities");
  guard(check_reference_scale_invariance, 4, "reference-scale shift and argmin invariance");

  // Shared Monte Carlo runs for checks 5-8.
  const ExperimentConfig cfg_known = oracle_ratio_config(Variant::known_sigma);
  const ExperimentConfig cfg_unknown = oracle_ratio_config(Variant::unknown_sigma);
  const ExperimentConfig cfg_true = consistency_config();

  try {
    Stopwatch ratio_watch;
    const Artifacts art_known = run_artifacts(cfg_known, 8);
    const Artifacts art_unknown = run_artifacts(cfg_unknown, 8);
    const double ratio_seconds = ratio_watch.seconds();

    Stopwatch cons_watch;
    const Artifacts art_true = run_artifacts(cfg_true, 8);
    const double cons_seconds = cons_watch.seconds();

    results.push_back(check_oracle_ratio(art_known, art_unknown, ratio_seconds));
    results.push_back(check_consistency(art_true, cons_seconds));
    guard([&] { return check_diagnostic_trajectories(art_unknown, art_true); }, 7,
          "diagnostic trajectories");
    guard([&] { return check_determinism(cfg_known, art_known, cfg_true, art_true); }, 8,
          "byte-identical reports across reruns and threads");
  } catch (const std::exception& ex) {
    for (int id = 5; id <= 8; ++id) {
      results.push_back(Outcome{id, "monte carlo harness", false,
                                std::string("exception: ") + ex.what(), 0.0});
    }
  }

  guard(check_brute_force_agreement, 9, "brute-force selection agreement");

  std::sort(results.begin(), results.end(),
            [](const Outcome& a, const Outcome& b) { return a.id < b.id; });

  int failures = 0;
  for (const Outcome& r : results) {
    if (!r.pass) ++failures;
    std::printf("[%s] %d %s: %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.detail.c_str(), r.seconds);
  }
  std::printf("%d of %zu checks passed\n", static_cast<int>(results.size()) - failures,
              results.size());
  return failures;
}
