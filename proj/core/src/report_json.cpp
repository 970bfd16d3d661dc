#include "report_json.hpp"

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "cvsel/commands.hpp"
#include "cvsel/errors.hpp"
#include "cvsel/io.hpp"

#ifndef CVSEL_VERSION
#define CVSEL_VERSION "0.0.0"
#endif

namespace cvsel {

namespace {

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
Json opt_json(const std::optional<bool>& v) { return v ? Json(*v) : Json(nullptr); }

Json columns_json(const ModelAlpha& alpha) { return Json(alpha.columns); }

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + (path.empty() ? std::string("(top level)") : path) +
                    ": " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void expect_object(const Json& j, const std::string& path,
                   std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail(join(path, it.key()), "unknown field");
  }
}

const Json* find(const Json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void read_int(const Json& obj, const std::string& path, const char* key, int& out) {
  if (const Json* v = find(obj, key)) {
    if (!v->is_number_integer()) fail(join(path, key), "expected an integer");
    out = v->get<int>();
  }
}

void read_u64(const Json& obj, const std::string& path, const char* key,
              std::uint64_t& out) {
  if (const Json* v = find(obj, key)) {
    if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() &&
                                    v->get<std::int64_t>() < 0)) {
      fail(join(path, key), "expected a nonnegative integer");
    }
    out = v->get<std::uint64_t>();
  }
}

void read_double(const Json& obj, const std::string& path, const char* key, double& out) {
  if (const Json* v = find(obj, key)) {
    if (!v->is_number()) fail(join(path, key), "expected a number");
    out = v->get<double>();
  }
}

void read_bool(const Json& obj, const std::string& path, const char* key, bool& out) {
  if (const Json* v = find(obj, key)) {
    if (!v->is_boolean()) fail(join(path, key), "expected true or false");
    out = v->get<bool>();
  }
}

void read_string(const Json& obj, const std::string& path, const char* key,
                 std::string& out) {
  if (const Json* v = find(obj, key)) {
    if (!v->is_string()) fail(join(path, key), "expected a string");
    out = v->get<std::string>();
  }
}

std::vector<int> int_array(const Json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of integers");
  std::vector<int> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer()) {
      fail(path + "[" + std::to_string(i) + "]", "expected an integer");
    }
    out.push_back(v[i].get<int>());
  }
  return out;
}

std::vector<double> double_array(const Json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      fail(path + "[" + std::to_string(i) + "]", "expected a number");
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::string space_kind_name(SpaceSpec::Kind k) {
  switch (k) {
    case SpaceSpec::Kind::nested: return "nested";
    case SpaceSpec::Kind::all_subsets: return "all-subsets";
    case SpaceSpec::Kind::explicit_list: return "explicit";
  }
  return "nested";
}

SpaceSpec::Kind parse_space_kind(const std::string& name, const std::string& path) {
  if (name == "nested") return SpaceSpec::Kind::nested;
  if (name == "all-subsets") return SpaceSpec::Kind::all_subsets;
  if (name == "explicit") return SpaceSpec::Kind::explicit_list;
  fail(path, "expected \"nested\", \"all-subsets\", or \"explicit\"");
}

std::string layout_name(BlockLayout l) {
  return l == BlockLayout::consecutive ? "consecutive" : "strided";
}

BlockLayout parse_layout(const std::string& name, const std::string& path) {
  if (name == "consecutive") return BlockLayout::consecutive;
  if (name == "strided") return BlockLayout::strided;
  fail(path, "expected \"consecutive\" or \"strided\"");
}

Json grid_result_json(const GridResult& g) {
  Json o;
  o["n"] = g.n;
  o["train_size"] = g.train_size;
  o["r"] = g.r;
  o["coverage"] = g.coverage;
  o["lambda"] = g.lambda;
  o["failures"] = g.failures;
  o["ratio_q10"] = g.ratio_q10;
  o["ratio_q50"] = g.ratio_q50;
  o["ratio_q90"] = g.ratio_q90;
  o["correct_frequency"] = opt_json(g.correct_frequency);
  o["train_logrss_positive_freq"] = g.train_logrss_positive_freq;
  o["max_quad_gap"] = g.max_quad_gap;
  o["max_cross_ratio"] = g.max_cross_ratio;
  o["max_loss_risk_gap"] = g.max_loss_risk_gap;
  o["max_train_bias_ratio"] = opt_json(g.max_train_bias_ratio);
  o["train_bias_bound"] = g.train_bias_bound;
  o["conditions"] = condition_report_json(g.conditions);
  return o;
}

Json rep_result_json(const RepResult& r) {
  Json o;
  o["n"] = r.n;
  o["rep"] = r.rep;
  o["failed"] = r.failed;
  o["error"] = r.error;
  o["selected"] = r.failed ? Json(nullptr) : columns_json(r.selected);
  o["oracle"] = r.failed ? Json(nullptr) : columns_json(r.oracle);
  o["loss_selected"] = r.failed ? Json(nullptr) : Json(r.loss_selected);
  o["loss_oracle"] = r.failed ? Json(nullptr) : Json(r.loss_oracle);
  o["ratio"] = r.failed ? Json(nullptr) : Json(r.ratio);
  o["correct_selected"] = r.failed ? Json(nullptr) : opt_json(r.correct_selected);
  o["train_logrss_positive"] = r.failed ? Json(nullptr) : Json(r.train_logrss_positive);
  if (!r.failed) {
    Json u;
    u["max_quad_gap"] = r.uniform.max_quad_gap;
    u["max_cross_ratio"] = r.uniform.max_cross_ratio;
    u["max_loss_risk_gap"] = r.uniform.max_loss_risk_gap;
    u["max_train_bias_ratio"] = opt_json(r.uniform.max_train_bias_ratio);
    u["train_bias_bound"] = r.uniform.train_bias_bound;
    o["uniform"] = u;
  } else {
    o["uniform"] = Json(nullptr);
  }
  return o;
}

}  // namespace

std::string tool_version() { return CVSEL_VERSION; }

Json tool_json() {
  Json t;
  t["name"] = "cvselect";
  t["version"] = tool_version();
  return t;
}

std::string variant_name(Variant v) {
  return v == Variant::known_sigma ? "known-sigma" : "unknown-sigma";
}

Variant parse_variant(const std::string& name, const std::string& path) {
  if (name == "known-sigma") return Variant::known_sigma;
  if (name == "unknown-sigma") return Variant::unknown_sigma;
  fail(path, "expected \"known-sigma\" or \"unknown-sigma\"");
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json selection_report_json(const SelectionReport& report) {
  Json j;
  j["variant"] = variant_name(report.variant);
  j["sigma2"] = opt_json(report.sigma2);
  Json models = Json::array();
  for (const CriterionValue& v : report.values) {
    Json m;
    m["columns"] = columns_json(v.alpha);
    m["dim"] = v.alpha.dim();
    m["value"] = v.value;
    m["term_full"] = v.term_full;
    m["term_train"] = v.term_train;
    m["term_det"] = v.term_det;
    m["cv_mean"] = opt_json(v.cv_mean);
    m["cv_mean_exact"] = opt_json(v.cv_mean_exact);
    models.push_back(std::move(m));
  }
  j["models"] = std::move(models);
  Json failed = Json::array();
  for (const auto& [alpha, why] : report.failed) {
    Json f;
    f["columns"] = columns_json(alpha);
    f["error"] = why;
    failed.push_back(std::move(f));
  }
  j["failed"] = std::move(failed);
  Json sel;
  sel["columns"] = columns_json(report.selected);
  sel["dim"] = report.selected.dim();
  j["selected"] = std::move(sel);
  j["selected_index"] = report.selected_index;
  j["tie_broken"] = report.tie_broken;
  return j;
}

Json condition_report_json(const ConditionReport& c) {
  Json j;
  j["m"] = c.m;
  j["n"] = c.n;
  j["train_size"] = c.train_size;
  j["max_dim"] = c.max_dim;
  j["lambda"] = c.lambda;
  j["mean_ain"] = c.mean_ain;
  j["max_abs_mean_ain_over_n"] = c.max_abs_mean_ain_over_n;
  j["train_frac_log_n"] = c.train_frac_log_n;
  j["dim_lambda_over_n"] = c.dim_lambda_over_n;
  j["has_truth"] = c.has_truth;
  if (c.has_truth) {
    j["n_correct"] = c.n_correct;
    j["alpha_c"] = c.alpha_c ? columns_json(*c.alpha_c) : Json(nullptr);
    j["sum_inv_risk_all"] = opt_json(c.sum_inv_risk_all);
    j["sum_inv_risk_incorrect"] = opt_json(c.sum_inv_risk_incorrect);
    j["dim_lambda_over_min_risk_all"] = opt_json(c.dim_lambda_over_min_risk_all);
    j["dim_lambda_over_min_risk_incorrect"] = opt_json(c.dim_lambda_over_min_risk_incorrect);
    j["max_mean_ain_over_risk"] = opt_json(c.max_mean_ain_over_risk);
    j["max_mean_ain_over_dim_lambda_correct"] =
        opt_json(c.max_mean_ain_over_dim_lambda_correct);
    j["ain_gap_ratio_correct"] = opt_json(c.ain_gap_ratio_correct);
    j["min_bias"] = opt_json(c.min_bias);
    j["mean_sq_mu"] = opt_json(c.mean_sq_mu);
    j["sum_inv_dim_correct"] = opt_json(c.sum_inv_dim_correct);
    j["sum_inv_lambda_dim_gap_correct"] = opt_json(c.sum_inv_lambda_dim_gap_correct);
  }
  j["annotations"] = c.annotations;
  return j;
}

Json experiment_config_json(const ExperimentConfig& c) {
  Json j;
  j["n_grid"] = c.n_grid;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  j["variant"] = variant_name(c.variant);
  j["diagnostics_m"] = c.diagnostics_m;

  Json design;
  design["id"] = c.design.id;
  design["p"] = c.design.p;
  j["design"] = std::move(design);

  Json truth;
  truth["id"] = c.truth.id;
  truth["alpha_star"] = Json(c.truth.alpha_star.columns);
  truth["beta_star"] = c.truth.beta_star;
  truth["g"] = c.truth.g;
  truth["scale"] = c.truth.scale;
  truth["freq"] = c.truth.freq;
  j["truth"] = std::move(truth);

  Json errors;
  errors["dist"] = c.errors.dist;
  errors["sigma"] = c.errors.sigma;
  j["errors"] = std::move(errors);

  Json scheme;
  scheme["kind"] = c.scheme.kind;
  scheme["layout"] = layout_name(c.scheme.layout);
  scheme["rotation_r"] = c.scheme.rotation_r;
  j["scheme"] = std::move(scheme);

  Json rule;
  rule["kind"] = c.train_rule.kind;
  rule["c"] = c.train_rule.c;
  rule["gamma"] = c.train_rule.gamma;
  rule["fraction"] = c.train_rule.fraction;
  rule["fixed"] = c.train_rule.fixed;
  rule["round_to_divisor"] = c.train_rule.round_to_divisor;
  j["train_rule"] = std::move(rule);

  Json space;
  space["kind"] = space_kind_name(c.space.kind);
  space["max_size"] = c.space.max_size;
  Json models = Json::array();
  for (const ModelAlpha& alpha : c.space.models) models.push_back(columns_json(alpha));
  space["models"] = std::move(models);
  j["space"] = std::move(space);

  return j;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  ExperimentConfig c;
  expect_object(j, "", {"n_grid", "replications", "seed", "variant", "diagnostics_m",
                        "design", "truth", "errors", "scheme", "train_rule", "space"});

  const Json* grid = find(j, "n_grid");
  if (!grid) fail("n_grid", "required field is missing");
  c.n_grid = int_array(*grid, "n_grid");

  read_int(j, "", "replications", c.replications);
  read_u64(j, "", "seed", c.seed);
  if (const Json* v = find(j, "variant")) {
    if (!v->is_string()) fail("variant", "expected a string");
    c.variant = parse_variant(v->get<std::string>(), "variant");
  }
  read_int(j, "", "diagnostics_m", c.diagnostics_m);

  if (const Json* d = find(j, "design")) {
    expect_object(*d, "design", {"id", "p"});
    read_string(*d, "design", "id", c.design.id);
    read_int(*d, "design", "p", c.design.p);
  }

  if (const Json* t = find(j, "truth")) {
    expect_object(*t, "truth", {"id", "alpha_star", "beta_star", "g", "scale", "freq"});
    read_string(*t, "truth", "id", c.truth.id);
    if (const Json* a = find(*t, "alpha_star")) {
      c.truth.alpha_star.columns = int_array(*a, "truth.alpha_star");
    }
    if (const Json* b = find(*t, "beta_star")) {
      c.truth.beta_star = double_array(*b, "truth.beta_star");
    }
    read_string(*t, "truth", "g", c.truth.g);
    read_double(*t, "truth", "scale", c.truth.scale);
    read_double(*t, "truth", "freq", c.truth.freq);
  }

  if (const Json* e = find(j, "errors")) {
    expect_object(*e, "errors", {"dist", "sigma"});
    read_string(*e, "errors", "dist", c.errors.dist);
    read_double(*e, "errors", "sigma", c.errors.sigma);
  }

  if (const Json* s = find(j, "scheme")) {
    expect_object(*s, "scheme", {"kind", "layout", "rotation_r"});
    read_string(*s, "scheme", "kind", c.scheme.kind);
    if (const Json* l = find(*s, "layout")) {
      if (!l->is_string()) fail("scheme.layout", "expected a string");
      c.scheme.layout = parse_layout(l->get<std::string>(), "scheme.layout");
    }
    read_int(*s, "scheme", "rotation_r", c.scheme.rotation_r);
  }

  if (const Json* r = find(j, "train_rule")) {
    expect_object(*r, "train_rule",
                  {"kind", "c", "gamma", "fraction", "fixed", "round_to_divisor"});
    read_string(*r, "train_rule", "kind", c.train_rule.kind);
    read_double(*r, "train_rule", "c", c.train_rule.c);
    read_double(*r, "train_rule", "gamma", c.train_rule.gamma);
    read_double(*r, "train_rule", "fraction", c.train_rule.fraction);
    read_int(*r, "train_rule", "fixed", c.train_rule.fixed);
    read_bool(*r, "train_rule", "round_to_divisor", c.train_rule.round_to_divisor);
  }

  if (const Json* s = find(j, "space")) {
    expect_object(*s, "space", {"kind", "max_size", "models"});
    if (const Json* k = find(*s, "kind")) {
      if (!k->is_string()) fail("space.kind", "expected a string");
      c.space.kind = parse_space_kind(k->get<std::string>(), "space.kind");
    }
    read_int(*s, "space", "max_size", c.space.max_size);
    if (const Json* m = find(*s, "models")) {
      if (!m->is_array()) fail("space.models", "expected an array of column arrays");
      for (std::size_t i = 0; i < m->size(); ++i) {
        ModelAlpha alpha;
        alpha.columns = int_array((*m)[i], "space.models[" + std::to_string(i) + "]");
        c.space.models.push_back(std::move(alpha));
      }
    }
  }

  return c;
}

Json experiment_report_json_obj(const ExperimentReport& report) {
  Json j;
  j["schema_version"] = 1;
  j["tool"] = tool_json();
  j["kind"] = "experiment";
  j["config"] = experiment_config_json(report.config);
  Json per_n = Json::array();
  for (const GridResult& g : report.per_n) per_n.push_back(grid_result_json(g));
  j["per_n"] = std::move(per_n);
  Json reps = Json::array();
  for (const RepResult& r : report.reps) reps.push_back(rep_result_json(r));
  j["replications"] = std::move(reps);
  j["notes"] = report.notes;
  return j;
}

std::string experiment_report_json(const ExperimentReport& report) {
  return dump_json(experiment_report_json_obj(report));
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  return experiment_config_from_json(j);
}

namespace {

std::string model_label(const ModelAlpha& alpha) {
  std::string s;
  for (std::size_t i = 0; i < alpha.columns.size(); ++i) {
    if (i) s += '+';
    s += std::to_string(alpha.columns[i]);
  }
  return s.empty() ? "none" : s;
}

constexpr const char* kNa = "NA";

}  // namespace

std::string experiment_reps_csv(const ExperimentReport& report) {
  std::string out = "n,rep,ratio,selected,oracle,correct_selected\n";
  for (const RepResult& r : report.reps) {
    out += std::to_string(r.n);
    out += ',';
    out += std::to_string(r.rep);
    out += ',';
    if (r.failed) {
      out += kNa;
      out += ',';
      out += kNa;
      out += ',';
      out += kNa;
      out += ',';
      out += kNa;
    } else {
      out += format_double(r.ratio);
      out += ',';
      out += model_label(r.selected);
      out += ',';
      out += model_label(r.oracle);
      out += ',';
      out += r.correct_selected ? (*r.correct_selected ? "1" : "0") : kNa;
    }
    out += '\n';
  }
  return out;
}

std::string experiment_summary_csv(const ExperimentReport& report) {
  std::string out =
      "n,train_size,r,coverage,lambda,ratio_q10,ratio_q50,ratio_q90,frequency,"
      "failures,train_logrss_positive_freq\n";
  for (const GridResult& g : report.per_n) {
    out += std::to_string(g.n);
    out += ',';
    out += std::to_string(g.train_size);
    out += ',';
    out += std::to_string(g.r);
    out += ',';
    out += std::to_string(g.coverage);
    out += ',';
    out += format_double(g.lambda);
    out += ',';
    out += format_double(g.ratio_q10);
    out += ',';
    out += format_double(g.ratio_q50);
    out += ',';
    out += format_double(g.ratio_q90);
    out += ',';
    out += g.correct_frequency ? format_double(*g.correct_frequency) : kNa;
    out += ',';
    out += std::to_string(g.failures);
    out += ',';
    out += format_double(g.train_logrss_positive_freq);
    out += '\n';
  }
  return out;
}

}  // namespace cvsel
