#include "amkl/runconfig.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "amkl/errors.hpp"
#include "amkl/numfmt.hpp"
#include "amkl/synthetic.hpp"
#include "amkl/toy_oracles.hpp"

namespace amkl {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& scope) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(scope.empty() ? key : scope + "." + key, "unknown field");
    }
  }
}

double get_number(const json& obj, const std::string& scope, const std::string& key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) {
    throw ConfigError(scope.empty() ? key : scope + "." + key, "expected a number");
  }
  return obj.at(key).get<double>();
}

Regularizer parse_regularizer(const json& node, const std::string& field) {
  if (!node.is_object()) throw ConfigError(field, "expected an object with 'kind'");
  reject_unknown_keys(node, {"kind", "lambda"}, field);
  const std::string kind = node.value("kind", "none");
  const double lambda = get_number(node, field, "lambda", 0.0);
  if (lambda < 0.0) throw ConfigError(field + ".lambda", "must be >= 0");
  if (kind == "none") return Regularizer::none();
  if (kind == "squared_frobenius") return Regularizer::squared_frobenius(lambda);
  if (kind == "ell1") return Regularizer::ell1(lambda);
  throw ConfigError(field + ".kind", "unknown regularizer '" + kind + "'");
}

std::vector<Regularizer> parse_regularizer_list(const json& obj, const std::string& key,
                                                int depth) {
  if (!obj.contains(key)) return std::vector<Regularizer>(depth, Regularizer::none());
  const json& node = obj.at(key);
  if (node.is_array()) {
    if (node.size() != static_cast<std::size_t>(depth)) {
      throw ConfigError(key, "expected one entry per layer");
    }
    std::vector<Regularizer> regs;
    for (std::size_t i = 0; i < node.size(); ++i) {
      regs.push_back(parse_regularizer(node[i], key + "[" + std::to_string(i) + "]"));
    }
    return regs;
  }
  return std::vector<Regularizer>(depth, parse_regularizer(node, key));
}

std::vector<double> parse_per_layer(const json& obj, const std::string& scope,
                                    const std::string& key, int depth, double fallback) {
  const std::string field = scope + "." + key;
  if (!obj.contains(key)) return std::vector<double>(depth, fallback);
  const json& node = obj.at(key);
  if (node.is_number()) return std::vector<double>(depth, node.get<double>());
  if (node.is_array()) {
    if (node.size() != static_cast<std::size_t>(depth)) {
      throw ConfigError(field, "expected one entry per layer");
    }
    std::vector<double> values;
    for (const auto& v : node) {
      if (!v.is_number()) throw ConfigError(field, "expected numbers");
      values.push_back(v.get<double>());
    }
    return values;
  }
  throw ConfigError(field, "expected a number or an array");
}

// Canonical echo of the resolved configuration: sorted keys, every default
// made explicit. Input to the digest and stored in the manifest.
json canonical_config(const RunConfig& cfg) {
  json c;
  c["form"] = split_form_name(cfg.form);
  c["solver"] = solver_kind_name(cfg.solver);
  c["dims"] = cfg.spec.dims;
  json acts = json::array();
  for (auto a : cfg.spec.activations) acts.push_back(activation_name(a));
  c["activations"] = acts;
  c["loss"] = loss_name(cfg.spec.loss);
  auto regs = [](const std::vector<Regularizer>& list) {
    json arr = json::array();
    for (const auto& r : list) arr.push_back(regularizer_describe(r));
    return arr;
  };
  c["weight_reg"] = regs(cfg.spec.weight_reg);
  c["state_reg"] = regs(cfg.spec.state_reg);
  c["hyper"] = {{"gamma", cfg.hyper.gamma},
                {"lambda", cfg.hyper.lambda},
                {"beta", cfg.hyper.beta},
                {"xi", cfg.hyper.xi},
                {"epsilon", cfg.hyper.epsilon}};
  c["solver_config"] = {{"max_iter", cfg.solver_config.max_iter},
                        {"prox_alpha", cfg.solver_config.prox_alpha},
                        {"backtrack_factor", cfg.solver_config.backtrack_factor},
                        {"stop_dist_tol", cfg.solver_config.stop_dist_tol},
                        {"record_block_diffs", cfg.solver_config.record_block_diffs},
                        {"forward_order", cfg.solver_config.forward_order}};
  c["data"] = {{"source", cfg.source == DataSource::synthetic ? "synthetic" : "csv"},
               {"n", cfg.n},
               {"noise", cfg.noise},
               {"csv", cfg.csv_path}};
  c["seed"] = cfg.seed;
  return c;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError("config", std::string("not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config", "expected a JSON object");
  reject_unknown_keys(root,
                      {"form", "solver", "dims", "activations", "loss", "weight_reg",
                       "state_reg", "hyper", "solver_config", "data", "seed", "out"},
                      "");

  RunConfig cfg;
  if (!root.contains("form")) throw ConfigError("form", "required");
  if (!root.contains("solver")) throw ConfigError("solver", "required");
  if (!root.contains("dims")) throw ConfigError("dims", "required");
  cfg.form = split_form_from_name(root.at("form").get<std::string>());
  cfg.solver = solver_kind_from_name(root.at("solver").get<std::string>());
  if (form_for(cfg.solver) != cfg.form) {
    throw ConfigError("form", std::string("solver ") + solver_kind_name(cfg.solver) +
                                  " minimizes " + split_form_name(form_for(cfg.solver)));
  }

  if (!root.at("dims").is_array() || root.at("dims").size() < 2) {
    throw ConfigError("dims", "expected an array of at least two widths");
  }
  std::vector<int> dims;
  for (const auto& d : root.at("dims")) {
    if (!d.is_number_integer() || d.get<int>() <= 0) {
      throw ConfigError("dims", "widths must be positive integers");
    }
    dims.push_back(d.get<int>());
  }
  const int depth = static_cast<int>(dims.size()) - 1;

  cfg.spec.depth = depth;
  cfg.spec.dims = dims;
  cfg.spec.activations.assign(depth, ActivationKind::tanh);
  cfg.spec.activations.back() = ActivationKind::identity;
  if (root.contains("activations")) {
    const json& acts = root.at("activations");
    if (!acts.is_array() || acts.size() != static_cast<std::size_t>(depth)) {
      throw ConfigError("activations", "expected one name per layer");
    }
    for (int i = 0; i < depth; ++i) {
      cfg.spec.activations[i] = activation_from_name(acts[i].get<std::string>());
    }
  }
  cfg.spec.loss = root.contains("loss") ? loss_from_name(root.at("loss").get<std::string>())
                                        : LossKind::half_squared;
  cfg.spec.weight_reg = parse_regularizer_list(root, "weight_reg", depth);
  cfg.spec.state_reg = parse_regularizer_list(root, "state_reg", depth);

  const json hyper = root.value("hyper", json::object());
  reject_unknown_keys(hyper, {"gamma", "lambda", "beta", "xi", "epsilon"}, "hyper");
  cfg.hyper.gamma = get_number(hyper, "hyper", "gamma", 1.0);
  cfg.hyper.lambda = get_number(hyper, "hyper", "lambda", 0.0);
  cfg.hyper.beta = parse_per_layer(hyper, "hyper", "beta", depth, 1.0);
  cfg.hyper.xi = parse_per_layer(hyper, "hyper", "xi", depth, 1.0);
  cfg.hyper.epsilon = get_number(hyper, "hyper", "epsilon", 0.01);

  const json sc = root.value("solver_config", json::object());
  reject_unknown_keys(sc,
                      {"max_iter", "prox_alpha", "backtrack_factor", "stop_dist_tol",
                       "record_block_diffs", "forward_order"},
                      "solver_config");
  cfg.solver_config.kind = cfg.solver;
  cfg.solver_config.max_iter = static_cast<int>(get_number(sc, "solver_config", "max_iter", 1000));
  cfg.solver_config.prox_alpha = get_number(sc, "solver_config", "prox_alpha", 1.0);
  cfg.solver_config.backtrack_factor =
      get_number(sc, "solver_config", "backtrack_factor", 0.5);
  cfg.solver_config.stop_dist_tol = get_number(sc, "solver_config", "stop_dist_tol", 1e-8);
  cfg.solver_config.record_block_diffs = sc.value("record_block_diffs", true);
  cfg.solver_config.forward_order = sc.value("forward_order", false);

  const json data = root.value("data", json::object());
  reject_unknown_keys(data, {"source", "n", "noise", "csv"}, "data");
  const std::string source = data.value("source", "synthetic");
  if (source == "synthetic") {
    cfg.source = DataSource::synthetic;
  } else if (source == "csv") {
    cfg.source = DataSource::csv;
    if (!data.contains("csv")) throw ConfigError("data.csv", "required for source csv");
    cfg.csv_path = data.at("csv").get<std::string>();
  } else {
    throw ConfigError("data.source", "expected 'synthetic' or 'csv'");
  }
  cfg.n = static_cast<int>(get_number(data, "data", "n", 32));
  cfg.noise = get_number(data, "data", "noise", 0.0);
  if (cfg.n < 1) throw ConfigError("data.n", "must be >= 1");
  if (cfg.noise < 0.0) throw ConfigError("data.noise", "must be >= 0");

  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned() && !root.at("seed").is_number_integer()) {
      throw ConfigError("seed", "expected a nonnegative integer");
    }
    cfg.seed = root.at("seed").get<std::uint64_t>();
  }
  cfg.out_dir = root.value("out", "run");

  // Surface structural and range errors at parse time.
  cfg.spec.validate();
  validate_hyper(cfg.form, cfg.spec, cfg.hyper);
  cfg.solver_config.validate();
  cfg.canonical = canonical_config(cfg).dump();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot open " + path);
  std::stringstream buffer;
  buffer << is.rdbuf();
  return parse_run_config(buffer.str());
}

// ---------------------------------------------------------------------------
// Serialization of diagnostics
// ---------------------------------------------------------------------------

namespace {

// An absent bound is either "vacuous" (every index satisfied with zero
// distance, any constant works) or "undefined" (the certificate was refused);
// never a floating-point infinity.
ordered_json bound_to_json(const std::optional<double>& value, bool holds) {
  ordered_json j;
  if (value.has_value()) {
    j["kind"] = "finite";
    j["value"] = *value;
  } else {
    j["kind"] = holds ? "vacuous" : "undefined";
  }
  return j;
}

ordered_json certificate_to_json(const DecreaseCertificate& cert) {
  ordered_json j;
  j["j"] = cert.j;
  j["c1"] = bound_to_json(cert.c1_hat, cert.holds_after_k0);
  j["k0_hat"] = cert.k0_hat;
  j["violations"] = cert.violations;
  j["holds_after_k0"] = cert.holds_after_k0;
  return j;
}

ordered_json a2_to_json(const A2Certificate& cert) {
  ordered_json j;
  j["j"] = cert.j;
  j["alpha"] = cert.alpha;
  j["c2"] = bound_to_json(cert.c2_hat, cert.holds_after_k0);
  j["k0_hat"] = cert.k0_hat;
  j["violations"] = cert.violations;
  j["holds_after_k0"] = cert.holds_after_k0;
  return j;
}

ordered_json rate_to_json(const RateReport& report) {
  ordered_json j;
  j["regime"] = rate_regime_name(report.regime);
  if (report.eta_hat) j["eta_hat"] = *report.eta_hat;
  if (report.C_hat) j["C_hat"] = *report.C_hat;
  if (report.sublinear_exponent_hat) j["sublinear_exponent_hat"] = *report.sublinear_exponent_hat;
  if (report.theta_implied) j["theta_implied"] = *report.theta_implied;
  j["k1_hat"] = report.k1_hat;
  j["fit_residual"] = report.fit_residual;
  if (report.r1_hat) j["r1_hat"] = *report.r1_hat;
  return j;
}

ordered_json kl_estimate_to_json(const KlExponentEstimate& est) {
  ordered_json j;
  j["determined"] = est.determined;
  if (est.determined) {
    j["theta_hat"] = est.theta_hat;
    j["slope"] = est.slope;
    j["fit_residual"] = est.fit_residual;
  }
  j["points"] = est.points;
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << content;
}

void write_manifest(const std::string& dir, const ordered_json& manifest) {
  write_text_file(dir + "/manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_train(const std::string& config_path, const std::string& out_override,
              std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_run_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }
  if (!out_override.empty()) cfg.out_dir = out_override;

  try {
    RandomSource rng(cfg.seed);
    DataSet data;
    if (cfg.source == DataSource::synthetic) {
      const bool residual = cfg.form == SplitForm::three_split_resnet;
      data = generate_synthetic({cfg.spec, cfg.noise, cfg.n, residual}, rng).data;
    } else {
      data = load_dataset_csv(cfg.csv_path, cfg.spec.dims.front(), cfg.spec.dims.back());
    }
    ParamState init = initial_state(cfg.form, cfg.spec, data, cfg.hyper, rng);

    std::filesystem::create_directories(cfg.out_dir);
    const std::string trace_path = cfg.out_dir + "/trace.jsonl";
    std::ofstream trace_os(trace_path, std::ios::binary);
    if (!trace_os) throw std::runtime_error("cannot write " + trace_path);
    TraceSink sink = [&](const IterRecord& rec) { trace_os << trace_record_line(rec) << '\n'; };

    ordered_json manifest;
    manifest["type"] = "train";
    manifest["solver"] = solver_kind_name(cfg.solver);
    manifest["form"] = split_form_name(cfg.form);
    manifest["seed"] = cfg.seed;
    manifest["config_digest"] = config_digest(cfg.canonical);

    SolverResult result;
    try {
      result = run(cfg.spec, data, cfg.hyper, cfg.solver_config, std::move(init), sink);
      result.trace.seed = cfg.seed;
      result.trace.config_digest = config_digest(cfg.canonical);
    } catch (const DivergenceError& e) {
      trace_os.flush();
      manifest["termination"] = "divergence";
      manifest["error"] = e.what();
      const auto& partial = e.partial_trace().records;
      manifest["iterations"] = partial.empty() ? 0 : partial.back().k;
      manifest["config"] = json::parse(cfg.canonical);
      write_manifest(cfg.out_dir, manifest);
      err << "divergence: " << e.what() << "\n";
      return 2;
    }
    trace_os.flush();

    std::ostringstream state_text;
    for (BlockId id : blocks_of(cfg.form, cfg.spec.depth)) {
      state_text << "block " << block_name(cfg.form, id) << "\n";
      write_matrix_text(state_text, result.state.block(id));
    }
    write_text_file(cfg.out_dir + "/final_state.txt", state_text.str());

    const IterRecord& last = result.trace.records.back();
    manifest["termination"] = termination_name(result.termination);
    manifest["iterations"] = last.k;
    manifest["final_f"] = last.f;
    manifest["final_dist"] = last.dist;
    manifest["wall_nanos_total"] = last.wall_nanos;
    manifest["config"] = json::parse(cfg.canonical);
    write_manifest(cfg.out_dir, manifest);

    out << "run " << cfg.out_dir << ": " << termination_name(result.termination) << " after "
        << last.k << " cycles, f = " << format_g17(last.f) << ", dist = "
        << format_g17(last.dist) << "\n";
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_toy(double p, const std::string& iterator, double step, double bump, double x0,
            int steps, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  try {
    ToyIterator iter;
    if (iterator == "gradient_descent") {
      iter.kind = ToyIterKind::gradient_descent;
    } else if (iterator == "proximal_point") {
      iter.kind = ToyIterKind::proximal_point;
    } else if (iterator == "two_phase") {
      iter.kind = ToyIterKind::two_phase;
    } else {
      err << "config error: iterator: unknown iterator '" << iterator << "'\n";
      return 1;
    }
    iter.step = step;
    iter.bump = bump;
    const ToyProblem problem{p};
    const IterTrace trace = run_toy(problem, iter, x0, steps);
    const KLParams kl = analytic_kl_params(problem);

    std::filesystem::create_directories(out_dir);
    write_trace_file(out_dir + "/trace.jsonl", trace);

    ordered_json manifest;
    manifest["type"] = "toy";
    manifest["solver"] = "toy";
    manifest["form"] = "abs_pow";
    manifest["p"] = p;
    manifest["iterator"] = iterator;
    manifest["step"] = step;
    manifest["bump"] = bump;
    manifest["x0"] = x0;
    manifest["steps"] = steps;
    manifest["theta_analytic"] = kl.theta;
    manifest["kl_c"] = kl.c;
    manifest["fstar"] = kl.fstar;
    manifest["termination"] = "max_iter";
    manifest["iterations"] = trace.records.back().k;
    manifest["final_f"] = trace.records.back().f;
    manifest["final_dist"] = trace.records.back().dist;
    write_manifest(out_dir, manifest);

    out << "toy " << out_dir << ": p = " << format_g17(p) << ", theta = "
        << format_g17(kl.theta) << ", " << trace.records.size() << " records\n";
    return 0;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_diagnose(const std::string& trace_path, const DiagnoseOptions& options,
                 std::ostream& out, std::ostream& err) {
  IterTrace trace;
  try {
    trace = read_trace_file(trace_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    if (options.j < 1) throw std::invalid_argument("--j must be >= 1");
    if (trace.records.size() <= static_cast<std::size_t>(options.j)) {
      throw std::invalid_argument("trace too short for j = " + std::to_string(options.j));
    }
    const std::vector<double> f = trace.f_values();
    const std::vector<double> dist = trace.dist_values();

    double fstar;
    std::string fstar_source;
    if (options.fstar.has_value()) {
      fstar = *options.fstar;
      fstar_source = "flag";
      for (double v : f) {
        if (v < fstar) {
          throw std::invalid_argument("--fstar exceeds an observed objective value " +
                                      format_g17(v));
        }
      }
    } else {
      fstar = *std::min_element(f.begin(), f.end());
      fstar_source = "min_over_trace";  // biased proxy; pass --fstar when known
    }
    std::vector<double> gaps;
    gaps.reserve(f.size());
    for (double v : f) gaps.push_back(v - fstar);

    const DecreaseCertificate a1 = check_A1(f, dist, options.j);
    const RateReport rate = fit_rate(gaps, options.j);
    const KlExponentEstimate kl_est = estimate_kl_exponent(f, dist, fstar);

    ordered_json doc;
    doc["trace"] = trace_path;
    doc["j"] = options.j;
    doc["fstar"] = fstar;
    doc["fstar_source"] = fstar_source;
    doc["a1"] = certificate_to_json(a1);
    if (options.alpha.has_value()) {
      doc["a2"] = a2_to_json(check_A2(f, dist, options.j, *options.alpha));
    }
    doc["rate"] = rate_to_json(rate);
    doc["kl_exponent"] = kl_estimate_to_json(kl_est);
    if (options.theta.has_value()) {
      const EnvelopeCheck env = verify_envelope(gaps, options.j, *options.theta, 0);
      ordered_json ej;
      ej["theta"] = *options.theta;
      ej["holds"] = env.holds;
      ej["c_min"] = env.c_min;
      if (env.eta_used) ej["eta_used"] = *env.eta_used;
      doc["envelope"] = ej;
    }
    ordered_json chi = ordered_json::object();
    for (const auto& [name, diffs] : trace.diff_series()) {
      if (diffs.size() < 2) continue;
      const ChiReport rep = check_chi_ratio(diffs);
      ordered_json cj;
      cj["vacuous"] = rep.vacuous;
      if (!rep.vacuous) {
        cj["chi_hat"] = rep.chi_hat;
        cj["k0"] = rep.k0;
      }
      cj["skipped"] = rep.skipped;
      chi[name] = cj;
    }
    doc["chi"] = chi;

    std::string out_path = options.out;
    if (out_path.empty()) {
      const std::filesystem::path parent = std::filesystem::path(trace_path).parent_path();
      out_path = (parent.empty() ? std::filesystem::path(".") : parent) / "diagnosis.json";
    }
    write_text_file(out_path, doc.dump(2) + "\n");

    out << "diagnosis " << out_path << ": A1(j=" << options.j << ") "
        << (a1.holds_after_k0 ? "holds" : "fails") << " after k0 = " << a1.k0_hat
        << ", regime " << rate_regime_name(rate.regime) << "\n";
    return a1.holds_after_k0 ? 0 : 3;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

namespace {

std::string csv_number(const ordered_json& j, const char* key) {
  if (!j.contains(key)) return "";
  if (j.at(key).is_number_integer()) return std::to_string(j.at(key).get<std::int64_t>());
  return format_g17(j.at(key).get<double>());
}

std::string bound_to_csv(const ordered_json& j) {
  if (!j.is_object() || !j.contains("kind")) return "";
  if (j.at("kind") == "vacuous") return "vacuous";
  return format_g17(j.at("value").get<double>());
}

}  // namespace

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& csv_out,
               std::ostream& out, std::ostream& err) {
  if (run_dirs.empty()) {
    err << "config error: report needs at least one run directory\n";
    return 1;
  }
  const std::vector<std::string> header = {"run",     "solver",     "form",   "j",
                                           "c1_hat",  "regime",     "rate",   "theta_hat",
                                           "iterations", "final_f", "final_dist"};
  std::vector<std::vector<std::string>> rows;
  for (const std::string& dir : run_dirs) {
    ordered_json manifest;
    try {
      std::ifstream is(dir + "/manifest.json");
      if (!is) throw std::runtime_error("missing manifest.json");
      manifest = ordered_json::parse(is);
    } catch (const std::exception& e) {
      err << "warning: skipping " << dir << ": " << e.what() << "\n";
      continue;
    }
    std::vector<std::string> row(header.size());
    row[0] = std::filesystem::path(dir).filename().string();
    if (row[0].empty()) row[0] = dir;
    row[1] = manifest.value("solver", "");
    row[2] = manifest.value("form", "");
    row[8] = csv_number(manifest, "iterations");
    row[9] = csv_number(manifest, "final_f");
    row[10] = csv_number(manifest, "final_dist");

    ordered_json diag;
    bool have_diag = false;
    try {
      std::ifstream is(dir + "/diagnosis.json");
      if (!is) throw std::runtime_error("missing diagnosis.json");
      diag = ordered_json::parse(is);
      have_diag = true;
    } catch (const std::exception& e) {
      err << "warning: " << dir << " has no diagnosis, emitting blank fields: " << e.what()
          << "\n";
    }
    if (have_diag) {
      row[3] = csv_number(diag, "j");
      if (diag.contains("a1")) row[4] = bound_to_csv(diag["a1"].value("c1", ordered_json()));
      if (diag.contains("rate")) {
        const auto& rate = diag["rate"];
        row[5] = rate.value("regime", "");
        if (rate.contains("eta_hat")) {
          row[6] = format_g17(rate["eta_hat"].get<double>());
        } else if (rate.contains("sublinear_exponent_hat")) {
          row[6] = format_g17(rate["sublinear_exponent_hat"].get<double>());
        }
      }
      if (diag.contains("kl_exponent") && diag["kl_exponent"].value("determined", false)) {
        row[7] = format_g17(diag["kl_exponent"]["theta_hat"].get<double>());
      }
    }
    rows.push_back(std::move(row));
  }

  std::ostringstream csv;
  for (std::size_t i = 0; i < header.size(); ++i) csv << (i ? "," : "") << header[i];
  csv << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << row[i];
    csv << "\n";
  }
  try {
    write_text_file(csv_out, csv.str());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  // Plain-text summary, fixed column order.
  const std::vector<int> widths = {20, 12, 20, 3, 12, 14, 12, 10, 10, 13, 13};
  auto clip = [](const std::string& s, int w) {
    return s.size() > static_cast<std::size_t>(w) ? s.substr(0, w) : s;
  };
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << std::left << std::setw(widths[i]) << clip(header[i], widths[i] - 1);
  }
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << std::left << std::setw(widths[i]) << clip(row[i], widths[i] - 1);
    }
    out << "\n";
  }
  return 0;
}

}  // namespace amkl
