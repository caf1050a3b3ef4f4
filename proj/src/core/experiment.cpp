// Copyright 2026 The driftlab Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/experiment.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <sstream>

namespace driftlab {
namespace {

namespace fs = std::filesystem;

void reject_unknown(const Json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  if (!obj.is_object()) fail(ErrorCode::kValidation, where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known) fail(ErrorCode::kValidation, "unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
T get_or(const Json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return obj.at(key).get<T>();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng stream(std::uint64_t seed, std::uint64_t id) { return Rng(splitmix64(seed ^ splitmix64(id))); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

ParticleConfig points_from_json(const Json& pts, std::size_t dim, const std::string& where) {
  if (!pts.is_array() || pts.empty()) fail(ErrorCode::kValidation, where + " needs a nonempty array");
  std::vector<double> coords;
  for (const Json& p : pts) {
    const auto v = p.get<std::vector<double>>();
    if (v.size() != dim) fail(ErrorCode::kValidation, where + ": point dimension differs from dim");
    coords.insert(coords.end(), v.begin(), v.end());
  }
  return ParticleConfig(dim, std::move(coords));
}

Measure mixture_from_json(const Json& doc, std::size_t dim, const std::string& where) {
  ParticleConfig means = points_from_json(doc.at("means"), dim, where + ".means");
  Vector variances = doc.at("variances").get<Vector>();
  Vector weights = get_or<Vector>(doc, "weights", {});
  return Measure::mixture(std::move(means), std::move(variances), std::move(weights));
}

std::string resolve(const std::string& base, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? path : (fs::path(base) / p).string();
}

Json grid_json(const GridSpec& g, double pad) {
  return {{"lo", g.lo},
          {"hi", g.hi},
          {"points_per_dim", g.points_per_dim},
          {"rule", g.rule == QuadratureRule::kSimpson ? "simpson" : "trapezoid"},
          {"pad", pad}};
}

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

GridSpec record_window(const Experiment& exp, const ParticleConfig& x, int points) {
  std::vector<const ParticleConfig*> clouds{&x};
  if (exp.target->is_empirical()) clouds.push_back(&exp.target->atoms());
  const double pad = exp.config.diagnostics.pad.value_or(default_pad(exp.spec->kernel()));
  return window_grid(clouds, pad, points, QuadratureRule::kSimpson);
}

double time_average(const std::vector<double>& t, const std::vector<double>& v) {
  if (t.size() < 2) return v.empty() ? 0.0 : v.front();
  double total = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) total += 0.5 * (v[k] + v[k - 1]) * (t[k] - t[k - 1]);
  return total / (t.back() - t.front());
}

double rms_distance(const ParticleConfig& a, const ParticleConfig& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += squared_distance(a.point(i), b.point(i));
  return std::sqrt(total / static_cast<double>(a.size()));
}

std::string tracer_csv(const Trajectory& traj, const std::vector<std::size_t>& tracers) {
  std::ostringstream os;
  const std::size_t d = traj.states.front().dim();
  os << 't';
  for (std::size_t k = 0; k < tracers.size(); ++k) {
    for (std::size_t c = 0; c < d; ++c) os << ",tracer" << k << "_x" << c;
  }
  os << '\n';
  for (std::size_t s = 0; s < traj.size(); ++s) {
    os << format_double(traj.times[s]);
    for (std::size_t idx : tracers) {
      for (double v : traj.states[s].point(idx)) os << ',' << format_double(v);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double default_pad(const KernelSpec& k) {
  return (k.family() == KernelFamily::kLaplace ? 25.0 : 6.0) * k.bandwidth();
}

ExperimentConfig ExperimentConfig::from_json(const Json& doc, const std::string& base_dir) {
  try {
    reject_unknown(doc,
                   {"field", "kernel", "dim", "h", "eta", "t_end", "N", "seed", "scheme",
                    "record_every", "collision_guard", "model_source", "target", "initial",
                    "diagnostics", "tracers", "output", "kappa0", "bandwidth_model"},
                   "config");
    ExperimentConfig c;
    c.source = doc;
    c.base_dir = base_dir;
    c.field = field_kind_from_string(doc.at("field").get<std::string>());
    c.kernel = kernel_family_from_string(doc.at("kernel").get<std::string>());
    const int dim = doc.at("dim").get<int>();
    if (dim < 1) fail(ErrorCode::kValidation, "dim must be >= 1");
    c.dim = static_cast<std::size_t>(dim);
    c.h = doc.at("h").get<double>();
    if (!(c.h > 0.0)) fail(ErrorCode::kValidation, "h must be positive");
    c.integrator.eta = doc.at("eta").get<double>();
    c.integrator.t_end = doc.at("t_end").get<double>();
    c.integrator.scheme = scheme_from_string(get_or<std::string>(doc, "scheme", "frozen_euler"));
    c.integrator.record_every = get_or<int>(doc, "record_every", 1);
    if (doc.contains("collision_guard")) c.integrator.collision_guard = doc.at("collision_guard").get<double>();
    c.integrator.validate();
    if (doc.contains("N")) {
      const long long n = doc.at("N").get<long long>();
      if (n < 1) fail(ErrorCode::kValidation, "N must be >= 1");
      c.n = static_cast<std::size_t>(n);
    }
    c.seed = get_or<std::uint64_t>(doc, "seed", 0);
    const std::string src = get_or<std::string>(doc, "model_source", "full");
    if (src == "full") {
      c.model_source = ModelSource::kFullConfig;
    } else if (src == "loo") {
      c.model_source = ModelSource::kLeaveOneOut;
    } else {
      fail(ErrorCode::kValidation, "model_source must be 'full' or 'loo'");
    }
    if (c.field == FieldKind::kLaplaceLoo) c.model_source = ModelSource::kLeaveOneOut;
    if (c.field == FieldKind::kConservative && c.kernel == KernelFamily::kLaplace) {
      fail(ErrorCode::kValidation, "conservative field needs a differentiable kernel, not laplace");
    }
    if (c.field == FieldKind::kLaplaceLoo && c.kernel != KernelFamily::kLaplace) {
      fail(ErrorCode::kValidation, "laplace_loo field requires the laplace kernel");
    }
    if (c.field == FieldKind::kConservative && c.model_source == ModelSource::kLeaveOneOut) {
      fail(ErrorCode::kValidation, "conservative field uses the full configuration");
    }

    c.target = doc.at("target");
    reject_unknown(c.target, {"type", "means", "variances", "weights", "samples", "path", "points"},
                   "target");
    c.initial = doc.at("initial");
    reject_unknown(c.initial, {"type", "means", "variances", "weights", "path", "points"}, "initial");

    if (doc.contains("diagnostics")) {
      const Json& d = doc.at("diagnostics");
      reject_unknown(d,
                     {"i_n", "curl", "laplace", "bounds", "grid_points", "mc_samples",
                      "curl_points", "occupancy_radius", "pad"},
                     "diagnostics");
      auto& t = c.diagnostics;
      t.i_n = get_or<bool>(d, "i_n", false);
      t.curl = get_or<bool>(d, "curl", false);
      t.laplace = get_or<bool>(d, "laplace", false);
      t.bounds = get_or<bool>(d, "bounds", false);
      t.grid_points = get_or<int>(d, "grid_points", 129);
      t.mc_samples = get_or<std::size_t>(d, "mc_samples", 4000);
      t.curl_points = get_or<int>(d, "curl_points", 41);
      t.occupancy_radius = get_or<double>(d, "occupancy_radius", 1.0);
      if (d.contains("pad")) t.pad = d.at("pad").get<double>();
      if (t.grid_points < 17 || t.grid_points % 2 == 0) {
        fail(ErrorCode::kValidation, "diagnostics.grid_points must be odd and >= 17");
      }
      if (t.curl_points < 2) fail(ErrorCode::kValidation, "diagnostics.curl_points must be >= 2");
    }
    if (c.diagnostics.curl && c.dim != 2) fail(ErrorCode::kValidation, "curl diagnostics require dim = 2");
    if (c.diagnostics.laplace && c.kernel != KernelFamily::kLaplace) {
      fail(ErrorCode::kValidation, "laplace diagnostics require the Laplace kernel");
    }
    if (c.diagnostics.laplace && c.dim > 2) {
      fail(ErrorCode::kValidation, "laplace diagnostics use grid quadrature and need dim <= 2");
    }
    if (doc.contains("tracers")) c.tracers = doc.at("tracers").get<std::vector<std::size_t>>();
    if (doc.contains("output")) {
      const Json& o = doc.at("output");
      reject_unknown(o, {"trajectory", "diagnostics", "meta", "tracers"}, "output");
      c.output.trajectory = get_or<std::string>(o, "trajectory", c.output.trajectory);
      c.output.diagnostics = get_or<std::string>(o, "diagnostics", c.output.diagnostics);
      c.output.meta = get_or<std::string>(o, "meta", c.output.meta);
      c.output.tracers = get_or<std::string>(o, "tracers", c.output.tracers);
    }
    if (doc.contains("kappa0")) c.kappa0 = doc.at("kappa0").get<double>();
    if (doc.contains("bandwidth_model")) {
      const Json& b = doc.at("bandwidth_model");
      reject_unknown(b, {"A", "C", "beta"}, "bandwidth_model");
      c.bandwidth_model = BandwidthModel{get_or<double>(b, "A", 1.0), get_or<double>(b, "C", 1.0),
                                         get_or<double>(b, "beta", 0.0)};
    }
    return c;
  } catch (const Json::exception& e) {
    fail(ErrorCode::kValidation, std::string("config: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  Json doc;
  try {
    doc = Json::parse(read_text_file(path));
  } catch (const Json::exception& e) {
    fail(ErrorCode::kValidation, "config '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(doc, fs::path(path).parent_path().string());
}

Json ExperimentConfig::to_json() const {
  Json doc = source;
  doc["seed"] = seed;
  return doc;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(to_json().dump()); }

Experiment Experiment::build(const ExperimentConfig& config) {
  Experiment exp;
  exp.config = config;
  const std::size_t d = config.dim;
  const KernelSpec kernel(config.kernel, d, config.h);
  try {
    const std::string ttype = config.target.at("type").get<std::string>();
    if (ttype == "mixture") {
      Measure mix = mixture_from_json(config.target, d, "target");
      if (config.target.contains("samples")) {
        const auto n = config.target.at("samples").get<std::size_t>();
        if (n < 1) fail(ErrorCode::kValidation, "target.samples must be >= 1");
        Rng rng = stream(config.seed, 1);
        exp.target = std::make_shared<Measure>(Measure::empirical(mix.sample(n, rng)));
        exp.target_kind = "empirical (mixture sample)";
      } else {
        exp.target = std::make_shared<Measure>(std::move(mix));
        exp.target_kind = "gaussian_mixture";
      }
    } else if (ttype == "csv") {
      exp.target = std::make_shared<Measure>(
          read_measure_csv(resolve(config.base_dir, config.target.at("path").get<std::string>()), d));
      exp.target_kind = "empirical (csv)";
    } else if (ttype == "points") {
      exp.target = std::make_shared<Measure>(Measure::empirical(
          points_from_json(config.target.at("points"), d, "target.points"),
          get_or<Vector>(config.target, "weights", {})));
      exp.target_kind = "empirical (points)";
    } else {
      fail(ErrorCode::kValidation, "target.type must be mixture, csv or points");
    }

    const std::string itype = config.initial.at("type").get<std::string>();
    if (itype == "mixture") {
      if (!config.n) fail(ErrorCode::kValidation, "N is required for a mixture initial state");
      exp.initial_mixture = mixture_from_json(config.initial, d, "initial");
      Rng rng = stream(config.seed, 2);
      exp.initial = exp.initial_mixture->sample(*config.n, rng);
    } else if (itype == "csv") {
      exp.initial = read_points_csv(resolve(config.base_dir, config.initial.at("path").get<std::string>()), d);
    } else if (itype == "points") {
      exp.initial = points_from_json(config.initial.at("points"), d, "initial.points");
    } else {
      fail(ErrorCode::kValidation, "initial.type must be mixture, csv or points");
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::kValidation, std::string("config: ") + e.what());
  }
  if (config.n && *config.n != exp.initial.size()) {
    fail(ErrorCode::kValidation, "N differs from the number of initial points");
  }
  for (std::size_t idx : config.tracers) {
    if (idx >= exp.initial.size()) fail(ErrorCode::kValidation, "tracer index out of range");
  }
  exp.spec = std::make_shared<FieldSpec>(config.field, exp.target, kernel, config.model_source);
  std::vector<const ParticleConfig*> clouds{&exp.initial};
  if (exp.target->is_empirical()) clouds.push_back(&exp.target->atoms());
  exp.window = window_grid(clouds, config.diagnostics.pad.value_or(default_pad(kernel)),
                           config.diagnostics.grid_points, QuadratureRule::kSimpson);
  return exp;
}

double max_abs_curl(const FieldSpec& spec, const ParticleConfig& config, const GridSpec& grid) {
  double best = 0.0;
  const VectorField f = [&](ConstVec z) { return spatial_field(spec, config, z); };
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    best = std::max(best, std::abs(curl2d(f, grid.node(node))));
  }
  return best;
}

DiagnosticsRecord compute_record(const Experiment& exp, double t, const ParticleConfig& x) {
  const FieldSpec& spec = *exp.spec;
  const KernelSpec& k = spec.kernel();
  const DiagnosticsToggles& opts = exp.config.diagnostics;
  DiagnosticsRecord rec;
  rec.t = t;
  const ReciprocalKde rk = r_n(x, k);
  rec.r_n = rk.r_n;
  rec.min_q = rk.min_q;
  rec.v_n = v_n(x, spec);
  rec.s_n = s_n(x, spec);
  const std::vector<int> counts = occupancy_counts(x, k.bandwidth(), opts.occupancy_radius);
  rec.occupancy_min = *std::min_element(counts.begin(), counts.end());
  if (opts.i_n) {
    if (x.dim() <= 2) {
      rec.i_n = i_n(x, spec, record_window(exp, x, opts.grid_points)).value;
    } else {
      rec.i_n = i_n_mc(x, spec, opts.mc_samples, exp.config.seed).value;
    }
  }
  if (opts.curl) {
    GridSpec g = record_window(exp, x, opts.curl_points);
    g.rule = QuadratureRule::kTrapezoid;
    rec.curl_max_abs = max_abs_curl(spec, x, g);
  }
  if (opts.laplace) {
    const FieldSpec loo(FieldKind::kLaplaceLoo, spec.target_ptr(), k);
    if (x.size() >= 2) {
      rec.v_n_lap = v_n(x, loo);
      rec.s_n_lap = s_n(x, loo);
    }
    const LaplacePopulation pop = laplace_population_pair(x, spec, record_window(exp, x, opts.grid_points));
    rec.j_lap = pop.j.value;
    rec.vcal_lap = pop.vcal.value;
    rec.delta_sq = pop.delta_sq.value;
  }
  return rec;
}

SimulationResult run_experiment(const Experiment& exp) {
  const ExperimentConfig& cfg = exp.config;
  SimulationResult out;
  out.trajectory = integrate(exp.initial, *exp.spec, cfg.integrator,
                             [&](double t, const ParticleConfig& x) { return compute_record(exp, t, x); });
  out.trajectory.seed = cfg.seed;
  const Trajectory& traj = out.trajectory;
  const KernelSpec& k = exp.spec->kernel();

  Json meta;
  meta["config_hash"] = hex64(cfg.hash());
  meta["seed"] = cfg.seed;
  meta["config"] = cfg.to_json();
  meta["field"] = to_string(cfg.field);
  meta["kernel"] = to_string(cfg.kernel);
  meta["model_source"] = exp.spec->source() == ModelSource::kLeaveOneOut ? "loo" : "full";
  meta["dim"] = cfg.dim;
  meta["h"] = cfg.h;
  meta["N"] = exp.initial.size();
  meta["eta"] = cfg.integrator.eta;
  meta["t_end"] = cfg.integrator.t_end;
  meta["scheme"] = to_string(cfg.integrator.scheme);
  meta["record_every"] = cfg.integrator.record_every;
  meta["collision_guard"] =
      k.family() == KernelFamily::kLaplace ? Json(cfg.integrator.collision_guard.value_or(1e-8 * cfg.h))
                                           : Json(nullptr);
  meta["target_kind"] = exp.target_kind;
  meta["quadrature_window"] =
      grid_json(exp.window, cfg.diagnostics.pad.value_or(default_pad(k)));
  meta["recorded_states"] = traj.size();
  meta["tracers"] = cfg.tracers;
  meta["kernel_constants"] = {{"normalizer", k.base_normalizer()},
                              {"peak", k.peak()},
                              {"m1", k.base_moment(1)},
                              {"m2", k.base_moment(2)},
                              {"lap_at_zero", k.differentiable() ? Json(k.base_laplacian_at_zero())
                                                                 : Json(nullptr)}};
  std::vector<double> vs;
  for (const DiagnosticsRecord& r : traj.records) vs.push_back(r.v_n);
  meta["v_n_time_average"] = time_average(traj.times, vs);

  if (cfg.bandwidth_model) {
    const BandwidthModel& b = *cfg.bandwidth_model;
    const OptimalBandwidth opt = optimal_bandwidth(b.a, b.c, b.beta, static_cast<int>(cfg.dim),
                                                   static_cast<double>(exp.initial.size()));
    meta["optimal_bandwidth"] = {{"A", b.a},          {"C", b.c},
                                 {"beta", b.beta},    {"h_star", opt.h},
                                 {"self_term", opt.self_term}, {"quad_term", opt.quad_term}};
  }

  if (cfg.diagnostics.bounds) {
    Json bounds;
    std::optional<double> kappa0 = cfg.kappa0;
    std::string kappa_source = kappa0 ? "config" : "none";
    if (!kappa0 && exp.initial_mixture && cfg.dim <= 2) {
      double spread = 0.0;
      for (double v : exp.initial_mixture->variances()) spread = std::max(spread, std::sqrt(v));
      const GridSpec g = window_grid(exp.initial_mixture->atoms(), 8.0 * spread + 6.0 * cfg.h,
                                     cfg.dim == 1 ? 2049 : 257);
      kappa0 = kl_to_target(*exp.initial_mixture, *exp.spec, g).value;
      kappa_source = "kl_initial_to_target";
    }
    bounds["kappa0"] = opt_json(kappa0);
    bounds["kappa0_source"] = kappa_source;
    double lambda_t = 0.0;
    for (const DiagnosticsRecord& r : traj.records) lambda_t = std::max(lambda_t, r.r_n);
    if (exp.spec->kind() == FieldKind::kConservative && cfg.dim <= 2) {
      HessianBounds hb;
      for (const ParticleConfig* x : {&traj.states.front(), &traj.states.back()}) {
        const GridSpec g = window_grid(*x, 3.0 * cfg.h, cfg.dim == 1 ? 129 : 33);
        const HessianBounds cur = quadrature_constants(*x, *exp.spec, g);
        hb.b_a = std::max(hb.b_a, cur.b_a);
        hb.b_v = std::max(hb.b_v, cur.b_v);
      }
      RateInputs in;
      in.kappa0 = kappa0.value_or(0.0);
      in.d = static_cast<int>(cfg.dim);
      in.a1 = std::max(0.0, -k.base_laplacian_at_zero());
      in.lambda = lambda_t;
      in.b_a = hb.b_a;
      in.b_v = hb.b_v;
      in.m2_base = k.base_moment(2);
      in.n = static_cast<double>(exp.initial.size());
      in.t = cfg.integrator.t_end;
      in.h = cfg.h;
      const ConservativeRate rate = rate_rhs_conservative(in);
      bounds["rate_conservative"] = {{"entropy_term", rate.entropy_term},
                                     {"self_term", rate.self_term},
                                     {"quad_term", rate.quad_term},
                                     {"total", rate.total},
                                     {"a1", in.a1},
                                     {"Lambda_hat", lambda_t},
                                     {"B_A_hat", hb.b_a},
                                     {"B_V_hat", hb.b_v},
                                     {"label", "empirical estimates, not certified bounds"}};
      bounds["v_n_time_average"] = meta["v_n_time_average"];
    }
    if (k.family() == KernelFamily::kLaplace && cfg.dim <= 2 && exp.initial.size() >= 2) {
      const ParticleConfig& x = traj.states.back();
      const GridSpec g = record_window(exp, x, cfg.diagnostics.grid_points);
      const LaplacePopulation pop = laplace_population_pair(x, *exp.spec, g);
      const CoercivityConstants cc = coercivity_constants(pop.lambda, pop.big_l);
      const FieldSpec loo(FieldKind::kLaplaceLoo, exp.spec->target_ptr(), k);
      RateInputs in;
      in.kappa0 = kappa0.value_or(0.0);
      in.n = static_cast<double>(x.size());
      in.gamma_h = cc.gamma;
      in.beta_h = cc.beta;
      in.delta_sq = pop.delta_sq.value;
      in.eps_s = std::abs(s_n(x, loo) - pop.j.value);
      in.eps_v = std::abs(v_n(x, loo) - pop.vcal.value);
      const LaplaceRate rate = rate_rhs_laplace(in);
      const LooErrors ell = loo_errors(x, *exp.spec);
      bounds["rate_laplace"] = {{"entropy_term", rate.entropy_term},
                                {"delta_term", rate.delta_term},
                                {"eps_s_term", rate.eps_s_term},
                                {"eps_v_term", rate.eps_v_term},
                                {"total", rate.total},
                                {"lambda_window", pop.lambda},
                                {"L_window", pop.big_l},
                                {"gamma_h", cc.gamma},
                                {"beta_h", cc.beta},
                                {"ell_s", ell.ell_s},
                                {"ell_v", ell.ell_v},
                                {"window", grid_json(g, cfg.diagnostics.pad.value_or(default_pad(k)))},
                                {"label", "final-state surrogates, not certified bounds"}};
    }
    meta["bounds"] = bounds;
  }
  out.meta = std::move(meta);
  return out;
}

SimulationResult simulate_to_dir(const ExperimentConfig& config, const std::string& out_dir) {
  const Experiment exp = Experiment::build(config);
  SimulationResult res = run_experiment(exp);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory '" + out_dir + "'");
  const fs::path dir(out_dir);
  const OutputPaths& o = config.output;
  write_trajectory_csv((dir / o.trajectory).string(), res.trajectory);
  const DiagnosticsColumns cols{config.diagnostics.i_n, config.diagnostics.curl,
                                config.diagnostics.laplace};
  write_text_file((dir / o.diagnostics).string(), diagnostics_csv(res.trajectory.records, cols));
  Json files = {{"trajectory", o.trajectory}, {"diagnostics", o.diagnostics}, {"meta", o.meta}};
  if (!config.tracers.empty()) {
    write_text_file((dir / o.tracers).string(), tracer_csv(res.trajectory, config.tracers));
    files["tracers"] = o.tracers;
  }
  res.meta["files"] = files;
  write_text_file((dir / o.meta).string(), res.meta.dump(2) + "\n");
  return res;
}

Figure1Result run_figure1(const std::string& out_dir, const Figure1Options& opt) {
  Rng rng(opt.seed);
  std::uniform_real_distribution<double> along(-1.5, 1.5);
  std::normal_distribution<double> thin(0.0, 0.05);
  std::vector<double> data;
  for (std::size_t j = 0; j < opt.n_data; ++j) {
    data.push_back(along(rng));
    data.push_back(thin(rng));
  }
  std::vector<double> model;
  for (std::size_t i = 0; i < opt.n_model; ++i) {
    model.push_back(thin(rng));
    model.push_back(along(rng));
  }
  auto target = std::make_shared<Measure>(Measure::empirical(ParticleConfig(2, data)));
  const ParticleConfig x0(2, model);

  // Tracers: the particles nearest four fixed heights along the model cluster.
  std::vector<std::size_t> tracers;
  for (double level : {-1.2, -0.6, 0.6, 1.2}) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < x0.size(); ++i) {
      if (std::abs(x0.point(i)[1] - level) < std::abs(x0.point(best)[1] - level)) best = i;
    }
    tracers.push_back(best);
  }

  const FieldSpec cons(FieldKind::kConservative, target, KernelSpec(KernelFamily::kGaussian, 2, opt.h));
  const FieldSpec disp(FieldKind::kDisplacement, target, KernelSpec(KernelFamily::kLaplace, 2, opt.h));
  // u = h^2 b under the Gaussian kernel; dividing the step by h^2 gives the
  // displacement run comparable per-step motion.
  const double eta_disp = opt.eta / (opt.h * opt.h);

  IntegratorParams pc;
  pc.eta = opt.eta;
  pc.t_end = opt.eta * static_cast<double>(opt.steps);
  pc.record_every = opt.record_every;
  IntegratorParams pd = pc;
  pd.eta = eta_disp;
  pd.t_end = eta_disp * static_cast<double>(opt.steps);

  const Trajectory tc = integrate(x0, cons, pc);
  const Trajectory td = integrate(x0, disp, pd);

  GridSpec curl_grid;
  curl_grid.lo = {-opt.curl_half_width, -opt.curl_half_width};
  curl_grid.hi = {opt.curl_half_width, opt.curl_half_width};
  curl_grid.points_per_dim = opt.curl_points;
  curl_grid.rule = QuadratureRule::kTrapezoid;

  auto curl_map = [&](const FieldSpec& spec, double* max_out) {
    std::ostringstream os;
    os << "x_0,x_1,curl\n";
    double best = 0.0;
    const VectorField f = [&](ConstVec z) { return spatial_field(spec, x0, z); };
    for (std::size_t node = 0; node < curl_grid.node_count(); ++node) {
      const Vector z = curl_grid.node(node);
      const double c = curl2d(f, z);
      best = std::max(best, std::abs(c));
      os << format_double(z[0]) << ',' << format_double(z[1]) << ',' << format_double(c) << '\n';
    }
    *max_out = best;
    return os.str();
  };

  Figure1Result res;
  const std::string cons_curl = curl_map(cons, &res.conservative_curl_max);
  const std::string disp_curl = curl_map(disp, &res.laplace_curl_max);
  res.tracer_starts_equal = true;
  for (std::size_t idx : tracers) {
    const ConstVec a = tc.states.front().point(idx);
    const ConstVec b = td.states.front().point(idx);
    res.tracer_starts_equal = res.tracer_starts_equal && std::equal(a.begin(), a.end(), b.begin());
    res.terminal_separation = std::max(
        res.terminal_separation,
        std::sqrt(squared_distance(tc.states.back().point(idx), td.states.back().point(idx))));
  }

  // Plateau indicator: tracer motion over the last tenth of the run relative to
  // the whole run.
  auto plateau = [&](const Trajectory& tr) {
    const std::size_t last = tr.size() - 1;
    const std::size_t tail = last - std::max<std::size_t>(1, last / 10);
    double total = 0.0;
    double late = 0.0;
    for (std::size_t idx : tracers) {
      total += std::sqrt(squared_distance(tr.states.front().point(idx), tr.states.back().point(idx)));
      late += std::sqrt(squared_distance(tr.states[tail].point(idx), tr.states.back().point(idx)));
    }
    return total > 0.0 ? late / total : 0.0;
  };

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory '" + out_dir + "'");
  const fs::path dir(out_dir);
  std::ostringstream data_csv;
  data_csv << "x_0,x_1\n";
  for (std::size_t j = 0; j < target->size(); ++j) {
    data_csv << format_double(target->atoms().point(j)[0]) << ','
             << format_double(target->atoms().point(j)[1]) << '\n';
  }
  write_text_file((dir / "figure1_data.csv").string(), data_csv.str());
  write_trajectory_csv((dir / "figure1_conservative_trajectory.csv").string(), tc);
  write_trajectory_csv((dir / "figure1_laplace_trajectory.csv").string(), td);
  write_text_file((dir / "figure1_conservative_tracers.csv").string(), tracer_csv(tc, tracers));
  write_text_file((dir / "figure1_laplace_tracers.csv").string(), tracer_csv(td, tracers));
  write_text_file((dir / "figure1_conservative_curl.csv").string(), cons_curl);
  write_text_file((dir / "figure1_laplace_curl.csv").string(), disp_curl);

  Json meta;
  meta["seed"] = opt.seed;
  meta["h"] = opt.h;
  meta["n_model"] = opt.n_model;
  meta["n_data"] = opt.n_data;
  meta["geometry"] = {{"data", "uniform on [-1.5,1.5] x {0} plus N(0, 0.05^2) vertical noise"},
                      {"model", "uniform on {0} x [-1.5,1.5] plus N(0, 0.05^2) horizontal noise"}};
  meta["conservative"] = {{"kernel", "gaussian"}, {"eta", pc.eta}, {"t_end", pc.t_end},
                          {"curl_max_abs", res.conservative_curl_max},
                          {"plateau_ratio", plateau(tc)}};
  meta["laplace_displacement"] = {{"kernel", "laplace"}, {"eta", pd.eta}, {"t_end", pd.t_end},
                                  {"curl_max_abs", res.laplace_curl_max},
                                  {"plateau_ratio", plateau(td)}};
  meta["steps"] = opt.steps;
  meta["record_every"] = opt.record_every;
  meta["tracers"] = tracers;
  meta["tracer_starts_equal"] = res.tracer_starts_equal;
  meta["terminal_separation_max"] = res.terminal_separation;
  meta["curl_grid"] = grid_json(curl_grid, 0.0);
  meta["curl_grid_snapshot"] = "initial configuration";
  Json terminal = Json::array();
  for (std::size_t idx : tracers) {
    const ConstVec a = tc.states.back().point(idx);
    const ConstVec b = td.states.back().point(idx);
    terminal.push_back({{"particle", idx},
                        {"conservative", std::vector<double>(a.begin(), a.end())},
                        {"laplace", std::vector<double>(b.begin(), b.end())}});
  }
  meta["terminal_positions"] = terminal;
  write_text_file((dir / "figure1_meta.json").string(), meta.dump(2) + "\n");
  res.meta = std::move(meta);
  return res;
}

std::vector<double> parse_value_list(const std::string& csv) {
  std::vector<double> out;
  std::istringstream is(csv);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_double(item, "--values"));
  }
  if (out.empty()) fail(ErrorCode::kValidation, "empty value list");
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::kInvalidArgument, "slope needs >= 2 points");
  const std::size_t n = x.size();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) fail(ErrorCode::kDomain, "log-log slope needs positive values");
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) fail(ErrorCode::kInvalidArgument, "slope needs distinct x values");
  return sxy / sxx;
}

SweepResult run_sweep(const ExperimentConfig& base, const std::string& param,
                      const std::vector<double>& values, const std::string& out_dir) {
  if (param != "N" && param != "h" && param != "eta") {
    fail(ErrorCode::kValidation, "--param must be N, h or eta");
  }
  if (values.size() < 3) fail(ErrorCode::kValidation, "a sweep needs at least 3 values");
  for (double v : values) {
    if (!(v > 0.0)) fail(ErrorCode::kValidation, "sweep values must be positive");
  }
  SweepResult res;
  res.param = param;
  const bool laplace = base.kernel == KernelFamily::kLaplace;
  for (double v : values) {
    SweepPoint pt;
    pt.value = v;
    try {
      Json doc = base.to_json();
      if (param == "N") {
        if (v != std::floor(v)) fail(ErrorCode::kValidation, "N values must be integers");
        doc["N"] = static_cast<long long>(v);
      } else if (param == "h") {
        doc["h"] = v;
      } else {
        doc["eta"] = v;
      }
      doc.erase("diagnostics");
      const ExperimentConfig cfg = ExperimentConfig::from_json(doc, base.base_dir);
      const Experiment exp = Experiment::build(cfg);
      if (param == "eta") {
        const Trajectory euler = integrate(exp.initial, *exp.spec, cfg.integrator);
        IntegratorParams ref = cfg.integrator;
        ref.eta = v / 100.0;
        ref.record_every = std::numeric_limits<int>::max();
        const Trajectory rk = integrate_rk4(exp.initial, *exp.spec, ref);
        pt.metric = rms_distance(euler.states.back(), rk.states.back());
      } else {
        const FieldSpec& spec = *exp.spec;
        std::optional<FieldSpec> loo;
        if (laplace && exp.initial.size() >= 2) loo.emplace(FieldKind::kLaplaceLoo, spec.target_ptr(), spec.kernel());
        const Trajectory tr = integrate(exp.initial, spec, cfg.integrator,
                                        [&](double t, const ParticleConfig& x) {
                                          DiagnosticsRecord r;
                                          r.t = t;
                                          r.v_n = loo ? v_n(x, *loo) : v_n(x, spec);
                                          return r;
                                        });
        std::vector<double> vs;
        for (const DiagnosticsRecord& r : tr.records) vs.push_back(r.v_n);
        pt.metric = time_average(tr.times, vs);
      }
      pt.ok = true;
      pt.status = "ok";
    } catch (const Error& e) {
      pt.ok = false;
      pt.status = std::string("error:") + to_string(e.code());
    }
    res.points.push_back(pt);
  }

  std::vector<double> xs;
  std::vector<double> ys;
  for (const SweepPoint& p : res.points) {
    if (p.ok && p.metric > 0.0) {
      xs.push_back(p.value);
      ys.push_back(p.metric);
    }
  }
  Json summary;
  summary["param"] = param;
  summary["metric"] = param == "eta" ? "endpoint_rms_vs_rk4" : (laplace ? "v_n_lap_time_average" : "v_n_time_average");
  summary["config_hash"] = hex64(base.hash());
  summary["seed"] = base.seed;
  if (xs.size() >= 2) {
    res.slope = loglog_slope(xs, ys);
    summary["loglog_slope"] = res.slope;
  } else {
    summary["loglog_slope"] = nullptr;
  }
  bool monotone_decreasing = true;
  for (std::size_t k = 1; k < res.points.size(); ++k) {
    monotone_decreasing = monotone_decreasing && res.points[k].ok && res.points[k - 1].ok &&
                          (res.points[k].value > res.points[k - 1].value
                               ? res.points[k].metric < res.points[k - 1].metric
                               : res.points[k].metric > res.points[k - 1].metric);
  }
  summary["monotone_decreasing_in_value"] = monotone_decreasing;
  if (param == "h" || param == "N") {
    const BandwidthModel b = base.bandwidth_model.value_or(BandwidthModel{});
    Json preds = Json::array();
    for (const SweepPoint& p : res.points) {
      const double n = param == "N" ? p.value : static_cast<double>(base.n.value_or(1));
      const OptimalBandwidth opt = optimal_bandwidth(b.a, b.c, b.beta, static_cast<int>(base.dim), n);
      preds.push_back({{"value", p.value}, {"N", n}, {"h_star", opt.h}});
    }
    summary["optimal_bandwidth"] = {{"A", b.a}, {"C", b.c}, {"beta", b.beta}, {"predictions", preds}};
  }
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "param,value,metric,status\n";
  for (const SweepPoint& p : res.points) {
    csv << param << ',' << format_double(p.value) << ',' << (p.ok ? format_double(p.metric) : "")
        << ',' << p.status << '\n';
    rows.push_back({{"value", p.value}, {"metric", p.ok ? Json(p.metric) : Json(nullptr)}, {"status", p.status}});
  }
  summary["points"] = rows;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory '" + out_dir + "'");
  write_text_file((fs::path(out_dir) / "sweep.csv").string(), csv.str());
  write_text_file((fs::path(out_dir) / "sweep.json").string(), summary.dump(2) + "\n");
  res.summary = std::move(summary);
  return res;
}

}  // namespace driftlab
