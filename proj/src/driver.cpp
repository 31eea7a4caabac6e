#include "cldp/driver.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "cldp/csv.hpp"
#include "cldp/rate.hpp"

namespace cldp {

namespace {

constexpr auto kEstimateHeader = {
    "scale",  "n_reps",       "n_hits",      "p_hat",  "ci_lo", "ci_hi",
    "slope",  "slope_ci_lo",  "slope_ci_hi", "target"};

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

void write_estimates_csv(const std::string& path,
                         const std::vector<Estimate>& estimates) {
  CsvWriter csv(path);
  csv.header(std::vector<std::string>(kEstimateHeader.begin(),
                                      kEstimateHeader.end()));
  for (const auto& e : estimates)
    csv.row({format_double(e.scale), std::to_string(e.n_reps),
             std::to_string(e.n_hits), format_double(e.p_hat),
             format_double(e.ci.lo), format_double(e.ci.hi),
             opt_field(e.slope), opt_field(e.slope_lo), opt_field(e.slope_hi),
             format_double(e.target)});
}

TemporalKernel kernel_from(SectionReader& model) {
  const std::string kind = model.get_string("kernel");
  if (kind == "exponential")
    return TemporalKernel::exponential(model.get_double("beta"));
  if (kind == "uniform") return TemporalKernel::uniform(model.get_double("b"));
  if (kind == "table")
    return TemporalKernel::table(model.get_double_list("density"),
                                 model.get_double("kernel_tmax"));
  throw ConfigError("[model]: unknown temporal kernel '" + kind + "'");
}

SpatialKernel spatial_kernel_from(SectionReader& model) {
  const std::string kind = model.get_string("kernel");
  if (kind == "gaussian")
    return SpatialKernel::gaussian(model.get_double("sigma"));
  if (kind == "uniform_ball")
    return SpatialKernel::uniform_ball(model.get_double("rho"));
  throw ConfigError("[model]: unknown spatial kernel '" + kind + "'");
}

ClusterSizeLaw size_law_from(SectionReader& model, double mu) {
  const std::string kind = model.get_string("size_law", "borel");
  if (kind == "borel") return ClusterSizeLaw::borel(mu);
  if (kind == "table")
    return ClusterSizeLaw::table(model.get_double_list("size_probs"));
  throw ConfigError("[model]: unknown size law '" + kind + "'");
}

/// Wraps model validation so bad parameter values surface as ConfigError.
template <typename Fn>
auto config_checked(Fn&& fn) {
  try {
    return fn();
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("invalid model: ") + e.what());
  }
}

}  // namespace

long cluster_cap_from_config(const Config& config) {
  SectionReader model(config.model, "model");
  const long cap = model.get_long("cluster_cap", kDefaultProgenyCap);
  if (cap < 1) throw ConfigError("[model]: cluster_cap must be >= 1");
  return cap;
}

TemporalSpec temporal_spec_from_config(const Config& config) {
  SectionReader model(config.model, "model");
  const std::string type = model.get_string("type");
  if (type != "temporal")
    throw ConfigError("[model]: this command needs type = temporal");
  const double nu = model.get_double("nu");
  const double mu = model.get_double("mu");
  auto kernel = kernel_from(model);
  auto law = config_checked([&] { return size_law_from(model, mu); });
  model.get_long("cluster_cap", kDefaultProgenyCap);  // consumed; read later
  auto spec = config_checked([&] {
    return TemporalSpec(nu, mu, std::move(kernel), std::move(law));
  });
  model.reject_unknown();
  return spec;
}

SpatialSpec spatial_spec_from_config(const Config& config) {
  SectionReader model(config.model, "model");
  const std::string type = model.get_string("type");
  if (type != "spatial")
    throw ConfigError("[model]: this command needs type = spatial");
  const int d = static_cast<int>(model.get_long("d"));
  const double nu = model.get_double("nu");
  const double mu = model.get_double("mu");
  auto kernel = spatial_kernel_from(model);
  auto law = config_checked([&] { return size_law_from(model, mu); });
  model.get_long("cluster_cap", kDefaultProgenyCap);
  auto spec = config_checked([&] {
    return SpatialSpec(d, nu, mu, std::move(kernel), std::move(law));
  });
  model.reject_unknown();
  return spec;
}

namespace {

struct CommandContext {
  Config effective;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
};

CommandContext make_context(const Config& config, const RunOptions& options) {
  CommandContext ctx;
  ctx.effective = config;
  if (options.seed) {
    ctx.effective.seed = *options.seed;
    ctx.effective.seed_present = true;
  }
  if (options.out_dir) ctx.effective.output["dir"] = *options.out_dir;
  SectionReader output(ctx.effective.output, "output");
  ctx.out_dir = output.get_string("dir", "out");
  output.reject_unknown();
  ctx.seed = ctx.effective.seed;
  ctx.threads = options.threads;
  std::filesystem::create_directories(ctx.out_dir);

  std::ofstream echo(ctx.out_dir + "/effective_config.toml",
                     std::ios::binary | std::ios::trunc);
  if (!echo) throw std::runtime_error("cannot write effective config echo");
  echo << render_config(ctx.effective);
  return ctx;
}

std::string path_in(const CommandContext& ctx, const std::string& name) {
  return ctx.out_dir + "/" + name;
}

Side side_from(SectionReader& experiment) {
  const std::string side = experiment.get_string("side", "ge");
  if (side == "ge") return Side::Geq;
  if (side == "le") return Side::Leq;
  throw ConfigError("[experiment]: side must be 'ge' or 'le'");
}

void cmd_simulate(const Config& config, const CommandContext& ctx,
                  std::ostream& log) {
  SectionReader model_type(config.model, "model");
  const bool spatial = model_type.get_string("type") == "spatial";
  SectionReader experiment(ctx.effective.experiment, "experiment");
  const long cap = cluster_cap_from_config(ctx.effective);

  if (!spatial) {
    const auto spec = temporal_spec_from_config(ctx.effective);
    const double t = experiment.get_double("t");
    const auto margin_override = experiment.get_optional_double("margin");
    experiment.reject_unknown();

    double margin;
    if (margin_override) {
      margin = *margin_override;
    } else {
      RngStream pilot(ctx.seed, kPilotStreamBase);
      margin = default_margin(spec, t, pilot);
    }
    RngStream stream(ctx.seed, 0);
    const auto realization = simulate_truncated(spec, t, margin, stream, cap);
    std::ofstream out(path_in(ctx, "events.csv"),
                      std::ios::binary | std::ios::trunc);
    write_events_csv(realization, out);

    const double rate =
        static_cast<double>(realization.count_in_interval(0.0, t)) / t;
    log << "events: " << realization.total_events()
        << "  immigrants: " << realization.immigrant_times().size()
        << "  margin: " << format_double(margin) << '\n';
    log << "N(0,t]/t = " << format_double(rate)
        << "  nu/(1-mu) = " << format_double(spec.nu / (1.0 - spec.mu))
        << '\n';
    return;
  }

  const auto spec = spatial_spec_from_config(ctx.effective);
  const double r = experiment.get_double("r");
  const auto margin_override = experiment.get_optional_double("margin");
  experiment.reject_unknown();

  double margin;
  if (margin_override) {
    margin = *margin_override;
  } else {
    RngStream pilot(ctx.seed, kPilotStreamBase);
    margin = default_spatial_margin(spec, r, pilot);
  }
  RngStream stream(ctx.seed, 0);
  const auto realization = simulate_spatial(spec, r, margin, stream, cap);
  std::ofstream out(path_in(ctx, "events.csv"),
                    std::ios::binary | std::ios::trunc);
  write_events_csv(realization, out);

  const double volume = omega_d(spec.d, r);
  const double rate =
      static_cast<double>(realization.count_in_ball(r)) / volume;
  log << "events: " << realization.total_events()
      << "  margin: " << format_double(margin) << '\n';
  log << "N(b(0,r))/omega_d(r) = " << format_double(rate)
      << "  nu/(1-mu) = " << format_double(spec.nu / (1.0 - spec.mu)) << '\n';
}

void cmd_ratefn(const Config& config, const CommandContext& ctx,
                std::ostream& log) {
  const auto spec = temporal_spec_from_config(config);
  const ScalarRate rate(spec.nu, spec.size_law);
  SectionReader experiment(ctx.effective.experiment, "experiment");
  const double x_min = experiment.get_double("x_min");
  const double x_max = experiment.get_double("x_max");
  const long x_points = experiment.get_long("x_points");
  const auto theta_min = experiment.get_optional_double("theta_min");
  const auto theta_max = experiment.get_optional_double("theta_max");
  const auto theta_points = experiment.get_optional_long("theta_points");
  experiment.reject_unknown();
  if (!(x_min >= 0.0) || !(x_max > x_min) || x_points < 2)
    throw ConfigError("[experiment]: need 0 <= x_min < x_max, x_points >= 2");

  {
    CsvWriter csv(path_in(ctx, "ratefn.csv"));
    csv.header({"x", "rate_numeric", "rate_closed_form", "theta_x"});
    for (long i = 0; i < x_points; ++i) {
      const double x = x_min + (x_max - x_min) * static_cast<double>(i) /
                                   static_cast<double>(x_points - 1);
      const double numeric = rate.legendre(x);
      std::string closed;
      if (spec.size_law.is_borel())
        closed = format_double(hawkes_rate(spec.nu, spec.mu, x));
      std::string theta;
      if (x > 0.0) theta = format_double(rate.tilt(x));
      csv.row({format_double(x), format_double(numeric), closed, theta});
    }
  }
  if (theta_min && theta_max && theta_points) {
    if (!(*theta_max > *theta_min) || *theta_points < 2)
      throw ConfigError("[experiment]: bad theta grid");
    CsvWriter csv(path_in(ctx, "lambda.csv"));
    csv.header({"theta", "lambda"});
    for (long i = 0; i < *theta_points; ++i) {
      const double theta =
          *theta_min + (*theta_max - *theta_min) * static_cast<double>(i) /
                           static_cast<double>(*theta_points - 1);
      csv.row({format_double(theta), format_double(rate.lambda(theta))});
    }
  }
  log << "rate table on [" << format_double(x_min) << ", "
      << format_double(x_max) << "], zero of the rate at nu E[S] = "
      << format_double(rate.mean_rate()) << '\n';
}

void cmd_verify_scalar(const Config& config, const CommandContext& ctx,
                       std::ostream& log) {
  const auto spec = temporal_spec_from_config(config);
  SectionReader experiment(ctx.effective.experiment, "experiment");
  ThresholdEvent event;
  event.a = experiment.get_double("a");
  event.side = side_from(experiment);
  SlopeExperimentConfig run;
  run.scales = experiment.get_double_list("scales");
  run.n_reps = experiment.get_long("n_reps");
  run.margin = experiment.get_optional_double("margin");
  experiment.reject_unknown();
  run.seed = ctx.seed;
  run.threads = ctx.threads;

  const auto estimates = run_scalar_slope(spec, event, run);
  write_estimates_csv(path_in(ctx, "verify_scalar.csv"), estimates);
  for (const auto& e : estimates)
    log << "t = " << format_double(e.scale) << "  p_hat = "
        << format_double(e.p_hat) << "  slope = " << opt_field(e.slope)
        << "  target = " << format_double(e.target) << '\n';
}

void cmd_verify_path(const Config& config, const CommandContext& ctx,
                     std::ostream& log) {
  const auto spec = temporal_spec_from_config(config);
  SectionReader experiment(ctx.effective.experiment, "experiment");
  RectangleEvent event;
  event.t1 = experiment.get_double("t1");
  event.t2 = experiment.get_double("t2");
  const auto rect = experiment.get_double_list("rect");
  if (rect.size() != 4)
    throw ConfigError("[experiment]: rect must be lo1,hi1,lo2,hi2");
  event.lo1 = rect[0];
  event.hi1 = rect[1];
  event.lo2 = rect[2];
  event.hi2 = rect[3];
  SlopeExperimentConfig run;
  run.scales = experiment.get_double_list("alphas");
  run.n_reps = experiment.get_long("n_reps");
  run.margin = experiment.get_optional_double("margin");
  experiment.reject_unknown();
  run.seed = ctx.seed;
  run.threads = ctx.threads;

  const auto estimates = run_finite_dim(spec, event, run);
  write_estimates_csv(path_in(ctx, "verify_path.csv"), estimates);
  for (const auto& e : estimates)
    log << "alpha = " << format_double(e.scale) << "  p_hat = "
        << format_double(e.p_hat) << "  slope = " << opt_field(e.slope)
        << "  target = " << format_double(e.target) << '\n';
}

void cmd_verify_spatial(const Config& config, const CommandContext& ctx,
                        std::ostream& log) {
  const auto spec = spatial_spec_from_config(config);
  SectionReader experiment(ctx.effective.experiment, "experiment");
  ThresholdEvent event;
  event.a = experiment.get_double("a");
  event.side = side_from(experiment);
  SlopeExperimentConfig run;
  run.scales = experiment.get_double_list("radii");
  run.n_reps = experiment.get_long("n_reps");
  run.margin = experiment.get_optional_double("margin");
  experiment.reject_unknown();
  run.seed = ctx.seed;
  run.threads = ctx.threads;

  const auto estimates = run_scalar_slope(spec, event, run);
  write_estimates_csv(path_in(ctx, "verify_spatial.csv"), estimates);
  for (const auto& e : estimates)
    log << "r = " << format_double(e.scale) << "  p_hat = "
        << format_double(e.p_hat) << "  slope = " << opt_field(e.slope)
        << "  target = " << format_double(e.target) << '\n';
}

void cmd_verify_void(const Config& config, const CommandContext& ctx,
                     std::ostream& log) {
  const auto spec = spatial_spec_from_config(config);
  SectionReader experiment(ctx.effective.experiment, "experiment");
  const auto radii = experiment.get_double_list("radii");
  const long n_reps = experiment.get_long("n_reps");
  const auto margin = experiment.get_optional_double("margin");
  experiment.reject_unknown();

  const auto result =
      run_void_experiment(spec, radii, margin, n_reps, ctx.seed, ctx.threads);
  if (result.estimability_warning)
    log << "warning: nu omega_d(r_max) is large; plain MC void estimates may "
           "record no hits\n";
  write_estimates_csv(path_in(ctx, "verify_void.csv"), result.slopes);
  {
    CsvWriter csv(path_in(ctx, "verify_void_empty_space.csv"));
    csv.header({"scale", "e_hat", "double_log_diag"});
    for (std::size_t i = 0; i < result.slopes.size(); ++i)
      csv.row({format_double(result.slopes[i].scale),
               format_double(empty_space(result.slopes[i].p_hat)),
               opt_field(result.empty_space_diag[i])});
  }
  for (const auto& e : result.slopes)
    log << "r = " << format_double(e.scale) << "  v_hat = "
        << format_double(e.p_hat) << "  slope = " << opt_field(e.slope)
        << "  target = " << format_double(e.target) << '\n';
}

void cmd_verify_oracle(const Config& config, const CommandContext& ctx,
                       std::ostream& log) {
  const auto spec = temporal_spec_from_config(config);
  SectionReader experiment(ctx.effective.experiment, "experiment");
  const auto scales = experiment.get_double_list("t_scales");
  const double a = experiment.get_double("a");
  const long n_reps = experiment.get_long("n_reps");
  const auto nmax_override = experiment.get_optional_long("nmax");
  experiment.reject_unknown();

  std::vector<Estimate> tilted;
  CsvWriter panjer_csv(path_in(ctx, "oracle_panjer.csv"));
  panjer_csv.header({"scale", "tail_exact", "slope_exact", "target"});
  for (std::size_t s = 0; s < scales.size(); ++s) {
    const double t = scales[s];
    tilted.push_back(tilted_tail_compound(spec.nu, spec.size_law, t, a, n_reps,
                                          ctx.seed, s * kStreamPerScale,
                                          ctx.threads));
    const long level = static_cast<long>(std::ceil(a * t));
    const long nmax =
        nmax_override ? *nmax_override
                      : level + 200 +
                            static_cast<long>(60.0 * std::sqrt(spec.nu * t));
    const auto pmf = panjer_pmf(spec.nu * t, spec.size_law, nmax);
    double below = 0.0;
    for (long n = 0; n < level && n <= nmax; ++n)
      below += pmf[static_cast<std::size_t>(n)];
    const double tail = 1.0 - below;
    panjer_csv.row({format_double(t), format_double(tail),
                    format_double(-std::log(tail) / t),
                    format_double(tilted.back().target)});
  }
  write_estimates_csv(path_in(ctx, "oracle_tilted.csv"), tilted);
  for (const auto& e : tilted)
    log << "t = " << format_double(e.scale) << "  p_hat = "
        << format_double(e.p_hat) << "  slope = " << opt_field(e.slope)
        << "  target = " << format_double(e.target) << '\n';
}

}  // namespace

void run_command(const std::string& command, const std::string& subcommand,
                 const Config& config, const RunOptions& options,
                 std::ostream& log) {
  const CommandContext ctx = make_context(config, options);
  if (command == "simulate") {
    cmd_simulate(ctx.effective, ctx, log);
  } else if (command == "ratefn") {
    cmd_ratefn(ctx.effective, ctx, log);
  } else if (command == "verify") {
    if (subcommand == "scalar")
      cmd_verify_scalar(ctx.effective, ctx, log);
    else if (subcommand == "path")
      cmd_verify_path(ctx.effective, ctx, log);
    else if (subcommand == "spatial")
      cmd_verify_spatial(ctx.effective, ctx, log);
    else if (subcommand == "void")
      cmd_verify_void(ctx.effective, ctx, log);
    else if (subcommand == "oracle")
      cmd_verify_oracle(ctx.effective, ctx, log);
    else
      throw ConfigError("unknown verify subcommand '" + subcommand + "'");
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
}

}  // namespace cldp
