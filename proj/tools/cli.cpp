#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <fmt/format.h>
#include <json.hpp>

#include "crq/background.hpp"
#include "crq/error.hpp"
#include "crq/io.hpp"
#include "crq/presets.hpp"
#include "crq/stats.hpp"

namespace crq::cli {

namespace {

constexpr int kMaxTruncation = 16;

double to_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", what, s));
  }
  return v;
}

long long to_integer(std::string_view s, std::string_view what) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not an integer", what, s));
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

nlohmann::ordered_json number_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

SpectralField field_from(const FieldSource& src, const SpectralSpace& space, std::uint64_t seed) {
  switch (src.kind) {
    case FieldSource::Kind::zero: return SpectralField::zero(space.truncation());
    case FieldSource::Kind::mode11:
      if (space.truncation() < 2) throw ConfigError("mode11 needs N >= 2");
      return mode_field(space, mode11(), src.amplitude);
    case FieldSource::Kind::file: {
      std::string text;
      try {
        text = read_text(src.path);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
      try {
        return parse_spectral_csv(text, space.modes());
      } catch (const FormatError& e) {
        throw ConfigError(fmt::format("{}: {}", src.path, e.what()));
      }
    }
    case FieldSource::Kind::random:
      return random_field(space, seed, src.degree, src.amplitude);
  }
  throw ConfigError("unreachable field source");
}

void check_source(const FieldSource& src, int truncation, std::string_view role) {
  if (src.kind == FieldSource::Kind::random) {
    const int max_degree = std::max(1, truncation / 2);
    if (src.degree < 1 || src.degree > max_degree) {
      throw ConfigError(fmt::format("{}: random degree must lie in [1, {}] for N = {}", role, max_degree, truncation));
    }
    if (!(src.amplitude >= 0.0) || src.amplitude > kMaxRandomAmplitude) {
      throw ConfigError(fmt::format("{}: random amplitude must lie in [0, {}]", role, kMaxRandomAmplitude));
    }
  }
  if (src.kind == FieldSource::Kind::mode11 && !std::isfinite(src.amplitude)) {
    throw ConfigError(fmt::format("{}: amplitude must be finite", role));
  }
}

}  // namespace

std::string FieldSource::describe() const {
  switch (kind) {
    case Kind::zero: return "zero";
    case Kind::mode11: return fmt::format("mode11:{}", amplitude);
    case Kind::file: return "file:" + path;
    case Kind::random: return fmt::format("random:{}:{}", degree, amplitude);
  }
  return "?";
}

FieldSource parse_source(std::string_view text) {
  text = trim(text);
  FieldSource src;
  if (text == "zero") return src;
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (head == "mode11" && !rest.empty()) {
    src.kind = FieldSource::Kind::mode11;
    src.amplitude = to_double(rest, "mode11 amplitude");
    return src;
  }
  if (head == "file" && !rest.empty()) {
    src.kind = FieldSource::Kind::file;
    src.path = std::string(rest);
    return src;
  }
  if (head == "random") {
    const auto sep = rest.find(':');
    if (sep != std::string_view::npos) {
      src.kind = FieldSource::Kind::random;
      src.degree = static_cast<int>(to_integer(rest.substr(0, sep), "random degree"));
      src.amplitude = to_double(rest.substr(sep + 1), "random amplitude");
      return src;
    }
  }
  throw ConfigError(fmt::format("bad field source '{}' (zero | mode11:<amp> | file:<path> | random:<degree>:<amp>)", text));
}

void RunSpec::validate() const {
  if (truncation < 1 || truncation > kMaxTruncation) {
    throw ConfigError(fmt::format("n must lie in [1, {}]", kMaxTruncation));
  }
  if (!(oversample >= 1.0 && oversample <= 4.0)) throw ConfigError("oversample must lie in [1, 4]");
  if (!(dt > 0.0 && dt <= 1.0)) throw ConfigError("dt must lie in (0, 1]");
  if (!(t_max > 0.0 && t_max <= 1e4)) throw ConfigError("tmax must lie in (0, 1e4]");
  if (!(tol_converge > 0.0 && tol_converge < 1.0)) throw ConfigError("tol must lie in (0, 1)");
  if (monitor_stride < 1) throw ConfigError("stride must be >= 1");
  if (!preset.empty()) {
    if (background || initial) throw ConfigError("a preset fixes background and initial data; drop one of them");
  } else if (!background) {
    throw ConfigError("no background: give a preset or a background source");
  }
  if (background) check_source(*background, truncation, "background");
  if (initial) check_source(*initial, truncation, "initial");
  if (out_dir.empty()) throw ConfigError("out must not be empty");
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("config line {}: expected 'key = value'", line_no));
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(fmt::format("config line {}: empty key", line_no));
    if (out.count(key)) throw ConfigError(fmt::format("config line {}: duplicate key '{}'", line_no, key));
    out[key] = value;
  }
  return out;
}

void apply_config(RunSpec& spec, const std::map<std::string, std::string>& entries) {
  for (const auto& [key, value] : entries) {
    if (key == "n") spec.truncation = static_cast<int>(to_integer(value, key));
    else if (key == "oversample") spec.oversample = to_double(value, key);
    else if (key == "preset") spec.preset = value;
    else if (key == "background") spec.background = parse_source(value);
    else if (key == "initial") spec.initial = parse_source(value);
    else if (key == "integrator") {
      try {
        spec.integrator = parse_integrator(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "dt") spec.dt = to_double(value, key);
    else if (key == "tmax") spec.t_max = to_double(value, key);
    else if (key == "tol") spec.tol_converge = to_double(value, key);
    else if (key == "stride") spec.monitor_stride = static_cast<int>(to_integer(value, key));
    else if (key == "seed") spec.seed = static_cast<std::uint64_t>(to_integer(value, key));
    else if (key == "out") spec.out_dir = value;
    else throw ConfigError(fmt::format("unknown config key '{}'", key));
  }
}

Fields resolve_fields(const RunSpec& spec, const SpectralSpace& space) {
  if (!spec.preset.empty()) {
    try {
      auto preset = make_preset(spec.preset, space);
      return {std::move(preset.w), std::move(preset.lambda0)};
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  Fields f;
  f.w = field_from(*spec.background, space, spec.seed);
  f.lambda0 = spec.initial ? field_from(*spec.initial, space, spec.seed + 1) : SpectralField::zero(space.truncation());
  return f;
}

int cmd_spectrum(int truncation, const std::optional<std::filesystem::path>& out_dir, std::ostream& out) {
  if (truncation < 1 || truncation > kMaxTruncation) throw ConfigError(fmt::format("n must lie in [1, {}]", kMaxTruncation));
  const auto space = make_space(truncation, 1.0);
  const auto& ops = space->ops;
  out << "p,q,minus_sublaplacian,kohn,kohn_bar,paneitz\n";
  const Eigen::MatrixXcd minus_lap = -ops.sublaplacian.matrix.cast<std::complex<double>>();
  const Eigen::MatrixXcd paneitz = ops.paneitz.matrix.cast<std::complex<double>>();
  const double scale = 1.0 + ops.paneitz.matrix.cwiseAbs().maxCoeff();
  const auto value = [&](const Eigen::MatrixXcd& op, int p, int q) {
    const double v = harmonic_eigen(*space, op, p, q, 0).value;
    return std::abs(v) <= 1e-12 * scale ? 0.0 : v;
  };
  for (const auto& [p, q] : space->modes().bidegrees()) {
    out << fmt::format("{},{},{:.10g},{:.10g},{:.10g},{:.10g}\n", p, q, value(minus_lap, p, q),
                       value(ops.kohn.matrix, p, q), value(ops.kohn_bar.matrix, p, q), value(paneitz, p, q));
  }
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    write_atomic(*out_dir / "sublaplacian.csv", format_operator_csv(ops.sublaplacian));
    write_atomic(*out_dir / "reeb.csv", format_operator_csv(ops.reeb));
    write_atomic(*out_dir / "kohn.csv", format_operator_csv(ops.kohn));
    write_atomic(*out_dir / "kohn_bar.csv", format_operator_csv(ops.kohn_bar));
    write_atomic(*out_dir / "paneitz.csv", format_operator_csv(ops.paneitz));
  }
  return kExitOk;
}

int cmd_run(const RunSpec& spec, std::ostream& out) {
  spec.validate();
  const auto space = make_space(spec.truncation, spec.oversample);
  const Fields fields = resolve_fields(spec, *space);

  FlowConfig cfg;
  cfg.truncation = spec.truncation;
  cfg.oversample = spec.oversample;
  cfg.integrator = spec.integrator;
  cfg.dt = spec.dt;
  cfg.t_max = spec.t_max;
  cfg.tol_converge = spec.tol_converge;
  cfg.monitor_stride = spec.monitor_stride;

  Trajectory traj;
  std::optional<ConformalBackground> bg;
  try {
    bg = make_background(space, fields.w);
    const FlowState s0 = init_flow(*bg, fields.lambda0, cfg);
    traj = run_flow(*bg, s0, cfg);
  } catch (const NumericalError& e) {
    traj.status = RunStatus::numerical_failure;
    traj.failure = e.what();
  }

  nlohmann::ordered_json summary;
  auto& config = summary["config"];
  config["n"] = spec.truncation;
  config["oversample"] = spec.oversample;
  config["preset"] = spec.preset;
  config["background"] = spec.background ? spec.background->describe() : "";
  config["initial"] = spec.initial ? spec.initial->describe() : "";
  config["integrator"] = std::string(to_string(spec.integrator));
  config["dt"] = spec.dt;
  config["tmax"] = spec.t_max;
  config["tol"] = spec.tol_converge;
  config["stride"] = spec.monitor_stride;
  config["seed"] = spec.seed;
  summary["status"] = std::string(to_string(traj.status));
  summary["converged"] = traj.status == RunStatus::converged;
  if (!traj.failure.empty()) summary["failure"] = traj.failure;

  std::filesystem::create_directories(spec.out_dir);
  write_atomic(spec.out_dir / "trajectory.csv", format_trajectory_csv(traj.records));

  if (bg && !traj.records.empty()) {
    const auto& last = traj.records.back();
    const Eigen::VectorXd& lam = traj.states.back();
    write_atomic(spec.out_dir / "final_state.csv", format_spectral_csv({spec.truncation, lam}, space->modes()));

    auto& fin = summary["final"];
    fin["t"] = last.t;
    fin["energy"] = last.energy;
    fin["grad_norm_sq"] = last.grad_norm_sq;
    fin["q_l2"] = last.q_l2;
    fin["stationary_residual"] = stationary_residual(*bg, lam);
    fin["volume_drift"] = std::abs(last.volume - bg->volume()) / bg->volume();
    fin["kernel_residual"] = check_kernel_vanishing(*bg);

    double sup_fs42 = 0.0, sup_energy = -std::numeric_limits<double>::infinity();
    std::vector<double> ts, log_e;
    for (const auto& r : traj.records) {
      sup_fs42 = std::max(sup_fs42, r.fs42);
      sup_energy = std::max(sup_energy, r.energy);
      if (r.energy > 0.0) {
        ts.push_back(r.t);
        log_e.push_back(std::log(r.energy));
      }
    }
    summary["upsilon"] = number_or_null(essential_positivity(*bg));
    summary["sup_fs42"] = sup_fs42;
    summary["sup_energy"] = sup_energy;
    summary["energy_log_slope"] = number_or_null(least_squares_slope(ts, log_e));

    const Eigen::VectorXd ker0 = bg->kernel_coefficients(traj.states.front());
    const Eigen::VectorXd ker1 = bg->kernel_coefficients(lam);
    const double one = space->basis->constant_one()[0];
    summary["kernel_constant_shift"] = (ker1[0] - ker0[0]) * one / space->basis->constant_one().squaredNorm();

    const MonitorReport report = monitors(*bg, traj);
    auto& mons = summary["monitors"];
    mons = nlohmann::ordered_json::array();
    for (const auto& c : report.checks) {
      nlohmann::ordered_json m;
      m["name"] = c.name;
      m["applicable"] = c.applicable;
      m["passed"] = c.passed;
      m["measured"] = number_or_null(c.measured);
      m["threshold"] = number_or_null(c.threshold);
      if (!c.detail.empty()) m["detail"] = c.detail;
      mons.push_back(std::move(m));
    }
    summary["monitors_passed"] = report.all_passed();
  }
  write_atomic(spec.out_dir / "summary.json", summary.dump(2) + "\n");

  out << fmt::format("status {} records {}", to_string(traj.status), traj.records.size());
  if (!traj.records.empty()) {
    out << fmt::format(" t {} q_l2 {}", format_number(traj.records.back().t), format_number(traj.records.back().q_l2));
  }
  if (!traj.failure.empty()) out << " failure: " << traj.failure;
  out << "\n";

  switch (traj.status) {
    case RunStatus::converged: return kExitOk;
    case RunStatus::reached_t_max: return kExitTMax;
    case RunStatus::numerical_failure: return kExitNumerical;
  }
  return kExitNumerical;
}

int cmd_plotdata(const std::filesystem::path& input, const std::optional<std::filesystem::path>& output,
                 std::ostream& out, std::ostream& err) {
  std::vector<TrajectoryRecord> recs;
  try {
    recs = parse_trajectory_csv(read_text(input));
  } catch (const FormatError& e) {
    err << "plotdata: " << input.string() << ": " << e.what() << "\n";
    return kExitBadConfig;
  }

  const auto log_or_nan = [](double x) { return x > 0.0 ? std::log(x) : std::numeric_limits<double>::quiet_NaN(); };
  std::vector<double> t_e, log_e, t_g, log_g;
  for (const auto& r : recs) {
    if (r.energy > 0.0) {
      t_e.push_back(r.t);
      log_e.push_back(std::log(r.energy));
    }
    if (r.grad_norm_sq > 0.0) {
      t_g.push_back(r.t);
      log_g.push_back(std::log(r.grad_norm_sq));
    }
  }
  const double slope_e = least_squares_slope(t_e, log_e);
  const double slope_g = least_squares_slope(t_g, log_g);
  const double v0 = recs.front().volume;

  std::string text = "t,log_E,log_grad_norm_sq,volume_drift,fitted_slope_E,fitted_slope_grad\n";
  for (const auto& r : recs) {
    text += fmt::format("{},{},{},{},{},{}\n", format_number(r.t), format_number(log_or_nan(r.energy)),
                        format_number(log_or_nan(r.grad_norm_sq)), format_number((r.volume - v0) / v0),
                        format_number(slope_e), format_number(slope_g));
  }
  if (output) {
    write_atomic(*output, text);
  } else {
    out << text;
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (const char* threads = std::getenv("CRQFLOW_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) Eigen::setNbThreads(n);
  }

  CLI::App app{"Q-curvature flow experiments on the CR 3-sphere", "crqflow"};
  app.require_subcommand(1);

  int spectrum_n = 8;
  std::string spectrum_out;
  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalue table per (p,q) block as CSV");
  spectrum->add_option("--n", spectrum_n, "Truncation degree");
  spectrum->add_option("--out", spectrum_out, "Directory for operator CSVs");

  CheckOptions check_opts;
  std::string check_out;
  auto* check = app.add_subcommand("check", "Run the oracle suite");
  check->add_option("--n", check_opts.truncation, "Truncation degree");
  check->add_option("--oversample", check_opts.oversample, "Quadrature oversampling factor");
  check->add_option("--out", check_out, "Write constant estimates (name,N,value) to this CSV");
  check->add_option("--inject-fault", check_opts.inject_fault, "Corrupt an operator before checking (test hook)")
      ->group("");

  std::string config_path, preset, background, initial, integrator, run_out;
  std::optional<int> run_n;
  std::optional<double> run_oversample, run_dt, run_tmax, run_tol;
  std::optional<std::uint64_t> run_seed;
  auto* run = app.add_subcommand("run", "Run the flow and write trajectory, final state and summary");
  run->add_option("preset", preset, "sphere-trivial | sphere-mode11 | conformal-c03");
  run->add_option("--config", config_path, "key = value configuration file");
  run->add_option("--n", run_n, "Truncation degree");
  run->add_option("--oversample", run_oversample, "Quadrature oversampling factor");
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--seed", run_seed, "Seed for random sources");
  run->add_option("--integrator", integrator, "exact_perp | imex_cn");
  run->add_option("--dt", run_dt, "Time step");
  run->add_option("--tmax", run_tmax, "Final time");
  run->add_option("--tol", run_tol, "Convergence tolerance on the gradient norm");
  run->add_option("--background", background, "zero | mode11:<amp> | file:<path> | random:<degree>:<amp>");
  run->add_option("--initial", initial, "Initial lambda0, same grammar as --background");

  std::string plot_in, plot_out;
  auto* plot = app.add_subcommand("plotdata", "Derived plotting columns from a trajectory CSV");
  plot->add_option("input", plot_in, "trajectory.csv")->required();
  plot->add_option("--out", plot_out, "Output CSV (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "crqflow: " << e.what() << "\n";
    return kExitBadConfig;
  }

  try {
    if (*spectrum) {
      std::optional<std::filesystem::path> dir;
      if (!spectrum_out.empty()) dir = spectrum_out;
      return cmd_spectrum(spectrum_n, dir, out);
    }
    if (*check) {
      if (!check_out.empty()) check_opts.constants_csv = check_out;
      if (check_opts.truncation < 1 || check_opts.truncation > kMaxTruncation) {
        throw ConfigError(fmt::format("n must lie in [1, {}]", kMaxTruncation));
      }
      if (!(check_opts.oversample >= 1.0 && check_opts.oversample <= 4.0)) {
        throw ConfigError("oversample must lie in [1, 4]");
      }
      return cmd_check(check_opts, out);
    }
    if (*run) {
      RunSpec spec;
      if (!config_path.empty()) {
        std::string text;
        try {
          text = read_text(config_path);
        } catch (const std::exception& e) {
          throw ConfigError(e.what());
        }
        apply_config(spec, parse_config_text(text));
      }
      if (!preset.empty()) spec.preset = preset;
      if (run_n) spec.truncation = *run_n;
      if (run_oversample) spec.oversample = *run_oversample;
      if (run_dt) spec.dt = *run_dt;
      if (run_tmax) spec.t_max = *run_tmax;
      if (run_tol) spec.tol_converge = *run_tol;
      if (run_seed) spec.seed = *run_seed;
      if (!run_out.empty()) spec.out_dir = run_out;
      if (!background.empty()) spec.background = parse_source(background);
      if (!initial.empty()) spec.initial = parse_source(initial);
      if (!integrator.empty()) {
        try {
          spec.integrator = parse_integrator(integrator);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
      return cmd_run(spec, out);
    }
    if (*plot) {
      std::optional<std::filesystem::path> dest;
      if (!plot_out.empty()) dest = plot_out;
      return cmd_plotdata(plot_in, dest, out, err);
    }
  } catch (const ConfigError& e) {
    err << "crqflow: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::exception& e) {
    err << "crqflow: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitBadConfig;
}

}  // namespace crq::cli
