// rismp command-line front end: assembles RIS link scenarios, runs the
// termination experiments and emits tables or plot-ready CSV.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rismp/rismp.hpp"

namespace {

using rismp::Complex;

constexpr int kExitCrossCheckFailure = 3;
constexpr double kModelIdentityTol = 1e-10;   // relative, D vs H vs theta form
constexpr double kOracleAgreementTol = 1e-6;  // relative, optimizer vs grid

// Full-precision scientific notation (17 significant digits) so downstream
// plotting never re-rounds; -inf is rendered as the literal token "-inf".
std::string csv_number(double value) {
  if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.16e", value);
  return buffer;
}

std::string pretty_number(double value, int precision = 6) {
  if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.*f", precision, value);
  return buffer;
}

struct OutputTarget {
  std::ofstream file;
  std::ostream* stream = &std::cout;

  explicit OutputTarget(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    if (!file) throw rismp::Error("cannot open output file '" + path + "'");
    stream = &file;
  }
  std::ostream& out() { return *stream; }
};

void print_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  auto print_row = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "  " : "") << row[c]
          << std::string(width[c] - row[c].size(), ' ');
    }
    out << "\n";
  };
  print_row(header);
  for (std::size_t c = 0; c < header.size(); ++c) {
    out << (c ? "  " : "") << std::string(width[c], '-');
  }
  out << "\n";
  for (const auto& row : rows) print_row(row);
}

void emit(std::ostream& out, const std::string& format,
          const std::vector<std::string>& header,
          const std::vector<std::vector<std::string>>& csv_rows,
          const std::vector<std::vector<std::string>>& pretty_rows) {
  if (format == "csv") {
    for (std::size_t c = 0; c < header.size(); ++c) {
      out << (c ? "," : "") << header[c];
    }
    out << "\n";
    for (const auto& row : csv_rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
      out << "\n";
    }
  } else {
    print_table(out, header, pretty_rows);
  }
}

// Minimal deterministic parallel map: results land in row order no matter
// which thread finishes first.
template <class Fn>
void parallel_rows(std::size_t count, Fn&& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = unsigned(std::min<std::size_t>(hw, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

struct CommonScenarioFlags {
  double d_rs = 100.0;  // Tx->RIS path, wavelengths
  double d_dr = 1000.0; // RIS->Rx path, wavelengths
  double r = 50.0;
  double lambda = 1.0;
};

void add_scenario_flags(CLI::App* cmd, CommonScenarioFlags& flags) {
  cmd->add_option("--d-rs", flags.d_rs,
                  "Tx->RIS path length of the reference element, in wavelengths")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--d-dr", flags.d_dr,
                  "RIS->Rx path length of the reference element, in wavelengths")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--r", flags.r, "port resistance in ohms")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--lambda", flags.lambda, "wavelength in meters")
      ->check(CLI::PositiveNumber);
}

// ---------------------------------------------------------------------------
// table1: single-element termination sweep (phase and magnitude of the
// normalized transfer for x = X/R in {-inf, -1, 0, 1, inf} plus extras).
// ---------------------------------------------------------------------------

int run_table1(const CommonScenarioFlags& flags,
               const std::vector<double>& extra_x, const std::string& output,
               const std::string& format) {
  const rismp::Scenario scenario = rismp::single_element_link(
      flags.r, flags.lambda, flags.d_rs, flags.d_dr);
  const rismp::MultiportImpedance z = rismp::build_unilateral_multiport(scenario);

  struct Row {
    double x;
    bool surrogate;
  };
  std::vector<Row> rows = {{-std::numeric_limits<double>::infinity(), true},
                           {-1.0, false},
                           {0.0, false},
                           {1.0, false},
                           {std::numeric_limits<double>::infinity(), true}};
  for (double x : extra_x) rows.push_back({x, false});

  std::vector<std::vector<std::string>> csv_rows, pretty_rows;
  for (const Row& row : rows) {
    double x = row.x;
    if (row.surrogate) {
      x = std::copysign(rismp::kOpenCircuitSurrogateFactor, row.x);
    }
    Eigen::VectorXd reactance(1);
    reactance << x * flags.r;
    const auto term = rismp::RisTermination::from_reactances(reactance, flags.r);
    const auto result = rismp::normalize_transfer(
        rismp::transfer_impedance(z, term), scenario);
    const Complex d0 = (*result.normalized)(0, 0);
    const double phi_deg = std::arg(d0) * 180.0 / rismp::kPi;
    const double magnitude = std::abs(d0);
    const double gain_db = result.power_gain_db()(0, 0);

    const std::string x_text =
        std::isinf(row.x) ? (row.x < 0 ? "-inf" : "inf") : csv_number(row.x);
    const std::string x_pretty =
        std::isinf(row.x) ? x_text : pretty_number(row.x, 3);
    csv_rows.push_back({x_text, csv_number(phi_deg), csv_number(magnitude),
                        csv_number(gain_db), row.surrogate ? "1" : "0"});
    pretty_rows.push_back({x_pretty, pretty_number(phi_deg, 2),
                           pretty_number(magnitude), pretty_number(gain_db, 2),
                           row.surrogate ? "yes" : "no"});
  }

  OutputTarget target(output);
  emit(target.out(), format, {"x", "phi_deg", "magnitude", "gain_db", "surrogate"},
       csv_rows, pretty_rows);
  return 0;
}

// ---------------------------------------------------------------------------
// table2: optimum two-element design at the five canonical spacings, with
// the exhaustive grid oracle alongside the local search.
// ---------------------------------------------------------------------------

int run_table2(const CommonScenarioFlags& flags, std::uint64_t seed,
               double grid_step, const std::string& output,
               const std::string& format) {
  const std::vector<double> spacings = {0.0, 0.25, 0.5, 0.75, 1.0};

  std::vector<std::vector<std::string>> csv_rows, pretty_rows;
  bool cross_check_failed = false;
  for (double spacing : spacings) {
    rismp::OptimizationProblem problem;
    problem.scenario = rismp::two_element_link(spacing, flags.r, flags.lambda,
                                               flags.d_rs, flags.d_dr);
    problem.model = rismp::ModelKind::physical;
    problem.domain = rismp::VariableDomain::phase;
    rismp::OptimizationReport report = rismp::local_search(problem, 16, seed);

    rismp::OptimizationProblem grid_problem = problem;
    grid_problem.domain = rismp::VariableDomain::reactance;
    const rismp::OptimizationReport oracle =
        rismp::grid_oracle(grid_problem, rismp::GridAxis{-3.0, 3.0, grid_step});

    const double gap =
        std::abs(report.best_gain - oracle.best_gain) / oracle.best_gain;
    report.oracle_gap = gap;
    if (!(gap <= kOracleAgreementTol)) {
      std::cerr << "cross-check failure: optimizer gain " << report.best_gain
                << " vs grid oracle " << oracle.best_gain << " at d/lambda = "
                << spacing << " (relative gap " << gap << ")\n";
      cross_check_failed = true;
    }

    const double x1 = report.best_reactances[0];
    const double x2 = report.best_reactances[1];
    csv_rows.push_back({csv_number(spacing), csv_number(x1), csv_number(x2),
                        csv_number(report.best_gain),
                        csv_number(report.best_gain_db),
                        csv_number(oracle.best_gain)});
    pretty_rows.push_back({pretty_number(spacing, 2), pretty_number(x1, 4),
                           pretty_number(x2, 4),
                           pretty_number(report.best_gain, 4),
                           pretty_number(report.best_gain_db, 2),
                           pretty_number(oracle.best_gain, 4)});
  }

  OutputTarget target(output);
  emit(target.out(), format,
       {"d_over_lambda", "x1", "x2", "gain", "gain_db", "gain_oracle"},
       csv_rows, pretty_rows);
  return cross_check_failed ? kExitCrossCheckFailure : 0;
}

// ---------------------------------------------------------------------------
// sweep: the five model-comparison curves over the element spacing.
// ---------------------------------------------------------------------------

int run_sweep(const CommonScenarioFlags& flags, double spacing_min,
              double spacing_max, std::size_t steps, std::uint64_t trials,
              std::uint64_t seed, const std::string& output) {
  struct SweepRow {
    double spacing = 0.0;
    double physical_opt_db = 0.0;
    double conventional_opt_db = 0.0;
    double cross_applied_db = 0.0;
    double random_physical_db = 0.0;
    double random_conventional_db = 0.0;
    bool identity_ok = true;
  };
  std::vector<SweepRow> rows(steps);

  parallel_rows(steps, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.spacing = steps == 1 ? spacing_min
                             : spacing_min + (spacing_max - spacing_min) *
                                                 double(i) / double(steps - 1);
    const rismp::Scenario scenario = rismp::two_element_link(
        row.spacing, flags.r, flags.lambda, flags.d_rs, flags.d_dr);

    rismp::OptimizationProblem physical;
    physical.scenario = scenario;
    physical.model = rismp::ModelKind::physical;
    const auto physical_opt = rismp::local_search(physical, 16, seed);
    row.physical_opt_db = physical_opt.best_gain_db;

    // Internal identity check: the optimized termination must give the same
    // gain through the impedance-domain transfer as through the theta form
    // used by the optimizer.
    {
      const auto term = rismp::RisTermination::from_phases(
          physical_opt.best_variables, flags.r);
      const auto z = rismp::build_unilateral_multiport(scenario);
      const auto via_theta = rismp::normalize_transfer(
          rismp::transfer_theta_form(z, term), scenario);
      const auto via_s = rismp::normalize_transfer(
          rismp::transfer_scattering(rismp::blockwise_z_to_s(z, flags.r), term),
          scenario);
      const double g1 = via_theta.normalized->squaredNorm();
      const double g2 = via_s.normalized->squaredNorm();
      const double scale = std::max({g1, g2, 1e-300});
      if (std::abs(g1 - physical_opt.best_gain) / scale > kModelIdentityTol ||
          std::abs(g2 - physical_opt.best_gain) / scale > kModelIdentityTol) {
        row.identity_ok = false;
      }
    }

    rismp::OptimizationProblem conventional = physical;
    conventional.model = rismp::ModelKind::conventional;
    row.conventional_opt_db = rismp::local_search(conventional, 16, seed).best_gain_db;

    row.cross_applied_db = rismp::cross_apply(physical, 0.0, 16, seed).best_gain_db;

    row.random_physical_db =
        rismp::random_phase_baseline(physical, trials, seed).mean_gain_db();
    row.random_conventional_db =
        rismp::random_phase_baseline(conventional, trials, seed).mean_gain_db();
  });

  OutputTarget target(output);
  std::ostream& out = target.out();
  out << "d_over_lambda,gain_physical_opt_db,gain_conventional_opt_db,"
         "gain_cross_applied_db,gain_random_physical_db,"
         "gain_random_conventional_db\n";
  bool identity_failed = false;
  for (const SweepRow& row : rows) {
    out << csv_number(row.spacing) << ',' << csv_number(row.physical_opt_db)
        << ',' << csv_number(row.conventional_opt_db) << ','
        << csv_number(row.cross_applied_db) << ','
        << csv_number(row.random_physical_db) << ','
        << csv_number(row.random_conventional_db) << '\n';
    identity_failed = identity_failed || !row.identity_ok;
  }
  if (identity_failed) {
    std::cerr << "cross-check failure: impedance/scattering transfer identity "
                 "violated at the optimum of at least one row\n";
    return kExitCrossCheckFailure;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// convert: Z <-> S block file conversion with the direct-block dependency
// report.
// ---------------------------------------------------------------------------

int run_convert(const std::string& input, const std::string& output) {
  const rismp::MultiportFile file = rismp::read_multiport_file(input);

  rismp::MultiportFile converted;
  converted.partition = file.partition;
  converted.port_resistance = file.port_resistance;
  if (file.kind == rismp::MultiportFile::Kind::impedance) {
    converted.kind = rismp::MultiportFile::Kind::scattering;
    converted.dense =
        rismp::z_to_s(file.dense, file.port_resistance);
  } else {
    converted.kind = rismp::MultiportFile::Kind::impedance;
    converted.dense = rismp::s_to_z(file.dense, file.port_resistance);
  }

  // Whenever a direct block is zero on the impedance side, surface the
  // deterministic dependency S_rx_tx = -S_rx_ris S_ris_tx of the wave
  // description.
  const rismp::MultiportScattering s =
      converted.kind == rismp::MultiportFile::Kind::scattering
          ? converted.as_scattering()
          : file.as_scattering();
  const rismp::MultiportImpedance zz =
      converted.kind == rismp::MultiportFile::Kind::impedance
          ? converted.as_impedance()
          : file.as_impedance();
  if (zz.rx_from_tx().cwiseAbs().maxCoeff() == 0.0) {
    const Eigen::MatrixXcd cascade = s.rx_from_ris() * s.ris_from_tx();
    const double residual = (s.rx_from_tx() + cascade).norm();
    const double scale = cascade.norm();
    std::cerr << "direct impedance block is zero; scattering direct block "
                 "obeys S_rx_tx = -S_rx_ris * S_ris_tx with residual "
              << csv_number(residual) << " (relative "
              << csv_number(scale > 0 ? residual / scale : 0.0) << ")\n";
  }

  if (output.empty() || output == "-") {
    rismp::write_multiport(std::cout, converted);
  } else {
    rismp::write_multiport_file(output, converted);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval: evaluate one termination on a scenario under a chosen model and
// cross-check the three physical transfer routes.
// ---------------------------------------------------------------------------

int run_eval(const CommonScenarioFlags& flags, const std::string& scenario_path,
             int elements, double spacing, const std::string& model,
             std::vector<double> x_values, std::vector<double> phase_deg,
             const std::string& output, const std::string& format) {
  rismp::Scenario scenario =
      !scenario_path.empty()
          ? rismp::read_scenario_file(scenario_path)
          : (elements == 2
                 ? rismp::two_element_link(spacing, flags.r, flags.lambda,
                                           flags.d_rs, flags.d_dr)
                 : rismp::single_element_link(flags.r, flags.lambda, flags.d_rs,
                                              flags.d_dr));
  const double r = scenario.config.port_resistance;
  const Eigen::Index n = scenario.config.ris_elements;

  if (!x_values.empty() && !phase_deg.empty()) {
    std::cerr << "give either --x or --phase-deg, not both\n";
    return 1;
  }
  if (x_values.empty() && phase_deg.empty()) {
    x_values.assign(std::size_t(n), 0.0);
  }
  rismp::RisTermination term = [&] {
    if (!phase_deg.empty()) {
      if (Eigen::Index(phase_deg.size()) != n) {
        throw rismp::Error("--phase-deg needs one value per RIS element");
      }
      Eigen::VectorXd phi(n);
      for (Eigen::Index k = 0; k < n; ++k) {
        phi[k] = phase_deg[std::size_t(k)] * rismp::kPi / 180.0;
      }
      return rismp::RisTermination::from_phases(phi, r);
    }
    if (Eigen::Index(x_values.size()) != n) {
      throw rismp::Error("--x needs one value per RIS element");
    }
    Eigen::VectorXd reactance(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      reactance[k] = x_values[std::size_t(k)] * r;
    }
    return rismp::RisTermination::from_reactances(reactance, r);
  }();

  const rismp::MultiportImpedance z = rismp::build_unilateral_multiport(scenario);
  const rismp::MultiportScattering s = rismp::blockwise_z_to_s(z, r);

  rismp::TransferResult result =
      model == "conventional"
          ? rismp::transfer_conventional(s, term, scenario.geometry.blocked_direct())
          : rismp::transfer_theta_form(z, term);
  result = rismp::normalize_transfer(std::move(result), scenario);

  // D = H = theta-form identity check on the physical routes.
  double max_deviation = 0.0;
  if (model != "conventional") {
    std::vector<rismp::TransferResult> routes;
    routes.push_back(rismp::transfer_scattering(s, term));
    routes.push_back(rismp::transfer_theta_form(z, term));
    try {
      routes.push_back(rismp::transfer_impedance(
          z, rismp::RisTermination::from_reactances(
                 term.reactances_or_surrogate(), r)));
    } catch (const rismp::OpenCircuitError&) {
    }
    const double scale = std::max(routes.front().matrix.norm(), 1e-300);
    for (std::size_t a = 0; a < routes.size(); ++a) {
      for (std::size_t b = a + 1; b < routes.size(); ++b) {
        max_deviation =
            std::max(max_deviation,
                     (routes[a].matrix - routes[b].matrix).norm() / scale);
      }
    }
  }

  OutputTarget target(output);
  std::ostream& out = target.out();
  std::vector<std::vector<std::string>> csv_rows, pretty_rows;
  for (Eigen::Index i = 0; i < result.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < result.matrix.cols(); ++j) {
      const Complex raw = result.matrix(i, j);
      const Complex normalized = (*result.normalized)(i, j);
      const double gain_db = result.power_gain_db()(i, j);
      csv_rows.push_back({std::to_string(i), std::to_string(j),
                          csv_number(raw.real()), csv_number(raw.imag()),
                          csv_number(normalized.real()),
                          csv_number(normalized.imag()),
                          csv_number(std::abs(normalized)),
                          csv_number(gain_db)});
      pretty_rows.push_back(
          {std::to_string(i), std::to_string(j), pretty_number(raw.real(), 9),
           pretty_number(raw.imag(), 9), pretty_number(normalized.real()),
           pretty_number(normalized.imag()),
           pretty_number(std::abs(normalized)), pretty_number(gain_db, 3)});
    }
  }
  emit(out, format,
       {"rx", "tx", "raw_re", "raw_im", "norm_re", "norm_im", "magnitude",
        "gain_db"},
       csv_rows, pretty_rows);

  if (model != "conventional") {
    std::cerr << "transfer-route max relative deviation: "
              << csv_number(max_deviation) << "\n";
    if (!(max_deviation <= kModelIdentityTol)) {
      std::cerr << "cross-check failure: transfer routes disagree beyond "
                << kModelIdentityTol << "\n";
      return kExitCrossCheckFailure;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physically consistent multiport model of RIS-aided links"};
  app.require_subcommand(1);

  CommonScenarioFlags flags;
  std::string output;
  std::string format = "pretty";
  std::uint64_t seed = 0;

  auto add_output_flags = [&](CLI::App* cmd, bool with_format = true) {
    cmd->add_option("--output", output, "output path ('-' = stdout)");
    if (with_format) {
      cmd->add_option("--format", format, "output format")
          ->check(CLI::IsMember({"csv", "pretty"}));
    }
  };

  // table1
  std::vector<double> extra_x;
  CLI::App* table1 = app.add_subcommand(
      "table1", "single-element termination sweep (phase vs amplitude)");
  add_scenario_flags(table1, flags);
  add_output_flags(table1);
  table1->add_option("--x", extra_x, "additional normalized reactances X/R");

  // table2
  double grid_step = 1e-3;
  CLI::App* table2 = app.add_subcommand(
      "table2", "optimum two-element design at the five canonical spacings");
  add_scenario_flags(table2, flags);
  add_output_flags(table2);
  table2->add_option("--seed", seed, "seed for the multi-start optimizer");
  table2->add_option("--grid-step", grid_step,
                     "grid oracle step over x in [-3, 3]")
      ->check(CLI::PositiveNumber);

  // sweep
  double spacing_min = 0.0, spacing_max = 1.0;
  std::size_t spacing_steps = 201;
  std::uint64_t trials = 100000;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "model-comparison curves over the element spacing (CSV)");
  add_scenario_flags(sweep, flags);
  sweep->add_option("--spacing-min", spacing_min, "first d/lambda value");
  sweep->add_option("--spacing-max", spacing_max, "last d/lambda value");
  sweep->add_option("--spacing-steps", spacing_steps, "number of rows")
      ->check(CLI::Range(std::size_t(2), std::size_t(1000000)));
  sweep->add_option("--trials", trials, "Monte-Carlo trials per baseline row")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--seed", seed, "seed for optimizer starts and baselines");
  sweep->add_option("--output", output, "output path ('-' = stdout)");

  // convert
  std::string input_path;
  CLI::App* convert = app.add_subcommand(
      "convert", "convert a multiport block file between Z and S parameters");
  convert->add_option("--input", input_path, "input block file")->required();
  convert->add_option("--output", output, "output path ('-' = stdout)");

  // eval
  std::string scenario_path, model = "physical";
  int elements = 1;
  double spacing = 0.5;
  std::vector<double> x_values, phase_deg;
  CLI::App* eval = app.add_subcommand(
      "eval", "evaluate one termination and cross-check the transfer routes");
  add_scenario_flags(eval, flags);
  add_output_flags(eval);
  eval->add_option("--scenario", scenario_path, "scenario file (overrides flags)");
  eval->add_option("--elements", elements, "1 or 2 RIS elements")
      ->check(CLI::IsMember({1, 2}));
  eval->add_option("--d", spacing, "element spacing d/lambda (2-element only)");
  eval->add_option("--model", model, "transfer model")
      ->check(CLI::IsMember({"physical", "conventional"}));
  eval->add_option("--x", x_values, "normalized reactances X/R, one per element");
  eval->add_option("--phase-deg", phase_deg,
                   "reflection phases in degrees, one per element");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*table1) return run_table1(flags, extra_x, output, format);
    if (*table2) return run_table2(flags, seed, grid_step, output, format);
    if (*sweep) {
      return run_sweep(flags, spacing_min, spacing_max, spacing_steps, trials,
                       seed, output);
    }
    if (*convert) return run_convert(input_path, output);
    if (*eval) {
      return run_eval(flags, scenario_path, elements, spacing, model, x_values,
                      phase_deg, output, format);
    }
  } catch (const rismp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
