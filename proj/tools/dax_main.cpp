#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dax/config.hpp"
#include "dax/errors.hpp"
#include "dax/experiment.hpp"
#include "dax/theory_checks.hpp"

namespace {

constexpr const char* kVersion = "dax 1.0.0";

int print_report(const dax::CheckReport& report) {
  for (const std::string& line : report.lines) std::cout << "  " << line << "\n";
  std::cout << (report.passed ? "PASS" : "FAIL") << " " << report.name << "\n";
  return report.passed ? 0 : 1;
}

std::vector<double> default_spectrum(int d) {
  // geometric decay with a clear gap everywhere in the leading part
  std::vector<double> values(d);
  double v = 8.0;
  for (int i = 0; i < d; ++i) {
    values[i] = v;
    v *= 0.6;
  }
  return values;
}

struct CheckFlags {
  int d = 2;
  int members = 5;
  int reps = 20000;
  int kappa = 2;
  int n_state = 4;
  std::uint64_t seed = 1;
};

void add_common_flags(CLI::App* cmd, CheckFlags& flags) {
  cmd->add_option("--d", flags.d, "Residual dimension");
  cmd->add_option("--N", flags.members, "Ensemble size");
  cmd->add_option("--reps", flags.reps, "Monte Carlo replications");
  cmd->add_option("--seed", flags.seed, "RNG seed");
}

dax::GaussianResidualModel model_for(const CheckFlags& flags, int kappa) {
  return dax::GaussianResidualModel::with_spectrum(default_spectrum(flags.d), kappa,
                                                   dax::splitmix64(flags.seed));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble data assimilation twin experiments on the Lorenz-96 model"};
  app.require_subcommand(1);

  // --- run ---
  auto* run_cmd = app.add_subcommand("run", "Run the assimilation experiment");
  std::string config_path;
  std::string method_arg;
  int trials_arg = -1;
  std::int64_t seed_arg = -1;
  std::string out_arg;
  run_cmd->add_option("--config", config_path, "Path to a key = value config file")->required();
  run_cmd->add_option("--method", method_arg, "seq-enkf | 4d-enkf | qpca-endcf | all");
  run_cmd->add_option("--trials", trials_arg, "Override the number of trials");
  run_cmd->add_option("--seed", seed_arg, "Override the base seed");
  run_cmd->add_option("--out", out_arg, "Override the output directory");

  // --- check-theory ---
  auto* check_cmd = app.add_subcommand("check-theory", "Monte Carlo validation checks");
  check_cmd->require_subcommand(1);

  CheckFlags unbias_flags;
  unbias_flags.d = 3;
  unbias_flags.reps = 10000;
  auto* unbias_cmd = check_cmd->add_subcommand("unbiasedness", "Sample-covariance mean");
  add_common_flags(unbias_cmd, unbias_flags);

  CheckFlags wishart_flags;
  auto* wishart_cmd = check_cmd->add_subcommand("wishart", "Frobenius deviation identity");
  add_common_flags(wishart_cmd, wishart_flags);

  CheckFlags eigen_flags;
  eigen_flags.d = 6;
  eigen_flags.members = 24;
  eigen_flags.reps = 500;
  auto* eigen_cmd =
      check_cmd->add_subcommand("eigen-perturbation", "Eigenvalue and projector bounds");
  add_common_flags(eigen_cmd, eigen_flags);
  eigen_cmd->add_option("--kappa", eigen_flags.kappa, "Retained rank");

  CheckFlags pvar_flags;
  pvar_flags.d = 6;
  pvar_flags.members = 10;
  auto* pvar_cmd =
      check_cmd->add_subcommand("perturbation-variance", "Mean-perturbation variance identity");
  add_common_flags(pvar_cmd, pvar_flags);
  pvar_cmd->add_option("--n", pvar_flags.n_state, "State dimension of the gain");

  CheckFlags fourth_flags;
  fourth_flags.d = 4;
  fourth_flags.members = 8;
  auto* fourth_cmd =
      check_cmd->add_subcommand("fourth-moment", "Sample-mean fourth-moment scaling");
  add_common_flags(fourth_cmd, fourth_flags);

  auto* version_cmd = app.add_subcommand("version", "Print version and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (version_cmd->parsed()) {
      std::cout << kVersion << "\n";
      return 0;
    }

    if (run_cmd->parsed()) {
      dax::ExperimentConfig cfg = dax::load_config(config_path);
      if (!method_arg.empty()) {
        if (method_arg == "all") {
          cfg.methods = {dax::Method::kSeqEnkf, dax::Method::kFourdEnkf,
                         dax::Method::kQpcaEndcf};
        } else {
          const auto method = dax::parse_method(method_arg);
          if (!method) throw dax::ConfigError("unknown method '" + method_arg + "'");
          cfg.methods = {*method};
        }
      }
      if (trials_arg >= 0) cfg.n_trials = trials_arg;
      if (seed_arg >= 0) cfg.base_seed = static_cast<std::uint64_t>(seed_arg);
      if (!out_arg.empty()) cfg.output_dir = out_arg;
      cfg.validate();

      const dax::ResultBundle bundle = dax::run_experiment(cfg);
      dax::write_outputs(bundle, cfg.output_dir);
      dax::print_summary(bundle, std::cout);
      std::cout << "outputs written to " << cfg.output_dir << "\n";
      return 0;
    }

    if (unbias_cmd->parsed()) {
      dax::RngStream rng(unbias_flags.seed);
      return print_report(dax::cov_unbiasedness_check(model_for(unbias_flags, 1),
                                                      unbias_flags.members, unbias_flags.reps,
                                                      rng));
    }
    if (wishart_cmd->parsed()) {
      dax::RngStream rng(wishart_flags.seed);
      return print_report(dax::wishart_frobenius_check(model_for(wishart_flags, 1),
                                                       wishart_flags.members,
                                                       wishart_flags.reps, rng));
    }
    if (eigen_cmd->parsed()) {
      dax::RngStream rng(eigen_flags.seed);
      return print_report(dax::eigen_perturbation_check(
          model_for(eigen_flags, eigen_flags.kappa), eigen_flags.members, eigen_flags.reps,
          rng));
    }
    if (pvar_cmd->parsed()) {
      dax::RngStream gain_rng(dax::splitmix64(pvar_flags.seed));
      const Eigen::MatrixXd gain = gain_rng.normal_matrix(pvar_flags.n_state, pvar_flags.d);
      const Eigen::MatrixXd r = 2.25 * Eigen::MatrixXd::Identity(pvar_flags.d, pvar_flags.d);
      dax::RngStream rng(pvar_flags.seed);
      return print_report(dax::enkf_perturbation_variance_check(gain, r, pvar_flags.members,
                                                                pvar_flags.reps, rng));
    }
    if (fourth_cmd->parsed()) {
      dax::RngStream rng(fourth_flags.seed);
      return print_report(dax::sample_mean_fourth_moment_check(model_for(fourth_flags, 1),
                                                               fourth_flags.members,
                                                               fourth_flags.reps, rng));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
