// sigbsde: command-line front end for the benchmark experiments.
//
//   sigbsde run --benchmark entropic --out results
//   sigbsde scale --benchmark cir --sizes 512,1024,2048 --out results
//   sigbsde train-air --checkpoint air.txt
//   sigbsde solve-air --checkpoint air.txt --out results
//
// Every subcommand accepts --config FILE with flat `key = value` lines whose
// keys are the long option names.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "sigbsde/errors.hpp"
#include "sigbsde/experiment.hpp"
#include "sigbsde/mlp.hpp"

using namespace sigbsde;

namespace {

// Reads flat `key = value` files and files the keys under the subcommand
// being run, so that they bind to that subcommand's options.
class ScopedConfig : public CLI::ConfigTOML {
 public:
  std::string subcommand;

  std::vector<CLI::ConfigItem> from_config(std::istream& is) const override {
    auto items = CLI::ConfigTOML::from_config(is);
    for (auto& item : items) {
      if (item.parents.empty()) item.parents = {subcommand};
    }
    return items;
  }
};

struct Options {
  ExperimentConfig cfg;
  std::string scheme = "explicit";
  std::string z_estimator = "centered";
  std::vector<Eigen::Index> sizes{512, 1024, 2048, 4096, 8192};
  std::string checkpoint;
  bool analytic = false;
  TrainConfig train;
  int hidden_layers = 3;
  int hidden_units = 11;
};

void add_experiment_flags(CLI::App* app, Options& o, bool with_benchmark) {
  auto& c = o.cfg;
  if (with_benchmark) {
    app->add_option("--benchmark", c.benchmark, "linear | entropic | cir | ambiguous")
        ->capture_default_str();
  }
  app->add_option("--samples,-M", c.samples, "Monte Carlo sample size")->capture_default_str();
  app->add_option("--steps,-N", c.steps, "time steps")->capture_default_str();
  app->add_option("--horizon,-T", c.horizon, "terminal time")->capture_default_str();
  app->add_option("--depth,-D", c.depth, "signature truncation depth")->capture_default_str();
  app->add_option("--ridge", c.ridge, "ridge penalty lambda")->capture_default_str();
  app->add_flag("--normalize-time", c.normalize_time, "rescale the time coordinate to [0, 1]");
  app->add_option("--iterations", c.iterations, "independent repetitions")->capture_default_str();
  app->add_option("--seed", c.seed, "base seed")->capture_default_str();
  app->add_option("--scheme", o.scheme, "explicit | implicit")->capture_default_str();
  app->add_option("--picard-iters", c.picard_iters, "fixed-point sweeps of the implicit scheme")
      ->capture_default_str();
  app->add_option("--picard-tol", c.picard_tol)->capture_default_str();
  app->add_option("--z-estimator", o.z_estimator, "plain | centered")->capture_default_str();
  app->add_option("--out", c.out_dir, "output directory; nothing is written when omitted");
  app->add_option("--dump-samples", c.dump_samples, "samples written to paths.csv")
      ->capture_default_str();
  auto& p = c.params;
  app->add_option("--theta", p.theta, "entropic risk aversion")->capture_default_str();
  app->add_option("--beta", p.beta, "linear benchmark exponent")->capture_default_str();
  app->add_option("--cir-a", p.cir_speed)->capture_default_str();
  app->add_option("--cir-b", p.cir_level)->capture_default_str();
  app->add_option("--cir-sigma", p.cir_sigma)->capture_default_str();
  app->add_option("--cir-x0", p.cir_x0)->capture_default_str();
  app->add_option("--rate-lower", p.rate_lower, "r")->capture_default_str();
  app->add_option("--rate-upper", p.rate_upper, "R")->capture_default_str();
}

void finish_config(Options& o) {
  o.cfg.scheme = parse_scheme(o.scheme);
  o.cfg.z_estimator = parse_z_estimator(o.z_estimator);
}

void print_report(const ErrorReport& rep) {
  std::cout << "benchmark " << rep.benchmark << ": " << rep.iterations.size() << " iterations, "
            << rep.failures() << " failed, " << rep.runtime_s << " s\n";
  if (rep.oracle_only) {
    std::cout << "  erl2: oracle-only (no closed form)\n";
  } else {
    std::cout << "  erl2 mean " << rep.mean << "  std " << rep.std_dev << '\n';
  }
}

int run(Options& o) {
  finish_config(o);
  const auto rep = run_experiment(o.cfg);
  print_report(rep);
  return rep.failures() == rep.iterations.size() ? 3 : 0;
}

int scale(Options& o) {
  finish_config(o);
  const auto study = scaling_study(o.cfg, o.sizes);
  std::cout << "samples,mean_erl2,std_erl2\n";
  for (const auto& r : study.rows) {
    std::cout << r.samples << ',' << r.mean_erl2 << ',' << r.std_erl2 << '\n';
  }
  if (study.slope) {
    std::cout << "log-log slope " << *study.slope << '\n';
  } else {
    std::cout << "log-log slope degenerate\n";
  }
  return 0;
}

int train_air(Options& o) {
  if (o.checkpoint.empty()) throw CLI::RequiredError("--checkpoint");
  const auto result = train(make_mlp(air_layer_sizes(o.hidden_layers, o.hidden_units), o.train.seed),
                            o.train);
  std::ofstream os(o.checkpoint);
  if (!os) throw std::runtime_error("cannot write " + o.checkpoint);
  save_checkpoint(os, result.params);
  const auto loss_path = std::filesystem::path(o.checkpoint).replace_extension(".loss.csv");
  std::ofstream loss(loss_path);
  write_loss_csv(loss, result.loss_history);
  std::cout << "trained " << result.loss_history.size() << " epochs, final batch loss "
            << result.loss_history.back() << "\ncheckpoint " << o.checkpoint << "\nloss "
            << loss_path.string() << '\n';
  return 0;
}

int solve_air(Options& o) {
  if (o.analytic == !o.checkpoint.empty()) {
    throw CLI::ValidationError("solve-air", "give exactly one of --checkpoint and --analytic");
  }
  o.cfg.benchmark = "ambiguous";
  finish_config(o);
  o.cfg.validate();
  auto bm = make_benchmark("ambiguous", o.cfg.params, o.cfg.horizon);
  if (!o.analytic) {
    std::ifstream is(o.checkpoint);
    if (!is) throw std::runtime_error("cannot read " + o.checkpoint);
    auto net = std::make_shared<const MlpParams>(load_checkpoint(is));
    bm.driver = network_driver(net, o.cfg.params.rate_lower, o.cfg.params.rate_upper);
  }
  const auto rep = run_experiment(o.cfg, bm);
  print_report(rep);
  if (!o.analytic) {
    // Learned against analytic driver on the first iteration's paths.
    const auto reference = make_benchmark("ambiguous", o.cfg.params, o.cfg.horizon);
    const auto seed = iteration_seed(o.cfg.seed, 0);
    const auto learned = run_iteration(o.cfg, bm, seed);
    const auto exact = run_iteration(o.cfg, reference, seed);
    std::cout << "  erl2 learned vs analytic driver "
              << erl2(learned.solution.y, exact.solution.y, o.cfg.grid().dt()) << '\n';
  }
  return rep.failures() == rep.iterations.size() ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signature-regression BSDE solver and risk-measure benchmarks"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key = value file; keys are long option names");
  app.allow_config_extras(CLI::config_extras_mode::error);
  auto config = std::make_shared<ScopedConfig>();
  if (argc > 1) config->subcommand = argv[1];
  app.config_formatter(config);
  Options o;

  auto* run_cmd = app.add_subcommand("run", "run one experiment");
  add_experiment_flags(run_cmd, o, true);

  auto* scale_cmd = app.add_subcommand("scale", "mean ERL2 against the sample size");
  add_experiment_flags(scale_cmd, o, true);
  scale_cmd->add_option("--sizes", o.sizes, "ascending sample sizes")->delimiter(',');

  auto* train_cmd = app.add_subcommand("train-air", "train the ambiguous-rate network");
  train_cmd->add_option("--checkpoint", o.checkpoint, "output checkpoint file")->required();
  train_cmd->add_option("--epochs", o.train.epochs)->capture_default_str();
  train_cmd->add_option("--batch-size", o.train.batch_size)->capture_default_str();
  train_cmd->add_option("--learning-rate", o.train.learning_rate)->capture_default_str();
  train_cmd->add_option("--seed", o.train.seed)->capture_default_str();
  train_cmd->add_option("--hidden-layers", o.hidden_layers)->capture_default_str();
  train_cmd->add_option("--hidden-units", o.hidden_units)->capture_default_str();

  auto* solve_cmd = app.add_subcommand("solve-air", "solve the ambiguous-rate benchmark");
  add_experiment_flags(solve_cmd, o, false);
  solve_cmd->add_option("--checkpoint", o.checkpoint, "trained network");
  solve_cmd->add_flag("--analytic", o.analytic, "use the closed-form optimal rate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run_cmd) return run(o);
    if (*scale_cmd) return scale(o);
    if (*train_cmd) return train_air(o);
    return solve_air(o);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
