// Command-line front end: binds a JSON run configuration to the solver
// pipelines and writes CSV/SVG artifacts per subcommand.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "darkcavity/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "darkcavity: steady-state, correlation and quantum-trajectory analysis "
      "of a three-level atom strongly coupled to an optical cavity"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  int threads = 0;
  bool strict = false;
  bool plots = false;
  std::uint64_t seed_value = 0;

  app.add_option("--config", config_path,
                 "JSON configuration file (defaults bundled when omitted)");
  app.add_option("--out", out_dir, "output directory")
      ->capture_default_str();
  auto* seed_opt =
      app.add_option("--seed", seed_value, "override the master seed");
  app.add_flag("--strict", strict, "exit nonzero on any failed scan point");
  app.add_flag("--plots", plots, "also emit SVG plots");
  app.add_option("--threads", threads,
                 "worker threads (0 = all available)");

  auto* sub_spectroscopy = app.add_subcommand(
      "spectroscopy", "parameter scan with one-photon eigenenergy overlay");
  auto* sub_correlation = app.add_subcommand(
      "correlation", "steady-state g2(tau) and damped-sinusoid fit");
  auto* sub_zeno = app.add_subcommand(
      "zeno", "dark-state ladder decay/drive/suppression table");
  auto* sub_montecarlo = app.add_subcommand(
      "montecarlo", "7-level quantum-trajectory photon statistics");
  auto* sub_fom = app.add_subcommand(
      "fom", "figure-of-merit parameter sweeps");
  auto* sub_selftest = app.add_subcommand(
      "selftest", "closed-form cross checks of the solver stack");

  CLI11_PARSE(app, argc, argv);

  try {
    darkcavity::RunConfig cfg = config_path.empty()
                                    ? darkcavity::default_config()
                                    : darkcavity::load_config(config_path);
    darkcavity::CliOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads;
    opt.strict = strict;
    opt.plots = plots;
    if (seed_opt->count() > 0) opt.seed = seed_value;

    if (sub_spectroscopy->parsed()) return darkcavity::cmd_spectroscopy(cfg, opt);
    if (sub_correlation->parsed()) return darkcavity::cmd_correlation(cfg, opt);
    if (sub_zeno->parsed()) return darkcavity::cmd_zeno(cfg, opt);
    if (sub_montecarlo->parsed()) return darkcavity::cmd_montecarlo(cfg, opt);
    if (sub_fom->parsed()) return darkcavity::cmd_fom(cfg, opt);
    if (sub_selftest->parsed()) return darkcavity::cmd_selftest(cfg, opt);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const darkcavity::Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << std::endl;
    return 2;
  }
}
