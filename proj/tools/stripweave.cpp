#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stripweave/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Minimum strain energy flattening of surface strips"};
  app.require_subcommand(1, 1);

  std::string config;
  stripweave::RunOptions opt;
  const char* descriptions[][2] = {{"plan", "predict peak strain per strip"},
                                   {"solve", "solve the embedding of every strip"},
                                   {"export", "write cutting patterns and strain maps"},
                                   {"validate", "breadth-scaling report for one strip"}};
  for (const auto& d : descriptions) {
    CLI::App* sub = app.add_subcommand(d[0], d[1]);
    sub->add_option("--config", config, "job configuration (JSON)")->required();
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--resume", opt.resume, "seed from existing checkpoints");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return stripweave::exit_code::usage;
  }
  return stripweave::run_command(app.get_subcommands().front()->get_name(), config, opt, std::cout);
}
