#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <segregation/segregation.hpp>

namespace {

using namespace segregation;

RunConfig load(const std::string& path, const std::string& output_override) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  RunConfig c = parse_config(ss.str());
  if (!output_override.empty()) c.output.directory = output_override;
  return c;
}

int report(const RunSummary& s) {
  for (std::size_t i = 0; i < s.baselines.size(); ++i)
    std::printf("species %zu: lambda %.6g  lambda1 %.6g  max u0 %.6g\n", i, s.baselines[i].lambda,
                s.baselines[i].lambda1, s.baselines[i].max_value);
  for (std::size_t i = 0; i < s.nd.size(); ++i) std::printf("species %zu: nd margin %.6g\n", i, s.nd[i].margin);
  if (s.trace) {
    for (const auto& st : s.trace->steps)
      std::printf("kappa %-10s newton %2d  residual %.3e  max overlap %.3e\n", kappa_label(st.kappa).c_str(),
                  st.newton_iterations, st.residual, max_offdiagonal(st.diagnostics.overlap_matrix));
  }
  if (s.uniqueness)
    std::printf("uniqueness: %d trials, converged %s, max pairwise H1 distance %.3e\n", s.uniqueness->trials,
                s.uniqueness->all_converged ? "yes" : "no", s.uniqueness->max_pairwise_h1_distance);
  if (!s.ok()) {
    std::cerr << "error: stage '" << *s.failed_stage << "': " << s.error << "\n";
    return 1;
  }
  return 0;
}

int convergence(const RunConfig& c) {
  const int n0 = std::max(4, static_cast<int>(std::lround(1.0 / c.domain.spacing())));
  const auto levels = convergence_study({n0, 2 * n0, 4 * n0}, c.solver);
  const auto doc = convergence_to_json(levels);
  std::filesystem::create_directories(c.output.directory);
  std::ofstream f(std::filesystem::path(c.output.directory) / "convergence.json", std::ios::binary);
  f << doc.dump(2) << "\n";
  if (!f) throw IoError("cannot write convergence.json in '" + c.output.directory + "'");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    std::printf("h %-12.6g L2 error %.6e", levels[i].h, levels[i].l2_error);
    if (i) std::printf("  ratio %.4f", levels[i - 1].l2_error / levels[i].l2_error);
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Competition-diffusion systems on balls joined by thin corridors"};
  app.require_subcommand(1);
  std::string config_path;
  std::string output_dir;

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"solve-baseline", "Solve the single-ball baselines"},
      {"nd-check", "Baselines plus nondegeneracy margins"},
      {"continue", "Full pipeline: baselines, margins, kappa continuation"},
      {"probe-uniqueness", "Full pipeline followed by a multistart uniqueness probe"},
      {"convergence-study", "Grid refinement study of the discrete Laplacian"},
  };
  for (const auto& cmd : commands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("-c,--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", output_dir, "Override output.directory");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string name = app.get_subcommands().front()->get_name();

  RunConfig config;
  try {
    config = load(config_path, output_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: stage 'config': " << e.what() << "\n";
    return 2;
  }

  try {
    if (name == "convergence-study") return convergence(config);
    RunMode mode = RunMode::continuation;
    if (name == "solve-baseline") mode = RunMode::solve_baseline;
    if (name == "nd-check") mode = RunMode::nd_check;
    if (name == "probe-uniqueness") mode = RunMode::probe_uniqueness;
    return report(run(config, mode));
  } catch (const std::exception& e) {
    std::cerr << "error: stage '" << name << "': " << e.what() << "\n";
    return 1;
  }
}
