#include "huauv/huauv.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

int cmd_validate(const std::string& path) {
  try {
    const huauv::Scenario s = huauv::load_scenario(path);
    const huauv::World w = huauv::build_world(s);
    std::cout << "scenario ok: " << path << "\n"
              << "  obstacles: " << w.obstacles.size() << "\n"
              << "  start: (" << s.start.pos.x() << ", " << s.start.pos.y() << ", "
              << s.start.pos.z() << ")\n"
              << "  goal:  (" << s.goal.x << ", " << s.goal.y << ", " << s.goal.z << ")\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_gen(std::uint64_t seed, int count, const std::string& out,
            const std::vector<double>& start, const std::vector<double>& goal) {
  try {
    huauv::Scenario s;
    s.seed = seed;
    s.obstacles.seed = seed;
    s.obstacles.count = count;
    if (!start.empty()) s.start.pos = huauv::Vec3(start[0], start[1], start[2]);
    if (!goal.empty()) {
      s.goal.x = goal[0];
      s.goal.y = goal[1];
      s.goal.z = goal[2];
    }
    huauv::validate_scenario(s);
    huauv::build_world(s);  // prove the layout is realizable before writing
    huauv::save_scenario(s, out);
    std::cout << "wrote " << out << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid aerial-underwater vehicle mission simulator and planner"};
  app.require_subcommand(1);

  std::string run_scenario, run_out = "out";
  std::uint64_t run_seed = 0;
  bool dump_tree = false, perturb = false;
  auto* run = app.add_subcommand("run", "Execute a mission and write its artifacts");
  run->add_option("scenario", run_scenario, "Scenario file (JSON)")->required();
  auto* seed_opt = run->add_option("--seed", run_seed, "Override the scenario RNG seed");
  run->add_option("--out", run_out, "Output directory (default: out)");
  run->add_flag("--dump-tree", dump_tree, "Also write the final planning tree");
  run->add_flag("--perturb", perturb, "Fly the plant with off-nominal mass/drag");

  std::string val_scenario;
  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
  validate->add_option("scenario", val_scenario, "Scenario file (JSON)")->required();

  std::uint64_t gen_seed = 1;
  int gen_count = 20;
  std::string gen_out = "scenario.json";
  std::vector<double> gen_start, gen_goal;
  auto* gen = app.add_subcommand("gen-scenario", "Write a seeded random scenario");
  gen->add_option("--seed", gen_seed, "Obstacle layout and mission seed");
  gen->add_option("--count", gen_count, "Number of spherical obstacles");
  gen->add_option("--out", gen_out, "Output scenario path");
  gen->add_option("--start", gen_start, "Start position x y z")->expected(3);
  gen->add_option("--goal", gen_goal, "Goal position x y z")->expected(3);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*run) {
    std::optional<std::uint64_t> seed;
    if (seed_opt->count() > 0) seed = run_seed;
    return huauv::run_command(run_scenario, run_out, seed, dump_tree, perturb);
  }
  if (*validate) return cmd_validate(val_scenario);
  if (*gen) return cmd_gen(gen_seed, gen_count, gen_out, gen_start, gen_goal);
  return 2;
}
