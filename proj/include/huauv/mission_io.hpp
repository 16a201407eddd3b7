#pragma once

#include "huauv/scenario.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>

namespace huauv {

inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

/// Per-step time series of the executed states and their active references;
/// column order is part of the output contract.
inline void write_trajectory_csv(const MissionLog& log, std::ostream& os) {
  os << "t,x,y,z,phi,theta,psi,x_ref,y_ref,z_ref,psi_ref\n";
  for (const auto& row : log.trace) {
    const auto& s = row.state;
    os << fmt_g(row.t) << ',' << fmt_g(s.pos.x()) << ',' << fmt_g(s.pos.y()) << ','
       << fmt_g(s.pos.z()) << ',' << fmt_g(s.att.x()) << ',' << fmt_g(s.att.y()) << ','
       << fmt_g(s.att.z()) << ',' << fmt_g(row.ref.x) << ',' << fmt_g(row.ref.y) << ','
       << fmt_g(row.ref.z) << ',' << fmt_g(row.ref.psi) << '\n';
  }
}

inline bool has_transition_events(const MissionLog& log) {
  for (const auto& e : log.events)
    if (e.kind == MissionEvent::TransitionEnter || e.kind == MissionEvent::TransitionExit)
      return true;
  return false;
}

inline void write_transitions_csv(const MissionLog& log, std::ostream& os) {
  os << "t,event\n";
  for (const auto& e : log.events)
    if (e.kind == MissionEvent::TransitionEnter || e.kind == MissionEvent::TransitionExit)
      os << fmt_g(e.t) << ',' << event_name(e.kind) << '\n';
}

inline void write_metrics(const MissionLog& log, std::ostream& os) {
  const MissionSummary& s = log.summary;
  os << "success: " << (s.success ? "true" : "false") << '\n'
     << "elapsed: " << fmt_g(s.elapsed) << '\n'
     << "path_length: " << fmt_g(s.path_length) << '\n'
     << "transition_count: " << s.transition_count << '\n'
     << "air_to_water: " << s.air_to_water << '\n'
     << "water_to_air: " << s.water_to_air << '\n'
     << "time_in_air: " << fmt_g(s.time_in_air) << '\n'
     << "time_in_water: " << fmt_g(s.time_in_water) << '\n'
     << "ticks: " << s.ticks << '\n'
     << "obstacles_known: " << s.obstacles_known << '\n';
}

/// Final planning tree (live nodes): reference endpoints, propagated state
/// endpoints, medium tags and safety flags, for plotting.
inline void write_tree_csv(const Tree& tree, std::ostream& os) {
  os << "id,parent,x_ref,y_ref,z_ref,psi_ref,x,y,z,medium,safe,transition,cost_to_go\n";
  for (const auto& n : tree.nodes()) {
    if (!n.alive) continue;
    os << n.id << ',' << n.parent << ',' << fmt_g(n.ref_end.x) << ',' << fmt_g(n.ref_end.y) << ','
       << fmt_g(n.ref_end.z) << ',' << fmt_g(n.ref_end.psi) << ',' << fmt_g(n.end_state.pos.x())
       << ',' << fmt_g(n.end_state.pos.y()) << ',' << fmt_g(n.end_state.pos.z()) << ','
       << (n.medium == ControlMode::Air ? "air" : "water") << ',' << (n.safe ? 1 : 0) << ','
       << (n.transition ? 1 : 0) << ',' << fmt_g(n.cost_to_go) << '\n';
  }
}

/// Writes trajectory.csv and, when any crossing happened, transitions.csv.
inline void emit_plot_data(const MissionLog& log, const std::string& out_dir) {
  if (log.trace.empty()) throw std::invalid_argument("emit_plot_data: empty log");
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream os(fs::path(out_dir) / "trajectory.csv");
    if (!os) throw std::runtime_error("cannot write trajectory.csv under " + out_dir);
    write_trajectory_csv(log, os);
  }
  if (has_transition_events(log)) {
    std::ofstream os(fs::path(out_dir) / "transitions.csv");
    if (!os) throw std::runtime_error("cannot write transitions.csv under " + out_dir);
    write_transitions_csv(log, os);
  }
}

/// CLI `run` entry: load, execute, write artifacts. Exit status 0 on mission
/// success, 1 on mission failure, 2 on usage/parse/IO problems.
inline int run_command(const std::string& scenario_path, const std::string& out_dir,
                       std::optional<std::uint64_t> seed_override, bool dump_tree, bool perturb,
                       std::ostream& diag = std::cerr) {
  Scenario scenario;
  try {
    scenario = load_scenario(scenario_path);
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << '\n';
    return 2;
  }
  if (seed_override) scenario.seed = *seed_override;
  if (perturb) scenario.executor.perturb = true;

  MissionResult result;
  try {
    result = run_mission(make_setup(scenario));
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    emit_plot_data(result.log, out_dir);
    std::ofstream metrics(fs::path(out_dir) / "metrics.txt");
    if (!metrics) throw std::runtime_error("cannot write metrics.txt under " + out_dir);
    write_metrics(result.log, metrics);
    if (dump_tree) {
      std::ofstream tree_os(fs::path(out_dir) / "tree.csv");
      if (!tree_os) throw std::runtime_error("cannot write tree.csv under " + out_dir);
      write_tree_csv(result.tree, tree_os);
    }
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << '\n';
    return 2;
  }
  return result.log.summary.success ? 0 : 1;
}

}  // namespace huauv
