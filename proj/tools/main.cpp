// Command-line front end: run one simulation, verify the state machine or a
// small world exhaustively, or replay a recorded trace.
//
// Exit codes: 0 success, 1 property violations or replay divergence,
// 2 invalid configuration/usage/trace text, 3 tick budget exhausted,
// 4 file I/O failure.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swarmform/config.hpp"
#include "swarmform/sim.hpp"
#include "swarmform/trace.hpp"
#include "swarmform/verify.hpp"

namespace {

void print_violations(const std::vector<swarmform::Violation>& violations) {
  std::cout << "violations: " << violations.size() << "\n";
  constexpr std::size_t kMaxShown = 20;
  for (std::size_t i = 0; i < violations.size() && i < kMaxShown; ++i) {
    const swarmform::Violation& v = violations[i];
    std::cout << "violation " << v.kind << ": " << v.detail << "\n";
    std::cout << "  witness:";
    if (v.witness.empty()) std::cout << " (initial state)";
    for (std::size_t w = 0; w < v.witness.size(); ++w) {
      std::cout << (w == 0 ? " " : "; ") << v.witness[w];
    }
    std::cout << "\n";
  }
  if (violations.size() > kMaxShown) {
    std::cout << "... and " << violations.size() - kMaxShown << " more\n";
  }
}

int do_run(const std::string& config_path, const std::string& trace_out) {
  const swarmform::FileConfig cfg = swarmform::load_config_file(config_path);
  const swarmform::RunSummary summary = swarmform::run(cfg.sim);

  if (!trace_out.empty()) {
    std::ofstream out(trace_out, std::ios::binary);
    if (!out) {
      throw swarmform::IoError("cannot open trace file '" + trace_out + "'");
    }
    swarmform::write_trace(out, cfg.sim, summary.trace);
    out.flush();
    if (!out) {
      throw swarmform::IoError("cannot write trace file '" + trace_out + "'");
    }
  }

  std::cout << "termination: "
            << (summary.termination.has_value()
                    ? to_string(*summary.termination)
                    : std::string_view("max_ticks_exceeded"))
            << "\n";
  std::cout << "finalTick: " << summary.final_tick << "\n";
  std::cout << "reports:";
  for (std::size_t k = 0; k < summary.report_counts.size(); ++k) {
    std::cout << ' ' << to_string(static_cast<swarmform::Report>(k)) << '='
              << summary.report_counts[k];
  }
  std::cout << "\n";
  int localized = 0;
  for (const swarmform::RobotRecord& r : summary.final_state.robots) {
    if (r.state == swarmform::RobotState::Localize) ++localized;
  }
  std::cout << "localized: " << localized << "/" << cfg.sim.num_robots << "\n";
  return summary.termination.has_value() ? 0 : 3;
}

int do_verify_fsm(int robots, int shape_dim, int depth_flag,
                  const std::string& mutate, const std::string& config_path) {
  swarmform::FsmOptions options;
  options.num_robots = robots;
  options.shape_dimension = shape_dim;
  if (depth_flag >= 0) {
    options.depth_limit = depth_flag;
  } else if (!config_path.empty()) {
    options.depth_limit =
        swarmform::load_config_file(config_path).verify_depth_limit;
  }
  if (!mutate.empty()) {
    const auto ops = swarmform::mutant_ops(mutate);
    if (!ops.has_value()) {
      throw swarmform::ConfigError("unknown mutant '" + mutate +
                                   "'; available: m1 m2 m3 m4");
    }
    options.ops = *ops;
  }

  const swarmform::FsmExploration ex = swarmform::enumerate_fsm(options);
  const std::vector<swarmform::Violation> violations =
      swarmform::check_invariants(ex);
  std::cout << "robots: " << ex.num_robots
            << " shapeDim: " << ex.shape_dimension
            << " depthLimit: " << ex.depth_limit << "\n";
  std::cout << "states: " << ex.states.size() << "\n";
  std::cout << "jointStates: " << swarmform::joint_state_count(ex) << "\n";
  std::cout << "edges: " << ex.edges.size() << "\n";
  std::cout << "maxDepth: " << ex.max_depth << "\n";
  print_violations(violations);
  return violations.empty() ? 0 : 1;
}

int do_verify_sim(const std::string& config_path, int depth_flag) {
  const swarmform::FileConfig cfg = swarmform::load_config_file(config_path);
  swarmform::BranchingOptions options;
  options.config = cfg.sim;
  options.depth_limit =
      depth_flag >= 0 ? depth_flag : cfg.verify_branch_depth_limit;

  const swarmform::BranchingResult result =
      swarmform::verify_sim_branching(options);
  std::cout << "states: " << result.state_count << "\n";
  std::cout << "edges: " << result.edge_count << "\n";
  std::cout << "initialStates: " << result.initial_count << "\n";
  std::cout << "maxDepth: " << result.max_depth << "\n";
  std::cout << "terminals:";
  for (std::size_t k = 0; k < result.terminal_counts.size(); ++k) {
    std::cout << ' '
              << to_string(static_cast<swarmform::TerminationKind>(k)) << '='
              << result.terminal_counts[k];
  }
  std::cout << "\n";
  print_violations(result.violations);
  return result.violations.empty() ? 0 : 1;
}

int do_replay(const std::string& trace_path) {
  std::ifstream in(trace_path, std::ios::binary);
  if (!in) {
    throw swarmform::IoError("cannot open trace file '" + trace_path + "'");
  }
  std::vector<std::string> found;
  std::string line;
  while (std::getline(in, line)) {
    found.push_back(line);
  }
  if (in.bad()) {
    throw swarmform::IoError("cannot read trace file '" + trace_path + "'");
  }
  if (found.empty()) {
    throw swarmform::TraceFormatError("trace file is empty");
  }

  const swarmform::SimConfig config = swarmform::parse_trace_header(found[0]);
  const swarmform::RunSummary summary = swarmform::run(config);
  std::vector<std::string> expected;
  expected.reserve(summary.trace.size() + 1);
  expected.push_back(swarmform::format_trace_header(config));
  for (const swarmform::TraceEvent& e : summary.trace) {
    expected.push_back(swarmform::format_event(e));
  }

  const std::size_t n = std::min(expected.size(), found.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (expected[i] != found[i]) {
      std::cout << "replay: divergence at line " << i + 1 << "\n";
      std::cout << "expected: " << expected[i] << "\n";
      std::cout << "found: " << found[i] << "\n";
      return 1;
    }
  }
  if (expected.size() != found.size()) {
    std::cout << "replay: divergence at line " << n + 1 << "\n";
    std::cout << "expected: "
              << (n < expected.size() ? expected[n] : "<end of trace>")
              << "\n";
    std::cout << "found: " << (n < found.size() ? found[n] : "<end of file>")
              << "\n";
    return 1;
  }
  std::cout << "replay: match (" << found.size() << " lines)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-organized shape formation: guarded state-machine core, "
               "lattice simulator, and exhaustive verifier"};
  app.set_version_flag("--version",
                       "swarmform " + std::string(swarmform::kVersion));
  app.require_subcommand(1);

  auto* run_cmd =
      app.add_subcommand("run", "Run one simulation from a config file");
  std::string run_config;
  std::string trace_out;
  run_cmd->add_option("--config", run_config, "Config file")->required();
  run_cmd->add_option("--trace-out", trace_out,
                      "Write the event trace to this file");

  auto* verify_cmd = app.add_subcommand("verify", "Exhaustive verification");
  verify_cmd->require_subcommand(1);

  auto* fsm_cmd = verify_cmd->add_subcommand(
      "fsm", "Enumerate the joint state machine and check its invariants");
  int robots = 2;
  int shape_dim = -1;
  int fsm_depth = -1;
  std::string mutate;
  std::string fsm_config;
  fsm_cmd->add_option("--robots", robots, "Number of robots (1-4)");
  fsm_cmd->add_option("--shape-dim", shape_dim,
                      "Target cells (default: one per robot, 0: no shape)");
  fsm_cmd->add_option("--depth-limit", fsm_depth,
                      "Exploration depth bound (default 12)");
  fsm_cmd->add_option("--mutate", mutate,
                      "Verify a mutated operation table (m1-m4)");
  fsm_cmd->add_option("--config", fsm_config,
                      "Read verify.depthLimit from this config file");

  auto* vsim_cmd = verify_cmd->add_subcommand(
      "sim", "Branch over every run of a small-world config");
  std::string vsim_config;
  int branch_depth = -1;
  vsim_cmd->add_option("--config", vsim_config, "Config file")->required();
  vsim_cmd->add_option("--depth-limit", branch_depth,
                       "Sweep depth bound (default verify.branchDepthLimit)");

  auto* replay_cmd = app.add_subcommand(
      "replay", "Re-run a trace's embedded config and compare line by line");
  std::string trace_path;
  replay_cmd->add_option("--trace", trace_path, "Trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return do_run(run_config, trace_out);
    if (*fsm_cmd) {
      return do_verify_fsm(robots, shape_dim, fsm_depth, mutate, fsm_config);
    }
    if (*vsim_cmd) return do_verify_sim(vsim_config, branch_depth);
    if (*replay_cmd) return do_replay(trace_path);
  } catch (const swarmform::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const swarmform::BoundError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const swarmform::TraceFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const swarmform::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
