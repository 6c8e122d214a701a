#include "loopsim/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "loopsim/scenario.hpp"
#include "loopsim/summary.hpp"

namespace loopsim {
namespace cli {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

long env_budget() {
  const char* v = std::getenv("LOOPSIM_BUDGET");
  if (!v) return 1000000;
  long b = std::atol(v);
  if (b < 1) throw ConfigError("LOOPSIM_BUDGET must be a positive integer");
  return b;
}

void run_one_simulation(const ScenarioConfig& config, const fs::path& out_dir, double fp_tol,
                        long fp_window) {
  fs::create_directories(out_dir);
  Trajectory traj = simulate(config.scenario);

  std::ofstream traj_out(out_dir / config.outputs.trajectory, std::ios::binary);
  if (!traj_out) throw ConfigError("cannot write " + (out_dir / config.outputs.trajectory).string());
  traj.write_jsonl(traj_out);

  auto rows = standard_summary(traj, fp_tol, fp_window);
  write_file(out_dir / config.outputs.summary,
             export_summary(config.outputs.run_id, config.scenario.seed, config.scenario.horizon,
                            std::move(rows)));
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, double fp_tol,
                 long fp_window) {
  ScenarioConfig config = parse_scenario(read_file(config_path));
  run_one_simulation(config, out_dir, fp_tol, fp_window);
  return 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_dir, int jobs, double fp_tol,
              long fp_window, std::ostream& out) {
  std::string dir = fs::path(spec_path).parent_path().string();
  SweepSpec spec = parse_sweep(read_file(spec_path), dir);
  std::vector<SweepCell> cells = expand_sweep(spec, env_budget());

  std::atomic<size_t> next{0};
  std::vector<std::string> errors(cells.size());
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
      try {
        ScenarioConfig config = parse_scenario(cells[i].config_text);
        run_one_simulation(config, fs::path(out_dir) / cells[i].dir_name, fp_tol, fp_window);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  int n = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int i = 0; i < n - 1; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (size_t i = 0; i < cells.size(); ++i)
    if (!errors[i].empty())
      throw ConfigError("sweep cell " + cells[i].dir_name + ": " + errors[i]);
  out << "sweep: " << cells.size() << " cells -> " << out_dir << "\n";
  return 0;
}

int cmd_equilibrium(const std::string& config_path, const std::string& out_dir, std::ostream& out) {
  ScenarioConfig config = parse_scenario(read_file(config_path));
  if (!config.game) throw ConfigError("config.game: required for the equilibrium command");
  const games::GameSpec& game = *config.game;

  games::BrdResult res =
      games::best_response_dynamics(game, config.game_init, config.game_max_rounds);
  bool nash = games::verify_pure_nash(res.profile, game);

  std::string csv = "creator,action_index,action_vec,utility\n";
  for (int j = 0; j < game.creators; ++j) {
    const Vec& a = game.space.at(static_cast<size_t>(res.profile[j]));
    std::string vec_str;
    for (size_t i = 0; i < a.size(); ++i) vec_str += (i ? ";" : "") + fmt_double(a[i]);
    csv += std::to_string(j) + "," + std::to_string(res.profile[j]) + "," + vec_str + "," +
           fmt_double(games::creator_utility(j, res.profile[j], res.profile, game)) + "\n";
  }
  std::string summary_line =
      std::string("nash=") + (nash ? "true" : "false") + ",rounds=" + std::to_string(res.rounds);
  csv += summary_line + "\n";

  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / config.outputs.equilibrium, csv);
  out << summary_line << "\n";
  return 0;
}

int cmd_metrics(const std::string& traj_path, const std::string& out_path, int active_slot) {
  std::ifstream in(traj_path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + traj_path);
  Trajectory traj = Trajectory::read_jsonl(in);
  std::optional<int> slot;
  if (active_slot >= 0) slot = active_slot;
  write_file(out_path, export_metrics_csv(standard_metric_reports(traj, slot)));
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"loopsim: coupled recommender/user simulation, equilibria, and metrics"};
  app.require_subcommand(1);

  std::string config_path, spec_path, traj_path, out_dir = ".", out_path;
  double fp_tol = 1e-6;
  long fp_window = 5;
  int jobs = 1, active_slot = -1;

  CLI::App* sim = app.add_subcommand("simulate", "run one scenario and export its trajectory");
  sim->add_option("--config", config_path, "scenario config JSON")->required();
  sim->add_option("--out", out_dir, "output directory")->required();
  sim->add_option("--fp-tol", fp_tol, "fixed-point tolerance for the summary");
  sim->add_option("--fp-window", fp_window, "fixed-point window for the summary");

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter/seed sweep");
  sweep->add_option("--spec", spec_path, "sweep spec JSON")->required();
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);
  sweep->add_option("--fp-tol", fp_tol, "fixed-point tolerance for summaries");
  sweep->add_option("--fp-window", fp_window, "fixed-point window for summaries");

  CLI::App* eq = app.add_subcommand("equilibrium", "best-response dynamics + Nash check");
  eq->add_option("--config", config_path, "scenario config JSON with a game section")->required();
  eq->add_option("--out", out_dir, "output directory");

  CLI::App* met = app.add_subcommand("metrics", "recompute metrics from a stored trajectory");
  met->add_option("--traj", traj_path, "trajectory JSONL")->required();
  met->add_option("--out", out_path, "metrics CSV output path")->required();
  met->add_option("--active-slot", active_slot,
                  "state vec index holding the active flag (enables departure_rate)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_dir, fp_tol, fp_window);
    if (sweep->parsed()) return cmd_sweep(spec_path, out_dir, jobs, fp_tol, fp_window, out);
    if (eq->parsed()) return cmd_equilibrium(config_path, out_dir, out);
    if (met->parsed()) return cmd_metrics(traj_path, out_path, active_slot);
    err << app.help();
    return 1;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cli
}  // namespace loopsim
