#pragma once

// JSON configuration, CSV run logs and experiment orchestration.

#include "rspo/estimator.hpp"
#include "rspo/oracle.hpp"
#include "rspo/tasks.hpp"
#include "rspo/trainer.hpp"
#include "rspo/types.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rspo {

using json = nlohmann::json;

inline constexpr int kConfigSchemaVersion = 1;

// --- Tasks ------------------------------------------------------------------

inline json task_to_json(const TaskSpec& t) {
  json prompts = json::array();
  for (const auto& p : t.prompts) {
    prompts.push_back({{"id", p.prompt_id}, {"rewards", p.rewards}, {"kind", to_string(p.kind)}});
  }
  return {{"name", t.name},
          {"vocab_size", t.vocab_size},
          {"policy_mode", to_string(t.policy_mode)},
          {"eval_k_list", t.eval_k_list},
          {"n", t.n},
          {"prompts", prompts}};
}

/// A task is either the name of a built-in task or an inline object.
inline TaskSpec task_from_json(const json& j) {
  if (j.is_string()) return builtin_task(j.get<std::string>());
  if (!j.is_object()) throw std::invalid_argument("task must be a built-in name or an object");

  TaskSpec t;
  t.name = j.value("name", std::string("custom"));
  t.vocab_size = j.at("vocab_size").get<std::size_t>();
  const std::string mode = j.value("policy_mode", std::string("per_prompt"));
  if (mode == "shared") {
    t.policy_mode = PolicyMode::shared;
  } else if (mode == "per_prompt") {
    t.policy_mode = PolicyMode::per_prompt;
  } else {
    throw std::invalid_argument("unknown policy_mode '" + mode + "'");
  }
  t.eval_k_list = j.value("eval_k_list", std::vector<int>{1});
  t.n = j.value("n", 16);
  std::size_t index = 0;
  for (const auto& p : j.at("prompts")) {
    RewardTable table;
    table.prompt_id = p.value("id", "x" + std::to_string(++index));
    table.rewards = p.at("rewards").get<std::vector<double>>();
    const std::string kind = p.value("kind", std::string(all_binary<double>(table.rewards) ? "binary" : "continuous"));
    if (kind == "binary") {
      table.kind = RewardKind::binary;
    } else if (kind == "continuous") {
      table.kind = RewardKind::continuous;
    } else {
      throw std::invalid_argument("unknown reward kind '" + kind + "'");
    }
    t.prompts.push_back(std::move(table));
  }
  t.validate();
  return t;
}

// --- Experiment config -------------------------------------------------------

struct ExperimentConfig {
  std::string name;
  std::vector<TrainConfig> train_configs;  // seeds are taken from `seeds`
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "runs";
};

inline std::string run_file_name(const TrainConfig& c) {
  return std::string(to_string(c.estimator)) + "_k" + std::to_string(c.k) + "_seed" + std::to_string(c.seed) + ".csv";
}

/// Every (train config, seed) pair, seeds applied.
inline std::vector<TrainConfig> expand_runs(const ExperimentConfig& exp) {
  std::vector<TrainConfig> runs;
  for (const auto& c : exp.train_configs) {
    for (std::uint64_t seed : exp.seeds) {
      TrainConfig r = c;
      r.seed = seed;
      runs.push_back(std::move(r));
    }
  }
  return runs;
}

inline void validate_experiment(const ExperimentConfig& exp) {
  if (exp.name.empty()) throw std::invalid_argument("experiment name must not be empty");
  if (exp.name.find('/') != std::string::npos || exp.name == "." || exp.name == "..") {
    throw std::invalid_argument("experiment name must be a plain directory name");
  }
  if (exp.train_configs.empty()) throw std::invalid_argument("experiment has no runs");
  if (exp.seeds.empty()) throw std::invalid_argument("experiment has no seeds");
  std::set<std::string> files;
  for (const auto& r : expand_runs(exp)) {
    r.validate();
    if (!files.insert(run_file_name(r)).second) {
      throw std::invalid_argument("duplicate run '" + run_file_name(r) + "' (estimator, k and seed must be unique)");
    }
  }
}

inline ExperimentConfig experiment_from_json(const json& j) {
  const int version = j.value("schema_version", -1);
  if (version != kConfigSchemaVersion) {
    throw std::invalid_argument("unsupported schema_version " + std::to_string(version) + " (expected " +
                                std::to_string(kConfigSchemaVersion) + ")");
  }
  ExperimentConfig exp;
  exp.name = j.at("name").get<std::string>();
  exp.output_dir = j.value("output_dir", std::string("runs"));
  exp.seeds = j.value("seeds", std::vector<std::uint64_t>{0});

  std::optional<TaskSpec> default_task;
  if (j.contains("task")) default_task = task_from_json(j.at("task"));

  for (const auto& r : j.at("runs")) {
    TrainConfig c;
    if (r.contains("task")) {
      c.task = task_from_json(r.at("task"));
    } else if (default_task) {
      c.task = *default_task;
    } else {
      throw std::invalid_argument("run has no task and the experiment defines none");
    }
    const std::string est = r.at("estimator").get<std::string>();
    const auto parsed = parse_estimator(est);
    if (!parsed) throw std::invalid_argument("unknown estimator '" + est + "'");
    c.estimator = *parsed;
    c.k = r.value("k", 1);
    c.n = r.value("n", c.task.n);
    c.steps = r.value("steps", 100);
    c.learning_rate = r.value("learning_rate", 0.1);
    c.prune_zero_weights = r.value("prune_zero_weights", true);
    c.log_every = r.value("log_every", 10);
    exp.train_configs.push_back(std::move(c));
  }
  validate_experiment(exp);
  return exp;
}

inline ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return experiment_from_json(j);
}

// --- CSV ---------------------------------------------------------------------

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> csv_header(const TaskSpec& task) {
  std::vector<std::string> cols{"step", "entropy", "mean_weight", "pruned_fraction"};
  if (task.all_binary()) {
    for (int k : task.eval_k_list) cols.push_back("pass@" + std::to_string(k));
  }
  for (int k : task.eval_k_list) cols.push_back("max@" + std::to_string(k));
  return cols;
}

inline void write_run_csv(std::ostream& out, const TaskSpec& task, const std::vector<RunRecord>& records) {
  const auto header = csv_header(task);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : records) {
    out << r.step << ',' << format_double(r.entropy) << ',' << format_double(r.mean_weight) << ','
        << format_double(r.pruned_fraction);
    for (double v : r.pass_at_k) out << ',' << format_double(v);
    for (double v : r.max_at_k) out << ',' << format_double(v);
    out << '\n';
  }
}

struct RunCsv {
  std::vector<int> pass_k;
  std::vector<int> max_k;
  std::vector<RunRecord> records;
};

inline RunCsv read_run_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("run CSV is empty");
  const auto header = split(line);
  if (header.size() < 4 || header[0] != "step" || header[1] != "entropy" || header[2] != "mean_weight" ||
      header[3] != "pruned_fraction") {
    throw std::invalid_argument("run CSV has an unexpected header");
  }
  RunCsv csv;
  for (std::size_t c = 4; c < header.size(); ++c) {
    if (header[c].rfind("pass@", 0) == 0) {
      csv.pass_k.push_back(std::stoi(header[c].substr(5)));
    } else if (header[c].rfind("max@", 0) == 0) {
      csv.max_k.push_back(std::stoi(header[c].substr(4)));
    } else {
      throw std::invalid_argument("run CSV has unknown column '" + header[c] + "'");
    }
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw std::invalid_argument("run CSV row has the wrong number of cells");
    RunRecord r;
    r.step = std::stoi(cells[0]);
    r.entropy = std::strtod(cells[1].c_str(), nullptr);
    r.mean_weight = std::strtod(cells[2].c_str(), nullptr);
    r.pruned_fraction = std::strtod(cells[3].c_str(), nullptr);
    std::size_t c = 4;
    for (std::size_t i = 0; i < csv.pass_k.size(); ++i) r.pass_at_k.push_back(std::strtod(cells[c++].c_str(), nullptr));
    for (std::size_t i = 0; i < csv.max_k.size(); ++i) r.max_at_k.push_back(std::strtod(cells[c++].c_str(), nullptr));
    csv.records.push_back(std::move(r));
  }
  return csv;
}

// --- Experiment runner -----------------------------------------------------------

inline json final_metrics_json(const TaskSpec& task, const RunRecord& r) {
  json j{{"step", r.step}, {"entropy", r.entropy}, {"mean_weight", r.mean_weight}, {"pruned_fraction", r.pruned_fraction}};
  for (std::size_t e = 0; e < task.eval_k_list.size(); ++e) {
    if (!r.pass_at_k.empty()) j["pass@" + std::to_string(task.eval_k_list[e])] = r.pass_at_k[e];
    j["max@" + std::to_string(task.eval_k_list[e])] = r.max_at_k[e];
  }
  return j;
}

/// Oracle optimum for every (task, objective, eval k). Binary tasks get both
/// objectives; continuous tasks only max_at_k.
inline json oracle_table_json(const std::vector<TrainConfig>& runs) {
  json out = json::array();
  std::set<std::string> seen;
  for (const auto& r : runs) {
    const TaskSpec& task = r.task;
    if (!seen.insert(task_to_json(task).dump()).second) continue;
    std::vector<Objective> objectives;
    if (task.all_binary()) objectives.push_back(Objective::pass_at_k);
    objectives.push_back(Objective::max_at_k);
    for (Objective o : objectives) {
      for (int k : task.eval_k_list) {
        const auto opt = exact_objective_optimum(task, o, k);
        out.push_back({{"task", task.name}, {"objective", to_string(o)}, {"k", k}, {"oracle_optimum", opt.value},
                       {"optimal_policy", opt.probabilities}});
      }
    }
  }
  return out;
}

/// Writes <output_dir>/<name>/<estimator>_k<k>_seed<seed>.csv per run and a
/// summary.json next to them. Returns the experiment directory.
inline std::filesystem::path run_experiment(const ExperimentConfig& exp) {
  validate_experiment(exp);
  const std::filesystem::path dir = std::filesystem::path(exp.output_dir) / exp.name;
  std::filesystem::create_directories(dir);

  const auto runs = expand_runs(exp);
  json run_entries = json::array();
  for (const auto& cfg : runs) {
    const TrainResult result = train(cfg);
    const std::string file = run_file_name(cfg);
    std::ofstream out(dir / file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + (dir / file).string() + "'");
    write_run_csv(out, cfg.task, result.records);
    if (!out) throw std::runtime_error("failed writing '" + (dir / file).string() + "'");
    run_entries.push_back({{"file", file},
                           {"task", cfg.task.name},
                           {"estimator", std::string(to_string(cfg.estimator))},
                           {"k", cfg.k},
                           {"n", cfg.n},
                           {"seed", cfg.seed},
                           {"steps", cfg.steps},
                           {"learning_rate", cfg.learning_rate},
                           {"prune_zero_weights", cfg.prune_zero_weights},
                           {"final", final_metrics_json(cfg.task, result.records.back())}});
  }

  json summary{{"schema_version", kConfigSchemaVersion},
               {"name", exp.name},
               {"entropy_units", "nats"},
               {"runs", run_entries},
               {"oracle", oracle_table_json(runs)}};
  std::ofstream out(dir / "summary.json", std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write summary.json in '" + dir.string() + "'");
  out << summary.dump(2) << '\n';
  return dir;
}

}  // namespace rspo
