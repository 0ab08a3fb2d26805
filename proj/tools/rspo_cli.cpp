// rspo: verification suites, ad-hoc estimator weights, training runs and
// reference tasks.
//
// Exit codes: 0 success, 1 runtime or validation failure, 2 usage error.

#include "rspo/estimator.hpp"
#include "rspo/io.hpp"
#include "rspo/tasks.hpp"
#include "rspo/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::vector<double> parse_reward_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad reward '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty reward list");
  return out;
}

int cmd_verify(const std::string& suite) {
  const auto names = rspo::verify::suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    std::cerr << "rspo verify: unknown suite '" << suite << "' (expected identities, unbiasedness, equivalences or all)\n";
    return kExitUsage;
  }
  const auto report = rspo::verify::run_suite(suite);
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "ok    " : "FAIL  ") << c.name << "  [" << std::fixed << std::setprecision(3) << c.seconds
              << "s]\n";
    std::cout.unsetf(std::ios::floatfield);
    if (!c.passed) std::cerr << "FAIL " << c.name << ": " << c.detail << '\n';
  }
  return report.ok() ? 0 : kExitFailure;
}

int cmd_weights(const std::string& rewards_text, int k, const std::string& estimator_name) {
  const auto est = rspo::parse_estimator(estimator_name);
  if (!est) {
    std::cerr << "rspo weights: unknown estimator '" << estimator_name << "'\n";
    return kExitUsage;
  }
  try {
    const auto rewards = parse_reward_list(rewards_text);
    const auto sample = rspo::sample_from_rewards(rewards);
    rspo::validate_estimator_setup(*est, static_cast<int>(sample.size()), k, rspo::all_binary<double>(sample.rewards));
    const auto w = rspo::compute_weights(*est, sample, k);
    std::cout << rspo::json(w.weights).dump() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "rspo weights: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}

int cmd_train(const std::string& path) {
  try {
    auto exp = rspo::load_experiment(path);
    if (const char* dir = std::getenv("RSPO_OUTPUT_DIR"); dir != nullptr && *dir != '\0') exp.output_dir = dir;
    const auto out = rspo::run_experiment(exp);
    std::cout << "wrote " << out.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "rspo train: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}

int cmd_task_show(const std::string& name) {
  try {
    std::cout << rspo::task_to_json(rspo::builtin_task(name)).dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "rspo task show: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unbiased Pass@k / Max@k policy-gradient estimators on synthetic tasks"};
  app.require_subcommand(1);

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite, "identities | unbiasedness | equivalences | all")->required();

  std::string rewards;
  int k = 1;
  std::string estimator = "rspo_passk";
  auto* weights = app.add_subcommand("weights", "print estimator weights for a reward list as JSON");
  weights->add_option("--rewards", rewards, "comma-separated rewards, e.g. 1,0,1,0")->required();
  weights->add_option("--k", k, "k of the objective")->required();
  weights->add_option("--estimator", estimator, "estimator id")->capture_default_str();

  std::string config;
  auto* train = app.add_subcommand("train", "run an experiment config");
  train->add_option("config", config, "experiment JSON")->required();

  std::string task_name;
  auto* task = app.add_subcommand("task", "built-in reference tasks");
  task->require_subcommand(1);
  auto* task_list = task->add_subcommand("list", "list built-in task names");
  auto* task_show = task->add_subcommand("show", "print a built-in task as JSON");
  task_show->add_option("name", task_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*verify) return cmd_verify(suite);
    if (*weights) return cmd_weights(rewards, k, estimator);
    if (*train) return cmd_train(config);
    if (*task_list) {
      for (const auto& name : rspo::builtin_task_names()) std::cout << name << '\n';
      return 0;
    }
    if (*task_show) return cmd_task_show(task_name);
  } catch (const std::exception& e) {
    std::cerr << "rspo: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
