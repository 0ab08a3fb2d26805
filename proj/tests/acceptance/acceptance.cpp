// Acceptance criteria runner: one PASS/FAIL line per criterion.
// Exit status is 0 only when every criterion passes.

#include "rspo/io.hpp"
#include "rspo/oracle.hpp"
#include "rspo/tasks.hpp"
#include "rspo/trainer.hpp"
#include "rspo/verify.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using rspo::verify::CheckResult;

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // seconds
  std::function<CheckResult()> body;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::size_t eval_index(const rspo::TaskSpec& task, int k) {
  const auto it = std::find(task.eval_k_list.begin(), task.eval_k_list.end(), k);
  if (it == task.eval_k_list.end()) throw std::logic_error("k not in eval_k_list");
  return static_cast<std::size_t>(it - task.eval_k_list.begin());
}

rspo::TrainConfig reference_config(const std::string& task, rspo::Estimator e, int k, std::uint64_t seed,
                                   int steps, int log_every) {
  rspo::TrainConfig c;
  c.task = rspo::builtin_task(task);
  c.estimator = e;
  c.k = k;
  c.n = 16;
  c.steps = steps;
  c.learning_rate = 0.3;
  c.seed = seed;
  c.log_every = log_every;
  return c;
}

// All-of combination of several verify checks into one criterion result.
CheckResult combine(std::vector<CheckResult> parts) {
  CheckResult r;
  r.passed = true;
  for (const auto& p : parts) {
    r.passed = r.passed && p.passed;
    r.seconds += p.seconds;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += (p.passed ? "" : "FAILED ") + p.name + ": " + p.detail;
  }
  return r;
}

CheckResult risk_mismatch() {
  return rspo::verify::timed("", [](CheckResult& r) {
    const auto task = rspo::builtin_task("two_mode_maxk");
    const std::size_t at4 = eval_index(task, 4);
    std::vector<double> pg, rspo_exact;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      pg.push_back(rspo::train(reference_config("two_mode_maxk", rspo::Estimator::policy_gradient, 1, seed, 500, 50))
                       .records.back()
                       .max_at_k[at4]);
      rspo_exact.push_back(
          rspo::train(reference_config("two_mode_maxk", rspo::Estimator::rspo_maxk_exact, 4, seed, 500, 50))
              .records.back()
              .max_at_k[at4]);
    }
    const double oracle = rspo::exact_objective_optimum(task, rspo::Objective::max_at_k, 4).value;
    const double m_pg = median(pg), m_rspo = median(rspo_exact);
    r.passed = m_pg <= 0.75 && m_rspo >= 0.90;
    std::ostringstream os;
    os << "median Max@4: policy_gradient(k=1) " << m_pg << " (need <= 0.75), rspo_maxk_exact(k=4) " << m_rspo
       << " (need >= 0.90); oracle optimum " << oracle;
    r.detail = os.str();
  });
}

CheckResult k_matching() {
  return rspo::verify::timed("", [](CheckResult& r) {
    const auto task = rspo::builtin_task("split_passk");
    const std::size_t at4 = eval_index(task, 4);
    std::vector<double> finals;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      finals.push_back(rspo::train(reference_config("split_passk", rspo::Estimator::rspo_passk, 4, seed, 500, 50))
                           .records.back()
                           .pass_at_k[at4]);
    }
    const double oracle = rspo::exact_objective_optimum(task, rspo::Objective::pass_at_k, 4).value;
    const double m = median(finals);
    r.passed = m >= 0.90 && std::abs(m - oracle) <= 0.05;
    std::ostringstream os;
    os << "median Pass@4 " << m << " (need >= 0.90 and within 0.05 of oracle " << oracle << ")";
    r.detail = os.str();
  });
}

CheckResult entropy_ordering() {
  return rspo::verify::timed("", [](CheckResult& r) {
    const int steps = 300;
    const int tail_start = steps - steps / 4;  // final 25%: steps 226..300
    auto tail_entropy = [&](int k) {
      std::vector<double> per_seed;
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto rec = rspo::train(reference_config("entropy_probe", rspo::Estimator::rspo_passk, k, seed, steps, 1)).records;
        double total = 0.0;
        int count = 0;
        for (const auto& x : rec) {
          if (x.step > tail_start) {
            total += x.entropy;
            ++count;
          }
        }
        per_seed.push_back(total / count);
      }
      return median(per_seed);
    };
    const double h1 = tail_entropy(1);
    const double h8 = tail_entropy(8);
    r.passed = h8 >= h1 + 0.05;
    std::ostringstream os;
    os << "median tail entropy: k=1 " << h1 << " nats, k=8 " << h8 << " nats (need k=8 >= k=1 + 0.05)";
    r.detail = os.str();
  });
}

int run_cli_train(const fs::path& config, const fs::path& out_dir) {
  const std::string cmd = "RSPO_OUTPUT_DIR='" + out_dir.string() + "' '" RSPO_CLI_PATH "' train '" + config.string() +
                          "' > /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CheckResult determinism() {
  return rspo::verify::timed("", [](CheckResult& r) {
    const fs::path root = fs::current_path() / "acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path config = root / "config.json";
    std::ofstream(config) << R"({
      "schema_version": 1,
      "name": "determinism",
      "task": "two_mode_maxk",
      "seeds": [0, 7],
      "runs": [
        {"estimator": "policy_gradient", "k": 1, "steps": 200, "learning_rate": 0.3, "log_every": 5},
        {"estimator": "rspo_maxk_exact", "k": 4, "steps": 200, "learning_rate": 0.3, "log_every": 5},
        {"estimator": "rspo_maxk_approx", "k": 4, "steps": 200, "learning_rate": 0.3, "log_every": 5},
        {"estimator": "plugin_maxk", "k": 2, "steps": 200, "learning_rate": 0.3, "log_every": 5},
        {"estimator": "baseline", "k": 4, "steps": 200, "learning_rate": 0.3, "log_every": 5, "prune_zero_weights": false}
      ]
    })";
    const int a = run_cli_train(config, root / "a");
    const int b = run_cli_train(config, root / "b");
    if (a != 0 || b != 0) {
      r.detail = "rspo train exited with " + std::to_string(a) + " / " + std::to_string(b);
      return;
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(root / "a" / "determinism")) {
      const fs::path other = root / "b" / "determinism" / entry.path().filename();
      const std::string x = slurp(entry.path());
      if (x.empty() || x != slurp(other)) {
        r.detail = "mismatch in " + entry.path().filename().string();
        return;
      }
      ++compared;
    }
    r.passed = compared == 11;  // 10 CSVs + summary.json
    r.detail = std::to_string(compared) + " files byte-identical across two runs";
    fs::remove_all(root);
  });
}

}  // namespace

int main() {
  namespace v = rspo::verify;
  const std::vector<Criterion> criteria{
      {1, "dice closed form 37/216", 1e-3, [] { return v::check_dice_closed_form(); }},
      {2, "Pass@k unbiasedness grid (tol 1e-10)", 10, [] { return v::check_passk_unbiasedness(1e-10); }},
      {3, "Max@k unbiasedness grid with ties (tol 1e-8)", 60,
       [] { return v::check_maxk_unbiasedness(rspo::Estimator::rspo_maxk_exact, 1e-8); }},
      {4, "bias witnesses (> 1e-6)", 1, [] { return v::check_bias_witnesses(1e-6); }},
      {5, "identity suite, exact arithmetic", 5,
       [] { return combine({v::check_sum_identities(), v::check_hockey_stick(), v::check_binom_ratio()}); }},
      {6, "estimator equivalences, exact arithmetic", 10,
       [] { return combine({v::check_tsum_equivalence(200), v::check_binary_collapse()}); }},
      {7, "non-negativity and zero pattern (10,000 cases)", 5, [] { return v::check_nonnegativity(10000); }},
      {8, "hitchhiking contrast", 1e-3, [] { return v::check_hitchhiking_contrast(); }},
      {9, "risk mismatch on two_mode_maxk", 120, risk_mismatch},
      {10, "train-k/eval-k matching on split_passk", 60, k_matching},
      {11, "entropy ordering on entropy_probe", 60, entropy_ordering},
      {12, "byte-identical CSVs from repeated rspo train", 60, determinism},
  };

  bool all = true;
  for (const auto& c : criteria) {
    CheckResult r = c.body();
    const bool in_time = r.seconds < c.time_limit;
    const bool ok = r.passed && in_time;
    all = all && ok;
    std::ostringstream line;
    line << "AC" << std::setw(2) << std::left << c.id << ' ' << (ok ? "PASS" : "FAIL") << "  " << c.title << "  ["
         << std::fixed << std::setprecision(4) << r.seconds << "s, limit " << std::defaultfloat << c.time_limit << "s]";
    if (!in_time) line << " TOO SLOW";
    std::cout << line.str() << "\n      " << r.detail << std::endl;
  }
  std::cout << (all ? "all acceptance criteria passed" : "some acceptance criteria FAILED") << std::endl;
  return all ? 0 : 1;
}
