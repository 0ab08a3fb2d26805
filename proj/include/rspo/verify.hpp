#pragma once

// Verification batteries: exact identities, unbiasedness by enumeration,
// and estimator equivalences. Used by `rspo verify` and the acceptance suite.

#include "rspo/analytic.hpp"
#include "rspo/baseline.hpp"
#include "rspo/combinatorics.hpp"
#include "rspo/estimator.hpp"
#include "rspo/maxk.hpp"
#include "rspo/oracle.hpp"
#include "rspo/passk.hpp"
#include "rspo/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rspo::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Report {
  std::vector<CheckResult> checks;
  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
};

/// Runs `body`, which fills in passed/detail; records wall time and turns
/// exceptions into failures.
inline CheckResult timed(std::string name, const std::function<void(CheckResult&)>& body) {
  CheckResult r;
  r.name = std::move(name);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// --- Fixtures ------------------------------------------------------------------

struct PolicyFixture {
  std::vector<double> probs;
};

inline std::vector<PolicyFixture> policy_fixtures() {
  return {{{0.6, 0.4}}, {{0.25, 0.75}}, {{0.9, 0.1}},
          {{0.5, 0.3, 0.2}}, {{0.2, 0.2, 0.6}}, {{1.0 / 3, 1.0 / 3, 1.0 / 3}}};
}

/// Every binary table of size v.
inline std::vector<std::vector<double>> binary_tables(std::size_t v) {
  std::vector<std::vector<double>> out;
  for (unsigned mask = 0; mask < (1u << v); ++mask) {
    std::vector<double> t(v);
    for (std::size_t i = 0; i < v; ++i) t[i] = (mask >> i) & 1u ? 1.0 : 0.0;
    out.push_back(std::move(t));
  }
  return out;
}

/// Continuous tables, with and without ties.
inline std::vector<std::vector<double>> continuous_tables(std::size_t v) {
  if (v == 2) return {{0.3, 0.9}, {0.9, 0.3}, {0.5, 0.5}, {0.0, 1.0}};
  return {{0.0, 0.5, 1.0}, {1.0, 0.5, 0.5}, {0.2, 0.2, 0.7}, {0.4, 0.4, 0.4}, {0.9, 0.1, 0.5}, {0.7, 0.0, 0.7}};
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// --- Identities ------------------------------------------------------------------

inline CheckResult check_dice_closed_form() {
  return timed("best-of-k dice example (37/216)", [](CheckResult& r) {
    const std::vector<Rational> probs(6, Rational(1, 6));
    const std::vector<Rational> faces{1, 2, 3, 4, 5, 6};
    const Rational exact = best_of_k_prob<Rational>(probs, faces, 3, 3);
    const std::vector<double> fp(6, 1.0 / 6.0);
    const std::vector<double> ff{1, 2, 3, 4, 5, 6};
    const double approx = best_of_k_prob<double>(fp, ff, 3, 3);
    r.passed = exact == Rational(37, 216) && std::abs(approx - 37.0 / 216.0) <= 1e-12;
    std::ostringstream os;
    os << "rational=" << exact << " float=" << approx;
    r.detail = os.str();
  });
}

inline CheckResult check_sum_identities() {
  return timed("product-power sum identities, closed form vs direct sum (c_lt, c_eq <= 12, m <= 8)", [](CheckResult& r) {
    std::size_t cases = 0;
    for (std::int64_t cl = 0; cl <= 12; ++cl) {
      for (std::int64_t ce = 0; ce <= 12; ++ce) {
        for (std::int64_t m = 0; m <= 8; ++m) {
          ++cases;
          if (lemma2_closed_form(cl, ce, m) != lemma2_direct_sum(cl, ce, m)) {
            r.detail = "first sum identity mismatch at c_lt=" + std::to_string(cl) + " c_eq=" + std::to_string(ce) +
                       " m=" + std::to_string(m);
            return;
          }
          if (lemma3_closed_form(cl, ce, m) != lemma3_direct_sum(cl, ce, m)) {
            r.detail = "weighted sum identity mismatch at c_lt=" + std::to_string(cl) + " c_eq=" + std::to_string(ce) +
                       " m=" + std::to_string(m);
            return;
          }
        }
      }
    }
    r.passed = true;
    r.detail = std::to_string(cases) + " cases exact";
  });
}

inline CheckResult check_hockey_stick() {
  return timed("hockey-stick identity (i <= 64, 2 <= k <= 16)", [](CheckResult& r) {
    for (std::int64_t k = 2; k <= 16; ++k) {
      for (std::int64_t i = 0; i <= 64; ++i) {
        const BigInt expected = i >= 1 ? binom(i - 1, k - 1) : BigInt(0);
        if (hockey_stick_sum(i, k) != expected) {
          r.detail = "mismatch at i=" + std::to_string(i) + " k=" + std::to_string(k);
          return;
        }
      }
    }
    r.passed = true;
    r.detail = "975 cases exact";
  });
}

inline CheckResult check_pascal_rule() {
  return timed("Pascal's rule (n <= 64)", [](CheckResult& r) {
    for (std::int64_t n = 1; n <= 64; ++n) {
      for (std::int64_t k = 1; k <= n; ++k) {
        if (binom(n, k) != binom(n - 1, k - 1) + binom(n - 1, k)) {
          r.detail = "mismatch at n=" + std::to_string(n) + " k=" + std::to_string(k);
          return;
        }
      }
    }
    r.passed = true;
  });
}

inline CheckResult check_binom_ratio() {
  return timed("product-form binomial ratio (n <= 64)", [](CheckResult& r) {
    std::size_t cases = 0;
    double worst = 0.0;
    for (std::int64_t n = 1; n <= 64; ++n) {
      for (std::int64_t k = 1; k <= n; ++k) {
        const BigInt den = binom(n - 1, k - 1);
        for (std::int64_t c = 0; c <= n; ++c) {
          ++cases;
          const BigInt num = n - c >= 0 ? binom(n - c, k - 1) : BigInt(0);
          const Rational exact(num, den);
          if (binom_ratio_product<Rational>(n, c, k) != exact) {
            r.detail = "rational mismatch at n=" + std::to_string(n) + " c=" + std::to_string(c) +
                       " k=" + std::to_string(k);
            return;
          }
          const double fp = binom_ratio_product<double>(n, c, k);
          const double ex = exact.convert_to<double>();
          const double rel = ex == 0.0 ? std::abs(fp) : std::abs(fp - ex) / ex;
          worst = std::max(worst, rel);
          if (rel > 1e-12) {
            r.detail = "float error " + std::to_string(rel) + " at n=" + std::to_string(n) + " c=" +
                       std::to_string(c) + " k=" + std::to_string(k);
            return;
          }
        }
      }
    }
    r.passed = true;
    std::ostringstream os;
    os << cases << " cases; rational exact, worst float rel err " << worst;
    r.detail = os.str();
  });
}

// --- Unbiasedness -----------------------------------------------------------------

inline CheckResult check_passk_unbiasedness(double tol = 1e-10) {
  return timed("Pass@k unbiasedness grid (V in {2,3}, n in 2..5, k <= n)", [tol](CheckResult& r) {
    double worst = 0.0;
    std::size_t cases = 0;
    for (const auto& fx : policy_fixtures()) {
      for (const auto& table : binary_tables(fx.probs.size())) {
        for (int n = 2; n <= 5; ++n) {
          for (int k = 1; k <= n; ++k) {
            const auto est = enumerate_estimator_expectation<double>(fx.probs, table, Estimator::rspo_passk, n, k);
            const auto exact = exact_passk_gradient<double>(fx.probs, table, k);
            worst = std::max(worst, max_abs_diff(est, exact));
            ++cases;
          }
        }
      }
    }
    r.passed = worst <= tol;
    std::ostringstream os;
    os << cases << " instances, max |E[g] - grad| = " << worst << " (tol " << tol << ")";
    r.detail = os.str();
  });
}

inline CheckResult check_maxk_unbiasedness(Estimator e = Estimator::rspo_maxk_exact, double tol = 1e-8) {
  return timed(std::string("Max@k unbiasedness grid for ") + std::string(to_string(e)) +
                   " (V <= 3, n <= 5, k <= n, ties included)",
               [e, tol](CheckResult& r) {
                 double worst = 0.0;
                 std::size_t cases = 0;
                 for (const auto& fx : policy_fixtures()) {
                   auto tables = continuous_tables(fx.probs.size());
                   for (auto& b : binary_tables(fx.probs.size())) tables.push_back(b);
                   for (const auto& table : tables) {
                     for (int n = 1; n <= 5; ++n) {
                       for (int k = 1; k <= n; ++k) {
                         const auto est = enumerate_estimator_expectation<double>(fx.probs, table, e, n, k);
                         const auto exact = exact_maxk_gradient<double>(fx.probs, table, k);
                         worst = std::max(worst, max_abs_diff(est, exact));
                         ++cases;
                       }
                     }
                   }
                 }
                 r.passed = worst <= tol;
                 std::ostringstream os;
                 os << cases << " instances, max |E[g] - grad| = " << worst << " (tol " << tol << ")";
                 r.detail = os.str();
               });
}

inline CheckResult check_policy_gradient_unbiasedness(double tol = 1e-10) {
  return timed("vanilla policy gradient (k = 1) unbiasedness", [tol](CheckResult& r) {
    double worst = 0.0;
    for (const auto& fx : policy_fixtures()) {
      for (const auto& table : continuous_tables(fx.probs.size())) {
        for (int n = 1; n <= 4; ++n) {
          const auto est = enumerate_estimator_expectation<double>(fx.probs, table, Estimator::policy_gradient, n, 1);
          worst = std::max(worst, max_abs_diff(est, exact_maxk_gradient<double>(fx.probs, table, 1)));
        }
      }
    }
    r.passed = worst <= tol;
    r.detail = "max deviation " + std::to_string(worst);
  });
}

inline CheckResult check_product_power_unbiasedness(double tol = 1e-10) {
  return timed("product-power estimator unbiasedness (3 levels, n0 <= 6, a+b <= 3)", [tol](CheckResult& r) {
    // Three-level distributions; for each level, (P_<, P_<=).
    const std::vector<std::vector<double>> dists{{0.2, 0.5, 0.3}, {0.6, 0.1, 0.3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
    double worst = 0.0;
    std::size_t cases = 0;
    for (const auto& d : dists) {
      double below = 0.0;
      for (double mass : d) {
        const double p_lt = below;
        const double p_le = below + mass;
        below += mass;
        for (std::int64_t n0 = 0; n0 <= 6; ++n0) {
          for (std::int64_t a = 0; a <= 3; ++a) {
            for (std::int64_t b = 0; a + b <= 3; ++b) {
              if (a + b > n0) continue;
              const double est = enumerate_product_power_expectation<double>(p_lt, p_le, n0, a, b);
              worst = std::max(worst, std::abs(est - std::pow(p_lt, a) * std::pow(p_le, b)));
              ++cases;
            }
          }
        }
      }
    }
    r.passed = worst <= tol;
    std::ostringstream os;
    os << cases << " cases, max deviation " << worst;
    r.detail = os.str();
  });
}

inline CheckResult check_bias_witnesses(double threshold = 1e-6) {
  return timed("bias witnesses (naive_passk, plugin_maxk)", [threshold](CheckResult& r) {
    const std::vector<double> p2{0.6, 0.4}, r2{1.0, 0.0};
    const double naive = max_abs_diff(enumerate_estimator_expectation<double>(p2, r2, Estimator::naive_passk, 3, 2),
                                      exact_passk_gradient<double>(p2, r2, 2));
    const std::vector<double> p3{0.5, 0.3, 0.2}, r3{0.0, 0.5, 1.0};
    const double plugin = max_abs_diff(enumerate_estimator_expectation<double>(p3, r3, Estimator::plugin_maxk, 3, 2),
                                       exact_maxk_gradient<double>(p3, r3, 2));
    r.passed = naive > threshold && plugin > threshold;
    std::ostringstream os;
    os << "naive_passk bias " << naive << ", plugin_maxk bias " << plugin << " (threshold " << threshold << ")";
    r.detail = os.str();
  });
}

// --- Equivalences ------------------------------------------------------------------

/// Random reward list over a small rational alphabet so that ties are common.
inline std::vector<Rational> random_tied_rewards(Engine& eng, std::size_t n) {
  static const std::vector<Rational> alphabet{Rational(0), Rational(1, 4), Rational(1, 2), Rational(3, 4),
                                              Rational(1), Rational(7, 5)};
  std::vector<Rational> out(n);
  for (auto& v : out) v = alphabet[static_cast<std::size_t>(eng() % alphabet.size())];
  return out;
}

inline CheckResult check_tsum_equivalence(std::size_t cases = 200) {
  return timed("t-sum estimator == closed-form exact estimator (rational, n <= 8)", [cases](CheckResult& r) {
    Engine eng = make_stream(2024, 1);
    std::size_t with_ties = 0;
    for (std::size_t c = 0; c < cases; ++c) {
      const std::size_t n = 1 + static_cast<std::size_t>(eng() % 8);
      const int k = 1 + static_cast<int>(eng() % n);
      const auto sample = sample_from_rewards(random_tied_rewards(eng, n));
      const auto sorted = sort_sample(sample);
      with_ties += sorted.has_ties() ? 1 : 0;
      if (tsum_rspo_maxk_weights(sorted, k).weights != exact_rspo_maxk_weights(sorted, k).weights) {
        r.detail = "mismatch in case " + std::to_string(c) + " (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")";
        return;
      }
    }
    // Exhaustive sweep over all k for the largest size as well.
    for (std::size_t c = 0; c < 20; ++c) {
      const auto sorted = sort_sample(sample_from_rewards(random_tied_rewards(eng, 8)));
      for (int k = 1; k <= 8; ++k) {
        if (tsum_rspo_maxk_weights(sorted, k).weights != exact_rspo_maxk_weights(sorted, k).weights) {
          r.detail = "mismatch in n=8 sweep, k=" + std::to_string(k);
          return;
        }
      }
    }
    r.passed = true;
    r.detail = std::to_string(cases) + " random cases (" + std::to_string(with_ties) + " with ties) + 160 n=8 sweeps, exact";
  });
}

inline CheckResult check_binary_collapse() {
  return timed("exact Max@k estimator == Pass@k estimator on binary rewards (n <= 10)", [](CheckResult& r) {
    std::size_t cases = 0;
    for (std::size_t n = 1; n <= 10; ++n) {
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<Rational> rewards(n);
        for (std::size_t i = 0; i < n; ++i) rewards[i] = (mask >> i) & 1u ? Rational(1) : Rational(0);
        const auto sample = sample_from_rewards(rewards);
        const auto sorted = sort_sample(sample);
        for (int k = 1; k <= static_cast<int>(n); ++k) {
          ++cases;
          if (exact_rspo_maxk_weights(sorted, k).weights != rspo_passk_weights(sample, k).weights) {
            r.detail = "mismatch at n=" + std::to_string(n) + " mask=" + std::to_string(mask) + " k=" + std::to_string(k);
            return;
          }
        }
      }
    }
    r.passed = true;
    r.detail = std::to_string(cases) + " cases exact";
  });
}

inline CheckResult check_nonnegativity(std::size_t cases = 10000) {
  return timed("Max@k weight non-negativity and zero pattern (random, n <= 12)", [cases](CheckResult& r) {
    Engine eng = make_stream(7, 3);
    for (std::size_t c = 0; c < cases; ++c) {
      const std::size_t n = 1 + static_cast<std::size_t>(eng() % 12);
      const int k = 1 + static_cast<int>(eng() % n);
      std::vector<double> rewards(n);
      const bool discrete = eng() % 2 == 0;
      for (auto& v : rewards) v = discrete ? static_cast<double>(eng() % 4) * 0.25 : uniform01(eng);
      const auto sorted = sort_sample(sample_from_rewards(rewards));
      const auto w = exact_rspo_maxk_weights(sorted, k).weights;
      for (std::size_t p = 0; p < n; ++p) {
        const double wp = w[sorted.order[p]];
        const bool must_be_zero = sorted.c_lt[p] + 1 < static_cast<std::size_t>(k);
        const bool ok = k == 1 ? wp == sorted.sorted_rewards[p]
                               : (must_be_zero ? wp == 0.0 : wp > 0.0);
        if (!ok || wp < 0.0) {
          std::ostringstream os;
          os << "case " << c << ": n=" << n << " k=" << k << " position " << p << " c_lt=" << sorted.c_lt[p]
             << " weight=" << wp;
          r.detail = os.str();
          return;
        }
      }
    }
    r.passed = true;
    r.detail = std::to_string(cases) + " cases";
  });
}

inline CheckResult check_approx_matches_exact() {
  return timed("approximate Max@k estimator == exact on distinct rewards", [](CheckResult& r) {
    Engine eng = make_stream(11, 5);
    for (int c = 0; c < 300; ++c) {
      const std::size_t n = 1 + static_cast<std::size_t>(eng() % 10);
      const int k = 1 + static_cast<int>(eng() % n);
      std::vector<Rational> rewards(n);
      for (std::size_t i = 0; i < n; ++i) rewards[i] = Rational(static_cast<long long>(eng() % 1000) * 16 + static_cast<long long>(i), 997);
      const auto sorted = sort_sample(sample_from_rewards(rewards));
      if (approx_rspo_maxk_weights(sorted, k).weights != exact_rspo_maxk_weights(sorted, k).weights) {
        r.detail = "mismatch in case " + std::to_string(c);
        return;
      }
    }
    r.passed = true;
    r.detail = "300 cases exact";
  });
}

inline CheckResult check_group_assembly() {
  return timed("group contributions reassemble the exact Max@k weights", [](CheckResult& r) {
    Engine eng = make_stream(13, 9);
    for (int c = 0; c < 200; ++c) {
      const std::size_t n = 2 + static_cast<std::size_t>(eng() % 9);
      const int k = 2 + static_cast<int>(eng() % (n - 1));
      const auto sorted = sort_sample(sample_from_rewards(random_tied_rewards(eng, n)));
      const auto exact = exact_rspo_maxk_weights(sorted, k).weights;
      const auto nn = static_cast<std::int64_t>(n);
      for (std::size_t p = 0; p < n; ++p) {
        const auto cl = static_cast<std::int64_t>(sorted.c_lt[p]);
        Rational w = Rational(k) * binom_ratio_product<Rational>(nn, nn - cl, k) * sorted.sorted_rewards[p];
        for (std::size_t q = 0; q < sorted.c_lt[p]; q += sorted.c_eq[q] + 1) {
          w += group_contribution<Rational>(static_cast<std::int64_t>(sorted.c_lt[q]),
                                            static_cast<std::int64_t>(sorted.c_eq[q]), nn, k, sorted.sorted_rewards[q]);
        }
        if (w != exact[sorted.order[p]]) {
          r.detail = "mismatch in case " + std::to_string(c);
          return;
        }
      }
    }
    r.passed = true;
    r.detail = "200 cases exact";
  });
}

inline CheckResult check_hitchhiking_contrast() {
  return timed("hitchhiking contrast on the group [1, 0]", [](CheckResult& r) {
    const auto base = baseline_group_weights<double>({{1.0, 0.0}}, 2);
    const auto rspo = rspo_passk_weights(sample_from_rewards<double>({1.0, 0.0}), 2);
    r.passed = base.size() == 1 && base[0].weights[1] == 1.0 && rspo.weights[1] == 0.0;
    std::ostringstream os;
    os << "baseline weight on the zero-reward response " << base[0].weights[1] << ", rspo_passk weight "
       << rspo.weights[1];
    r.detail = os.str();
  });
}

// --- Suites ----------------------------------------------------------------------

inline std::vector<std::string> suite_names() { return {"identities", "unbiasedness", "equivalences", "all"}; }

inline Report run_suite(std::string_view suite) {
  Report rep;
  const bool all = suite == "all";
  if (!all && suite != "identities" && suite != "unbiasedness" && suite != "equivalences") {
    throw std::invalid_argument("unknown suite '" + std::string(suite) + "'");
  }
  if (all || suite == "identities") {
    rep.checks.push_back(check_dice_closed_form());
    rep.checks.push_back(check_sum_identities());
    rep.checks.push_back(check_hockey_stick());
    rep.checks.push_back(check_pascal_rule());
    rep.checks.push_back(check_binom_ratio());
  }
  if (all || suite == "unbiasedness") {
    rep.checks.push_back(check_passk_unbiasedness());
    rep.checks.push_back(check_maxk_unbiasedness(Estimator::rspo_maxk_exact));
    rep.checks.push_back(check_maxk_unbiasedness(Estimator::rspo_maxk_tsum));
    rep.checks.push_back(check_policy_gradient_unbiasedness());
    rep.checks.push_back(check_product_power_unbiasedness());
    rep.checks.push_back(check_bias_witnesses());
  }
  if (all || suite == "equivalences") {
    rep.checks.push_back(check_tsum_equivalence());
    rep.checks.push_back(check_binary_collapse());
    rep.checks.push_back(check_approx_matches_exact());
    rep.checks.push_back(check_group_assembly());
    rep.checks.push_back(check_nonnegativity());
    rep.checks.push_back(check_hitchhiking_contrast());
  }
  return rep;
}

}  // namespace rspo::verify
