#include "moram/altmin.hpp"
#include "moram/harness.hpp"
#include "moram/init.hpp"
#include "moram/model.hpp"
#include "moram/theory.hpp"
#include "moram/wavelet.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

using namespace moram;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct DescentFlags {
  int iters = 10;
  double tol = 1e-6;

  void attach(CLI::App& app) {
    app.add_option("--iters", iters, "Maximum alternating-minimization iterations")->capture_default_str();
    app.add_option("--tol", tol, "Relative residual accepted as an exact fit")->capture_default_str();
  }

  DescentConfig config() const {
    DescentConfig d;
    d.max_altmin_iters = iters;
    d.exact_tol = tol;
    return d;
  }
};

// key=value lines without a [section] belong to the subcommand being run.
class FlatConfig : public CLI::ConfigINI {
 public:
  explicit FlatConfig(std::string section) : section_(std::move(section)) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::vector<CLI::ConfigItem> items = CLI::ConfigINI::from_config(input);
    for (CLI::ConfigItem& item : items) {
      if (item.parents.empty() && item.name != "++" && item.name != "--") item.parents = {section_};
    }
    return items;
  }

 private:
  std::string section_;
};

std::string active_subcommand(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "sweep" || arg == "image" || arg == "theory-check" || arg == "demo") return arg;
  }
  return {};
}

int run_sweep_command(SweepConfig cfg) {
  cfg.validate();
  const SweepResult res = run_sweep(cfg);
  std::printf("%6s %6s %4s %6s %7s %6s %14s %7s\n", "n", "m", "s", "R", "trials", "failed", "mean_rel_error",
              "exact");
  for (const CellSummary& c : res.cells) {
    std::printf("%6lld %6lld %4lld %6.3g %7d %6d %14.6g %7.2f\n", static_cast<long long>(c.n),
                static_cast<long long>(c.m), static_cast<long long>(c.s), c.range_r, c.trials, c.failed,
                c.mean_rel_error, c.exact_fraction);
  }
  if (!cfg.output_path.empty()) std::printf("wrote %s\n", cfg.output_path.string().c_str());

  std::size_t failed = 0;
  for (const ExperimentRecord& r : res.records) failed += !r.error.empty();
  if (failed > 0) {
    for (const ExperimentRecord& r : res.records) {
      if (!r.error.empty()) {
        std::fprintf(stderr, "first failure (s=%lld m=%lld R=%g trial=%d): %s\n", static_cast<long long>(r.s),
                     static_cast<long long>(r.m), r.range_r, r.trial, r.error.c_str());
        break;
      }
    }
    std::fprintf(stderr, "%zu of %zu trials failed\n", failed, res.records.size());
  }
  return failed == res.records.size() ? kRuntimeError : kOk;
}

int run_image_command(const ImageConfig& cfg, const std::filesystem::path& prefix) {
  const ImageReport rep = run_image(cfg);
  const std::string name = cfg.image_path.filename().string();
  std::cout << image_csv_header() << "\n" << image_csv_row(rep, name) << "\n";
  if (!prefix.empty()) {
    write_image_outputs(rep, prefix, name, cfg.peak255);
    std::printf("wrote %s_{recovered,residual}.pgm and %s_metrics.csv\n", prefix.string().c_str(),
                prefix.string().c_str());
  }
  return rep.converged ? kOk : kRuntimeError;
}

int run_theory_command(Index s, Index n, double eps, double eta, double delta, int pairs, std::uint64_t seed) {
  const BeseBudget budget = BeseBudget::make(2 * s, n, eps, eta);
  std::printf("required_measurements(2s=%lld, n=%lld, eps=%g, eta=%g) = %lld\n", static_cast<long long>(2 * s),
              static_cast<long long>(n), eps, eta, static_cast<long long>(budget.m_required));

  const auto a = gaussian_matrix(budget.m_required, n, derive_seed({seed, 1}));
  const double theta = 2.0 * std::asin(delta / 2.0);
  const double bound = delta / 2.0 + eps;
  int within = 0;
  int sandwich_ok = 0;
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const auto pk = static_cast<std::uint64_t>(k);
    const SparseSignal xs = random_sparse_signal(n, s, derive_seed({seed, 2, pk}), true);
    Vector w = random_sparse_signal(n, s, derive_seed({seed, 3, pk}), false).values();
    w -= w.dot(xs.values()) * xs.values();
    w /= w.norm();
    const Vector x0 = std::cos(theta) * xs.values() + std::sin(theta) * w;
    const double dh = empirical_bese(a, xs.values(), x0);
    worst = std::max(worst, dh);
    within += dh <= bound;
    sandwich_ok += sandwich_check(xs.values(), x0).holds(1e-12);
  }
  std::printf("pairs at distance %g: %d/%d with d_H <= %g (max d_H %.4f)\n", delta, within, pairs, bound, worst);
  std::printf("sandwich 2 d_S <= ||p - q|| <= pi d_S: %d/%d\n", sandwich_ok, pairs);
  return within == pairs && sandwich_ok == pairs ? kOk : kRuntimeError;
}

int run_demo_command(Index n, Index s, Index m, double r, std::uint64_t seed, const DescentConfig& descent) {
  descent.validate();
  const auto a = gaussian_matrix(m, n, derive_seed({seed, 1}));
  const SparseSignal x_star = random_sparse_signal(n, s, derive_seed({seed, 2}), true);
  const ModuloObservation obs = forward(a, x_star, r, true);
  const BinIndexVector truth = true_bin_indices(a, x_star);
  const BinIndexVector guess = ml_bin_indices(obs);
  std::printf("n=%lld s=%lld m=%lld R=%g seed=%llu\n", static_cast<long long>(n), static_cast<long long>(s),
              static_cast<long long>(m), r, static_cast<unsigned long long>(seed));
  std::printf("initial bin errors: %lld of %lld\n", static_cast<long long>(guess.count_differences(truth)),
              static_cast<long long>(m));

  const SparseSignal x0 = moram_initialize(obs, a, s);
  std::printf("initial relative error: %.3e\n", relative_error(x0.values(), x_star.values()));
  const DescentResult res = moram_descent(obs, a, s, descent, x0);
  for (Index t = 0; t < res.trace.size(); ++t) {
    const IterationRecord& it = res.trace.iterations[static_cast<std::size_t>(t)];
    std::printf("iter %lld: bin flips %lld, relative residual %.3e, %.1f ms\n", static_cast<long long>(t + 1),
                static_cast<long long>(it.bin_flips), it.relative_residual,
                std::chrono::duration<double, std::milli>(it.wall_time).count());
  }
  const double err = relative_error(res.x.values(), x_star.values());
  std::printf("final relative error: %.3e (%s)\n", err, res.trace.converged ? "converged" : "not converged");
  std::printf("%8s %14s %14s\n", "index", "x_star", "x_hat");
  for (Index i : x_star.support()) std::printf("%8lld %14.8f %14.8f\n", static_cast<long long>(i), x_star.values()[i], res.x.values()[i]);
  return err < kExactThreshold ? kOk : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse recovery from two-period modulo measurements"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");
  app.config_formatter(std::make_shared<FlatConfig>(active_subcommand(argc, argv)));
  app.allow_config_extras(CLI::config_extras_mode::error);

  // sweep
  SweepConfig sweep;
  DescentFlags sweep_descent;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo grid over (s, m, R, trial), written as CSV");
  sweep_cmd->allow_config_extras(CLI::config_extras_mode::error);
  sweep_cmd->add_option("--n", sweep.n, "Signal dimension")->capture_default_str();
  sweep_cmd->add_option("--s", sweep.s_list, "Sparsity levels")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--m", sweep.m_list, "Measurement counts")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--r", sweep.r_list, "Dynamic range values R")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--trials", sweep.trials, "Trials per grid cell")->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.base_seed, "Base seed")->capture_default_str();
  sweep_cmd->add_option("--workers", sweep.workers, "Worker threads (0 = hardware concurrency)");
  sweep_cmd->add_option("--out", sweep_out, "CSV output path");
  sweep_cmd->add_flag("--strict-range,!--no-strict-range", sweep.strict_range,
                      "Reject measurements with |<a_i, x>| > R (default on)");
  sweep_descent.attach(*sweep_cmd);

  // image
  ImageConfig image;
  DescentFlags image_descent;
  std::string image_in;
  std::string image_out;
  auto* image_cmd = app.add_subcommand("image", "Recover an s-sparse Haar approximation of a PGM image");
  image_cmd->allow_config_extras(CLI::config_extras_mode::error);
  image_cmd->add_option("--image,image", image_in, "Input binary PGM (P5)")->required();
  image_cmd->add_option("--s", image.s, "Kept Haar coefficients")->capture_default_str();
  image_cmd->add_option("--m", image.m, "Measurements")->capture_default_str();
  image_cmd->add_option("--r", image.range_r, "Dynamic range R")->capture_default_str();
  image_cmd->add_option("--seed", image.seed, "Measurement matrix seed")->capture_default_str();
  image_cmd->add_option("--out", image_out, "Output prefix for PGM and metrics files");
  image_cmd->add_flag("--strict-range,!--no-strict-range", image.strict_range,
                      "Reject measurements with |<a_i, x>| > R (default on)");
  image_cmd->add_flag("--peak255", image.peak255, "Work in 0..255 pixel units");
  image_descent.attach(*image_cmd);

  // theory-check
  Index th_s = 3;
  Index th_n = 100;
  double th_eps = 0.1;
  double th_eta = 0.1;
  double th_delta = 0.2;
  int th_pairs = 50;
  std::uint64_t th_seed = 0;
  auto* theory_cmd = app.add_subcommand("theory-check", "Measurement budget and empirical sign-embedding check");
  theory_cmd->allow_config_extras(CLI::config_extras_mode::error);
  theory_cmd->add_option("--s", th_s, "Sparsity of each signal")->capture_default_str();
  theory_cmd->add_option("--n", th_n, "Signal dimension")->capture_default_str();
  theory_cmd->add_option("--eps", th_eps, "Embedding accuracy epsilon")->capture_default_str();
  theory_cmd->add_option("--eta", th_eta, "Failure probability eta")->capture_default_str();
  theory_cmd->add_option("--delta", th_delta, "Distance between paired unit signals")->capture_default_str();
  theory_cmd->add_option("--trials", th_pairs, "Number of random pairs")->capture_default_str();
  theory_cmd->add_option("--seed", th_seed, "Seed")->capture_default_str();

  // demo
  Index demo_n = 1000;
  Index demo_s = 3;
  Index demo_m = 600;
  double demo_r = 4.0;
  std::uint64_t demo_seed = 0;
  DescentFlags demo_descent;
  auto* demo_cmd = app.add_subcommand("demo", "Single recovery with a per-iteration trace");
  demo_cmd->allow_config_extras(CLI::config_extras_mode::error);
  demo_cmd->add_option("--n", demo_n, "Signal dimension")->capture_default_str();
  demo_cmd->add_option("--s", demo_s, "Sparsity")->capture_default_str();
  demo_cmd->add_option("--m", demo_m, "Measurements")->capture_default_str();
  demo_cmd->add_option("--r", demo_r, "Dynamic range R")->capture_default_str();
  demo_cmd->add_option("--seed", demo_seed, "Seed")->capture_default_str();
  demo_descent.attach(*demo_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*sweep_cmd) {
      sweep.descent = sweep_descent.config();
      sweep.output_path = sweep_out;
      try {
        sweep.validate();
      } catch (const InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
      }
      return run_sweep_command(sweep);
    }
    if (*image_cmd) {
      image.image_path = image_in;
      image.descent = image_descent.config();
      try {
        image.descent.validate();
        if (!(image.range_r > 0.0)) throw InvalidArgument("image: R must be positive");
      } catch (const InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
      }
      return run_image_command(image, image_out);
    }
    if (*theory_cmd) {
      try {
        (void)required_measurements(2 * th_s, th_n, th_eps, th_eta);
        if (th_pairs < 1 || !(th_delta > 0.0 && th_delta <= 2.0)) {
          throw InvalidArgument("theory-check: need trials >= 1 and 0 < delta <= 2");
        }
      } catch (const InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
      }
      return run_theory_command(th_s, th_n, th_eps, th_eta, th_delta, th_pairs, th_seed);
    }
    if (*demo_cmd) {
      try {
        demo_descent.config().validate();
        if (demo_s < 1 || demo_s > demo_n || demo_m < 1) throw InvalidArgument("demo: need 1 <= s <= n and m >= 1");
        if (!(demo_r > 0.0)) throw InvalidArgument("demo: R must be positive");
      } catch (const InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
      }
      return run_demo_command(demo_n, demo_s, demo_m, demo_r, demo_seed, demo_descent.config());
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}
