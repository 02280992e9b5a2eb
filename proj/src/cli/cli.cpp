// SPDX-License-Identifier: Apache-2.0

#include "tsel/cli.hpp"

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "json.hpp"
#include "tsel/kernels.hpp"

namespace tsel::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotConverged:
      return kExitNotConverged;
    case ErrorCode::kIo:
    case ErrorCode::kBadMagic:
    case ErrorCode::kBadVersion:
    case ErrorCode::kTruncated:
    case ErrorCode::kNonFinite:
      return kExitIo;
    default:
      return kExitValidation;
  }
}

namespace {

void apply_thread_cap() {
  const char* env = std::getenv("TSEL_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n <= 0) {
    std::cerr << "tsel: ignoring TSEL_THREADS='" << env << "' (expected a positive integer)\n";
    return;
  }
  kernels::set_max_threads(static_cast<int>(n));
}

void add_pool_options(CLI::App* cmd, PoolOptions& p) {
  cmd->add_option("--d", p.d, "Dimension (>= 3)")->capture_default_str();
  cmd->add_option("--n", p.n, "Pool size")->capture_default_str();
  cmd->add_option("--diameter", p.diameter, "Diameter of the pool's support")->capture_default_str();
  cmd->add_option("--dist", p.distribution, "Pool distribution")
      ->check(CLI::IsMember({"uniform-cube", "gaussian-clipped"}))
      ->capture_default_str();
  cmd->add_option("--seed", p.seed, "Seed for the pool and the trials (trial t uses seed + t)")
      ->capture_default_str();
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"tsel: targeted subset selection over precomputed feature matrices"};
  app.require_subcommand(1);

  SelectOptions sel;
  auto* select = app.add_subcommand("select", "Select a budgeted subset of the pool for a query set");
  select->add_option("--method", sel.method, "Selection method")
      ->required()
      ->check(CLI::IsMember({"rr", "dg", "knn-uniform", "knn-kde", "uot"}));
  select->add_option("--query", sel.query, "Query features (.tsel, or manifest with --manifest)")->required();
  select->add_option("--pool", sel.pool, "Candidate features (.tsel, or manifest with --manifest)")->required();
  select->add_flag("--manifest", sel.manifest, "Treat --query/--pool as checkpoint manifests");
  select->add_option("--budget", sel.budget, "Number of candidates to select")->required();
  select->add_option("--metric", sel.metric, "Distance for knn/uot methods")
      ->check(CLI::IsMember({"cosine", "l2"}))
      ->capture_default_str();
  select->add_flag("--half-normalize", sel.half_normalize, "Cosine cost (1 - s) / 2 instead of 1 - s");
  select->add_option("--k", sel.k, "KNN neighborhood size (default: ceil(C * B / M))");
  select->add_option("--prefetch", sel.prefetch, "L: neighbors prefetched per query")->capture_default_str();
  select->add_option("--k-kde", sel.k_kde, "KDE neighborhood size")->capture_default_str();
  select->add_option("--sigma", sel.sigma, "KDE bandwidth")->capture_default_str();
  select->add_option("--c", sel.c, "C in the derived neighborhood size")->capture_default_str();
  select->add_option("--alpha", sel.alpha, "Positive-mass cutoff (diagnostic)")->capture_default_str();
  select->add_option("--epsilon", sel.epsilon, "UOT entropic regularization")->capture_default_str();
  select->add_option("--tau1", sel.tau1, "UOT query-marginal penalty ('inf' = hard)")->capture_default_str();
  select->add_option("--tau2", sel.tau2, "UOT candidate-marginal penalty")->capture_default_str();
  select->add_option("--tol", sel.tol, "UOT marginal tolerance")->capture_default_str();
  select->add_option("--max-iter", sel.max_iter, "UOT iteration limit")->capture_default_str();
  select->add_option("--out", sel.out, "Output JSON (default: stdout)");

  ProjectOptions proj;
  auto* project = app.add_subcommand("project", "Rademacher-project every row of a feature file");
  project->add_option("--in", proj.in, "Input .tsel")->required();
  project->add_option("--seed", proj.seed, "Projection seed")->capture_default_str();
  project->add_option("--out-dim", proj.out_dim, "Projected dimension")->capture_default_str();
  project->add_option("--out", proj.out, "Output .tsel")->required();

  W1CommandOptions w1o;
  auto* w1 = app.add_subcommand("w1", "1-Wasserstein distance between two uniform point sets");
  w1->add_option("--x", w1o.x, "First point set (.tsel)")->required();
  w1->add_option("--y", w1o.y, "Second point set (.tsel)")->required();
  w1->add_flag("--exact", w1o.exact, "Exact network-simplex solution (default)");
  w1->add_option("--epsilon", w1o.epsilon, "Use the entropic estimate with this regularization");
  w1->add_option("--cap", w1o.cap, "Largest point set the exact solver accepts")->capture_default_str();

  QuantileOptions qo;
  auto* quantile = app.add_subcommand("quantile", "Split the round-robin ordering into distance quantiles");
  quantile->add_option("--query", qo.query, "Query features")->required();
  quantile->add_option("--pool", qo.pool, "Candidate features")->required();
  quantile->add_flag("--manifest", qo.manifest, "Treat --query/--pool as checkpoint manifests");
  quantile->add_option("--n", qo.n, "Number of quantiles")->capture_default_str();
  quantile->add_option("--sub", qo.sub, "Further split one quantile into this many blocks");
  quantile->add_option("--sub-of", qo.sub_of, "Quantile (1-based) to split with --sub")->capture_default_str();
  quantile->add_option("--take", qo.take, "Indices emitted per block")->capture_default_str();
  quantile->add_option("--out", qo.out, "Output JSON lines (default: stdout)");

  CompareOptions co;
  auto* compare = app.add_subcommand("compare", "Jaccard index between two selections");
  compare->add_option("--a", co.a, "First selection JSON")->required();
  compare->add_option("--b", co.b, "Second selection JSON")->required();

  auto* validate = app.add_subcommand("validate", "Monte-Carlo checks of the W1 decay and concentration");
  validate->require_subcommand(1);

  DecayOptions dec;
  auto* decay = validate->add_subcommand("decay", "Mean W1 of random subsets versus budget");
  add_pool_options(decay, dec.pool);
  decay->add_option("--budgets", dec.budgets, "Strictly increasing budgets")
      ->delimiter(',')
      ->capture_default_str();
  decay->add_option("--trials", dec.trials, "Trials per budget")->capture_default_str();
  decay->add_option("--out", dec.out, "Output JSON (default: stdout)");

  McDiarmidOptions mcd;
  auto* mcdiarmid = validate->add_subcommand("mcdiarmid", "Coverage of the bounded-differences bound");
  add_pool_options(mcdiarmid, mcd.pool);
  mcdiarmid->add_option("--budget", mcd.budget, "Subset size B")->capture_default_str();
  mcdiarmid->add_option("--trials", mcd.trials, "Trials (>= 100)")->capture_default_str();
  mcdiarmid->add_option("--delta", mcd.delta, "Failure probability")->capture_default_str();
  mcdiarmid->add_option("--out", mcd.out, "Output JSON (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  apply_thread_cap();
  try {
    if (select->parsed()) return run_select(sel);
    if (project->parsed()) return run_project(proj);
    if (w1->parsed()) return run_w1(w1o);
    if (quantile->parsed()) return run_quantile(qo);
    if (compare->parsed()) return run_compare(co);
    if (decay->parsed()) return run_decay(dec);
    if (mcdiarmid->parsed()) return run_mcdiarmid(mcd);
  } catch (const Error& e) {
    std::cerr << "tsel: error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "tsel: error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "tsel: error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("tsel");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace tsel::cli
