// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "tsel/analysis.hpp"
#include "tsel/core.hpp"
#include "tsel/error.hpp"
#include "tsel/representations.hpp"
#include "tsel/selection.hpp"
#include "tsel/theoryval.hpp"
#include "tsel/tsel_io.hpp"

namespace tsel::cli {

namespace {

using Json = nlohmann::ordered_json;

CheckpointFeatureStore load_store(const std::string& path, bool manifest) {
  if (manifest) return io::read_manifest(path);
  return CheckpointFeatureStore(io::read_tsel(path));
}

const FeatureMatrix& single_checkpoint(const CheckpointFeatureStore& s, const char* what) {
  if (s.num_checkpoints() != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " is only defined for single-checkpoint inputs");
  }
  return s.checkpoint(0);
}

double parse_tau(const std::string& text) {
  if (text == "inf" || text == "infinity") return ot::kInfinity;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && v > 0.0) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kInvalidArgument, "--tau1 must be a positive number or 'inf'");
}

std::string selection_json(const SelectionResult& r) {
  Json j;
  j["method"] = method_tag(r.method);
  j["budget"] = r.budget;
  j["indices"] = r.indices;
  j["scores"] = r.scores;
  return j.dump() + "\n";
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    io::write_text(out_path, text);
  }
}

std::string top_indices(const std::vector<std::size_t>& indices, std::size_t count) {
  std::ostringstream ss;
  ss << '[';
  for (std::size_t k = 0; k < std::min(count, indices.size()); ++k) ss << (k ? "," : "") << indices[k];
  ss << ']';
  return ss.str();
}

theory::SyntheticPoolSpec pool_spec(const PoolOptions& o) {
  theory::SyntheticPoolSpec spec;
  spec.n = o.n;
  spec.d = o.d;
  spec.diameter = o.diameter;
  spec.distribution = theory::parse_distribution(o.distribution);
  spec.seed = o.seed;
  return spec;
}

std::vector<std::size_t> read_indices(const std::string& path) {
  Json doc;
  try {
    doc = Json::parse(io::read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, path + ": invalid selection JSON: " + e.what());
  }
  if (!doc.contains("indices") || !doc["indices"].is_array()) {
    throw Error(ErrorCode::kIo, path + ": missing \"indices\" array");
  }
  try {
    return doc["indices"].get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, path + ": \"indices\" must hold nonnegative integers");
  }
}

}  // namespace

int run_select(const SelectOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const Method method = parse_method(o.method);
  if (method == Method::kBruteForce) {
    throw Error(ErrorCode::kInvalidArgument, "brute-force is not a selection method of this command");
  }
  if (o.metric != "cosine" && o.metric != "l2") {
    throw Error(ErrorCode::kInvalidArgument, "--metric must be cosine or l2");
  }
  const bool l2 = o.metric == "l2";
  if (l2 && (method == Method::kRoundRobin || method == Method::kDoublyGreedy)) {
    throw Error(ErrorCode::kInvalidArgument, "rr and dg rank by similarity; use --metric cosine");
  }
  if (method == Method::kUot && !l2 && !o.half_normalize) {
    throw Error(ErrorCode::kInvalidArgument,
                "uot needs costs in [0, 1]; pass --half-normalize with the cosine metric");
  }

  const auto query = load_store(o.query, o.manifest);
  const auto pool = load_store(o.pool, o.manifest);
  if (o.budget > pool.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "--budget " + std::to_string(o.budget) +
                                                 " exceeds the pool size " + std::to_string(pool.rows()));
  }

  KnnParams knn;
  knn.k = o.k;
  knn.prefetch = o.prefetch;
  knn.k_kde = o.k_kde;
  knn.sigma = o.sigma;
  knn.c = o.c;
  knn.alpha = o.alpha;

  auto query_cost = [&]() {
    if (l2) return pairwise_l2(single_checkpoint(query, "--metric l2"), single_checkpoint(pool, "--metric l2"));
    return similarity_to_cost(weighted_checkpoint_similarity(query, pool), o.half_normalize);
  };

  SelectionResult result;
  std::string detail;
  switch (method) {
    case Method::kRoundRobin:
      result = select_round_robin(weighted_checkpoint_similarity(query, pool), o.budget);
      break;
    case Method::kDoublyGreedy:
      result = select_doubly_greedy(weighted_checkpoint_similarity(query, pool), o.budget);
      break;
    case Method::kKnnUniform: {
      const auto cost = query_cost();
      result = select_knn_uniform(cost, o.budget, knn);
      detail = " positive_mass=" + std::to_string(positive_mass_count(knn_uniform_mass(cost, knn, o.budget)));
      break;
    }
    case Method::kKnnKde: {
      const auto cost = query_cost();
      const CostMatrix cand =
          l2 ? pairwise_l2(single_checkpoint(pool, "--metric l2"), single_checkpoint(pool, "--metric l2"))
             : similarity_to_cost(weighted_checkpoint_similarity(pool, pool), o.half_normalize);
      result = select_knn_kde(cost, cand, o.budget, knn);
      detail = " positive_mass=" +
               std::to_string(positive_mass_count(knn_kde_mass(cost, cand, knn, o.budget)));
      break;
    }
    case Method::kUot: {
      CostMatrix cost = query_cost();
      if (l2 && cost.max_value() > 0.0) {
        Matrix scaled = cost.values();
        const double top = cost.max_value();
        for (double& v : scaled.data()) v /= top;
        cost = CostMatrix(std::move(scaled));
      }
      UotParams p;
      p.epsilon = o.epsilon;
      p.tau1 = parse_tau(o.tau1);
      p.tau2 = o.tau2;
      p.tol = o.tol;
      p.max_iter = o.max_iter;
      result = select_uot(cost, o.budget, p);
      break;
    }
    case Method::kBruteForce:
      break;
  }

  emit(o.out, selection_json(result));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << "select: method=" << method_tag(result.method) << " budget=" << result.budget
            << " time=" << secs << "s top5=" << top_indices(result.indices, 5) << detail << "\n";
  return 0;
}

int run_project(const ProjectOptions& o) {
  const FeatureMatrix in = io::read_tsel(o.in);
  ProjectionSpec spec{o.seed, in.dims(), o.out_dim};
  io::write_tsel(o.out, rademacher_project_rows(in, spec));
  std::cerr << "project: " << in.rows() << " rows, " << in.dims() << " -> " << o.out_dim << " dims\n";
  return 0;
}

int run_w1(const W1CommandOptions& o) {
  if (o.exact && o.epsilon) {
    throw Error(ErrorCode::kInvalidArgument, "--exact and --epsilon are mutually exclusive");
  }
  const FeatureMatrix x = io::read_tsel(o.x);
  const FeatureMatrix y = io::read_tsel(o.y);
  const auto wx = ot::DiscreteMeasure::uniform(x.rows());
  const auto wy = ot::DiscreteMeasure::uniform(y.rows());
  Json j;
  if (o.epsilon) {
    ot::SinkhornOptions s;
    s.epsilon = *o.epsilon;
    j["w1"] = ot::entropic_w1(x, y, wx, wy, s);
    j["method"] = "entropic";
  } else {
    j["w1"] = ot::exact_w1(x, y, wx, wy, o.cap);
    j["method"] = "exact";
  }
  std::cout << j.dump() << "\n";
  return 0;
}

int run_quantile(const QuantileOptions& o) {
  const auto query = load_store(o.query, o.manifest);
  const auto pool = load_store(o.pool, o.manifest);
  const auto q = stratify_quantiles(weighted_checkpoint_similarity(query, pool), o.n);
  std::string text;
  for (std::size_t b = 0; b < q.n_quantiles(); ++b) {
    Json line;
    line["quantile"] = b + 1;
    line["size"] = q.blocks[b].size();
    line["indices"] = take_front(q.blocks[b], o.take);
    text += line.dump() + "\n";
  }
  if (o.sub) {
    const auto sub = sub_stratify(q, o.sub_of, *o.sub);
    for (std::size_t b = 0; b < sub.n_quantiles(); ++b) {
      Json line;
      line["quantile"] = o.sub_of;
      line["sub_quantile"] = b + 1;
      line["size"] = sub.blocks[b].size();
      line["indices"] = take_front(sub.blocks[b], o.take);
      text += line.dump() + "\n";
    }
  }
  emit(o.out, text);
  return 0;
}

int run_compare(const CompareOptions& o) {
  const auto a = read_indices(o.a);
  const auto b = read_indices(o.b);
  Json j;
  j["jaccard"] = jaccard(a, b);
  j["size_a"] = a.size();
  j["size_b"] = b.size();
  std::cout << j.dump() << "\n";
  return 0;
}

int run_decay(const DecayOptions& o) {
  const auto spec = pool_spec(o.pool);
  const auto report = theory::empirical_w1_decay(spec, o.budgets, o.trials);
  Json j;
  j["d"] = spec.d;
  j["n"] = spec.n;
  j["diameter"] = spec.diameter;
  j["distribution"] = theory::distribution_tag(spec.distribution);
  j["budgets"] = report.budgets;
  j["mean_w1"] = report.mean_w1;
  j["stderr"] = report.stderr_w1;
  j["loglog_slope"] = report.loglog_slope ? Json(*report.loglog_slope) : Json(nullptr);
  j["reference_slope"] = -1.0 / static_cast<double>(spec.d);
  j["degenerate"] = report.degenerate;
  j["trials"] = report.trials;
  j["seed"] = report.seed;
  emit(o.out, j.dump() + "\n");
  return 0;
}

int run_mcdiarmid(const McDiarmidOptions& o) {
  const auto spec = pool_spec(o.pool);
  const auto report = theory::mcdiarmid_coverage(spec, o.budget, o.trials, o.delta);
  Json j;
  j["d"] = spec.d;
  j["n"] = spec.n;
  j["diameter"] = spec.diameter;
  j["distribution"] = theory::distribution_tag(spec.distribution);
  j["budget"] = report.budget;
  j["delta"] = report.delta;
  j["trials"] = report.trials;
  j["seed"] = spec.seed;
  j["mean_w1"] = report.mean_w1;
  j["slack"] = report.slack;
  j["coverage"] = report.coverage;
  emit(o.out, j.dump() + "\n");
  return 0;
}

}  // namespace tsel::cli
