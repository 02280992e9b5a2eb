// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tsel::cli {

struct SelectOptions {
  std::string method;
  std::string query;
  std::string pool;
  bool manifest = false;
  std::size_t budget = 0;
  std::string metric = "cosine";
  bool half_normalize = false;
  std::optional<std::size_t> k;
  std::size_t prefetch = 5000;
  std::size_t k_kde = 1000;
  double sigma = 0.75;
  double c = 5.0;
  double alpha = 0.01;
  double epsilon = 0.01;
  std::string tau1 = "inf";
  double tau2 = 1e-4;
  double tol = 1e-9;
  std::size_t max_iter = 10000;
  std::string out;
};

struct ProjectOptions {
  std::string in;
  std::uint64_t seed = 0;
  std::size_t out_dim = 8192;
  std::string out;
};

struct W1CommandOptions {
  std::string x;
  std::string y;
  bool exact = false;
  std::optional<double> epsilon;
  std::size_t cap = 512;
};

struct QuantileOptions {
  std::string query;
  std::string pool;
  bool manifest = false;
  std::size_t n = 10;
  std::optional<std::size_t> sub;
  std::size_t sub_of = 1;
  std::size_t take = 500;
  std::string out;
};

struct CompareOptions {
  std::string a;
  std::string b;
};

struct PoolOptions {
  std::size_t d = 3;
  std::size_t n = 512;
  double diameter = 1.0;
  std::string distribution = "uniform-cube";
  std::uint64_t seed = 7;
};

struct DecayOptions {
  PoolOptions pool;
  std::vector<std::size_t> budgets{16, 32, 64, 128, 256};
  std::size_t trials = 50;
  std::string out;
};

struct McDiarmidOptions {
  PoolOptions pool;
  std::size_t budget = 64;
  std::size_t trials = 500;
  double delta = 0.1;
  std::string out;
};

int run_select(const SelectOptions& o);
int run_project(const ProjectOptions& o);
int run_w1(const W1CommandOptions& o);
int run_quantile(const QuantileOptions& o);
int run_compare(const CompareOptions& o);
int run_decay(const DecayOptions& o);
int run_mcdiarmid(const McDiarmidOptions& o);

}  // namespace tsel::cli
