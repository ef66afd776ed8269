#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vigfgan/chi.hpp"
#include "vigfgan/family.hpp"

namespace vig {

// Named numerical checks driven by the CLI; every suite yields one row.
struct CheckRow {
  std::string suite;
  double value;
  double reference;
  double gap;
  double tolerance;
  bool pass;
};

const std::vector<std::string>& verify_suite_names();
// DomainError for an unknown name.
CheckRow run_verify_suite(const std::string& name);
std::string verify_csv(const std::vector<CheckRow>& rows);

// Two-component Gaussian mixtures on [-6, 6] with sd in [0.1, 1.5].
std::vector<GridFn> random_mixtures(int count, std::uint64_t seed);

struct BoundsOptions {
  int densities = 20;
  std::uint64_t seed = 2024;
  std::vector<std::string> classes = {"gan", "mu_relu", "elu", "power_q", "half_gaussian", "elu_uniform"};
  std::vector<double> mu = {0.0, 0.5, 0.9};
  std::vector<double> gamma = {1.0, 2.0};
  std::vector<double> q = {2.0};
  std::vector<double> sigma = {1.0, 4.0, 9.0};
};
const std::vector<std::string>& bounds_class_names();

struct BoundsTable {
  std::string csv;
  int rows = 0;
  int violations = 0;
};
BoundsTable bounds_table(const BoundsOptions& opts);

struct FactorizeOptions {
  std::vector<int> dims = {1, 2, 3};
  std::vector<int> depths = {1, 2, 3};
  std::vector<std::string> activations = {"softplus", "elu", "mu_relu"};
  int nets = 2;
  int points = 5;
  std::uint64_t seed = 1;
  double tolerance = 1e-8;
};

struct FactorizeTable {
  std::string csv;
  int rows = 0;
  double max_gap = 0.0;
};
FactorizeTable factorize_table(const FactorizeOptions& opts);

// "identity", "gan", "softplus", "lsu", "power_q:2", "mu_relu:0.5", "elu:1:1"
Signature signature_by_spec(const std::string& spec);

struct GameOptions {
  std::vector<std::string> signatures = {"identity", "power_q:2", "power_q:0.5", "gan", "softplus"};
  std::vector<double> q = {0.5, 1.0};
  std::vector<double> z = {0.5, 1.0, 2.0, 4.0};
};

struct GameTable {
  std::string csv;
  int rows = 0;
  int skipped = 0;  // points where the utility is undefined
};
GameTable game_table(const GameOptions& opts);

}  // namespace vig
