#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gm/graph.hpp"
#include "gm/json_util.hpp"
#include "gm/matcher.hpp"
#include "gm/model.hpp"
#include "gm/rng.hpp"

namespace gm {

// Set-overlap F1 between predicted and ground-truth correspondence pairs.
// Conventions: 1.0 when both sets are empty, 0.0 when precision + recall
// is zero.
double f1_score(const std::vector<std::pair<int, int>>& pred,
                const std::vector<std::pair<int, int>>& gt);

// Dataset-level evaluation summary. `std_f1` is the population standard
// deviation of the per-pair values.
struct EvalReport {
  EvalSetting setting = EvalSetting::Intersection;
  std::string method = "model";  // "model", "spectral", or "random"
  std::vector<std::string> source_ids;
  std::vector<std::string> target_ids;
  std::vector<int> class_ids;
  std::vector<double> per_pair_f1;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;

  struct ClassStat {
    int class_id = -1;
    int count = 0;
    double mean_f1 = 0.0;
  };
  std::vector<ClassStat> per_class;  // sorted by class_id

  // Recomputes mean, std, and the per-class breakdown from the pair lists.
  void finalize();
};

// Runs predict() on every pair with the frozen model.
EvalReport evaluate(const Model& model, const std::vector<GraphPair>& pairs,
                    EvalSetting setting);

// Learning-free spectral baseline over the same pairs.
EvalReport evaluate_spectral(const std::vector<GraphPair>& pairs, EvalSetting setting);

// Uniform random-assignment floor (one draw per pair from `seed`).
EvalReport evaluate_random(const std::vector<GraphPair>& pairs, EvalSetting setting,
                           std::uint64_t seed);

// Per-pair data table: pair_index,source_id,target_id,class_id,f1
std::string eval_report_csv(const EvalReport& report);

// Full structured summary including per-class means.
Json eval_report_to_json(const EvalReport& report);

}  // namespace gm
