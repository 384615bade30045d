#include "gm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "gm/errors.hpp"
#include "gm/spectral.hpp"

namespace gm {

double f1_score(const std::vector<std::pair<int, int>>& pred,
                const std::vector<std::pair<int, int>>& gt) {
  if (pred.empty() && gt.empty()) {
    return 1.0;
  }
  if (pred.empty() || gt.empty()) {
    return 0.0;
  }
  const std::set<std::pair<int, int>> gt_set(gt.begin(), gt.end());
  std::size_t correct = 0;
  for (const auto& p : pred) {
    correct += gt_set.count(p);
  }
  const double precision = static_cast<double>(correct) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(correct) / static_cast<double>(gt.size());
  if (precision + recall == 0.0) {
    return 0.0;
  }
  return 2.0 * precision * recall / (precision + recall);
}

void EvalReport::finalize() {
  const std::size_t n = per_pair_f1.size();
  if (source_ids.size() != n || target_ids.size() != n || class_ids.size() != n) {
    throw ShapeError("eval report: column lengths differ");
  }
  mean_f1 = 0.0;
  std_f1 = 0.0;
  per_class.clear();
  if (n == 0) {
    return;
  }
  for (double f : per_pair_f1) {
    mean_f1 += f;
  }
  mean_f1 /= static_cast<double>(n);
  double var = 0.0;
  for (double f : per_pair_f1) {
    var += (f - mean_f1) * (f - mean_f1);
  }
  std_f1 = std::sqrt(var / static_cast<double>(n));

  std::map<int, std::pair<int, double>> by_class;  // class -> (count, sum)
  for (std::size_t i = 0; i < n; ++i) {
    auto& [count, sum] = by_class[class_ids[i]];
    count += 1;
    sum += per_pair_f1[i];
  }
  per_class.reserve(by_class.size());
  for (const auto& [cid, stat] : by_class) {
    per_class.push_back(
        {cid, stat.first, stat.second / static_cast<double>(stat.first)});
  }
}

namespace {

template <typename MatchFn>
EvalReport run_report(const std::vector<GraphPair>& pairs, EvalSetting setting,
                      const std::string& method, const MatchFn& match_one) {
  EvalReport report;
  report.setting = setting;
  report.method = method;
  report.source_ids.reserve(pairs.size());
  report.target_ids.reserve(pairs.size());
  report.class_ids.reserve(pairs.size());
  report.per_pair_f1.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    report.source_ids.push_back(pairs[k].source.graph_id);
    report.target_ids.push_back(pairs[k].target.graph_id);
    report.class_ids.push_back(pairs[k].source.class_id);
    report.per_pair_f1.push_back(match_one(pairs[k], k));
  }
  report.finalize();
  return report;
}

}  // namespace

EvalReport evaluate(const Model& model, const std::vector<GraphPair>& pairs,
                    EvalSetting setting) {
  return run_report(pairs, setting, "model",
                    [&](const GraphPair& pair, std::size_t) {
                      return predict(model, pair, setting).f1;
                    });
}

EvalReport evaluate_spectral(const std::vector<GraphPair>& pairs, EvalSetting setting) {
  return run_report(pairs, setting, "spectral",
                    [&](const GraphPair& pair, std::size_t) {
                      if (setting == EvalSetting::Intersection) {
                        return spectral_match(restrict_to_intersection(pair)).f1;
                      }
                      return spectral_match(pair).f1;
                    });
}

EvalReport evaluate_random(const std::vector<GraphPair>& pairs, EvalSetting setting,
                           std::uint64_t seed) {
  return run_report(
      pairs, setting, "random", [&](const GraphPair& pair, std::size_t k) {
        const GraphPair working = setting == EvalSetting::Intersection
                                      ? restrict_to_intersection(pair)
                                      : pair;
        Rng rng(Rng::derive(seed, {0x7a6d01ULL, k}));
        const int n_a = working.source.num_nodes();
        const int n_b = working.target.num_nodes();
        std::vector<std::pair<int, int>> guess;
        if (n_a <= n_b) {
          const std::vector<int> cols = rng.sample_without_replacement(n_b, n_a);
          for (int i = 0; i < n_a; ++i) guess.emplace_back(i, cols[i]);
        } else {
          const std::vector<int> rows = rng.sample_without_replacement(n_a, n_b);
          for (int j = 0; j < n_b; ++j) guess.emplace_back(rows[j], j);
        }
        std::sort(guess.begin(), guess.end());
        return f1_score(guess, working.gt_matching);
      });
}

std::string eval_report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "pair_index,source_id,target_id,class_id,f1\n";
  for (std::size_t i = 0; i < report.per_pair_f1.size(); ++i) {
    out << i << ',' << report.source_ids[i] << ',' << report.target_ids[i] << ','
        << report.class_ids[i] << ',' << format_double(report.per_pair_f1[i])
        << '\n';
  }
  return out.str();
}

Json eval_report_to_json(const EvalReport& report) {
  Json j;
  j["setting"] = eval_setting_name(report.setting);
  j["method"] = report.method;
  j["num_pairs"] = report.per_pair_f1.size();
  j["mean_f1"] = report.mean_f1;
  j["std_f1"] = report.std_f1;
  Json per_class = Json::array();
  for (const auto& cs : report.per_class) {
    per_class.push_back(Json{{"class_id", cs.class_id},
                             {"count", cs.count},
                             {"mean_f1", cs.mean_f1}});
  }
  j["per_class"] = std::move(per_class);
  j["per_pair_f1"] = report.per_pair_f1;
  return j;
}

}  // namespace gm
