#include "gm/model.hpp"

#include <cmath>
#include <utility>

#include "gm/errors.hpp"
#include "gm/evaluation.hpp"
#include "gm/rng.hpp"

namespace gm {

void Model::check_shapes() const {
  enc.check_shapes();
  if (w_aff.rows() != dims.hidden || w_aff.cols() != dims.hidden) {
    throw ShapeError("model: w_aff must be hidden x hidden");
  }
}

void Model::for_each_param(
    const std::function<void(const std::string&, Eigen::MatrixXd&)>& fn) {
  enc.for_each(fn);
  fn("w_aff", w_aff);
}

void Model::for_each_param(
    const std::function<void(const std::string&, const Eigen::MatrixXd&)>& fn) const {
  enc.for_each(fn);
  fn("w_aff", w_aff);
}

Model make_model(std::uint64_t seed, const EncoderDims& dims,
                 const SinkhornConfig& sinkhorn, const LossConfig& loss) {
  dims.validate();
  sinkhorn.validate();
  loss.validate();
  Model m;
  m.dims = dims;
  m.enc = init_encoder_params(seed, dims);
  m.sinkhorn = sinkhorn;
  m.loss = loss;
  m.init_seed = seed;

  Rng rng(Rng::derive(seed, {0xaff11eULL}));
  const int h = dims.hidden;
  const double limit = std::sqrt(6.0 / static_cast<double>(h + h));
  m.w_aff.resize(h, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < h; ++c) {
      m.w_aff(r, c) = rng.uniform(-limit, limit);
    }
  }
  m.check_shapes();
  return m;
}

Eigen::MatrixXd model_affinity(const Model& model, const Graph& a, const Graph& b) {
  const Eigen::MatrixXd h_a = encode(a, model.enc).first;
  const Eigen::MatrixXd h_b = encode(b, model.enc).first;
  return h_a * model.w_aff * h_b.transpose();
}

MatchResult predict(const Model& model, const GraphPair& pair, EvalSetting setting) {
  const GraphPair working =
      setting == EvalSetting::Intersection ? restrict_to_intersection(pair) : pair;

  MatchResult result;
  result.soft =
      sinkhorn_matrix(model_affinity(model, working.source, working.target),
                      model.sinkhorn);
  result.assignment = hungarian(result.soft);
  result.score = assignment_score(result.soft, result.assignment);
  result.f1 = f1_score(result.assignment, working.gt_matching);
  return result;
}

Json checkpoint_to_json(const Model& model, const Pool* pool) {
  model.check_shapes();
  Json j;
  j["format"] = "graphmatch.checkpoint";
  j["version"] = 1;
  j["init_seed"] = model.init_seed;
  j["dims"] = Json{{"in_dim", model.dims.in_dim},
                   {"hidden", model.dims.hidden},
                   {"proj", model.dims.proj}};
  j["sinkhorn"] = sinkhorn_config_to_json(model.sinkhorn);
  j["loss"] = loss_config_to_json(model.loss);
  Json params = Json::object();
  model.for_each_param([&params](const std::string& name, const Eigen::MatrixXd& p) {
    params[name] = matrix_to_json(p);
  });
  j["params"] = std::move(params);
  j["pool"] = pool != nullptr ? pool->to_json() : Json(nullptr);
  return j;
}

Checkpoint checkpoint_from_json(const Json& j) {
  const std::string format =
      require_key(j, "format", "checkpoint").get<std::string>();
  if (format != "graphmatch.checkpoint") {
    throw DataError("checkpoint: unexpected format marker '" + format + "'");
  }
  if (require_key(j, "version", "checkpoint").get<int>() != 1) {
    throw DataError("checkpoint: unsupported version");
  }

  Checkpoint ck;
  ck.model.init_seed = require_key(j, "init_seed", "checkpoint").get<std::uint64_t>();
  const Json& dims = require_key(j, "dims", "checkpoint");
  ck.model.dims.in_dim = require_key(dims, "in_dim", "checkpoint dims").get<int>();
  ck.model.dims.hidden = require_key(dims, "hidden", "checkpoint dims").get<int>();
  ck.model.dims.proj = require_key(dims, "proj", "checkpoint dims").get<int>();
  ck.model.dims.validate();
  ck.model.sinkhorn =
      sinkhorn_config_from_json(require_key(j, "sinkhorn", "checkpoint"));
  ck.model.loss = loss_config_from_json(require_key(j, "loss", "checkpoint"));

  ck.model.enc.dims = ck.model.dims;
  const Json& params = require_key(j, "params", "checkpoint");
  ck.model.for_each_param([&params](const std::string& name, Eigen::MatrixXd& p) {
    p = matrix_from_json(require_key(params, name, "checkpoint params"),
                         "checkpoint parameter " + name);
  });
  ck.model.check_shapes();

  const Json& pool = require_key(j, "pool", "checkpoint");
  if (!pool.is_null()) {
    ck.pool = Pool::from_json(pool);
  }
  return ck;
}

void save_checkpoint(const std::string& path, const Model& model, const Pool* pool) {
  write_json_file(path, checkpoint_to_json(model, pool));
}

Checkpoint load_checkpoint(const std::string& path) {
  return checkpoint_from_json(read_json_file(path));
}

}  // namespace gm
