#include "edmol/run_config.hpp"

#include <functional>
#include <map>

#include <json.hpp>

#include "edmol/error.hpp"
#include "edmol/io.hpp"

namespace edmol {

RunConfig RunConfig::for_preset(std::string_view name) {
  RunConfig c;
  c.preset = std::string(name);
  if (name == "toy") return c;
  if (name == "full") {
    c.model = ModelConfig::full();
    c.train.lr = 1e-5;
    c.train.warmup = 1000;
    return c;
  }
  throw ParameterError("unknown preset '" + std::string(name) + "' (expected toy or full)");
}

void RunConfig::validate() const {
  model.validate();
  train.validate();
  generation.validate();
  if (!(data.d_min > 0)) throw ParameterError("d_min must be positive");
  if (!(data.padding > 0)) throw ParameterError("padding must be positive");
  if (data.n_points < 1) throw ParameterError("n_points must be positive");
  if (data.discretization.coord_max + 1 > model.coord_vocab) throw ParameterError("coord_max exceeds coord_vocab");
}

namespace {

using Json = nlohmann::ordered_json;

struct Field {
  std::function<void(RunConfig&, const Json&)> set;
  std::function<Json(const RunConfig&)> get;
};

template <typename T>
Field field(T RunConfig::*group, auto member) {
  return {[=](RunConfig& c, const Json& j) { (c.*group).*member = j.get<std::remove_reference_t<decltype((c.*group).*member)>>(); },
          [=](const RunConfig& c) { return Json((c.*group).*member); }};
}

template <typename T>
Field gen_field(T member) {
  return {[=](RunConfig& c, const Json& j) { c.generation.*member = j.get<std::remove_reference_t<decltype(c.generation.*member)>>(); },
          [=](const RunConfig& c) { return Json(c.generation.*member); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = [] {
    std::vector<std::pair<std::string, Field>> t;
    t.emplace_back("n_layer", field(&RunConfig::model, &ModelConfig::n_layer));
    t.emplace_back("n_head", field(&RunConfig::model, &ModelConfig::n_head));
    t.emplace_back("n_embd", field(&RunConfig::model, &ModelConfig::n_embd));
    t.emplace_back("n_ctx", field(&RunConfig::model, &ModelConfig::n_ctx));
    t.emplace_back("token_vocab", field(&RunConfig::model, &ModelConfig::token_vocab));
    t.emplace_back("coord_vocab", field(&RunConfig::model, &ModelConfig::coord_vocab));
    t.emplace_back("l_vocab", field(&RunConfig::model, &ModelConfig::l_vocab));
    t.emplace_back("theta_vocab", field(&RunConfig::model, &ModelConfig::theta_vocab));
    t.emplace_back("phi_vocab", field(&RunConfig::model, &ModelConfig::phi_vocab));
    t.emplace_back("point_classes", field(&RunConfig::model, &ModelConfig::point_classes));
    t.emplace_back("dropout", field(&RunConfig::model, &ModelConfig::dropout));
    t.emplace_back("init_range", field(&RunConfig::model, &ModelConfig::init_range));

    t.emplace_back("steps", field(&RunConfig::train, &TrainConfig::steps));
    t.emplace_back("batch_size", field(&RunConfig::train, &TrainConfig::batch_size));
    t.emplace_back("lr", field(&RunConfig::train, &TrainConfig::lr));
    t.emplace_back("warmup", field(&RunConfig::train, &TrainConfig::warmup));
    t.emplace_back("min_lr_ratio", field(&RunConfig::train, &TrainConfig::min_lr_ratio));
    t.emplace_back("weight_decay", field(&RunConfig::train, &TrainConfig::weight_decay));
    t.emplace_back("beta1", field(&RunConfig::train, &TrainConfig::beta1));
    t.emplace_back("beta2", field(&RunConfig::train, &TrainConfig::beta2));
    t.emplace_back("eps", field(&RunConfig::train, &TrainConfig::eps));
    t.emplace_back("grad_clip", field(&RunConfig::train, &TrainConfig::grad_clip));
    t.emplace_back("eval_every", field(&RunConfig::train, &TrainConfig::eval_every));
    t.emplace_back("target_token_ce", field(&RunConfig::train, &TrainConfig::target_token_ce));

    t.emplace_back("temperature", gen_field(&GenerationConfig::temperature));
    t.emplace_back("max_tokens", gen_field(&GenerationConfig::max_tokens));
    t.emplace_back("n_samples", gen_field(&GenerationConfig::n_samples));
    t.emplace_back("max_retries", gen_field(&GenerationConfig::max_retries));

    auto tol = [](double ToleranceConfig::*m) {
      return Field{[=](RunConfig& c, const Json& j) { c.generation.tolerances.*m = j.get<double>(); },
                   [=](const RunConfig& c) { return Json(c.generation.tolerances.*m); }};
    };
    t.emplace_back("delta_l", tol(&ToleranceConfig::delta_l));
    t.emplace_back("delta_theta", tol(&ToleranceConfig::delta_theta));
    t.emplace_back("delta_phi", tol(&ToleranceConfig::delta_phi));

    // Discretization is shared by encoding and generation.
    auto disc = [](auto DiscretizationParams::*m) {
      return Field{[=](RunConfig& c, const Json& j) {
                     using T = std::remove_reference_t<decltype(c.data.discretization.*m)>;
                     c.data.discretization.*m = j.get<T>();
                     c.generation.discretization.*m = j.get<T>();
                   },
                   [=](const RunConfig& c) { return Json(c.data.discretization.*m); }};
    };
    t.emplace_back("sigma", disc(&DiscretizationParams::sigma));
    t.emplace_back("offset", disc(&DiscretizationParams::offset));
    t.emplace_back("coord_min", disc(&DiscretizationParams::coord_min));
    t.emplace_back("coord_max", disc(&DiscretizationParams::coord_max));
    t.emplace_back("angle_bin", disc(&DiscretizationParams::angle_bin));
    t.emplace_back("num_length_bins", disc(&DiscretizationParams::num_length_bins));
    t.emplace_back("num_angle_bins", disc(&DiscretizationParams::num_angle_bins));

    t.emplace_back("d_min", field(&RunConfig::data, &PrepareOptions::d_min));
    t.emplace_back("padding", field(&RunConfig::data, &PrepareOptions::padding));
    t.emplace_back("n_points", field(&RunConfig::data, &PrepareOptions::n_points));
    t.emplace_back("form_factor",
                   Field{[](RunConfig& c, const Json& j) {
                           const auto s = j.get<std::string>();
                           if (s == "constant_z") {
                             c.data.form_factor.mode = FormFactorMode::ConstantZ;
                           } else if (s == "gaussian") {
                             c.data.form_factor.mode = FormFactorMode::Gaussian;
                           } else {
                             throw ParameterError("form_factor must be constant_z or gaussian");
                           }
                         },
                         [](const RunConfig& c) {
                           return Json(c.data.form_factor.mode == FormFactorMode::ConstantZ ? "constant_z" : "gaussian");
                         }});
    t.emplace_back("form_factor_b", Field{[](RunConfig& c, const Json& j) { c.data.form_factor.b = j.get<double>(); },
                            [](const RunConfig& c) { return Json(c.data.form_factor.b); }});
    t.emplace_back("seed", Field{[](RunConfig& c, const Json& j) {
                                   c.seed = j.get<std::uint64_t>();
                                   c.train.seed = c.seed;
                                   c.generation.seed = c.seed;
                                   c.data.seed = c.seed;
                                 },
                                 [](const RunConfig& c) { return Json(c.seed); }});
    return t;
  }();
  return table;
}

}  // namespace

RunConfig run_config_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ParameterError("config: expected a JSON object");
  RunConfig c = RunConfig::for_preset(j.contains("preset") ? j["preset"].get<std::string>() : "toy");
  for (const auto& [key, value] : j.items()) {
    if (key == "preset") continue;
    const auto& table = fields();
    auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return f.first == key; });
    if (it == table.end()) throw ParameterError("config: unknown key '" + key + "'");
    try {
      it->second.set(c, value);
    } catch (const nlohmann::json::exception& e) {
      throw ParameterError("config: bad value for '" + key + "': " + e.what());
    }
  }
  c.validate();
  return c;
}

RunConfig read_run_config(const std::string& path) { return run_config_from_json(read_text_file(path)); }

std::string run_config_to_json(const RunConfig& config) {
  Json j;
  j["preset"] = config.preset;
  for (const auto& [key, f] : fields()) j[key] = f.get(config);
  return j.dump(2) + "\n";
}

}  // namespace edmol
