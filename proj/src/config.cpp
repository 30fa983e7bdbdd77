#include "aero_ftc/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace aero_ftc {
namespace {

using json = nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

/// A JSON object whose keys are consumed one by one; anything left over at
/// finish() is an unknown key.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected a JSON object");
  }

  const std::string& path() const { return path_; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::optional<double> number(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw ConfigError(join(path_, key), join(path_, key) + ": expected a number");
    return v->get<double>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) throw ConfigError(join(path_, key), join(path_, key) + ": expected true or false");
    return v->get<bool>();
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ConfigError(join(path_, key), join(path_, key) + ": expected a string");
    return v->get<std::string>();
  }

  std::optional<std::uint64_t> unsigned_int(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number_unsigned()) {
      throw ConfigError(join(path_, key), join(path_, key) + ": expected a non-negative integer");
    }
    return v->get<std::uint64_t>();
  }

  /// Fixed-length numeric array; a bare number is broadcast when allowed.
  std::optional<Eigen::VectorXd> vector(const std::string& key, Eigen::Index n, bool allow_scalar) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    const std::string where = join(path_, key);
    if (allow_scalar && v->is_number()) return Eigen::VectorXd::Constant(n, v->get<double>());
    if (!v->is_array() || static_cast<Eigen::Index>(v->size()) != n) {
      throw ConfigError(where, where + ": expected an array of " + std::to_string(n) + " numbers" +
                                   (allow_scalar ? " or a single number" : ""));
    }
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const json& e = (*v)[static_cast<std::size_t>(i)];
      if (!e.is_number()) throw ConfigError(where, where + ": element " + std::to_string(i) + " is not a number");
      out(i) = e.get<double>();
    }
    return out;
  }

  std::optional<Eigen::MatrixXd> matrix(const std::string& key, Eigen::Index rows, Eigen::Index cols) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    const std::string where = join(path_, key);
    const std::string shape = std::to_string(rows) + "x" + std::to_string(cols);
    if (!v->is_array() || static_cast<Eigen::Index>(v->size()) != rows) {
      throw ConfigError(where, where + ": expected a " + shape + " matrix (array of rows)");
    }
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const json& row = (*v)[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
        throw ConfigError(where, where + ": expected a " + shape + " matrix (array of rows)");
      }
      for (Eigen::Index c = 0; c < cols; ++c) {
        const json& e = row[static_cast<std::size_t>(c)];
        if (!e.is_number()) throw ConfigError(where, where + ": non-numeric entry");
        out(i, c) = e.get<double>();
      }
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) {
        throw ConfigError(join(path_, it.key()), join(path_, it.key()) + ": unknown key");
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
  }
}

void parse_model(Section s, ScenarioConfig& cfg) {
  if (const json* p = s.find("params")) {
    Section ps(*p, join(s.path(), "params"));
    PhysicalParams params;
    auto set = [&](const char* key, double& field) {
      if (auto v = ps.number(key)) field = *v;
    };
    set("D_t", params.D_t);
    set("K_pp", params.K_pp);
    set("K_py", params.K_py);
    set("K_yy", params.K_yy);
    set("K_yp", params.K_yp);
    set("K_sp", params.K_sp);
    set("D_p", params.D_p);
    set("D_y", params.D_y);
    set("J_p", params.J_p);
    set("J_y", params.J_y);
    ps.finish();
    try {
      const ContinuousModel m = build_continuous_model(params);
      cfg.model.A = m.A;
      cfg.model.B = m.B;
    } catch (const InvalidParameter& e) {
      throw ConfigError(join(s.path(), "params"), e.what());
    }
  }
  if (auto A = s.matrix("A", kStates, kStates)) cfg.model.A = *A;
  if (auto B = s.matrix("B", kStates, kInputs)) cfg.model.B = *B;
  if (auto v = s.number("u_min")) cfg.model.u_min = *v;
  if (auto v = s.number("u_max")) cfg.model.u_max = *v;
  s.finish();
}

void parse_lqr(Section s, ScenarioConfig& cfg) {
  if (auto Q = s.matrix("Q", kStates, kStates)) cfg.weights.Q = *Q;
  if (auto q = s.vector("Q_diag", kStates, false)) cfg.weights.Q = q->asDiagonal();
  if (auto R = s.matrix("R", kInputs, kInputs)) cfg.weights.R = *R;
  if (auto r = s.vector("R_diag", kInputs, false)) cfg.weights.R = r->asDiagonal();
  if (auto v = s.number("tol")) cfg.care.tol = *v;
  if (auto v = s.unsigned_int("max_iter")) cfg.care.max_iter = static_cast<int>(*v);
  s.finish();
}

void parse_estimator(Section s, ScenarioConfig& cfg) {
  if (auto v = s.boolean("enabled")) cfg.estimator_enabled = *v;
  if (auto v = s.boolean("use_estimate")) cfg.control_from_estimate = *v;
  if (auto q = s.vector("Q_state", kStates, true)) {
    cfg.noise.Q_a.topLeftCorner<kStates, kStates>() = q->asDiagonal();
  }
  if (auto q = s.vector("Q_fault", kInputs, true)) {
    cfg.noise.Q_a.bottomRightCorner<kInputs, kInputs>() = q->asDiagonal();
  }
  if (auto r = s.vector("R", kStates, true)) cfg.noise.R_a = r->asDiagonal();
  if (auto v = s.number("P0_state")) cfg.prior.state_variance = *v;
  if (auto v = s.number("P0_fault")) cfg.prior.fault_variance = *v;
  if (auto v = s.vector("state_offset_deg", kStates, false)) {
    for (int i = 0; i < kStates; ++i) cfg.estimator_state_offset(i) = deg_to_rad((*v)(i));
  }
  if (auto v = s.vector("fault_guess", kInputs, false)) cfg.estimator_fault_guess = *v;
  s.finish();
}

void parse_accommodation(Section s, ScenarioConfig& cfg) {
  if (auto v = s.boolean("enabled")) cfg.accommodation.enabled = *v;
  if (auto v = s.number("gamma_max")) cfg.accommodation.gamma_max = *v;
  if (auto v = s.number("activation_threshold")) cfg.accommodation.activation_threshold = *v;
  s.finish();
}

void parse_axis(Section s, AxisReference& axis) {
  if (auto v = s.number("amplitude_deg")) axis.amplitude_deg = *v;
  if (auto v = s.number("period")) axis.period = *v;
  if (auto v = s.number("phase")) axis.phase = *v;
  s.finish();
}

void parse_reference(Section s, ScenarioConfig& cfg) {
  if (const json* p = s.find("pitch")) parse_axis(Section(*p, join(s.path(), "pitch")), cfg.pitch);
  if (const json* y = s.find("yaw")) parse_axis(Section(*y, join(s.path(), "yaw")), cfg.yaw);
  if (auto v = s.number("pitch_limit_deg")) cfg.pitch_limit_deg = *v;
  s.finish();
}

void parse_faults(const json& j, ScenarioConfig& cfg) {
  if (!j.is_array()) throw ConfigError("faults", "faults: expected an array of fault events");
  cfg.faults.clear();
  for (std::size_t i = 0; i < j.size(); ++i) {
    Section s(j[i], "faults[" + std::to_string(i) + "]");
    FaultEvent ev;
    if (auto t = s.number("time")) ev.time = *t;
    auto gamma = s.vector("gamma", kInputs, false);
    auto preset = s.string("preset");
    auto rotors = s.find("rotors");
    if (gamma.has_value() == preset.has_value()) {
      throw ConfigError(s.path(), s.path() + ": give exactly one of 'gamma' or 'preset'");
    }
    try {
      if (gamma) {
        ev.gamma = FaultVector(InputVector(*gamma));
      } else {
        const double g = blade_break_gamma(parse_blade_break(*preset));
        InputVector v = InputVector::Constant(g);
        if (rotors) {
          if (!rotors->is_array()) throw ConfigError(join(s.path(), "rotors"), s.path() + ".rotors: expected [0], [1] or [0, 1]");
          v.setZero();
          for (const json& r : *rotors) {
            if (!r.is_number_unsigned() || r.get<unsigned>() > 1) {
              throw ConfigError(join(s.path(), "rotors"), s.path() + ".rotors: rotor index must be 0 or 1");
            }
            v(r.get<int>()) = g;
          }
        }
        ev.gamma = FaultVector(v);
      }
    } catch (const DomainError& e) {
      throw ConfigError(join(s.path(), "gamma"), e.what());
    } catch (const InvalidParameter& e) {
      throw ConfigError(join(s.path(), "preset"), e.what());
    }
    s.finish();
    cfg.faults.push_back(ev);
  }
}

void parse_sim(Section s, ScenarioConfig& cfg) {
  if (auto v = s.number("duration")) cfg.duration = *v;
  if (auto v = s.number("T_s")) cfg.T_s = *v;
  if (auto v = s.unsigned_int("seed")) cfg.seed = *v;
  if (auto v = s.vector("measurement_noise_std", kStates, true)) cfg.measurement_noise_std = *v;
  if (auto v = s.vector("process_noise_std", kStates, true)) cfg.process_noise_std = *v;
  if (auto v = s.vector("x0_deg", kStates, false)) {
    for (int i = 0; i < kStates; ++i) cfg.x0(i) = deg_to_rad((*v)(i));
  }
  if (auto v = s.number("divergence_limit")) cfg.divergence_limit = *v;
  s.finish();
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view json_text, std::string_view default_name) {
  const json doc = parse_json(json_text);
  Section root(doc, "");

  ScenarioConfig cfg;
  if (auto preset = root.string("preset")) {
    try {
      cfg = preset_scenario(*preset);
    } catch (const InvalidParameter& e) {
      throw ConfigError("preset", e.what());
    }
  }
  cfg.name = std::string(default_name);
  if (auto name = root.string("name")) cfg.name = *name;

  if (const json* j = root.find("model")) parse_model(Section(*j, "model"), cfg);
  if (const json* j = root.find("lqr")) parse_lqr(Section(*j, "lqr"), cfg);
  if (const json* j = root.find("estimator")) parse_estimator(Section(*j, "estimator"), cfg);
  if (const json* j = root.find("accommodation")) parse_accommodation(Section(*j, "accommodation"), cfg);
  if (const json* j = root.find("reference")) parse_reference(Section(*j, "reference"), cfg);
  if (const json* j = root.find("faults")) parse_faults(*j, cfg);
  if (const json* j = root.find("sim")) parse_sim(Section(*j, "sim"), cfg);
  root.finish();

  try {
    cfg.validate();
  } catch (const InvalidParameter& e) {
    // Validation messages start with the dotted key they refer to.
    const std::string msg = e.what();
    const auto space = msg.find(' ');
    const std::string key = msg.substr(0, space);
    throw ConfigError(key.find('.') != std::string::npos ? key : "<scenario>", msg);
  }
  return cfg;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioConfig load_scenario_file(const std::string& path) {
  return parse_scenario(read_text_file(path), std::filesystem::path(path).stem().string());
}

bool is_manifest_document(std::string_view json_text) {
  const json doc = parse_json(json_text);
  return doc.is_object() && doc.contains("scenarios");
}

RunManifest parse_manifest(std::string_view json_text, const std::string& base_dir) {
  const json doc = parse_json(json_text);
  Section root(doc, "");
  RunManifest m;
  if (auto v = root.string("output_dir")) m.output_dir = *v;
  if (auto v = root.unsigned_int("seed")) m.seed = *v;
  const json* list = root.find("scenarios");
  if (!list || !list->is_array()) throw ConfigError("scenarios", "scenarios: expected an array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < list->size(); ++i) {
    Section s((*list)[i], "scenarios[" + std::to_string(i) + "]");
    auto name = s.string("name");
    auto path = s.string("config");
    if (!name || name->empty()) throw ConfigError(join(s.path(), "name"), s.path() + ".name: required");
    if (!path) throw ConfigError(join(s.path(), "config"), s.path() + ".config: required");
    if (!names.insert(*name).second) {
      throw ConfigError(join(s.path(), "name"), "duplicate scenario name '" + *name + "'");
    }
    std::filesystem::path p(*path);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    m.scenarios.push_back({*name, p.string()});
    s.finish();
  }
  root.finish();
  return m;
}

}  // namespace aero_ftc
