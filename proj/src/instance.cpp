#include "swidel/instance.hpp"

#include <fstream>
#include <utility>

namespace swidel {

using nlohmann::json;

namespace {

double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) throw ParseError(field, "expected a number");
  return j.get<double>();
}

std::vector<int> int_array(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    if (!e.is_number_integer())
      throw ParseError(field + "[" + std::to_string(i) + "]", "expected an integer");
    out.push_back(e.get<int>());
  }
  return out;
}

Vec double_array(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field, "expected an array of numbers");
  Vec out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number_at(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

DelaySet delays_from(const json& j, const std::string& field) {
  try {
    return DelaySet(int_array(j, field));
  } catch (const std::invalid_argument& e) {
    throw ParseError(field, e.what());
  }
}

int signal_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("signal spec: bad " + what + " '" + text + "'");
  }
}

std::vector<int> signal_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    out.push_back(signal_int(tok, "delay"));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

Mat mat_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ParseError(field, "expected a non-empty nested array");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty())
    throw ParseError(field, "expected rows to be non-empty arrays");
  const std::size_t cols = j[0].size();
  Vec entries;
  entries.reserve(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row_field = field + "[" + std::to_string(i) + "]";
    if (!j[i].is_array()) throw ParseError(row_field, "expected an array");
    if (j[i].size() != cols) throw ParseError(row_field, "ragged row");
    for (std::size_t c = 0; c < cols; ++c)
      entries.push_back(number_at(j[i][c], row_field + "[" + std::to_string(c) + "]"));
  }
  try {
    return Mat(rows, cols, std::move(entries));
  } catch (const std::exception& e) {
    throw ParseError(field, e.what());
  }
}

nlohmann::json mat_to_json(const Mat& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Instance parse_instance(const json& j) {
  if (!j.is_object()) throw ParseError("<root>", "instance must be a JSON object");
  Instance inst;

  if (j.contains("matrices")) {
    // Explicit matrix set, the shape `build` emits.
    const json& mats = j.at("matrices");
    if (!mats.is_object() || mats.empty())
      throw ParseError("matrices", "expected an object mapping delays to matrices");
    std::vector<int> labels;
    std::vector<Mat> ms;
    for (auto it = mats.begin(); it != mats.end(); ++it) {
      labels.push_back(signal_int(it.key(), "delay key"));
      ms.push_back(mat_from_json(it.value(), "matrices." + it.key()));
    }
    std::vector<std::string> layout;
    if (j.contains("layout")) {
      for (const auto& l : j.at("layout")) {
        if (!l.is_string()) throw ParseError("layout", "expected an array of strings");
        layout.push_back(l.get<std::string>());
      }
    }
    try {
      inst.system = make_switching_system(std::move(labels), std::move(ms), std::move(layout));
    } catch (const std::exception& e) {
      throw ParseError("matrices", e.what());
    }
    inst.kind = ControllerKind::System;
    if (j.contains("x0")) inst.x0 = double_array(j.at("x0"), "x0");
    if (j.contains("signal")) inst.signal_spec = j.at("signal").get<std::string>();
    return inst;
  }

  const json& ctrl = j.contains("controller") ? j.at("controller") : json{{"type", "none"}};
  if (!ctrl.is_object() || !ctrl.contains("type") || !ctrl.at("type").is_string())
    throw ParseError("controller.type", "expected a string tag");
  const std::string type = ctrl.at("type").get<std::string>();

  auto parse_plant = [&]() {
    if (!j.contains("plant")) throw ParseError("plant", "missing");
    const json& p = j.at("plant");
    if (!p.is_object() || !p.contains("A") || !p.contains("B"))
      throw ParseError("plant", "expected an object with A and B");
    try {
      inst.plant.emplace(mat_from_json(p.at("A"), "plant.A"), mat_from_json(p.at("B"), "plant.B"));
    } catch (const ShapeError& e) {
      throw ParseError("plant", e.what());
    }
    if (!j.contains("delays")) throw ParseError("delays", "missing");
    inst.delays.emplace(delays_from(j.at("delays"), "delays"));
  };

  if (type == "none") {
    inst.kind = ControllerKind::None;
    parse_plant();
  } else if (type == "delay_dependent") {
    inst.kind = ControllerKind::DelayDependent;
    parse_plant();
    if (!ctrl.contains("gains") || !ctrl.at("gains").is_object())
      throw ParseError("controller.gains", "expected an object mapping delays to matrices");
    DepController dep;
    for (auto it = ctrl.at("gains").begin(); it != ctrl.at("gains").end(); ++it)
      dep.gains.emplace(signal_int(it.key(), "gain key"),
                        mat_from_json(it.value(), "controller.gains." + it.key()));
    for (int d : inst.delays->delays())
      if (!dep.gains.count(d))
        throw ParseError("controller.gains", "missing gain for delay " + std::to_string(d));
    inst.dep = std::move(dep);
  } else if (type == "delay_independent") {
    inst.kind = ControllerKind::DelayIndependent;
    parse_plant();
    if (!ctrl.contains("K")) throw ParseError("controller.K", "missing");
    inst.indep = IndepController{mat_from_json(ctrl.at("K"), "controller.K")};
  } else if (type == "example2") {
    inst.kind = ControllerKind::Example2;
    for (const char* key : {"a", "b", "k1", "k2"})
      if (!ctrl.contains(key))
        throw ParseError(std::string("controller.") + key, "missing");
    inst.a = number_at(ctrl.at("a"), "controller.a");
    inst.b = number_at(ctrl.at("b"), "controller.b");
    inst.k1 = number_at(ctrl.at("k1"), "controller.k1");
    inst.k2 = number_at(ctrl.at("k2"), "controller.k2");
  } else if (type == "gadget") {
    inst.kind = ControllerKind::Gadget;
    for (const char* key : {"A1", "A2"})
      if (!ctrl.contains(key))
        throw ParseError(std::string("controller.") + key, "missing");
    inst.A1 = mat_from_json(ctrl.at("A1"), "controller.A1");
    inst.A2 = mat_from_json(ctrl.at("A2"), "controller.A2");
    if (!inst.A1->is_square() || !inst.A2->is_square() || inst.A1->rows() != inst.A2->rows())
      throw ParseError("controller.A1", "A1 and A2 must be square of equal dimension");
  } else {
    throw ParseError("controller.type", "unknown controller type '" + type + "'");
  }

  // Shape-check the closed loop now so bad gains fail at parse time.
  if (inst.kind == ControllerKind::DelayDependent) {
    try {
      build_dep_closed_loop(*inst.plant, *inst.delays, *inst.dep);
    } catch (const ShapeError& e) {
      throw ParseError("controller.gains", e.what());
    }
  } else if (inst.kind == ControllerKind::DelayIndependent) {
    try {
      build_indep_closed_loop(*inst.plant, *inst.delays, *inst.indep);
    } catch (const ShapeError& e) {
      throw ParseError("controller.K", e.what());
    }
  }

  if (j.contains("x0")) inst.x0 = double_array(j.at("x0"), "x0");
  if (j.contains("signal")) {
    if (!j.at("signal").is_string()) throw ParseError("signal", "expected a string");
    inst.signal_spec = j.at("signal").get<std::string>();
  }
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open instance file");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path, std::string("invalid JSON: ") + e.what());
  }
  return parse_instance(j);
}

SwitchingSystem system_of(const Instance& inst) {
  switch (inst.kind) {
    case ControllerKind::None: {
      DepController zero;
      const std::size_t cols =
          inst.plant->n() + static_cast<std::size_t>(inst.delays->d_max()) * inst.plant->m();
      for (int d : inst.delays->delays()) zero.gains.emplace(d, Mat(inst.plant->m(), cols));
      return build_dep_closed_loop(*inst.plant, *inst.delays, zero);
    }
    case ControllerKind::DelayDependent:
      return build_dep_closed_loop(*inst.plant, *inst.delays, *inst.dep);
    case ControllerKind::DelayIndependent:
      return build_indep_closed_loop(*inst.plant, *inst.delays, *inst.indep);
    case ControllerKind::Example2:
      return build_example2(inst.a, inst.b, inst.k1, inst.k2);
    case ControllerKind::Gadget:
      return build_gadget_system(*inst.A1, *inst.A2);
    case ControllerKind::System:
      return *inst.system;
  }
  throw std::logic_error("system_of: unhandled instance kind");
}

Controller controller_of(const Instance& inst) {
  switch (inst.kind) {
    case ControllerKind::None:
      return std::monostate{};
    case ControllerKind::DelayDependent:
      return *inst.dep;
    case ControllerKind::DelayIndependent:
      return *inst.indep;
    default:
      throw std::invalid_argument("instance has no direct network semantics");
  }
}

SwitchingSignal parse_signal_spec(const std::string& spec, const DelaySet& delays, int length) {
  const std::size_t colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "greedy") return SwitchingSignal::greedy();
  if (head == "const") return SwitchingSignal::constant(signal_int(rest, "delay"), length, delays);
  if (head == "periodic") return SwitchingSignal::periodic(signal_int_list(rest), length, delays);
  if (head == "explicit") return SwitchingSignal::explicit_seq(signal_int_list(rest), delays);
  if (head == "random") {
    const std::string prefix = "seed=";
    if (rest.rfind(prefix, 0) != 0)
      throw std::invalid_argument("signal spec: random expects seed=<integer>");
    return SwitchingSignal::seeded_random(
        std::stoull(rest.substr(prefix.size())), length, delays);
  }
  throw std::invalid_argument("unknown signal spec '" + spec + "'");
}

nlohmann::json system_report(const SwitchingSystem& sys) {
  json mats = json::object();
  for (std::size_t i = 0; i < sys.size(); ++i)
    mats[std::to_string(sys.delays[i])] = mat_to_json(sys.matrices[i]);
  return json{{"dim", sys.dim}, {"layout", sys.layout}, {"delays", sys.delays},
              {"matrices", std::move(mats)}};
}

nlohmann::json bounds_report(const JsrBounds& b) {
  return json{{"lower", b.lower},
              {"upper", b.upper},
              {"witness", b.witness},
              {"explored", b.explored},
              {"converged", b.converged}};
}

const char* stability_name(Stability s) {
  switch (s) {
    case Stability::Stable:
      return "stable";
    case Stability::Unstable:
      return "unstable";
    default:
      return "undetermined";
  }
}

const char* kind_name(GrowthVerdict::Kind k) {
  switch (k) {
    case GrowthVerdict::Kind::UpperCertified:
      return "upper_certified";
    case GrowthVerdict::Kind::LowerCertified:
      return "lower_certified";
    default:
      return "bracket";
  }
}

nlohmann::json verdict_report(const GrowthVerdict& v) {
  json out = bounds_report(v.bounds);
  out["kind"] = kind_name(v.kind);
  out["upper_certified"] = v.upper_certified;
  out["lower_certified"] = v.lower_certified;
  out["rate"] = v.rate;
  out["verdict"] = stability_name(v.stability);
  if (v.stability == Stability::Undetermined) out["undetermined_eps"] = v.undetermined_eps;
  return out;
}

int verdict_exit_code(const GrowthVerdict& v, bool use_stability) {
  if (use_stability) {
    switch (v.stability) {
      case Stability::Stable:
        return 0;
      case Stability::Unstable:
        return 3;
      default:
        return 4;
    }
  }
  switch (v.kind) {
    case GrowthVerdict::Kind::UpperCertified:
      return 0;
    case GrowthVerdict::Kind::LowerCertified:
      return 3;
    default:
      return 4;
  }
}

}  // namespace swidel
