#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "swidel/jsr.hpp"
#include "swidel/model.hpp"
#include "swidel/netsim.hpp"

namespace swidel {

/// Parse failure; `field` names the offending JSON path.
struct ParseError : std::runtime_error {
  std::string field;
  ParseError(std::string field_, const std::string& msg)
      : std::runtime_error(field_ + ": " + msg), field(std::move(field_)) {}
};

enum class ControllerKind { None, DelayDependent, DelayIndependent, Example2, Gadget, System };

/// A problem instance as read from disk: a plant with delays and a
/// controller, the example2 fixture, the hardness gadget, or an explicit
/// matrix set (as emitted by `build`).
struct Instance {
  ControllerKind kind = ControllerKind::None;
  std::optional<Plant> plant;
  std::optional<DelaySet> delays;
  std::optional<DepController> dep;
  std::optional<IndepController> indep;
  double a = 0, b = 0, k1 = 0, k2 = 0;  // example2 parameters
  std::optional<Mat> A1, A2;            // gadget matrices
  std::optional<SwitchingSystem> system;
  Vec x0;                   // optional initial state (plant or extended)
  std::string signal_spec;  // optional default signal

  bool has_network_semantics() const {
    return kind == ControllerKind::None || kind == ControllerKind::DelayDependent ||
           kind == ControllerKind::DelayIndependent;
  }
};

Instance parse_instance(const nlohmann::json& j);
Instance load_instance(const std::string& path);

/// The switching system an instance denotes (closed-loop reduction,
/// fixture, gadget embedding, or the explicit matrix set).
SwitchingSystem system_of(const Instance& inst);

/// Controller for direct network simulation (valid when
/// has_network_semantics()).
Controller controller_of(const Instance& inst);

/// Signal spec strings: const:d | periodic:d1,d2,... | random:seed=S |
/// greedy | explicit:d1,d2,...
SwitchingSignal parse_signal_spec(const std::string& spec, const DelaySet& delays, int length);

nlohmann::json mat_to_json(const Mat& m);
Mat mat_from_json(const nlohmann::json& j, const std::string& field);

nlohmann::json system_report(const SwitchingSystem& sys);
nlohmann::json bounds_report(const JsrBounds& b);
nlohmann::json verdict_report(const GrowthVerdict& v);

const char* stability_name(Stability s);
const char* kind_name(GrowthVerdict::Kind k);

/// Exit code mapping shared by jsr/decide/design: 0 for
/// Stable/UpperCertified, 3 for Unstable/LowerCertified, 4 otherwise.
int verdict_exit_code(const GrowthVerdict& v, bool use_stability);

}  // namespace swidel
