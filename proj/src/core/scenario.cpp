#include "qlitho/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qlitho/errors.hpp"
#include "scenario_internal.hpp"

namespace qlitho {

namespace {

const std::vector<std::pair<ScenarioKind, std::string>>& kind_table() {
  static const std::vector<std::pair<ScenarioKind, std::string>> table = {
      {ScenarioKind::noon_compare, "noon_compare"},
      {ScenarioKind::gaussian_tradeoff, "gaussian_tradeoff"},
      {ScenarioKind::gaussian_pattern, "gaussian_pattern"},
      {ScenarioKind::dangelo_angular, "dangelo_angular"},
      {ScenarioKind::dangelo_alpha_scan, "dangelo_alpha_scan"},
      {ScenarioKind::bound_audit, "bound_audit"},
      {ScenarioKind::rotation_audit, "rotation_audit"},
      {ScenarioKind::absorber_convergence, "absorber_convergence"},
  };
  return table;
}

// ---------------------------------------------------------------------------
// YAML -> JSON

bool plain_number_chars(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= '0' && c <= '9') || c == '.' || c == 'e' || c == 'E' || c == '+' || c == '-';
  });
}

nlohmann::json plain_scalar(const std::string& s) {
  if (s == "true" || s == "True" || s == "TRUE") return true;
  if (s == "false" || s == "False" || s == "FALSE") return false;
  if (s == "null" || s == "Null" || s == "NULL" || s == "~") return nullptr;
  if (plain_number_chars(s)) {
    std::int64_t i = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, i);
    if (ec == std::errc() && ptr == last) return i;
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (end == s.c_str() + s.size()) return d;
  }
  return s;
}

nlohmann::json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar:
      // quoted scalars carry the non-specific tag "!" and stay strings
      if (node.Tag() == "!") return node.Scalar();
      return plain_scalar(node.Scalar());
    case YAML::NodeType::Sequence: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& item : node) arr.push_back(yaml_to_json(item));
      return arr;
    }
    case YAML::NodeType::Map: {
      nlohmann::json obj = nlohmann::json::object();
      for (const auto& kv : node) {
        if (!kv.first.IsScalar()) {
          const auto m = kv.first.Mark();
          throw ParseError("mapping keys must be plain scalars", m.line + 1, m.column + 1);
        }
        const std::string key = kv.first.Scalar();
        if (obj.contains(key)) {
          const auto m = kv.first.Mark();
          throw ParseError("duplicate key '" + key + "'", m.line + 1, m.column + 1);
        }
        obj[key] = yaml_to_json(kv.second);
      }
      return obj;
    }
  }
  return nullptr;
}

nlohmann::json parse_yaml_text(const std::string& text) {
  try {
    return yaml_to_json(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
}

nlohmann::json parse_json_text(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is the 1-based offset of the character where parsing stopped
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    int line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        line_start = i + 1;
      }
    }
    throw ParseError(e.what(), line, static_cast<int>(stop - line_start) + 1);
  }
}

[[noreturn]] void rethrow_with_context(const Error& e, const std::string& prefix) {
  const std::string msg = prefix + e.what();
  switch (e.kind()) {
    case ErrorKind::argument: throw ArgumentError(msg);
    case ErrorKind::domain: throw DomainError(msg);
    case ErrorKind::capability: throw CapabilityError(msg);
    case ErrorKind::construction: throw ConstructionError(msg);
    case ErrorKind::io: throw IoError(msg);
    case ErrorKind::resolution:
      throw ResolutionError(msg, dynamic_cast<const ResolutionError&>(e).required_density());
    case ErrorKind::convergence: {
      const auto& c = dynamic_cast<const ConvergenceError&>(e);
      throw ConvergenceError(msg, c.best_estimate(), c.error_estimate());
    }
    case ErrorKind::parse: {
      const auto& p = dynamic_cast<const ParseError&>(e);
      throw ParseError(msg, p.line(), p.column());
    }
    case ErrorKind::validation: throw dynamic_cast<const ValidationError&>(e);
  }
  throw ArgumentError(msg);
}

std::string format_value(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Reads units/wavelength/eta, shared by every kind.
OpticalContext read_context(const nlohmann::json& given, detail::ParamReader& r) {
  const std::string units = r.choice("units", "wavelength", {"wavelength", "si"});
  double wavelength = 1.0;
  double c = 1.0;
  if (units == "si") {
    r.require(given.contains("wavelength"), "parameters.wavelength is required when units is si");
    wavelength = r.number("wavelength", 1.0, detail::positive());
    c = kSpeedOfLightSI;
  } else {
    r.require(!given.contains("wavelength"),
              "parameters.wavelength is only accepted with units: si (lengths are in wavelengths)");
    if (given.contains("wavelength")) r.number("wavelength", 1.0);
  }
  const double eta = r.number("eta", 1.0, detail::positive());
  if (!(wavelength > 0.0) || !(eta > 0.0)) return OpticalContext::dimensionless();
  return OpticalContext::from_wavelength(wavelength, eta, c);
}

double length_unit_of(const nlohmann::json& given) {
  if (given.is_object() && given.contains("units") && given["units"] == "si" &&
      given.contains("wavelength") && given["wavelength"].is_number()) {
    const double w = given["wavelength"].get<double>();
    if (w > 0.0) return w;
  }
  return 1.0;
}

ReportBundle execute(const Scenario& scenario, const RunOptions& options, bool validate_only) {
  if (!(options.tolerance_scale > 0.0) || !std::isfinite(options.tolerance_scale))
    throw ArgumentError("tolerance scale must be positive and finite");
  const nlohmann::json& given = scenario.parameters;
  if (!given.is_object()) throw ValidationError({"parameters must be a mapping"});

  detail::ParamReader reader(given, "parameters.", length_unit_of(given));
  detail::RunEnv env;
  env.ctx = read_context(given, reader);
  env.tolerance_scale = options.tolerance_scale;
  env.workers = options.workers;
  env.seed_override = options.seed_override;
  env.validate_only = validate_only;

  ReportBundle bundle;
  bundle.kind = to_string(scenario.kind);
  bundle.source = scenario.source;
  try {
    switch (scenario.kind) {
      case ScenarioKind::noon_compare: detail::run_noon_compare(reader, env, bundle); break;
      case ScenarioKind::gaussian_tradeoff: detail::run_gaussian_tradeoff(reader, env, bundle); break;
      case ScenarioKind::gaussian_pattern: detail::run_gaussian_pattern(reader, env, bundle); break;
      case ScenarioKind::dangelo_angular: detail::run_dangelo_angular(reader, env, bundle); break;
      case ScenarioKind::dangelo_alpha_scan: detail::run_dangelo_alpha_scan(reader, env, bundle); break;
      case ScenarioKind::bound_audit: detail::run_bound_audit(reader, env, bundle); break;
      case ScenarioKind::rotation_audit: detail::run_rotation_audit(reader, env, bundle); break;
      case ScenarioKind::absorber_convergence:
        detail::run_absorber_convergence(reader, env, bundle);
        break;
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    rethrow_with_context(e, bundle.kind + " (" + scenario.source + "): ");
  }
  bundle.parameters = reader.effective();
  bundle.options["tolerance_scale"] = options.tolerance_scale;
  bundle.options["seed_override"] =
      options.seed_override ? nlohmann::json(*options.seed_override) : nlohmann::json(nullptr);
  return bundle;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  for (const auto& [k, name] : kind_table())
    if (k == kind) return name;
  return "noon_compare";
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kind_table())
    if (n == name) return k;
  throw ArgumentError("unknown scenario kind '" + name + "'");
}

const std::vector<ScenarioKind>& all_scenario_kinds() {
  static const std::vector<ScenarioKind> kinds = [] {
    std::vector<ScenarioKind> v;
    for (const auto& [k, name] : kind_table()) v.push_back(k);
    return v;
  }();
  return kinds;
}

Scenario parse_scenario(const std::string& text, bool json_encoding, const std::string& source) {
  const nlohmann::json doc = json_encoding ? parse_json_text(text) : parse_yaml_text(text);
  if (!doc.is_object()) throw ValidationError({"a scenario must be a mapping with a 'kind' key"});

  std::vector<std::string> violations;
  Scenario s;
  s.source = source;
  for (const auto& [key, value] : doc.items()) {
    if (key != "kind" && key != "parameters" && key != "output_dir" && key != "description")
      violations.push_back("unknown top-level key '" + key + "'");
  }
  if (!doc.contains("kind")) {
    violations.push_back("missing 'kind'");
  } else if (!doc["kind"].is_string()) {
    violations.push_back("'kind' must be a string");
  } else {
    try {
      s.kind = scenario_kind_from_string(doc["kind"].get<std::string>());
    } catch (const ArgumentError& e) {
      violations.push_back(e.what());
    }
  }
  if (doc.contains("parameters")) {
    if (doc["parameters"].is_object())
      s.parameters = doc["parameters"];
    else if (!doc["parameters"].is_null())
      violations.push_back("'parameters' must be a mapping");
  }
  if (doc.contains("output_dir")) {
    if (doc["output_dir"].is_string())
      s.output_dir = doc["output_dir"].get<std::string>();
    else
      violations.push_back("'output_dir' must be a string");
  }
  if (doc.contains("description") && !doc["description"].is_string())
    violations.push_back("'description' must be a string");
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const bool json = path.extension() == ".json";
  try {
    return parse_scenario(buf.str(), json, path.filename().string());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ":" + std::to_string(e.line()) + ":" +
                         std::to_string(e.column()) + ": " + e.what(),
                     e.line(), e.column());
  }
}

std::filesystem::path default_output_dir(const Scenario& scenario) {
  std::filesystem::path stem = std::filesystem::path(scenario.source).stem();
  if (scenario.source.empty() || scenario.source.front() == '<') stem = to_string(scenario.kind);
  return std::filesystem::path("qlitho_out") / stem;
}

nlohmann::json validate_scenario(const Scenario& scenario, const RunOptions& options) {
  return execute(scenario, options, true).parameters;
}

ReportBundle run_scenario(const Scenario& scenario, const RunOptions& options) {
  ReportBundle bundle = execute(scenario, options, false);
  if (options.write_files) {
    const auto dir = options.output_dir ? *options.output_dir
                     : scenario.output_dir ? *scenario.output_dir
                                           : default_output_dir(scenario);
    emit_report(bundle, dir, options.formats);
    bundle.output_dir = dir;
  }
  return bundle;
}

ReportBundle run_scenario_file(const std::filesystem::path& path, const RunOptions& options) {
  return run_scenario(load_scenario(path), options);
}

// ---------------------------------------------------------------------------
// ParamReader

namespace detail {

ParamReader::ParamReader(const nlohmann::json& given, std::string prefix, double length_unit)
    : given_(given.is_object() ? given : nlohmann::json::object()),
      prefix_(std::move(prefix)),
      length_unit_(length_unit) {}

std::string ParamReader::path(const std::string& key) const { return prefix_ + key; }

const nlohmann::json* ParamReader::lookup(const std::string& key) {
  used_.insert(key);
  if (!given_.contains(key) || given_[key].is_null()) return nullptr;
  return &given_[key];
}

bool ParamReader::has(const std::string& key) const {
  return given_.contains(key) && !given_[key].is_null();
}

double ParamReader::scale_of(Dim dim) const {
  switch (dim) {
    case Dim::none: return 1.0;
    case Dim::length: return length_unit_;
    case Dim::momentum: return 1.0 / length_unit_;
    case Dim::momentum2: return 1.0 / (length_unit_ * length_unit_);
  }
  return 1.0;
}

bool ParamReader::in_range(double v, const Range& r) const {
  if (!std::isfinite(v)) return false;
  if (r.lo_open ? !(v > r.lo) : !(v >= r.lo)) return false;
  if (r.hi_open ? !(v < r.hi) : !(v <= r.hi)) return false;
  return true;
}

std::string ParamReader::describe(const Range& r) const {
  const bool has_lo = std::isfinite(r.lo);
  const bool has_hi = std::isfinite(r.hi);
  if (has_lo && has_hi)
    return std::string("in ") + (r.lo_open ? "(" : "[") + format_value(r.lo) + ", " +
           format_value(r.hi) + (r.hi_open ? ")" : "]");
  if (has_lo) return std::string(r.lo_open ? "> " : ">= ") + format_value(r.lo);
  if (has_hi) return std::string(r.hi_open ? "< " : "<= ") + format_value(r.hi);
  return "finite";
}

double ParamReader::number(const std::string& key, double def, Range range, Dim dim) {
  const auto* v = lookup(key);
  double value = def * scale_of(dim);
  if (v) {
    if (!v->is_number()) {
      violations_.push_back(path(key) + " must be a number");
    } else if (!in_range(v->get<double>(), range)) {
      violations_.push_back(path(key) + " must be " + describe(range) + " (got " +
                            format_value(v->get<double>()) + ")");
    } else {
      value = v->get<double>();
    }
  }
  effective_[key] = value;
  return value;
}

std::optional<double> ParamReader::optional_number(const std::string& key, Range range, Dim dim) {
  if (!has(key)) {
    used_.insert(key);
    effective_[key] = nullptr;
    return std::nullopt;
  }
  return number(key, 0.0, range, dim);
}

std::size_t ParamReader::count(const std::string& key, std::size_t def, std::size_t lo,
                               std::size_t hi) {
  const auto* v = lookup(key);
  std::size_t value = def;
  if (v) {
    if (!v->is_number_integer()) {
      violations_.push_back(path(key) + " must be an integer");
    } else if (v->is_number_unsigned() || v->get<std::int64_t>() >= 0) {
      const auto n = v->get<std::uint64_t>();
      if (n < lo || n > hi)
        violations_.push_back(path(key) + " must be in [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "] (got " + std::to_string(n) + ")");
      else
        value = static_cast<std::size_t>(n);
    } else {
      violations_.push_back(path(key) + " must be a non-negative integer");
    }
  }
  effective_[key] = value;
  return value;
}

std::vector<double> ParamReader::numbers(const std::string& key, std::vector<double> def,
                                         Range range, Dim dim, std::size_t min_size) {
  const auto* v = lookup(key);
  for (auto& d : def) d *= scale_of(dim);
  std::vector<double> value = def;
  if (v) {
    bool ok = v->is_array() && v->size() >= min_size;
    std::vector<double> read;
    if (ok) {
      for (const auto& item : *v) {
        if (!item.is_number() || !in_range(item.get<double>(), range)) {
          ok = false;
          break;
        }
        read.push_back(item.get<double>());
      }
    }
    if (ok)
      value = std::move(read);
    else
      violations_.push_back(path(key) + " must be a list of at least " + std::to_string(min_size) +
                            " numbers, each " + describe(range));
  }
  effective_[key] = value;
  return value;
}

std::vector<std::size_t> ParamReader::counts(const std::string& key, std::vector<std::size_t> def,
                                             std::size_t lo, std::size_t hi, std::size_t min_size) {
  const auto* v = lookup(key);
  std::vector<std::size_t> value = def;
  if (v) {
    bool ok = v->is_array() && v->size() >= min_size;
    std::vector<std::size_t> read;
    if (ok) {
      for (const auto& item : *v) {
        if (!item.is_number_integer() || item.get<std::int64_t>() < static_cast<std::int64_t>(lo) ||
            item.get<std::int64_t>() > static_cast<std::int64_t>(hi)) {
          ok = false;
          break;
        }
        read.push_back(item.get<std::size_t>());
      }
    }
    if (ok)
      value = std::move(read);
    else
      violations_.push_back(path(key) + " must be a list of at least " + std::to_string(min_size) +
                            " integers in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  effective_[key] = value;
  return value;
}

std::string ParamReader::choice(const std::string& key, const std::string& def,
                                const std::vector<std::string>& allowed) {
  const auto* v = lookup(key);
  std::string value = def;
  if (v) {
    if (v->is_string() &&
        std::find(allowed.begin(), allowed.end(), v->get<std::string>()) != allowed.end()) {
      value = v->get<std::string>();
    } else {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      violations_.push_back(path(key) + " must be one of {" + list + "}");
    }
  }
  effective_[key] = value;
  return value;
}

std::vector<std::string> ParamReader::choices(const std::string& key, std::vector<std::string> def,
                                              const std::vector<std::string>& allowed) {
  const auto* v = lookup(key);
  std::vector<std::string> value = std::move(def);
  if (v) {
    bool ok = v->is_array() && !v->empty();
    std::vector<std::string> read;
    if (ok) {
      for (const auto& item : *v) {
        if (!item.is_string() ||
            std::find(allowed.begin(), allowed.end(), item.get<std::string>()) == allowed.end()) {
          ok = false;
          break;
        }
        read.push_back(item.get<std::string>());
      }
    }
    if (ok) {
      value = std::move(read);
    } else {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      violations_.push_back(path(key) + " must be a non-empty list drawn from {" + list + "}");
    }
  }
  effective_[key] = value;
  return value;
}

bool ParamReader::flag(const std::string& key, bool def) {
  const auto* v = lookup(key);
  bool value = def;
  if (v) {
    if (v->is_boolean())
      value = v->get<bool>();
    else
      violations_.push_back(path(key) + " must be true or false");
  }
  effective_[key] = value;
  return value;
}

std::uint64_t ParamReader::seed(const std::string& key, std::uint64_t def,
                                std::optional<std::uint64_t> override_value) {
  const auto* v = lookup(key);
  std::uint64_t value = def;
  if (v) {
    if (v->is_number_unsigned() || (v->is_number_integer() && v->get<std::int64_t>() >= 0))
      value = v->get<std::uint64_t>();
    else
      violations_.push_back(path(key) + " must be a non-negative integer");
  }
  if (override_value) value = *override_value;
  effective_[key] = value;
  return value;
}

std::vector<std::vector<double>> ParamReader::rows(const std::string& key,
                                                   std::vector<std::vector<double>> def,
                                                   std::size_t width) {
  const auto* v = lookup(key);
  auto value = std::move(def);
  if (v) {
    bool ok = v->is_array() && !v->empty();
    std::vector<std::vector<double>> read;
    if (ok) {
      for (const auto& row : *v) {
        if (!row.is_array() || row.size() != width) {
          ok = false;
          break;
        }
        std::vector<double> r;
        for (const auto& item : row) {
          if (!item.is_number()) ok = false;
          else r.push_back(item.get<double>());
        }
        if (!ok) break;
        read.push_back(std::move(r));
      }
    }
    if (ok)
      value = std::move(read);
    else
      violations_.push_back(path(key) + " must be a non-empty list of rows of " +
                            std::to_string(width) + " numbers");
  }
  effective_[key] = value;
  return value;
}

ParamReader ParamReader::child(const std::string& key) {
  const auto* v = lookup(key);
  if (v && !v->is_object()) {
    violations_.push_back(path(key) + " must be a mapping");
    v = nullptr;
  }
  return ParamReader(v ? *v : nlohmann::json::object(), path(key) + ".", length_unit_);
}

void ParamReader::adopt(const std::string& key, ParamReader&& child) {
  child.reject_unknown();
  effective_[key] = child.effective_;
  for (auto& v : child.violations_) violations_.push_back(std::move(v));
}

void ParamReader::require(bool ok, const std::string& violation) {
  if (!ok) violations_.push_back(violation);
}

void ParamReader::reject_unknown() {
  for (const auto& [key, value] : given_.items()) {
    if (!used_.count(key)) violations_.push_back("unknown parameter " + path(key));
  }
  used_.clear();
  for (const auto& [key, value] : given_.items()) used_.insert(key);
}

void finish_validation(ParamReader& r) {
  r.reject_unknown();
  if (!r.violations().empty()) throw ValidationError(r.violations());
}

void add_check(ReportBundle& bundle, const RunEnv& env, const std::string& name, double measured,
               double expected, double tolerance, CheckMode mode, std::string note) {
  bundle.checks.push_back(make_check(name, measured, expected, tolerance * env.tolerance_scale,
                                     mode, std::move(note)));
}

}  // namespace detail

}  // namespace qlitho
