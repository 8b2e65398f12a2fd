#pragma once

// Parameter reading and the per-kind runners shared by scenario.cpp and
// runners.cpp. Not installed.

#include <cstdint>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qlitho/optical_context.hpp"
#include "qlitho/report.hpp"
#include "qlitho/scenario.hpp"

namespace qlitho::detail {

/// Physical dimension of a parameter. In SI mode defaults are rescaled by the
/// wavelength so that every default describes the same physical setup.
enum class Dim { none, length, momentum, momentum2 };

struct Range {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool hi_open = false;
};

inline Range positive() { return {0.0, std::numeric_limits<double>::infinity(), true, false}; }
inline Range non_negative() { return {0.0, std::numeric_limits<double>::infinity(), false, false}; }
inline Range open_range(double lo, double hi) { return {lo, hi, true, true}; }
inline Range closed_range(double lo, double hi) { return {lo, hi, false, false}; }

/// Reads typed values out of a JSON object, substituting defaults, recording
/// every violation instead of stopping at the first one, and building the
/// effective parameter object echoed in the summary.
class ParamReader {
 public:
  ParamReader(const nlohmann::json& given, std::string prefix, double length_unit);

  double number(const std::string& key, double def, Range range = {}, Dim dim = Dim::none);
  std::optional<double> optional_number(const std::string& key, Range range = {},
                                        Dim dim = Dim::none);
  std::size_t count(const std::string& key, std::size_t def, std::size_t lo, std::size_t hi);
  std::vector<double> numbers(const std::string& key, std::vector<double> def, Range range = {},
                              Dim dim = Dim::none, std::size_t min_size = 1);
  std::vector<std::size_t> counts(const std::string& key, std::vector<std::size_t> def,
                                  std::size_t lo, std::size_t hi, std::size_t min_size = 1);
  std::vector<std::string> choices(const std::string& key, std::vector<std::string> def,
                                   const std::vector<std::string>& allowed);
  std::string choice(const std::string& key, const std::string& def,
                     const std::vector<std::string>& allowed);
  bool flag(const std::string& key, bool def);
  std::uint64_t seed(const std::string& key, std::uint64_t def,
                     std::optional<std::uint64_t> override_value);
  /// List of fixed-length numeric rows, e.g. [[2, 0.5, 1.0], ...].
  std::vector<std::vector<double>> rows(const std::string& key,
                                        std::vector<std::vector<double>> def, std::size_t width);

  /// Nested object; merge it back with adopt().
  ParamReader child(const std::string& key);
  void adopt(const std::string& key, ParamReader&& child);

  void require(bool ok, const std::string& violation);
  bool has(const std::string& key) const;
  /// Flags unknown keys. Call once all keys have been read.
  void reject_unknown();

  double length_unit() const noexcept { return length_unit_; }
  const nlohmann::json& effective() const noexcept { return effective_; }
  std::vector<std::string>& violations() noexcept { return violations_; }

 private:
  const nlohmann::json* lookup(const std::string& key);
  std::string path(const std::string& key) const;
  double scale_of(Dim dim) const;
  bool in_range(double v, const Range& r) const;
  std::string describe(const Range& r) const;

  nlohmann::json given_;
  std::string prefix_;
  double length_unit_;
  nlohmann::json effective_ = nlohmann::json::object();
  std::set<std::string> used_;
  std::vector<std::string> violations_;
};

struct RunEnv {
  OpticalContext ctx = OpticalContext::dimensionless();
  double tolerance_scale = 1.0;
  std::size_t workers = 0;
  std::optional<std::uint64_t> seed_override;
  bool validate_only = false;
};

/// Adds a check, scaling its tolerance by env.tolerance_scale.
void add_check(ReportBundle& bundle, const RunEnv& env, const std::string& name, double measured,
               double expected, double tolerance, CheckMode mode, std::string note = {});

/// Each runner reads its parameters from `r`, throws ValidationError when any
/// violation was recorded, returns early when env.validate_only is set and
/// otherwise fills `bundle`.
void run_noon_compare(ParamReader& r, const RunEnv& env, ReportBundle& bundle);
void run_gaussian_tradeoff(ParamReader& r, const RunEnv& env, ReportBundle& bundle);
void run_gaussian_pattern(ParamReader& r, const RunEnv& env, ReportBundle& bundle);
void run_dangelo_angular(ParamReader& r, const RunEnv& env, ReportBundle& bundle);
void run_dangelo_alpha_scan(ParamReader& r, const RunEnv& env, ReportBundle& bundle);
void run_bound_audit(ParamReader& r, const RunEnv& env, ReportBundle& bundle);
void run_rotation_audit(ParamReader& r, const RunEnv& env, ReportBundle& bundle);
void run_absorber_convergence(ParamReader& r, const RunEnv& env, ReportBundle& bundle);

/// Throws ValidationError if r holds any violation.
void finish_validation(ParamReader& r);

}  // namespace qlitho::detail
