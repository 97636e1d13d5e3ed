#pragma once

// Experiment configuration: built-in presets, merging of user JSON over a
// preset with field-level validation, and construction of the ground-truth
// modal basis.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "modal_cs/error.hpp"
#include "modal_cs/linalg.hpp"
#include "modal_cs/mdof.hpp"
#include "modal_cs/sampling.hpp"

namespace modal_cs {

using Json = nlohmann::json;

inline const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {"exp1", "exp2", "exp3",
                                               "exp4", "exp5", "realdata"};
  return ids;
}

inline bool is_stochastic(const std::string& id) { return id != "exp5"; }

[[noreturn]] inline void config_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::kConfigError, (path.empty() ? std::string("/") : path) + ": " + msg);
}

/// Default configuration of each experiment. A user config may override any
/// of these fields and nothing else.
inline Json preset_config(const std::string& id) {
  const Json first_set = {2.1, 4.28, 6.02, 8.24};
  const Json second_set = {2.1, 4.28, 4.6, 8.24};
  const Json amplitudes = {1.0, 0.45, 0.15, 0.01};
  const Json chain = {{"preset", "chain-4dof"}};
  if (id == "exp1" || id == "exp2") {
    return {{"experiment", id},
            {"system", chain},
            {"frequencies_over_pi", id == "exp1" ? first_set : second_set},
            {"amplitudes", amplitudes},
            {"sampling_interval", 0.1},
            {"t_max_end", 2.0},
            {"trials", 20},
            {"seed", id == "exp1" ? 101 : 102}};
  }
  if (id == "exp3") {
    return {{"experiment", id},
            {"system", chain},
            {"frequencies_over_pi", second_set},
            {"amplitudes", amplitudes},
            {"sampling_interval", 0.1},
            {"sample_counts", {10, 15, 20, 25, 30, 40}},
            {"random_offset", 2.0},
            {"trials", 20},
            {"seed", 103}};
  }
  if (id == "exp4") {
    return {{"experiment", id},
            {"system", chain},
            {"frequencies_over_pi", {10.6, 106.2, 200.8, 360.0}},
            {"amplitudes", amplitudes},
            {"sub_nyquist_interval", 0.0629},
            {"fine_interval", 0.002},
            {"t_max", 2.0},
            {"compressed_dim", 32},
            {"jl_kind", "gaussian"},
            {"trials", 20},
            {"seed", 104}};
  }
  if (id == "exp5") {
    return {{"experiment", id},
            {"system", chain},
            {"frequencies_over_pi", {6.24, 20.50, 30.06, 40.22}},
            {"amplitudes", amplitudes},
            {"sampling_interval", 0.03},
            {"t_max", 6.03},
            {"zero_pad", 8}};
  }
  if (id == "realdata") {
    return {{"experiment", id},
            {"data_csv", nullptr},
            {"header", false},
            {"sampling_interval", 0.05},
            {"compressed_dim", 50},
            {"benchmark_modes", 3},
            {"jl_kind", "gaussian"},
            {"seed", 105},
            {"synthetic",
             {{"dof", 18},
              {"samples", 3000},
              {"spring", 100.0},
              {"dominant_amplitudes", {1.0, 0.6, 0.35}},
              {"background_amplitude", 0.02},
              {"noise_std", 0.01}}},
            {"welch", {{"segment_len", 0}, {"overlap", 0.5}, {"window", "hann"}}},
            {"sparse", {{"max_iter", 1500}, {"tol", 1e-6}}}};
  }
  throw Error(ErrorKind::kConfigError, "unknown experiment '" + id + "'");
}

namespace detail {

inline const char* type_name(const Json& j) {
  if (j.is_null()) return "null";
  if (j.is_boolean()) return "boolean";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  return "object";
}

inline bool same_kind(const Json& a, const Json& b) {
  if (a.is_number()) return b.is_number();
  return a.type() == b.type();
}

inline void merge_into(Json& base, const Json& user, const std::string& path) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = it.key();
    const std::string where = path + "/" + key;
    if (!base.contains(key)) config_error(where, "unknown field");
    Json& slot = base[key];
    const Json& v = it.value();
    if (slot.is_object() && v.is_object()) {
      merge_into(slot, v, where);
    } else if (slot.is_null() || v.is_null() || same_kind(slot, v)) {
      slot = v;
    } else {
      config_error(where, std::string("expected ") + type_name(slot) + ", got " +
                              type_name(v));
    }
  }
}

}  // namespace detail

/// Typed accessors that report the offending field path.
class ConfigView {
 public:
  explicit ConfigView(const Json& root) : root_(root) {}

  const Json& at(const std::string& pointer) const {
    const Json::json_pointer p(pointer);
    if (!root_.contains(p)) config_error(pointer, "missing field");
    return root_.at(p);
  }

  double number(const std::string& pointer) const {
    const Json& v = at(pointer);
    if (!v.is_number()) config_error(pointer, "expected number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) config_error(pointer, "must be finite");
    return d;
  }

  double positive(const std::string& pointer) const {
    const double d = number(pointer);
    if (!(d > 0.0)) config_error(pointer, "must be positive");
    return d;
  }

  double non_negative(const std::string& pointer) const {
    const double d = number(pointer);
    if (d < 0.0) config_error(pointer, "must be non-negative");
    return d;
  }

  Index integer(const std::string& pointer, Index min_value) const {
    const Json& v = at(pointer);
    if (!v.is_number_integer()) config_error(pointer, "expected integer");
    const auto i = v.get<long long>();
    if (i < min_value) config_error(pointer, "must be at least " + std::to_string(min_value));
    return static_cast<Index>(i);
  }

  std::uint64_t seed(const std::string& pointer) const {
    const Json& v = at(pointer);
    if (v.is_null()) config_error(pointer, "a seed is required for this experiment");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      config_error(pointer, "seed must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& pointer) const {
    const Json& v = at(pointer);
    if (!v.is_boolean()) config_error(pointer, "expected boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& pointer) const {
    const Json& v = at(pointer);
    if (!v.is_string()) config_error(pointer, "expected string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& pointer) const {
    const Json& v = at(pointer);
    if (!v.is_array()) config_error(pointer, "expected array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(pointer + "/" + std::to_string(i)));
    return out;
  }

  RealMatrix matrix(const std::string& pointer) const {
    const Json& v = at(pointer);
    if (!v.is_array() || v.empty()) config_error(pointer, "expected non-empty array of rows");
    const std::size_t rows = v.size();
    std::size_t cols = 0;
    RealMatrix m;
    for (std::size_t i = 0; i < rows; ++i) {
      const auto row = numbers(pointer + "/" + std::to_string(i));
      if (i == 0) {
        cols = row.size();
        m.resize(static_cast<Index>(rows), static_cast<Index>(cols));
      } else if (row.size() != cols) {
        config_error(pointer + "/" + std::to_string(i), "ragged matrix row");
      }
      for (std::size_t j = 0; j < cols; ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = row[j];
    }
    return m;
  }

  bool has(const std::string& pointer) const {
    const Json::json_pointer p(pointer);
    return root_.contains(p) && !root_.at(p).is_null();
  }

 private:
  const Json& root_;
};

/// The 4-DOF example stiffness as printed (not symmetric) and its
/// symmetric part, which is what the chain-4dof preset uses.
inline RealMatrix chain4_printed() {
  RealMatrix z(4, 4);
  z << 2, -1, 0, 0,
       0, 2, -1, 0,
       0, -1, 2, -1,
       0, 0, -1, 2;
  return z;
}

inline RealMatrix chain4_stiffness() {
  const RealMatrix z = chain4_printed();
  return 0.5 * (z + z.transpose());
}

/// Fixed-free chain of unit masses and equal springs: k * tridiag(-1, 2, -1).
inline RealMatrix chain_stiffness(Index dof, double spring) {
  RealMatrix k = RealMatrix::Zero(dof, dof);
  for (Index i = 0; i < dof; ++i) {
    k(i, i) = 2.0 * spring;
    if (i + 1 < dof) k(i, i + 1) = k(i + 1, i) = -spring;
  }
  return k;
}

/// Applies user overrides to the preset for `id` and validates every field.
/// `seed_override` (the CLI --seed) replaces the config seed.
inline Json resolve_config(const std::string& id, const Json& user = Json::object(),
                           std::optional<std::uint64_t> seed_override = std::nullopt) {
  bool known = false;
  for (const auto& e : experiment_ids()) known = known || e == id;
  if (!known) config_error("/experiment", "unknown experiment '" + id + "'");
  if (!user.is_object()) config_error("", "config must be a JSON object");

  Json cfg = preset_config(id);
  Json overrides = user;
  if (overrides.contains("experiment")) {
    if (!overrides["experiment"].is_string() || overrides["experiment"] != id) {
      config_error("/experiment", "does not match the requested experiment '" + id + "'");
    }
  }
  if (overrides.contains("frequencies")) {
    if (overrides.contains("frequencies_over_pi")) {
      config_error("/frequencies", "give either frequencies or frequencies_over_pi, not both");
    }
    if (!cfg.contains("frequencies_over_pi")) config_error("/frequencies", "unknown field");
    cfg.erase("frequencies_over_pi");
    cfg["frequencies"] = nullptr;
  }
  if (overrides.contains("system")) {
    if (!cfg.contains("system")) config_error("/system", "unknown field");
    const Json& sys = overrides["system"];
    if (!sys.is_object()) config_error("/system", "expected object");
    for (auto it = sys.begin(); it != sys.end(); ++it) {
      if (it.key() != "preset" && it.key() != "stiffness" && it.key() != "mass") {
        config_error("/system/" + it.key(), "unknown field");
      }
    }
    if (sys.contains("preset") == sys.contains("stiffness")) {
      config_error("/system", "give exactly one of preset or stiffness");
    }
    if (sys.contains("mass") && !sys.contains("stiffness")) {
      config_error("/system/mass", "mass needs an explicit stiffness");
    }
    cfg["system"] = sys;
    overrides.erase("system");
  }
  detail::merge_into(cfg, overrides, "");
  if (seed_override) {
    if (!cfg.contains("seed")) config_error("/seed", "experiment " + id + " takes no seed");
    cfg["seed"] = *seed_override;
  }

  // Field checks.
  ConfigView v(cfg);
  if (cfg.contains("system")) {
    const Json& sys = cfg["system"];
    if (sys.contains("preset")) {
      if (v.string("/system/preset") != "chain-4dof") {
        config_error("/system/preset", "unknown system preset (known: chain-4dof)");
      }
    } else {
      const RealMatrix k = v.matrix("/system/stiffness");
      if (k.rows() != k.cols()) config_error("/system/stiffness", "must be square");
      if (v.has("/system/mass")) {
        const Json& mj = sys["mass"];
        if (mj.is_array() && !mj.empty() && mj[0].is_array()) {
          const RealMatrix m = v.matrix("/system/mass");
          if (m.rows() != k.rows() || m.cols() != k.cols()) {
            config_error("/system/mass", "must match stiffness dimensions");
          }
        } else {
          const auto d = v.numbers("/system/mass");
          if (static_cast<Index>(d.size()) != k.rows()) {
            config_error("/system/mass", "diagonal must have one entry per DOF");
          }
        }
      }
    }
    const std::string fkey = cfg.contains("frequencies") ? "/frequencies" : "/frequencies_over_pi";
    if (v.has(fkey)) {
      for (double f : v.numbers(fkey)) {
        if (!(f > 0.0)) config_error(fkey, "frequencies must be positive");
      }
    }
    v.numbers("/amplitudes");
  }
  if (is_stochastic(id)) v.seed("/seed");
  if (cfg.contains("trials")) v.integer("/trials", 1);
  if (id == "exp1" || id == "exp2") {
    v.positive("/sampling_interval");
    v.non_negative("/t_max_end");
  } else if (id == "exp3") {
    v.positive("/sampling_interval");
    v.non_negative("/random_offset");
    const Json& counts = cfg["sample_counts"];
    if (!counts.is_array()) config_error("/sample_counts", "expected array");
    for (std::size_t i = 0; i < counts.size(); ++i) v.integer("/sample_counts/" + std::to_string(i), 2);
  } else if (id == "exp4") {
    v.positive("/sub_nyquist_interval");
    v.positive("/fine_interval");
    v.positive("/t_max");
    v.integer("/compressed_dim", 1);
    const auto kind = v.string("/jl_kind");
    if (kind != "gaussian" && kind != "bernoulli") config_error("/jl_kind", "expected gaussian or bernoulli");
  } else if (id == "exp5") {
    v.positive("/sampling_interval");
    v.positive("/t_max");
    v.integer("/zero_pad", 1);
  } else if (id == "realdata") {
    if (!cfg["data_csv"].is_null() && !cfg["data_csv"].is_string()) {
      config_error("/data_csv", "expected string path or null");
    }
    v.boolean("/header");
    v.positive("/sampling_interval");
    v.integer("/compressed_dim", 1);
    v.integer("/benchmark_modes", 1);
    const auto kind = v.string("/jl_kind");
    if (kind != "gaussian" && kind != "bernoulli") config_error("/jl_kind", "expected gaussian or bernoulli");
    v.integer("/synthetic/dof", 2);
    v.integer("/synthetic/samples", 2);
    v.positive("/synthetic/spring");
    v.numbers("/synthetic/dominant_amplitudes");
    v.non_negative("/synthetic/background_amplitude");
    v.non_negative("/synthetic/noise_std");
    v.integer("/welch/segment_len", 0);
    const double ov = v.number("/welch/overlap");
    if (ov < 0.0 || ov >= 1.0) config_error("/welch/overlap", "must be in [0, 1)");
    const auto w = v.string("/welch/window");
    if (w != "hann" && w != "rectangular") config_error("/welch/window", "expected hann or rectangular");
    v.integer("/sparse/max_iter", 1);
    v.positive("/sparse/tol");
  }
  return cfg;
}

/// Ground-truth basis. Listed frequencies and amplitudes are paired with the
/// generalized eigenvectors of the system in ascending-eigenvalue order;
/// without a frequency list the solved frequencies are used. The result is
/// sorted by descending frequency and `order` maps back to list position.
inline OrderedBasis build_truth(const Json& cfg) {
  ConfigView v(cfg);
  const Json& sys = cfg.at("system");
  RealMatrix k;
  RealMatrix m;
  if (sys.contains("preset")) {
    k = chain4_stiffness();
    m = RealMatrix::Identity(4, 4);
  } else {
    k = v.matrix("/system/stiffness");
    m = RealMatrix::Identity(k.rows(), k.cols());
    if (v.has("/system/mass")) {
      const Json& mj = sys["mass"];
      if (mj.is_array() && !mj.empty() && mj[0].is_array()) {
        m = v.matrix("/system/mass");
      } else {
        m = to_eigen(v.numbers("/system/mass")).asDiagonal();
      }
    }
  }
  const Index n = k.rows();
  const ModalBasis solved = solve_modes(MdofSystem(m, k));

  RealMatrix shapes(n, n);
  RealVector freqs(n);
  for (Index j = 0; j < n; ++j) {  // ascending eigenvalue order
    shapes.col(j) = solved.mode_shapes().col(n - 1 - j);
    freqs(j) = solved.frequencies()(n - 1 - j);
  }
  if (v.has("/frequencies") || v.has("/frequencies_over_pi")) {
    const bool over_pi = !v.has("/frequencies");
    const std::string key = over_pi ? "/frequencies_over_pi" : "/frequencies";
    const auto f = v.numbers(key);
    if (static_cast<Index>(f.size()) != n) {
      config_error(key, "need " + std::to_string(n) + " frequencies, got " + std::to_string(f.size()));
    }
    for (Index j = 0; j < n; ++j) {
      freqs(j) = f[static_cast<std::size_t>(j)] * (over_pi ? std::numbers::pi : 1.0);
    }
  }
  const auto a = v.numbers("/amplitudes");
  if (static_cast<Index>(a.size()) != n) {
    config_error("/amplitudes", "need " + std::to_string(n) + " amplitudes, got " + std::to_string(a.size()));
  }
  ComplexVector amps(n);
  for (Index j = 0; j < n; ++j) amps(j) = a[static_cast<std::size_t>(j)];
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (freqs(i) == freqs(j)) config_error("/frequencies", "frequencies must be distinct");
    }
  }
  return sort_modes(shapes, freqs, amps);
}

}  // namespace modal_cs
