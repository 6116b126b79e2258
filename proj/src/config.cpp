#include "eit/config.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "eit/csv.hpp"

namespace eit {

namespace {

std::string fmt(double v) { return csv::format(v); }

struct RawEntry {
  std::string value;
  std::vector<std::string> items;
  bool is_array = false;
  int line = 0;
};

// Flat key = value file, a TOML-compatible subset: '#' comments, double-quoted
// strings, single-line [a, b, c] arrays, true/false booleans.  Every key must
// be consumed by the active mode; leftovers are reported as errors so typos
// and misplaced keys never pass silently.
class KvFile {
 public:
  static KvFile parse(const std::string& text) {
    KvFile kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      std::string code = strip_comment(line, lineno);
      code = csv::strip(code);
      if (code.empty()) continue;
      auto eq = code.find('=');
      if (eq == std::string::npos)
        throw ParseError("config line " + std::to_string(lineno) + ": expected 'key = value', got '" + code + "'");
      std::string key = csv::strip(code.substr(0, eq));
      std::string value = csv::strip(code.substr(eq + 1));
      if (key.empty())
        throw ParseError("config line " + std::to_string(lineno) + ": empty key");
      if (kv.entries_.count(key))
        throw ParseError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      RawEntry e;
      e.line = lineno;
      if (!value.empty() && value.front() == '[') {
        if (value.back() != ']')
          throw ParseError("config line " + std::to_string(lineno) + ": unterminated array for key '" + key + "'");
        e.is_array = true;
        std::string body = value.substr(1, value.size() - 2);
        if (!csv::strip(body).empty()) {
          for (const auto& item : csv::split(body, ','))
            e.items.push_back(unquote(csv::strip(item)));
        }
      } else {
        e.value = unquote(value);
      }
      kv.entries_.emplace(key, std::move(e));
    }
    return kv;
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& fallback) {
    const RawEntry* e = fetch(key);
    if (!e) return fallback;
    if (e->is_array) fail(key, *e, "expected a string, got an array");
    return e->value;
  }

  std::string require_str(const std::string& key) {
    if (!has(key)) missing(key);
    return str(key, "");
  }

  double number(const std::string& key, double fallback) {
    const RawEntry* e = fetch(key);
    if (!e) return fallback;
    if (e->is_array) fail(key, *e, "expected a number, got an array");
    return to_num(key, *e, e->value);
  }

  double require_number(const std::string& key) {
    if (!has(key)) missing(key);
    return number(key, 0.0);
  }

  long integer(const std::string& key, long fallback) {
    const RawEntry* e = fetch(key);
    if (!e) return fallback;
    if (e->is_array) fail(key, *e, "expected an integer, got an array");
    double v = to_num(key, *e, e->value);
    long n = static_cast<long>(v);
    if (static_cast<double>(n) != v) fail(key, *e, "expected an integer, got '" + e->value + "'");
    return n;
  }

  bool boolean(const std::string& key, bool fallback) {
    const RawEntry* e = fetch(key);
    if (!e) return fallback;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    fail(key, *e, "expected true or false, got '" + e->value + "'");
    return fallback;
  }

  std::vector<double> numbers(const std::string& key) {
    const RawEntry* e = fetch(key);
    if (!e) return {};
    if (!e->is_array) fail(key, *e, "expected an array like [1, 2, 3]");
    std::vector<double> out;
    out.reserve(e->items.size());
    for (const auto& item : e->items) out.push_back(to_num(key, *e, item));
    return out;
  }

  std::vector<std::string> strings(const std::string& key) {
    const RawEntry* e = fetch(key);
    if (!e) return {};
    if (!e->is_array) fail(key, *e, "expected an array like [a, b]");
    return e->items;
  }

  int line_of(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  void finish(const std::string& mode_name) const {
    for (const auto& [key, e] : entries_) {
      if (!used_.count(key))
        throw ValidationError("key '" + key + "' (line " + std::to_string(e.line) +
                              ") is not used by mode '" + mode_name + "'");
    }
  }

 private:
  const RawEntry* fetch(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  static void missing(const std::string& key) {
    throw ValidationError("missing required key '" + key + "'");
  }

  [[noreturn]] static void fail(const std::string& key, const RawEntry& e, const std::string& what) {
    throw ParseError("key '" + key + "' (line " + std::to_string(e.line) + "): " + what);
  }

  static double to_num(const std::string& key, const RawEntry& e, const std::string& text) {
    try {
      return csv::to_double(text);
    } catch (const Error&) {
      fail(key, e, "expected a number, got '" + text + "'");
    }
  }

  static std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
  }

  static std::string strip_comment(const std::string& line, int lineno) {
    bool in_quote = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quote = !in_quote;
      else if (line[i] == '#' && !in_quote) return line.substr(0, i);
    }
    if (in_quote)
      throw ParseError("config line " + std::to_string(lineno) + ": unterminated string");
    return line;
  }

  std::map<std::string, RawEntry> entries_;
  std::set<std::string> used_;
};

RunMode mode_from_string(const std::string& s) {
  if (s == "spectrum") return RunMode::Spectrum;
  if (s == "sweep_width") return RunMode::SweepWidth;
  if (s == "sweep_visibility") return RunMode::SweepVisibility;
  if (s == "holeburn") return RunMode::Holeburn;
  if (s == "analyze") return RunMode::Analyze;
  throw ValidationError("key 'mode': unknown mode '" + s +
                        "' (expected spectrum, sweep_width, sweep_visibility, holeburn, or analyze)");
}

ProfileKind shape_from(KvFile& kv, const std::string& key, ProfileKind fallback) {
  std::string s = kv.str(key, "");
  if (s.empty()) return fallback;
  try {
    return profile_kind_from_string(s);
  } catch (const Error&) {
    throw ValidationError("key '" + key + "' (line " + std::to_string(kv.line_of(key)) +
                          "): unknown profile shape '" + s + "'");
  }
}

std::vector<ProfileKind> shape_list(KvFile& kv, const std::string& key,
                                    std::vector<ProfileKind> fallback) {
  if (!kv.has(key)) return fallback;
  std::vector<ProfileKind> out;
  for (const auto& s : kv.strings(key)) {
    ProfileKind k;
    try {
      k = profile_kind_from_string(s);
    } catch (const Error&) {
      throw ValidationError("key '" + key + "': unknown profile shape '" + s + "'");
    }
    if (k == ProfileKind::Tabulated)
      throw ValidationError("key '" + key + "': tabulated shapes cannot be swept");
    out.push_back(k);
  }
  if (out.empty()) throw ValidationError("key '" + key + "': shape list is empty");
  return out;
}

void load_rates(KvFile& kv, RunConfig& cfg, bool need_omega, bool need_sigma_opt) {
  cfg.rates.omega = need_omega ? kv.require_number("omega") : kv.number("omega", 0.0);
  cfg.rates.gamma21 = kv.number("gamma21", 0.0);
  cfg.rates.gamma31 = kv.require_number("gamma31");
  cfg.rates.sigma_opt = need_sigma_opt ? kv.require_number("sigma_opt") : kv.number("sigma_opt", 0.0);
  cfg.rates.sigma_spin = kv.number("sigma_spin", 0.0);
  if (cfg.rates.gamma31 <= 0.0)
    throw ValidationError("key 'gamma31': must be > 0, got " + fmt(cfg.rates.gamma31));
  if (cfg.rates.gamma21 < 0.0)
    throw ValidationError("key 'gamma21': must be >= 0, got " + fmt(cfg.rates.gamma21));
  if (cfg.rates.omega < 0.0)
    throw ValidationError("key 'omega': must be >= 0, got " + fmt(cfg.rates.omega));
  if (cfg.rates.sigma_opt < 0.0)
    throw ValidationError("key 'sigma_opt': must be >= 0, got " + fmt(cfg.rates.sigma_opt));
  if (cfg.rates.sigma_spin < 0.0)
    throw ValidationError("key 'sigma_spin': must be >= 0, got " + fmt(cfg.rates.sigma_spin));
}

void load_grid(KvFile& kv, RunConfig& cfg, bool required) {
  bool any = kv.has("grid_start") || kv.has("grid_stop") || kv.has("grid_count");
  if (!any) {
    if (required) throw ValidationError("missing required keys 'grid_start'/'grid_stop'/'grid_count'");
    return;
  }
  cfg.grid.start = kv.require_number("grid_start");
  cfg.grid.stop = kv.require_number("grid_stop");
  cfg.grid.count = static_cast<int>(kv.integer("grid_count", 0));
  if (cfg.grid.count == 0) throw ValidationError("missing required key 'grid_count'");
  cfg.grid.validate();
  cfg.grid_given = true;
}

void load_quadrature(KvFile& kv, RunConfig& cfg) {
  cfg.quad.rel_tol = kv.number("rel_tol", cfg.quad.rel_tol);
  cfg.quad.max_depth = static_cast<int>(kv.integer("max_depth", cfg.quad.max_depth));
  cfg.quad.max_intervals = static_cast<int>(kv.integer("max_intervals", cfg.quad.max_intervals));
  if (kv.has("tail_mapping"))
    cfg.quad.tail_mapping = tail_mapping_from_string(kv.str("tail_mapping", ""));
  cfg.quad.truncate_span = kv.number("truncate_span", cfg.quad.truncate_span);
  cfg.quad.collapse_lorentzian_spin =
      kv.boolean("collapse_lorentzian_spin", cfg.quad.collapse_lorentzian_spin);
  cfg.quad.validate();
}

void load_profiles(KvFile& kv, RunConfig& cfg) {
  cfg.optical.kind = shape_from(kv, "optical_shape", ProfileKind::Lorentzian);
  cfg.spin.kind = shape_from(kv, "spin_shape", ProfileKind::Lorentzian);
  cfg.optical.fwhm = cfg.rates.sigma_opt;
  cfg.spin.fwhm = cfg.rates.sigma_spin;
  if (cfg.optical.kind == ProfileKind::Tabulated) {
    cfg.optical.table_path = kv.require_str("optical_table");
  } else if (kv.has("optical_table")) {
    throw ValidationError("key 'optical_table' requires optical_shape = tabulated");
  }
  if (cfg.spin.kind == ProfileKind::Tabulated) {
    cfg.spin.table_path = kv.require_str("spin_table");
  } else if (kv.has("spin_table")) {
    throw ValidationError("key 'spin_table' requires spin_shape = tabulated");
  }
}

void load_common_outputs(KvFile& kv, RunConfig& cfg) {
  cfg.optical_depth = kv.number("optical_depth", 0.0);
  if (cfg.optical_depth < 0.0)
    throw ValidationError("key 'optical_depth': must be >= 0, got " + fmt(cfg.optical_depth));
  cfg.depth_threshold = kv.number("depth_threshold", cfg.depth_threshold);
  if (cfg.depth_threshold <= 0.0 || cfg.depth_threshold >= 1.0)
    throw ValidationError("key 'depth_threshold': must lie in (0, 1), got " + fmt(cfg.depth_threshold));
  cfg.output_dir = kv.str("output_dir", cfg.output_dir);
}

void load_holeburn(KvFile& kv, RunConfig& cfg) {
  auto g = kv.numbers("ground_offsets");
  auto e = kv.numbers("excited_offsets");
  if (!kv.has("ground_offsets")) throw ValidationError("missing required key 'ground_offsets'");
  if (!kv.has("excited_offsets")) throw ValidationError("missing required key 'excited_offsets'");
  if (g.size() != 3)
    throw ValidationError("key 'ground_offsets': expected 3 values, got " + std::to_string(g.size()));
  if (e.size() != 3)
    throw ValidationError("key 'excited_offsets': expected 3 values, got " + std::to_string(e.size()));
  for (int i = 0; i < 3; ++i) {
    cfg.levels.ground_offsets[i] = g[i];
    cfg.levels.excited_offsets[i] = e[i];
  }
  if (kv.has("strengths")) {
    auto s = kv.numbers("strengths");
    if (s.size() != 9)
      throw ValidationError("key 'strengths': expected 9 values (row-major ground x excited), got " +
                            std::to_string(s.size()));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cfg.levels.strengths[i][j] = s[3 * i + j];
  } else {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cfg.levels.strengths[i][j] = 1.0 / 3.0;
  }
  cfg.levels.background_fwhm = kv.require_number("background_fwhm");
  cfg.levels.normalize_strength_rows();
  cfg.levels.validate();

  cfg.target_class = kv.number("target_class", 0.0);
  cfg.trench_halfwidth = kv.require_number("trench_halfwidth");
  cfg.feature_fwhm = kv.number("feature_fwhm", 0.0);
  cfg.kernel_fwhm = kv.number("kernel_fwhm", 0.0);
  if (cfg.kernel_fwhm < 0.0)
    throw ValidationError("key 'kernel_fwhm': must be >= 0, got " + fmt(cfg.kernel_fwhm));
  cfg.profile_step = kv.number("profile_step", 0.0);
  if (cfg.profile_step < 0.0)
    throw ValidationError("key 'profile_step': must be >= 0, got " + fmt(cfg.profile_step));

  cfg.burn.shared_excited = static_cast<int>(kv.integer("shared_excited", cfg.burn.shared_excited));
  cfg.burn.probe_ground = static_cast<int>(kv.integer("probe_ground", cfg.burn.probe_ground));
  cfg.burn.control_ground = static_cast<int>(kv.integer("control_ground", cfg.burn.control_ground));
  cfg.burn.span_halfwidth = kv.number("span_halfwidth", 0.0);
  cfg.burn.class_step = kv.number("class_step", 0.0);
  cfg.burn.resonance_tolerance = kv.number("resonance_tolerance", 0.0);
  cfg.burn.transfer_fraction = kv.number("transfer_fraction", 1.0);
}

}  // namespace

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::Spectrum: return "spectrum";
    case RunMode::SweepWidth: return "sweep_width";
    case RunMode::SweepVisibility: return "sweep_visibility";
    case RunMode::Holeburn: return "holeburn";
    case RunMode::Analyze: return "analyze";
  }
  return "?";
}

BroadeningProfile ProfileSpec::build() const {
  if (kind == ProfileKind::Tabulated) {
    std::ifstream is(table_path);
    if (!is) throw IoError("cannot open profile table '" + table_path + "'");
    return BroadeningProfile::read_csv(is);
  }
  return BroadeningProfile::analytic(kind, fwhm);
}

int RunConfig::planned_runs() const {
  if (mode == RunMode::SweepWidth || mode == RunMode::SweepVisibility) {
    return static_cast<int>(sweep_values.size() * std::max<size_t>(optical_shapes.size(), 1) *
                            std::max<size_t>(spin_shapes.size(), 1));
  }
  return 1;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << is.rdbuf();

  KvFile kv = KvFile::parse(buf.str());
  RunConfig cfg;
  cfg.mode = mode_from_string(kv.require_str("mode"));

  switch (cfg.mode) {
    case RunMode::Spectrum: {
      load_rates(kv, cfg, /*need_omega=*/true, /*need_sigma_opt=*/false);
      load_profiles(kv, cfg);
      if (cfg.optical.kind != ProfileKind::Tabulated && cfg.rates.sigma_opt == 0.0 &&
          !kv.has("sigma_opt"))
        throw ValidationError("missing required key 'sigma_opt'");
      load_grid(kv, cfg, /*required=*/true);
      load_quadrature(kv, cfg);
      cfg.force_numeric = kv.boolean("force_numeric", false);
      load_common_outputs(kv, cfg);
      break;
    }
    case RunMode::SweepWidth:
    case RunMode::SweepVisibility: {
      load_rates(kv, cfg, /*need_omega=*/false, /*need_sigma_opt=*/true);
      if (cfg.rates.sigma_opt <= 0.0)
        throw ValidationError("key 'sigma_opt': sweeps require sigma_opt > 0");
      if (cfg.mode == RunMode::SweepVisibility && cfg.rates.sigma_spin <= 0.0)
        throw ValidationError("key 'sigma_spin': visibility sweeps require sigma_spin > 0");
      cfg.sweep_values = kv.numbers("sweep_values");
      if (!kv.has("sweep_values")) throw ValidationError("missing required key 'sweep_values'");
      if (cfg.sweep_values.empty()) throw ValidationError("key 'sweep_values': list is empty");
      for (double v : cfg.sweep_values)
        if (v <= 0.0)
          throw ValidationError("key 'sweep_values': values must be > 0, got " + fmt(v));
      cfg.optical_shapes = shape_list(kv, "optical_shapes", {ProfileKind::Lorentzian});
      cfg.spin_shapes = shape_list(kv, "spin_shapes", {ProfileKind::Lorentzian});
      cfg.sweep_grid_count = static_cast<int>(kv.integer("sweep_grid_count", 0));
      if (cfg.sweep_grid_count != 0 && cfg.sweep_grid_count < 31)
        throw ValidationError("key 'sweep_grid_count': must be >= 31");
      cfg.sweep_span_widths = kv.number("sweep_span_widths", 0.0);
      if (cfg.sweep_span_widths < 0.0)
        throw ValidationError("key 'sweep_span_widths': must be > 0");
      load_quadrature(kv, cfg);
      cfg.force_numeric = kv.boolean("force_numeric", false);
      load_common_outputs(kv, cfg);
      break;
    }
    case RunMode::Holeburn: {
      load_rates(kv, cfg, /*need_omega=*/true, /*need_sigma_opt=*/false);
      cfg.spin.kind = shape_from(kv, "spin_shape", ProfileKind::Lorentzian);
      cfg.spin.fwhm = cfg.rates.sigma_spin;
      if (cfg.spin.kind == ProfileKind::Tabulated)
        cfg.spin.table_path = kv.require_str("spin_table");
      load_holeburn(kv, cfg);
      load_grid(kv, cfg, /*required=*/true);
      load_quadrature(kv, cfg);
      load_common_outputs(kv, cfg);
      break;
    }
    case RunMode::Analyze: {
      cfg.input_path = kv.require_str("input");
      cfg.analysis = kv.str("analysis", "both");
      if (cfg.analysis != "dip" && cfg.analysis != "saturated" && cfg.analysis != "both")
        throw ValidationError("key 'analysis': expected dip, saturated, or both, got '" +
                              cfg.analysis + "'");
      cfg.optical_depth = kv.number("optical_depth", 1.0);
      if (cfg.optical_depth <= 0.0)
        throw ValidationError("key 'optical_depth': must be > 0, got " + fmt(cfg.optical_depth));
      cfg.depth_threshold = kv.number("depth_threshold", cfg.depth_threshold);
      if (cfg.depth_threshold <= 0.0 || cfg.depth_threshold >= 1.0)
        throw ValidationError("key 'depth_threshold': must lie in (0, 1)");
      cfg.output_dir = kv.str("output_dir", cfg.output_dir);
      break;
    }
  }

  kv.finish(to_string(cfg.mode));
  return cfg;
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  auto put = [&os](const std::string& k, const std::string& v) { os << k << " = " << v << "\n"; };
  auto putn = [&put](const std::string& k, double v) { put(k, fmt(v)); };
  auto puta = [&put](const std::string& k, const std::vector<double>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    put(k, s + "]");
  };

  put("mode", to_string(mode));
  if (mode == RunMode::Analyze) {
    put("input", input_path);
    put("analysis", analysis);
    putn("optical_depth", optical_depth);
    putn("depth_threshold", depth_threshold);
    put("output_dir", output_dir);
    return os.str();
  }

  if (mode != RunMode::SweepWidth && mode != RunMode::SweepVisibility) putn("omega", rates.omega);
  putn("gamma21", rates.gamma21);
  putn("gamma31", rates.gamma31);
  if (mode != RunMode::Holeburn) putn("sigma_opt", rates.sigma_opt);
  putn("sigma_spin", rates.sigma_spin);

  if (mode == RunMode::Spectrum) {
    put("optical_shape", to_string(optical.kind));
    if (!optical.table_path.empty()) put("optical_table", optical.table_path);
  }
  if (mode == RunMode::Spectrum || mode == RunMode::Holeburn) {
    put("spin_shape", to_string(spin.kind));
    if (!spin.table_path.empty()) put("spin_table", spin.table_path);
  }

  if (mode == RunMode::SweepWidth || mode == RunMode::SweepVisibility) {
    puta("sweep_values", sweep_values);
    auto names = [&put](const std::string& k, const std::vector<ProfileKind>& v) {
      std::string s = "[";
      for (size_t i = 0; i < v.size(); ++i) s += std::string(i ? ", " : "") + to_string(v[i]);
      put(k, s + "]");
    };
    names("optical_shapes", optical_shapes);
    names("spin_shapes", spin_shapes);
    putn("sweep_grid_count", sweep_grid_count);
    putn("sweep_span_widths", sweep_span_widths);
  }

  if (mode == RunMode::Holeburn) {
    puta("ground_offsets", {levels.ground_offsets[0], levels.ground_offsets[1], levels.ground_offsets[2]});
    puta("excited_offsets",
         {levels.excited_offsets[0], levels.excited_offsets[1], levels.excited_offsets[2]});
    std::vector<double> s;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s.push_back(levels.strengths[i][j]);
    puta("strengths", s);
    putn("background_fwhm", levels.background_fwhm);
    putn("target_class", target_class);
    putn("trench_halfwidth", trench_halfwidth);
    putn("feature_fwhm", feature_fwhm);
    putn("kernel_fwhm", kernel_fwhm);
    putn("profile_step", profile_step);
    putn("shared_excited", burn.shared_excited);
    putn("probe_ground", burn.probe_ground);
    putn("control_ground", burn.control_ground);
    putn("span_halfwidth", burn.span_halfwidth);
    putn("class_step", burn.class_step);
    putn("resonance_tolerance", burn.resonance_tolerance);
    putn("transfer_fraction", burn.transfer_fraction);
  }

  if (grid_given) {
    putn("grid_start", grid.start);
    putn("grid_stop", grid.stop);
    putn("grid_count", grid.count);
  }
  putn("rel_tol", quad.rel_tol);
  putn("max_depth", quad.max_depth);
  putn("max_intervals", quad.max_intervals);
  put("tail_mapping", to_string(quad.tail_mapping));
  putn("truncate_span", quad.truncate_span);
  put("collapse_lorentzian_spin", quad.collapse_lorentzian_spin ? "true" : "false");
  if (mode != RunMode::Holeburn) put("force_numeric", force_numeric ? "true" : "false");
  putn("optical_depth", optical_depth);
  putn("depth_threshold", depth_threshold);
  put("output_dir", output_dir);
  return os.str();
}

std::string config_hash(const std::string& raw_bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : raw_bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace eit
