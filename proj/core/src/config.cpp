#include "ablum/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "ablum/errors.hpp"

namespace ablum {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_real(std::string_view key, std::string_view text) {
  const auto t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

long long parse_integer(std::string_view key, std::string_view text) {
  const auto t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  const auto t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" +
                      std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const auto t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
}

// Shortest text that parses back to the same double.
std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::vector<double> parse_tuple(std::string_view key, std::string_view text, std::size_t arity) {
  const auto parts = split_on(text, ':');
  if (parts.size() != arity) {
    throw ConfigError(std::string(key) + ": expected " + std::to_string(arity) +
                      " ':'-separated values, got '" + std::string(text) + "'");
  }
  std::vector<double> out;
  for (const auto& p : parts) out.push_back(parse_real(key, p));
  return out;
}

std::string format_range(double lo, double hi, bool lo_open) {
  auto bound = [](double v) {
    if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
    return format_real(v);
  };
  return std::string(lo_open ? "(" : "[") + bound(lo) + ", " + bound(hi) +
         (std::isinf(hi) ? ")" : "]");
}

struct Field {
  std::string_view section;
  std::string_view key;
  std::function<void(ExperimentConfig&, std::string_view)> parse;
  std::function<std::string(const ExperimentConfig&)> print;
  // Numeric fields only.
  std::function<double(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, double)> assign;
  double lo = -kInf;
  double hi = kInf;
  bool lo_open = false;
  // Optional fields are omitted from serialisation when this returns false.
  std::function<bool(const ExperimentConfig&)> present;
};

template <class Access>
Field real_field(std::string_view section, std::string_view key, Access access, double lo,
                 double hi, bool lo_open = false) {
  Field f{section, key, {}, {}, {}, {}, lo, hi, lo_open, {}};
  f.parse = [access, key](ExperimentConfig& c, std::string_view v) {
    access(c) = parse_real(key, v);
  };
  f.print = [access](const ExperimentConfig& c) { return format_real(access(c)); };
  f.get = [access](const ExperimentConfig& c) { return static_cast<double>(access(c)); };
  f.assign = [access](ExperimentConfig& c, double v) { access(c) = v; };
  return f;
}

template <class Access>
Field integer_field(std::string_view section, std::string_view key, Access access, double lo,
                    double hi) {
  Field f{section, key, {}, {}, {}, {}, lo, hi, false, {}};
  using T = std::remove_reference_t<decltype(access(std::declval<ExperimentConfig&>()))>;
  f.parse = [access, key](ExperimentConfig& c, std::string_view v) {
    const auto parsed = parse_integer(key, v);
    if (parsed < static_cast<long long>(std::numeric_limits<T>::min()) ||
        parsed > static_cast<long long>(std::numeric_limits<T>::max())) {
      throw ConfigError(std::string(key) + ": value out of representable range");
    }
    access(c) = static_cast<T>(parsed);
  };
  f.print = [access](const ExperimentConfig& c) { return std::to_string(access(c)); };
  f.get = [access](const ExperimentConfig& c) { return static_cast<double>(access(c)); };
  f.assign = [access](ExperimentConfig& c, double v) {
    access(c) = static_cast<T>(round_half_up(v));
  };
  return f;
}

template <class Access>
Field seed_field(std::string_view section, std::string_view key, Access access) {
  Field f{section, key, {}, {}, {}, {}, -kInf, kInf, false, {}};
  f.parse = [access, key](ExperimentConfig& c, std::string_view v) {
    access(c) = parse_unsigned(key, v);
  };
  f.print = [access](const ExperimentConfig& c) { return std::to_string(access(c)); };
  return f;
}

template <class Access>
Field bool_field(std::string_view section, std::string_view key, Access access) {
  Field f{section, key, {}, {}, {}, {}, -kInf, kInf, false, {}};
  f.parse = [access, key](ExperimentConfig& c, std::string_view v) {
    access(c) = parse_bool(key, v);
  };
  f.print = [access](const ExperimentConfig& c) {
    return std::string(access(c) ? "true" : "false");
  };
  return f;
}

Field aft_field(std::string_view key, AftId id) {
  const auto slot = to_index(id);
  Field f{"aft", key, {}, {}, {}, {}, -kInf, kInf, false, {}};
  f.parse = [slot, key, id](ExperimentConfig& c, std::string_view v) {
    const auto t = parse_tuple(key, v, 3);
    c.afts[slot] = {id, t[0], t[1], t[2]};
  };
  f.print = [slot](const ExperimentConfig& c) {
    const auto& a = c.afts[slot];
    return format_real(a.intensity) + ":" + format_real(a.s_prod) + ":" + format_real(a.s_nat);
  };
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    // [run]
    {
      Field f{"run", "name", {}, {}, {}, {}, -kInf, kInf, false, {}};
      f.parse = [](ExperimentConfig& c, std::string_view v) {
        c.name = trim(v);
        if (c.name.empty() || c.name.find_first_of("/\\ ") != std::string::npos) {
          throw ConfigError("name: must be non-empty without spaces or path separators");
        }
      };
      f.print = [](const ExperimentConfig& c) { return c.name; };
      t.push_back(f);
    }
    t.push_back(seed_field("run", "seed", [](auto& c) -> auto& { return c.seed; }));
    t.push_back(integer_field("run", "replications", [](auto& c) -> auto& { return c.replications; }, 1, kInf));

    // [grid]
    t.push_back(integer_field("grid", "width", [](auto& c) -> auto& { return c.width; }, 3, kInf));
    t.push_back(integer_field("grid", "height", [](auto& c) -> auto& { return c.height; }, 3, kInf));
    t.push_back(bool_field("grid", "scale_to_reference", [](auto& c) -> auto& { return c.scale_to_reference; }));
    t.push_back(real_field("grid", "reference_cells", [](auto& c) -> auto& { return c.reference_cells; }, 0, kInf, true));

    // [capitals]
    {
      Field f{"capitals", "layout", {}, {}, {}, {}, -kInf, kInf, false, {}};
      f.parse = [](ExperimentConfig& c, std::string_view v) {
        const auto s = trim(v);
        if (s == "peaks") {
          c.layout = CapitalLayout::kPeaks;
        } else if (s == "gradient") {
          c.layout = CapitalLayout::kGradient;
        } else {
          throw ConfigError("layout: expected 'peaks' or 'gradient', got '" + s + "'");
        }
      };
      f.print = [](const ExperimentConfig& c) {
        return std::string(c.layout == CapitalLayout::kPeaks ? "peaks" : "gradient");
      };
      t.push_back(f);
    }
    {
      Field f{"capitals", "peaks", {}, {}, {}, {}, -kInf, kInf, false, {}};
      f.parse = [](ExperimentConfig& c, std::string_view v) {
        c.peaks.clear();
        for (const auto& item : split_on(v, ',')) {
          const auto p = parse_tuple("peaks", item, 3);
          c.peaks.push_back({p[0], p[1], p[2]});
        }
      };
      f.print = [](const ExperimentConfig& c) {
        std::string s;
        for (const auto& p : c.peaks) {
          if (!s.empty()) s += ", ";
          s += format_real(p.cx) + ":" + format_real(p.cy) + ":" + format_real(p.sigma);
        }
        return s;
      };
      f.present = [](const ExperimentConfig& c) { return !c.peaks.empty(); };
      t.push_back(f);
    }
    t.push_back(real_field("capitals", "noise_amp", [](auto& c) -> auto& { return c.noise_amp; }, 0, 0.2));
    t.push_back(seed_field("capitals", "noise_seed", [](auto& c) -> auto& { return c.noise_seed; }));
    t.push_back(bool_field("capitals", "swap", [](auto& c) -> auto& { return c.swap_capitals; }));

    // [aft]
    t.push_back(aft_field("conservation", AftId::kConservation));
    t.push_back(aft_field("medium", AftId::kMediumIntensity));
    t.push_back(aft_field("high", AftId::kHighIntensity));

    // [behaviour]
    t.push_back(real_field("behaviour", "attitude_mean", [](auto& c) -> auto& { return c.behaviour.attitude; }, -1, 1));
    t.push_back(real_field("behaviour", "attitude_sigma", [](auto& c) -> auto& { return c.spread.attitude; }, 0, 1));
    t.push_back(real_field("behaviour", "norm_weight_w", [](auto& c) -> auto& { return c.behaviour.norm_weight; }, 0, 1));
    t.push_back(real_field("behaviour", "norm_weight_sigma", [](auto& c) -> auto& { return c.spread.norm_weight; }, 0, 1));
    t.push_back(real_field("behaviour", "inertia_lambda", [](auto& c) -> auto& { return c.behaviour.inertia_coeff; }, 0, 1));
    t.push_back(real_field("behaviour", "inertia_sigma", [](auto& c) -> auto& { return c.spread.inertia_coeff; }, 0, 1));
    t.push_back(real_field("behaviour", "cm_int", [](auto& c) -> auto& { return c.behaviour.cm_int; }, 0, 1));
    t.push_back(real_field("behaviour", "cm_int_sigma", [](auto& c) -> auto& { return c.spread.cm_int; }, 0, 1));
    t.push_back(real_field("behaviour", "cm_ext", [](auto& c) -> auto& { return c.behaviour.cm_ext; }, 0, 1));
    t.push_back(real_field("behaviour", "cm_ext_sigma", [](auto& c) -> auto& { return c.spread.cm_ext; }, 0, 1));
    t.push_back(real_field("behaviour", "git_upper_L", [](auto& c) -> auto& { return c.behaviour.git_upper; }, 0, 1));
    t.push_back(real_field("behaviour", "git_upper_sigma", [](auto& c) -> auto& { return c.spread.git_upper; }, 0, 1));
    t.push_back(real_field("behaviour", "logistic_k", [](auto& c) -> auto& { return c.globals.logistic_steepness; }, 0, kInf, true));
    t.push_back(bool_field("behaviour", "behaviour_enabled", [](auto& c) -> auto& { return c.globals.behaviour_enabled; }));

    // [demand]
    t.push_back(real_field("demand", "demand_mat", [](auto& c) -> auto& { return c.demand_mat; }, 0, kInf, true));
    t.push_back(real_field("demand", "demand_nm", [](auto& c) -> auto& { return c.demand_nm; }, 0, kInf, true));

    // [network]
    t.push_back(integer_field("network", "moore_radius", [](auto& c) -> auto& { return c.moore_radius; }, 1, kInf));
    t.push_back(integer_field("network", "n_tele", [](auto& c) -> auto& { return c.n_tele; }, 0, kInf));

    // [init]
    t.push_back(real_field("init", "share_c", [](auto& c) -> auto& { return c.initial_shares[0]; }, 0, 1));
    t.push_back(real_field("init", "share_mi", [](auto& c) -> auto& { return c.initial_shares[1]; }, 0, 1));
    t.push_back(real_field("init", "share_hi", [](auto& c) -> auto& { return c.initial_shares[2]; }, 0, 1));

    // [schedule]
    {
      Field f{"schedule", "breakpoints", {}, {}, {}, {}, -kInf, kInf, false, {}};
      f.parse = [](ExperimentConfig& c, std::string_view v) {
        AttitudeSchedule s;
        for (const auto& item : split_on(v, ',')) {
          const auto parts = split_on(item, ':');
          if (parts.size() != 2) {
            throw ConfigError("breakpoints: expected 'tick:attitude' items, got '" + item + "'");
          }
          const auto tick = parse_integer("breakpoints", parts[0]);
          if (tick < 0 || tick > std::numeric_limits<int>::max()) {
            throw ConfigError("breakpoints: tick out of range in '" + item + "'");
          }
          s.breakpoints.push_back({static_cast<int>(tick), parse_real("breakpoints", parts[1])});
        }
        c.schedule = std::move(s);
      };
      f.print = [](const ExperimentConfig& c) {
        std::string s;
        for (const auto& b : c.schedule->breakpoints) {
          if (!s.empty()) s += ", ";
          s += std::to_string(b.tick) + ":" + format_real(b.mean_attitude);
        }
        return s;
      };
      f.present = [](const ExperimentConfig& c) { return c.schedule.has_value(); };
      t.push_back(f);
    }

    // [stop]
    t.push_back(integer_field("stop", "max_ticks", [](auto& c) -> auto& { return c.stop.max_ticks; }, 2, kInf));
    t.push_back(integer_field("stop", "window", [](auto& c) -> auto& { return c.stop.window; }, 2, kInf));
    t.push_back(real_field("stop", "epsilon", [](auto& c) -> auto& { return c.stop.epsilon; }, 0, 1, true));

    // [sweep]
    for (std::size_t axis = 0; axis < 2; ++axis) {
      Field f{"sweep", axis == 0 ? "axis1" : "axis2", {}, {}, {}, {}, -kInf, kInf, false, {}};
      f.parse = [axis](ExperimentConfig& c, std::string_view v) {
        if (c.sweep.size() < axis + 1) c.sweep.resize(axis + 1);
        c.sweep[axis] = parse_sweep_axis(v);
      };
      f.print = [axis](const ExperimentConfig& c) { return format_sweep_axis(c.sweep[axis]); };
      f.present = [axis](const ExperimentConfig& c) { return c.sweep.size() > axis; };
      t.push_back(f);
    }
    return t;
  }();
  return table;
}

const Field* find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

bool is_section(std::string_view name) {
  return std::any_of(fields().begin(), fields().end(),
                     [name](const Field& f) { return f.section == name; });
}

void apply_key(ExperimentConfig& c, std::string_view section, std::string_view key,
               std::string_view value) {
  const Field* f = find_field(key);
  if (f == nullptr) {
    throw ConfigError("unknown key '" + std::string(key) + "'" +
                      (section.empty() ? "" : " in section [" + std::string(section) + "]"));
  }
  if (!section.empty() && f->section != section) {
    throw ConfigError("key '" + std::string(key) + "' belongs to section [" +
                      std::string(f->section) + "], not [" + std::string(section) + "]");
  }
  f->parse(c, value);
}

}  // namespace

double round_half_up(double value) { return std::floor(value + 0.5); }

std::vector<double> SweepAxis::values() const {
  if (steps == 1) return {min};
  std::vector<double> v(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    v[static_cast<std::size_t>(i)] =
        i == steps - 1 ? max : min + (max - min) * static_cast<double>(i) / (steps - 1);
  }
  return v;
}

SweepAxis parse_sweep_axis(std::string_view text) {
  const auto parts = split_on(text, ':');
  if (parts.size() != 4) {
    throw ConfigError("sweep axis must be 'name:min:max:steps', got '" + std::string(text) + "'");
  }
  SweepAxis axis;
  axis.name = parts[0];
  for (const auto& key : split_on(axis.name, '+')) {
    if (!is_numeric_parameter(key)) {
      throw ConfigError("sweep axis names unknown or non-numeric key '" + key + "'");
    }
  }
  axis.min = parse_real(axis.name, parts[1]);
  axis.max = parse_real(axis.name, parts[2]);
  const auto steps = parse_integer(axis.name, parts[3]);
  if (steps < 1 || steps > 100000) throw ConfigError("sweep steps must be >= 1");
  axis.steps = static_cast<int>(steps);
  if (axis.steps == 1 && axis.min != axis.max) {
    throw ConfigError("a single-step sweep axis needs min == max");
  }
  return axis;
}

std::string format_sweep_axis(const SweepAxis& axis) {
  return axis.name + ":" + format_real(axis.min) + ":" + format_real(axis.max) + ":" +
         std::to_string(axis.steps);
}

void validate(const ExperimentConfig& c) {
  for (const auto& f : fields()) {
    if (!f.get) continue;
    const double v = f.get(c);
    const bool below = f.lo_open ? !(v > f.lo) : !(v >= f.lo);
    if (below || !(v <= f.hi)) {
      throw ConfigError(std::string(f.key) + " = " + format_real(v) + " out of range " +
                        format_range(f.lo, f.hi, f.lo_open));
    }
  }
  validate(c.afts);
  const double share_sum = c.initial_shares[0] + c.initial_shares[1] + c.initial_shares[2];
  if (std::abs(share_sum - 1.0) > 1e-9) {
    throw ConfigError("share_c + share_mi + share_hi = " + format_real(share_sum) +
                      ", must equal 1");
  }
  if (c.stop.max_ticks < c.stop.window) {
    throw ConfigError("max_ticks = " + std::to_string(c.stop.max_ticks) +
                      " must be >= window = " + std::to_string(c.stop.window));
  }
  if (c.moore_radius >= std::min(c.width, c.height)) {
    throw ConfigError("moore_radius = " + std::to_string(c.moore_radius) +
                      " must be smaller than min(width, height)");
  }
  for (const auto& p : c.peaks) {
    if (!(p.sigma > 0.0)) throw ConfigError("peaks: sigma must be positive");
  }
  if (c.schedule) validate(*c.schedule);
  if (c.sweep.size() > 2) throw ConfigError("at most two sweep axes are supported");
  for (const auto& axis : c.sweep) {
    if (axis.name.empty()) throw ConfigError("sweep: axis2 given without axis1");
  }
}

ExperimentConfig parse_config(std::string_view text, std::string_view origin) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string(origin) + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  ExperimentConfig c;
  try {
    for (const auto& [name, node] : tree) {
      if (!node.empty()) {
        if (!is_section(name)) throw ConfigError("unknown section [" + name + "]");
        for (const auto& [key, leaf] : node) apply_key(c, name, key, leaf.data());
      } else if (node.data().empty() && is_section(name)) {
        continue;
      } else {
        apply_key(c, "", name, node.data());
      }
    }
    validate(c);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(origin) + ": " + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  std::string_view section;
  for (const auto& f : fields()) {
    if (f.present && !f.present(c)) continue;
    if (f.section != section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.print(c) << '\n';
  }
  return out.str();
}

bool is_numeric_parameter(std::string_view key) {
  const Field* f = find_field(key);
  return f != nullptr && static_cast<bool>(f->assign);
}

void set_parameter(ExperimentConfig& c, std::string_view key, double value) {
  for (const auto& part : split_on(key, '+')) {
    const Field* f = find_field(part);
    if (f == nullptr || !f->assign) {
      throw ConfigError("'" + part + "' is not a numeric configuration key");
    }
    f->assign(c, value);
  }
}

double get_parameter(const ExperimentConfig& c, std::string_view key) {
  const auto parts = split_on(key, '+');
  const Field* f = find_field(parts.front());
  if (f == nullptr || !f->get) {
    throw ConfigError("'" + parts.front() + "' is not a numeric configuration key");
  }
  return f->get(c);
}

}  // namespace ablum
