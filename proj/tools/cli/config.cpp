#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cnls::cli {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key);
  }

  const json& at(const std::string& key) {
    if (!has(key)) throw ConfigError(path_ + ": missing key '" + key + "'");
    return node_.at(key);
  }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
    return v.get<double>();
  }

  std::uint64_t unsigned_int(const std::string& key) { return as_unsigned(at(key), where(key)); }

  bool boolean(const std::string& key) {
    const json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + " must be true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError(where(key) + " must be an array");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(where(key) + " must hold numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::uint64_t> unsigned_ints(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError(where(key) + " must be an array");
    std::vector<std::uint64_t> out;
    for (const auto& e : v) out.push_back(as_unsigned(e, where(key)));
    return out;
  }

  std::vector<std::string> strings(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError(where(key) + " must be an array");
    std::vector<std::string> out;
    for (const auto& e : v) {
      if (!e.is_string()) throw ConfigError(where(key) + " must hold strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  Reader child(const std::string& key) { return Reader(at(key), where(key)); }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) throw ConfigError(path_ + ": unknown key '" + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_ + " " + what); }

 private:
  static std::uint64_t as_unsigned(const json& v, const std::string& where) {
    if (!v.is_number_unsigned()) throw ConfigError(where + " must be a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

FamilyConfig read_family(Reader r) {
  FamilyConfig f;
  f.family = r.string("family");
  if (r.has("params")) {
    Reader p = r.child("params");
    const json& node = r.at("params");
    for (const auto& [key, value] : node.items()) f.params[key] = p.number(key);
    p.finish();
  }
  r.finish();
  return f;
}

HypothesisParams read_hypothesis_params(Reader r) {
  HypothesisParams p;
  auto opt = [&](const char* key, double& target) {
    if (r.has(key)) target = r.number(key);
  };
  opt("K", p.K);
  opt("ell1", p.ell1);
  opt("c_prime", p.c_prime);
  opt("alpha", p.alpha);
  opt("lipschitz_radius", p.lipschitz_radius);
  opt("B", p.B);
  opt("Delta", p.Delta);
  opt("R", p.R);
  opt("S", p.S);
  opt("t", p.t_exp);
  opt("Gamma", p.Gamma);
  opt("A_prime", p.A_prime);
  opt("B_prime", p.B_prime);
  opt("beta", p.beta);
  opt("sigma", p.sigma);
  opt("h5_tolerance", p.h5_tolerance);
  if (r.has("alphas")) p.alphas = r.numbers("alphas");
  if (r.has("period")) {
    for (std::uint64_t v : r.unsigned_ints("period")) {
      require(v >= 1, r.where("period") + " entries must be >= 1");
      p.period.push_back(static_cast<int>(v));
    }
  }
  r.finish();
  return p;
}

ProblemConfig read_problem(Reader r) {
  ProblemConfig p;
  p.dims = r.unsigned_int("dims");
  require(p.dims >= 1 && p.dims <= 3, "problem.dims must be 1, 2 or 3");
  p.components = r.unsigned_int("components");
  require(p.components >= 1, "problem.components must be >= 1");
  p.nonlinearity = read_family(r.child("nonlinearity"));
  if (r.has("x_dependent")) p.x_dependent = r.boolean("x_dependent");
  if (r.has("infinity")) p.infinity = read_family(r.child("infinity"));
  if (r.has("hypotheses")) {
    Reader h = r.child("hypotheses");
    if (h.has("request")) {
      for (const auto& name : h.strings("request")) {
        auto id = parse_hypothesis(name);
        require(id.has_value(), "problem.hypotheses.request: unknown hypothesis '" + name + "'");
        p.requested.push_back(*id);
      }
    }
    if (h.has("samples")) {
      p.hypothesis_samples = h.unsigned_int("samples");
      require(p.hypothesis_samples >= 1, "problem.hypotheses.samples must be >= 1");
    }
    if (h.has("params")) p.hypothesis_params = read_hypothesis_params(h.child("params"));
    h.finish();
  }
  r.finish();
  return p;
}

MinimizeOptions read_solver(Reader r) {
  MinimizeOptions o;
  if (r.has("initial_guess")) {
    const std::string g = r.string("initial_guess");
    if (g == "gaussian") {
      o.initial_guess = InitialGuess::Gaussian;
    } else if (g == "random") {
      o.initial_guess = InitialGuess::RandomSeeded;
    } else {
      throw ConfigError("solver.initial_guess must be 'gaussian' or 'random'");
    }
  }
  if (r.has("tau0")) o.tau0 = r.number("tau0");
  if (r.has("backtracking")) o.backtracking = r.number("backtracking");
  if (r.has("max_iterations")) o.max_iterations = r.unsigned_int("max_iterations");
  if (r.has("tol_grad")) o.tol_grad = r.number("tol_grad");
  if (r.has("stagnation_window")) o.stagnation_window = r.unsigned_int("stagnation_window");
  if (r.has("localization_tol")) o.localization_tol = r.number("localization_tol");
  if (r.has("resolution_tol")) o.resolution_tol = r.number("resolution_tol");
  r.finish();
  require(o.tau0 > 0.0, "solver.tau0 must be positive");
  require(o.backtracking > 0.0 && o.backtracking < 1.0, "solver.backtracking must lie in (0, 1)");
  require(o.tol_grad > 0.0, "solver.tol_grad must be positive");
  require(o.localization_tol > 0.0, "solver.localization_tol must be positive");
  require(o.resolution_tol > 0.0, "solver.resolution_tol must be positive");
  return o;
}

EvolveOptions read_dynamics(Reader r, std::optional<std::filesystem::path>& initial) {
  EvolveOptions o;
  o.dt = r.number("dt");
  o.T = r.number("T");
  if (r.has("sample_every")) o.sample_every = r.unsigned_int("sample_every");
  if (r.has("snapshot_times")) o.snapshot_times = r.numbers("snapshot_times");
  if (r.has("blowup_ratio")) o.blowup_ratio = r.number("blowup_ratio");
  if (r.has("initial")) initial = r.string("initial");
  r.finish();
  try {
    validate(o);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("dynamics: ") + e.what());
  }
  return o;
}

StabilityConfig read_stability(Reader r) {
  StabilityConfig s;
  s.deltas = r.numbers("deltas");
  s.seeds = r.unsigned_ints("seeds");
  s.T = r.number("T");
  r.finish();
  require(!s.deltas.empty(), "stability.deltas must not be empty");
  require(!s.seeds.empty(), "stability.seeds must not be empty");
  for (double d : s.deltas) require(d >= 0.0 && std::isfinite(d), "stability.deltas must be finite and >= 0");
  require(s.T > 0.0 && std::isfinite(s.T), "stability.T must be positive");
  return s;
}

OutputConfig read_output(Reader r) {
  OutputConfig o;
  if (r.has("directory")) o.directory = r.string("directory");
  if (r.has("formats")) {
    o.csv = o.text = o.dump = false;
    for (const auto& f : r.strings("formats")) {
      if (f == "csv") {
        o.csv = true;
      } else if (f == "text") {
        o.text = true;
      } else if (f == "dump") {
        o.dump = true;
      } else {
        throw ConfigError("output.formats: unknown format '" + f + "'");
      }
    }
  }
  r.finish();
  return o;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void set_canonical(RunConfig& config, json canonical) {
  canonical.erase("output");
  config.canonical = canonical.dump();
  config.hash = fnv1a_hex(config.canonical);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig config;
  Reader r(root, "config");
  if (r.has("seed")) config.seed = r.unsigned_int("seed");
  config.problem = read_problem(r.child("problem"));
  const std::size_t dims = config.problem.dims;
  if (r.has("grid")) {
    Reader g = r.child("grid");
    for (std::uint64_t n : g.unsigned_ints("points")) config.points.push_back(n);
    config.lengths = g.numbers("lengths");
    g.finish();
    require(config.points.size() == dims && config.lengths.size() == dims,
            "grid: points and lengths need one entry per dimension");
  }
  if (r.has("constraint")) {
    Reader c = r.child("constraint");
    config.c = c.numbers("c");
    c.finish();
    require(config.c.size() == config.problem.components, "constraint.c needs one entry per component");
    for (double v : config.c) require(v > 0.0 && std::isfinite(v), "constraint.c entries must be positive");
  }
  if (r.has("solver")) config.solver = read_solver(r.child("solver"));
  if (r.has("dynamics")) config.dynamics = read_dynamics(r.child("dynamics"), config.initial);
  if (r.has("stability")) config.stability = read_stability(r.child("stability"));
  if (r.has("output")) config.output = read_output(r.child("output"));
  r.finish();
  config.solver.seed = config.seed;

  build_nonlinearity(config);
  if (config.problem.infinity) build_nonlinearity(*config.problem.infinity, config.problem.components, false);
  if (!config.points.empty()) build_grid(config);
  set_canonical(config, root);
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void override_seed(RunConfig& config, std::uint64_t seed) {
  config.seed = seed;
  config.solver.seed = seed;
  json canonical = json::parse(config.canonical);
  canonical["seed"] = seed;
  set_canonical(config, canonical);
}

NonlinearityPtr build_nonlinearity(const FamilyConfig& family, std::size_t components, bool x_dependent) {
  const auto& params = family.params;
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : params) {
      bool known = false;
      for (const char* k : keys) known = known || key == k;
      if (!known) throw ConfigError("nonlinearity '" + family.family + "': unknown parameter '" + key + "'");
    }
  };
  auto param = [&](const char* key) {
    auto it = params.find(key);
    if (it == params.end()) throw ConfigError("nonlinearity '" + family.family + "': missing parameter '" + key + "'");
    return it->second;
  };

  NonlinearityPtr spec;
  try {
    if (family.family == "power") {
      allow({"p"});
      spec = families::scalar_power(param("p"));
    } else if (family.family == "cubic") {
      allow({});
      spec = families::scalar_cubic();
    } else if (family.family == "manakov") {
      allow({});
      spec = families::manakov();
    } else if (family.family == "product") {
      allow({"strength", "alpha1", "alpha2"});
      spec = families::product_coupling(param("strength"), param("alpha1"), param("alpha2"));
    } else if (family.family == "zero") {
      allow({});
      spec = families::zero(components);
    } else if (family.family == "mismatched") {
      allow({});
      spec = families::mismatched_fixture();
    } else {
      throw ConfigError("unknown nonlinearity family '" + family.family + "'");
    }
    if (x_dependent) spec = families::x_dependent(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (spec->ell() != components) {
    throw ConfigError("nonlinearity '" + family.family + "' has " + std::to_string(spec->ell()) +
                      " components, problem.components is " + std::to_string(components));
  }
  return spec;
}

NonlinearityPtr build_nonlinearity(const RunConfig& config) {
  return build_nonlinearity(config.problem.nonlinearity, config.problem.components, config.problem.x_dependent);
}

GridPtr build_grid(const RunConfig& config) {
  if (config.points.empty()) throw ConfigError("this command needs a grid block");
  try {
    return Grid::create(config.points, config.lengths);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

}  // namespace cnls::cli
