#include "chlab/config.hpp"

#include "chlab/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace chlab {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"grid", {"nx", "nt", "horizon", "modes"}},
      {"model", {"rho", "qtilde", "cutoff", "f_enabled"}},
      {"sigma", {"form", "c0", "beta", "q"}},
      {"initial", {"kind", "path"}},
      {"seeds", {"master", "replicates"}},
      {"solver", {"scheme", "tol", "max_iter"}},
      {"observation", {"x_star", "t_obs", "eps", "thresholds", "levels", "moment_p"}},
  };
  return keys;
}

template <typename T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto node = tree.get_child_optional(pt::ptree::path_type(key, '.'));
  if (!node) return fallback;
  const std::string text = node->get_value<std::string>();
  if constexpr (std::is_same_v<T, std::string>) {
    return text;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError("key '" + key + "' expects a boolean, got '" + text + "'");
  } else {
    std::istringstream is(text);
    T value{};
    is >> value;
    if (is.fail() || !(is >> std::ws).eof()) throw ConfigError("key '" + key + "' has malformed value '" + text + "'");
    return value;
  }
}

std::vector<double> get_list(const pt::ptree& tree, const std::string& key, std::vector<double> fallback) {
  const auto node = tree.get_child_optional(pt::ptree::path_type(key, '.'));
  if (!node) return fallback;
  std::string text = node->get_value<std::string>();
  for (char& c : text)
    if (c == ',') c = ' ';
  std::istringstream is(text);
  std::vector<double> out;
  double v = 0.0;
  while (is >> v) out.push_back(v);
  if (!is.eof()) throw ConfigError("key '" + key + "' has a malformed list '" + node->get_value<std::string>() + "'");
  return out;
}

std::vector<double> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open initial condition file '" + path + "'");
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    if (token.starts_with('#')) {
      std::getline(in, token);
      continue;
    }
    try {
      values.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw ConfigError("initial condition file holds a non-numeric token '" + token + "'");
    }
  }
  return values;
}

void write_list(std::ostream& os, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) os << (i ? " " : "") << values[i];
}

}  // namespace

Eigen::VectorXd ExperimentConfig::initial_field() const {
  const GridSpec g = grid();
  Eigen::VectorXd u0(nx);
  switch (initial) {
    case InitialKind::cosine:
      for (int j = 0; j < nx; ++j) u0[j] = std::cos(g.node(j));
      break;
    case InitialKind::zero:
      u0.setZero();
      break;
    case InitialKind::file:
      if (static_cast<int>(initial_samples.size()) != nx)
        throw ConfigError("initial condition file must hold exactly Nx values");
      for (int j = 0; j < nx; ++j) u0[j] = initial_samples[static_cast<std::size_t>(j)];
      break;
  }
  return u0;
}

std::vector<double> ExperimentConfig::observation_times() const {
  return t_obs.empty() ? std::vector<double>{horizon} : t_obs;
}

std::vector<double> ExperimentConfig::window_lengths() const {
  if (!eps.empty()) return eps;
  std::vector<double> out;
  for (int e = 7; e >= 3; --e) out.push_back(horizon * std::ldexp(1.0, -e));
  return out;
}

int ExperimentConfig::obs_step(double t) const {
  const double dt = horizon / nt;
  const double steps = t / dt;
  const long rounded = std::lround(steps);
  if (std::abs(steps - static_cast<double>(rounded)) > 1e-9 || rounded < 1 || rounded > nt) {
    throw ConfigError("observation time " + std::to_string(t) + " must be a positive grid time in (0, T]");
  }
  return static_cast<int>(rounded);
}

void ExperimentConfig::validate() const {
  (void)grid();
  if (modes < 0 || modes > nx) throw ConfigError("spectral truncation must satisfy 0 <= K <= Nx (0 means K = Nx)");
  model.validate();
  (void)SigmaSpec::make(model.sigma.form(), model.sigma.c0(), model.sigma.beta(), model.sigma.q());
  if (initial == InitialKind::file && static_cast<int>(initial_samples.size()) != nx) {
    throw ConfigError("initial condition file must hold exactly Nx values");
  }
  if (replicates < 1) throw ConfigError("replicates must satisfy M >= 1");
  if (!(tol > 0.0)) throw ConfigError("solver tolerance must satisfy tol > 0");
  if (max_iter < 1) throw ConfigError("solver max_iter must satisfy max_iter >= 1");
  if (!(x_star >= 0.0 && x_star <= kPi)) throw ConfigError("x_star must lie in [0, pi]");
  for (double t : observation_times()) (void)obs_step(t);
  for (double e : window_lengths()) {
    for (double t : observation_times())
      if (!(e > 0.0 && e < std::min(1.0, t))) throw ConfigError("window lengths must satisfy 0 < eps < min(1, t_obs)");
  }
  for (double th : thresholds)
    if (!(th >= 0.0)) throw ConfigError("positivity thresholds must be non-negative");
  for (double n : levels)
    if (!(n > 0.0)) throw ConfigError("localization levels must be positive");
  if (!(moment_p >= 2.0)) throw ConfigError("moment power must satisfy p >= 2");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "[grid]\nnx=" << nx << "\nnt=" << nt << "\nhorizon=" << horizon << "\nmodes=" << (modes == 0 ? nx : modes)
     << '\n';
  os << "[model]\nrho=" << model.rho << "\nqtilde=" << model.qtilde << "\ncutoff=" << model.cutoff.level
     << "\nf_enabled=" << (model.f_enabled ? "true" : "false") << '\n';
  os << "[sigma]\nform=" << to_string(model.sigma.form()) << "\nc0=" << model.sigma.c0()
     << "\nbeta=" << model.sigma.beta() << "\nq=" << model.sigma.q() << '\n';
  os << "[initial]\nkind=" << (initial == InitialKind::cosine ? "cosine" : initial == InitialKind::zero ? "zero" : "file")
     << '\n';
  if (initial == InitialKind::file) {
    os << "values=";
    write_list(os, initial_samples);
    os << '\n';
  }
  os << "[seeds]\nmaster=" << master_seed << "\nreplicates=" << replicates << '\n';
  os << "[solver]\nscheme=" << (scheme == Scheme::step ? "step" : "picard") << "\ntol=" << tol
     << "\nmax_iter=" << max_iter << '\n';
  os << "[observation]\nx_star=" << x_star << "\nt_obs=";
  write_list(os, observation_times());
  os << "\neps=";
  write_list(os, window_lengths());
  os << "\nthresholds=";
  write_list(os, thresholds);
  os << "\nlevels=";
  write_list(os, levels);
  os << "\nmoment_p=" << moment_p << '\n';
  return os.str();
}

std::string ExperimentConfig::digest() const {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical()) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

ExperimentConfig parse_config(std::istream& in, const std::string& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError("unknown configuration section [" + section + "]");
    if (body.empty()) throw ConfigError("configuration entry '" + section + "' must be a [section]");
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
    }
  }

  ExperimentConfig cfg;
  cfg.nx = get(tree, "grid.nx", cfg.nx);
  cfg.nt = get(tree, "grid.nt", cfg.nt);
  cfg.horizon = get(tree, "grid.horizon", cfg.horizon);
  cfg.modes = get(tree, "grid.modes", cfg.modes);

  cfg.model.rho = get(tree, "model.rho", cfg.model.rho);
  cfg.model.qtilde = get(tree, "model.qtilde", cfg.model.qtilde);
  cfg.model.cutoff.level = get(tree, "model.cutoff", cfg.model.cutoff.level);
  cfg.model.f_enabled = get(tree, "model.f_enabled", cfg.model.f_enabled);

  const SigmaForm form = parse_sigma_form(get<std::string>(tree, "sigma.form", to_string(cfg.model.sigma.form())));
  const double c0 = get(tree, "sigma.c0", cfg.model.sigma.c0());
  const double beta = get(tree, "sigma.beta", form == SigmaForm::power ? cfg.model.sigma.beta() : 0.0);
  const double q = get(tree, "sigma.q", form == SigmaForm::power ? cfg.model.sigma.q() : 0.0);
  cfg.model.sigma = SigmaSpec::make(form, c0, beta, q);

  const std::string kind = get<std::string>(tree, "initial.kind", "cosine");
  if (kind == "cosine") {
    cfg.initial = InitialKind::cosine;
  } else if (kind == "zero") {
    cfg.initial = InitialKind::zero;
  } else if (kind == "file") {
    cfg.initial = InitialKind::file;
    cfg.initial_path = get<std::string>(tree, "initial.path", "");
    if (cfg.initial_path.empty()) throw ConfigError("initial kind 'file' needs a path");
    std::filesystem::path p(cfg.initial_path);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    cfg.initial_samples = read_samples(p.string());
  } else {
    throw ConfigError("unknown initial condition kind '" + kind + "' (expected cosine, zero or file)");
  }

  cfg.master_seed = get(tree, "seeds.master", cfg.master_seed);
  cfg.replicates = get(tree, "seeds.replicates", cfg.replicates);

  const std::string scheme = get<std::string>(tree, "solver.scheme", "step");
  if (scheme == "step") {
    cfg.scheme = Scheme::step;
  } else if (scheme == "picard") {
    cfg.scheme = Scheme::picard;
  } else {
    throw ConfigError("unknown solver scheme '" + scheme + "' (expected step or picard)");
  }
  cfg.tol = get(tree, "solver.tol", cfg.tol);
  cfg.max_iter = get(tree, "solver.max_iter", cfg.max_iter);

  cfg.x_star = get(tree, "observation.x_star", cfg.x_star);
  cfg.t_obs = get_list(tree, "observation.t_obs", cfg.t_obs);
  cfg.eps = get_list(tree, "observation.eps", cfg.eps);
  cfg.thresholds = get_list(tree, "observation.thresholds", cfg.thresholds);
  cfg.levels = get_list(tree, "observation.levels", cfg.levels);
  cfg.moment_p = get(tree, "observation.moment_p", cfg.moment_p);

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(in, dir.empty() ? "." : dir.string());
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.validate();
  return cfg;
}

}  // namespace chlab
