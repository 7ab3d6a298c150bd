#include "visaddle/config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>

#include <Eigen/LU>

namespace visaddle {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double parse_double(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  require(!t.empty(), where + ": expected a real number, got an empty value");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  require(end == t.c_str() + t.size(),
          where + ": expected a real number, got '" + t + "'");
  return v;
}

long long parse_int(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  require(!t.empty(), where + ": expected an integer, got an empty value");
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  require(end == t.c_str() + t.size(),
          where + ": expected an integer, got '" + t + "'");
  return v;
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct KV {
  std::string value;
  int line = 0;
  mutable bool used = false;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, KV> entries;

  const KV* find(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }
  std::string where(const std::string& key) const {
    auto it = entries.find(key);
    const int line_no = it == entries.end() ? line : it->second.line;
    return "config line " + std::to_string(line_no) + ": [" + name + "] " + key;
  }

  std::string get_string(const std::string& key, const std::string& dflt) const {
    const KV* kv = find(key);
    return kv ? kv->value : dflt;
  }
  double get_double(const std::string& key, double dflt) const {
    const KV* kv = find(key);
    return kv ? parse_double(kv->value, where(key)) : dflt;
  }
  long long get_int(const std::string& key, long long dflt) const {
    const KV* kv = find(key);
    return kv ? parse_int(kv->value, where(key)) : dflt;
  }
  std::vector<double> get_list(const std::string& key) const {
    const KV* kv = find(key);
    std::vector<double> out;
    if (!kv) return out;
    for (const auto& item : split(kv->value, ','))
      out.push_back(parse_double(item, where(key)));
    return out;
  }
  void check_all_used(std::vector<std::string>& errors) const {
    for (const auto& [key, kv] : entries)
      if (!kv.used)
        errors.push_back("config line " + std::to_string(kv.line) +
                         ": unknown key '" + key + "' in [" + name + "]");
  }
};

struct RawConfig {
  std::map<std::string, Section> singles;
  std::vector<Section> solvers;
};

RawConfig parse_sections(const std::string& text) {
  static const std::vector<std::string> known = {"problem", "penalty", "solver",
                                                 "sweep",   "output",  "constants"};
  RawConfig raw;
  Section* current = nullptr;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      require(t.back() == ']', "config line " + std::to_string(lineno) +
                                   ": unterminated section header '" + t + "'");
      const std::string name = trim(t.substr(1, t.size() - 2));
      bool ok = false;
      for (const auto& k : known) ok = ok || k == name;
      require(ok, "config line " + std::to_string(lineno) + ": unknown section [" +
                      name + "]");
      if (name == "solver") {
        raw.solvers.push_back(Section{name, lineno, {}});
        current = &raw.solvers.back();
      } else {
        require(!raw.singles.count(name), "config line " + std::to_string(lineno) +
                                              ": duplicate section [" + name + "]");
        current = &raw.singles.emplace(name, Section{name, lineno, {}}).first->second;
      }
      continue;
    }
    const auto eq = t.find('=');
    require(eq != std::string::npos, "config line " + std::to_string(lineno) +
                                         ": expected 'key = value', got '" + t + "'");
    require(current != nullptr, "config line " + std::to_string(lineno) +
                                    ": key outside any [section]");
    const std::string key = trim(t.substr(0, eq));
    require(!key.empty(), "config line " + std::to_string(lineno) + ": empty key");
    const std::string value = trim(t.substr(eq + 1));
    require(!current->entries.count(key),
            "config line " + std::to_string(lineno) + ": duplicate key '" + key +
                "' in [" + current->name + "]");
    current->entries[key] = KV{value, lineno};
  }
  return raw;
}

Matrix parse_matrix(const std::string& text, const std::string& where) {
  const auto rows = split(text, ';');
  require(!rows.empty(), where + ": empty matrix");
  std::vector<std::vector<double>> vals;
  for (const auto& row : rows) {
    std::vector<double> r;
    for (const auto& item : split(row, ',')) r.push_back(parse_double(item, where));
    require(vals.empty() || vals.front().size() == r.size(),
            where + ": ragged matrix rows");
    vals.push_back(std::move(r));
  }
  Matrix M(vals.size(), vals.front().size());
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) M(i, j) = vals[i][j];
  return M;
}

}  // namespace

ConvexSet SetSpec::build(Index dim) const {
  switch (kind) {
    case Kind::all: return ConvexSet::whole_space();
    case Kind::box:
      return ConvexSet::box(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
    case Kind::ball: return ConvexSet::ball(Vector::Zero(dim), radius);
  }
  throw ConfigError("set spec: unknown kind");
}

std::string SetSpec::str() const {
  switch (kind) {
    case Kind::all: return "all";
    case Kind::box: return "box:" + fmt_num(lo) + ":" + fmt_num(hi);
    case Kind::ball: return "ball:" + fmt_num(radius);
  }
  return "?";
}

SetSpec SetSpec::parse(const std::string& text, const std::string& where) {
  const auto parts = split(text, ':');
  SetSpec s;
  if (parts.size() == 1 && parts[0] == "all") return s;
  if (parts.size() == 3 && parts[0] == "box") {
    s.kind = Kind::box;
    s.lo = parse_double(parts[1], where);
    s.hi = parse_double(parts[2], where);
    require(s.lo <= s.hi, where + ": box requires lo <= hi");
    return s;
  }
  if (parts.size() == 2 && parts[0] == "ball") {
    s.kind = Kind::ball;
    s.radius = parse_double(parts[1], where);
    require(s.radius > 0, where + ": ball requires radius > 0");
    return s;
  }
  throw ConfigError(where + ": expected 'all', 'box:<lo>:<hi>' or 'ball:<r>', got '" +
                    text + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  const RawConfig raw = parse_sections(text);
  ExperimentConfig cfg;
  std::vector<std::string> errors;

  if (auto it = raw.singles.find("problem"); it != raw.singles.end()) {
    const Section& s = it->second;
    ProblemConfig& p = cfg.problem;
    p.kind = s.get_string("kind", p.kind);
    p.a = s.get_double("a", p.a);
    if (const KV* kv = s.find("m")) p.affine_m = parse_matrix(kv->value, s.where("m"));
    if (const KV* kv = s.find("c")) {
      const Matrix cm = parse_matrix(kv->value, s.where("c"));
      require(cm.rows() == 1 || cm.cols() == 1, s.where("c") + ": expected a vector");
      p.affine_c = cm.rows() == 1 ? Vector(cm.transpose().col(0)) : Vector(cm.col(0));
    }
    p.affine_d_theta = s.get_int("d_theta", p.affine_d_theta);
    p.features = s.get_string("features", p.features);
    p.link = s.get_string("link", p.link);
    p.d_x = s.get_int("d_x", p.d_x);
    p.d_z = s.get_int("d_z", p.d_z);
    p.d_phi = s.get_int("d_phi", p.d_phi);
    p.n_real = s.get_int("n_real", p.n_real);
    p.n_latent = s.get_int("n_latent", p.n_latent);
    p.samples = s.get_string("samples", p.samples);
    p.mu_theta = s.get_double("mu_theta", p.mu_theta);
    p.mu_phi = s.get_double("mu_phi", p.mu_phi);
    if (s.find("theta0")) p.theta0 = s.get_list("theta0");
    if (s.find("phi0")) p.phi0 = s.get_list("phi0");
    if (const KV* kv = s.find("theta_set"))
      p.theta_set = SetSpec::parse(kv->value, s.where("theta_set"));
    if (const KV* kv = s.find("phi_set"))
      p.phi_set = SetSpec::parse(kv->value, s.where("phi_set"));
    s.check_all_used(errors);
  }

  if (auto it = raw.singles.find("penalty"); it != raw.singles.end()) {
    const Section& s = it->second;
    const std::string kind = s.get_string("kind", "none");
    const auto parsed = penalty_from_name(kind);
    if (!parsed)
      errors.push_back(s.where("kind") +
                       ": must be one of none, tik_disc, tik_full, sgp");
    else
      cfg.penalty.kind = *parsed;
    cfg.penalty.gamma = s.get_double("gamma", 0.0);
    if (s.find("tau")) cfg.penalty.tau = s.get_double("tau", 0.0);
    s.check_all_used(errors);
  }

  for (const Section& s : raw.solvers) {
    SolverEntry e;
    e.method = s.get_string("method", e.method);
    if (const KV* kv = s.find("eta")) {
      if (kv->value != "auto") e.eta = parse_double(kv->value, s.where("eta"));
    }
    e.rho = s.get_double("rho", e.rho);
    e.eftp_rule = s.get_string("eftp_rule", e.eftp_rule);
    e.max_iter = static_cast<int>(s.get_int("max_iter", e.max_iter));
    e.tol = s.get_double("tol", e.tol);
    e.record_every = static_cast<int>(s.get_int("record_every", e.record_every));
    s.check_all_used(errors);
    cfg.solvers.push_back(std::move(e));
  }

  if (auto it = raw.singles.find("sweep"); it != raw.singles.end()) {
    const Section& s = it->second;
    cfg.sweep.gammas = s.get_list("gammas");
    if (const KV* kv = s.find("etas")) {
      for (const auto& item : split(kv->value, ',')) {
        if (item == "auto")
          cfg.sweep.etas.push_back(std::nullopt);
        else
          cfg.sweep.etas.push_back(parse_double(item, s.where("etas")));
      }
    }
    s.check_all_used(errors);
  }

  if (auto it = raw.singles.find("output"); it != raw.singles.end()) {
    const Section& s = it->second;
    OutputConfig& o = cfg.output;
    o.dir = s.get_string("dir", o.dir);
    o.prefix = s.get_string("prefix", o.prefix);
    o.seed = static_cast<std::uint64_t>(s.get_int("seed", o.seed));
    o.workers = static_cast<int>(s.get_int("workers", o.workers));
    o.plot = s.get_string("plot", o.plot);
    s.check_all_used(errors);
  }

  if (auto it = raw.singles.find("constants"); it != raw.singles.end()) {
    const Section& s = it->second;
    cfg.constants.n_samples = static_cast<int>(s.get_int("n_samples", 200));
    cfg.constants.half_width = s.get_double("half_width", 5.0);
    s.check_all_used(errors);
  }

  if (!errors.empty()) {
    std::string joined;
    for (const auto& e : errors) joined += (joined.empty() ? "" : "\n") + e;
    throw ConfigError(joined);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  const ProblemConfig& p = cfg.problem;
  os << "[problem]\n";
  os << "kind = " << p.kind << "\n";
  if (p.kind == "bilinear") os << "a = " << fmt_num(p.a) << "\n";
  if (p.kind == "affine") {
    os << "m = ";
    for (Index i = 0; i < p.affine_m.rows(); ++i) {
      if (i) os << "; ";
      for (Index j = 0; j < p.affine_m.cols(); ++j)
        os << (j ? ", " : "") << fmt_num(p.affine_m(i, j));
    }
    os << "\n" << "c = ";
    for (Index i = 0; i < p.affine_c.size(); ++i)
      os << (i ? ", " : "") << fmt_num(p.affine_c(i));
    os << "\n" << "d_theta = " << p.affine_d_theta << "\n";
  }
  if (p.kind == "gan") {
    os << "features = " << p.features << "\n"
       << "link = " << p.link << "\n"
       << "d_x = " << p.d_x << "\n"
       << "d_z = " << p.d_z << "\n"
       << "d_phi = " << p.d_phi << "\n"
       << "n_real = " << p.n_real << "\n"
       << "n_latent = " << p.n_latent << "\n"
       << "samples = " << p.samples << "\n";
    if (p.samples == "toy") os << "a = " << fmt_num(p.a) << "\n";
  }
  os << "mu_theta = " << fmt_num(p.mu_theta) << "\n";
  os << "mu_phi = " << fmt_num(p.mu_phi) << "\n";
  if (!p.theta0.empty()) {
    os << "theta0 = ";
    for (std::size_t i = 0; i < p.theta0.size(); ++i)
      os << (i ? ", " : "") << fmt_num(p.theta0[i]);
    os << "\n";
  }
  if (!p.phi0.empty()) {
    os << "phi0 = ";
    for (std::size_t i = 0; i < p.phi0.size(); ++i)
      os << (i ? ", " : "") << fmt_num(p.phi0[i]);
    os << "\n";
  }
  os << "theta_set = " << p.theta_set.str() << "\n";
  os << "phi_set = " << p.phi_set.str() << "\n";

  os << "\n[penalty]\n";
  os << "kind = " << penalty_name(cfg.penalty.kind) << "\n";
  os << "gamma = " << fmt_num(cfg.penalty.gamma) << "\n";
  if (cfg.penalty.tau) os << "tau = " << fmt_num(*cfg.penalty.tau) << "\n";

  for (const SolverEntry& e : cfg.solvers) {
    os << "\n[solver]\n";
    os << "method = " << e.method << "\n";
    os << "eta = " << (e.eta ? fmt_num(*e.eta) : std::string("auto")) << "\n";
    os << "rho = " << fmt_num(e.rho) << "\n";
    os << "eftp_rule = " << e.eftp_rule << "\n";
    os << "max_iter = " << e.max_iter << "\n";
    os << "tol = " << fmt_num(e.tol) << "\n";
    os << "record_every = " << e.record_every << "\n";
  }

  if (!cfg.sweep.gammas.empty() || !cfg.sweep.etas.empty()) {
    os << "\n[sweep]\n";
    if (!cfg.sweep.gammas.empty()) {
      os << "gammas = ";
      for (std::size_t i = 0; i < cfg.sweep.gammas.size(); ++i)
        os << (i ? ", " : "") << fmt_num(cfg.sweep.gammas[i]);
      os << "\n";
    }
    if (!cfg.sweep.etas.empty()) {
      os << "etas = ";
      for (std::size_t i = 0; i < cfg.sweep.etas.size(); ++i)
        os << (i ? ", " : "")
           << (cfg.sweep.etas[i] ? fmt_num(*cfg.sweep.etas[i]) : std::string("auto"));
      os << "\n";
    }
  }

  os << "\n[output]\n";
  os << "dir = " << cfg.output.dir << "\n";
  os << "prefix = " << cfg.output.prefix << "\n";
  os << "seed = " << cfg.output.seed << "\n";
  os << "workers = " << cfg.output.workers << "\n";
  os << "plot = " << cfg.output.plot << "\n";

  os << "\n[constants]\n";
  os << "n_samples = " << cfg.constants.n_samples << "\n";
  os << "half_width = " << fmt_num(cfg.constants.half_width) << "\n";
  return os.str();
}

namespace {

bool is_one_of(const std::string& v, std::initializer_list<const char*> opts) {
  for (const char* o : opts)
    if (v == o) return true;
  return false;
}

}  // namespace

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  const ProblemConfig& p = cfg.problem;

  Index d_theta = 0, d_phi = 0;
  if (!is_one_of(p.kind, {"bilinear", "affine", "gan"})) {
    errors.push_back("[problem] kind must be one of bilinear, affine, gan");
  } else if (p.kind == "bilinear") {
    if (!(p.a > 0)) errors.push_back("[problem] a must be > 0");
    d_theta = d_phi = 1;
  } else if (p.kind == "affine") {
    if (p.affine_m.size() == 0) {
      errors.push_back("[problem] affine kind needs m = <matrix>");
    } else if (p.affine_m.rows() != p.affine_m.cols()) {
      errors.push_back("[problem] m must be square");
    } else {
      if (p.affine_c.size() != 0 && p.affine_c.size() != p.affine_m.rows())
        errors.push_back("[problem] c length must match m");
      if (!(p.affine_d_theta >= 1 && p.affine_d_theta < p.affine_m.rows()))
        errors.push_back("[problem] d_theta must split the affine dimension");
      d_theta = p.affine_d_theta;
      d_phi = p.affine_m.rows() - d_theta;
    }
  } else {  // gan
    if (!is_one_of(p.features, {"identity", "tanh"}))
      errors.push_back("[problem] features must be identity or tanh");
    if (!is_one_of(p.link, {"linear", "softplus"}))
      errors.push_back("[problem] link must be linear or softplus");
    if (p.d_x < 1 || p.d_z < 1 || p.d_phi < 1)
      errors.push_back("[problem] gan dimensions must be >= 1");
    if (p.features == "identity" && p.d_phi != p.d_x)
      errors.push_back("[problem] identity features require d_phi = d_x");
    if (p.n_real < 1 || p.n_latent < 1)
      errors.push_back("[problem] sample counts must be >= 1");
    if (!is_one_of(p.samples, {"gaussian", "toy"})) {
      errors.push_back("[problem] samples must be gaussian or toy");
    } else if (p.samples == "toy" &&
               (p.d_x != 1 || p.d_z != 1 || p.features != "identity" ||
                p.link != "linear")) {
      errors.push_back(
          "[problem] samples = toy expects d_x = d_z = 1, identity features "
          "and the linear link (the bilinear-equivalent instance)");
    }
    d_theta = p.d_x * p.d_z + p.d_x;
    d_phi = p.d_phi;
  }

  if (p.mu_theta < 0) errors.push_back("[problem] mu_theta must be >= 0");
  if (p.mu_phi < 0) errors.push_back("[problem] mu_phi must be >= 0");
  if (!p.theta0.empty() && d_theta > 0 &&
      p.theta0.size() != static_cast<std::size_t>(d_theta))
    errors.push_back("[problem] theta0 must have " + std::to_string(d_theta) +
                     " entries for this problem");
  if (!p.phi0.empty() && d_phi > 0 &&
      p.phi0.size() != static_cast<std::size_t>(d_phi))
    errors.push_back("[problem] phi0 must have " + std::to_string(d_phi) +
                     " entries for this problem");

  if (cfg.penalty.gamma < 0) errors.push_back("[penalty] gamma must be >= 0");
  if (cfg.penalty.tau) {
    if (cfg.penalty.kind != PenaltyKind::tik_full)
      errors.push_back("[penalty] tau only applies to kind = tik_full");
    else if (*cfg.penalty.tau < 0)
      errors.push_back("[penalty] tau must be >= 0");
    else if (cfg.penalty.gamma == 0 && *cfg.penalty.tau != 0)
      errors.push_back(
          "[penalty] tik_full with gamma = 0 disables the penalty; tau needs "
          "gamma > 0");
  }
  if (cfg.penalty.kind == PenaltyKind::sgp && p.kind != "gan")
    errors.push_back(
        "[penalty] kind = sgp needs a model-backed problem; for the bilinear "
        "toy use kind = gan with samples = toy, features = identity, "
        "link = linear, which reproduces it exactly");

  if (cfg.solvers.empty())
    errors.push_back("at least one [solver] section is required");
  for (std::size_t i = 0; i < cfg.solvers.size(); ++i) {
    const SolverEntry& e = cfg.solvers[i];
    const std::string at = "[solver] #" + std::to_string(i + 1) + " ";
    if (!method_from_name(e.method))
      errors.push_back(at + "method must be fb, eg or eftp");
    if (e.eta && !(*e.eta > 0)) errors.push_back(at + "eta must be > 0");
    if (!(e.rho > 0 && e.rho <= 1)) errors.push_back(at + "rho must be in (0, 1]");
    if (!is_one_of(e.eftp_rule, {"quarter", "half"}))
      errors.push_back(at + "eftp_rule must be quarter or half");
    if (e.max_iter < 1) errors.push_back(at + "max_iter must be >= 1");
    if (!(e.tol > 0)) errors.push_back(at + "tol must be > 0");
    if (e.record_every < 1) errors.push_back(at + "record_every must be >= 1");
  }

  for (double g : cfg.sweep.gammas)
    if (g < 0) errors.push_back("[sweep] gammas must be >= 0");
  for (const auto& eta : cfg.sweep.etas)
    if (eta && !(*eta > 0)) errors.push_back("[sweep] etas must be > 0 or auto");

  if (!is_one_of(cfg.output.plot, {"trajectory", "residual_iter", "residual_evals"}))
    errors.push_back("[output] plot must be trajectory, residual_iter or residual_evals");
  if (cfg.output.workers < 0) errors.push_back("[output] workers must be >= 0");
  if (cfg.output.prefix.empty() ||
      cfg.output.prefix.find('/') != std::string::npos)
    errors.push_back("[output] prefix must be a bare file-name stem");
  if (cfg.constants.n_samples < 2)
    errors.push_back("[constants] n_samples must be >= 2");
  if (!(cfg.constants.half_width > 0))
    errors.push_back("[constants] half_width must be > 0");

  if (!errors.empty()) {
    std::string joined;
    for (const auto& e : errors) joined += (joined.empty() ? "" : "\n") + e;
    throw ConfigError(joined);
  }

  // mu is capped by the theta-side modulus, so fb + auto stepsize is doomed
  // whenever that cap is zero; flag it now, skip the cell at run time.
  const double mu_cap =
      cfg.penalty.kind == PenaltyKind::tik_full
          ? p.mu_theta + cfg.penalty.tau.value_or(cfg.penalty.gamma)
          : p.mu_theta;
  const bool sweep_has_auto_eta =
      cfg.sweep.etas.empty()
          ? false
          : std::any_of(cfg.sweep.etas.begin(), cfg.sweep.etas.end(),
                        [](const auto& e) { return !e.has_value(); });
  for (std::size_t i = 0; i < cfg.solvers.size(); ++i) {
    const SolverEntry& e = cfg.solvers[i];
    const bool any_auto = cfg.sweep.etas.empty() ? !e.eta : sweep_has_auto_eta;
    if (e.method == "fb" && any_auto && mu_cap <= 0)
      warnings.push_back("[solver] #" + std::to_string(i + 1) +
                         ": fb with an auto stepsize needs mu > 0, but the "
                         "declared moduli give mu = 0; the cell will be "
                         "skipped at run time");
  }
  return warnings;
}

SaddleOperator build_operator(const ProblemConfig& p, std::uint64_t seed) {
  if (p.kind == "bilinear") return SaddleOperator::bilinear(p.a);
  if (p.kind == "affine") {
    Vector c = p.affine_c.size() ? p.affine_c : Vector(Vector::Zero(p.affine_m.rows()));
    return SaddleOperator::affine(p.affine_m, c, p.affine_d_theta);
  }
  require(p.kind == "gan", "problem kind must be bilinear, affine or gan");
  FeatureMap psi = p.features == "identity"
                       ? FeatureMap::identity(p.d_x)
                       : FeatureMap::tanh_features(p.d_x, p.d_phi, seed + 1);
  SampleSet samples = p.samples == "toy"
                          ? SampleSet::bilinear_toy(p.a)
                          : SampleSet::gaussian(p.d_x, p.d_z, p.n_real, p.n_latent, seed);
  const Link link = p.link == "linear" ? Link::linear : Link::softplus_log;
  return SaddleOperator::gan(Discriminator(std::move(psi)), Generator(p.d_x, p.d_z),
                             std::move(samples), link);
}

FeasibleSet build_feasible_set(const ProblemConfig& p, const SaddleOperator& F) {
  FeasibleSet S;
  S.theta_set = p.theta_set.build(F.d_theta());
  S.phi_set = p.phi_set.build(F.d_phi());
  return S;
}

ParameterPoint build_start(const ProblemConfig& p, const SaddleOperator& F) {
  Vector theta = Vector::Ones(F.d_theta());
  Vector phi = Vector::Ones(F.d_phi());
  if (!p.theta0.empty())
    theta = Eigen::Map<const Vector>(p.theta0.data(), p.theta0.size());
  if (!p.phi0.empty()) phi = Eigen::Map<const Vector>(p.phi0.data(), p.phi0.size());
  return {std::move(theta), std::move(phi)};
}

std::optional<ParameterPoint> known_solution(const ProblemConfig& p,
                                             const SaddleOperator& F,
                                             const PenaltyConfig& penalty) {
  if (p.kind == "bilinear") {
    // every penalty in the menu vanishes with zero gradient at the origin
    return ParameterPoint{Vector::Zero(1), Vector::Zero(1)};
  }
  if (p.kind == "affine") {
    // Solve (M + diag penalty curvature) w = -c on the whole space.
    if (p.theta_set.kind != SetSpec::Kind::all || p.phi_set.kind != SetSpec::Kind::all)
      return std::nullopt;
    Matrix Mg = F.affine_matrix();
    const Index dt = F.d_theta();
    if (penalty.active()) {
      if (penalty.kind == PenaltyKind::tik_disc || penalty.kind == PenaltyKind::tik_full)
        Mg.diagonal().tail(F.d_phi()).array() += penalty.gamma;
      if (penalty.kind == PenaltyKind::tik_full)
        Mg.diagonal().head(dt).array() += penalty.tau_or_default();
    }
    const Eigen::FullPivLU<Matrix> lu(Mg);
    if (!lu.isInvertible()) return std::nullopt;
    const Vector w = lu.solve(-F.affine_offset());
    return ParameterPoint::from_joint(w, dt);
  }
  return std::nullopt;
}

}  // namespace visaddle
