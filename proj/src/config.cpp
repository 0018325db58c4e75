#include "sczm/config.hpp"

#include <algorithm>
#include <sstream>

#include "sczm/errors.hpp"
#include "sczm/grains.hpp"
#include "sczm/io_util.hpp"
#include "sczm/surrogate.hpp"

namespace sczm {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (cfg.index_.count(key))
      throw ConfigError("duplicate key '" + key + "'");
    cfg.index_[key] = static_cast<int>(cfg.entries_.size());
    cfg.entries_.emplace_back(key, value);
  }
  cfg.consumed_.assign(cfg.entries_.size(), false);
  return cfg;
}

Config Config::parse_file(const std::string& path) { return parse(read_text_file(path)); }

bool Config::has(const std::string& key) const { return index_.count(key) > 0; }

std::string Config::raw(const std::string& key) {
  const auto it = index_.find(key);
  if (it == index_.end()) throw ConfigError("missing required key '" + key + "'");
  consumed_[it->second] = true;
  return entries_[it->second].second;
}

std::string Config::get_string(const std::string& key) { return raw(key); }

double Config::get_double(const std::string& key) {
  const std::string v = raw(key);
  size_t pos = 0;
  double d;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError("key '" + key + "': trailing characters in '" + v + "'");
  return d;
}

int Config::get_int(const std::string& key) {
  const double d = get_double(key);
  const int i = static_cast<int>(d);
  if (d != i) throw ConfigError("key '" + key + "': expected an integer");
  return i;
}

bool Config::get_bool(const std::string& key) {
  const std::string v = raw(key);
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

std::string Config::get_string_or(const std::string& key, const std::string& fallback) {
  return has(key) ? get_string(key) : fallback;
}
double Config::get_double_or(const std::string& key, double fallback) {
  return has(key) ? get_double(key) : fallback;
}
int Config::get_int_or(const std::string& key, int fallback) {
  return has(key) ? get_int(key) : fallback;
}
bool Config::get_bool_or(const std::string& key, bool fallback) {
  return has(key) ? get_bool(key) : fallback;
}

std::vector<std::string> Config::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  const std::string p = prefix + ".";
  for (const auto& [key, value] : entries_)
    if (key.rfind(p, 0) == 0) out.push_back(key);
  return out;
}

void Config::reject_unconsumed() const {
  for (size_t i = 0; i < entries_.size(); ++i)
    if (!consumed_[i]) throw ConfigError("unknown key '" + entries_[i].first + "'");
}

Schedule parse_schedule(const std::string& text) {
  Schedule s;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("bad schedule entry '" + item + "'; expected t:value");
    try {
      s.points.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw ConfigError("bad schedule entry '" + item + "'");
    }
  }
  s.validate();
  return s;
}

namespace {

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

Rect parse_bounds(const std::string& text) {
  std::istringstream in(text);
  Rect r{};
  if (!(in >> r.xmin >> r.ymin >> r.xmax >> r.ymax))
    throw ConfigError("mesh.bounds expects: xmin ymin xmax ymax");
  return r;
}

TslModel parse_tsl(Config& cfg) {
  const std::string kind = cfg.get_string("tsl.kind");
  TslModel tsl;
  if (kind == "linear") {
    tsl = LinearTsl{cfg.get_double_or("tsl.k", 1.0)};
  } else if (kind == "exponential") {
    ExponentialTsl m;
    m.Gc = cfg.get_double("tsl.Gc");
    m.delta0 = cfg.get_double("tsl.delta0");
    m.beta = cfg.get_double_or("tsl.beta", 0.0);
    tsl = m;
  } else if (kind == "bilinear") {
    BilinearMixedModeTsl m;
    m.K = cfg.get_double("tsl.K");
    m.GIc = cfg.get_double("tsl.GIc");
    m.GIIc = cfg.get_double("tsl.GIIc");
    m.N = cfg.get_double("tsl.N");
    m.S = cfg.get_double("tsl.S");
    m.eta = cfg.get_double("tsl.eta");
    m.mu = cfg.get_double_or("tsl.mu", 0.0);
    tsl = m;
  } else {
    throw ConfigError("tsl.kind must be linear, exponential or bilinear");
  }
  validate(tsl);
  return tsl;
}

}  // namespace

SolveSetup build_solve_setup(Config& cfg) {
  SolveSetup setup;
  Problem& p = setup.problem;

  // mesh
  const std::string mesh_kind = cfg.get_string("mesh.kind");
  Mesh base;
  if (mesh_kind == "file") {
    base = read_mesh(cfg.get_string("mesh.path"));
  } else {
    const Rect bounds = parse_bounds(cfg.get_string("mesh.bounds"));
    const int nx = cfg.get_int("mesh.nx");
    const int ny = cfg.get_int("mesh.ny");
    if (mesh_kind == "quad")
      base = build_structured_quad(nx, ny, bounds);
    else if (mesh_kind == "crossed_tri")
      base = build_crossed_tri(nx, ny, bounds);
    else
      throw ConfigError("mesh.kind must be quad, crossed_tri or file");
  }

  // interface
  const std::string iface_kind = cfg.get_string("interface.kind");
  if (iface_kind == "segment" || iface_kind == "grains") {
    GrainSet grains;
    if (iface_kind == "segment") {
      std::istringstream in(cfg.get_string("interface.segment"));
      Segment2 seg;
      if (!(in >> seg.a.x() >> seg.a.y() >> seg.b.x() >> seg.b.y()))
        throw ConfigError("interface.segment expects: x0 y0 x1 y1");
      double xmin = base.nodes[0].x(), xmax = xmin, ymin = base.nodes[0].y(), ymax = ymin;
      for (const Vec2& nd : base.nodes) {
        xmin = std::min(xmin, nd.x());
        xmax = std::max(xmax, nd.x());
        ymin = std::min(ymin, nd.y());
        ymax = std::max(ymax, nd.y());
      }
      grains = half_plane_grains(seg, Rect{xmin, ymin, xmax, ymax});
    } else {
      grains = read_grains(cfg.get_string("grains.path"));
    }
    base.region_id = assign_grain_ids(base, grains);
    const SurrogateInterface si = build_surrogate_interface(base, grains, base.region_id);
    std::vector<Facet> iface;
    for (const Facet& f : interior_facets(base))
      if (base.region_id[f.minus_element] != base.region_id[f.plus_element]) iface.push_back(f);
    SplitMesh split = split_along_facets(base, iface);
    p.mesh = std::move(split.mesh);
    p.cohesive = cohesive_from_surrogate(si);
  } else if (iface_kind == "fitted_split") {
    std::istringstream in(cfg.get_string("interface.segment"));
    Segment2 seg;
    if (!(in >> seg.a.x() >> seg.a.y() >> seg.b.x() >> seg.b.y()))
      throw ConfigError("interface.segment expects: x0 y0 x1 y1");
    SplitMesh split = split_fitted_interface(base, seg);
    p.mesh = std::move(split.mesh);
    p.cohesive = cohesive_from_seams(split.seams);
  } else if (iface_kind == "none") {
    p.mesh = std::move(base);
  } else {
    throw ConfigError("interface.kind must be segment, grains, fitted_split or none");
  }

  // materials, keyed material.<region>.E / .nu
  for (const std::string& key : cfg.keys_with_prefix("material")) {
    std::istringstream in(key);
    std::string word;
    std::getline(in, word, '.');
    std::getline(in, word, '.');
    const int region = std::stoi(word);
    if (!p.materials.count(region))
      p.materials[region] = ElasticMaterial(cfg.get_double("material." + word + ".E"),
                                            cfg.get_double("material." + word + ".nu"));
  }
  if (p.materials.empty()) throw ConfigError("no material blocks configured");

  p.tsl = parse_tsl(cfg);

  // solver block
  p.config.dt = cfg.get_double("solver.dt");
  p.config.t_end = cfg.get_double("solver.t_end");
  p.config.newton_rel_tol = cfg.get_double_or("solver.newton_rel_tol", 1e-10);
  p.config.newton_abs_tol = cfg.get_double_or("solver.newton_abs_tol", 1e-12);
  p.config.max_newton_iters = cfg.get_int_or("solver.max_newton_iters", 25);
  p.config.use_shifted_jump = cfg.get_bool_or("solver.use_shifted_jump", true);
  p.config.use_area_factor = cfg.get_bool_or("solver.use_area_factor", true);
  p.config.use_directional_correction = cfg.get_bool_or("solver.use_directional_correction", true);
  p.config.validate();

  // boundary conditions: bc.<tag>.<ux|uy|tx|ty> = schedule
  for (const std::string& key : cfg.keys_with_prefix("bc")) {
    std::istringstream in(key);
    std::string word, tag, comp;
    std::getline(in, word, '.');
    std::getline(in, tag, '.');
    std::getline(in, comp, '.');
    const Schedule sched = parse_schedule(cfg.get_string(key));
    if (sched.t_max() < p.config.t_end)
      throw ConfigError("key '" + key + "': schedule ends before solver.t_end");
    auto value = [sched](const Vec2&, int, double t) { return sched(t); };
    if (comp == "ux" || comp == "uy")
      p.dirichlet.push_back({tag, comp == "ux" ? 0 : 1, value});
    else if (comp == "tx" || comp == "ty")
      p.neumann.push_back({tag, comp == "tx" ? 0 : 1, value});
    else
      throw ConfigError("key '" + key + "': component must be ux, uy, tx or ty");
  }

  p.monitor_tag = cfg.get_string_or("monitor.boundary", "right");
  p.monitor_component = cfg.get_int_or("monitor.component", 0);
  setup.output_dir = cfg.get_string_or("output.dir", ".");
  if (cfg.has("output.fields"))
    setup.field_output_times = parse_number_list(cfg.get_string("output.fields"));

  cfg.reject_unconsumed();
  return setup;
}

}  // namespace sczm
