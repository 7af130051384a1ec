#include "app/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "amlnewton/error.hpp"

namespace amln::app {

namespace {

using boost::property_tree::ptree;

// Reads typed values out of one section and remembers which keys were used,
// so leftovers can be reported as unknown.
class Section {
 public:
  Section(const ptree& tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    const auto it = tree_.find(key);
    if (it == tree_.not_found()) return std::nullopt;
    return it->second.data();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    return raw(key).value_or(fallback);
  }

  double real(const std::string& key, double fallback) {
    const auto v = raw(key);
    return v ? to_real(key, *v) : fallback;
  }

  std::optional<double> optional_real(const std::string& key) {
    const auto v = raw(key);
    if (!v) return std::nullopt;
    return to_real(key, *v);
  }

  long long integer(const std::string& key, long long fallback) {
    const auto v = raw(key);
    return v ? to_integer(key, *v) : fallback;
  }

  std::optional<long long> optional_integer(const std::string& key) {
    const auto v = raw(key);
    if (!v) return std::nullopt;
    return to_integer(key, *v);
  }

  bool boolean(const std::string& key, bool fallback) {
    const auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1" || *v == "on") return true;
    if (*v == "false" || *v == "no" || *v == "0" || *v == "off") return false;
    fail(key, "expected a boolean, got '" + *v + "'");
  }

  std::vector<double> reals(const std::string& key) {
    std::vector<double> out;
    const auto v = raw(key);
    if (!v) return out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      if (!item.empty()) out.push_back(to_real(key, item));
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : tree_) {
      if (!value.empty()) continue;  // nested sections are handled elsewhere
      if (!used_.count(key)) fail(key, "unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(qualified(key) + ": " + what);
  }

  std::string qualified(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

 private:
  double to_real(const std::string& key, const std::string& s) const {
    double v = 0.0;
    const char* begin = s.data() + (!s.empty() && s.front() == '+');
    const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail(key, "expected a number, got '" + s + "'");
    return v;
  }

  long long to_integer(const std::string& key, const std::string& s) const {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      fail(key, "expected an integer, got '" + s + "'");
    }
    return v;
  }

  const ptree& tree_;
  std::string name_;
  std::set<std::string> used_;
};

HierarchyMode parse_mode(Section& s, const std::string& key, HierarchyMode fallback) {
  const auto v = s.raw(key);
  if (!v) return fallback;
  if (*v == "fixed") return HierarchyMode::Fixed;
  if (*v == "random") return HierarchyMode::PerIteration;
  s.fail(key, "expected 'fixed' or 'random', got '" + *v + "'");
}

SketchKind parse_sketch(Section& s, const std::string& key, SketchKind fallback) {
  const auto v = s.raw(key);
  if (!v) return fallback;
  if (*v == "rows") return SketchKind::RowSampling;
  if (*v == "gaussian") return SketchKind::Gaussian;
  s.fail(key, "expected 'rows' or 'gaussian', got '" + *v + "'");
}

void read_hierarchy(Section& s, HierarchySettings& h) {
  h.levels = static_cast<int>(s.integer("levels", h.levels));
  if (const auto g = s.raw("geometry")) {
    if (*g == "equidistant") {
      h.geometry = Geometry::Equidistant;
    } else if (*g == "span") {
      h.geometry = Geometry::Span;
    } else if (*g == "fractions") {
      h.geometry = Geometry::Fractions;
    } else {
      s.fail("geometry", "expected 'equidistant', 'span' or 'fractions', got '" + *g + "'");
    }
  }
  h.lo = s.real("lo", h.lo);
  h.hi = s.real("hi", h.hi);
  if (auto f = s.reals("fractions"); !f.empty()) {
    h.fractions = std::move(f);
    h.geometry = Geometry::Fractions;
  }
  h.mode = parse_mode(s, "mode", h.mode);
  h.sketch = parse_sketch(s, "sketch", h.sketch);
  h.permute = s.boolean("permute", h.permute);
  if (const auto r = s.optional_integer("coverage_r")) h.coverage_r = static_cast<int>(*r);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }

  ExperimentConfig cfg;
  HierarchySettings hierarchy;
  Section top(tree, "");
  cfg.loss = [&] {
    const std::string loss = top.text("loss", "logistic");
    if (loss != "logistic" && loss != "poisson") top.fail("loss", "expected 'logistic' or 'poisson'");
    return parse_loss(loss);
  }();
  cfg.reg.l1 = top.real("l1", 0.0);
  cfg.reg.l2 = top.real("l2", 0.0);
  cfg.reg.c = top.real("c", 1e-2);
  if (const auto x0 = top.raw("x0")) {
    if (*x0 == "zero") {
      cfg.x0 = InitKind::Zero;
    } else if (*x0 == "gaussian") {
      cfg.x0 = InitKind::Gaussian;
    } else {
      top.fail("x0", "expected 'zero' or 'gaussian'");
    }
  }
  if (const auto s = top.optional_integer("x0_seed")) cfg.x0_seed = static_cast<std::uint64_t>(*s);
  cfg.grad_tol = top.real("grad_tol", cfg.grad_tol);
  cfg.max_iters = static_cast<int>(top.integer("max_iters", cfg.max_iters));
  cfg.output_dir = resolve(base_dir, top.text("output_dir", "out"));
  cfg.seed = static_cast<std::uint64_t>(top.integer("seed", 0));

  std::vector<std::pair<std::string, const ptree*>> algorithm_sections;
  for (const auto& [name, child] : tree) {
    if (child.empty()) continue;
    if (name == "data") {
      Section s(child, "data");
      auto& src = cfg.source;
      const std::string kind = s.text("source", "generated");
      if (kind == "generated") {
        src.kind = DataSourceSpec::Kind::Generated;
      } else if (kind == "libsvm") {
        src.kind = DataSourceSpec::Kind::Libsvm;
      } else if (kind == "csv") {
        src.kind = DataSourceSpec::Kind::Csv;
      } else {
        s.fail("source", "expected 'generated', 'libsvm' or 'csv'");
      }
      if (const auto p = s.raw("path")) src.path = resolve(base_dir, *p);
      src.label_column = static_cast<int>(s.integer("label_column", 0));
      src.has_header = s.boolean("has_header", false);
      if (const auto nf = s.optional_integer("n_features")) src.n_features = static_cast<Index>(*nf);
      src.d = static_cast<Index>(s.integer("d", 0));
      src.n = static_cast<Index>(s.integer("n", 0));
      src.rank = static_cast<Index>(s.integer("rank", 10));
      if (const auto ds = s.optional_integer("seed")) src.seed = static_cast<std::uint64_t>(*ds);
      src.standardize = s.boolean("standardize", false);
      s.reject_unknown();
    } else if (name == "hierarchy") {
      Section s(child, "hierarchy");
      read_hierarchy(s, hierarchy);
      s.reject_unknown();
    } else if (name.rfind("algorithm", 0) == 0) {
      std::string algo = name.substr(std::string("algorithm").size());
      algo.erase(0, algo.find_first_not_of(" \t"));
      if (algo.empty()) throw ConfigError("[" + name + "]: algorithm sections need a name, e.g. [algorithm aml]");
      algorithm_sections.emplace_back(algo, &child);
    } else {
      throw ConfigError("[" + name + "]: unknown section");
    }
  }
  top.reject_unknown();

  for (const auto& [algo, child] : algorithm_sections) {
    Section s(*child, algo);
    AlgorithmSpec spec;
    spec.name = algo;
    spec.hierarchy = hierarchy;
    auto& solver = spec.solver;
    const auto type = s.raw("type");
    if (!type) s.fail("type", "missing (newton, gd, ml, aml, rsn)");
    try {
      solver.algorithm = parse_algorithm(*type);
    } catch (const Error&) {
      s.fail("type", "unknown algorithm '" + *type + "' (newton, gd, ml, aml, rsn)");
    }
    solver.sigma = s.real("sigma", solver.sigma);
    solver.gamma = s.real("gamma", solver.gamma);
    solver.epsilon = s.real("epsilon", solver.epsilon);
    solver.grad_tol = s.real("grad_tol", cfg.grad_tol);
    solver.max_iters = static_cast<int>(s.integer("max_iters", cfg.max_iters));
    solver.cholesky_jitter = s.real("jitter", solver.cholesky_jitter);
    solver.record_diagnostics = s.boolean("diagnostics", false);
    solver.line_search.c1 = s.real("c1", solver.line_search.c1);
    solver.line_search.backtrack = s.real("backtrack", solver.line_search.backtrack);
    solver.line_search.t0 = s.real("t0", solver.line_search.t0);
    solver.line_search.max_backtracks = static_cast<int>(s.integer("max_backtracks", 60));
    spec.hierarchy.mode = parse_mode(s, "mode", spec.hierarchy.mode);
    spec.hierarchy.permute = s.boolean("permute", spec.hierarchy.permute);
    spec.hierarchy.sketch = parse_sketch(s, "sketch", spec.hierarchy.sketch);
    solver.rsn_sketch = spec.hierarchy.sketch;
    if (const auto dim = s.optional_integer("rsn_dim")) solver.rsn_dim = static_cast<Index>(*dim);
    spec.rsn_fraction = s.real("rsn_fraction", spec.rsn_fraction);
    s.reject_unknown();
    cfg.algorithms.push_back(std::move(spec));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.algorithms.empty()) throw ConfigError("algorithms: at least one [algorithm NAME] section is required");
  const auto& src = cfg.source;
  if (src.kind == DataSourceSpec::Kind::Generated) {
    if (src.d < 1) throw ConfigError("data.d: must be >= 1");
    if (src.n < 1) throw ConfigError("data.n: must be >= 1");
    if (src.rank < 1 || src.rank > std::min(src.d, src.n)) throw ConfigError("data.rank: must lie in [1, min(d, n)]");
  } else if (src.path.empty()) {
    throw ConfigError("data.path: required for file sources");
  }
  if (!(cfg.reg.l1 >= 0.0)) throw ConfigError("l1: must be >= 0");
  if (!(cfg.reg.l2 >= 0.0)) throw ConfigError("l2: must be >= 0");
  if (!(cfg.reg.c > 0.0)) throw ConfigError("c: must be > 0");
  if (!(cfg.grad_tol > 0.0)) throw ConfigError("grad_tol: must be > 0");
  if (cfg.max_iters < 1) throw ConfigError("max_iters: must be >= 1");

  std::set<std::string> names;
  for (const auto& a : cfg.algorithms) {
    if (!names.insert(a.name).second) throw ConfigError(a.name + ": duplicate algorithm name");
    if (a.name.find_first_of("/\\") != std::string::npos) throw ConfigError(a.name + ": name must not contain '/'");
    const auto& s = a.solver;
    if (!(s.sigma > 0.0 && s.sigma <= 1.0)) throw ConfigError(a.name + ".sigma: must lie in (0, 1]");
    if (!(s.gamma > 0.0)) throw ConfigError(a.name + ".gamma: must be > 0");
    if (!(s.epsilon >= 0.0)) throw ConfigError(a.name + ".epsilon: must be >= 0");
    if (!(s.grad_tol > 0.0)) throw ConfigError(a.name + ".grad_tol: must be > 0");
    if (s.max_iters < 1) throw ConfigError(a.name + ".max_iters: must be >= 1");
    if (!(s.cholesky_jitter >= 0.0)) throw ConfigError(a.name + ".jitter: must be >= 0");
    if (!(s.line_search.c1 > 0.0 && s.line_search.c1 < 1.0)) throw ConfigError(a.name + ".c1: must lie in (0, 1)");
    if (!(s.line_search.backtrack > 0.0 && s.line_search.backtrack < 1.0)) {
      throw ConfigError(a.name + ".backtrack: must lie in (0, 1)");
    }
    if (!(s.line_search.t0 > 0.0)) throw ConfigError(a.name + ".t0: must be > 0");
    if (s.line_search.max_backtracks < 0) throw ConfigError(a.name + ".max_backtracks: must be >= 0");
    if (!(a.rsn_fraction > 0.0 && a.rsn_fraction <= 1.0)) throw ConfigError(a.name + ".rsn_fraction: must lie in (0, 1]");
    if (s.rsn_dim < 0) throw ConfigError(a.name + ".rsn_dim: must be >= 0");

    const auto& h = a.hierarchy;
    if (h.levels < 1) throw ConfigError("hierarchy.levels: must be >= 1");
    if (!(h.lo > 0.0 && h.lo < 1.0)) throw ConfigError("hierarchy.lo: must lie in (0, 1)");
    if (!(h.hi > 0.0 && h.hi < 1.0 && h.hi >= h.lo)) throw ConfigError("hierarchy.hi: must lie in [lo, 1)");
    for (std::size_t i = 0; i < h.fractions.size(); ++i) {
      if (!(h.fractions[i] > 0.0 && h.fractions[i] < 1.0) || (i > 0 && h.fractions[i] <= h.fractions[i - 1])) {
        throw ConfigError("hierarchy.fractions: must lie in (0, 1) and be strictly increasing");
      }
    }
    if (h.geometry == Geometry::Fractions && h.fractions.empty()) {
      throw ConfigError("hierarchy.fractions: required for geometry = fractions");
    }
    if (h.coverage_r && *h.coverage_r < 1) throw ConfigError("hierarchy.coverage_r: must be >= 1");
  }
}

}  // namespace amln::app
