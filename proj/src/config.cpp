#include "cfhom/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "cfhom/errors.hpp"

namespace cfhom {

using nlohmann::json;

namespace {

// Walks one JSON object, reading optional keys and remembering which keys were
// consumed so that unknown keys can be reported.
class ObjectReader {
 public:
  ObjectReader(const json* object, std::string path, std::vector<std::string>& problems)
      : object_(object), path_(std::move(path)), problems_(problems) {
    if (object_ != nullptr && !object_->is_object()) {
      problems_.push_back(name("") + ": expected an object");
      object_ = nullptr;
    }
  }

  bool has(const char* key) const { return object_ != nullptr && object_->contains(key); }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!has(key)) return;
    try {
      out = object_->at(key).get<T>();
    } catch (const json::exception&) {
      problems_.push_back(name(key) + ": wrong type");
    }
  }

  ObjectReader child(const char* key) {
    seen_.insert(key);
    return ObjectReader(has(key) ? &object_->at(key) : nullptr, name(key), problems_);
  }

  void finish() const {
    if (object_ == nullptr) return;
    for (const auto& item : object_->items()) {
      if (!seen_.count(item.key())) problems_.push_back(name(item.key()) + ": unknown key");
    }
  }

  std::string name(const std::string& key) const {
    if (path_.empty()) return key;
    return key.empty() ? path_ : path_ + "." + key;
  }

 private:
  const json* object_;
  std::string path_;
  std::vector<std::string>& problems_;
  std::set<std::string> seen_;
};

bool divides(double whole, double part) {
  if (!(whole > 0.0) || !(part > 0.0)) return false;
  const double q = whole / part;
  const double r = std::round(q);
  return r >= 1.0 && std::abs(q - r) <= 1e-9 * r;
}

void read_wave(ObjectReader r, WaveFactor& w) {
  r.read("offset", w.offset);
  r.read("amplitude", w.amplitude);
  r.read("axis", w.axis);
  r.read("wavenumber", w.wavenumber);
  r.read("phase", w.phase);
  r.finish();
}

json wave_json(const WaveFactor& w) {
  return {{"offset", w.offset},
          {"amplitude", w.amplitude},
          {"axis", w.axis},
          {"wavenumber", w.wavenumber},
          {"phase", w.phase}};
}

void validate(const RunConfig& c, std::vector<std::string>& problems) {
  auto require = [&](bool ok, const std::string& message) {
    if (!ok) problems.push_back(message);
  };
  require(c.schema_version == kSchemaVersion,
          "schema_version: unsupported version " + std::to_string(c.schema_version));

  require(c.dim == 2 || c.dim == 3, "geometry.dim: must be 2 or 3");
  require(c.L > 0.0, "geometry.L: must be > 0");
  require(c.epsilon > 0.0 && c.epsilon < 1.0, "geometry.epsilon: must lie in (0,1)");
  require(divides(c.L, c.epsilon), "geometry.epsilon: must divide L");
  require(!c.epsilons.empty(), "geometry.epsilons: must not be empty");
  for (std::size_t k = 0; k < c.epsilons.size(); ++k) {
    const double e = c.epsilons[k];
    require(e > 0.0 && e < 1.0 && divides(c.L, e),
            "geometry.epsilons[" + std::to_string(k) + "]: must lie in (0,1) and divide L");
  }
  require(c.hole_radius >= 0.0 && c.hole_radius < 0.5, "geometry.hole_radius: must lie in [0, 1/2)");
  require(c.m_cell >= 8, "geometry.m_cell: must be >= 8");
  require(divides(c.L, c.h_macro), "geometry.h_macro: must be > 0 and divide L");

  const auto& k = c.kernels;
  require(k.n_max >= 1, "kernels.n_max: must be >= 1");
  require(k.coagulation == "constant" || k.coagulation == "sum_power",
          "kernels.coagulation.family: must be constant or sum_power");
  if (k.coagulation == "constant") require(k.a0 > 0.0, "kernels.coagulation.a0: must be > 0");
  if (k.coagulation == "sum_power") {
    require(k.zeta > 0.0 && k.zeta <= 1.0, "kernels.coagulation.zeta: must lie in (0,1]");
  }
  require(k.fragmentation == "none" || k.fragmentation == "binary_uniform",
          "kernels.fragmentation.family: must be none or binary_uniform");
  if (k.fragmentation == "binary_uniform") require(k.b > 0.0, "kernels.fragmentation.b: must be > 0");
  require(k.diffusion == "uniform" || k.diffusion == "list",
          "kernels.diffusion.profile: must be uniform or list");
  if (k.diffusion == "uniform") require(k.d0 > 0.0, "kernels.diffusion.d0: must be > 0");
  if (k.diffusion == "list") {
    require(k.d_values.size() == static_cast<std::size_t>(std::max(k.n_max, 0)),
            "kernels.diffusion.values: length must equal n_max");
    for (double d : k.d_values) {
      if (!(d > 0.0)) {
        problems.push_back("kernels.diffusion.values: entries must be > 0");
        break;
      }
    }
  }

  require(c.U1 >= 0.0, "initial.U1: must be >= 0");
  require(c.psi.vanishes_at_start(),
          "psi.g: psi_initial_zero violated, g(0) must be 0 so the flux vanishes at t = 0");
  require(c.psi.p.axis >= 0 && c.psi.p.axis < c.dim, "psi.p.axis: must be < dim");
  require(c.psi.q.axis >= 0 && c.psi.q.axis < c.dim, "psi.q.axis: must be < dim");

  require(c.T > 0.0, "time.T: must be > 0");
  require(divides(c.T, c.dt), "time.dt: must be > 0 and divide T");
  require(c.snapshot_stride >= 1, "time.snapshot_stride: must be >= 1");
  require(c.tol > 0.0, "solver.tol: must be > 0");
  require(c.max_iter >= 1, "solver.max_iter: must be >= 1");
  require(c.audit_tol > 0.0, "solver.audit_tol: must be > 0");

  require(!c.species.empty(), "compare.species: must not be empty");
  for (int s : c.species) {
    if (s < 1 || s > k.n_max) {
      problems.push_back("compare.species: entries must lie in 1..n_max");
      break;
    }
  }

  require(c.zerod.n_max >= 1, "zerod.n_max: must be >= 1");
  require(c.zerod.N0 >= 0.0, "zerod.N0: must be >= 0");
  require(c.zerod.T > 0.0, "zerod.T: must be > 0");
  require(divides(c.zerod.T, c.zerod.dt), "zerod.dt: must be > 0 and divide T");
  require(c.zerod.record_stride >= 1, "zerod.record_stride: must be >= 1");
  require(!c.output.dir.empty(), "output.dir: must not be empty");
}

}  // namespace

RunConfig parse_config(const json& doc) {
  std::vector<std::string> problems;
  RunConfig c;
  if (!doc.is_object()) throw ConfigError({"configuration must be a JSON object"});
  if (!doc.contains("schema_version")) problems.push_back("schema_version: required");

  ObjectReader root(&doc, "", problems);
  root.read("schema_version", c.schema_version);
  root.read("seed", c.seed);

  {
    auto g = root.child("geometry");
    g.read("dim", c.dim);
    g.read("L", c.L);
    g.read("epsilon", c.epsilon);
    g.read("epsilons", c.epsilons);
    g.read("hole_radius", c.hole_radius);
    g.read("m_cell", c.m_cell);
    g.read("h_macro", c.h_macro);
    g.finish();
  }
  {
    auto k = root.child("kernels");
    k.read("n_max", c.kernels.n_max);
    auto coag = k.child("coagulation");
    coag.read("family", c.kernels.coagulation);
    coag.read("a0", c.kernels.a0);
    coag.read("zeta", c.kernels.zeta);
    coag.finish();
    auto frag = k.child("fragmentation");
    frag.read("family", c.kernels.fragmentation);
    frag.read("b", c.kernels.b);
    frag.finish();
    auto diff = k.child("diffusion");
    diff.read("profile", c.kernels.diffusion);
    diff.read("d0", c.kernels.d0);
    diff.read("values", c.kernels.d_values);
    diff.finish();
    k.finish();
  }
  {
    auto init = root.child("initial");
    init.read("U1", c.U1);
    init.finish();
  }
  {
    // Default spatial factor sin(π x_1 / L) depends on L.
    c.psi.p.wavenumber = std::numbers::pi / c.L;
    auto psi = root.child("psi");
    auto g = psi.child("g");
    g.read("poly", c.psi.g.poly);
    g.read("sin_amplitude", c.psi.g.sin_amplitude);
    g.read("sin_frequency", c.psi.g.sin_frequency);
    g.finish();
    read_wave(psi.child("p"), c.psi.p);
    auto q = psi.child("q");
    q.read("offset", c.psi.q.offset);
    q.read("amplitude", c.psi.q.amplitude);
    q.read("axis", c.psi.q.axis);
    q.read("mode", c.q_mode);
    q.read("phase", c.psi.q.phase);
    q.finish();
    c.psi.q.wavenumber = 2.0 * std::numbers::pi * c.q_mode;
    psi.finish();
  }
  {
    auto t = root.child("time");
    t.read("T", c.T);
    t.read("dt", c.dt);
    t.read("snapshot_stride", c.snapshot_stride);
    t.finish();
  }
  {
    auto s = root.child("solver");
    s.read("tol", c.tol);
    s.read("max_iter", c.max_iter);
    s.read("audit_tol", c.audit_tol);
    s.finish();
  }
  {
    auto cmp = root.child("compare");
    cmp.read("species", c.species);
    cmp.finish();
  }
  {
    auto z = root.child("zerod");
    z.read("n_max", c.zerod.n_max);
    z.read("N0", c.zerod.N0);
    z.read("T", c.zerod.T);
    z.read("dt", c.zerod.dt);
    z.read("record_stride", c.zerod.record_stride);
    z.finish();
  }
  {
    auto o = root.child("output");
    o.read("dir", c.output.dir);
    o.read("snapshots", c.output.snapshots);
    o.read("mask_csv", c.output.mask_csv);
    o.read("corrector_csv", c.output.corrector_csv);
    o.finish();
  }
  root.finish();

  validate(c, problems);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open configuration file " + path.string()});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("configuration is not valid JSON: ") + e.what()});
  }
  return parse_config(doc);
}

json to_json(const RunConfig& c) {
  json coag = {{"family", c.kernels.coagulation}};
  if (c.kernels.coagulation == "constant") coag["a0"] = c.kernels.a0;
  else coag["zeta"] = c.kernels.zeta;
  json frag = {{"family", c.kernels.fragmentation}};
  if (c.kernels.fragmentation == "binary_uniform") frag["b"] = c.kernels.b;
  json diff = {{"profile", c.kernels.diffusion}};
  if (c.kernels.diffusion == "uniform") diff["d0"] = c.kernels.d0;
  else diff["values"] = c.kernels.d_values;

  json q = {{"offset", c.psi.q.offset},
            {"amplitude", c.psi.q.amplitude},
            {"axis", c.psi.q.axis},
            {"mode", c.q_mode},
            {"phase", c.psi.q.phase}};

  return {
      {"schema_version", c.schema_version},
      {"geometry",
       {{"dim", c.dim},
        {"L", c.L},
        {"epsilon", c.epsilon},
        {"epsilons", c.epsilons},
        {"hole_radius", c.hole_radius},
        {"m_cell", c.m_cell},
        {"h_macro", c.h_macro}}},
      {"kernels", {{"n_max", c.kernels.n_max}, {"coagulation", coag}, {"fragmentation", frag}, {"diffusion", diff}}},
      {"initial", {{"U1", c.U1}}},
      {"psi",
       {{"g",
         {{"poly", c.psi.g.poly},
          {"sin_amplitude", c.psi.g.sin_amplitude},
          {"sin_frequency", c.psi.g.sin_frequency}}},
        {"p", wave_json(c.psi.p)},
        {"q", q}}},
      {"time", {{"T", c.T}, {"dt", c.dt}, {"snapshot_stride", c.snapshot_stride}}},
      {"solver", {{"tol", c.tol}, {"max_iter", c.max_iter}, {"audit_tol", c.audit_tol}}},
      {"compare", {{"species", c.species}}},
      {"zerod",
       {{"n_max", c.zerod.n_max},
        {"N0", c.zerod.N0},
        {"T", c.zerod.T},
        {"dt", c.zerod.dt},
        {"record_stride", c.zerod.record_stride}}},
      {"output",
       {{"dir", c.output.dir},
        {"snapshots", c.output.snapshots},
        {"mask_csv", c.output.mask_csv},
        {"corrector_csv", c.output.corrector_csv}}},
      {"seed", c.seed},
  };
}

KernelSet make_kernels(const KernelConfig& k) {
  CoagulationFamily coag = ConstantCoagulation{k.a0};
  if (k.coagulation == "sum_power") coag = SumPowerCoagulation{k.zeta};
  FragmentationFamily frag = NoFragmentation{};
  if (k.fragmentation == "binary_uniform") frag = BinaryUniformFragmentation{k.b};
  DiffusionProfile diff = UniformDiffusion{k.d0};
  if (k.diffusion == "list") diff = ListDiffusion{k.d_values};
  return build_builtin_kernels(coag, frag, k.n_max, diff);
}

DomainSpec make_domain(const RunConfig& c, double epsilon) {
  return {c.dim, c.L, epsilon, c.hole_radius, c.m_cell};
}

RunControls make_controls(const RunConfig& c, int threads) {
  RunControls r;
  r.T = c.T;
  r.dt = c.dt;
  r.snapshot_stride = c.snapshot_stride;
  r.solve.tol = c.tol;
  r.solve.max_iter = c.max_iter;
  r.audit_tol = c.audit_tol;
  r.threads = threads;
  return r;
}

}  // namespace cfhom
