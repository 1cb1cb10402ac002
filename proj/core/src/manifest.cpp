#include "lieform/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace lieform {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Input, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::Input, "malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

Grid parse_grid(const json& j) {
  if (!j.is_object()) fail(ErrorKind::Input, "manifest: missing grid object");
  for (const char* k : {"u0", "u1", "v0", "v1", "nu", "nv"})
    if (!j.contains(k)) fail(ErrorKind::Input, std::string("manifest: grid missing ") + k);
  return Grid(j["u0"].get<double>(), j["u1"].get<double>(), j["v0"].get<double>(),
              j["v1"].get<double>(), j["nu"].get<int>(), j["nv"].get<int>());
}

InputSpec parse_input(const json& j, const json& grid) {
  if (!j.is_object() || !j.contains("kind"))
    fail(ErrorKind::Input, "manifest: input needs a kind");
  InputSpec spec;
  spec.kind = j["kind"].get<std::string>();
  static const char* kinds[] = {"catalog", "sampled-surface", "sampled-coframe", "invariant-set",
                                "legendre-field"};
  bool ok = false;
  for (const char* k : kinds) ok = ok || spec.kind == k;
  if (!ok) fail(ErrorKind::Input, "manifest: unknown input kind '" + spec.kind + "'");
  if (spec.kind == "catalog") {
    if (!j.contains("family")) fail(ErrorKind::Input, "manifest: catalog input needs a family");
    spec.family = j["family"].get<std::string>();
  }
  spec.params_json = j.dump();
  spec.grid = parse_grid(j.contains("grid") ? j["grid"] : grid);
  return spec;
}

}  // namespace

Manifest parse_manifest(const std::string& path) {
  json j = load_json(path);
  Manifest m;
  if (!j.contains("schema") || !j["schema"].is_number_integer())
    fail(ErrorKind::Input, "manifest: schema version field is mandatory");
  m.schema = j["schema"].get<int>();
  if (m.schema != 1) fail(ErrorKind::Input, "manifest: unsupported schema version");
  json grid = j.contains("grid") ? j["grid"] : json();
  if (j.contains("pair")) {
    if (!j["pair"].is_array() || j["pair"].size() != 2)
      fail(ErrorKind::Input, "manifest: pair must hold exactly two inputs");
    m.pair = {parse_input(j["pair"][0], grid), parse_input(j["pair"][1], grid)};
  } else if (j.contains("input")) {
    m.input = parse_input(j["input"], grid);
  } else {
    fail(ErrorKind::Input, "manifest: need input or pair");
  }
  if (j.contains("tolerances"))
    for (auto& [k, val] : j["tolerances"].items()) m.tolerances[k] = val.get<double>();
  if (j.contains("reduction")) m.reduction = j["reduction"].get<bool>();
  return m;
}

namespace {

std::vector<double> array_from(const json& a, size_t expect, const std::string& what) {
  if (!a.is_array() || a.size() != expect)
    fail(ErrorKind::Input, "manifest: " + what + " must be an array of " + std::to_string(expect));
  std::vector<double> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i].get<double>();
  return out;
}

ScalarField field_from(const json& a, const Grid& g, const std::string& what) {
  ScalarField f(g);
  f.v = array_from(a, static_cast<size_t>(g.size()), what);
  return f;
}

Expr expr_param(const json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorKind::Input, std::string("manifest: missing parameter ") + key);
  return Expr::parse(j[key].get<std::string>());
}

}  // namespace

ResolvedInput resolve_input(const InputSpec& spec) {
  json j = json::parse(spec.params_json);
  const Grid& g = spec.grid;
  ResolvedInput out;
  out.describe = spec.kind + (spec.family.empty() ? "" : ":" + spec.family);

  if (spec.kind == "catalog") {
    const std::string& fam = spec.family;
    if (fam == "enneper")
      out.patch = catalog::enneper(g);
    else if (fam == "torus")
      out.patch = catalog::torus(j.value("R", 2.0), j.value("r", 1.0), g);
    else if (fam == "sphere")
      out.patch = catalog::sphere(j.value("R", 1.0), g);
    else if (fam == "plane")
      out.patch = catalog::plane(g);
    else if (fam == "revolution") {
      if (j.contains("profile"))
        out.patch = catalog::revolution(j["profile"].get<std::string>(), g);
      else
        out.patch = catalog::revolution(expr_param(j, "rho"), expr_param(j, "z"), g);
    } else if (fam == "isothermic" || fam == "l-isothermic") {
      catalog::IsothermicSpec s{expr_param(j, "psi"),
                                fam == "isothermic" ? catalog::IsothermicSpec::Mode::isothermic
                                                    : catalog::IsothermicSpec::Mode::l_isothermic};
      out.cf = catalog::isothermic_coframe(s, g);
    } else if (fam == "generic") {
      out.cf = catalog::generic_candidate(expr_param(j, "psi"), g).cf;
    } else if (fam == "special") {
      out.cf = catalog::special_coframe(expr_param(j, "psi"), g).cf;
    } else if (fam == "flatweb") {
      catalog::FlatWebSpec s;
      s.c = j.value("c", 0.0);
      s.lambda = expr_param(j, "lambda");
      s.mu = expr_param(j, "mu");
      catalog::FlatWebOptions opt;
      if (j.contains("A") && j.contains("B")) {
        opt.A_expr = expr_param(j, "A");
        opt.B_expr = expr_param(j, "B");
      }
      if (j.value("integrate_r", false)) opt.r_mode = catalog::FlatWebRMode::integrate;
      out.flatweb = catalog::flatweb(s, g, opt);
      out.cf = out.flatweb->cf;
      out.inv = out.flatweb->inv;
    } else if (fam == "constant") {
      out.cf = catalog::constant_coframe(g);
    } else if (fam == "random") {
      out.cf = catalog::random_coframe(g, j.value("seed", 1u));
    } else {
      fail(ErrorKind::Input, "manifest: unknown catalog family '" + fam + "'");
    }
  } else if (spec.kind == "sampled-surface") {
    std::vector<Vec3> pos(g.size());
    if (j.contains("positions")) {
      const json& a = j["positions"];
      if (!a.is_array() || a.size() != static_cast<size_t>(g.size()))
        fail(ErrorKind::Input, "manifest: positions must hold one [x,y,z] per node");
      for (int i = 0; i < g.size(); ++i) {
        auto t = array_from(a[i], 3, "position");
        pos[i] = Vec3(t[0], t[1], t[2]);
      }
    } else if (j.contains("csv")) {
      std::ifstream in(j["csv"].get<std::string>());
      if (!in) fail(ErrorKind::Input, "manifest: cannot open surface csv");
      std::string line;
      int i = 0;
      while (std::getline(in, line) && i < g.size()) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        Vec3 p;
        for (int k = 0; k < 3; ++k) {
          if (!std::getline(ls, tok, ',')) fail(ErrorKind::Input, "manifest: bad csv row");
          p(k) = std::stod(tok);
        }
        pos[i++] = p;
      }
      if (i != g.size()) fail(ErrorKind::Input, "manifest: csv row count does not match grid");
    } else {
      fail(ErrorKind::Input, "manifest: sampled-surface needs positions or csv");
    }
    out.patch = SurfacePatch::sampled(g, pos);
  } else if (spec.kind == "sampled-coframe") {
    Coframe cf;
    cf.a1 = OneForm{field_from(j["a1"]["P"], g, "a1.P"), field_from(j["a1"]["Q"], g, "a1.Q")};
    cf.a2 = OneForm{field_from(j["a2"]["P"], g, "a2.P"), field_from(j["a2"]["Q"], g, "a2.Q")};
    cf.validate();
    out.cf = cf;
  } else if (spec.kind == "invariant-set") {
    json d = j;
    if (j.contains("file")) d = load_json(j["file"].get<std::string>());
    Coframe cf;
    cf.a1 = OneForm{field_from(d["a1P"], g, "a1P"), field_from(d["a1Q"], g, "a1Q")};
    cf.a2 = OneForm{field_from(d["a2P"], g, "a2P"), field_from(d["a2Q"], g, "a2Q")};
    cf.validate();
    out.cf = cf;
    InvariantSet inv;
    inv.q1 = field_from(d["q1"], g, "q1");
    inv.q2 = field_from(d["q2"], g, "q2");
    inv.p1 = field_from(d["p1"], g, "p1");
    inv.p2 = field_from(d["p2"], g, "p2");
    if (d.contains("r1") && d.contains("r2")) {
      inv.r1 = field_from(d["r1"], g, "r1");
      inv.r2 = field_from(d["r2"], g, "r2");
    }
    out.inv = std::move(inv);
  } else if (spec.kind == "legendre-field") {
    if (!j.contains("file")) fail(ErrorKind::Input, "manifest: legendre-field needs a file");
    std::vector<int> shape;
    std::vector<double> data = import_array(j["file"].get<std::string>(), &shape);
    if (shape.size() != 4 || shape[0] != g.nv || shape[1] != g.nu || shape[2] != 2 || shape[3] != 6)
      fail(ErrorKind::Input, "manifest: legendre-field shape mismatch");
    LegendreField lf{g, std::vector<Vec6>(g.size()), std::vector<Vec6>(g.size())};
    for (int i = 0; i < g.size(); ++i) {
      for (int k = 0; k < 6; ++k) {
        lf.F0[i](k) = data[12 * i + k];
        lf.F1[i](k) = data[12 * i + 6 + k];
      }
    }
    out.lf = std::move(lf);
  }
  return out;
}

// ----------------------------------------------------------------- report

struct Report::Impl {
  ordered_json j;
};

Report::Report() : impl_(new Impl) {}
Report::~Report() = default;
Report::Report(Report&&) noexcept = default;
Report& Report::operator=(Report&&) noexcept = default;

void Report::set(const std::string& key, const std::string& value) { impl_->j[key] = value; }
void Report::set(const std::string& key, double value) { impl_->j[key] = value; }
void Report::set(const std::string& key, int value) { impl_->j[key] = value; }
void Report::set(const std::string& key, bool value) { impl_->j[key] = value; }
void Report::set_json(const std::string& key, const std::string& raw) {
  impl_->j[key] = ordered_json::parse(raw);
}

void Report::add_residual(const std::string& name, double max, std::optional<double> order) {
  ordered_json row;
  row["name"] = name;
  row["max"] = max;
  if (order)
    row["order"] = *order;
  else
    row["order"] = nullptr;
  impl_->j["residuals"].push_back(row);
}

void Report::add_field_summary(const std::string& name, const ScalarField& f) {
  double lo = f.v.empty() ? 0.0 : f.v[0], hi = lo, sum = 0.0;
  for (double x : f.v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    sum += x;
  }
  ordered_json row;
  row["name"] = name;
  row["min"] = lo;
  row["max"] = hi;
  row["mean"] = f.v.empty() ? 0.0 : sum / static_cast<double>(f.v.size());
  impl_->j["fields"].push_back(row);
}

void Report::add_spectrum(const ParallelSpace& ps) {
  ordered_json s;
  s["singular_values"] = {ps.singular_values[0], ps.singular_values[1], ps.singular_values[2]};
  s["anchor"] = ps.anchor;
  s["threshold"] = ps.threshold;
  s["gap"] = ps.gap;
  s["dim"] = ps.dim;
  ordered_json res = ordered_json::array();
  for (double r : ps.residuals) res.push_back(r);
  s["basis_residuals"] = res;
  impl_->j["spectrum"] = s;
}

std::string Report::dump() const { return impl_->j.dump(2) + "\n"; }

void Report::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Input, "cannot write report to " + path);
  out << dump();
}

// ------------------------------------------------------------ bulk export

void export_array(const std::string& dir, const std::string& name, const std::vector<double>& data,
                  const std::vector<int>& shape) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::string bin = (fs::path(dir) / (name + ".bin")).string();
  std::ofstream out(bin, std::ios::binary);
  if (!out) fail(ErrorKind::Input, "cannot write " + bin);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
  ordered_json side;
  side["shape"] = shape;
  side["dtype"] = "float64";
  side["order"] = "row-major-u";
  side["data"] = name + ".bin";
  std::ofstream sj((fs::path(dir) / (name + ".json")).string());
  sj << side.dump(2) << "\n";
}

void export_scalar_field(const std::string& dir, const std::string& name, const ScalarField& f) {
  export_array(dir, name, f.v, {f.grid.nv, f.grid.nu});
}

void export_legendre_field(const std::string& dir, const std::string& name,
                           const LegendreField& f) {
  std::vector<double> data(static_cast<size_t>(f.grid.size()) * 12);
  for (int i = 0; i < f.grid.size(); ++i)
    for (int k = 0; k < 6; ++k) {
      data[12 * i + k] = f.F0[i](k);
      data[12 * i + 6 + k] = f.F1[i](k);
    }
  export_array(dir, name, data, {f.grid.nv, f.grid.nu, 2, 6});
}

std::vector<double> import_array(const std::string& sidecar_path, std::vector<int>* shape) {
  json side = load_json(sidecar_path);
  if (shape) {
    shape->clear();
    for (auto& s : side["shape"]) shape->push_back(s.get<int>());
  }
  namespace fs = std::filesystem;
  fs::path bin = fs::path(sidecar_path).parent_path() / side["data"].get<std::string>();
  std::ifstream in(bin.string(), std::ios::binary);
  if (!in) fail(ErrorKind::Input, "cannot open " + bin.string());
  in.seekg(0, std::ios::end);
  std::streamsize bytes = in.tellg();
  in.seekg(0);
  std::vector<double> data(static_cast<size_t>(bytes) / sizeof(double));
  in.read(reinterpret_cast<char*>(data.data()), bytes);
  return data;
}

void export_csv(const std::string& path, const ScalarField& f) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Input, "cannot write " + path);
  out.precision(17);
  for (int iv = 0; iv < f.grid.nv; ++iv)
    for (int iu = 0; iu < f.grid.nu; ++iu)
      out << f.grid.u(iu) << "," << f.grid.v(iv) << "," << f.at(iu, iv) << "\n";
}

}  // namespace lieform
