#include "alphamod/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "alphamod/errors.hpp"
#include "schema_text.hpp"

namespace alphamod {

using nlohmann::json;

namespace {

bool has_type(const json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "null") return v.is_null();
  return false;
}

void check(const json& v, const json& schema, const std::string& path, std::vector<std::string>& out) {
  if (auto t = schema.find("type"); t != schema.end()) {
    bool ok = false;
    if (t->is_array()) {
      for (const auto& one : *t) ok = ok || has_type(v, one.get<std::string>());
    } else {
      ok = has_type(v, t->get<std::string>());
    }
    if (!ok) {
      out.push_back(path + ": expected type " + t->dump());
      return;
    }
  }
  if (auto e = schema.find("enum"); e != schema.end()) {
    bool found = false;
    for (const auto& one : *e) found = found || one == v;
    if (!found) out.push_back(path + ": value " + v.dump() + " not in " + e->dump());
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (auto m = schema.find("minimum"); m != schema.end() && x < m->get<double>()) {
      out.push_back(path + ": below minimum " + m->dump());
    }
    if (auto m = schema.find("maximum"); m != schema.end() && x > m->get<double>()) {
      out.push_back(path + ": above maximum " + m->dump());
    }
    if (auto m = schema.find("exclusiveMinimum"); m != schema.end() && x <= m->get<double>()) {
      out.push_back(path + ": must exceed " + m->dump());
    }
    if (auto m = schema.find("exclusiveMaximum"); m != schema.end() && x >= m->get<double>()) {
      out.push_back(path + ": must be below " + m->dump());
    }
  }
  if (v.is_array()) {
    if (auto m = schema.find("minItems"); m != schema.end() && v.size() < m->get<std::size_t>()) {
      out.push_back(path + ": fewer than " + m->dump() + " items");
    }
    if (auto m = schema.find("maxItems"); m != schema.end() && v.size() > m->get<std::size_t>()) {
      out.push_back(path + ": more than " + m->dump() + " items");
    }
    if (auto items = schema.find("items"); items != schema.end()) {
      for (std::size_t i = 0; i < v.size(); ++i) check(v[i], *items, path + "[" + std::to_string(i) + "]", out);
    }
  }
  if (v.is_object()) {
    const json props = schema.value("properties", json::object());
    for (const auto& r : schema.value("required", json::array())) {
      if (!v.contains(r.get<std::string>())) out.push_back(path + ": missing " + r.get<std::string>());
    }
    for (auto it = v.begin(); it != v.end(); ++it) {
      const std::string child = path.empty() ? it.key() : path + "." + it.key();
      if (auto p = props.find(it.key()); p != props.end()) {
        check(it.value(), *p, child, out);
      } else if (schema.value("additionalProperties", true) == false) {
        out.push_back(child + ": unknown key");
      }
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) it->get_to(out);
}

void read_exponent(const json& j, const char* key, double& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (it->is_string()) {
    if (it->get<std::string>() != "inf") throw ConfigError(std::string(key) + ": only \"inf\" is accepted as a string");
    out = std::numeric_limits<double>::infinity();
  } else {
    out = it->get<double>();
  }
}

json exponent(double v) { return std::isinf(v) ? json("inf") : json(v); }

const json& block(const json& j, const char* key) {
  static const json empty = json::object();
  auto it = j.find(key);
  return it == j.end() ? empty : *it;
}

}  // namespace

const json& run_config_schema() {
  static const json schema = json::parse(detail::kRunConfigSchema);
  return schema;
}

std::vector<std::string> schema_violations(const json& instance, const json& schema) {
  std::vector<std::string> out;
  check(instance, schema, "", out);
  return out;
}

RunConfig parse_config(const json& j) {
  const auto violations = schema_violations(j, run_config_schema());
  if (!violations.empty()) {
    std::string msg = "configuration does not match the schema:";
    for (const auto& v : violations) msg += "\n  " + (v.front() == ':' ? "(root)" + v : v);
    throw ConfigError(msg);
  }
  RunConfig c;
  read(j, "command", c.command);
  read(j, "seed", c.seed);

  const json& g = block(j, "grid");
  read(g, "d", c.grid.d);
  read(g, "n", c.grid.n);
  read(g, "L", c.grid.L);

  const json& ph = block(j, "physics");
  read(ph, "lambda", c.physics.lambda);
  read(ph, "kappa", c.physics.kappa);

  const json& sp = block(j, "space");
  read(sp, "alpha", c.space.alpha);
  read(sp, "s", c.space.s);
  read(sp, "C", c.space.C);
  read(sp, "q", c.space.q);
  read(sp, "p", c.space.p);

  const json& f = block(j, "field");
  read(f, "type", c.field.type);
  read(f, "center", c.field.center);
  read(f, "width", c.field.width);
  read(f, "amplitude", c.field.amplitude);
  read(f, "modulation", c.field.modulation);
  read(f, "norm", c.field.norm);

  const json& de = block(j, "decompose");
  read(de, "alphas", c.decompose.alphas);
  read(de, "dyadic_tolerance", c.decompose.dyadic_tolerance);
  read(de, "alpha_tolerance", c.decompose.alpha_tolerance);

  const json& ev = block(j, "evolve");
  read(ev, "t_end", c.evolve.t_end);
  read(ev, "dt", c.evolve.dt);
  read(ev, "snapshot_stride", c.evolve.snapshot_stride);
  read(ev, "dealias", c.evolve.dealias);
  read(ev, "max_phase_per_step", c.evolve.max_phase_per_step);
  read(ev, "export_snapshots", c.evolve.export_snapshots);
  read(ev, "mass_tolerance", c.evolve.mass_tolerance);

  const json& st = block(j, "strichartz");
  read_exponent(st, "q", c.strichartz.q);
  read_exponent(st, "r", c.strichartz.r);
  read(st, "k", c.strichartz.k);
  read(st, "width_fraction", c.strichartz.width_fraction);
  read(st, "C", c.strichartz.C);
  read(st, "T0", c.strichartz.T0);
  read(st, "rel_tol", c.strichartz.rel_tol);
  read(st, "tolerance", c.strichartz.tolerance);

  const json& bl = block(j, "bilinear");
  read(bl, "separations", c.bilinear.separations);
  read(bl, "width", c.bilinear.width);
  read(bl, "pattern", c.bilinear.pattern);
  read(bl, "tail_tol", c.bilinear.tail_tol);
  read(bl, "tolerance", c.bilinear.tolerance);

  const json& co = block(j, "construct");
  read(co, "eps", c.construct.eps);
  read(co, "J", c.construct.J);
  read(co, "max_pieces", c.construct.max_pieces);
  read(co, "c", c.construct.c);
  read(co, "sigmas", c.construct.sigmas);
  read(co, "refinements", c.construct.refinements);
  read(co, "slope_tolerance", c.construct.slope_tolerance);
  read(co, "besov_tolerance", c.construct.besov_tolerance);

  const json& in = block(j, "inflate");
  read(in, "N", c.inflate.N);
  read(in, "points_per_width", c.inflate.points_per_width);
  read(in, "method", c.inflate.method);
  read(in, "tolerance", c.inflate.tolerance);

  const json& pi = block(j, "picard");
  read(pi, "max_iter", c.picard.max_iter);
  read(pi, "tol", c.picard.tol);
  read(pi, "max_ratio", c.picard.max_ratio);
  read(pi, "max_iterations", c.picard.max_iterations);

  const json& gl = block(j, "glassey");
  read(gl, "beta", c.glassey.beta);
  read(gl, "amplitude", c.glassey.amplitude);
  read(gl, "twin_t_end", c.glassey.twin_t_end);
  read(gl, "growth_target", c.glassey.growth_target);
  read(gl, "twin_bound", c.glassey.twin_bound);

  const json& out = block(j, "output");
  read(out, "dir", c.output.dir);
  read(out, "prefix", c.output.prefix);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  return {
      {"command", c.command},
      {"seed", c.seed},
      {"grid", {{"d", c.grid.d}, {"n", c.grid.n}, {"L", c.grid.L}}},
      {"physics", {{"lambda", c.physics.lambda}, {"kappa", c.physics.kappa}}},
      {"space", {{"alpha", c.space.alpha}, {"s", c.space.s}, {"C", c.space.C}, {"q", c.space.q}, {"p", c.space.p}}},
      {"field",
       {{"type", c.field.type},
        {"center", c.field.center},
        {"width", c.field.width},
        {"amplitude", c.field.amplitude},
        {"modulation", c.field.modulation},
        {"norm", c.field.norm}}},
      {"decompose",
       {{"alphas", c.decompose.alphas},
        {"dyadic_tolerance", c.decompose.dyadic_tolerance},
        {"alpha_tolerance", c.decompose.alpha_tolerance}}},
      {"evolve",
       {{"t_end", c.evolve.t_end},
        {"dt", c.evolve.dt},
        {"snapshot_stride", c.evolve.snapshot_stride},
        {"dealias", c.evolve.dealias},
        {"max_phase_per_step", c.evolve.max_phase_per_step},
        {"export_snapshots", c.evolve.export_snapshots},
        {"mass_tolerance", c.evolve.mass_tolerance}}},
      {"strichartz",
       {{"q", exponent(c.strichartz.q)},
        {"r", exponent(c.strichartz.r)},
        {"k", c.strichartz.k},
        {"width_fraction", c.strichartz.width_fraction},
        {"C", c.strichartz.C},
        {"T0", c.strichartz.T0},
        {"rel_tol", c.strichartz.rel_tol},
        {"tolerance", c.strichartz.tolerance}}},
      {"bilinear",
       {{"separations", c.bilinear.separations},
        {"width", c.bilinear.width},
        {"pattern", c.bilinear.pattern},
        {"tail_tol", c.bilinear.tail_tol},
        {"tolerance", c.bilinear.tolerance}}},
      {"construct",
       {{"eps", c.construct.eps},
        {"J", c.construct.J},
        {"max_pieces", c.construct.max_pieces},
        {"c", c.construct.c},
        {"sigmas", c.construct.sigmas},
        {"refinements", c.construct.refinements},
        {"slope_tolerance", c.construct.slope_tolerance},
        {"besov_tolerance", c.construct.besov_tolerance}}},
      {"inflate",
       {{"N", c.inflate.N},
        {"points_per_width", c.inflate.points_per_width},
        {"method", c.inflate.method},
        {"tolerance", c.inflate.tolerance}}},
      {"picard",
       {{"max_iter", c.picard.max_iter},
        {"tol", c.picard.tol},
        {"max_ratio", c.picard.max_ratio},
        {"max_iterations", c.picard.max_iterations}}},
      {"glassey",
       {{"beta", c.glassey.beta},
        {"amplitude", c.glassey.amplitude},
        {"twin_t_end", c.glassey.twin_t_end},
        {"growth_target", c.glassey.growth_target},
        {"twin_bound", c.glassey.twin_bound}}},
      {"output", {{"dir", c.output.dir}, {"prefix", c.output.prefix}}},
  };
}

}  // namespace alphamod
