#include "pinchlab/diagram.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "pinchlab/errors.hpp"
#include "pinchlab/expr.hpp"
#include "pinchlab/symbols.hpp"
#include "pinchlab/toml_lite.hpp"

namespace pinchlab {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

// Exact scalars in diagram files are JSON integers or expression strings.
// Floating literals are rejected: they would silently round.
RatFunc scalar_field(const json& v, const std::string& where) {
  if (v.is_number_integer()) return RatFunc(Rational(v.get<long long>()));
  if (v.is_number_float())
    throw schema_error(where + ": floating literal; quote the value to keep it exact");
  if (v.is_string()) return require_ratfunc(parse_scalar(v.get<std::string>()), where);
  throw schema_error(where + ": expected integer or expression string");
}

Rational rational_field(const json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_float())
    throw schema_error(where + ": floating literal; quote the value to keep it exact");
  if (v.is_string()) return parse_rational(v.get<std::string>());
  throw schema_error(where + ": expected integer or rational string");
}

const json& need(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw schema_error(where + ": missing field '" + key + "'");
  return *it;
}

// Emit a RatFunc canonically: integers as JSON numbers, everything else as an
// expression string (re-parseable).
json scalar_out(const RatFunc& v) {
  if (v.is_constant()) {
    Rational c = v.constant_value();
    if (den(c) == 1) return json(static_cast<long long>(num(c).convert_to<long long>()));
  }
  return json(v.str());
}

json rational_out(const Rational& v) {
  if (den(v) == 1) return json(static_cast<long long>(num(v).convert_to<long long>()));
  return json(to_string(v));
}

} // namespace

bool Diagram::is_external(const std::string& e) const {
  return std::find(externals.begin(), externals.end(), e) != externals.end();
}

std::size_t Diagram::external_index(const std::string& e) const {
  auto it = std::find(externals.begin(), externals.end(), e);
  if (it == externals.end()) throw symbol_error("unknown external leg '" + e + "'");
  return static_cast<std::size_t>(it - externals.begin());
}

RatFunc Diagram::dot(const std::string& a, const std::string& b) const {
  std::size_t ia = external_index(a), ib = external_index(b);
  auto key = ia <= ib ? std::make_pair(a, b) : std::make_pair(b, a);
  auto it = gram.find(key);
  if (it == gram.end())
    throw symbol_error("gram entry '" + key.first + "." + key.second + "' is not declared");
  return it->second;
}

Matrix<RatFunc> Diagram::gram_matrix(const std::vector<std::string>& legs) const {
  Matrix<RatFunc> g(legs.size(), legs.size());
  for (std::size_t i = 0; i < legs.size(); ++i)
    for (std::size_t j = 0; j < legs.size(); ++j) g.at(i, j) = dot(legs[i], legs[j]);
  return g;
}

RatFunc Diagram::dimension_scalar() const {
  if (dimension_symbolic) return RatFunc(Poly::var(intern_symbol("d")));
  return RatFunc(Rational(dimension));
}

Diagram parse_diagram(const json& doc) {
  if (!doc.is_object()) throw schema_error("diagram: top level must be an object");
  Diagram dg;

  if (auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) throw schema_error("diagram.name: expected string");
    dg.name = it->get<std::string>();
  }

  const json& loops = need(doc, "loops", "diagram");
  if (!loops.is_number_integer()) throw schema_error("diagram.loops: expected integer");
  dg.loops = loops.get<int>();
  if (dg.loops < 1) throw shape_error("diagram.loops: must be >= 1");

  if (auto it = doc.find("dimension"); it != doc.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "d")
        throw schema_error("diagram.dimension: expected \"d\" or a positive integer");
      dg.dimension_symbolic = true;
    } else if (it->is_number_integer()) {
      dg.dimension_symbolic = false;
      dg.dimension = it->get<int>();
      if (dg.dimension < 1) throw shape_error("diagram.dimension: must be >= 1");
    } else {
      throw schema_error("diagram.dimension: expected \"d\" or a positive integer");
    }
  }

  const json& ext = need(doc, "externals", "diagram");
  if (!ext.is_array()) throw schema_error("diagram.externals: expected array of names");
  for (const auto& e : ext) {
    if (!e.is_string() || !is_identifier(e.get<std::string>()))
      throw schema_error("diagram.externals: entries must be identifier strings");
    const std::string name = e.get<std::string>();
    if (dg.is_external(name))
      throw schema_error("diagram.externals: duplicate leg '" + name + "'");
    dg.externals.push_back(name);
    intern_symbol(name);
  }

  const json& gram = need(doc, "gram", "diagram");
  if (!gram.is_object()) throw schema_error("diagram.gram: expected object");
  for (auto it = gram.begin(); it != gram.end(); ++it) {
    const std::string& key = it.key();
    auto dotpos = key.find('.');
    if (dotpos == std::string::npos || key.find('.', dotpos + 1) != std::string::npos)
      throw schema_error("diagram.gram: key '" + key + "' must be 'ext.ext'");
    std::string a = key.substr(0, dotpos), b = key.substr(dotpos + 1);
    if (!dg.is_external(a)) throw symbol_error("diagram.gram: unknown external '" + a + "'");
    if (!dg.is_external(b)) throw symbol_error("diagram.gram: unknown external '" + b + "'");
    std::size_t ia = dg.external_index(a), ib = dg.external_index(b);
    auto norm = ia <= ib ? std::make_pair(a, b) : std::make_pair(b, a);
    if (dg.gram.count(norm))
      throw schema_error("diagram.gram: duplicate entry for '" + norm.first + "." +
                         norm.second + "'");
    dg.gram.emplace(norm, scalar_field(*it, "diagram.gram." + key));
  }

  if (auto it = doc.find("masses_sq"); it != doc.end()) {
    if (!it->is_object()) throw schema_error("diagram.masses_sq: expected object");
    for (auto m = it->begin(); m != it->end(); ++m) {
      if (!is_identifier(m.key()))
        throw schema_error("diagram.masses_sq: key '" + m.key() + "' is not an identifier");
      dg.masses.emplace(m.key(), scalar_field(*m, "diagram.masses_sq." + m.key()));
    }
  }

  const json& props = need(doc, "propagators", "diagram");
  if (!props.is_array() || props.empty())
    throw schema_error("diagram.propagators: expected non-empty array");
  for (std::size_t i = 0; i < props.size(); ++i) {
    const std::string where = "diagram.propagators[" + std::to_string(i) + "]";
    const json& p = props[i];
    if (!p.is_object()) throw schema_error(where + ": expected object");
    Propagator prop;

    const json& routing = need(p, "routing", where);
    if (!routing.is_array()) throw schema_error(where + ".routing: expected array");
    if (routing.size() != static_cast<std::size_t>(dg.loops))
      throw shape_error(where + ".routing: length " + std::to_string(routing.size()) +
                        " does not match loops = " + std::to_string(dg.loops));
    for (const auto& r : routing) {
      if (!r.is_number_integer()) throw schema_error(where + ".routing: integer entries only");
      prop.routing.push_back(r.get<long>());
    }

    if (auto sh = p.find("shift"); sh != p.end()) {
      if (!sh->is_object()) throw schema_error(where + ".shift: expected object");
      for (auto s = sh->begin(); s != sh->end(); ++s) {
        if (!dg.is_external(s.key()))
          throw symbol_error(where + ".shift: unknown external '" + s.key() + "'");
        Rational c = rational_field(*s, where + ".shift." + s.key());
        if (!(c == Rational(0))) prop.shift.emplace(s.key(), c);
      }
    }

    const json& mass = need(p, "mass_sq", where);
    if (mass.is_string()) {
      prop.mass_key = mass.get<std::string>();
      auto mit = dg.masses.find(prop.mass_key);
      if (mit == dg.masses.end())
        throw symbol_error(where + ".mass_sq: '" + prop.mass_key +
                           "' is not declared in masses_sq");
      prop.mass = mit->second;
    } else if (mass.is_number_integer()) {
      prop.mass = RatFunc(Rational(mass.get<long long>()));
    } else {
      throw schema_error(where + ".mass_sq: expected masses_sq key or integer literal");
    }
    dg.propagators.push_back(std::move(prop));
  }
  return dg;
}

Diagram load_diagram_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw schema_error("cannot open diagram file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  bool toml = path.size() >= 5 && path.compare(path.size() - 5, 5, ".toml") == 0;
  if (toml) return parse_diagram(parse_toml_lite(text));
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw schema_error("diagram file '" + path + "': " + e.what());
  }
  return parse_diagram(doc);
}

std::string serialize_diagram(const Diagram& dg) {
  ordered_json out;
  out["name"] = dg.name;
  out["loops"] = dg.loops;
  if (dg.dimension_symbolic)
    out["dimension"] = "d";
  else
    out["dimension"] = dg.dimension;
  out["externals"] = dg.externals;

  ordered_json gram = ordered_json::object();
  // Iterate in declared-leg order so the emission is canonical.
  for (std::size_t i = 0; i < dg.externals.size(); ++i)
    for (std::size_t j = i; j < dg.externals.size(); ++j) {
      auto it = dg.gram.find({dg.externals[i], dg.externals[j]});
      if (it != dg.gram.end())
        gram[dg.externals[i] + "." + dg.externals[j]] = scalar_out(it->second);
    }
  out["gram"] = std::move(gram);

  ordered_json masses = ordered_json::object();
  for (const auto& [k, v] : dg.masses) masses[k] = scalar_out(v);
  out["masses_sq"] = std::move(masses);

  ordered_json props = ordered_json::array();
  for (const auto& p : dg.propagators) {
    ordered_json jp;
    jp["routing"] = p.routing;
    ordered_json shift = ordered_json::object();
    for (const auto& [e, c] : p.shift) shift[e] = rational_out(c);
    jp["shift"] = std::move(shift);
    if (!p.mass_key.empty()) {
      jp["mass_sq"] = p.mass_key;
    } else {
      Rational c = p.mass.is_zero() ? Rational(0) : p.mass.constant_value();
      jp["mass_sq"] = static_cast<long long>(num(c).convert_to<long long>());
    }
    props.push_back(std::move(jp));
  }
  out["propagators"] = std::move(props);
  return out.dump(2) + "\n";
}

MomentumExpr MomentumExpr::external(const std::string& name) {
  MomentumExpr m;
  m.ext.emplace(name, QuadExt(Rational(1)));
  return m;
}

MomentumExpr MomentumExpr::free_loop(int a) {
  MomentumExpr m;
  m.loop.emplace(a, QuadExt(Rational(1)));
  return m;
}

MomentumExpr& MomentumExpr::add_ext(const std::string& name, const QuadExt& c) {
  auto [it, fresh] = ext.emplace(name, c);
  if (!fresh) it->second += c;
  if (it->second.is_zero()) ext.erase(it);
  return *this;
}

MomentumExpr& MomentumExpr::add_loop(int a, const QuadExt& c) {
  auto [it, fresh] = loop.emplace(a, c);
  if (!fresh) it->second += c;
  if (it->second.is_zero()) loop.erase(it);
  return *this;
}

Sym loop_dot_loop_sym(int a, int b) {
  if (a > b) std::swap(a, b);
  return intern_symbol("q" + std::to_string(a) + ".q" + std::to_string(b));
}

Sym loop_dot_ext_sym(int a, const std::string& ext) {
  return intern_symbol("q" + std::to_string(a) + "." + ext);
}

Sym perp_sq_sym(int a) {
  std::string q = "qperp" + std::to_string(a);
  return intern_symbol(q + "." + q);
}

Sym perp_cross_sym(int a, int b) {
  if (a > b) std::swap(a, b);
  return intern_symbol("qperp" + std::to_string(a) + ".qperp" + std::to_string(b));
}

QuadExt expand_propagator(const Diagram& dg, std::size_t index,
                          const std::map<int, MomentumExpr>& parallel,
                          const std::map<int, TransverseSpec>& transverse) {
  if (index >= dg.propagators.size())
    throw shape_error("propagator index " + std::to_string(index) + " out of range");
  const Propagator& prop = dg.propagators[index];

  for (const auto& [a, spec] : transverse) {
    (void)spec;
    if (!parallel.count(a))
      throw reduction_error("loop q" + std::to_string(a) +
                            " has a transverse remainder but no parallel assignment");
  }

  // Total vector of the propagator momentum under the assignment:
  // external coefficients, free-loop coefficients, transverse coefficients.
  std::map<std::string, QuadExt> cext;
  std::map<int, QuadExt> cfree;
  std::map<int, QuadExt> cperp;
  auto add_to = [](auto& m, const auto& key, const QuadExt& c) {
    auto [it, fresh] = m.emplace(key, c);
    if (!fresh) it->second += c;
    if (it->second.is_zero()) m.erase(it);
  };

  for (const auto& [e, c] : prop.shift) {
    dg.external_index(e);
    add_to(cext, e, QuadExt(c));
  }
  for (int a = 1; a <= dg.loops; ++a) {
    long l = prop.routing[static_cast<std::size_t>(a - 1)];
    if (l == 0) continue;
    QuadExt lc{Rational(l)};
    auto pit = parallel.find(a);
    if (pit == parallel.end()) {
      add_to(cfree, a, lc);
      continue;
    }
    for (const auto& [e, c] : pit->second.ext) add_to(cext, e, lc * c);
    for (const auto& [b, c] : pit->second.loop) add_to(cfree, b, lc * c);
    if (transverse.count(a)) add_to(cperp, a, lc);
  }

  auto in_span = [&](int a, const std::string& e) {
    const auto& span = transverse.at(a).span;
    return std::find(span.begin(), span.end(), e) != span.end();
  };

  QuadExt acc{prop.mass};
  // external x external through the declared Gram data
  for (const auto& [e1, c1] : cext)
    for (const auto& [e2, c2] : cext) acc += c1 * c2 * QuadExt(dg.dot(e1, e2));
  // external x free loop and free x free become named invariants
  for (const auto& [e, c1] : cext)
    for (const auto& [b, c2] : cfree)
      acc += QuadExt(Rational(2)) * c1 * c2 * QuadExt(RatFunc(Poly::var(loop_dot_ext_sym(b, e))));
  for (const auto& [b1, c1] : cfree)
    for (const auto& [b2, c2] : cfree) {
      if (b2 < b1) continue;
      QuadExt term = c1 * c2 * QuadExt(RatFunc(Poly::var(loop_dot_loop_sym(b1, b2))));
      if (b1 != b2) term *= QuadExt(Rational(2));
      acc += term;
    }
  // transverse squares and in-cluster crosses
  for (const auto& [a1, c1] : cperp)
    for (const auto& [a2, c2] : cperp) {
      if (a2 < a1) continue;
      Sym s = a1 == a2 ? perp_sq_sym(a1) : perp_cross_sym(a1, a2);
      QuadExt term = c1 * c2 * QuadExt(RatFunc(Poly::var(s)));
      if (a1 != a2) term *= QuadExt(Rational(2));
      acc += term;
    }
  // transverse x external: zero inside the declaring span, unrepresentable outside
  for (const auto& [a, cp] : cperp) {
    (void)cp;
    for (const auto& [e, ce] : cext) {
      (void)ce;
      if (!in_span(a, e))
        throw reduction_error("transverse part of q" + std::to_string(a) +
                              " dotted with external '" + e + "' outside its span");
    }
    if (!cfree.empty())
      throw reduction_error("transverse part of q" + std::to_string(a) +
                            " dotted with a free loop momentum");
  }
  return acc;
}

} // namespace pinchlab
