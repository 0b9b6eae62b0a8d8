#include "msys/io.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace msys::io {

namespace {

void require_schema(const Json& j, std::string_view what) {
  if (!j.is_object()) throw ParseError(std::string(what) + ": expected a JSON object");
  if (!j.contains("schema_version") || !j.at("schema_version").is_string() ||
      j.at("schema_version").get<std::string>() != kSchemaVersion) {
    throw ParseError(std::string(what) + ": unsupported or missing schema_version (expected \"" +
                     std::string(kSchemaVersion) + "\")");
  }
}

Index read_count(const Json& j, const char* key, std::string_view what) {
  if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() < 0) {
    throw ParseError(std::string(what) + ": field '" + key + "' must be a nonnegative integer");
  }
  return static_cast<Index>(j.at(key).get<long long>());
}

std::vector<ComplexMatrix> read_list(const Json& j, const char* key, std::size_t n, Index rows,
                                     Index cols) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw ParseError(std::string("system: field '") + key + "' must be an array of matrices");
  }
  const Json& list = j.at(key);
  if (list.size() != n) {
    throw ParseError(std::string("system: list ") + key + " has length " +
                     std::to_string(list.size()) + ", expected n_params = " + std::to_string(n));
  }
  std::vector<ComplexMatrix> out;
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(matrix_from_json(list.at(k), rows, cols,
                                   std::string(key) + "[" + std::to_string(k) + "]"));
  }
  return out;
}

Json matrix_list(const std::vector<ComplexMatrix>& list) {
  Json out = Json::array();
  for (const auto& m : list) out.push_back(matrix_to_json(m));
  return out;
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j, Index rows, Index cols, std::string_view what) {
  const std::string label(what);
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) {
    throw ParseError(label + ": expected " + std::to_string(rows) + " rows");
  }
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ParseError(label + ": row " + std::to_string(i) + " must have " +
                       std::to_string(cols) + " entries");
    }
    for (Index c = 0; c < cols; ++c) {
      const Json& e = row.at(static_cast<std::size_t>(c));
      if (!e.is_array() || e.size() != 2 || !e.at(0).is_number() || !e.at(1).is_number()) {
        throw ParseError(label + ": entry (" + std::to_string(i) + ", " + std::to_string(c) +
                         ") must be a [re, im] pair");
      }
      m(i, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

Json system_to_json(const MultiSystem& s) {
  validate(s);
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["n_params"] = s.n_params;
  j["dim_x"] = s.dim_x;
  j["dim_u"] = s.dim_u;
  j["dim_y"] = s.dim_y;
  j["a"] = matrix_list(s.a);
  j["b"] = matrix_list(s.b);
  j["c"] = matrix_list(s.c);
  j["d"] = matrix_list(s.d);
  return j;
}

MultiSystem system_from_json(const Json& j) {
  require_schema(j, "system");
  MultiSystem s;
  const Index n = read_count(j, "n_params", "system");
  if (n < 1) throw ParseError("system: n_params must be at least 1");
  s.n_params = static_cast<std::size_t>(n);
  s.dim_x = read_count(j, "dim_x", "system");
  s.dim_u = read_count(j, "dim_u", "system");
  s.dim_y = read_count(j, "dim_y", "system");
  s.a = read_list(j, "a", s.n_params, s.dim_x, s.dim_x);
  s.b = read_list(j, "b", s.n_params, s.dim_x, s.dim_u);
  s.c = read_list(j, "c", s.n_params, s.dim_y, s.dim_x);
  s.d = read_list(j, "d", s.n_params, s.dim_y, s.dim_u);
  validate(s);
  return s;
}

Json germ_to_json(const PolyGerm& g) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["n_params"] = g.n_params();
  j["dim_u"] = g.dim_u();
  j["dim_y"] = g.dim_y();
  Json coeffs = Json::array();
  for (const auto& [t, m] : g.coefficients()) {
    Json entry;
    entry["index"] = t;
    entry["matrix"] = matrix_to_json(m);
    coeffs.push_back(std::move(entry));
  }
  j["coefficients"] = std::move(coeffs);
  return j;
}

PolyGerm germ_from_json(const Json& j) {
  require_schema(j, "germ");
  const Index n = read_count(j, "n_params", "germ");
  if (n < 1) throw ParseError("germ: n_params must be at least 1");
  PolyGerm g(static_cast<std::size_t>(n), read_count(j, "dim_u", "germ"),
             read_count(j, "dim_y", "germ"));
  if (!j.contains("coefficients") || !j.at("coefficients").is_array()) {
    throw ParseError("germ: field 'coefficients' must be an array");
  }
  for (const Json& entry : j.at("coefficients")) {
    if (!entry.is_object() || !entry.contains("index") || !entry.at("index").is_array()) {
      throw ParseError("germ: every coefficient needs an 'index' array");
    }
    MultiIndex t;
    for (const Json& v : entry.at("index")) {
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ParseError("germ: multi-index entries must be nonnegative integers");
      }
      t.push_back(static_cast<std::uint32_t>(v.get<long long>()));
    }
    if (t.size() != g.n_params()) {
      throw ParseError("germ: multi-index of length " + std::to_string(t.size()) +
                       ", expected " + std::to_string(g.n_params()));
    }
    if (!entry.contains("matrix")) throw ParseError("germ: coefficient without 'matrix'");
    g.add(t, matrix_from_json(entry.at("matrix"), g.dim_y(), g.dim_u(), "germ coefficient"));
  }
  return g;
}

Json subspace_to_json(const Subspace& s) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["ambient_dim"] = s.ambient_dim();
  j["dim"] = s.dim();
  j["basis"] = matrix_to_json(s.basis());
  return j;
}

Subspace subspace_from_json(const Json& j) {
  require_schema(j, "subspace");
  const Index ambient = read_count(j, "ambient_dim", "subspace");
  const Index dim = read_count(j, "dim", "subspace");
  if (dim > ambient) throw ParseError("subspace: dim exceeds ambient_dim");
  if (!j.contains("basis")) throw ParseError("subspace: missing 'basis'");
  const ComplexMatrix basis = matrix_from_json(j.at("basis"), ambient, dim, "subspace basis");
  try {
    return Subspace::from_orthonormal(basis);
  } catch (const ShapeError& e) {
    throw ParseError(std::string("subspace: ") + e.what());
  }
}

Json chain_to_json(const LinearFactorChain& chain) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["n_params"] = chain.n_params();
  j["space_dims"] = chain.space_dims();
  Json factors = Json::array();
  for (const auto& f : chain.factors()) factors.push_back(matrix_list(f));
  j["factors"] = std::move(factors);
  return j;
}

LinearFactorChain chain_from_json(const Json& j) {
  require_schema(j, "chain");
  const Index n = read_count(j, "n_params", "chain");
  if (!j.contains("space_dims") || !j.at("space_dims").is_array() || !j.contains("factors") ||
      !j.at("factors").is_array()) {
    throw ParseError("chain: needs 'space_dims' and 'factors' arrays");
  }
  const auto dims = j.at("space_dims").get<std::vector<Index>>();
  const Json& factors = j.at("factors");
  if (dims.size() != factors.size() + 1) {
    throw ParseError("chain: space_dims must have one more entry than factors");
  }
  std::vector<std::vector<ComplexMatrix>> out;
  for (std::size_t f = 0; f < factors.size(); ++f) {
    if (!factors.at(f).is_array() || static_cast<Index>(factors.at(f).size()) != n) {
      throw ParseError("chain: factor " + std::to_string(f + 1) + " needs n_params matrices");
    }
    std::vector<ComplexMatrix> comps;
    for (const Json& m : factors.at(f)) {
      comps.push_back(matrix_from_json(m, dims[f], dims[f + 1], "chain factor"));
    }
    out.push_back(std::move(comps));
  }
  try {
    return LinearFactorChain(static_cast<std::size_t>(n), std::move(out));
  } catch (const ShapeError& e) {
    throw ParseError(std::string("chain: ") + e.what());
  }
}

Json tail_to_json(const TailFunction& tail) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["rows"] = tail.constant.rows();
  j["cols"] = tail.constant.cols();
  j["constant"] = matrix_to_json(tail.constant);
  j["vanishing_part"] = system_to_json(tail.vanishing_part);
  return j;
}

Json complex_vector_to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(Json::array({v(i).real(), v(i).imag()}));
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open for reading");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error(path.string() + ": write failed");
}

namespace {

template <class F>
auto with_path(const std::filesystem::path& path, F&& parse) {
  try {
    return parse(read_json_file(path));
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path.string(), 0) == 0) throw;
    throw ParseError(path.string() + ": " + msg);
  } catch (const ShapeError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const NumericalError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace

MultiSystem read_system_file(const std::filesystem::path& path) {
  return with_path(path, [](const Json& j) { return system_from_json(j); });
}

void write_system_file(const std::filesystem::path& path, const MultiSystem& s) {
  write_json_file(path, system_to_json(s));
}

PolyGerm read_germ_file(const std::filesystem::path& path) {
  return with_path(path, [](const Json& j) { return germ_from_json(j); });
}

Subspace read_subspace_file(const std::filesystem::path& path) {
  return with_path(path, [](const Json& j) { return subspace_from_json(j); });
}

}  // namespace msys::io
