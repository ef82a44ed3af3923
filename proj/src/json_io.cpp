#include "fbstab/json_io.hpp"

#include <json.hpp>
#include <sstream>

namespace fbstab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw std::runtime_error("problem field \"" + field + "\": " + why);
}

Vector parse_vector(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(field, "entry " + std::to_string(i) + " is not a number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of row arrays");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  if (rows > 0) {
    if (!j[0].is_array()) fail(field, "rows must be arrays");
    cols = j[0].size();
  }
  Matrix M(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      fail(field, "row " + std::to_string(i) + " has inconsistent length");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) fail(field, "entry is not a number");
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    }
  }
  return M;
}

DenseQP parse_dense(const json& j) {
  if (!j.contains("H")) fail("dense.H", "missing");
  if (!j.contains("f")) fail("dense.f", "missing");
  Matrix H = parse_matrix(j["H"], "dense.H");
  Vector f = parse_vector(j["f"], "dense.f");
  Matrix G;
  Vector h;
  if (j.contains("G") || j.contains("h")) {
    if (!j.contains("G")) fail("dense.G", "missing while h is present");
    if (!j.contains("h")) fail("dense.h", "missing while G is present");
    G = parse_matrix(j["G"], "dense.G");
    h = parse_vector(j["h"], "dense.h");
  }
  Matrix A;
  Vector b;
  if (j.contains("A") || j.contains("b")) {
    if (!j.contains("A")) fail("dense.A", "missing while b is present");
    if (!j.contains("b")) fail("dense.b", "missing while A is present");
    A = parse_matrix(j["A"], "dense.A");
    b = parse_vector(j["b"], "dense.b");
  }
  DenseQP p = make_dense_qp(std::move(H), std::move(f), std::move(G), std::move(h),
                            std::move(A), std::move(b));
  const auto diags = validate(p);
  if (!diags.empty()) fail("dense", diags.front());
  return p;
}

template <class T, class Fn>
std::vector<T> parse_stages(const json& j, const std::string& field, std::size_t want,
                            Fn&& one) {
  if (!j.is_array()) fail(field, "expected a per-stage array");
  if (j.size() != want) {
    fail(field, "expected " + std::to_string(want) + " stages, got " +
                    std::to_string(j.size()));
  }
  std::vector<T> out;
  out.reserve(want);
  for (std::size_t i = 0; i < want; ++i) {
    out.push_back(one(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

OcpQP parse_ocp(const json& j) {
  if (!j.contains("N") || !j["N"].is_number_integer()) fail("ocp.N", "missing integer");
  const int N = j["N"].get<int>();
  if (N < 0) fail("ocp.N", "must be nonnegative");
  for (const char* key : {"Q", "R", "S", "q", "r", "xi"}) {
    if (!j.contains(key)) fail(std::string("ocp.") + key, "missing");
  }
  if (N > 0) {
    for (const char* key : {"A", "B", "c"}) {
      if (!j.contains(key)) fail(std::string("ocp.") + key, "missing");
    }
  }
  OcpQP p;
  const std::size_t S1 = static_cast<std::size_t>(N) + 1;
  const std::size_t S0 = static_cast<std::size_t>(N);
  p.Q = parse_stages<Matrix>(j["Q"], "ocp.Q", S1, parse_matrix);
  p.R = parse_stages<Matrix>(j["R"], "ocp.R", S1, parse_matrix);
  p.S = parse_stages<Matrix>(j["S"], "ocp.S", S1, parse_matrix);
  p.q = parse_stages<Vector>(j["q"], "ocp.q", S1, parse_vector);
  p.r = parse_stages<Vector>(j["r"], "ocp.r", S1, parse_vector);
  if (N > 0) {
    p.A = parse_stages<Matrix>(j["A"], "ocp.A", S0, parse_matrix);
    p.B = parse_stages<Matrix>(j["B"], "ocp.B", S0, parse_matrix);
    p.c = parse_stages<Vector>(j["c"], "ocp.c", S0, parse_vector);
  }
  p.xi = parse_vector(j["xi"], "ocp.xi");
  const Eigen::Index nx = p.xi.size();
  const Eigen::Index nu = p.R.front().rows();
  if (j.contains("E") || j.contains("L") || j.contains("d")) {
    for (const char* key : {"E", "L", "d"}) {
      if (!j.contains(key)) fail(std::string("ocp.") + key, "missing");
    }
    p.E = parse_stages<Matrix>(j["E"], "ocp.E", S1, parse_matrix);
    p.L = parse_stages<Matrix>(j["L"], "ocp.L", S1, parse_matrix);
    p.d = parse_stages<Vector>(j["d"], "ocp.d", S1, parse_vector);
  } else {
    p.E.assign(S1, Matrix::Zero(0, nx));
    p.L.assign(S1, Matrix::Zero(0, nu));
    p.d.assign(S1, Vector::Zero(0));
  }
  // Zero-width blocks parsed as [] need reshaping against the stage dims.
  for (auto& E : p.E) if (E.size() == 0) E.resize(E.rows(), nx);
  for (auto& L : p.L) if (L.size() == 0) L.resize(L.rows(), nu);

  const auto diags = validate(p);
  if (!diags.empty()) fail("ocp", diags.front());
  return p;
}

json to_json(const Vector& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

json to_json(const Matrix& M) {
  json j = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    j.push_back(row);
  }
  return j;
}

}  // namespace

ParsedProblem parse_problem_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("invalid JSON: ") + e.what());
  }
  if (doc.contains("dense")) return parse_dense(doc["dense"]);
  if (doc.contains("ocp")) return parse_ocp(doc["ocp"]);
  throw std::runtime_error("problem field \"dense\" or \"ocp\": missing");
}

std::string problem_to_json(const DenseQP& p) {
  json j;
  j["dense"]["H"] = to_json(p.H);
  j["dense"]["f"] = to_json(p.f);
  if (p.num_equalities() > 0) {
    j["dense"]["G"] = to_json(p.G);
    j["dense"]["h"] = to_json(p.h);
  }
  if (p.num_inequalities() > 0) {
    j["dense"]["A"] = to_json(p.A);
    j["dense"]["b"] = to_json(p.b);
  }
  return j.dump();
}

std::string problem_to_json(const OcpQP& p) {
  json o;
  o["N"] = p.horizon();
  auto stage_list = [](const auto& blocks) {
    json j = json::array();
    for (const auto& blk : blocks) j.push_back(to_json(blk));
    return j;
  };
  o["Q"] = stage_list(p.Q);
  o["R"] = stage_list(p.R);
  o["S"] = stage_list(p.S);
  o["q"] = stage_list(p.q);
  o["r"] = stage_list(p.r);
  if (p.horizon() > 0) {
    o["A"] = stage_list(p.A);
    o["B"] = stage_list(p.B);
    o["c"] = stage_list(p.c);
  }
  if (p.num_stage_constraints() > 0) {
    o["E"] = stage_list(p.E);
    o["L"] = stage_list(p.L);
    o["d"] = stage_list(p.d);
  }
  o["xi"] = to_json(p.xi);
  json j;
  j["ocp"] = std::move(o);
  return j.dump();
}

}  // namespace fbstab
