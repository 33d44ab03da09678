#include "proxcert/instances.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "proxcert/errors.hpp"
#include "proxcert/random.hpp"

namespace proxcert {

namespace {

using nlohmann::json;

constexpr const char* kInstanceFormat = "proxcert-instance/1";

// Haar-distributed orthonormal columns: QR of a Gaussian matrix with the
// signs of R's diagonal folded into Q.
Matrix haar_columns(Rng& rng, Index rows, Index cols) {
  const Matrix g = rng.normal_matrix(rows, cols);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix& packed = qr.matrixQR();
  for (Index j = 0; j < cols; ++j) {
    if (packed(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + " must be an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(std::string(what) + " must contain only numbers");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

PaperInstance build_paper_instance() {
  return {build_tridiagonal_instance(kPaperDimension, kPaperDiagonal, kPaperOffDiagonal, 1.0,
                                     kPaperLambda),
          kPaperStep,
          "tridiagonal(500; diag 2, offdiag 1), b = ones, lambda = 1e-6, step 0.05"};
}

CompositeProblem build_tridiagonal_instance(Index n, double diag, double offdiag, double b_fill,
                                            double lambda) {
  const Spectrum sp = tridiagonal_spectrum(n, diag, offdiag);
  return make_lasso(LinearOperator::symmetric_tridiagonal(n, diag, offdiag),
                    Vector::Constant(n, b_fill), lambda, sp.mu, sp.lipschitz);
}

CompositeProblem build_random_lasso(Index m, Index d, double mu_target, double lipschitz_target,
                                    std::uint64_t seed, double lambda) {
  if (d < 1) throw InvalidArgument("random lasso: d must be >= 1");
  if (m < d) throw InvalidArgument("random lasso: m < d leaves A^T A singular");
  if (!(mu_target > 0.0) || !(mu_target <= lipschitz_target)) {
    throw InvalidArgument("random lasso: need 0 < mu_target <= L_target");
  }
  if (d == 1 && mu_target != lipschitz_target) {
    throw InvalidArgument("random lasso: d = 1 has a single singular value, need mu == L");
  }

  Rng rng(seed);
  const Matrix u = haar_columns(rng, m, d);
  const Matrix v = haar_columns(rng, d, d);
  Vector sigma(d);
  const double lo = std::sqrt(mu_target);
  const double hi = std::sqrt(lipschitz_target);
  for (Index i = 0; i < d; ++i) {
    sigma(i) = d == 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(d - 1);
  }
  Matrix a = u * sigma.asDiagonal() * v.transpose();
  Vector b = rng.normal_vector(m);
  return make_lasso(LinearOperator::dense(std::move(a)), std::move(b), lambda, mu_target,
                    lipschitz_target);
}

std::string serialize_instance(const CompositeProblem& problem) {
  const LassoData* data = problem.lasso();
  if (data == nullptr) throw InvalidArgument("only lasso instances can be serialized");
  json j;
  j["format"] = kInstanceFormat;
  if (const auto* t = data->a.tridiagonal()) {
    j["operator"] = {{"kind", "tridiagonal"}, {"n", t->n}, {"diag", t->diag}, {"offdiag", t->offdiag}};
  } else {
    const Matrix& a = data->a.dense_matrix()->a;
    json rows = json::array();
    for (Index i = 0; i < a.rows(); ++i) rows.push_back(vector_to_json(a.row(i).transpose()));
    j["operator"] = {{"kind", "dense"}, {"rows", rows}};
  }
  j["b"] = vector_to_json(data->b);
  j["lambda"] = data->lambda;
  j["mu"] = problem.mu();
  j["L"] = problem.lipschitz();
  return j.dump(1) + "\n";
}

CompositeProblem parse_instance(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("instance: ") + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("operator") || !j.contains("b")) {
      throw ParseError("instance: needs \"operator\" and \"b\"");
    }
    const json& op = j.at("operator");
    const std::string kind = op.at("kind").get<std::string>();
    std::optional<LinearOperator> a;
    if (kind == "tridiagonal") {
      a = LinearOperator::symmetric_tridiagonal(op.at("n").get<Index>(), op.at("diag").get<double>(),
                                                op.at("offdiag").get<double>());
    } else if (kind == "dense") {
      const json& rows = op.at("rows");
      if (!rows.is_array() || rows.empty()) throw ParseError("instance: dense rows must be non-empty");
      const Index m = static_cast<Index>(rows.size());
      const Index d = static_cast<Index>(rows[0].size());
      Matrix mat(m, d);
      for (Index i = 0; i < m; ++i) {
        const Vector row = vector_from_json(rows[static_cast<std::size_t>(i)], "dense row");
        if (row.size() != d) throw ShapeError("instance: ragged dense rows");
        mat.row(i) = row.transpose();
      }
      a = LinearOperator::dense(std::move(mat));
    } else {
      throw ParseError("instance: unknown operator kind '" + kind + "'");
    }
    Vector b = vector_from_json(j.at("b"), "b");
    const double lambda = j.value("lambda", 0.0);
    double mu = 0.0;
    double lipschitz = 0.0;
    if (j.contains("mu") && j.contains("L")) {
      mu = j.at("mu").get<double>();
      lipschitz = j.at("L").get<double>();
    } else {
      const Spectrum sp = operator_spectrum(*a);
      mu = sp.mu;
      lipschitz = sp.lipschitz;
    }
    return make_lasso(std::move(*a), std::move(b), lambda, mu, lipschitz);
  } catch (const json::exception& e) {
    throw ParseError(std::string("instance: ") + e.what());
  }
}

void save_instance(const CompositeProblem& problem, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize_instance(problem);
  if (!out) throw IoError("write failed for " + path.string());
}

CompositeProblem load_instance(const std::filesystem::path& path) {
  return parse_instance(read_file(path));
}

Vector load_vector(const std::filesystem::path& path) {
  try {
    return vector_from_json(json::parse(read_file(path)), "vector file");
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace proxcert
