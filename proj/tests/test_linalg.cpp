#include <doctest.h>

#include <cmath>

#include "celltide/error.hpp"
#include "celltide/linalg.hpp"
#include "celltide/rng.hpp"

using namespace celltide::linalg;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, celltide::Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.span()) v = rng.uniform(-1.0, 1.0);
  return m;
}

}  // namespace

TEST_CASE("matmul") {
  const Matrix m{{1, 2}, {3, 4}};
  CHECK(matmul(Matrix::identity(2), m) == m);
  CHECK(matmul(Matrix(2, 2), m) == Matrix(2, 2));
  CHECK(matmul(m, Matrix{{5}, {6}}) == Matrix{{17}, {39}});
}

TEST_CASE("matmul rejects mismatched shapes and names both") {
  try {
    matmul(Matrix(2, 3), Matrix(2, 2));
    FAIL("expected an error");
  } catch (const celltide::Error& e) {
    const std::string what = e.what();
    CHECK(what.find("2x3") != std::string::npos);
    CHECK(what.find("2x2") != std::string::npos);
  }
}

TEST_CASE("matmul is associative on random matrices") {
  celltide::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = 1 + rng.below(5), k = 1 + rng.below(5), m = 1 + rng.below(5), l = 1 + rng.below(5);
    const Matrix a = random_matrix(n, k, rng), b = random_matrix(k, m, rng), c = random_matrix(m, l, rng);
    const Matrix left = matmul(matmul(a, b), c);
    const Matrix right = matmul(a, matmul(b, c));
    for (std::size_t i = 0; i < left.size(); ++i) CHECK(std::abs(left.span()[i] - right.span()[i]) <= 1e-9);
  }
}

TEST_CASE("matvec agrees with matmul against a column") {
  celltide::Rng rng(3);
  const Matrix a = random_matrix(7, 9, rng);
  Vector x(9);
  for (std::size_t i = 0; i < 9; ++i) x[i] = rng.uniform(-1, 1);
  const Vector y = matvec(a, x);
  const Matrix col = matmul(a, Matrix(9, 1, x.values()));
  for (std::size_t i = 0; i < 7; ++i) CHECK(y[i] == doctest::Approx(col(i, 0)).epsilon(1e-14));

  const Vector yt = matvec_transposed(a, Vector(std::vector<double>(7, 1.0)));
  for (std::size_t j = 0; j < 9; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < 7; ++i) s += a(i, j);
    CHECK(yt[j] == doctest::Approx(s).epsilon(1e-14));
  }
  CHECK_THROWS_AS(matvec(a, Vector(8)), celltide::Error);
}

TEST_CASE("sigmoid values") {
  CHECK(sigmoid(Vector{0.0})[0] == 0.5);
  CHECK(std::abs(sigmoid(Vector{2.0})[0] - 0.8807970779778823) <= 1e-15);
  celltide::Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform(-30, 30);
    const Vector s = sigmoid(Vector{x, -x});
    CHECK(s[1] == doctest::Approx(1.0 - s[0]).epsilon(1e-12));
  }
}

TEST_CASE("sigmoid stays strictly inside (0,1) and is monotone over [-700, 700]") {
  double prev = 0.0;
  for (double x = -700.0; x <= 700.0; x += 0.25) {
    const double s = sigmoid(x);
    REQUIRE(s > 0.0);
    REQUIRE(s < 1.0);
    REQUIRE(s >= prev);
    prev = s;
  }
}

TEST_CASE("tanh and relu") {
  CHECK(tanh_act(Vector{0.0})[0] == 0.0);
  CHECK(std::abs(tanh_act(Vector{0.5})[0] - 0.46211715726000974) <= 1e-16);
  CHECK(relu(Vector{-3, 0, 3}) == Vector{0, 0, 3});
  const Vector saturated = tanh_act(Vector{-50.0, 50.0});
  CHECK(saturated[0] > -1.0);
  CHECK(saturated[1] < 1.0);
}

TEST_CASE("elementwise helpers") {
  CHECK(hadamard(Vector{1, 2}, Vector{3, 4}) == Vector{3, 8});
  CHECK(vec_add(Vector{1, 2}, Vector{0, 0}) == Vector{1, 2});
  CHECK(concat(Vector{1}, Vector{2, 3}) == Vector{1, 2, 3});
  CHECK_THROWS_AS(hadamard(Vector{1}, Vector{1, 2}), celltide::Error);
  CHECK_THROWS_AS(vec_add(Vector{1}, Vector{1, 2}), celltide::Error);

  celltide::Rng rng(9);
  Vector a(6), b(6);
  for (std::size_t i = 0; i < 6; ++i) {
    a[i] = rng.uniform(-5, 5);
    b[i] = rng.uniform(-5, 5);
  }
  CHECK(hadamard(a, b) == hadamard(b, a));
  CHECK(vec_add(a, b) == vec_add(b, a));
}

TEST_CASE("operations are pure") {
  celltide::Rng rng(21);
  const Matrix a = random_matrix(4, 4, rng);
  const Matrix b = random_matrix(4, 4, rng);
  CHECK(matmul(a, b) == matmul(a, b));
  const Vector v{0.3, -1.2, 4.0};
  CHECK(sigmoid(v) == sigmoid(v));
  CHECK(tanh_act(v) == tanh_act(v));
}
