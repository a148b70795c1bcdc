#include <cmath>

#include "doctest.h"
#include "selfrec/wavelet.hpp"
#include "test_util.hpp"

using namespace selfrec;
using testutil::bit_equal;
using testutil::max_abs_diff;
using testutil::seeded_rand;

TEST_SUITE("wavelet") {

TEST_CASE("four pixel block matches hand arithmetic") {
  const double a = 0.7, b = -0.3, c = 0.25, d = 1.1;
  auto x = torch::tensor({a, b, c, d}, torch::kFloat64).reshape({1, 1, 2, 2});
  auto y = dwt_haar(x);
  REQUIRE(y.sizes() == torch::IntArrayRef({1, 4, 1, 1}));
  CHECK(std::abs(y[0][0][0][0].item<double>() - 0.5 * (a + b + c + d)) < 1e-15);
  CHECK(std::abs(y[0][1][0][0].item<double>() - 0.5 * (a + b - c - d)) < 1e-15);
  CHECK(std::abs(y[0][2][0][0].item<double>() - 0.5 * (a - b + c - d)) < 1e-15);
  CHECK(std::abs(y[0][3][0][0].item<double>() - 0.5 * (a - b - c + d)) < 1e-15);
}

TEST_CASE("constant one maps to LL=2 and zero details, bit exact") {
  auto x = torch::ones({2, 3, 8, 10});
  auto y = dwt_haar(x);
  REQUIRE(y.sizes() == torch::IntArrayRef({2, 12, 4, 5}));
  for (int c = 0; c < 3; ++c) {
    CHECK(bit_equal(y.index({torch::indexing::Slice(), 4 * c}),
                    torch::full({2, 4, 5}, 2.0f)));
    for (int k = 1; k < 4; ++k) {
      CHECK(bit_equal(y.index({torch::indexing::Slice(), 4 * c + k}),
                      torch::zeros({2, 4, 5})));
    }
  }
}

TEST_CASE("subbands of one channel stay grouped") {
  // channel i constant at i+1: only the LL slots 4i carry signal
  auto x = torch::stack({torch::full({6, 6}, 1.0f), torch::full({6, 6}, 2.0f),
                         torch::full({6, 6}, 3.0f)})
               .unsqueeze(0);
  auto y = dwt_haar(x);
  for (int c = 0; c < 3; ++c) {
    CHECK(max_abs_diff(y[0][4 * c], torch::full({3, 3}, 2.0f * (c + 1))) == 0.0);
  }
}

TEST_CASE("round trip is exact") {
  auto x32 = seeded_rand({2, 3, 16, 24}, 11);
  CHECK(max_abs_diff(iwt_haar(dwt_haar(x32)), x32) < 1e-6);
  auto x64 = seeded_rand({1, 3, 12, 8}, 12, torch::kFloat64);
  CHECK(max_abs_diff(iwt_haar(dwt_haar(x64)), x64) < 1e-14);
  // and in the other direction
  auto s = seeded_rand({1, 12, 5, 7}, 13, torch::kFloat64);
  CHECK(max_abs_diff(dwt_haar(iwt_haar(s)), s) < 1e-14);
}

TEST_CASE("transform preserves energy") {
  auto x = seeded_rand({1, 3, 32, 32}, 21, torch::kFloat64) - 0.5;
  auto y = dwt_haar(x);
  auto ex = x.square().sum().item<double>();
  auto ey = y.square().sum().item<double>();
  CHECK(std::abs(ex - ey) < 1e-10 * std::max(1.0, ex));
}

TEST_CASE("transform is linear") {
  auto x = seeded_rand({1, 3, 8, 8}, 31, torch::kFloat64);
  auto y = seeded_rand({1, 3, 8, 8}, 32, torch::kFloat64);
  CHECK(max_abs_diff(dwt_haar(2.0 * x - 3.0 * y),
                     2.0 * dwt_haar(x) - 3.0 * dwt_haar(y)) < 1e-13);
}

TEST_CASE("single image rank is preserved") {
  auto x = seeded_rand({3, 10, 14}, 41);
  auto y = dwt_haar(x);
  REQUIRE(y.sizes() == torch::IntArrayRef({12, 5, 7}));
  CHECK(max_abs_diff(iwt_haar(y), x) < 1e-6);
}

TEST_CASE("shape violations are rejected") {
  CHECK_THROWS_AS(dwt_haar(torch::zeros({1, 3, 5, 8})), ShapeError);
  CHECK_THROWS_AS(dwt_haar(torch::zeros({1, 3, 8, 7})), ShapeError);
  CHECK_THROWS_AS(dwt_haar(torch::zeros({8, 8})), ShapeError);
  CHECK_THROWS_AS(iwt_haar(torch::zeros({1, 7, 4, 4})), ShapeError);
}

TEST_CASE("gradients flow through analysis and synthesis") {
  auto x = seeded_rand({1, 3, 8, 8}, 51, torch::kFloat64).requires_grad_(true);
  auto y = iwt_haar(dwt_haar(x));
  y.square().sum().backward();
  // d/dx sum((iwt(dwt(x)))^2) = 2x for an orthogonal round trip
  CHECK(max_abs_diff(x.grad(), 2.0 * x.detach()) < 1e-12);
}

}  // TEST_SUITE
