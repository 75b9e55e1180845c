#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "l2d/nn.hpp"
#include "support/gradcheck.hpp"

using namespace l2d;
using nn::Activation;
using nn::LayerKind;
using nn::LayerSpec;
using nn::Mat;
using nn::Vec;

namespace {

nn::Model dense_model(int in, int out, Activation act, uint64_t seed) {
  Rng rng(seed);
  return nn::build_model({{LayerKind::Dense, in, out, act, 0}}, rng);
}

}  // namespace

TEST_CASE("zero-weight dense stack outputs its bias") {
  nn::Model m = dense_model(3, 2, Activation::Identity, 1);
  m.params[0][0].value.setZero();
  m.params[0][1].value << 0.5, -1.25;
  Vec out = nn::forward_single(m, Mat::Random(1, 3), true);
  CHECK(out(0) == 0.5);
  CHECK(out(1) == -1.25);
}

TEST_CASE("single-step recurrent input equals one cell application") {
  Rng rng(4);
  nn::Model m = nn::build_model(
      {{LayerKind::Recurrent, 3, 4, Activation::Identity, 0}}, rng);
  Mat x = gradcheck::random_mat(1, 3, rng);
  Vec out = nn::forward_single(m, x);

  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  const Mat& Wz = m.params[0][0].value;
  const Mat& bz = m.params[0][2].value;
  const Mat& Wc = m.params[0][6].value;
  const Mat& bc = m.params[0][8].value;
  // h0 = 0, so the reset gate cannot matter and h1 = z * tanh(Wc x + bc)
  for (int i = 0; i < 4; ++i) {
    const double z = sig((Wz * x.transpose())(i, 0) + bz(i, 0));
    const double c = std::tanh((Wc * x.transpose())(i, 0) + bc(i, 0));
    CHECK(out(i) == doctest::Approx(z * c).epsilon(1e-12));
  }
}

TEST_CASE("recurrent stacks are order sensitive") {
  // permuting interior steps changes the output for generic random weights
  int changed = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    nn::Model m = nn::build_model(
        {{LayerKind::Recurrent, 3, 6, Activation::Identity, 0},
         {LayerKind::SelfAttentionCls, 6, 6, Activation::Identity, 0}},
        rng);
    Mat x = gradcheck::random_mat(8, 3, rng);
    Mat px = x;
    px.row(2).swap(px.row(5));
    Vec a = nn::forward_single(m, x);
    Vec b = nn::forward_single(m, px);
    if ((a - b).norm() > 1e-9) changed++;
  }
  CHECK(changed == 100);
}

TEST_CASE("triplet margin loss values") {
  Vec a(2), p(2), n(2);
  SUBCASE("satisfied margin is flat zero") {
    a << 1, 1;
    p = a;
    n << 1, 3;  // |a-n| = 2
    CHECK(nn::triplet_margin_loss(a, p, n, 1.0) == 0.0);
  }
  SUBCASE("anchor equal to negative") {
    a << 0, 0;
    p << 0, 2;  // |a-p| = 2
    n = a;
    CHECK(nn::triplet_margin_loss(a, p, n, 1.0) == doctest::Approx(3.0));
  }
  SUBCASE("total collapse gives the margin") {
    a << 0.3, -0.7;
    CHECK(nn::triplet_margin_loss(a, a, a, 1.0) == doctest::Approx(1.0));
    CHECK(nn::triplet_margin_loss(a, a, a, 0.25) == doctest::Approx(0.25));
  }
}

TEST_CASE("triplet loss gradient is zero inside the satisfied region") {
  Mat a(1, 3), p(1, 3), n(1, 3);
  a << 0, 0, 0;
  p << 0.1, 0, 0;
  n << 5, 0, 0;
  auto res = nn::triplet_margin_loss_batch(a, p, n, 1.0);
  CHECK(res.mean_loss == 0.0);
  CHECK(res.grad_a.norm() == 0.0);
  CHECK(res.grad_p.norm() == 0.0);
  CHECK(res.grad_n.norm() == 0.0);
}

TEST_CASE("ranking loss closed-form values") {
  // frozen oracle values, computed independently to >= 15 digits
  CHECK(nn::ranking_loss(1.0, 0.0, 0.0) ==
        doctest::Approx(0.31326168751822283).epsilon(1e-12));
  CHECK(nn::ranking_loss(1.0, 0.0, 0.1) ==
        doctest::Approx(0.41326168751822284).epsilon(1e-12));
  // equal scores: ln 2 for any label noise
  for (double eps : {0.0, 0.1, 0.3, 0.49}) {
    CHECK(nn::ranking_loss(2.5, 2.5, eps) ==
          doctest::Approx(0.6931471805599453).epsilon(1e-12));
  }
  // saturation towards zero loss
  CHECK(nn::ranking_loss(60.0, 0.0, 0.0) < 1e-20);
  CHECK(nn::ranking_loss(1e6, 0.0, 0.0) >= 0.0);
  CHECK(std::isfinite(nn::ranking_loss(-1e6, 1e6, 0.1)));
}

TEST_CASE("ranking loss bounds") {
  // eps = 0: loss >= 0 everywhere
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const double sb = rng.uniform(-20, 20), sw = rng.uniform(-20, 20);
    CHECK(nn::ranking_loss(sb, sw, 0.0) >= 0.0);
    // eps > 0: the infimum is the binary entropy of eps
    const double inf01 = 0.32508297339144824;
    CHECK(nn::ranking_loss(sb, sw, 0.1) >= inf01 - 1e-12);
  }
}

TEST_CASE("ranking loss depends only on the score gap") {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const double sb = rng.uniform(-3, 3), sw = rng.uniform(-3, 3);
    const double c = rng.uniform(-5, 5);
    CHECK(nn::ranking_loss(sb + c, sw + c, 0.1) ==
          doctest::Approx(nn::ranking_loss(sb, sw, 0.1)).epsilon(1e-9));
  }
}

TEST_CASE("ranking loss gradient at equal scores is a half either way") {
  Vec b(1), w(1);
  b << 1.5;
  w << 1.5;
  auto res = nn::ranking_loss_batch(b, w, 0.0);
  CHECK(res.grad_better(0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(res.grad_worse(0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("adam optimizer behavior") {
  SUBCASE("zero gradient is a fixed point") {
    nn::Model m = dense_model(2, 2, Activation::Identity, 3);
    nn::Model before = m;
    nn::AdamState st = nn::make_adam_state(m);
    nn::zero_grads(m);
    nn::adam_step(m, st, {0.1, 0.9, 0.999, 1e-8});
    CHECK(m == before);
  }
  SUBCASE("first step with unit gradient moves by lr/(1+eps)") {
    Rng rng(1);
    nn::Model m = nn::build_model({{LayerKind::Dense, 1, 1, Activation::Identity, 0}}, rng);
    const double w0 = m.params[0][0].value(0, 0);
    nn::AdamState st = nn::make_adam_state(m);
    m.params[0][0].value(0, 0) = w0;
    m.params[0][0].grad(0, 0) = 1.0;
    m.params[0][1].grad(0, 0) = 0.0;
    nn::adam_step(m, st, {0.1, 0.9, 0.999, 1e-8});
    const double delta = m.params[0][0].value(0, 0) - w0;
    CHECK(delta == doctest::Approx(-0.1 / (1.0 + 1e-8)).epsilon(1e-14));
  }
  SUBCASE("constant gradient drives the step size to lr") {
    Rng rng(2);
    nn::Model m = nn::build_model({{LayerKind::Dense, 1, 1, Activation::Identity, 0}}, rng);
    nn::AdamState st = nn::make_adam_state(m);
    double prev = m.params[0][0].value(0, 0);
    double last_step = 0;
    for (int i = 0; i < 400; ++i) {
      m.params[0][0].grad(0, 0) = 2.5;  // constant direction and size
      m.params[0][1].grad(0, 0) = 0.0;
      nn::adam_step(m, st, {0.01, 0.9, 0.999, 1e-8});
      last_step = std::abs(m.params[0][0].value(0, 0) - prev);
      prev = m.params[0][0].value(0, 0);
    }
    CHECK(last_step == doctest::Approx(0.01).epsilon(0.01));
  }
}

TEST_CASE("forward is pure and deterministic") {
  Rng rng(5);
  nn::Model m = nn::build_model(
      {{LayerKind::Recurrent, 4, 6, Activation::Identity, 0},
       {LayerKind::SelfAttentionCls, 6, 6, Activation::Identity, 0},
       {LayerKind::Dense, 6, 3, Activation::Tanh, 0}},
      rng);
  Mat x = gradcheck::random_mat(10, 4, rng);
  Vec a = nn::forward_single(m, x);
  Vec b = nn::forward_single(m, x);
  CHECK((a.array() == b.array()).all());
  for (int i = 0; i < a.size(); ++i) CHECK(std::isfinite(a(i)));
}

TEST_CASE("shape mismatches are rejected") {
  Rng rng(6);
  nn::Model m = nn::build_model({{LayerKind::Dense, 4, 2, Activation::Identity, 0}}, rng);
  CHECK_THROWS_AS(nn::forward_single(m, Mat::Random(1, 3), true), DataError);
  nn::Model r = nn::build_model({{LayerKind::Recurrent, 4, 2, Activation::Identity, 0}}, rng);
  CHECK_THROWS_AS(nn::forward_single(r, Mat::Random(5, 4)), DataError);  // unpooled sequence out
}

TEST_CASE("flatten validates the step count") {
  Rng rng(7);
  nn::Model m = nn::build_model(
      {{LayerKind::Flatten, 3, 12, Activation::Identity, 4},
       {LayerKind::Dense, 12, 2, Activation::Identity, 0}},
      rng);
  CHECK_NOTHROW(nn::forward_single(m, Mat::Random(4, 3)));
  CHECK_THROWS_AS(nn::forward_single(m, Mat::Random(5, 3)), DataError);
}

TEST_CASE("model container round-trips bit-exactly") {
  Rng rng(11);
  nn::Model m = nn::build_model(
      {{LayerKind::Recurrent, 5, 7, Activation::Identity, 0},
       {LayerKind::SelfAttentionCls, 7, 7, Activation::Identity, 0},
       {LayerKind::Dense, 7, 4, Activation::Tanh, 0},
       {LayerKind::Dense, 4, 2, Activation::Identity, 0}},
      rng);
  const std::string text = nn::model_to_json(m);
  nn::Model back = nn::model_from_json(text);
  CHECK(m == back);
  CHECK(nn::model_to_json(back) == text);
  CHECK_THROWS_AS(nn::model_from_json("{}"), DataError);
  CHECK_THROWS_AS(nn::model_from_json("not json"), DataError);
}

TEST_CASE("analytic gradients match central finite differences") {
  double worst = 0;
  std::string failure;
  const bool ok = gradcheck::run_full_sweep(/*instances=*/20, /*tol=*/1e-4,
                                            &worst, &failure);
  INFO("worst rel err ", worst, " ", failure);
  CHECK(ok);
  CHECK(worst < 1e-4);
}
