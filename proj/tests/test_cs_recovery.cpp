#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "clipcs/baselines.hpp"
#include "clipcs/channel.hpp"
#include "clipcs/cs_model.hpp"
#include "clipcs/ofdm.hpp"
#include "clipcs/reliability.hpp"
#include "support/fixtures.hpp"

using namespace clipcs;
using namespace clipcs::fixtures;

TEST_CASE("partial Fourier operator") {
  std::mt19937_64 rng(1);
  const int n = 64;
  const auto tones = random_tones(n, 20, rng);
  const PartialFourier op(n, tones);
  const CMat a = op.dense();

  CHECK((a * a.adjoint() - CMat::Identity(20, 20)).norm() < 1e-10);

  CVec u(n), v(20);
  for (int i = 0; i < n; ++i) u[i] = {std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng)};
  for (int i = 0; i < 20; ++i) v[i] = {std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng)};
  CHECK(std::abs(v.dot(op.apply(u)) - op.adjoint(v).dot(u)) < 1e-10);
  CHECK((op.apply(u) - a * u).norm() < 1e-10);
  CHECK((op.adjoint(v) - a.adjoint() * v).norm() < 1e-10);

  const CMat gram = a.adjoint() * a;
  const CVec g = op.gram_kernel();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) CHECK(std::abs(gram(i, j) - g[((i - j) % n + n) % n]) < 1e-12);
  }

  CHECK_THROWS_AS(PartialFourier(n, {}), InvalidInput);
  CHECK_THROWS_AS(PartialFourier(n, {1, 1}), InvalidInput);
  CHECK_THROWS_AS(PartialFourier(n, {64}), InvalidInput);
  CHECK(PartialFourier(n, {5, 2, 9}).tones() == std::vector<int>{2, 5, 9});
}

TEST_CASE("build_model examples") {
  std::mt19937_64 rng(2);
  const int n = 64;
  const double gamma = gamma_from_clip_level(2.0);
  const FrameState f = transmit(random_symbols(n, rng), gamma);
  const auto tones = random_tones(n, 24, rng);
  const CVec fc = dft(f.clip);

  SUBCASE("clean observations are the clip spectrum on the tones") {
    const CsModel model = clean_model(f, tones);
    for (int j = 0; j < 24; ++j) {
      CHECK(std::abs(model.observations[j] - fc[tones[static_cast<std::size_t>(j)]]) < 1e-12);
    }
  }
  SUBCASE("a decoding error shows up in the residual") {
    CVec decided = f.symbols;
    const int k = tones[3];
    const int wrong = (kQam.hard_decision(decided[k]).index + 1) % 16;
    const cplx e = kQam.point(wrong) - decided[k];
    decided[k] = kQam.point(wrong);
    const CsModel model = build_model(dft(f.clipped), decided, tones, unit_channel(n), gamma);
    CHECK(std::abs(model.observations[3] - fc[k] + e) < 1e-12);
  }
  SUBCASE("no clipping, no noise gives zero observations") {
    const FrameState g = transmit(f.symbols, 1e6);
    CHECK(clean_model(g, tones).observations.norm() < 1e-12);
  }
  SUBCASE("empty tone set") {
    CHECK_THROWS_AS(build_model(dft(f.clipped), f.symbols, {}, unit_channel(n), gamma), InvalidInput);
  }
  SUBCASE("true clip satisfies the phase model") {
    const CsModel model = clean_model(f, tones);
    for (int i = 0; i < n; ++i) {
      const cplx ratio = f.clip[i] / model.phase_terms[i];
      CHECK(std::abs(ratio.imag()) < 1e-12);
      CHECK(ratio.real() > -1e-12);
    }
    RVec a(n);
    for (int i = 0; i < n; ++i) a[i] = (f.clip[i] / model.phase_terms[i]).real();
    CHECK((model.augmented_apply(a) - model.observations).norm() < 1e-12);
  }
}

TEST_CASE("augmented operator identities") {
  std::mt19937_64 rng(3);
  const FrameState f = transmit(random_symbols(64, rng), gamma_from_clip_level(2.0));
  const CsModel model = clean_model(f, random_tones(64, 30, rng));
  RVec a(64);
  CVec y(30);
  std::normal_distribution<double> g;
  for (int i = 0; i < 64; ++i) a[i] = g(rng);
  for (int i = 0; i < 30; ++i) y[i] = {g(rng), g(rng)};
  // Re<y, Ψ̃ a> = <Re(Ψ̃^H y), a>
  CHECK(std::abs(y.dot(model.augmented_apply(a)).real() - model.augmented_adjoint(y).dot(a)) < 1e-10);
  const CVec r = model.augmented_apply(a);
  CHECK(std::abs(r.squaredNorm() - a.dot(model.augmented_gram() * a)) < 1e-10);
}

TEST_CASE("wpal: zero observations give a zero estimate") {
  std::mt19937_64 rng(4);
  const FrameState f = transmit(random_symbols(64, rng), 1e6);
  CsModel model = clean_model(f, random_tones(64, 16, rng));
  model.observations.setZero();
  const auto res = wpal_solve(model);
  CHECK(res.clip_estimate.norm() == 0.0);
  CHECK(res.support.empty());
}

TEST_CASE("wpal: full-tone noiseless inversion") {
  std::mt19937_64 rng(5);
  std::vector<int> all(64);
  std::iota(all.begin(), all.end(), 0);
  for (int t = 0; t < 20; ++t) {
    const FrameState f = transmit(random_symbols(64, rng), gamma_from_clip_level(2.0));
    const CsModel model = clean_model(f, all);
    // The full-measurement oracle Ψ^H Y' reproduces c.
    CHECK((model.op.adjoint(model.observations) - f.clip).norm() < 1e-12);
    const auto res = wpal_solve(model);
    CHECK((res.clip_estimate - f.clip).norm() <= 1e-6 * f.clip.norm());
    CHECK((res.amplitudes.array() >= 0.0).all());
  }
}

TEST_CASE("wpal: 3-sparse recovery from 32 random tones") {
  std::mt19937_64 rng(6);
  int exact = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const FrameState f = frame_with_clips(64, 3, rng);
    const CsModel model = clean_model(f, random_tones(64, 32, rng));
    const auto res = wpal_solve(model);
    const RVec ls = support_least_squares(model, f.support);
    exact += res.support == f.support && (res.amplitudes - ls).norm() < 1e-4 * ls.norm();
  }
  CHECK(exact >= 0.95 * trials);
}

TEST_CASE("wpal: support recovery above the measurement bound") {
  // m >= 4 k log(N/k) with k = 3.
  const int m = static_cast<int>(std::ceil(4.0 * 3.0 * std::log(64.0 / 3.0)));
  std::mt19937_64 rng(7);
  int exact = 0;
  for (int t = 0; t < 200; ++t) {
    const FrameState f = frame_with_clips(64, 3, rng);
    exact += wpal_solve(clean_model(f, random_tones(64, m, rng))).support == f.support;
  }
  CHECK(exact >= 180);
}

TEST_CASE("wpal: residual constraint, nonnegativity and monotone objective") {
  Rng rng(8);
  const double gamma = gamma_from_clip_level(2.0);
  int feasible = 0;
  for (int t = 0; t < 40; ++t) {
    std::mt19937_64 sym(100 + t);
    const FrameState f = transmit(random_symbols(64, sym), gamma);
    const auto ch = draw_channel(64, 8, noise_variance_for_snr(25.0, 4, 1.0 - clip_probability(gamma)), rng);
    const CVec eq = equalize(apply_channel(dft(f.clipped), ch, rng), ch);
    const auto dm = distortion_sigma(ch, gamma);
    const auto tones = select_tones(reliability_mag_phase(eq, kQam, dm).scores, 24);
    const CsModel model = build_model(eq, kQam.decide(eq), tones, ch, gamma);
    const auto res = wpal_solve(model);
    CHECK((res.amplitudes.array() >= 0.0).all());
    if (res.status == SolverStatus::converged) {
      ++feasible;
      const double r2 = (model.observations - model.op.apply(res.clip_estimate)).squaredNorm();
      CHECK(r2 <= default_epsilon(model) * (1.0 + 1e-9));
      CHECK(r2 == doctest::Approx(res.residual_norm * res.residual_norm));
    }

    const RMat g = model.augmented_gram();
    const RVec b = model.augmented_adjoint(model.observations);
    const double lambda = 0.1 * res.lambda + 1e-6;
    const auto p = wpal_penalized(g, b, model.observations.squaredNorm(), model.wpal_weights.cwiseMax(1e-12),
                                  lambda, RVec(), 500, 1e-10, true);
    for (std::size_t i = 1; i < p.objective_trace.size(); ++i) {
      CHECK(p.objective_trace[i] <= p.objective_trace[i - 1] + 1e-12 * (1.0 + std::abs(p.objective_trace[i - 1])));
    }
  }
  CHECK(feasible >= 30);
}

TEST_CASE("wpal rejects a non-positive epsilon") {
  std::mt19937_64 rng(9);
  const FrameState f = frame_with_clips(64, 3, rng);
  WpalOptions o;
  o.epsilon_scale = 0.0;
  CHECK_THROWS_AS(wpal_solve(clean_model(f, random_tones(64, 16, rng)), o), InvalidInput);
}

TEST_CASE("clip posterior") {
  const double gamma = gamma_from_clip_level(2.0);
  // Far below the threshold nothing is clipped, at the threshold nearly all is.
  CHECK(clip_posterior(0.3, gamma, 1e-4) < 1e-5);
  CHECK(clip_posterior(gamma, gamma, 1e-4) > 0.9);
  // With very noisy magnitudes the posterior falls back toward the prior.
  CHECK(std::abs(clip_posterior(gamma, gamma, 50.0) - clip_probability(gamma)) < 0.1);
  // Monotone on the way up to γ.
  double prev = 0.0;
  for (double r = 0.5; r <= gamma; r += 0.02) {
    const double p = clip_posterior(r, gamma, 1e-3);
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("bmp: zero observations give an empty support") {
  std::mt19937_64 rng(10);
  const FrameState f = transmit(random_symbols(64, rng), 1e6);
  CsModel model = clean_model(f, random_tones(64, 16, rng));
  model.gamma = gamma_from_clip_level(2.0);
  model.observations.setZero();
  BmpPriors p = default_bmp_priors(model, 1.0, BmpPrior::uniform);
  p.noise_variance = 1e-3;
  const auto res = bmp_solve(model, p);
  CHECK(res.support.empty());
  CHECK(res.clip_estimate.norm() == 0.0);
}

TEST_CASE("bmp: single clip is the first pick") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const FrameState f = frame_with_clips(64, 1, rng);
    const CsModel model = clean_model(f, random_tones(64, 16, rng));
    for (BmpPrior kind : {BmpPrior::uniform, BmpPrior::data_aided}) {
      BmpPriors p = default_bmp_priors(model, 1.0, kind);
      p.noise_variance = 1e-6;
      const auto res = bmp_solve(model, p);
      REQUIRE(!res.support.empty());
      CHECK(res.support.front() == f.support.front());
    }
  }
}

TEST_CASE("bmp metric equals the direct support posterior") {
  Rng rng(12);
  const double gamma = gamma_from_clip_level(2.0);
  for (int t = 0; t < 20; ++t) {
    std::mt19937_64 sym(200 + t);
    const FrameState f = transmit(random_symbols(64, sym), gamma);
    const auto ch = draw_channel(64, 8, noise_variance_for_snr(25.0, 4), rng);
    const CVec eq = equalize(apply_channel(dft(f.clipped), ch, rng), ch);
    const auto tones = select_tones(reliability_mag(eq, kQam, distortion_sigma(ch, gamma)).scores, 24);
    const CsModel model = build_model(eq, kQam.decide(eq), tones, ch, gamma);
    const BmpPriors p = default_bmp_priors(model);
    const auto res = bmp_solve(model, p);
    CHECK(res.log_posterior == doctest::Approx(support_log_posterior(model, res.support, p)).epsilon(1e-8));
  }
}

TEST_CASE("bmp matches exhaustive MAP on small problems") {
  // N = 16, m = 10, at most two clips, moderate noise.
  const int n = 16, m = 10;
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> clips(0, 2);
  const auto candidates = supports_up_to(n, 2);
  int agree = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    const int k = clips(rng);
    const FrameState f = k == 0 ? transmit(random_symbols(n, rng), 1e6) : frame_with_clips(n, k, rng);
    const double noise_var = 1e-3;
    const auto ch = unit_channel(n, noise_var);
    Rng nrng(rng());
    const CVec eq = equalize(apply_channel(dft(f.clipped), ch, nrng), ch);
    CsModel model = build_model(eq, f.symbols, random_tones(n, m, rng), ch, f.gamma);
    const BmpPriors p = default_bmp_priors(model, 1.0, t % 2 ? BmpPrior::uniform : BmpPrior::data_aided);
    BmpOptions o;
    o.max_support_fraction = 2.0 / m;
    auto got = bmp_solve(model, p, o).support;
    std::sort(got.begin(), got.end());

    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> map;
    for (const auto& s : candidates) {
      const double v = support_log_posterior(model, s, p);
      if (v > best) {
        best = v;
        map = s;
      }
    }
    agree += got == map;
  }
  CHECK(agree >= 0.95 * trials);
}

TEST_CASE("bmp validates priors") {
  std::mt19937_64 rng(14);
  const FrameState f = frame_with_clips(64, 2, rng);
  const CsModel model = clean_model(f, random_tones(64, 16, rng));
  BmpPriors p;
  p.activity = 1.0;
  CHECK_THROWS_AS(bmp_solve(model, p), InvalidInput);
  p.activity = 0.2;
  p.noise_variance = 0.0;
  CHECK_THROWS_AS(bmp_solve(model, p), InvalidInput);
  p.noise_variance = 1e-3;
  p.activity_map = RVec::Constant(3, 0.2);
  CHECK_THROWS_AS(bmp_solve(model, p), InvalidInput);
}

TEST_CASE("correct_and_decode") {
  std::mt19937_64 rng(15);
  const FrameState f = transmit(random_symbols(64, rng), gamma_from_clip_level(2.0));
  const CVec eq = dft(f.clipped);
  const auto truth = kQam.hard_decisions(f.symbols);
  CHECK(correct_and_decode(eq, f.clip, kQam) == truth);
  CHECK(correct_and_decode(eq, CVec::Zero(64), kQam) == zf_decode(eq, kQam));
  CHECK_THROWS_AS(correct(eq, CVec::Zero(3)), InvalidInput);
}

TEST_CASE("least squares on the true support beats ZF") {
  Rng rng(16);
  const double gamma = gamma_from_clip_level(2.0);
  const double es = 1.0 - clip_probability(gamma);
  long zf_errors = 0, ls_errors = 0;
  for (int t = 0; t < 500; ++t) {
    std::mt19937_64 sym(1000 + t);
    const FrameState f = transmit(random_symbols(64, sym), gamma);
    const auto truth = kQam.hard_decisions(f.symbols);
    const auto ch = draw_channel(64, 8, noise_variance_for_snr(25.0, 4, es), rng);
    const CVec eq = equalize(apply_channel(dft(f.clipped), ch, rng), ch);
    const auto tones = select_tones(reliability_mag_phase(eq, kQam, distortion_sigma(ch, gamma)).scores, 32);
    const CsModel model = build_model(eq, kQam.decide(eq), tones, ch, gamma);
    const RVec a = support_least_squares(model, f.support);
    const auto zf = zf_decode(eq, kQam);
    const auto ls = correct_and_decode(eq, model.to_clip(a), kQam);
    for (int k = 0; k < 64; ++k) {
      zf_errors += zf[static_cast<std::size_t>(k)] != truth[static_cast<std::size_t>(k)];
      ls_errors += ls[static_cast<std::size_t>(k)] != truth[static_cast<std::size_t>(k)];
    }
  }
  CHECK(ls_errors < zf_errors);
}
