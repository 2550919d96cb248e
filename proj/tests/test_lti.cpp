#include "loopsynth/lti.hpp"

#include <cmath>
#include <complex>

#include "doctest.h"
#include "test_util.hpp"

using namespace loopsynth;
namespace lt = loopsynth::testing;

namespace {

RationalTF tf(std::initializer_list<double> num, std::initializer_list<double> den) {
  VectorXd n(static_cast<int>(num.size())), d(static_cast<int>(den.size()));
  int i = 0;
  for (double v : num) n(i++) = v;
  i = 0;
  for (double v : den) d(i++) = v;
  return RationalTF(n, d);
}

}  // namespace

TEST_CASE("tf_to_ss: first-order canonical form") {
  const StateSpace g = tf_to_ss(tf({1.0}, {1.0, 1.0}));
  CHECK(g.states() == 1);
  CHECK(g.A(0, 0) == doctest::Approx(-1.0));
  CHECK(g.B(0, 0) == doctest::Approx(1.0));
  CHECK(g.C(0, 0) == doctest::Approx(1.0));
  CHECK(g.D(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("tf_to_ss: constant gain is a zero-state system") {
  const StateSpace g = tf_to_ss(RationalTF::constant(3.5));
  CHECK(g.states() == 0);
  CHECK(g.D(0, 0) == doctest::Approx(3.5));
}

TEST_CASE("tf_to_ss: realization matches direct rational evaluation") {
  const RationalTF g = tf({1.0, 2.0}, {1.0, 3.0, 4.0});
  const StateSpace ss = tf_to_ss(g);
  for (double w : {0.1, 1.0, 10.0, 250.0}) {
    const auto got = eval_response(ss, w)(0, 0);
    const auto want = g.eval(std::complex<double>(0.0, w));
    CHECK(std::abs(got - want) < 1e-12);
  }
}

TEST_CASE("tf_to_ss: rejects improper transfer functions") {
  CHECK_THROWS_AS(tf_to_ss(tf({1.0, 0.0, 0.0}, {1.0, 1.0})),
                  std::invalid_argument);
}

TEST_CASE("series with identity leaves the response unchanged") {
  const StateSpace g = lt::random_stable_siso(3);
  const StateSpace gi = series(g, StateSpace::identity(1));
  for (double w : {0.5, 5.0, 50.0}) {
    CHECK(std::abs(eval_response(g, w)(0, 0) - eval_response(gi, w)(0, 0)) <
          1e-12);
  }
}

TEST_CASE("series response equals the pointwise product") {
  for (int trial = 0; trial < 10; ++trial) {
    const StateSpace g1 = lt::random_stable_siso(1 + trial % 3);
    const StateSpace g2 = lt::random_stable_siso(1 + (trial + 1) % 3);
    const StateSpace s = series(g1, g2);
    for (double w : {0.3, 3.0, 30.0, 300.0}) {
      const auto want = eval_response(g2, w)(0, 0) * eval_response(g1, w)(0, 0);
      CHECK(std::abs(eval_response(s, w)(0, 0) - want) < 1e-10);
    }
  }
}

TEST_CASE("feedback: integrator under unity feedback gives 1/(s+1)") {
  const StateSpace g = tf_to_ss(tf({1.0}, {1.0, 0.0}));
  const StateSpace cl = feedback(g, StateSpace::identity(1));
  const RationalTF want = tf({1.0}, {1.0, 1.0});
  for (double w : {0.1, 1.0, 10.0}) {
    CHECK(std::abs(eval_response(cl, w)(0, 0) -
                   want.eval(std::complex<double>(0, w))) < 1e-12);
  }
}

TEST_CASE("feedback: closed-loop poles match the root oracle") {
  for (int trial = 0; trial < 10; ++trial) {
    const StateSpace g = lt::random_stable_siso(2);
    const double k = 0.3 + 0.2 * trial;
    const StateSpace cl = feedback(g, StateSpace::static_gain(
                                          MatrixXd::Constant(1, 1, k)));
    // Oracle: poles are roots of den + k num of the transfer function.
    const RationalTF gtf = lt::ss_to_tf(g);
    VectorXd closed_den = gtf.den;
    closed_den.tail(gtf.num.size()) += k * gtf.num;
    auto want = polynomial_roots(closed_den);
    auto got = cl.poles();
    std::sort(want.data(), want.data() + want.size(),
              [](auto a, auto b) { return a.real() < b.real(); });
    std::sort(got.data(), got.data() + got.size(),
              [](auto a, auto b) { return a.real() < b.real(); });
    for (int i = 0; i < got.size(); ++i) {
      CHECK(std::abs(got(i) - want(i)) < 1e-8);
    }
  }
}

TEST_CASE("feedback: algebraic loop rejected") {
  const StateSpace g = StateSpace::static_gain(MatrixXd::Constant(1, 1, 1.0));
  const StateSpace h = StateSpace::static_gain(MatrixXd::Constant(1, 1, -1.0));
  CHECK_THROWS_AS(feedback(g, h, FeedbackSign::kNegative),
                  std::invalid_argument);
}

TEST_CASE("freq_response: first-order analytic point") {
  const StateSpace g = tf_to_ss(tf({1.0}, {1.0, 1.0}));
  const FreqResponse fr = freq_response(g, {1.0});
  const auto v = fr.values[0](0, 0);
  CHECK(std::abs(v) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::arg(v) * 180.0 / M_PI == doctest::Approx(-45.0).epsilon(1e-9));
}

TEST_CASE("freq_response: static gain is flat with zero phase") {
  const StateSpace g = StateSpace::static_gain(MatrixXd::Constant(1, 1, 2.5));
  const FreqResponse fr = freq_response(g, make_log_grid({1e-1, 1e3, 10}));
  for (const auto& v : fr.values) {
    CHECK(v(0, 0).real() == doctest::Approx(2.5));
    CHECK(v(0, 0).imag() == doctest::Approx(0.0));
  }
}

TEST_CASE("freq_response: matches pole-zero rational evaluation") {
  for (int trial = 0; trial < 5; ++trial) {
    const StateSpace g = lt::random_stable_siso(3);
    const RationalTF gtf = lt::ss_to_tf(g);
    for (double w : {0.2, 2.0, 20.0, 200.0}) {
      const auto got = eval_response(g, w)(0, 0);
      const auto want = gtf.eval(std::complex<double>(0, w));
      CHECK(std::abs(got - want) < 1e-10 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("freq_response: imaginary-axis pole marks entries invalid") {
  // Undamped oscillator at 1 rad/s.
  MatrixXd A(2, 2), B(2, 1), C(1, 2), D(1, 1);
  A << 0, 1, -1, 0;
  B << 0, 1;
  C << 1, 0;
  D << 0;
  const StateSpace g(A, B, C, D);
  const FreqResponse fr = freq_response(g, {0.5, 1.0, 2.0});
  CHECK(fr.valid[0]);
  CHECK_FALSE(fr.valid[1]);
  CHECK(fr.valid[2]);
}

TEST_CASE("is_stable") {
  CHECK(is_stable(tf_to_ss(tf({1.0}, {1.0, 1.0})), 0.0));
  CHECK_FALSE(is_stable(tf_to_ss(tf({1.0}, {1.0, 0.0})), 1e-6));
  CHECK(is_stable(StateSpace::static_gain(MatrixXd::Ones(1, 1)), 0.0));
}

TEST_CASE("bandwidth_3db: definitional first-order case") {
  const double wc = 123.0;
  const StateSpace g = tf_to_ss(tf({1.0}, {1.0 / wc, 1.0}));
  const auto bw = bandwidth_3db(g);
  REQUIRE(bw.has_value());
  CHECK(*bw == doctest::Approx(wc).epsilon(2e-4));
}

TEST_CASE("bandwidth_3db: Butterworth second order crosses at omega_c") {
  const double wc = 40.0;
  const StateSpace g =
      tf_to_ss(tf({wc * wc}, {1.0, std::sqrt(2.0) * wc, wc * wc}));
  const auto bw = bandwidth_3db(g);
  REQUIRE(bw.has_value());
  CHECK(*bw == doctest::Approx(wc).epsilon(2e-4));
}

TEST_CASE("bandwidth_3db: static gain never crosses (beyond grid)") {
  const StateSpace g = StateSpace::static_gain(MatrixXd::Constant(1, 1, 2.0));
  CHECK_FALSE(bandwidth_3db(g).has_value());
}

TEST_CASE("bandwidth_3db: invariant under positive output scaling") {
  const StateSpace g = lt::random_stable_siso(3);
  if (std::abs(g.dc_gain()(0, 0)) > 1e-6) {
    StateSpace g2 = g;
    g2.C *= 7.5;
    g2.D *= 7.5;
    const auto b1 = bandwidth_3db(g);
    const auto b2 = bandwidth_3db(g2);
    REQUIRE(b1.has_value() == b2.has_value());
    if (b1) CHECK(*b1 == doctest::Approx(*b2).epsilon(1e-6));
  }
}

TEST_CASE("hinf_norm: first-order lag peaks at DC") {
  CHECK(hinf_norm(tf_to_ss(tf({1.0}, {1.0, 1.0}))) ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hinf_norm: high-pass asymptote") {
  CHECK(hinf_norm(tf_to_ss(tf({1.0, 0.0}, {1.0, 1.0}))) ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hinf_norm: sharp resonance peak magnitude") {
  // 1/(s^2 + 0.01 s + 1): zeta = 0.005, peak 1/(2 zeta sqrt(1-zeta^2)).
  const StateSpace g = tf_to_ss(tf({1.0}, {1.0, 0.01, 1.0}));
  const double zeta = 0.005;
  const double want = 1.0 / (2.0 * zeta * std::sqrt(1.0 - zeta * zeta));
  CHECK(hinf_norm(g, 1e-6) == doctest::Approx(want).epsilon(0.01));
}

TEST_CASE("hinf_norm agrees with the bounded-real-lemma oracle") {
  for (int trial = 0; trial < 5; ++trial) {
    const StateSpace g = lt::random_stable_siso(3);
    CHECK(hinf_norm(g, 1e-6, {1e-4, 1e6, 400}) ==
          doctest::Approx(lt::brl_norm(g)).epsilon(1e-4));
  }
}

TEST_CASE("hinf_norm rejects unstable systems") {
  CHECK_THROWS_AS(hinf_norm(tf_to_ss(tf({1.0}, {1.0, -1.0}))),
                  std::invalid_argument);
}

TEST_CASE("sensitivity identity S+T=1 on random loops") {
  for (int trial = 0; trial < 5; ++trial) {
    const StateSpace g = lt::random_stable_siso(2);
    const StateSpace k = lt::random_stable_siso(1);
    const StateSpace L = series(k, g);
    const StateSpace S = feedback(StateSpace::identity(1), L);
    const StateSpace T = feedback(L, StateSpace::identity(1));
    for (double w : make_log_grid({1e-2, 1e5, 30})) {
      const auto sum = eval_response(S, w)(0, 0) + eval_response(T, w)(0, 0);
      CHECK(std::abs(sum - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("phase unwrapping reports a continuous -180 degree trend") {
  // Double integrator-ish lag chain: phase goes to -270 without wrap jumps.
  const RationalTF g3 = tf({1.0}, {1.0, 1.0}) * tf({1.0}, {1.0, 10.0}) *
                        tf({1.0}, {1.0, 100.0});
  const FreqResponse fr =
      freq_response(tf_to_ss(g3), make_log_grid({1e-2, 1e5, 100}));
  const auto phase = phase_deg_unwrapped(fr, 0, 0);
  CHECK(phase.front() > -10.0);
  CHECK(phase.back() < -260.0);
  for (std::size_t k = 1; k < phase.size(); ++k) {
    CHECK(std::abs(phase[k] - phase[k - 1]) < 30.0);
  }
}

TEST_CASE("freq_response CSV round-trips structurally") {
  const StateSpace g = lt::random_stable_siso(2);
  const FreqResponse fr = freq_response(g, make_log_grid({1e-1, 1e2, 5}));
  const std::string csv = freq_response_csv(fr);
  // Header + one line per frequency, three comma-separated columns each.
  std::size_t lines = 0, commas = 0;
  for (char c : csv) {
    if (c == '\n') ++lines;
    if (c == ',') ++commas;
  }
  CHECK(lines == fr.omega.size() + 1);
  CHECK(commas == 2 * lines);
}
