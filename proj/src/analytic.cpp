#include "aoi/analytic.hpp"

#include <cmath>

namespace aoi {

double Age::value() const {
  if (infinite_) throw std::logic_error("value() called on an infinite age");
  return value_;
}

std::partial_ordering operator<=>(const Age& a, const Age& b) {
  if (a.infinite_ || b.infinite_) {
    return a.infinite_ == b.infinite_ ? std::partial_ordering::equivalent
                                      : (a.infinite_ ? std::partial_ordering::greater
                                                     : std::partial_ordering::less);
  }
  return a.value_ <=> b.value_;
}

bool operator==(const Age& a, const Age& b) {
  return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
}

StreamMix::StreamMix(double p1) : p1_(p1), p2_(1.0 - p1) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw InvalidArgument("p1 must lie in [0, 1]");
}

Generation Generation::exogenous(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw InvalidArgument("exogenous arrival rate mu must be positive and finite");
  }
  return Generation(mu);
}

Scenario Scenario::swapped() const {
  Scenario t = *this;
  std::swap(t.k1, t.k2);
  std::swap(t.delay_I, t.delay_II);
  t.mix = mix.swapped();
  return t;
}

void Scenario::validate() const {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  if (k1 < 1 || k1 > n) throw InvalidArgument("k1 must lie in [1, n]");
  if (k2 < 1 || k2 > n) throw InvalidArgument("k2 must lie in [1, n]");
}

ScenarioApprox ScenarioApprox::swapped() const {
  ScenarioApprox t = *this;
  std::swap(t.alpha1, t.alpha2);
  std::swap(t.delay_I, t.delay_II);
  t.mix = mix.swapped();
  return t;
}

void ScenarioApprox::validate() const {
  if (!(alpha1 > 0.0 && alpha1 < 1.0)) throw InvalidArgument("alpha1 must lie in (0, 1)");
  if (!(alpha2 > 0.0 && alpha2 < 1.0)) throw InvalidArgument("alpha2 must lie in (0, 1)");
}

ThresholdStats threshold_stats(const HarmonicCache& hc, const ShiftedExp& d, std::int64_t k,
                               std::int64_t n) {
  return {{os_mean(hc, d, k, n), os_second_moment(hc, d, k, n)}, mean_first_k(hc, d, k, n)};
}

namespace {

// Retry moments in the forms used below, for success probability P in (0, 1]:
//   E[M-1] = (1-P)/P,  E[(M-1)^2] = (1-P)(2-P)/P^2,  E[M^2-M] = 2(1-P)/P^2.
// These vanish exactly at P = 1.
struct Retry {
  double m;           // E[M]
  double m_sq;        // E[M^2]
  double extra;       // E[M-1]
  double extra_sq;    // E[(M-1)^2]
  double m_sq_minus;  // E[M^2 - M]
};

Retry retry_moments(double P) {
  const double miss = 1.0 - P;
  const double P2 = P * P;
  return {1.0 / P, (2.0 - P) / P2, miss / P, miss * (2.0 - P) / P2, 2.0 * miss / P2};
}

// Cycle moments conditioned on a miss; own cycle moments when a miss is impossible.
YbarMoments conditional_cycle(const Moments2& own, const Moments2& other, double p_own,
                              double p_other, double q_own) {
  const double P = p_own * q_own;
  if (P >= 1.0) return {own, true};
  const double w_own = p_own * (1.0 - q_own) / (1.0 - P);
  const double w_other = p_other / (1.0 - P);
  return {{w_own * own.m1 + w_other * other.m1, w_own * own.m2 + w_other * other.m2}, false};
}

Moments2 inter_delivery(const Moments2& own, const Moments2& other, double p_own,
                        double p_other, double q_own, double mu) {
  const Retry r = retry_moments(p_own * q_own);
  const Moments2 y = conditional_cycle(own, other, p_own, p_other, q_own).moments;
  const double a = own.m1;
  double m1 = a + r.extra * y.m1;
  double m2 = own.m2 + 2.0 * r.extra * a * y.m1 + r.extra * y.variance() + r.extra_sq * y.m1 * y.m1;
  if (mu > 0.0) {
    const double ez = 1.0 / mu;
    const double vz = ez * ez;
    m1 += r.m * ez;
    m2 += 2.0 * r.m * a * ez + r.m * vz + 2.0 * r.m_sq_minus * y.m1 * ez + r.m_sq * ez * ez;
  }
  return {m1, m2};
}

}  // namespace

Age renewal_age(const ThresholdStats& own, const ThresholdStats& other, double p_own,
                double p_other, double q_own, double mu) {
  if (!(p_own > 0.0)) return Age::infinite();
  const Moments2 s = inter_delivery(own.cycle, other.cycle, p_own, p_other, q_own, mu);
  return Age::of(own.delivered_mean + s.m2 / (2.0 * s.m1));
}

ApproxStats approx_stats(const ShiftedExp& d, double alpha) {
  return {delta_threshold(d, alpha), mean_first_k_approx(d, alpha)};
}

Age approx_age(const ApproxStats& own, const ApproxStats& other, double p_own, double p_other,
               double alpha_own, double mu) {
  if (!(p_own > 0.0)) return Age::infinite();
  const double d1 = own.delta;
  const double d2 = other.delta;
  const double p1 = p_own;
  const double p2 = p_other;
  const double a = alpha_own;
  if (mu > 0.0) {
    const double den = mu * p1 * d1 + mu * p2 * d2 + 1.0;
    const double t1 = (mu * p1 * p1 * (2.0 - a) * d1 * d1 + 2.0 * mu * p1 * p2 * (2.0 - a) * d1 * d2) /
                      (2.0 * p1 * a * den);
    const double t2 = mu * p2 * (2.0 * p2 + p1 * a) * d2 * d2 / (2.0 * p1 * a * den);
    const double t3 = (2.0 * mu * p2 * d2 + mu * p1 * (2.0 - a) * d1 + 1.0) / (mu * p1 * a * den);
    return Age::of(own.delivered_mean + t1 + t2 + t3);
  }
  const double den = p1 * d1 + p2 * d2;
  const double t1 = ((2.0 - a) * p1 * p1 * d1 * d1 + 2.0 * p1 * p2 * (2.0 - a) * d1 * d2) /
                    (2.0 * p1 * a * den);
  const double t2 = p2 * (p1 * a + 2.0 * p2) * d2 * d2 / (2.0 * p1 * a * den);
  return Age::of(own.delivered_mean + t1 + t2);
}

Moments2 geometric_moments(double p, Stream target) {
  if (!(p > 0.0)) throw StarvedStream(target);
  if (p > 1.0) throw InvalidArgument("success probability must not exceed 1");
  return {1.0 / p, (2.0 - p) / (p * p)};
}

namespace {

// The own/other view of a scenario for one target stream.
struct View {
  ThresholdStats own;
  ThresholdStats other;
  double p_own;
  double p_other;
  double q_own;
  double mu;
};

View view_of(const HarmonicCache& hc, const Scenario& s, Stream target) {
  s.validate();
  const Stream o = other(target);
  return {threshold_stats(hc, s.delay(target), s.k(target), s.n),
          threshold_stats(hc, s.delay(o), s.k(o), s.n),
          s.mix.p(target),
          s.mix.p(o),
          s.q(target),
          s.mode.mu()};
}

void require_fed(const View& v, Stream target) {
  if (!(v.p_own > 0.0)) throw StarvedStream(target);
}

void require_mode(const Scenario& s, bool exogenous) {
  if (s.mode.is_exogenous() != exogenous) {
    throw InvalidArgument(exogenous ? "scenario is not in exogenous mode"
                                    : "scenario is not in at-will mode");
  }
}

}  // namespace

YbarMoments ybar_moments(const HarmonicCache& hc, const Scenario& s, Stream target) {
  const View v = view_of(hc, s, target);
  require_fed(v, target);
  return conditional_cycle(v.own.cycle, v.other.cycle, v.p_own, v.p_other, v.q_own);
}

Moments2 s_moments_atwill(const HarmonicCache& hc, const Scenario& s, Stream target) {
  require_mode(s, false);
  const View v = view_of(hc, s, target);
  require_fed(v, target);
  return inter_delivery(v.own.cycle, v.other.cycle, v.p_own, v.p_other, v.q_own, 0.0);
}

Moments2 s_moments_exogenous(const HarmonicCache& hc, const Scenario& s, Stream target) {
  require_mode(s, true);
  const View v = view_of(hc, s, target);
  require_fed(v, target);
  return inter_delivery(v.own.cycle, v.other.cycle, v.p_own, v.p_other, v.q_own, v.mu);
}

Age age_exact(const HarmonicCache& hc, const Scenario& s, Stream target) {
  const View v = view_of(hc, s, target);
  return renewal_age(v.own, v.other, v.p_own, v.p_other, v.q_own, v.mu);
}

Age age_atwill_exact(const HarmonicCache& hc, const Scenario& s, Stream target) {
  require_mode(s, false);
  return age_exact(hc, s, target);
}

Age age_exogenous_exact(const HarmonicCache& hc, const Scenario& s, Stream target) {
  require_mode(s, true);
  return age_exact(hc, s, target);
}

Age age_approx(const ScenarioApprox& sa, Stream target) {
  sa.validate();
  const Stream o = other(target);
  return approx_age(approx_stats(sa.delay(target), sa.alpha(target)),
                    approx_stats(sa.delay(o), sa.alpha(o)), sa.mix.p(target), sa.mix.p(o),
                    sa.alpha(target), sa.mode.mu());
}

Age age_atwill_approx(const ScenarioApprox& sa, Stream target) {
  if (sa.mode.is_exogenous()) throw InvalidArgument("scenario is not in at-will mode");
  return age_approx(sa, target);
}

Age age_exogenous_approx(const ScenarioApprox& sa, Stream target) {
  if (!sa.mode.is_exogenous()) throw InvalidArgument("scenario is not in exogenous mode");
  return age_approx(sa, target);
}

AgePair age_pair(const HarmonicCache& hc, const Scenario& s) {
  return {age_exact(hc, s, Stream::I), age_exact(hc, s, Stream::II)};
}

AgePair age_pair(const Scenario& s) {
  s.validate();
  return age_pair(HarmonicCache(s.n), s);
}

AgePair age_pair(const ScenarioApprox& sa) {
  return {age_approx(sa, Stream::I), age_approx(sa, Stream::II)};
}

}  // namespace aoi
