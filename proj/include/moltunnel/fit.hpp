#pragma once

// Least-squares fit of a unit-height Breit-Wigner line to log-transmission
// samples: ln W = 2 ln(G/2) - ln((x - s)^2 + G^2/4). Levenberg-Marquardt over
// (s, ln G), so G stays positive.

#include <cmath>
#include <limits>
#include <vector>

#include "moltunnel/errors.hpp"

namespace moltunnel {

struct LorentzFit {
  double center = 0.0;
  double gamma = 0.0;
  double rms = 0.0;  // RMS of ln W residuals within +-3 gamma of the centre
  int iterations = 0;
  bool converged = false;
};

inline LorentzFit fit_breit_wigner(const std::vector<double>& x,
                                   const std::vector<double>& log_w,
                                   double gamma_guess, double center_guess = 0.0) {
  if (x.size() != log_w.size() || x.size() < 3)
    throw domain_error("fit_breit_wigner: need at least three samples");
  if (!(gamma_guess > 0)) throw domain_error("fit_breit_wigner: gamma guess must be positive");
  double s = center_guess, lg = std::log(gamma_guess);
  auto cost = [&](double ss, double lgg) {
    const double g = std::exp(lgg);
    double c = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double q = (x[i] - ss) * (x[i] - ss) + 0.25 * g * g;
      const double r = log_w[i] - (2.0 * std::log(0.5 * g) - std::log(q));
      c += r * r;
    }
    return c;
  };
  LorentzFit out;
  double c = cost(s, lg);
  double mu = 1e-3;
  for (int it = 0; it < 200; ++it) {
    out.iterations = it + 1;
    const double g = std::exp(lg);
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - s;
      const double q = d * d + 0.25 * g * g;
      const double r = log_w[i] - (2.0 * std::log(0.5 * g) - std::log(q));
      const double js = 2.0 * d / q;                  // d model / d s
      const double jg = 2.0 - 0.5 * g * g / q;         // d model / d ln G
      a11 += js * js, a12 += js * jg, a22 += jg * jg;
      b1 += js * r, b2 += jg * r;
    }
    bool improved = false;
    for (int tries = 0; tries < 30 && !improved; ++tries) {
      const double m11 = a11 * (1 + mu), m22 = a22 * (1 + mu);
      const double det = m11 * m22 - a12 * a12;
      if (!(std::abs(det) > 0)) {
        mu *= 10;
        continue;
      }
      const double ds = (b1 * m22 - b2 * a12) / det;
      const double dg = (m11 * b2 - a12 * b1) / det;
      const double cn = cost(s + ds, lg + dg);
      if (cn < c) {
        const double rel = (c - cn) / std::max(c, 1e-300);
        s += ds, lg += dg, c = cn;
        mu = std::max(mu * 0.3, 1e-12);
        improved = true;
        if (rel < 1e-14 || (std::abs(ds) < 1e-13 * std::exp(lg) && std::abs(dg) < 1e-13))
          out.converged = true;
      } else {
        mu *= 10;
      }
    }
    if (!improved) out.converged = true;  // no descent direction left
    if (out.converged) break;
  }
  out.center = s;
  out.gamma = std::exp(lg);
  double sum = 0;
  int count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i] - s) > 3.0 * out.gamma) continue;
    const double q = (x[i] - s) * (x[i] - s) + 0.25 * out.gamma * out.gamma;
    const double r = log_w[i] - (2.0 * std::log(0.5 * out.gamma) - std::log(q));
    sum += r * r;
    ++count;
  }
  out.rms = count ? std::sqrt(sum / count) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace moltunnel
