#include "bbal/normal.hpp"

#include <algorithm>
#include <cmath>

#include "bbal/errors.hpp"

namespace bbal {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kTwoPi = 6.2831853071795864769;
constexpr double kRhoClamp = 1.0 - 1e-12;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(std::string(what) + " is not finite");
}

// Gauss-Legendre abscissae/weights on [-1,1], order chosen by |rho| as in
// Genz's BVND: 6 points for |rho| < 0.3, 12 for |rho| < 0.75, 20 otherwise.
const double kGL6x[3] = {0.9324695142031522, 0.6612093864662647,
                         0.2386191860831970};
const double kGL6w[3] = {0.1713244923791705, 0.3607615730481384,
                         0.4679139345726904};
const double kGL12x[6] = {0.9815606342467191, 0.9041172563704750,
                          0.7699026741943050, 0.5873179542866171,
                          0.3678314989981802, 0.1252334085114692};
const double kGL12w[6] = {0.04717533638651177, 0.1069393259953183,
                          0.1600783285433464,  0.2031674267230659,
                          0.2334925365383547,  0.2491470458134029};
const double kGL20x[10] = {0.9931285991850949,  0.9639719272779138,
                           0.9122344282513259,  0.8391169718222188,
                           0.7463319064601508,  0.6360536807265150,
                           0.5108670019508271,  0.3737060887154196,
                           0.2277858511416451,  0.07652652113349733};
const double kGL20w[10] = {0.01761400713915212, 0.04060142980038694,
                           0.06267204833410906, 0.08327674157670475,
                           0.1019301198172404,  0.1181945319615184,
                           0.1316886384491766,  0.1420961093183821,
                           0.1491729864726037,  0.1527533871307259};

double phi_upper(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

// Genz (2004) bivariate normal upper-tail probability P(X > dh, Y > dk) for
// standard marginals with correlation r. Two regimes: an arcsine-substitution
// quadrature for moderate |r| and the (1-r)-expansion near |r| = 1.
double bvnd_upper(double dh, double dk, double r) {
  const double* gx = kGL20x;
  const double* gw = kGL20w;
  int ng = 10;
  if (std::abs(r) < 0.3) {
    gx = kGL6x;
    gw = kGL6w;
    ng = 3;
  } else if (std::abs(r) < 0.75) {
    gx = kGL12x;
    gw = kGL12w;
    ng = 6;
  }

  double h = dh;
  double k = dk;
  double hk = h * k;
  double bvn = 0.0;

  if (std::abs(r) < 0.925) {
    if (std::abs(r) > 0.0) {
      const double hs = (h * h + k * k) / 2.0;
      const double asr = std::asin(r);
      for (int i = 0; i < ng; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          const double sn = std::sin(asr * (is * gx[i] + 1.0) / 2.0);
          bvn += gw[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
      }
      bvn = bvn * asr / (2.0 * kTwoPi);
    }
    bvn += phi_upper(h) * phi_upper(k);
  } else {
    if (r < 0.0) {
      k = -k;
      hk = -hk;
    }
    if (std::abs(r) < 1.0) {
      const double as = (1.0 - r) * (1.0 + r);
      double a = std::sqrt(as);
      const double bs = (h - k) * (h - k);
      const double c = (4.0 - hk) / 8.0;
      const double d = (12.0 - hk) / 16.0;
      double asr = -(bs / as + hk) / 2.0;
      if (asr > -100.0) {
        bvn = a * std::exp(asr) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 +
               c * d * as * as / 5.0);
      }
      if (-hk < 100.0) {
        const double b = std::sqrt(bs);
        const double sp = std::sqrt(kTwoPi) * phi_upper(b / a);
        bvn -= std::exp(-hk / 2.0) * sp * b *
               (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
      }
      a /= 2.0;
      for (int i = 0; i < ng; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          const double x = a * (is * gx[i] + 1.0);
          const double xs = x * x;
          const double rs = std::sqrt(1.0 - xs);
          asr = -(bs / xs + hk) / 2.0;
          if (asr > -100.0) {
            const double sp = 1.0 + c * xs * (1.0 + d * xs);
            const double ep =
                std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs;
            bvn += a * gw[i] * std::exp(asr) * (ep - sp);
          }
        }
      }
      bvn = -bvn / kTwoPi;
    }
    if (r > 0.0) {
      bvn += phi_upper(std::max(h, k));
    } else {
      bvn = -bvn;
      if (k > h) bvn += phi_upper(h) - phi_upper(k);
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

}  // namespace

double std_normal_pdf(double x) {
  require_finite(x, "std_normal_pdf input");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) {
  require_finite(x, "std_normal_cdf input");
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double std_normal_pdf_over_cdf(double x) {
  require_finite(x, "std_normal_pdf_over_cdf input");
  if (x < -30.0) {
    // Mills ratio asymptotics: Phi(x)/phi(x) ~ -(1 - 1/x^2 + 3/x^4 - ...) / x.
    const double z2 = x * x;
    const double mills =
        (1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2)) / -x;
    return 1.0 / mills;
  }
  return std_normal_pdf(x) / std_normal_cdf(x);
}

double bvn_cdf(double h, double k, double rho) {
  // P(X <= h, Y <= k) = P(-X >= -h, -Y >= -k) and (-X,-Y) keeps correlation.
  return bvnd_upper(-h, -k, rho);
}

double bvn_orthant(const Bvn2& b) {
  require_finite(b.mean(0), "bvn mean");
  require_finite(b.mean(1), "bvn mean");
  const double v1 = b.cov(0, 0);
  const double v2 = b.cov(1, 1);
  const double off = 0.5 * (b.cov(0, 1) + b.cov(1, 0));
  if (!std::isfinite(v1) || !std::isfinite(v2) || !std::isfinite(off))
    throw DomainError("bvn covariance is not finite");
  if (v1 <= 0.0 || v2 <= 0.0)
    throw MatrixError("bvn covariance has non-positive diagonal");
  const double s1 = std::sqrt(v1);
  const double s2 = std::sqrt(v2);
  double rho = off / (s1 * s2);
  if (std::abs(rho) > 1.0 + 1e-9)
    throw MatrixError("bvn covariance is not positive definite");
  // Correlations past the clamp threshold (duplicated query points) are
  // routed to the exact comonotone/antimonotone branch.
  if (std::abs(rho) > kRhoClamp) rho = rho > 0.0 ? 1.0 : -1.0;
  // P(z >= 0) standardizes to an upper-tail probability at -mean/sigma.
  return bvnd_upper(-b.mean(0) / s1, -b.mean(1) / s2, rho);
}

}  // namespace bbal
