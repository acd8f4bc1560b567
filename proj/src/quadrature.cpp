#include "w2lab/quadrature.hpp"

#include <sstream>

#include "w2lab/common.hpp"

namespace w2lab {

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int max_depth;
  int evals = 0;
  double err = 0.0;
  bool failed = false;

  double eval(double x) {
    ++evals;
    return f(x);
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                 int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = eval(lm);
    double frm = eval(rm);
    double h = b - a;
    double left = h / 12.0 * (fa + 4.0 * flm + fm);
    double right = h / 12.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || depth >= max_depth) {
      if (depth >= max_depth && std::abs(delta) > 15.0 * tol) failed = true;
      err += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int max_depth) {
  QuadratureResult out;
  if (a == b) return out;
  Simpson s{f, max_depth};
  // Seed with a fixed 8-panel split so narrow features are not skipped.
  constexpr int kPanels = 8;
  double h = (b - a) / kPanels;
  double total = 0.0;
  double xa = a;
  double fa = s.eval(a);
  for (int i = 0; i < kPanels; ++i) {
    double xb = (i + 1 == kPanels) ? b : a + (i + 1) * h;
    double fb = s.eval(xb);
    double xm = 0.5 * (xa + xb);
    double fm = s.eval(xm);
    double whole = (xb - xa) / 6.0 * (fa + 4.0 * fm + fb);
    total += s.recurse(xa, xb, fa, fm, fb, whole, abs_tol / kPanels, 0);
    xa = xb;
    fa = fb;
  }
  if (s.failed || !std::isfinite(total)) {
    std::ostringstream msg;
    msg << "adaptive Simpson did not reach tolerance " << abs_tol << " on [" << a << ", " << b
        << "] within depth " << max_depth;
    throw Error(ErrorCode::QuadratureNonconvergence, msg.str());
  }
  out.value = total;
  out.error_estimate = s.err;
  out.evaluations = s.evals;
  return out;
}

}  // namespace w2lab
