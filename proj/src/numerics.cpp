#include "spua/numerics.hpp"

#include <cmath>

namespace spua {

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 const RootOptions& opts) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::runtime_error("find_root: bracket does not straddle a root");

    double x = lo, fx = flo;
    for (int it = 0; it < opts.max_iterations; ++it) {
        // Secant proposal from the bracket endpoints, bisection fallback.
        double xs = hi - fhi * (hi - lo) / (fhi - flo);
        double xm = 0.5 * (lo + hi);
        x = (xs > lo && xs < hi) ? xs : xm;
        fx = f(x);
        if (std::abs(fx) <= opts.f_tol || hi - lo <= opts.x_tol) return x;
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        // A stalled secant endpoint degenerates to bisection on the next pass.
        if (hi - lo <= opts.x_tol) return 0.5 * (lo + hi);
    }
    return x;
}

double chi_square_quantile(int dof, double prob) {
    // Wilson-Hilferty: chi2_q ~ dof * (1 - 2/(9 dof) + z sqrt(2/(9 dof)))^3.
    // Normal quantile via Moro/Beasley-Springer rational approximation.
    auto normal_quantile = [](double q) {
        static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
        static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
        static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
        static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
        const double plow = 0.02425;
        if (q < plow) {
            double u = std::sqrt(-2.0 * std::log(q));
            return (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u +
                    c[5]) /
                   ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
        }
        if (q > 1.0 - plow) {
            double u = std::sqrt(-2.0 * std::log(1.0 - q));
            return -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u +
                     c[5]) /
                   ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
        }
        double u = q - 0.5;
        double r = u * u;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
                a[5]) *
               u /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r +
                1.0);
    };
    double z = normal_quantile(prob);
    double f = 2.0 / (9.0 * dof);
    double t = 1.0 - f + z * std::sqrt(f);
    return dof * t * t * t;
}

}  // namespace spua
