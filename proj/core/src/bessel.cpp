#include "nodal/bessel.hpp"

#include <cmath>
#include <functional>

#include "nodal/errors.hpp"

namespace nodal::spectral {

double bessel_j0(double x) {
    // J0(x) = sum (-1)^k (x/2)^{2k} / (k!)^2
    double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 64; ++k) {
        term *= -q / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

double bessel_j1(double x) {
    // J1(x) = (x/2) sum (-1)^k (x/2)^{2k} / (k! (k+1)!)
    double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 64; ++k) {
        term *= -q / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return 0.5 * x * sum;
}

namespace {

double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if (flo * fhi > 0) throw SolverError("bessel zero bracket does not change sign");
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0 || hi - lo < 1e-13) return mid;
        if (flo * fm < 0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

SectorRatio sector_nodal_ratio() {
    SectorRatio r;
    r.a0 = bisect(bessel_j0, 2.0, 3.0);
    r.a1 = bisect(bessel_j1, 3.0, 4.0);  // J0' = -J1
    r.ratio = r.a0 / r.a1;
    return r;
}

}  // namespace nodal::spectral
