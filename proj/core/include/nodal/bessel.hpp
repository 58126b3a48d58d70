#pragma once

namespace nodal::spectral {

// Power-series evaluation, accurate for |x| <= 12.
double bessel_j0(double x);
double bessel_j1(double x);

struct SectorRatio {
    double a0 = 0;  // first positive zero of J0
    double a1 = 0;  // first positive zero of J0' (= first positive zero of J1)
    double ratio = 0;
};

// Nodal radius of a thin circular sector of radius 1: a0/a1, to 1e-9.
SectorRatio sector_nodal_ratio();

}  // namespace nodal::spectral
