#pragma once

namespace oracle {

/// E_{alpha,beta}(z) summed from its power series in MPFR arithmetic.
/// Working precision is raised with the size of the largest term, so the
/// result is accurate to well below double rounding even for z = -1e4.
double mlf_series(double alpha, double beta, double z);

} // namespace oracle
