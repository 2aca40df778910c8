#ifndef CONJSCAN_CONJSCAN_HPP
#define CONJSCAN_CONJSCAN_HPP

// Umbrella header: conjugate-instant detection and bifurcation certification
// for Dirichlet problems on shrinking 1D and radial domains.

#include "conjscan/assembly.hpp"
#include "conjscan/banded.hpp"
#include "conjscan/coefficient.hpp"
#include "conjscan/config.hpp"
#include "conjscan/crossing.hpp"
#include "conjscan/dense_eig.hpp"
#include "conjscan/errors.hpp"
#include "conjscan/expression.hpp"
#include "conjscan/grid.hpp"
#include "conjscan/matrix_path.hpp"
#include "conjscan/morse.hpp"
#include "conjscan/parallel.hpp"
#include "conjscan/problem.hpp"
#include "conjscan/report_io.hpp"
#include "conjscan/scan.hpp"
#include "conjscan/shooting.hpp"
#include "conjscan/spectral.hpp"

#endif
