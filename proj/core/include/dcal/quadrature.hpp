// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

namespace dcal {

// Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.
// Recursion depth is capped at max_depth (2^max_depth panels); the cap keeps
// the cost bounded on integrands with kinks.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-8, int max_depth = 16);

// Same, but the interval is first split at the given interior break points
// (e.g. kinks of |.|-type integrands) so each piece is smooth.
double integrate_split(const std::function<double(double)>& f, double a,
                       double b, std::vector<double> breaks, double tol = 1e-8,
                       int max_depth = 16);

}  // namespace dcal
