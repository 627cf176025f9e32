/*
   Copyright 2026 The sslr Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

namespace sslr {

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
// Relative error below 1e-12 on the ranges used by the library.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Smallest x >= 0 with P(a, x) = p.
double gamma_p_inverse(double a, double p);

// Quantile of the chi-square distribution with dof degrees of freedom.
double chi_square_quantile(double probability, double dof);

// Volume of the unit ball in R^p.
double unit_ball_volume(int p);

} // namespace sslr
