#pragma once

#include "pbicm/channel.hpp"

/// Textbook routines for an explicit transition matrix. They take the matrix
/// at face value and share no code with the table-based path, which makes
/// them usable as an oracle for it.
namespace pbicm::dmc {

/// I(X;Y) in bits for equiprobable X.
double mutual_information_uniform(const DmcMatrix& w);

/// Capacity in bits by Blahut-Arimoto (input distribution optimized).
double capacity_blahut_arimoto(const DmcMatrix& w, double tolerance = 1e-12, int max_iterations = 100000);

/// Gallager E0(rho) in bits for equiprobable X.
double e0_uniform(const DmcMatrix& w, double rho);

/// VAR[i(X;Y)] in bits^2 for equiprobable X.
double dispersion_uniform(const DmcMatrix& w);

/// max over rho in [0,1] of e0_uniform(rho) - rho R.
double random_coding_exponent(const DmcMatrix& w, double rate_bits);

}  // namespace pbicm::dmc
