// SPDX-License-Identifier: Apache-2.0
//
// prmimo: channel estimation and extrapolation for pattern-reconfigurable MIMO arrays
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef PRMIMO_METRICS_HPP
#define PRMIMO_METRICS_HPP

#include <armadillo>

namespace prmimo
{
    // Mean over samples (columns) of ||truth - estimate||^2 / ||truth||^2.
    // Throws std::invalid_argument when any truth column is all-zero.
    double nmse(const arma::cx_mat &truth, const arma::cx_mat &estimate);
    double nmse(const arma::mat &truth, const arma::mat &estimate);

    double to_db(double linear);
}

#endif
