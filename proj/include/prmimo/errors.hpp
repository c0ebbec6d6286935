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

#ifndef PRMIMO_ERRORS_HPP
#define PRMIMO_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prmimo
{
    // Linear solve failed or the system is too ill-conditioned to trust.
    class numerical_error : public std::runtime_error
    {
    public:
        explicit numerical_error(const std::string &msg) : std::runtime_error(msg) {}
    };

    // Malformed or truncated binary file. "offset" is the byte position where
    // parsing stopped making sense.
    class format_error : public std::runtime_error
    {
    public:
        format_error(const std::string &msg, std::size_t offset)
            : std::runtime_error(msg + " (at byte offset " + std::to_string(offset) + ")"),
              offset_(offset) {}

        std::size_t offset() const { return offset_; }

    private:
        std::size_t offset_;
    };
}

#endif
