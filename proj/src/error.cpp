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

#include "sslr/error.hpp"

namespace sslr {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Shape: return "shape";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::NonDifferentiable: return "non_differentiable";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Rank: return "rank";
    case ErrorCode::NotPositiveDefinite: return "not_positive_definite";
    case ErrorCode::Estimation: return "estimation";
    case ErrorCode::BadStart: return "bad_start";
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Schema: return "schema";
    case ErrorCode::Sizing: return "sizing";
    case ErrorCode::DegenerateColumn: return "degenerate_column";
    case ErrorCode::Simulation: return "simulation";
    }
    return "unknown";
}

} // namespace sslr
