// Copyright 2026 The tilesparse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TILESPARSE_TILESPARSE_HPP_
#define TILESPARSE_TILESPARSE_HPP_

#include "tilesparse/aligned.hpp"
#include "tilesparse/attention.hpp"
#include "tilesparse/csr_matrix.hpp"
#include "tilesparse/dense_matrix.hpp"
#include "tilesparse/error.hpp"
#include "tilesparse/half.hpp"
#include "tilesparse/io.hpp"
#include "tilesparse/load_balance.hpp"
#include "tilesparse/random.hpp"
#include "tilesparse/row_swizzle.hpp"
#include "tilesparse/sddmm.hpp"
#include "tilesparse/spmm.hpp"
#include "tilesparse/stats.hpp"
#include "tilesparse/thread_pool.hpp"
#include "tilesparse/tile_config.hpp"
#include "tilesparse/transpose.hpp"

#endif  // TILESPARSE_TILESPARSE_HPP_
