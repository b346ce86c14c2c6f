// Copyright 2026 The ghzdist developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Construction and LOCC-distinguishability analysis of multiqubit
//! GHZ-type bases.
//!
//! The crate builds the canonical N-qubit bases made of conjugate pairs
//! α|k⟩ + β|k̄⟩ / β|k⟩ − α|k̄⟩ (plus their product-state degenerations),
//! groups them into the two-pair blocks induced by any bipartition of the
//! qubits, evaluates distinguishability bounds, simulates LOCC measurement
//! protocols exactly, and produces PPT relaxation certificates through a
//! small dense SDP solver.

pub mod blocks;
pub mod bounds;
pub mod error;
pub mod ghz;
pub mod locc;
pub mod qla;
pub mod sdp;

pub use error::{Error, Result};
