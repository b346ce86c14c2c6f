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

//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A numerical quantity left its mathematically valid domain
    /// (e.g. an eigenvalue of a density operator below the PSD floor).
    #[error("numerical domain error: {0}")]
    NumericalDomain(String),

    /// The interior-point solver hit its iteration cap before reaching
    /// the convergence tolerances. Residuals are reported for diagnosis.
    #[error(
        "SDP did not converge after {iterations} iterations \
         (gap {gap:.3e}, primal residual {primal_residual:.3e}, dual residual {dual_residual:.3e})"
    )]
    SdpNotConverged {
        iterations: usize,
        gap: f64,
        primal_residual: f64,
        dual_residual: f64,
    },

    /// Failed to parse a textual spec (set spec, configuration spec, label).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid<S: Into<String>>(msg: S) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
