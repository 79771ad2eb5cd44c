//! Symmetric quanton-detecton system: two qubits, each the other's marker.
//!
//! The detecton starts with Bloch vector `(V_D0, 0, P_D)`: the coupling
//! `exp(+/- i Phi sigma_z / 2)` leaves the `z` component (its predictability)
//! untouched and rotates the transverse part (its coherence). The quanton is
//! pure with predictability `P_Q` and visibility `sqrt(1 - P_Q^2)`.
//!
//! Closed forms, with `|s_D| = sqrt(P_D^2 + V_D0^2)`:
//!
//! ```text
//! Q_D    = V_D0 |sin Phi|
//! Xi_Q^2 = P_Q^2 + Q_D^2 (1 - P_Q^2)
//! R_Q^2  = P_Q^2 |s_D|^2 + Q_D^2 (1 - P_Q^2),   D_Q = max(P_Q, R_Q)
//! V_Q    = sqrt(1 - P_Q^2) sqrt(cos^2 Phi + P_D^2 sin^2 Phi)
//! Delta  = V_D^2 - V_Xi^2 = Xi^2 - D^2
//!        = Q_D^2 (1 - P_Q^2)       if P_Q > R_Q
//!          P_Q^2 (1 - |s_D|^2)     if P_Q <= R_Q
//! chi    = D^2 / Xi^2 = 1 - Delta / Xi^2
//! ```

use std::f64::consts::FRAC_PI_2;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::sig12;
use crate::interferometer::{from_biased_unitary_pair, InterferometerInstance, QuantonPrep};
use crate::linalg::pauli;
use crate::rng::SplitMix64;
use crate::CONSTRUCT_TOL;

/// Tie width between the two `Delta` branches.
const BRANCH_TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SqdsConfigJson", into = "SqdsConfigJson")]
pub struct SqdsConfig {
    p_d: f64,
    v_d0: f64,
    p_q: f64,
    phi_ent: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SqdsConfigJson {
    p_d: f64,
    v_d0: f64,
    p_q: f64,
    phi_ent: f64,
}

impl TryFrom<SqdsConfigJson> for SqdsConfig {
    type Error = Error;

    fn try_from(raw: SqdsConfigJson) -> Result<Self> {
        SqdsConfig::new(raw.p_d, raw.v_d0, raw.p_q, raw.phi_ent)
    }
}

impl From<SqdsConfig> for SqdsConfigJson {
    fn from(c: SqdsConfig) -> Self {
        SqdsConfigJson {
            p_d: c.p_d,
            v_d0: c.v_d0,
            p_q: c.p_q,
            phi_ent: c.phi_ent,
        }
    }
}

impl SqdsConfig {
    /// `p_d, v_d0 >= 0` with `p_d^2 + v_d0^2 <= 1`, `p_q` in `[0, 1]`, finite `phi_ent`.
    pub fn new(p_d: f64, v_d0: f64, p_q: f64, phi_ent: f64) -> Result<Self> {
        if p_d.is_nan() || p_d < 0.0 {
            return Err(Error::OutOfRange {
                name: "p_d",
                value: p_d,
            });
        }
        if v_d0.is_nan() || v_d0 < 0.0 {
            return Err(Error::OutOfRange {
                name: "v_d0",
                value: v_d0,
            });
        }
        let norm_sq = p_d * p_d + v_d0 * v_d0;
        if norm_sq > 1.0 + CONSTRUCT_TOL {
            return Err(Error::OutOfRange {
                name: "p_d^2 + v_d0^2",
                value: norm_sq,
            });
        }
        if !(0.0..=1.0).contains(&p_q) {
            return Err(Error::OutOfRange {
                name: "p_q",
                value: p_q,
            });
        }
        if !phi_ent.is_finite() {
            return Err(Error::OutOfRange {
                name: "phi_ent",
                value: phi_ent,
            });
        }
        Ok(Self {
            p_d,
            v_d0,
            p_q,
            phi_ent,
        })
    }

    pub fn p_d(&self) -> f64 {
        self.p_d
    }

    pub fn v_d0(&self) -> f64 {
        self.v_d0
    }

    pub fn p_q(&self) -> f64 {
        self.p_q
    }

    pub fn phi_ent(&self) -> f64 {
        self.phi_ent
    }

    /// `|s_D| = sqrt(P_D^2 + V_D0^2)`, capped at 1.
    pub fn s_d_norm(&self) -> f64 {
        self.p_d.hypot(self.v_d0).min(1.0)
    }

    /// Initial quanton visibility `sqrt(1 - P_Q^2)`.
    pub fn v_q0(&self) -> f64 {
        (1.0 - self.p_q * self.p_q).max(0.0).sqrt()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqdsReport {
    pub q: f64,
    pub xi_q: f64,
    pub r_q: f64,
    pub d_q: f64,
    pub v_q: f64,
    pub delta: f64,
    pub chi: f64,
}

pub fn sqds_quality(cfg: &SqdsConfig) -> f64 {
    cfg.v_d0 * cfg.phi_ent.sin().abs()
}

pub fn sqds_xi(cfg: &SqdsConfig) -> f64 {
    let p2 = cfg.p_q * cfg.p_q;
    let q = sqds_quality(cfg);
    (p2 + q * q * (1.0 - p2)).sqrt()
}

/// `(R_Q, D_Q)`.
pub fn sqds_distinguishability(cfg: &SqdsConfig) -> (f64, f64) {
    let p2 = cfg.p_q * cfg.p_q;
    let q = sqds_quality(cfg);
    let s = cfg.s_d_norm();
    let r = (p2 * s * s + q * q * (1.0 - p2)).sqrt();
    (r, cfg.p_q.max(r))
}

pub fn sqds_visibility(cfg: &SqdsConfig) -> f64 {
    let (sin, cos) = cfg.phi_ent.sin_cos();
    cfg.v_q0() * (cos * cos + cfg.p_d * cfg.p_d * sin * sin).sqrt()
}

/// Both branch expressions of `Delta`: `(Q^2 (1 - P^2), P^2 (1 - |s_D|^2))`.
pub fn sqds_delta_branches(cfg: &SqdsConfig) -> (f64, f64) {
    let p2 = cfg.p_q * cfg.p_q;
    let q = sqds_quality(cfg);
    let s = cfg.s_d_norm();
    (q * q * (1.0 - p2), p2 * (1.0 - s * s))
}

/// `Delta = V_D^2 - V_Xi^2`, branching on `P_Q` versus `R_Q`; within
/// `1e-12` of the tie the two expressions are averaged.
pub fn sqds_delta(cfg: &SqdsConfig) -> f64 {
    let (r, _) = sqds_distinguishability(cfg);
    let (above, below) = sqds_delta_branches(cfg);
    if (cfg.p_q - r).abs() <= BRANCH_TIE {
        0.5 * (above + below)
    } else if cfg.p_q > r {
        above
    } else {
        below
    }
}

/// `chi = D^2 / Xi^2` by the branch formulas: `P^2 / Xi^2` when `P_Q > R_Q`,
/// otherwise `1 - 4 D1 D2 P_Q^2 / Xi^2` where `D1, D2 = (1 +/- |s_D|)/2` are the
/// eigenvalues of the initial detecton state. `chi = 1` when `Xi = P = 0`.
pub fn sqds_chi(cfg: &SqdsConfig) -> Result<f64> {
    let xi = sqds_xi(cfg);
    let p = cfg.p_q;
    if xi <= 0.0 {
        if p > 0.0 {
            return Err(Error::Precondition(format!(
                "xi >= p_q, found xi = {xi} with p_q = {p}"
            )));
        }
        return Ok(1.0);
    }
    let (r, _) = sqds_distinguishability(cfg);
    let s = cfg.s_d_norm();
    let four_d1_d2 = (1.0 + s) * (1.0 - s);
    let xi2 = xi * xi;
    let below = 1.0 - four_d1_d2 * p * p / xi2;
    let above = p * p / xi2;
    Ok(if (p - r).abs() <= BRANCH_TIE {
        0.5 * (above + below)
    } else if p > r {
        above
    } else {
        below
    })
}

pub fn sqds_report(cfg: &SqdsConfig) -> Result<SqdsReport> {
    let (r_q, d_q) = sqds_distinguishability(cfg);
    Ok(SqdsReport {
        q: sqds_quality(cfg),
        xi_q: sqds_xi(cfg),
        r_q,
        d_q,
        v_q: sqds_visibility(cfg),
        delta: sqds_delta(cfg),
        chi: sqds_chi(cfg)?,
    })
}

/// Generic-engine realization of the configuration.
///
/// The detecton is the marker, `rho_D = (1 + V_D0 sigma_x + P_D sigma_z)/2`,
/// coupled by `U+ = exp(+i Phi sigma_z / 2)`, `U- = exp(-i Phi sigma_z / 2)`.
/// The quanton is pure (`s = 1`); its predictability enters through an
/// unbalanced beam splitter with `cos 2a = P_Q` folded into the blocks
/// (see [`from_biased_unitary_pair`]), so at `P_Q = 0` the blocks are exactly
/// the unitary pair `(U+, U-)`. The phase shifter is at `phi = 0`.
pub fn sqds_to_generic(cfg: &SqdsConfig) -> InterferometerInstance {
    let u_plus = pauli::rz(-cfg.phi_ent);
    let u_minus = pauli::rz(cfg.phi_ent);
    let blocks = from_biased_unitary_pair(&u_plus, &u_minus, cfg.p_q).expect("p_q in [0, 1]");
    let rho = pauli::bloch_state([cfg.v_d0, 0.0, cfg.p_d]);
    // The Bloch norm may exceed 1 by CONSTRUCT_TOL; renormalizing is unnecessary
    // because the eigenvalue check tolerates 1e-10.
    InterferometerInstance::new(
        QuantonPrep::new(1.0).expect("pure quanton"),
        blocks,
        rho,
        0.0,
    )
    .expect("valid by construction")
}

/// Configuration drawn uniformly: detecton Bloch point in the quarter disc
/// `P_D, V_D0 >= 0`, `P_Q` in `[0, 1)`, `Phi` in `[0, 2 pi)`.
pub fn sample_config(rng: &mut SplitMix64) -> SqdsConfig {
    let radius = rng.next_f64().sqrt();
    let angle = rng.uniform(0.0, FRAC_PI_2);
    let p_q = rng.next_f64();
    let phi = rng.uniform(0.0, std::f64::consts::TAU);
    SqdsConfig::new(radius * angle.cos(), radius * angle.sin(), p_q, phi)
        .expect("inside the unit disc")
}

// ---------------------------------------------------------------------------
// Figure data

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig3Point {
    pub s_d_norm: f64,
    pub p_q: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig4Point {
    pub s_d_norm: f64,
    pub v_d_sq: f64,
    pub v_xi_sq: f64,
    pub v_q_sq: f64,
}

/// Fig. 3 configuration: balanced detecton (`P_D = 0`) at maximal coupling,
/// so `Q_D = |s_D|`.
pub fn figure3_config(s_d_norm: f64, p_q: f64) -> Result<SqdsConfig> {
    SqdsConfig::new(0.0, s_d_norm, p_q, FRAC_PI_2)
}

/// Fig. 4 configuration: `V_D0^2 = P_Q^2 = 1/2`, `Phi = pi/2` and
/// `P_D = sqrt(|s_D|^2 - 1/2)`.
pub fn figure4_config(s_d_norm: f64) -> Result<SqdsConfig> {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let p_d = (s_d_norm * s_d_norm - 0.5).max(0.0).sqrt();
    SqdsConfig::new(p_d, half, half, FRAC_PI_2)
}

/// `Delta` on a `resolution x resolution` grid over `|s_D|, P_Q` in `[0, 1]`,
/// `|s_D|`-major.
pub fn figure3_grid(resolution: usize) -> Result<Vec<Fig3Point>> {
    if resolution < 2 {
        return Err(Error::Precondition(format!(
            "a resolution of at least 2, found {resolution}"
        )));
    }
    let step = 1.0 / (resolution - 1) as f64;
    let mut out = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        let s = i as f64 * step;
        for j in 0..resolution {
            let p = j as f64 * step;
            out.push(Fig3Point {
                s_d_norm: s,
                p_q: p,
                delta: sqds_delta(&figure3_config(s, p)?),
            });
        }
    }
    Ok(out)
}

/// `(V_D^2, V_Xi^2, V_Q^2)` at `samples` evenly spaced `|s_D|` in `[sqrt(1/2), 1]`.
pub fn figure4_curve(samples: usize) -> Result<Vec<Fig4Point>> {
    if samples < 2 {
        return Err(Error::Precondition(format!(
            "at least 2 samples, found {samples}"
        )));
    }
    let lo = std::f64::consts::FRAC_1_SQRT_2;
    let step = (1.0 - lo) / (samples - 1) as f64;
    (0..samples)
        .map(|k| {
            let s = if k + 1 == samples {
                1.0
            } else {
                lo + k as f64 * step
            };
            let cfg = figure4_config(s)?;
            let (_, d) = sqds_distinguishability(&cfg);
            let xi = sqds_xi(&cfg);
            let v = sqds_visibility(&cfg);
            Ok(Fig4Point {
                s_d_norm: s,
                v_d_sq: 1.0 - d * d,
                v_xi_sq: 1.0 - xi * xi,
                v_q_sq: v * v,
            })
        })
        .collect()
}

/// Point of largest `Delta`; the first one in grid order on ties.
pub fn figure3_max(points: &[Fig3Point]) -> Option<Fig3Point> {
    points
        .iter()
        .copied()
        .fold(None, |best: Option<Fig3Point>, pt| match best {
            Some(b) if b.delta >= pt.delta => Some(b),
            _ => Some(pt),
        })
}

pub const FIG3_HEADER: &str = "s_d_norm,p_q,delta";
pub const FIG4_HEADER: &str = "s_d_norm,v_d_sq,v_xi_sq,v_q_sq";

pub fn write_figure3_csv<W: Write>(points: &[Fig3Point], mut out: W) -> io::Result<()> {
    writeln!(out, "{FIG3_HEADER}")?;
    for p in points {
        writeln!(
            out,
            "{},{},{}",
            sig12(p.s_d_norm),
            sig12(p.p_q),
            sig12(p.delta)
        )?;
    }
    out.flush()
}

pub fn write_figure4_csv<W: Write>(points: &[Fig4Point], mut out: W) -> io::Result<()> {
    writeln!(out, "{FIG4_HEADER}")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{}",
            sig12(p.s_d_norm),
            sig12(p.v_d_sq),
            sig12(p.v_xi_sq),
            sig12(p.v_q_sq)
        )?;
    }
    out.flush()
}
