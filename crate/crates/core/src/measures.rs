//! Which-way information measures and the visibility inequalities they bound.
//!
//! Every inequality is reported as a *slack*, `bound - attained`, in the
//! squared form in which it is stated (`1 - V^2 - X^2` for `X` in `P, Q, Xi, D`),
//! and is considered satisfied when the slack is at least `-SLACK_TOL`.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::format::round_sig;
use crate::interferometer::{
    conditional_wwm_states, evolve, predictability, visibility, w_operators, InterferometerInstance,
};
use crate::linalg::{hermitian_eigen, trace_norm, ComplexMatrix, C64};
use crate::{CONSTRUCT_TOL, SLACK_TOL, VALIDATE_TOL};

/// Slack names used in [`DualityReport::slacks`].
pub mod slack {
    /// `1 - V^2 - P^2`.
    pub const O2P: &str = "O2P";
    /// `1 - V^2 - Q^2`.
    pub const O2Q: &str = "O2Q";
    /// `1 - V^2 - Xi^2`.
    pub const O2: &str = "O2";
    /// `1 - V^2 - D^2`.
    pub const O1: &str = "O1";
    /// `Xi - D`, only on the restricted two-level class.
    pub const MAIN: &str = "main";
}

/// Duality measures of one interferometer instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    #[serde(serialize_with = "ser_sig")]
    pub v: f64,
    #[serde(serialize_with = "ser_sig")]
    pub p: f64,
    #[serde(serialize_with = "ser_sig")]
    pub q: f64,
    #[serde(serialize_with = "ser_sig")]
    pub d: f64,
    #[serde(serialize_with = "ser_sig")]
    pub xi: f64,
    /// Two-level `R`; `None` unless `n = 2`.
    #[serde(serialize_with = "ser_sig_opt")]
    pub r: Option<f64>,
    /// Trace-norm `D^2 / Xi^2`; `None` outside the restricted class
    /// (`n = 2`, `|s| = 1`, diagonal w-operators).
    #[serde(serialize_with = "ser_sig_opt")]
    pub chi: Option<f64>,
    #[serde(serialize_with = "ser_sig")]
    pub v_bound_d: f64,
    #[serde(serialize_with = "ser_sig")]
    pub v_bound_xi: f64,
    /// `Xi - D` for every instance; its sign is asserted only through the
    /// `main` slack on the restricted class.
    #[serde(serialize_with = "ser_sig")]
    pub xi_minus_d: f64,
    #[serde(serialize_with = "ser_sig_map")]
    pub slacks: BTreeMap<String, f64>,
}

impl DualityReport {
    /// Names of slacks below `-SLACK_TOL`.
    pub fn violations(&self) -> Vec<&str> {
        self.slacks
            .iter()
            .filter(|(_, &v)| v < -SLACK_TOL)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

fn ser_sig<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*x))
}

fn ser_sig_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&round_sig(*v)),
        None => s.serialize_none(),
    }
}

fn ser_sig_map<S: Serializer>(
    m: &BTreeMap<String, f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(k, &round_sig(*v))?;
    }
    map.end()
}

fn check_weights(w_plus: f64, w_minus: f64) -> Result<()> {
    for (name, w) in [("w_plus", w_plus), ("w_minus", w_minus)] {
        if w.is_nan() || w < -VALIDATE_TOL {
            return Err(Error::OutOfRange { name, value: w });
        }
    }
    if (w_plus + w_minus - 1.0).abs() > VALIDATE_TOL {
        return Err(Error::OutOfRange {
            name: "w_plus + w_minus",
            value: w_plus + w_minus,
        });
    }
    Ok(())
}

fn check_pair(rho_plus: &ComplexMatrix, rho_minus: &ComplexMatrix) -> Result<()> {
    if rho_plus.dim() != rho_minus.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho_plus.dim(),
            found: rho_minus.dim(),
        });
    }
    rho_plus.validate_density()?;
    rho_minus.validate_density()
}

fn weighted_difference(
    w_plus: f64,
    rho_plus: &ComplexMatrix,
    w_minus: f64,
    rho_minus: &ComplexMatrix,
) -> ComplexMatrix {
    (&rho_plus.scale_real(w_plus) - &rho_minus.scale_real(w_minus)).hermitian_part()
}

/// Clamp a measure that may overshoot `[0, 1]` by round-off.
fn clamp_unit(name: &'static str, x: f64) -> Result<f64> {
    if !(-SLACK_TOL..=1.0 + SLACK_TOL).contains(&x) {
        return Err(Error::OutOfRange { name, value: x });
    }
    Ok(x.clamp(0.0, 1.0))
}

/// `D = tr|w+ rho+ - w- rho-|`.
pub fn distinguishability(
    w_plus: f64,
    rho_plus: &ComplexMatrix,
    w_minus: f64,
    rho_minus: &ComplexMatrix,
) -> Result<f64> {
    check_weights(w_plus, w_minus)?;
    check_pair(rho_plus, rho_minus)?;
    trace_norm(&weighted_difference(w_plus, rho_plus, w_minus, rho_minus))
}

/// `Q = (1/2) tr|rho+ - rho-|`, the trace distance of the conditional states.
pub fn quality(rho_plus: &ComplexMatrix, rho_minus: &ComplexMatrix) -> Result<f64> {
    check_pair(rho_plus, rho_minus)?;
    Ok(0.5 * trace_norm(&(rho_plus - rho_minus).hermitian_part())?)
}

/// `Xi = sqrt(Q^2 + P^2 - Q^2 P^2)`. Arguments overshooting `[0, 1]` by at
/// most `SLACK_TOL` are clamped; anything further out is an error.
pub fn xi(p: f64, q: f64) -> Result<f64> {
    let p = clamp_unit("p", p)?;
    let q = clamp_unit("q", q)?;
    // 1 - (1 - p^2)(1 - q^2), written symmetrically so xi(p, q) == xi(q, p) bitwise.
    let (p2, q2) = (p * p, q * q);
    Ok((p2 + q2 - p2 * q2).max(0.0).sqrt())
}

/// Two-level `R = sqrt(max(0, 2 tr(Delta^2) - P^2))` with `Delta = w+ rho+ - w- rho-`.
pub fn r_measure(
    w_plus: f64,
    rho_plus: &ComplexMatrix,
    w_minus: f64,
    rho_minus: &ComplexMatrix,
    p: f64,
) -> Result<f64> {
    if rho_plus.dim() != 2 {
        return Err(Error::Precondition(format!(
            "a two-level marker for R, found n = {}",
            rho_plus.dim()
        )));
    }
    check_weights(w_plus, w_minus)?;
    check_pair(rho_plus, rho_minus)?;
    let delta = weighted_difference(w_plus, rho_plus, w_minus, rho_minus);
    let tr_sq = delta.trace_product(&delta)?.re;
    Ok((2.0 * tr_sq - p * p).max(0.0).sqrt())
}

/// Two-level distinguishability `D = max(P, R)`.
pub fn d_two_level(p: f64, r: f64) -> f64 {
    p.max(r)
}

/// `chi = 1 - 4 d1 d2 p^2 / xi^2`, with `d1, d2` the eigenvalues of the
/// initial two-level marker state. Valid on the `P <= R` branch; see
/// [`chi_two_branch`].
pub fn chi_closed_form(d1: f64, d2: f64, p: f64, xi: f64) -> Result<f64> {
    if d1 < -CONSTRUCT_TOL || d2 < -CONSTRUCT_TOL || (d1 + d2 - 1.0).abs() > CONSTRUCT_TOL {
        return Err(Error::Precondition(format!(
            "marker eigenvalues summing to 1, found {d1} + {d2}"
        )));
    }
    if xi <= 0.0 {
        if p > 0.0 {
            return Err(Error::Precondition(format!(
                "xi >= p, found xi = {xi} with p = {p}"
            )));
        }
        return Ok(1.0);
    }
    Ok(1.0 - 4.0 * d1 * d2 * p * p / (xi * xi))
}

/// Closed-form `chi` on both branches: `P^2 / Xi^2` when `P > R` (where
/// `D = P`) and [`chi_closed_form`] when `P <= R`.
pub fn chi_two_branch(d1: f64, d2: f64, p: f64, r: f64, xi: f64) -> Result<f64> {
    if p > r {
        if xi <= 0.0 {
            return Err(Error::Precondition(format!(
                "xi >= p, found xi = {xi} with p = {p}"
            )));
        }
        return Ok(p * p / (xi * xi));
    }
    chi_closed_form(d1, d2, p, xi)
}

/// Largest off-diagonal magnitude of the two operators whose initial-marker
/// expectations give `w+` and `w-`, in the computational basis.
pub fn w_operator_offdiagonal(inst: &InterferometerInstance) -> f64 {
    let (wp, wm) = w_operators(inst);
    let n = inst.n();
    let mut worst: f64 = 0.0;
    for m in [&wp, &wm] {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(m[(i, j)].norm());
                }
            }
        }
    }
    worst
}

/// The class on which `Xi >= D` and the closed-form `chi` are stated:
/// `n = 2`, `|s| = 1` and diagonal w-operators.
pub fn is_restricted_class(inst: &InterferometerInstance) -> bool {
    inst.n() == 2 && inst.prep().is_pure() && w_operator_offdiagonal(inst) <= VALIDATE_TOL
}

/// Evaluates every measure and inequality for one instance.
pub fn hierarchy_report(inst: &InterferometerInstance) -> Result<DualityReport> {
    let res = evolve(inst);
    let cond = conditional_wwm_states(inst)?;
    let v = visibility(&res);
    let p = predictability(&res);
    let q = quality(&cond.rho_plus, &cond.rho_minus)?;
    let d = distinguishability(cond.w_plus, &cond.rho_plus, cond.w_minus, &cond.rho_minus)?;
    let xi_val = xi(p, q)?;
    let r = if inst.n() == 2 {
        Some(r_measure(
            cond.w_plus,
            &cond.rho_plus,
            cond.w_minus,
            &cond.rho_minus,
            p,
        )?)
    } else {
        None
    };
    let restricted = is_restricted_class(inst);
    let chi = if restricted && xi_val > 0.0 {
        Some(d * d / (xi_val * xi_val))
    } else {
        None
    };

    let v2 = v * v;
    let mut slacks = BTreeMap::new();
    slacks.insert(slack::O2P.to_string(), 1.0 - v2 - p * p);
    slacks.insert(slack::O2Q.to_string(), 1.0 - v2 - q * q);
    slacks.insert(slack::O2.to_string(), 1.0 - v2 - xi_val * xi_val);
    slacks.insert(slack::O1.to_string(), 1.0 - v2 - d * d);
    if restricted {
        slacks.insert(slack::MAIN.to_string(), xi_val - d);
    }

    Ok(DualityReport {
        v,
        p,
        q,
        d,
        xi: xi_val,
        r,
        chi,
        v_bound_d: (1.0 - d * d).max(0.0).sqrt(),
        v_bound_xi: (1.0 - xi_val * xi_val).max(0.0).sqrt(),
        xi_minus_d: xi_val - d,
        slacks,
    })
}

/// Quantities of the branch selected by `sign(s)` for a pure quanton: with
/// `(A, B) = (V++, V+-)` or `(-V-+, V--)`, `w+ = <A A^dagger>/2`,
/// `w- = <B B^dagger>/2`, `rho+ = A^dagger rho A / (2 w+)`, `rho- = B^dagger rho B / (2 w-)`
/// and `C = tr(B A^dagger rho)`.
#[derive(Debug, Clone)]
struct Branch {
    a: ComplexMatrix,
    b: ComplexMatrix,
    w_plus: f64,
    w_minus: f64,
    rho_plus: ComplexMatrix,
    rho_minus: ComplexMatrix,
    c: C64,
}

impl Branch {
    fn of(inst: &InterferometerInstance) -> Result<Self> {
        if !inst.prep().is_pure() {
            return Err(Error::Precondition(format!(
                "|s| = 1, found s = {}",
                inst.s()
            )));
        }
        let (a, b) = inst.blocks().branch(inst.s() > 0.0);
        let b = b.clone();
        let rho = inst.rho_d0();
        let xp = a.conjugate_by_dagger(rho)?.scale_real(0.5).hermitian_part();
        let xm = b.conjugate_by_dagger(rho)?.scale_real(0.5).hermitian_part();
        let (w_plus, w_minus) = (xp.trace().re, xm.trace().re);
        let p = (w_plus - w_minus).abs();
        if w_plus < 1e-12 || w_minus < 1e-12 || p >= 1.0 - CONSTRUCT_TOL {
            return Err(Error::DegenerateBranch {
                w: w_plus.min(w_minus),
            });
        }
        let c = inst.expect0(&(&b * &a.dagger()));
        Ok(Self {
            rho_plus: xp.scale_real(1.0 / w_plus),
            rho_minus: xm.scale_real(1.0 / w_minus),
            a,
            b,
            w_plus,
            w_minus,
            c,
        })
    }

    fn p(&self) -> f64 {
        (self.w_plus - self.w_minus).abs()
    }

    fn q(&self) -> Result<f64> {
        Ok(0.5 * trace_norm(&(&self.rho_plus - &self.rho_minus).hermitian_part())?)
    }

    /// `Q^2 + |C|^2 / (1 - P^2)`.
    fn combination(&self) -> Result<f64> {
        let q = self.q()?;
        let p = self.p();
        Ok(q * q + self.c.norm_sqr() / (1.0 - p * p))
    }
}

/// Internals of the pure-preparation identity `Q^2 + |C|^2 / (1 - P^2) = 1`.
#[derive(Debug, Clone)]
pub struct PureIdentity {
    pub residual: f64,
    pub q: f64,
    pub c_abs: f64,
    pub p: f64,
    /// Spectrum of `Gamma = (rho+ - rho-)/2`, descending.
    pub gamma_spectrum: Vec<f64>,
    /// How far that spectrum is from `{lambda, 0, ..., 0, -lambda}`.
    pub gamma_spectrum_defect: f64,
    /// `|Q - 2 lambda|`.
    pub gamma_quality_defect: f64,
    /// `|tr(rho+ rho-) - |C|^2 / (4 w+ w-)|`.
    pub cross_term_defect: f64,
}

/// Full detail of [`pure_state_identity_check`].
pub fn pure_state_identity(inst: &InterferometerInstance) -> Result<PureIdentity> {
    if (inst.rho_d0().purity() - 1.0).abs() > VALIDATE_TOL {
        return Err(Error::Precondition("a pure initial marker state".into()));
    }
    let br = Branch::of(inst)?;
    let q = br.q()?;
    let p = br.p();
    let residual = (br.combination()? - 1.0).abs();

    let gamma = (&br.rho_plus - &br.rho_minus)
        .scale_real(0.5)
        .hermitian_part();
    let spectrum = hermitian_eigen(&gamma)?.eigenvalues;
    let n = spectrum.len();
    let lambda = spectrum[0];
    let mut defect = (spectrum[n - 1] + lambda).abs();
    for &mid in &spectrum[1..n - 1] {
        defect = defect.max(mid.abs());
    }
    let cross = br.rho_plus.trace_product(&br.rho_minus)?.re;
    let cross_expected = br.c.norm_sqr() / (4.0 * br.w_plus * br.w_minus);

    Ok(PureIdentity {
        residual,
        q,
        c_abs: br.c.norm(),
        p,
        gamma_quality_defect: (q - 2.0 * lambda.abs()).abs(),
        gamma_spectrum: spectrum,
        gamma_spectrum_defect: defect,
        cross_term_defect: (cross - cross_expected).abs(),
    })
}

/// Residual `|Q^2 + |C|^2 / (1 - P^2) - 1|` on the branch selected by `sign(s)`.
pub fn pure_state_identity_check(inst: &InterferometerInstance) -> Result<f64> {
    Ok(pure_state_identity(inst)?.residual)
}

/// Internals of the mixed-preparation bound `Q^2 + |C|^2 / (1 - P^2) <= 1`.
#[derive(Debug, Clone)]
pub struct MixedBound {
    pub slack: f64,
    pub q: f64,
    pub c: C64,
    pub p: f64,
    /// Eigenvalues `D_k` of the initial marker state, descending.
    pub weights: Vec<f64>,
    /// `C_k = <d_k| B A^dagger |d_k>`.
    pub components: Vec<C64>,
    /// `|C - sum_k D_k C_k|`.
    pub recomposition_error: f64,
    /// `theta_k = |C_k| / sqrt(1 - P^2)`.
    pub thetas: Vec<f64>,
    /// Per-component qualities `Q_k`, built from `|d_k><d_k|` with the
    /// mixture's `w+, w-`.
    pub component_qualities: Vec<f64>,
}

impl MixedBound {
    /// Whether every `theta_k` lies in `[0, 1]` (up to `SLACK_TOL`). Holds for
    /// unitary-pair blocks, not for arbitrary nonunitary ones.
    pub fn thetas_in_unit_interval(&self) -> bool {
        self.thetas.iter().all(|&t| t <= 1.0 + SLACK_TOL)
    }
}

/// Full detail of [`mixed_state_bound_check`].
pub fn mixed_state_bound(inst: &InterferometerInstance) -> Result<MixedBound> {
    let br = Branch::of(inst)?;
    let q = br.q()?;
    let p = br.p();
    let slack = 1.0 - br.combination()?;

    let eig = hermitian_eigen(inst.rho_d0())?;
    let op = &br.b * &br.a.dagger();
    let components: Vec<C64> = (0..inst.n())
        .map(|k| op.expectation(&eig.vector(k)))
        .collect();
    let recomposed: C64 = eig
        .eigenvalues
        .iter()
        .zip(&components)
        .map(|(&dk, &ck)| ck * dk)
        .sum();
    let denom = (1.0 - p * p).sqrt();
    let mut component_qualities = Vec::with_capacity(inst.n());
    for k in 0..inst.n() {
        let proj = ComplexMatrix::outer(&eig.vector(k));
        let xp = br.a.conjugate_by_dagger(&proj)?.scale_real(0.5 / br.w_plus);
        let xm =
            br.b.conjugate_by_dagger(&proj)?
                .scale_real(0.5 / br.w_minus);
        component_qualities.push(0.5 * trace_norm(&(&xp - &xm).hermitian_part())?);
    }

    Ok(MixedBound {
        slack,
        q,
        c: br.c,
        p,
        recomposition_error: (br.c - recomposed).norm(),
        thetas: components.iter().map(|ck| ck.norm() / denom).collect(),
        weights: eig.eigenvalues,
        components,
        component_qualities,
    })
}

/// Slack `1 - (Q^2 + |C|^2 / (1 - P^2))` on the branch selected by `sign(s)`.
pub fn mixed_state_bound_check(inst: &InterferometerInstance) -> Result<f64> {
    Ok(mixed_state_bound(inst)?.slack)
}
