//! Joint quanton-marker evolution through a generic two-way interferometer.
//!
//! Conventions, fixed throughout the crate:
//!
//! * Quanton basis is the `sigma_z` eigenbasis, index 0 <-> `sigma_z = +1`.
//!   Joint operators are `quanton (x) marker` with the quanton as outer index.
//! * The beam splitter and marker act through one global operator
//!   `U = (1/sqrt 2) [[V++, V+-], [-V-+, V--]]` applied as `rho -> U^dagger rho U`.
//! * The phase shifter is `rho_Q -> R rho_Q R^dagger` with `R = exp(-i phi sigma_z / 2)`;
//!   the beam merger uses `exp(-i pi sigma_y / 4)` the same way.
//! * At the output, the ways are read with the projectors `(1 +/- sigma_x) / 2`
//!   and the fringes with `(1 + sigma_z) / 2`.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pauli, ComplexMatrix, C64};
use crate::{CONSTRUCT_TOL, VALIDATE_TOL};

/// Quanton preparation `(1 + s sigma_z) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantonPrep {
    s: f64,
}

impl QuantonPrep {
    /// Accepts the closed interval `[-1, 1]`; the endpoints are the pure preparations.
    pub fn new(s: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&s) {
            return Err(Error::OutOfRange {
                name: "s",
                value: s,
            });
        }
        Ok(Self { s })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn is_pure(&self) -> bool {
        (self.s.abs() - 1.0).abs() <= CONSTRUCT_TOL
    }

    pub fn density(&self) -> ComplexMatrix {
        pauli::bloch_state([0.0, 0.0, self.s])
    }
}

/// The four marker operators `V++, V+-, V-+, V--`.
#[derive(Debug, Clone, PartialEq)]
pub struct WwmBlocks {
    vpp: ComplexMatrix,
    vpm: ComplexMatrix,
    vmp: ComplexMatrix,
    vmm: ComplexMatrix,
}

impl WwmBlocks {
    /// Checks only that the blocks share a dimension; see [`validate_unitarity`].
    pub fn new(
        vpp: ComplexMatrix,
        vpm: ComplexMatrix,
        vmp: ComplexMatrix,
        vmm: ComplexMatrix,
    ) -> Result<Self> {
        let n = vpp.dim();
        for b in [&vpm, &vmp, &vmm] {
            if b.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: b.dim(),
                });
            }
        }
        Ok(Self { vpp, vpm, vmp, vmm })
    }

    pub fn identity(n: usize) -> Self {
        let i = ComplexMatrix::identity(n);
        Self {
            vpp: i.clone(),
            vpm: i.clone(),
            vmp: i.clone(),
            vmm: i,
        }
    }

    pub fn n(&self) -> usize {
        self.vpp.dim()
    }

    pub fn vpp(&self) -> &ComplexMatrix {
        &self.vpp
    }

    pub fn vpm(&self) -> &ComplexMatrix {
        &self.vpm
    }

    pub fn vmp(&self) -> &ComplexMatrix {
        &self.vmp
    }

    pub fn vmm(&self) -> &ComplexMatrix {
        &self.vmm
    }

    /// The operator pair that plays the role of `(V++, V+-)` for a pure
    /// preparation: unchanged for `sigma_z = +1`, and `(-V-+, V--)` for `-1`.
    pub fn branch(&self, up: bool) -> (ComplexMatrix, &ComplexMatrix) {
        if up {
            (self.vpp.clone(), &self.vpm)
        } else {
            (self.vmp.scale_real(-1.0), &self.vmm)
        }
    }
}

/// `(1/sqrt 2) [[V++, V+-], [-V-+, V--]]` in the quanton `sigma_z` basis.
pub fn assemble_global_unitary(blocks: &WwmBlocks) -> ComplexMatrix {
    let neg_vmp = blocks.vmp.scale_real(-1.0);
    ComplexMatrix::from_blocks(&[&[&blocks.vpp, &blocks.vpm], &[&neg_vmp, &blocks.vmm]])
        .expect("blocks share a dimension")
        .scale_real(1.0 / SQRT_2)
}

pub fn validate_unitarity(blocks: &WwmBlocks) -> bool {
    assemble_global_unitary(blocks).is_unitary(VALIDATE_TOL)
}

/// Unitary marker case: `V++ = V-+ = U+`, `V+- = V-- = U-`.
pub fn from_unitary_pair(u_plus: &ComplexMatrix, u_minus: &ComplexMatrix) -> Result<WwmBlocks> {
    if u_plus.dim() != u_minus.dim() {
        return Err(Error::DimensionMismatch {
            expected: u_plus.dim(),
            found: u_minus.dim(),
        });
    }
    for u in [u_plus, u_minus] {
        let deviation = u.unitarity_defect();
        if deviation > VALIDATE_TOL {
            return Err(Error::NotUnitary { deviation });
        }
    }
    WwmBlocks::new(
        u_plus.clone(),
        u_minus.clone(),
        u_plus.clone(),
        u_minus.clone(),
    )
}

/// Unitary marker behind an unbalanced beam splitter.
///
/// With `bias = cos 2a` the blocks are `V++ = sqrt2 cos a U+`, `V+- = sqrt2 sin a U-`,
/// `V-+ = sqrt2 sin a U+`, `V-- = sqrt2 cos a U-`, i.e. the global operator is
/// `([[cos a, sin a], [-sin a, cos a]] (x) I) diag(U+, U-)`. For `s = 1` the
/// way probabilities are `(1 +/- bias) / 2`; `bias = 0` reproduces
/// [`from_unitary_pair`].
pub fn from_biased_unitary_pair(
    u_plus: &ComplexMatrix,
    u_minus: &ComplexMatrix,
    bias: f64,
) -> Result<WwmBlocks> {
    if !(-1.0..=1.0).contains(&bias) {
        return Err(Error::OutOfRange {
            name: "bias",
            value: bias,
        });
    }
    let pair = from_unitary_pair(u_plus, u_minus)?;
    let half_angle = 0.5 * bias.acos();
    let (sin_a, cos_a) = half_angle.sin_cos();
    WwmBlocks::new(
        pair.vpp.scale_real(SQRT_2 * cos_a),
        pair.vpm.scale_real(SQRT_2 * sin_a),
        pair.vmp.scale_real(SQRT_2 * sin_a),
        pair.vmm.scale_real(SQRT_2 * cos_a),
    )
}

/// Splits a `2n x 2n` unitary into marker blocks, undoing the `1/sqrt 2`
/// factor and the sign on `V-+`.
pub fn from_global_unitary(u: &ComplexMatrix) -> Result<WwmBlocks> {
    if !u.dim().is_multiple_of(2) {
        return Err(Error::OddDimension(u.dim()));
    }
    let deviation = u.unitarity_defect();
    if deviation > VALIDATE_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let n = u.dim() / 2;
    WwmBlocks::new(
        u.block(n, 0, 0).scale_real(SQRT_2),
        u.block(n, 0, 1).scale_real(SQRT_2),
        u.block(n, 1, 0).scale_real(-SQRT_2),
        u.block(n, 1, 1).scale_real(SQRT_2),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerInstance {
    prep: QuantonPrep,
    blocks: WwmBlocks,
    rho_d0: ComplexMatrix,
    phi: f64,
}

impl InterferometerInstance {
    /// Validates the marker state (Hermitian, unit trace, PSD), its dimension
    /// and the unitarity of the assembled global operator.
    pub fn new(
        prep: QuantonPrep,
        blocks: WwmBlocks,
        rho_d0: ComplexMatrix,
        phi: f64,
    ) -> Result<Self> {
        if rho_d0.dim() != blocks.n() {
            return Err(Error::DimensionMismatch {
                expected: blocks.n(),
                found: rho_d0.dim(),
            });
        }
        rho_d0.validate_density()?;
        let deviation = assemble_global_unitary(&blocks).unitarity_defect();
        if deviation > VALIDATE_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        if !phi.is_finite() {
            return Err(Error::OutOfRange {
                name: "phi",
                value: phi,
            });
        }
        Ok(Self {
            prep,
            blocks,
            rho_d0,
            phi,
        })
    }

    pub fn prep(&self) -> QuantonPrep {
        self.prep
    }

    pub fn s(&self) -> f64 {
        self.prep.s
    }

    pub fn blocks(&self) -> &WwmBlocks {
        &self.blocks
    }

    pub fn rho_d0(&self) -> &ComplexMatrix {
        &self.rho_d0
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn n(&self) -> usize {
        self.blocks.n()
    }

    /// Same instance with a different phase-shifter setting.
    pub fn with_phi(&self, phi: f64) -> Self {
        Self {
            phi,
            ..self.clone()
        }
    }

    pub fn is_pure_preparation(&self) -> bool {
        self.prep.is_pure() && (self.rho_d0.purity() - 1.0).abs() <= VALIDATE_TOL
    }

    /// `<X>_0 = tr(X rho_D^(0))`.
    pub fn expect0(&self, x: &ComplexMatrix) -> C64 {
        x.trace_product(&self.rho_d0).expect("marker dimension")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&InstanceJson::from(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, InstanceParseError> {
        let raw: InstanceJson = serde_json::from_str(text).map_err(InstanceParseError::Syntax)?;
        Self::try_from(raw).map_err(InstanceParseError::Invalid)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub rho_final: ComplexMatrix,
    pub w_plus: f64,
    pub w_minus: f64,
    pub c_up: C64,
    pub c_down: C64,
    pub c: C64,
    pub bloch_final: [f64; 3],
}

/// Final joint state by explicit matrix products, plus the scalar quantities.
///
/// `c_up = <V+- V++^dagger>_0`, `c_down = -<V-- V-+^dagger>_0`,
/// `c = (1+s)/2 c_up + (1-s)/2 c_down`, way probabilities from the marker
/// expectations, and Bloch components `S_x = w+ - w-`, `S_z + i S_y = -e^{-i phi} c`.
pub fn evolve(inst: &InterferometerInstance) -> EvolutionResult {
    let n = inst.n();
    let s = inst.s();
    let b = &inst.blocks;
    let id_n = ComplexMatrix::identity(n);

    let rho0 = inst.prep.density().kron(&inst.rho_d0);
    let u = assemble_global_unitary(b);
    let after_bs = u.conjugate_by_dagger(&rho0).expect("joint dims");
    let ps = pauli::rz(inst.phi).kron(&id_n);
    let after_ps = ps.conjugate(&after_bs).expect("joint dims");
    let bm = pauli::ry(FRAC_PI_2).kron(&id_n);
    let rho_final = bm
        .conjugate(&after_ps)
        .expect("joint dims")
        .hermitian_part();

    let (w_plus, w_minus) = way_probabilities(inst);
    let c_up = inst.expect0(&(&b.vpm * &b.vpp.dagger()));
    let c_down = -inst.expect0(&(&b.vmm * &b.vmp.dagger()));
    let c = c_up * (0.5 * (1.0 + s)) + c_down * (0.5 * (1.0 - s));
    let sz_isy = -C64::from_polar(1.0, -inst.phi) * c;

    EvolutionResult {
        rho_final,
        w_plus,
        w_minus,
        c_up,
        c_down,
        c,
        bloch_final: [w_plus - w_minus, sz_isy.im, sz_isy.re],
    }
}

/// `w+ = (1+s)/4 <V++ V++^dagger>_0 + (1-s)/4 <V-+ V-+^dagger>_0`, and `w-` likewise.
pub fn way_probabilities(inst: &InterferometerInstance) -> (f64, f64) {
    let (wp, wm) = w_operators(inst);
    (inst.expect0(&wp).re, inst.expect0(&wm).re)
}

/// Marker operators whose `rho_D^(0)` expectations are `w+` and `w-`.
pub fn w_operators(inst: &InterferometerInstance) -> (ComplexMatrix, ComplexMatrix) {
    let s = inst.s();
    let b = &inst.blocks;
    let (kp, km) = (0.25 * (1.0 + s), 0.25 * (1.0 - s));
    let wp =
        &(&b.vpp * &b.vpp.dagger()).scale_real(kp) + &(&b.vmp * &b.vmp.dagger()).scale_real(km);
    let wm =
        &(&b.vpm * &b.vpm.dagger()).scale_real(kp) + &(&b.vmm * &b.vmm.dagger()).scale_real(km);
    (wp, wm)
}

/// Term-by-term expansion of the final state: the `sigma_z = +1` part
/// built from `(V++, V+-)` and the `-1` part from `(-V-+, V--)`.
pub fn expanded_final_state(inst: &InterferometerInstance) -> ComplexMatrix {
    let s = inst.s();
    let up = expanded_branch(inst, true);
    let down = expanded_branch(inst, false);
    &up.scale_real(0.5 * (1.0 + s)) + &down.scale_real(0.5 * (1.0 - s))
}

fn expanded_branch(inst: &InterferometerInstance, up: bool) -> ComplexMatrix {
    let (a, b) = inst.blocks.branch(up);
    let rho = &inst.rho_d0;
    let id = ComplexMatrix::identity(2);
    let (sx, sy, sz) = (pauli::x(), pauli::y(), pauli::z());
    let quarter = |m: ComplexMatrix| m.scale_real(0.25);

    let t1 = quarter(&id + &sx).kron(&a.conjugate_by_dagger(rho).unwrap());
    let t2 = quarter(&id - &sx).kron(&b.conjugate_by_dagger(rho).unwrap());
    let t3 = quarter(&sy.scale(crate::linalg::I) - &sz)
        .kron(&(&(&a.dagger() * rho) * b))
        .scale(C64::from_polar(1.0, -inst.phi));
    let t4 = quarter(&sz + &sy.scale(crate::linalg::I))
        .kron(&(&(&b.dagger() * rho) * &a))
        .scale(-C64::from_polar(1.0, inst.phi));
    &(&t1 + &t2) + &(&t3 + &t4)
}

/// Upper output port probability `tr{(1 + sigma_z)/2 rho^(f)}` at the
/// instance's phase setting.
pub fn output_port_probability(inst: &InterferometerInstance) -> f64 {
    let proj = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
    let rho_f = evolve(inst).rho_final;
    rho_f
        .partial_trace_first_weighted(&proj)
        .expect("joint dims")
        .trace()
        .re
}

/// The real-part form of `S_z`: `-(1+s)/2 Re[c_up e^{-i phi}] - (1-s)/2 Re[c_down e^{-i phi}]`.
pub fn bloch_z_real_part_form(inst: &InterferometerInstance, res: &EvolutionResult) -> f64 {
    let s = inst.s();
    let ph = C64::from_polar(1.0, -inst.phi);
    -0.5 * (1.0 + s) * (res.c_up * ph).re - 0.5 * (1.0 - s) * (res.c_down * ph).re
}

/// Bloch vector of the final quanton state read off `rho^(f)` directly.
pub fn bloch_from_final_state(res: &EvolutionResult) -> [f64; 3] {
    let n = res.rho_final.dim() / 2;
    pauli::bloch_vector(&res.rho_final.partial_trace_second(n).expect("joint dims"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalStates {
    pub w_plus: f64,
    pub rho_plus: ComplexMatrix,
    pub w_minus: f64,
    pub rho_minus: ComplexMatrix,
}

impl ConditionalStates {
    /// `w+ rho+ - w- rho-`.
    pub fn weighted_difference(&self) -> ComplexMatrix {
        &self.rho_plus.scale_real(self.w_plus) - &self.rho_minus.scale_real(self.w_minus)
    }
}

/// Unnormalized conditional marker states
/// `w+ rho+ = (1+s)/4 V++^dagger rho V++ + (1-s)/4 V-+^dagger rho V-+` (and `-`
/// with `V+-`, `V--`), returned normalized together with their weights.
pub fn conditional_wwm_states(inst: &InterferometerInstance) -> Result<ConditionalStates> {
    let (xp, xm) = weighted_conditionals(inst);
    normalize_conditionals(xp, xm)
}

pub(crate) fn weighted_conditionals(
    inst: &InterferometerInstance,
) -> (ComplexMatrix, ComplexMatrix) {
    let s = inst.s();
    let b = &inst.blocks;
    let rho = &inst.rho_d0;
    let (kp, km) = (0.25 * (1.0 + s), 0.25 * (1.0 - s));
    let xp = &b.vpp.conjugate_by_dagger(rho).unwrap().scale_real(kp)
        + &b.vmp.conjugate_by_dagger(rho).unwrap().scale_real(km);
    let xm = &b.vpm.conjugate_by_dagger(rho).unwrap().scale_real(kp)
        + &b.vmm.conjugate_by_dagger(rho).unwrap().scale_real(km);
    (xp.hermitian_part(), xm.hermitian_part())
}

fn normalize_conditionals(xp: ComplexMatrix, xm: ComplexMatrix) -> Result<ConditionalStates> {
    let w_plus = xp.trace().re;
    let w_minus = xm.trace().re;
    for w in [w_plus, w_minus] {
        if w < 1e-12 {
            return Err(Error::DegenerateBranch { w });
        }
    }
    Ok(ConditionalStates {
        w_plus,
        rho_plus: xp.scale_real(1.0 / w_plus),
        w_minus,
        rho_minus: xm.scale_real(1.0 / w_minus),
    })
}

/// Conditional states recovered from the final joint state with the
/// output-side way projectors `(1 +/- sigma_x)/2`.
pub fn conditional_from_final_state(res: &EvolutionResult) -> Result<ConditionalStates> {
    let id = ComplexMatrix::identity(2);
    let sx = pauli::x();
    let pp = (&id + &sx).scale_real(0.5);
    let pm = (&id - &sx).scale_real(0.5);
    let xp = res
        .rho_final
        .partial_trace_first_weighted(&pp)?
        .hermitian_part();
    let xm = res
        .rho_final
        .partial_trace_first_weighted(&pm)?
        .hermitian_part();
    normalize_conditionals(xp, xm)
}

/// `V = |C|`.
pub fn visibility(res: &EvolutionResult) -> f64 {
    res.c.norm()
}

/// `P = |w+ - w-|`.
pub fn predictability(res: &EvolutionResult) -> f64 {
    (res.w_plus - res.w_minus).abs()
}

// ---------------------------------------------------------------------------
// JSON instance schema

/// Wire form of an instance. Complex entries are `[re, im]` pairs, matrices
/// are flat row-major lists of `n * n` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceJson {
    pub s: f64,
    pub phi: f64,
    pub n: usize,
    pub rho_d0: Vec<[f64; 2]>,
    pub blocks: BlocksJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlocksJson {
    pub vpp: Vec<[f64; 2]>,
    pub vpm: Vec<[f64; 2]>,
    pub vmp: Vec<[f64; 2]>,
    pub vmm: Vec<[f64; 2]>,
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceParseError {
    #[error("malformed instance JSON: {0}")]
    Syntax(serde_json::Error),
    #[error("invalid instance: {0}")]
    Invalid(Error),
}

fn matrix_to_pairs(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    m.entries().iter().map(|z| [z.re, z.im]).collect()
}

fn pairs_to_matrix(n: usize, pairs: &[[f64; 2]]) -> Result<ComplexMatrix> {
    ComplexMatrix::from_vec(n, pairs.iter().map(|p| C64::new(p[0], p[1])).collect())
}

impl From<&InterferometerInstance> for InstanceJson {
    fn from(inst: &InterferometerInstance) -> Self {
        let b = &inst.blocks;
        InstanceJson {
            s: inst.s(),
            phi: inst.phi,
            n: inst.n(),
            rho_d0: matrix_to_pairs(&inst.rho_d0),
            blocks: BlocksJson {
                vpp: matrix_to_pairs(&b.vpp),
                vpm: matrix_to_pairs(&b.vpm),
                vmp: matrix_to_pairs(&b.vmp),
                vmm: matrix_to_pairs(&b.vmm),
            },
        }
    }
}

impl TryFrom<InstanceJson> for InterferometerInstance {
    type Error = Error;

    fn try_from(raw: InstanceJson) -> Result<Self> {
        let n = raw.n;
        let blocks = WwmBlocks::new(
            pairs_to_matrix(n, &raw.blocks.vpp)?,
            pairs_to_matrix(n, &raw.blocks.vpm)?,
            pairs_to_matrix(n, &raw.blocks.vmp)?,
            pairs_to_matrix(n, &raw.blocks.vmm)?,
        )?;
        InterferometerInstance::new(
            QuantonPrep::new(raw.s)?,
            blocks,
            pairs_to_matrix(n, &raw.rho_d0)?,
            raw.phi,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_random_unitary, random_density, ONE, ZERO};

    fn ket0_state(n: usize) -> ComplexMatrix {
        let mut v = vec![ZERO; n];
        v[0] = ONE;
        ComplexMatrix::outer(&v)
    }

    fn identity_instance(s: f64, n: usize, rho: ComplexMatrix, phi: f64) -> InterferometerInstance {
        InterferometerInstance::new(
            QuantonPrep::new(s).unwrap(),
            WwmBlocks::identity(n),
            rho,
            phi,
        )
        .unwrap()
    }

    fn flip_instance(s: f64) -> InterferometerInstance {
        let blocks = from_unitary_pair(&ComplexMatrix::identity(2), &pauli::x()).unwrap();
        InterferometerInstance::new(QuantonPrep::new(s).unwrap(), blocks, ket0_state(2), 0.0)
            .unwrap()
    }

    #[test]
    fn prep_range() {
        assert!(QuantonPrep::new(1.0).is_ok());
        assert!(QuantonPrep::new(-1.0).is_ok());
        assert!(QuantonPrep::new(1.0 + 1e-9).is_err());
    }

    #[test]
    fn scalar_blocks_give_real_hadamard() {
        let u = assemble_global_unitary(&WwmBlocks::identity(1));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(u.max_abs_diff(&ComplexMatrix::from_real_rows(&[[h, h], [-h, h]])) < 1e-15);
    }

    #[test]
    fn mixed_identity_and_flip_blocks_are_unitary() {
        let i2 = ComplexMatrix::identity(2);
        let x = pauli::x();
        let blocks = WwmBlocks::new(i2.clone(), x.clone(), i2, x).unwrap();
        let u = assemble_global_unitary(&blocks);
        // U^dagger U by direct multiplication.
        assert!((&u.dagger() * &u).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        assert!(validate_unitarity(&blocks));
    }

    #[test]
    fn unitarity_validation_cases() {
        assert!(validate_unitarity(&WwmBlocks::identity(2)));
        assert!(validate_unitarity(
            &from_unitary_pair(&ComplexMatrix::identity(3), &haar_random_unitary(3, 1)).unwrap()
        ));
        let b = WwmBlocks::identity(2);
        let scaled = WwmBlocks::new(
            b.vpp.scale_real(2.0),
            b.vpm.clone(),
            b.vmp.clone(),
            b.vmm.clone(),
        )
        .unwrap();
        assert!(!validate_unitarity(&scaled));
    }

    #[test]
    fn block_dimension_mismatch() {
        let e = WwmBlocks::new(
            ComplexMatrix::identity(2),
            ComplexMatrix::identity(2),
            ComplexMatrix::identity(3),
            ComplexMatrix::identity(2),
        )
        .unwrap_err();
        assert_eq!(
            e,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn unitary_pair_cases() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(from_unitary_pair(&i2, &i2).unwrap(), WwmBlocks::identity(2));
        assert!(validate_unitarity(
            &from_unitary_pair(&i2, &pauli::x()).unwrap()
        ));
        let phi = std::f64::consts::FRAC_PI_2;
        let blocks = from_unitary_pair(&pauli::rz(-phi), &pauli::rz(phi)).unwrap();
        assert!(validate_unitarity(&blocks));
        assert!(matches!(
            from_unitary_pair(&i2.scale_real(1.1), &i2),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn global_unitary_round_trips() {
        let blocks =
            from_global_unitary(&assemble_global_unitary(&WwmBlocks::identity(2))).unwrap();
        assert!(blocks.vpp.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(blocks.vmp.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        for (dim, seed) in [(4, 3), (6, 4), (8, 5)] {
            let u = haar_random_unitary(dim, seed);
            let back = assemble_global_unitary(&from_global_unitary(&u).unwrap());
            assert!(back.max_abs_diff(&u) <= 1e-12);
        }
    }

    #[test]
    fn global_unitary_errors() {
        assert_eq!(
            from_global_unitary(&ComplexMatrix::identity(3)).unwrap_err(),
            Error::OddDimension(3)
        );
        assert!(matches!(
            from_global_unitary(&ComplexMatrix::identity(4).scale_real(0.5)),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn biased_pair_sets_way_probabilities() {
        let u = haar_random_unitary(2, 9);
        let v = haar_random_unitary(2, 10);
        for bias in [-0.8, 0.0, 0.35, 1.0] {
            let blocks = from_biased_unitary_pair(&u, &v, bias).unwrap();
            assert!(validate_unitarity(&blocks));
            let inst = InterferometerInstance::new(
                QuantonPrep::new(1.0).unwrap(),
                blocks,
                random_density(2, 2, 1).unwrap(),
                0.0,
            )
            .unwrap();
            let (wp, wm) = way_probabilities(&inst);
            assert!((wp - wm - bias).abs() < 1e-12);
        }
        let zero_bias = from_biased_unitary_pair(&u, &v, 0.0).unwrap();
        let pair = from_unitary_pair(&u, &v).unwrap();
        assert!(zero_bias.vpp.max_abs_diff(&pair.vpp) < 1e-15);
        assert!(zero_bias.vmm.max_abs_diff(&pair.vmm) < 1e-15);
    }

    #[test]
    fn identity_blocks_pure_quanton() {
        for rho in [ket0_state(2), random_density(2, 2, 3).unwrap()] {
            let res = evolve(&identity_instance(1.0, 2, rho, 0.0));
            assert!((res.w_plus - 0.5).abs() < 1e-15 && (res.w_minus - 0.5).abs() < 1e-15);
            assert!((res.c_up - ONE).norm() < 1e-15);
            assert!((res.c_down + ONE).norm() < 1e-15);
            assert!((res.c - ONE).norm() < 1e-15);
            assert!((visibility(&res) - 1.0).abs() < 1e-15);
            assert!(predictability(&res) < 1e-15);
            // Full matrix route agrees with the contrast factor.
            let direct = bloch_from_final_state(&res);
            assert!((direct[2] + 1.0).abs() < 1e-14, "{direct:?}");
        }
    }

    #[test]
    fn flip_marker_kills_visibility() {
        let res = evolve(&flip_instance(0.0));
        assert!((res.w_plus - 0.5).abs() < 1e-15);
        assert!(res.c_up.norm() < 1e-15);
        assert!(res.c.norm() < 1e-15);
        assert_eq!(visibility(&res), 0.0);
        assert_eq!(predictability(&res), 0.0);
        let direct = bloch_from_final_state(&res);
        assert!(direct.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn unpolarized_quanton_has_no_coherence() {
        let res = evolve(&identity_instance(0.0, 2, ket0_state(2), 0.4));
        assert!(res.c.norm() < 1e-15);
        assert!(visibility(&res) < 1e-15);
    }

    #[test]
    fn scalar_marker_full_predictability() {
        // U = identity: V++ = V-- = sqrt2, V+- = V-+ = 0.
        let r2 = ComplexMatrix::real_diagonal(&[SQRT_2]);
        let z = ComplexMatrix::zeros(1);
        let blocks = WwmBlocks::new(r2.clone(), z.clone(), z, r2).unwrap();
        let inst = InterferometerInstance::new(
            QuantonPrep::new(1.0).unwrap(),
            blocks,
            ComplexMatrix::identity(1),
            0.2,
        )
        .unwrap();
        let res = evolve(&inst);
        assert!((res.w_plus - 1.0).abs() < 1e-15);
        assert!((predictability(&res) - 1.0).abs() < 1e-15);
        assert_eq!(visibility(&res), 0.0);
    }

    #[test]
    fn conditional_states_for_flip_marker() {
        let cond = conditional_wwm_states(&flip_instance(0.0)).unwrap();
        assert!((cond.w_plus - 0.5).abs() < 1e-15 && (cond.w_minus - 0.5).abs() < 1e-15);
        assert!(
            cond.rho_plus
                .max_abs_diff(&ComplexMatrix::real_diagonal(&[1.0, 0.0]))
                < 1e-15
        );
        assert!(
            cond.rho_minus
                .max_abs_diff(&ComplexMatrix::real_diagonal(&[0.0, 1.0]))
                < 1e-15
        );
    }

    #[test]
    fn identity_blocks_store_nothing() {
        let rho = random_density(3, 2, 8).unwrap();
        let cond = conditional_wwm_states(&identity_instance(0.3, 3, rho.clone(), 0.0)).unwrap();
        assert!(cond.rho_plus.max_abs_diff(&rho) < 1e-14);
        assert!(cond.rho_minus.max_abs_diff(&rho) < 1e-14);
    }

    #[test]
    fn pure_inputs_give_pure_conditionals() {
        for seed in 0..20 {
            let blocks = from_unitary_pair(
                &haar_random_unitary(3, seed),
                &haar_random_unitary(3, seed + 100),
            )
            .unwrap();
            let inst = InterferometerInstance::new(
                QuantonPrep::new(1.0).unwrap(),
                blocks,
                random_density(3, 1, seed).unwrap(),
                0.0,
            )
            .unwrap();
            let cond = conditional_wwm_states(&inst).unwrap();
            assert!((cond.rho_plus.purity() - 1.0).abs() < 1e-10);
            assert!((cond.rho_minus.purity() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_branch_is_an_error() {
        let r2 = ComplexMatrix::real_diagonal(&[SQRT_2]);
        let z = ComplexMatrix::zeros(1);
        let blocks = WwmBlocks::new(r2.clone(), z.clone(), z, r2).unwrap();
        let inst = InterferometerInstance::new(
            QuantonPrep::new(1.0).unwrap(),
            blocks,
            ComplexMatrix::identity(1),
            0.0,
        )
        .unwrap();
        let err = conditional_wwm_states(&inst).unwrap_err();
        assert!(err.is_degenerate());
    }

    #[test]
    fn instance_rejects_bad_marker_state() {
        let err = InterferometerInstance::new(
            QuantonPrep::new(1.0).unwrap(),
            WwmBlocks::identity(2),
            ComplexMatrix::real_diagonal(&[0.7, 0.7]),
            0.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidDensity(_)));
        let err = InterferometerInstance::new(
            QuantonPrep::new(1.0).unwrap(),
            WwmBlocks::identity(2),
            ComplexMatrix::identity(3).scale_real(1.0 / 3.0),
            0.0,
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn json_round_trip_and_errors() {
        let inst = flip_instance(0.25).with_phi(0.7);
        let text = inst.to_json();
        assert_eq!(InterferometerInstance::from_json(&text).unwrap(), inst);
        assert!(matches!(
            InterferometerInstance::from_json("{ not json"),
            Err(InstanceParseError::Syntax(_))
        ));
        let bad = text.replace("\"s\":0.25", "\"s\":2.0");
        assert!(matches!(
            InterferometerInstance::from_json(&bad),
            Err(InstanceParseError::Invalid(_))
        ));
    }
}
