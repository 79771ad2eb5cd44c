//! Seeded generators of random interferometer instances.
//!
//! Every instance is drawn from its own child stream,
//! `SplitMix64::derive(seed, instance_key(class, dim, index))`, so a sweep
//! is reproducible instance by instance regardless of evaluation order.

use std::f64::consts::{FRAC_PI_2, SQRT_2, TAU};
use std::fmt;
use std::str::FromStr;

use crate::interferometer::{
    from_global_unitary, from_unitary_pair, InterferometerInstance, QuantonPrep, WwmBlocks,
};
use crate::linalg::{haar_unitary_from, random_density_from, ComplexMatrix};
use crate::rng::{mix64, SplitMix64};

/// Initial marker state: rank one, or rank drawn uniformly from `2..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MarkerClass {
    Pure,
    Mixed,
}

/// Quanton preparation: `s = +/-1`, or `s` uniform in `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuantonClass {
    SPure,
    SMixed,
}

/// Marker blocks: a Haar unitary pair, or blocks cut from a Haar `2n x 2n` unitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockClass {
    UnitaryPair,
    GeneralUnitary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstanceClass {
    pub marker: MarkerClass,
    pub quanton: QuantonClass,
    pub blocks: BlockClass,
}

impl InstanceClass {
    pub const ALL_MARKERS: [MarkerClass; 2] = [MarkerClass::Pure, MarkerClass::Mixed];
    pub const ALL_QUANTONS: [QuantonClass; 2] = [QuantonClass::SPure, QuantonClass::SMixed];
    pub const ALL_BLOCKS: [BlockClass; 2] = [BlockClass::UnitaryPair, BlockClass::GeneralUnitary];

    /// Every combination of the given choices, in a fixed order.
    pub fn product(
        markers: &[MarkerClass],
        quantons: &[QuantonClass],
        blocks: &[BlockClass],
    ) -> Vec<Self> {
        let mut out = Vec::new();
        for &marker in markers {
            for &quanton in quantons {
                for &b in blocks {
                    out.push(Self {
                        marker,
                        quanton,
                        blocks: b,
                    });
                }
            }
        }
        out
    }

    pub fn all() -> Vec<Self> {
        Self::product(&Self::ALL_MARKERS, &Self::ALL_QUANTONS, &Self::ALL_BLOCKS)
    }

    /// Pure quanton and pure marker.
    pub fn is_pure_preparation(&self) -> bool {
        self.marker == MarkerClass::Pure && self.quanton == QuantonClass::SPure
    }

    fn code(&self) -> u64 {
        (self.marker as u64) | (self.quanton as u64) << 1 | (self.blocks as u64) << 2
    }
}

impl fmt::Display for MarkerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MarkerClass::Pure => "pure",
            MarkerClass::Mixed => "mixed",
        })
    }
}

impl fmt::Display for QuantonClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuantonClass::SPure => "s_pure",
            QuantonClass::SMixed => "s_mixed",
        })
    }
}

impl fmt::Display for BlockClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockClass::UnitaryPair => "unitary_pair",
            BlockClass::GeneralUnitary => "general_unitary",
        })
    }
}

impl fmt::Display for InstanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.marker, self.quanton, self.blocks)
    }
}

/// One token of a class list: a marker, quanton or block class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassToken {
    Marker(MarkerClass),
    Quanton(QuantonClass),
    Blocks(BlockClass),
}

impl FromStr for ClassToken {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "pure" => ClassToken::Marker(MarkerClass::Pure),
            "mixed" => ClassToken::Marker(MarkerClass::Mixed),
            "s_pure" => ClassToken::Quanton(QuantonClass::SPure),
            "s_mixed" => ClassToken::Quanton(QuantonClass::SMixed),
            "unitary_pair" => ClassToken::Blocks(BlockClass::UnitaryPair),
            "general_unitary" => ClassToken::Blocks(BlockClass::GeneralUnitary),
            other => {
                return Err(format!(
                    "unknown class '{other}' (expected pure, mixed, s_pure, s_mixed, unitary_pair, general_unitary)"
                ))
            }
        })
    }
}

/// Expands tokens into classes; a group with no token selects all its members.
pub fn classes_from_tokens(tokens: &[ClassToken]) -> Vec<InstanceClass> {
    let mut markers: Vec<MarkerClass> = Vec::new();
    let mut quantons: Vec<QuantonClass> = Vec::new();
    let mut blocks: Vec<BlockClass> = Vec::new();
    for t in tokens {
        match *t {
            ClassToken::Marker(m) if !markers.contains(&m) => markers.push(m),
            ClassToken::Quanton(q) if !quantons.contains(&q) => quantons.push(q),
            ClassToken::Blocks(b) if !blocks.contains(&b) => blocks.push(b),
            _ => {}
        }
    }
    markers.sort();
    quantons.sort();
    blocks.sort();
    if markers.is_empty() {
        markers = InstanceClass::ALL_MARKERS.to_vec();
    }
    if quantons.is_empty() {
        quantons = InstanceClass::ALL_QUANTONS.to_vec();
    }
    if blocks.is_empty() {
        blocks = InstanceClass::ALL_BLOCKS.to_vec();
    }
    InstanceClass::product(&markers, &quantons, &blocks)
}

/// Key of instance `index` within the `(class, dim)` group.
pub fn instance_key(class: InstanceClass, dim: usize, index: u64) -> u64 {
    mix64(mix64(class.code() << 8 | dim as u64) ^ index)
}

/// Draws one instance of `class` with marker dimension `dim`.
pub fn sample_instance(
    class: InstanceClass,
    dim: usize,
    rng: &mut SplitMix64,
) -> InterferometerInstance {
    let s = match class.quanton {
        QuantonClass::SPure => {
            if rng.next_f64() < 0.5 {
                1.0
            } else {
                -1.0
            }
        }
        QuantonClass::SMixed => rng.uniform(-1.0, 1.0),
    };
    let rank = match class.marker {
        MarkerClass::Pure => 1,
        MarkerClass::Mixed => rng.range_inclusive(2.min(dim), dim),
    };
    let rho = random_density_from(dim, rank, rng).expect("rank within 1..=dim");
    let blocks = match class.blocks {
        BlockClass::UnitaryPair => {
            let u_plus = haar_unitary_from(dim, rng);
            let u_minus = haar_unitary_from(dim, rng);
            from_unitary_pair(&u_plus, &u_minus).expect("Haar unitaries")
        }
        BlockClass::GeneralUnitary => {
            from_global_unitary(&haar_unitary_from(2 * dim, rng)).expect("Haar unitary")
        }
    };
    let phi = rng.uniform(0.0, TAU);
    InterferometerInstance::new(QuantonPrep::new(s).expect("s in range"), blocks, rho, phi)
        .expect("valid by construction")
}

/// Instance `index` of the `(class, dim)` group of the sweep with `seed`.
pub fn seeded_instance(
    seed: u64,
    class: InstanceClass,
    dim: usize,
    index: u64,
) -> InterferometerInstance {
    sample_instance(
        class,
        dim,
        &mut SplitMix64::derive(seed, instance_key(class, dim, index)),
    )
}

/// Two-level instance with `|s| = 1` whose w-operators are diagonal.
///
/// The global operator is `[[C W1, S W2], [-S W1, C W2]]` with Haar `W1, W2`
/// and `C = diag(cos t1, cos t2)`, `S = diag(sin t1, sin t2)`, so that
/// `V++ V++^dagger = 2 C^2` and `V+- V+-^dagger = 2 S^2`. The marker starts
/// diagonal, `diag(d1, 1 - d1)`, so the w-operators are also diagonal in its
/// eigenbasis. With `scalar` the two angles coincide and the w-operators are
/// multiples of the identity.
pub fn restricted_two_level(rng: &mut SplitMix64, scalar: bool) -> InterferometerInstance {
    let s = if rng.next_f64() < 0.5 { 1.0 } else { -1.0 };
    let t1 = rng.uniform(0.0, FRAC_PI_2);
    let t2 = if scalar {
        t1
    } else {
        rng.uniform(0.0, FRAC_PI_2)
    };
    let c = ComplexMatrix::real_diagonal(&[t1.cos(), t2.cos()]);
    let sn = ComplexMatrix::real_diagonal(&[t1.sin(), t2.sin()]);
    let w1 = haar_unitary_from(2, rng);
    let w2 = haar_unitary_from(2, rng);
    let blocks = WwmBlocks::new(
        (&c * &w1).scale_real(SQRT_2),
        (&sn * &w2).scale_real(SQRT_2),
        (&sn * &w1).scale_real(SQRT_2),
        (&c * &w2).scale_real(SQRT_2),
    )
    .expect("2x2 blocks");
    let d1 = rng.next_f64();
    let rho = ComplexMatrix::real_diagonal(&[d1, 1.0 - d1]);
    let phi = rng.uniform(0.0, TAU);
    InterferometerInstance::new(QuantonPrep::new(s).expect("s = +/-1"), blocks, rho, phi)
        .expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{is_restricted_class, w_operator_offdiagonal};

    #[test]
    fn every_class_samples_valid_instances() {
        for class in InstanceClass::all() {
            for dim in 2..=4 {
                for i in 0..20 {
                    let inst = seeded_instance(42, class, dim, i);
                    assert_eq!(inst.n(), dim);
                    match class.quanton {
                        QuantonClass::SPure => assert_eq!(inst.s().abs(), 1.0),
                        QuantonClass::SMixed => assert!(inst.s().abs() < 1.0),
                    }
                    let purity = inst.rho_d0().purity();
                    match class.marker {
                        MarkerClass::Pure => assert!((purity - 1.0).abs() < 1e-10),
                        MarkerClass::Mixed => assert!(purity < 1.0 - 1e-6),
                    }
                }
            }
        }
    }

    #[test]
    fn seeded_instances_are_deterministic_and_distinct() {
        let class = InstanceClass::all()[5];
        assert_eq!(
            seeded_instance(1, class, 3, 7),
            seeded_instance(1, class, 3, 7)
        );
        assert_ne!(
            seeded_instance(1, class, 3, 7),
            seeded_instance(1, class, 3, 8)
        );
        assert_ne!(
            seeded_instance(1, class, 3, 7),
            seeded_instance(2, class, 3, 7)
        );
    }

    #[test]
    fn class_tokens() {
        let tokens: Vec<ClassToken> = ["pure", "s_pure"]
            .iter()
            .map(|t| t.parse().unwrap())
            .collect();
        let classes = classes_from_tokens(&tokens);
        assert_eq!(classes.len(), 2);
        assert!(classes.iter().all(|c| c.is_pure_preparation()));
        assert_eq!(classes_from_tokens(&[]).len(), 8);
        assert!("bogus".parse::<ClassToken>().is_err());
        assert_eq!(
            InstanceClass::all()[0].to_string(),
            "pure/s_pure/unitary_pair"
        );
    }

    #[test]
    fn restricted_generator_meets_restriction() {
        let mut rng = SplitMix64::new(3);
        for k in 0..200 {
            let inst = restricted_two_level(&mut rng, k % 2 == 0);
            assert!(w_operator_offdiagonal(&inst) <= 1e-12);
            assert!(is_restricted_class(&inst));
        }
    }
}
