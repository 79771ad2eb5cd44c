use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Haar-distributed unitary of size `dim`, deterministic in `seed`.
pub fn haar_random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    haar_unitary_from(dim, &mut SplitMix64::new(seed))
}

/// Ginibre matrix (i.i.d. complex normals) orthonormalized column by column.
///
/// Gram-Schmidt yields the QR factor whose `R` has a real positive diagonal,
/// which is exactly the phase normalization that makes `Q` Haar distributed.
/// Each column is projected twice to keep orthogonality at round-off level.
pub fn haar_unitary_from(dim: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    assert!(dim >= 1, "unitary dimension must be positive");
    let sd = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim)
            .map(|_| C64::new(sd * rng.normal(), sd * rng.normal()))
            .collect();
        for _ in 0..2 {
            for q in &cols {
                let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // A Ginibre column is almost surely independent; redraw if not.
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut u = ComplexMatrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            u[(i, j)] = z;
        }
    }
    u
}

/// Random density matrix `G G^dagger / tr(G G^dagger)` with `G` a `dim x rank`
/// Ginibre matrix; the result has the requested rank almost surely.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<ComplexMatrix> {
    random_density_from(dim, rank, &mut SplitMix64::new(seed))
}

pub fn random_density_from(dim: usize, rank: usize, rng: &mut SplitMix64) -> Result<ComplexMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::RankOutOfRange { rank, dim });
    }
    let g: Vec<Vec<C64>> = (0..dim)
        .map(|_| {
            (0..rank)
                .map(|_| C64::new(rng.normal(), rng.normal()))
                .collect()
        })
        .collect();
    let mut rho = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            rho[(i, j)] = g[i].iter().zip(&g[j]).map(|(a, b)| a * b.conj()).sum();
        }
    }
    let tr = rho.trace().re;
    let rho = rho.scale_real(1.0 / tr).hermitian_part();
    // Renormalize once more so the trace is 1 to the last bit the arithmetic allows.
    let tr = rho.trace().re;
    let mut rho = rho.scale_real(1.0 / tr);
    for i in 0..dim {
        rho[(i, i)] = C64::new(rho[(i, i)].re, 0.0);
    }
    Ok(rho)
}
