//! The two-row spectral sequence for the rigid-motion hull of a planar
//! tiling: E² page, the single differential `d₂: E_{2,0} → E_{0,1}`,
//! E^∞ and the assembled cohomology.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{element_order, FgAbGroup, GradedGroup, IntMatrix, Presentation};
use crate::Verdict;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectralError {
    #[error("rank of H_0(T^0) is {h0_t0}, rank of H^2(Omega^0) is {h2}")]
    RankMismatch { h0_t0: usize, h2: usize },
    #[error("omega class has {found} coordinates, H_0(T^0) has {expected} generators")]
    OmegaLength { expected: usize, found: usize },
    #[error("omega class has order {order}, which does not divide the product {product} of the dagger orders")]
    OmegaOrder { order: String, product: String },
    #[error("E^2_(2,0) is {0}, expected Z (the hull modulo rotations is connected)")]
    NotConnected(FgAbGroup),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpeInput {
    /// `Ȟ^0, Ȟ^1, Ȟ^2` of the hull modulo rotations.
    pub h_omega0: [FgAbGroup; 3],
    /// Generators: free ones first, then one per torsion factor.
    pub h0_t0: FgAbGroup,
    pub omega_class: Vec<i64>,
    /// Symmetry orders of the vertex classes, when known.
    pub dagger_orders: Option<Vec<usize>>,
}

impl EpeInput {
    pub fn h0_t0_presentation(&self) -> Presentation {
        self.h0_t0.presentation()
    }

    pub fn omega_vector(&self) -> Vec<BigInt> {
        self.omega_class.iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn validate(&self) -> Result<(), SpectralError> {
        let p = self.h0_t0_presentation();
        if self.omega_class.len() != p.generators {
            return Err(SpectralError::OmegaLength { expected: p.generators, found: self.omega_class.len() });
        }
        if self.h0_t0.free_rank != self.h_omega0[2].free_rank {
            return Err(SpectralError::RankMismatch { h0_t0: self.h0_t0.free_rank, h2: self.h_omega0[2].free_rank });
        }
        if let Some(orders) = &self.dagger_orders {
            let product: BigInt = orders.iter().map(|&o| BigInt::from(o)).product();
            let order = element_order(&p, &self.omega_vector());
            let ok = matches!(&order, Some(o) if (&product % o).is_zero());
            if !ok {
                let order = order.map_or("infinite".to_string(), |o| o.to_string());
                return Err(SpectralError::OmegaOrder { order, product: product.to_string() });
            }
        }
        Ok(())
    }
}

/// Entries `E_{p,q}` for `p ∈ {0,1,2}`, `q ∈ {0,1}`; zero elsewhere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralPage {
    pub r: usize,
    /// `entries[q][p]`.
    pub entries: [[FgAbGroup; 3]; 2],
}

impl SpectralPage {
    pub fn get(&self, p: i64, q: i64) -> FgAbGroup {
        if (0..3).contains(&p) && (0..2).contains(&q) {
            self.entries[q as usize][p as usize].clone()
        } else {
            FgAbGroup::zero()
        }
    }

    pub fn is_free(&self) -> bool {
        self.entries.iter().flatten().all(|g| g.is_free())
    }

    /// Page `r + 1` when `r ≥ 3`: every `d_r` leaves the window, so
    /// nothing changes.
    pub fn turn(&self) -> SpectralPage {
        assert!(self.r >= 3, "only later pages are determined by shape alone");
        for q in 0..2i64 {
            for p in 0..3i64 {
                let (tp, tq) = differential_target(p, q, self.r);
                let (sp, sq) = (p + self.r as i64, q + 1 - self.r as i64);
                debug_assert!(self.get(tp, tq).is_zero() || self.get(p, q).is_zero());
                debug_assert!(self.get(sp, sq).is_zero() || self.get(p, q).is_zero());
            }
        }
        SpectralPage { r: self.r + 1, entries: self.entries.clone() }
    }
}

/// `d_r: E_{p,q} → E_{p−r, q+r−1}` for a homological spectral sequence.
pub fn differential_target(p: i64, q: i64, r: usize) -> (i64, i64) {
    (p - r as i64, q + r as i64 - 1)
}

pub fn assemble_e2(input: &EpeInput) -> Result<SpectralPage, SpectralError> {
    input.validate()?;
    let [h0, h1, h2] = input.h_omega0.clone();
    Ok(SpectralPage { r: 2, entries: [[h2, h1.clone(), h0.clone()], [input.h0_t0.clone(), h1, h0]] })
}

/// Applies `d₂(Γ) = [ω]` for a generator `Γ` of `E_{2,0} ≅ Z`.
pub fn apply_d2(page: &SpectralPage, omega_class: &[BigInt], h0_t0: &Presentation) -> Result<SpectralPage, SpectralError> {
    let e20 = page.get(2, 0);
    if e20 != FgAbGroup::free(1) {
        return Err(SpectralError::NotConnected(e20));
    }
    if omega_class.len() != h0_t0.generators {
        return Err(SpectralError::OmegaLength { expected: h0_t0.generators, found: omega_class.len() });
    }
    // ker(k ↦ k[ω]) is dZ ≅ Z when [ω] has finite order d, else 0
    let kernel = match element_order(h0_t0, omega_class) {
        Some(_) => FgAbGroup::free(1),
        None => FgAbGroup::zero(),
    };
    let col = IntMatrix::from_columns(h0_t0.generators, &[omega_class.to_vec()]);
    let quotient = Presentation::new(h0_t0.generators, h0_t0.relations.hstack(&col)).canonical();
    let mut entries = page.entries.clone();
    entries[0][2] = kernel;
    entries[1][0] = quotient;
    Ok(SpectralPage { r: 3, entries })
}

/// `Ȟ^k(Ω^rot)` for k = 0..=3 from E^∞: total degree `3 − k`, pieces
/// listed from the bottom of the filtration (`q = 0` first).
pub fn total_cohomology(einf: &SpectralPage) -> Vec<GradedGroup> {
    (0..=3usize)
        .map(|k| {
            let m = 3 - k as i64;
            let pieces: Vec<FgAbGroup> = (0..2).map(|q| einf.get(m - q, q)).collect();
            if pieces.iter().all(|g| g.is_free()) {
                GradedGroup::split(k, pieces)
            } else {
                GradedGroup::ambiguous(k, pieces)
            }
        })
        .collect()
}

/// Over Q the answer must be that of `Ω^0 × S^1`.
pub fn rational_collapse_check(input: &EpeInput, totals: &[GradedGroup]) -> Verdict {
    let h: Vec<usize> = input.h_omega0.iter().map(|g| g.free_rank).collect();
    let at = |k: i64| if (0..3).contains(&k) { h[k as usize] } else { 0 };
    for k in 0..=3i64 {
        let want = at(k) + at(k - 1);
        let got = totals.get(k as usize).map_or(0, |g| g.rank());
        if want != got {
            return Verdict::fail(format!("degree {k}: rank {got}, product formula gives {want}"));
        }
    }
    Verdict::Pass
}

/// All three steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralRun {
    pub e2: SpectralPage,
    pub einf: SpectralPage,
    pub groups: Vec<GradedGroup>,
    pub collapse: Verdict,
}

pub fn run_spectral(input: &EpeInput) -> Result<SpectralRun, SpectralError> {
    let e2 = assemble_e2(input)?;
    let einf = apply_d2(&e2, &input.omega_vector(), &input.h0_t0_presentation())?;
    let groups = total_cohomology(&einf);
    let collapse = rational_collapse_check(input, &groups);
    Ok(SpectralRun { e2, einf, groups, collapse })
}

/// Order of `[ω]` in `H_0(T^0)`, `None` if infinite.
pub fn omega_order(input: &EpeInput) -> Option<BigInt> {
    element_order(&input.h0_t0_presentation(), &input.omega_vector())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> FgAbGroup {
        FgAbGroup::free(n)
    }

    fn input(h: [usize; 3], t0: FgAbGroup, omega: Vec<i64>) -> EpeInput {
        EpeInput { h_omega0: [z(h[0]), z(h[1]), z(h[2])], h0_t0: t0, omega_class: omega, dagger_orders: None }
    }

    #[test]
    fn zero_omega_leaves_page() {
        let inp = input([1, 2, 1], z(1), vec![0]);
        let e2 = assemble_e2(&inp).unwrap();
        let e3 = apply_d2(&e2, &inp.omega_vector(), &inp.h0_t0_presentation()).unwrap();
        assert_eq!(e2.entries, e3.entries);
        assert_eq!(e3.turn().entries, e3.entries);
    }

    #[test]
    fn free_omega_kills_bottom_corner() {
        let inp = input([1, 0, 1], z(1), vec![1]);
        let e2 = assemble_e2(&inp).unwrap();
        let e3 = apply_d2(&e2, &inp.omega_vector(), &inp.h0_t0_presentation()).unwrap();
        assert_eq!(e3.get(2, 0), FgAbGroup::zero());
        assert_eq!(e3.get(0, 1), FgAbGroup::zero());
        for (p, q) in [(0, 0), (1, 0), (1, 1), (2, 1)] {
            assert_eq!(e3.get(p, q), e2.get(p, q));
        }
    }

    #[test]
    fn window_is_closed_for_late_differentials() {
        for r in 3..6 {
            for p in 0..3 {
                for q in 0..2 {
                    let (tp, tq) = differential_target(p, q, r);
                    assert!(!((0..3).contains(&tp) && (0..2).contains(&tq)));
                }
            }
        }
    }

    #[test]
    fn rank_mismatch() {
        let inp = input([1, 1, 2], z(1), vec![0]);
        assert!(matches!(assemble_e2(&inp), Err(SpectralError::RankMismatch { .. })));
    }

    #[test]
    fn zero_page() {
        let page = SpectralPage { r: 3, entries: Default::default() };
        assert!(total_cohomology(&page).iter().all(|g| g.group == Some(FgAbGroup::zero())));
    }
}
