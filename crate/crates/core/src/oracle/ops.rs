use nalgebra::{DMatrix, DVector};

use crate::C64;

/// Operator that maps every basis state to at most one basis state:
/// Pauli strings and Jordan-Wigner fermion monomials.
#[derive(Clone, Debug)]
pub struct Monomial {
    map: Vec<Option<(usize, C64)>>,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

impl Monomial {
    fn from_fn<F: Fn(usize) -> Option<(usize, C64)>>(sites: usize, f: F) -> Self {
        Monomial {
            map: (0..1usize << sites).map(f).collect(),
        }
    }

    pub fn identity(sites: usize) -> Self {
        Self::from_fn(sites, |s| Some((s, one())))
    }

    pub fn sigma_x(sites: usize, i: usize) -> Self {
        Self::from_fn(sites, |s| Some((s ^ (1 << i), one())))
    }

    pub fn sigma_y(sites: usize, i: usize) -> Self {
        // sy |up> = i |down>, sy |down> = -i |up>
        Self::from_fn(sites, |s| {
            let amp = if s >> i & 1 == 1 {
                C64::new(0.0, 1.0)
            } else {
                C64::new(0.0, -1.0)
            };
            Some((s ^ (1 << i), amp))
        })
    }

    pub fn sigma_z(sites: usize, i: usize) -> Self {
        Self::from_fn(sites, |s| {
            let sign = if s >> i & 1 == 1 { 1.0 } else { -1.0 };
            Some((s, C64::new(sign, 0.0)))
        })
    }

    /// `c_j = prod_{m<j} (-sz_m) s^-_j`.
    pub fn annihilate(sites: usize, j: usize) -> Self {
        Self::from_fn(sites, |s| {
            if s >> j & 1 == 0 {
                return None;
            }
            let parity = (s & ((1 << j) - 1)).count_ones();
            let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
            Some((s ^ (1 << j), C64::new(sign, 0.0)))
        })
    }

    /// `c_j^+`.
    pub fn create(sites: usize, j: usize) -> Self {
        Self::from_fn(sites, |s| {
            if s >> j & 1 == 1 {
                return None;
            }
            let parity = (s & ((1 << j) - 1)).count_ones();
            let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
            Some((s ^ (1 << j), C64::new(sign, 0.0)))
        })
    }

    /// Operator product `self * other` (apply `other` first).
    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            map: other
                .map
                .iter()
                .map(|entry| {
                    let (mid, a) = (*entry)?;
                    let (end, b) = self.map[mid]?;
                    Some((end, a * b))
                })
                .collect(),
        }
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(v.len());
        for (s, entry) in self.map.iter().enumerate() {
            if let Some((t, a)) = entry {
                out[*t] += a * v[s];
            }
        }
        out
    }

    pub fn expect_pure(&self, v: &DVector<C64>) -> C64 {
        v.dotc(&self.apply(v))
    }

    /// `Tr(rho O)`.
    pub fn expect_mixed(&self, rho: &DMatrix<C64>) -> C64 {
        self.map
            .iter()
            .enumerate()
            .filter_map(|(s, entry)| entry.map(|(t, a)| rho[(s, t)] * a))
            .sum()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.map.len();
        let mut m = DMatrix::zeros(n, n);
        for (s, entry) in self.map.iter().enumerate() {
            if let Some((t, a)) = entry {
                m[(*t, s)] += *a;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fermions_anticommute() {
        let l = 3;
        for i in 0..l {
            for j in 0..l {
                let ci = Monomial::annihilate(l, i).to_dense();
                let cj = Monomial::annihilate(l, j).to_dense();
                let cdj = Monomial::create(l, j).to_dense();
                let anti = &ci * &cdj + &cdj * &ci;
                let expect = if i == j {
                    DMatrix::identity(8, 8)
                } else {
                    DMatrix::zeros(8, 8)
                };
                assert!((anti - expect).iter().all(|z| z.norm() < 1e-14));
                assert!((&ci * &cj + &cj * &ci).iter().all(|z| z.norm() < 1e-14));
            }
        }
    }

    #[test]
    fn sz_is_twice_occupation_minus_one() {
        let l = 3;
        for i in 0..l {
            let n = Monomial::create(l, i).mul(&Monomial::annihilate(l, i)).to_dense();
            let sz = Monomial::sigma_z(l, i).to_dense();
            let diff = sz - (n * C64::new(2.0, 0.0) - DMatrix::identity(8, 8));
            assert!(diff.iter().all(|z| z.norm() < 1e-14));
        }
    }

    #[test]
    fn pauli_algebra() {
        let x = Monomial::sigma_x(1, 0);
        let y = Monomial::sigma_y(1, 0);
        let z = Monomial::sigma_z(1, 0);
        // x y = i z
        let xy = x.mul(&y).to_dense();
        let iz = z.to_dense() * C64::new(0.0, 1.0);
        assert!((xy - iz).iter().all(|e| e.norm() < 1e-14));
    }
}
