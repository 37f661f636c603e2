//! Bigraded exterior algebra over the complexified dual of a complex vector
//! space of dimension `n`, with contraction and extension operators.
//!
//! Generators are indexed `0..2n`: index `k < n` is `dz^k`, index `n + k`
//! is `dz̄^k`. Monomials are stored in the canonical order
//! `dz^I ∧ dz̄^J` with `I` and `J` strictly increasing.

mod extension;
mod form;
mod frame;
mod vector;

pub use extension::{
    exp_contract, extend, extend_by_frame, extend_frame, extend_inverse, phi_phibar, phibar_phi,
    simul_contract,
};
pub use form::Form;
pub use frame::FrameEndo;
pub use vector::VectorForm;

use thiserror::Error;

/// Largest supported complex dimension (monomials are bitmasks in `u16`).
pub const MAX_DIM: usize = 16;

/// A monomial `dz^I ∧ dz̄^J` encoded as two bitmasks.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Mono {
    pub hol: u16,
    pub anti: u16,
}

impl Mono {
    pub const ONE: Mono = Mono { hol: 0, anti: 0 };

    pub fn new(hol: u16, anti: u16) -> Self {
        Mono { hol, anti }
    }

    pub fn p(&self) -> usize {
        self.hol.count_ones() as usize
    }

    pub fn q(&self) -> usize {
        self.anti.count_ones() as usize
    }

    pub fn degree(&self) -> usize {
        self.p() + self.q()
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p(), self.q())
    }

    /// Generator indices in canonical order.
    pub fn generators(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree());
        out.extend(bits(self.hol));
        out.extend(bits(self.anti).map(|j| j + n));
        out
    }

    /// `self ∧ other` as a signed monomial, or `None` when it vanishes.
    pub fn wedge(&self, other: &Mono) -> Option<(Mono, bool)> {
        if self.hol & other.hol != 0 || self.anti & other.anti != 0 {
            return None;
        }
        let mut odd = (self.q() * other.p()) % 2 == 1;
        odd ^= merge_parity(self.hol, other.hol);
        odd ^= merge_parity(self.anti, other.anti);
        Some((Mono::new(self.hol | other.hol, self.anti | other.anti), odd))
    }

    /// Interior derivative by the dual of generator `g`: removes the factor
    /// and returns the sign picked up moving it to the front.
    pub fn interior(&self, g: usize, n: usize) -> Option<(Mono, bool)> {
        if g < n {
            let b = 1u16 << g;
            if self.hol & b == 0 {
                return None;
            }
            let pos = (self.hol & (b - 1)).count_ones();
            Some((Mono::new(self.hol & !b, self.anti), pos % 2 == 1))
        } else {
            let b = 1u16 << (g - n);
            if self.anti & b == 0 {
                return None;
            }
            let pos = self.hol.count_ones() + (self.anti & (b - 1)).count_ones();
            Some((Mono::new(self.hol, self.anti & !b), pos % 2 == 1))
        }
    }

    /// Human-readable label such as `w12~3` (holomorphic 1,2; conjugate 3),
    /// 1-based to match the structure-equation files.
    pub fn label(&self) -> String {
        if *self == Mono::ONE {
            return "1".into();
        }
        let mut s = String::from("w");
        for k in bits(self.hol) {
            s.push_str(&(k + 1).to_string());
        }
        if self.anti != 0 {
            s.push('~');
            for k in bits(self.anti) {
                s.push_str(&(k + 1).to_string());
            }
        }
        s
    }
}

/// Parity of the shuffle merging disjoint sorted sets `a` then `b`.
fn merge_parity(a: u16, b: u16) -> bool {
    let mut inv = 0u32;
    for k in bits(b) {
        inv += (a >> (k + 1)).count_ones();
    }
    inv % 2 == 1
}

/// The monomial of generator `g`.
pub fn gen_mono(n: usize, g: usize) -> Mono {
    if g < n {
        Mono::new(1 << g, 0)
    } else {
        Mono::new(0, 1 << (g - n))
    }
}

/// Set bit positions in increasing order.
pub fn bits(mask: u16) -> impl Iterator<Item = usize> {
    (0..16usize).filter(move |k| mask & (1 << k) != 0)
}

pub fn mask_of(indices: &[usize]) -> u16 {
    indices.iter().fold(0u16, |m, &k| m | (1 << k))
}

/// All `k`-subsets of `0..n` as bitmasks, in lexicographic order of their
/// sorted index tuples.
pub fn subsets(n: usize, k: usize) -> Vec<u16> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(mask_of(&idx));
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Ordered monomial basis of `Λ^{p,q}`: holomorphic subsets outermost.
pub fn basis(n: usize, p: usize, q: usize) -> Vec<Mono> {
    let hs = subsets(n, p);
    let as_ = subsets(n, q);
    let mut out = Vec::with_capacity(hs.len() * as_.len());
    for &h in &hs {
        for &a in &as_ {
            out.push(Mono::new(h, a));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExteriorError {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("frame endomorphism is degenerate")]
    FrameDegenerate,
    #[error("expected bidegree {expected:?}, found {found:?}")]
    DegreeMismatch {
        expected: (usize, usize),
        found: Option<(usize, usize)>,
    },
}
