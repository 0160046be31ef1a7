use serde::{Deserialize, Serialize};

use super::{initial_ids, refine, Molecule};
use crate::{Error, Result};

pub const DEFAULT_RADIUS: usize = 3;
pub const DEFAULT_NBITS: usize = 1024;

/// Fixed-length bit vector packed into 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    pub nbits: usize,
    pub radius: usize,
    words: Vec<u64>,
}

impl Fingerprint {
    pub fn empty(nbits: usize, radius: usize) -> Result<Self> {
        if nbits == 0 || !nbits.is_power_of_two() {
            return Err(Error::Config(format!(
                "fingerprint length {nbits} must be a power of two"
            )));
        }
        Ok(Self {
            nbits,
            radius,
            words: vec![0; nbits.div_ceil(64)],
        })
    }

    pub fn get(&self, bit: usize) -> bool {
        bit < self.nbits && self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    fn set(&mut self, bit: usize) {
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    pub fn popcount(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn on_bits(&self) -> Vec<usize> {
        (0..self.nbits).filter(|&i| self.get(i)).collect()
    }

    /// Bits as 0.0/1.0 features.
    pub fn to_features(&self) -> Vec<f64> {
        (0..self.nbits).map(|i| f64::from(u8::from(self.get(i)))).collect()
    }

    /// Jaccard similarity of the on-bits; two empty fingerprints score 1.
    pub fn tanimoto(&self, other: &Fingerprint) -> Result<f64> {
        if self.nbits != other.nbits {
            return Err(Error::shape("fingerprint bits", self.nbits, other.nbits));
        }
        let (mut both, mut either) = (0u32, 0u32);
        for (a, b) in self.words.iter().zip(&other.words) {
            both += (a & b).count_ones();
            either += (a | b).count_ones();
        }
        Ok(if either == 0 {
            1.0
        } else {
            f64::from(both) / f64::from(either)
        })
    }
}

/// ECFP-style hashed circular fingerprint. Identifiers from rounds
/// `0..=radius` are folded into `nbits` by masking.
pub fn circular_fingerprint(mol: &Molecule, radius: usize, nbits: usize) -> Result<Fingerprint> {
    let mut fp = Fingerprint::empty(nbits, radius)?;
    let adj = mol.adjacency();
    let mut ids = initial_ids(mol);
    for round in 0..=radius {
        if round > 0 {
            ids = refine(mol, &adj, &ids, round as u64);
        }
        for &id in &ids {
            fp.set((id & (nbits as u64 - 1)) as usize);
        }
    }
    Ok(fp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse_smiles;

    fn fp(s: &str) -> Fingerprint {
        circular_fingerprint(&parse_smiles(s).unwrap(), DEFAULT_RADIUS, DEFAULT_NBITS).unwrap()
    }

    #[test]
    fn deterministic_and_order_independent() {
        assert_eq!(fp("CCO"), fp("CCO"));
        assert_eq!(fp("CCO"), fp("OCC"));
        assert_eq!(fp("CCc1ccccc1"), fp("c1ccccc1CC"));
    }

    #[test]
    fn self_similarity_is_one() {
        let a = fp("CC(=O)Nc1ccc(O)cc1");
        assert_eq!(a.tanimoto(&a).unwrap(), 1.0);
        let b = fp("CCN");
        let t = a.tanimoto(&b).unwrap();
        assert!((0.0..1.0).contains(&t));
    }

    #[test]
    fn popcount_bounded() {
        let m = parse_smiles("CCCCCCCCCCCCCCCCCCCCCCCCCCCCCCC").unwrap();
        let f = circular_fingerprint(&m, 3, 8).unwrap();
        assert!(f.popcount() <= 8);
        assert_eq!(f.to_features().len(), 8);
    }

    #[test]
    fn nbits_must_be_power_of_two() {
        let m = parse_smiles("C").unwrap();
        assert!(matches!(circular_fingerprint(&m, 2, 1000), Err(Error::Config(_))));
        assert!(matches!(circular_fingerprint(&m, 2, 0), Err(Error::Config(_))));
    }

    #[test]
    fn different_molecules_differ() {
        assert_ne!(fp("c1ccccc1"), fp("C1CCCCC1"));
    }
}
