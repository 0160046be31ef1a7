//! SMILES parsing, hashed circular fingerprints and Murcko scaffolds.
//!
//! Identifiers are hashed with xxh3-64 under [`HASH_SEED`], so fingerprints and
//! scaffold keys are stable across platforms and releases.

mod fingerprint;
mod mol;
mod scaffold;
mod smiles;

pub use fingerprint::{circular_fingerprint, Fingerprint, DEFAULT_NBITS, DEFAULT_RADIUS};
pub use mol::{Atom, Bond, BondOrder, Molecule};
pub use scaffold::{murcko_atoms, murcko_scaffold, scaffold_key, EMPTY_SCAFFOLD_KEY};
pub use smiles::{parse_smiles, ParseError, ParseErrorKind};

pub const HASH_SEED: u64 = 0x6871_6e6e_6563_6670;

fn hash_words(words: &[u64]) -> u64 {
    let bytes: Vec<u8> = words.iter().flat_map(|w| w.to_le_bytes()).collect();
    xxhash_rust::xxh3::xxh3_64_with_seed(&bytes, HASH_SEED)
}

/// Initial per-atom identifiers from (atomic number, degree, charge,
/// hydrogens, aromaticity).
fn initial_ids(mol: &Molecule) -> Vec<u64> {
    let adj = mol.adjacency();
    mol.atoms
        .iter()
        .zip(&adj)
        .map(|(a, bonds)| {
            hash_words(&[
                u64::from(a.atomic_number),
                bonds.len() as u64,
                a.charge as i64 as u64,
                u64::from(a.hydrogens),
                u64::from(a.aromatic),
            ])
        })
        .collect()
}

/// One refinement round: each atom hashes its own id with the sorted
/// (bond order, neighbor id) pairs.
fn refine(mol: &Molecule, adj: &[Vec<usize>], ids: &[u64], round: u64) -> Vec<u64> {
    (0..ids.len())
        .map(|i| {
            let mut env: Vec<(u64, u64)> = adj[i]
                .iter()
                .map(|&k| {
                    let b = &mol.bonds[k];
                    (u64::from(b.order.code()), ids[b.other(i)])
                })
                .collect();
            env.sort_unstable();
            let mut words = vec![round, ids[i]];
            words.extend(env.into_iter().flat_map(|(o, id)| [o, id]));
            hash_words(&words)
        })
        .collect()
}
