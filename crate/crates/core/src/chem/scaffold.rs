use super::{hash_words, initial_ids, refine, Molecule};

/// Key of the empty scaffold (acyclic molecules).
pub const EMPTY_SCAFFOLD_KEY: u64 = 0;

const KEY_ROUNDS: u64 = 3;

/// Indices of the atoms kept by the scaffold: terminal non-ring atoms are
/// pruned until none remain. Ascending order.
pub fn murcko_atoms(mol: &Molecule) -> Vec<usize> {
    let in_ring = mol.ring_atoms();
    let adj = mol.adjacency();
    let mut alive = vec![true; mol.atoms.len()];
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut queue: Vec<usize> = (0..mol.atoms.len())
        .filter(|&i| !in_ring[i] && degree[i] <= 1)
        .collect();
    while let Some(i) = queue.pop() {
        if !alive[i] {
            continue;
        }
        alive[i] = false;
        for &k in &adj[i] {
            let j = mol.bonds[k].other(i);
            if alive[j] {
                degree[j] -= 1;
                if !in_ring[j] && degree[j] <= 1 {
                    queue.push(j);
                }
            }
        }
    }
    (0..mol.atoms.len()).filter(|&i| alive[i]).collect()
}

/// Ring systems plus linkers. Hydrogens of kept atoms absorb the bond orders
/// of pruned substituents so the result still satisfies valence.
pub fn murcko_scaffold(mol: &Molecule) -> Molecule {
    let keep = murcko_atoms(mol);
    let mut index = vec![usize::MAX; mol.atoms.len()];
    for (new, &old) in keep.iter().enumerate() {
        index[old] = new;
    }
    let mut out = Molecule {
        atoms: keep.iter().map(|&i| mol.atoms[i].clone()).collect(),
        bonds: Vec::new(),
    };
    for bond in &mol.bonds {
        match (index[bond.a], index[bond.b]) {
            (usize::MAX, usize::MAX) => {}
            (a, usize::MAX) | (usize::MAX, a) => {
                let h = &mut out.atoms[a].hydrogens;
                *h = h.saturating_add(bond.order.valence() as u8);
            }
            (a, b) => out.bonds.push(super::Bond {
                a,
                b,
                order: bond.order,
            }),
        }
    }
    out
}

/// Permutation-invariant hash of the scaffold graph. Distinct scaffolds may
/// (rarely) collide; acyclic molecules map to [`EMPTY_SCAFFOLD_KEY`].
pub fn scaffold_key(mol: &Molecule) -> u64 {
    let scaffold = murcko_scaffold(mol);
    if scaffold.is_empty() {
        return EMPTY_SCAFFOLD_KEY;
    }
    let adj = scaffold.adjacency();
    let mut ids = initial_ids(&scaffold);
    for round in 1..=KEY_ROUNDS {
        ids = refine(&scaffold, &adj, &ids, round);
    }
    ids.sort_unstable();
    match hash_words(&ids) {
        EMPTY_SCAFFOLD_KEY => 1,
        key => key,
    }
}
