use std::collections::HashMap;

use thiserror::Error;

use super::mol::{Atom, Bond, BondOrder, Molecule};

/// Element symbols by atomic number (index 0 unused).
const ELEMENTS: [&str; 119] = [
    "", "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S",
    "Cl", "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge",
    "As", "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
    "In", "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd",
    "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg",
    "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm",
    "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn",
    "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
];

fn atomic_number(symbol: &str) -> Option<u8> {
    ELEMENTS
        .iter()
        .position(|&e| !e.is_empty() && e == symbol)
        .map(|z| z as u8)
}

/// Allowed valences of the organic subset, ascending.
fn default_valences(symbol: &str) -> Option<&'static [u32]> {
    Some(match symbol {
        "B" => &[3],
        "C" => &[4],
        "N" => &[3, 5],
        "O" => &[2],
        "P" => &[3, 5],
        "S" => &[2, 4, 6],
        "F" | "Cl" | "Br" | "I" => &[1],
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("empty SMILES")]
    Empty,
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unexpected non-ASCII byte 0x{0:02x}")]
    UnexpectedByte(u8),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("unmatched `(`")]
    UnmatchedOpenParen,
    #[error("unmatched `)`")]
    UnmatchedCloseParen,
    #[error("empty branch")]
    EmptyBranch,
    #[error("`.` without a component on both sides")]
    EmptyComponent,
    #[error("branch or ring bond without a preceding atom")]
    MissingAtom,
    #[error("ring bond {0} is never closed")]
    UnclosedRing(u32),
    #[error("ring bond {0} has conflicting bond symbols")]
    RingBondConflict(u32),
    #[error("atom bonded to itself")]
    SelfBond,
    #[error("duplicate bond between the same atoms")]
    DuplicateBond,
    #[error("bond symbol not followed by an atom")]
    DanglingBond,
    #[error("unsupported bond symbol `{0}`")]
    UnsupportedBond(char),
    #[error("unterminated bracket atom")]
    UnterminatedBracket,
    #[error("malformed bracket atom: {0}")]
    InvalidBracket(&'static str),
    #[error("aromatic bond between non-aromatic atoms")]
    InvalidAromaticBond,
    #[error("{element} with bond order sum {valence} exceeds its allowed valence")]
    ValenceOverflow { element: String, valence: u32 },
    #[error("number too large")]
    NumberOverflow,
}

/// SMILES syntax or chemistry error at a byte offset of the input.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("SMILES error at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

type PResult<T> = std::result::Result<T, ParseError>;

struct RingOpen {
    atom: usize,
    bond: Option<BondOrder>,
    offset: usize,
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    mol: Molecule,
    /// Byte offset of each atom and whether its hydrogens are implicit.
    atom_info: Vec<(usize, bool)>,
    prev: Option<usize>,
    branches: Vec<(Option<usize>, usize)>,
    pending: Option<(BondOrder, usize)>,
    rings: HashMap<u32, RingOpen>,
    /// Set after `(` until the branch's first atom.
    branch_start: bool,
}

fn err<T>(offset: usize, kind: ParseErrorKind) -> PResult<T> {
    Err(ParseError { offset, kind })
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn parse(mut self) -> PResult<Molecule> {
        if self.s.is_empty() {
            return err(0, ParseErrorKind::Empty);
        }
        while let Some(c) = self.peek() {
            let at = self.pos;
            match c {
                b'(' => {
                    let Some(prev) = self.prev else {
                        return err(at, ParseErrorKind::MissingAtom);
                    };
                    if self.pending.is_some() {
                        return err(at, ParseErrorKind::DanglingBond);
                    }
                    self.branches.push((Some(prev), at));
                    self.branch_start = true;
                    self.pos += 1;
                }
                b')' => {
                    if let Some((_, off)) = self.pending {
                        return err(off, ParseErrorKind::DanglingBond);
                    }
                    if self.branch_start {
                        return err(at, ParseErrorKind::EmptyBranch);
                    }
                    let Some((prev, _)) = self.branches.pop() else {
                        return err(at, ParseErrorKind::UnmatchedCloseParen);
                    };
                    self.prev = prev;
                    self.pos += 1;
                }
                b'.' => {
                    if let Some((_, off)) = self.pending {
                        return err(off, ParseErrorKind::DanglingBond);
                    }
                    if self.branch_start {
                        return err(at, ParseErrorKind::EmptyBranch);
                    }
                    if self.prev.is_none() || at + 1 == self.s.len() {
                        return err(at, ParseErrorKind::EmptyComponent);
                    }
                    self.prev = None;
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {
                    if self.pending.is_some() {
                        return err(at, ParseErrorKind::UnexpectedChar(c as char));
                    }
                    if self.prev.is_none() {
                        return err(at, ParseErrorKind::MissingAtom);
                    }
                    let order = match c {
                        b'=' => BondOrder::Double,
                        b'#' => BondOrder::Triple,
                        b':' => BondOrder::Aromatic,
                        _ => BondOrder::Single,
                    };
                    self.pending = Some((order, at));
                    self.pos += 1;
                }
                b'$' => return err(at, ParseErrorKind::UnsupportedBond('$')),
                b'0'..=b'9' | b'%' => {
                    let number = self.ring_number()?;
                    self.ring_bond(number, at)?;
                }
                b'[' => {
                    let atom = self.bracket_atom()?;
                    self.add_atom(atom, at, false)?;
                }
                c if c.is_ascii_alphabetic() => {
                    let atom = self.organic_atom()?;
                    self.add_atom(atom, at, true)?;
                }
                c if c.is_ascii() => return err(at, ParseErrorKind::UnexpectedChar(c as char)),
                c => return err(at, ParseErrorKind::UnexpectedByte(c)),
            }
        }
        if let Some((_, off)) = self.pending {
            return err(off, ParseErrorKind::DanglingBond);
        }
        if let Some(&(_, off)) = self.branches.last() {
            return err(off, ParseErrorKind::UnmatchedOpenParen);
        }
        if let Some((&n, open)) = self.rings.iter().min_by_key(|(_, r)| r.offset) {
            return err(open.offset, ParseErrorKind::UnclosedRing(n));
        }
        self.assign_hydrogens()?;
        Ok(self.mol)
    }

    fn ring_number(&mut self) -> PResult<u32> {
        let at = self.pos;
        if self.peek() == Some(b'%') {
            self.pos += 1;
            let digits: Vec<u8> = self.s[self.pos..]
                .iter()
                .take(2)
                .copied()
                .take_while(u8::is_ascii_digit)
                .collect();
            if digits.len() != 2 {
                return err(at, ParseErrorKind::UnexpectedChar('%'));
            }
            self.pos += 2;
            Ok(u32::from(digits[0] - b'0') * 10 + u32::from(digits[1] - b'0'))
        } else {
            let d = self.s[self.pos] - b'0';
            self.pos += 1;
            Ok(u32::from(d))
        }
    }

    fn ring_bond(&mut self, number: u32, at: usize) -> PResult<()> {
        let Some(prev) = self.prev else {
            return err(at, ParseErrorKind::MissingAtom);
        };
        let bond = self.pending.take().map(|(o, _)| o);
        match self.rings.remove(&number) {
            Some(open) => {
                let order = match (open.bond, bond) {
                    (Some(a), Some(b)) if a != b => {
                        return err(at, ParseErrorKind::RingBondConflict(number))
                    }
                    (a, b) => a.or(b),
                };
                self.connect(open.atom, prev, order, at)
            }
            None => {
                self.rings.insert(
                    number,
                    RingOpen {
                        atom: prev,
                        bond,
                        offset: at,
                    },
                );
                Ok(())
            }
        }
    }

    fn connect(&mut self, a: usize, b: usize, explicit: Option<BondOrder>, at: usize) -> PResult<()> {
        if a == b {
            return err(at, ParseErrorKind::SelfBond);
        }
        if self.mol.bond_between(a, b).is_some() {
            return err(at, ParseErrorKind::DuplicateBond);
        }
        let both_aromatic = self.mol.atoms[a].aromatic && self.mol.atoms[b].aromatic;
        let order = match explicit {
            Some(BondOrder::Aromatic) if !both_aromatic => {
                return err(at, ParseErrorKind::InvalidAromaticBond)
            }
            Some(o) => o,
            None if both_aromatic => BondOrder::Aromatic,
            None => BondOrder::Single,
        };
        self.mol.bonds.push(Bond { a, b, order });
        Ok(())
    }

    fn add_atom(&mut self, atom: Atom, at: usize, implicit_h: bool) -> PResult<()> {
        let idx = self.mol.atoms.len();
        self.mol.atoms.push(atom);
        self.atom_info.push((at, implicit_h));
        if let Some(prev) = self.prev {
            let bond = self.pending.take();
            let bond_at = bond.map_or(at, |(_, o)| o);
            self.connect(prev, idx, bond.map(|(o, _)| o), bond_at)?;
        }
        self.prev = Some(idx);
        self.branch_start = false;
        Ok(())
    }

    fn organic_atom(&mut self) -> PResult<Atom> {
        let at = self.pos;
        let rest = &self.s[self.pos..];
        let (symbol, aromatic, len) = match rest {
            [b'C', b'l', ..] => ("Cl", false, 2),
            [b'B', b'r', ..] => ("Br", false, 2),
            [c, ..] => match c {
                b'B' => ("B", false, 1),
                b'C' => ("C", false, 1),
                b'N' => ("N", false, 1),
                b'O' => ("O", false, 1),
                b'P' => ("P", false, 1),
                b'S' => ("S", false, 1),
                b'F' => ("F", false, 1),
                b'I' => ("I", false, 1),
                b'b' => ("B", true, 1),
                b'c' => ("C", true, 1),
                b'n' => ("N", true, 1),
                b'o' => ("O", true, 1),
                b'p' => ("P", true, 1),
                b's' => ("S", true, 1),
                other => {
                    let mut name = (*other as char).to_string();
                    if let Some(next) = rest.get(1).filter(|b| b.is_ascii_lowercase()) {
                        name.push(*next as char);
                    }
                    return err(at, ParseErrorKind::UnknownElement(name));
                }
            },
            [] => unreachable!("called at a letter"),
        };
        self.pos += len;
        Ok(Atom {
            element: symbol.into(),
            atomic_number: atomic_number(symbol).expect("organic subset symbols are elements"),
            charge: 0,
            hydrogens: 0,
            aromatic,
            isotope: None,
        })
    }

    fn number(&mut self) -> PResult<Option<u32>> {
        let start = self.pos;
        let mut value: u32 = 0;
        while let Some(d) = self.peek().filter(u8::is_ascii_digit) {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u32::from(d - b'0')))
                .ok_or(ParseError {
                    offset: start,
                    kind: ParseErrorKind::NumberOverflow,
                })?;
            self.pos += 1;
        }
        Ok((self.pos > start).then_some(value))
    }

    fn bracket_atom(&mut self) -> PResult<Atom> {
        let open = self.pos;
        self.pos += 1;
        let Some(close) = self.s[open..].iter().position(|&b| b == b']').map(|p| open + p) else {
            return err(open, ParseErrorKind::UnterminatedBracket);
        };

        let isotope = match self.number()? {
            Some(v) => Some(u16::try_from(v).map_err(|_| ParseError {
                offset: open + 1,
                kind: ParseErrorKind::NumberOverflow,
            })?),
            None => None,
        };

        let sym_at = self.pos;
        let rest = &self.s[self.pos..close];
        let (element, aromatic, len) = match rest {
            [b's', b'e', ..] => ("Se".to_string(), true, 2),
            [b'a', b's', ..] => ("As".to_string(), true, 2),
            [c @ (b'b' | b'c' | b'n' | b'o' | b'p' | b's'), ..] => {
                ((c.to_ascii_uppercase() as char).to_string(), true, 1)
            }
            [c, ..] if c.is_ascii_uppercase() => {
                let two = rest
                    .get(1)
                    .filter(|b| b.is_ascii_lowercase())
                    .map(|b| format!("{}{}", *c as char, *b as char));
                match two {
                    Some(sym) if atomic_number(&sym).is_some() => (sym, false, 2),
                    _ => ((*c as char).to_string(), false, 1),
                }
            }
            _ => return err(sym_at, ParseErrorKind::InvalidBracket("missing element symbol")),
        };
        let Some(z) = atomic_number(&element) else {
            return err(sym_at, ParseErrorKind::UnknownElement(element));
        };
        self.pos += len;

        // chirality: @, @@, @TH1, @SP2, ...
        while self.peek() == Some(b'@') {
            self.pos += 1;
        }
        while self.pos < close && self.s[self.pos].is_ascii_uppercase() && self.s[self.pos] != b'H' {
            self.pos += 1;
            self.number()?;
        }

        let mut hydrogens = 0u32;
        if self.peek() == Some(b'H') {
            self.pos += 1;
            hydrogens = self.number()?.unwrap_or(1);
        }

        let mut charge: i32 = 0;
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            let unit = if sign == b'+' { 1 } else { -1 };
            self.pos += 1;
            match self.number()? {
                Some(v) => charge = unit * i32::try_from(v).unwrap_or(i32::MAX),
                None => {
                    charge = unit;
                    while self.peek() == Some(sign) {
                        charge += unit;
                        self.pos += 1;
                    }
                }
            }
        }

        if self.peek() == Some(b':') {
            self.pos += 1;
            if self.number()?.is_none() {
                return err(self.pos, ParseErrorKind::InvalidBracket("atom class without digits"));
            }
        }

        if self.pos != close {
            return err(self.pos, ParseErrorKind::InvalidBracket("unexpected content"));
        }
        self.pos = close + 1;

        let hydrogens = u8::try_from(hydrogens).map_err(|_| ParseError {
            offset: open,
            kind: ParseErrorKind::NumberOverflow,
        })?;
        let charge = i8::try_from(charge)
            .ok()
            .filter(|c| c.unsigned_abs() <= 15)
            .ok_or(ParseError {
                offset: open,
                kind: ParseErrorKind::NumberOverflow,
            })?;
        Ok(Atom {
            element,
            atomic_number: z,
            charge,
            hydrogens,
            aromatic,
            isotope,
        })
    }

    fn assign_hydrogens(&mut self) -> PResult<()> {
        let mut bond_sum = vec![0u32; self.mol.atoms.len()];
        for b in &self.mol.bonds {
            bond_sum[b.a] += b.order.valence();
            bond_sum[b.b] += b.order.valence();
        }
        for (i, atom) in self.mol.atoms.iter_mut().enumerate() {
            let (at, implicit) = self.atom_info[i];
            if !implicit {
                continue;
            }
            let valences = default_valences(&atom.element).expect("organic subset");
            let mut used = bond_sum[i];
            if atom.aromatic && matches!(atom.element.as_str(), "B" | "C" | "N" | "P") {
                used += 1;
            }
            match valences.iter().find(|&&v| v >= used) {
                Some(&v) => atom.hydrogens = (v - used) as u8,
                None if atom.aromatic => atom.hydrogens = 0,
                None => {
                    return err(
                        at,
                        ParseErrorKind::ValenceOverflow {
                            element: atom.element.clone(),
                            valence: used,
                        },
                    )
                }
            }
        }
        Ok(())
    }
}

/// Parses the supported SMILES subset into a heavy-atom graph.
///
/// Organic-subset atoms get implicit hydrogens from their lowest standard
/// valence that fits; bracket atoms carry exactly the listed hydrogen count.
/// Stereo marks (`/`, `\`, `@`) are accepted and ignored.
pub fn parse_smiles(text: &str) -> Result<Molecule, ParseError> {
    Parser {
        s: text.as_bytes(),
        pos: 0,
        mol: Molecule::default(),
        atom_info: Vec::new(),
        prev: None,
        branches: Vec::new(),
        pending: None,
        rings: HashMap::new(),
        branch_start: false,
    }
    .parse()
}
