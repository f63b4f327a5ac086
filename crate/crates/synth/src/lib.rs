//! Seeded generator of SMILES corpora.
//!
//! Two families with different texture:
//!
//! * [`Family::DrugLike`]: larger molecules in Kekulé form with bracket
//!   stereocentres, amides, sulfonamides and halogens. Ring ids are handed out
//!   sequentially and never reused within a molecule, the way PubChem writes
//!   them (`C1=CC=C(C=C1)C(=O)CC(=O)C2=CC=CC=C2`).
//! * [`Family::SmallMolecule`]: small enumerated-style molecules in aromatic
//!   lower-case form, many saturated small rings and triple bonds. Ring ids
//!   reuse the lowest free number starting at 1.
//!
//! [`Family::Mixed`] draws each line from either family with equal odds.
//! Output depends only on the family and seed.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    DrugLike,
    SmallMolecule,
    Mixed,
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "drug" => Ok(Family::DrugLike),
            "small" => Ok(Family::SmallMolecule),
            "mixed" => Ok(Family::Mixed),
            _ => Err(format!("unknown family {s:?} (drug, small, mixed)")),
        }
    }
}

/// Ring templates. Digits are template-local ring labels, `{b}` is an optional
/// substituent slot. The molecule continues from the last atom written.
const DRUG_RINGS: &[(&str, u32)] = &[
    ("C1=CC=C(C=C1)", 14),
    ("C1=CC=C(C=C1{b})", 6),
    ("C1=CC(=CC=C1{b})", 8),
    ("C1=CC{b}=CC=C1", 4),
    ("C1=CC=NC=C1", 3),
    ("C1=CN=CC=C1", 2),
    ("C1=CC(=NC=C1)", 2),
    ("C1=CSC=C1", 2),
    ("C1=COC=C1", 1),
    ("C1=CN=CN1", 1),
    ("C1=NN=C(O1)", 1),
    ("C1CCN(CC1)", 5),
    ("C1CN(CCN1{b})", 5),
    ("C1COCCN1", 3),
    ("C1CCC(CC1)", 3),
    ("C1CC1", 2),
    ("C1CCN(C1)", 3),
    ("C1CCOC1", 1),
    ("C1=CC=C2C(=C1)C=CN2", 2),
    ("C1=CC=C2C(=C1)C=CC=N2", 2),
    ("C1=CC=C2C=C(C=CC2=C1)", 1),
    ("C1=CC=C2C(=C1)N=C(N2)", 2),
    ("C1=CC2=C(C=C1)OCO2", 1),
    ("C1=CC=C2C(=C1)C(=O)N(C2=O)", 1),
];

const DRUG_ATOMS: &[(&str, u32)] = &[
    ("C", 30),
    ("CC", 10),
    ("N", 8),
    ("O", 6),
    ("C(=O)", 10),
    ("C(=O)N", 10),
    ("NC(=O)", 9),
    ("S(=O)(=O)", 3),
    ("S(=O)(=O)N", 2),
    ("OC", 5),
    ("COC", 2),
    ("C(C)", 5),
    ("C(C)C", 2),
    ("N(C)", 3),
    ("[C@@H]", 3),
    ("[C@H]", 3),
    ("[C@@H](C)", 2),
    ("C=C", 1),
    ("/C=C/", 1),
    ("CN", 4),
    ("S", 2),
    ("NC(=O)N", 2),
    ("OCC", 2),
];

const DRUG_ENDS: &[(&str, u32)] = &[
    ("C", 14),
    ("F", 6),
    ("Cl", 6),
    ("Br", 2),
    ("C(F)(F)F", 4),
    ("C#N", 3),
    ("OC", 6),
    ("O", 6),
    ("N", 4),
    ("C(=O)O", 5),
    ("C(=O)OC", 2),
    ("C(=O)N", 3),
    ("[N+](=O)[O-]", 2),
    ("N(C)C", 3),
    ("CC(C)C", 2),
];

const SMALL_RINGS: &[(&str, u32)] = &[
    ("c1ccccc1", 8),
    ("c1ccc(cc1)", 5),
    ("c1ccncc1", 4),
    ("c1ccoc1", 4),
    ("c1ccsc1", 2),
    ("c1cc[nH]c1", 3),
    ("c1cn[nH]c1", 2),
    ("c1ncon1", 2),
    ("c1nccs1", 2),
    ("C1CC1", 10),
    ("C1CCC1", 6),
    ("C1CCCC1", 4),
    ("C1CCOC1", 4),
    ("C1CCNC1", 4),
    ("C1OC1", 4),
    ("C1CN1", 2),
    ("C1CC(C1)", 3),
    ("C1CC2CC2C1", 2),
    ("C1CC2CCC1C2", 2),
    ("C1CC2(C1)CC2", 2),
    ("C1COC(=O)C1", 2),
    ("c1cc2ccccc2o1", 1),
];

const SMALL_ATOMS: &[(&str, u32)] = &[
    ("C", 30),
    ("N", 10),
    ("O", 10),
    ("C(C)", 6),
    ("C(O)", 4),
    ("C(=O)", 8),
    ("C#C", 5),
    ("C=C", 4),
    ("N=C", 2),
    ("C(N)", 3),
    ("CC", 6),
    ("OC", 4),
    ("C(=N)", 2),
];

const SMALL_ENDS: &[(&str, u32)] = &[
    ("C", 20),
    ("O", 10),
    ("N", 8),
    ("C#N", 6),
    ("C#C", 5),
    ("F", 4),
    ("C=O", 5),
    ("C(=O)N", 3),
    ("C(=O)O", 3),
    ("CO", 4),
];

/// How ring ids are allocated within one molecule.
#[derive(Debug, Clone, Copy)]
enum Numbering {
    /// 1, 2, 3, ... never reused.
    Sequential,
    /// Lowest id not currently open.
    LowestFree,
}

struct Builder<'r> {
    rng: &'r mut ChaCha8Rng,
    out: String,
    numbering: Numbering,
    next_id: u32,
    open: Vec<u32>,
}

impl Builder<'_> {
    fn pick(&mut self, table: &[(&'static str, u32)]) -> &'static str {
        table
            .choose_weighted(self.rng, |&(_, w)| w)
            .map(|&(s, _)| s)
            .unwrap()
    }

    fn alloc_id(&mut self) -> u32 {
        match self.numbering {
            Numbering::Sequential => {
                self.next_id += 1;
                self.next_id
            }
            Numbering::LowestFree => {
                let mut id = 1;
                while self.open.contains(&id) {
                    id += 1;
                }
                self.open.push(id);
                id
            }
        }
    }

    fn release(&mut self, id: u32) {
        self.open.retain(|&o| o != id);
    }

    fn push_id(&mut self, id: u32) {
        if id < 10 {
            self.out.push(char::from(b'0' + id as u8));
        } else {
            self.out.push_str(&format!("%{id:02}"));
        }
    }

    /// Writes a ring template, mapping its local labels to molecule ids.
    fn ring(&mut self, template: &str, style: &Style, depth: u32) {
        let mut labels: [Option<u32>; 10] = [None; 10];
        let mut rest = template;
        while let Some(c) = rest.chars().next() {
            if let Some(tail) = rest.strip_prefix("{b}") {
                if depth < style.max_depth && self.rng.random_bool(style.branch_p[depth as usize]) {
                    self.out.push('(');
                    self.chain(style, depth + 1);
                    self.out.push(')');
                }
                rest = tail;
                continue;
            }
            if let Some(d) = c.to_digit(10) {
                match labels[d as usize].take() {
                    Some(id) => {
                        self.push_id(id);
                        self.release(id);
                    }
                    None => {
                        let id = self.alloc_id();
                        labels[d as usize] = Some(id);
                        self.push_id(id);
                    }
                }
            } else {
                self.out.push(c);
            }
            rest = &rest[c.len_utf8()..];
        }
    }

    fn chain(&mut self, style: &Style, depth: u32) {
        let (lo, hi) = style.chain_len[depth.min(2) as usize];
        let len = self.rng.random_range(lo..=hi);
        for i in 0..len {
            let last = i + 1 == len;
            if self.rng.random_bool(style.ring_p) {
                let t = self.pick(style.rings);
                self.ring(t, style, depth);
            } else if last && depth > 0 || last && self.rng.random_bool(0.6) {
                let t = self.pick(style.ends);
                self.out.push_str(t);
            } else {
                let t = self.pick(style.atoms);
                self.out.push_str(t);
                if depth < style.max_depth && self.rng.random_bool(style.atom_branch_p) {
                    self.out.push('(');
                    self.chain(style, depth + 1);
                    self.out.push(')');
                }
            }
        }
    }
}

struct Style {
    rings: &'static [(&'static str, u32)],
    atoms: &'static [(&'static str, u32)],
    ends: &'static [(&'static str, u32)],
    numbering: Numbering,
    ring_p: f64,
    branch_p: [f64; 3],
    atom_branch_p: f64,
    max_depth: u32,
    chain_len: [(u32, u32); 3],
    max_len: usize,
    min_len: usize,
    salt_p: f64,
}

const DRUG: Style = Style {
    rings: DRUG_RINGS,
    atoms: DRUG_ATOMS,
    ends: DRUG_ENDS,
    numbering: Numbering::Sequential,
    ring_p: 0.38,
    branch_p: [0.35, 0.2, 0.0],
    atom_branch_p: 0.08,
    max_depth: 2,
    chain_len: [(3, 8), (1, 3), (1, 2)],
    max_len: 110,
    min_len: 12,
    salt_p: 0.03,
};

const SMALL: Style = Style {
    rings: SMALL_RINGS,
    atoms: SMALL_ATOMS,
    ends: SMALL_ENDS,
    numbering: Numbering::LowestFree,
    ring_p: 0.3,
    branch_p: [0.25, 0.1, 0.0],
    atom_branch_p: 0.12,
    max_depth: 2,
    chain_len: [(2, 5), (1, 2), (1, 1)],
    max_len: 48,
    min_len: 4,
    salt_p: 0.0,
};

/// Deterministic molecule stream for one family.
pub struct Generator {
    family: Family,
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(family: Family, seed: u64) -> Self {
        Self {
            family,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn molecule(&mut self) -> String {
        let style = match self.family {
            Family::DrugLike => &DRUG,
            Family::SmallMolecule => &SMALL,
            Family::Mixed => {
                if self.rng.random_bool(0.5) {
                    &DRUG
                } else {
                    &SMALL
                }
            }
        };
        loop {
            let mut b = Builder {
                rng: &mut self.rng,
                out: String::new(),
                numbering: style.numbering,
                next_id: 0,
                open: Vec::new(),
            };
            b.chain(style, 0);
            if style.salt_p > 0.0 && b.rng.random_bool(style.salt_p) {
                b.out.push_str(".Cl");
            }
            let len = b.out.len();
            if (style.min_len..=style.max_len).contains(&len) {
                return b.out;
            }
        }
    }
}

impl Iterator for Generator {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        Some(self.molecule())
    }
}

/// `n` molecules of `family` from `seed`.
pub fn corpus(family: Family, seed: u64, n: usize) -> Vec<String> {
    Generator::new(family, seed).take(n).collect()
}

/// Random short lines over a SMILES-like byte mix, including bytes outside
/// the SMILES alphabet. Meant for codec stress tests.
pub fn noise_line<R: Rng>(rng: &mut R, max_len: usize) -> Vec<u8> {
    const COMMON: &[u8] = b"CCCCcccNNOOc1234()=[]@H+-#/\\%lBrSF";
    let len = rng.random_range(0..=max_len);
    (0..len)
        .map(|_| match rng.random_range(0..20) {
            0 => rng.random_range(0x21..=0x7e),
            1 => *[b' ', b'y', b'!', b'\t', 0x80, 0xff, b'{']
                .choose(rng)
                .unwrap(),
            _ => *COMMON.choose(rng).unwrap(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(corpus(Family::Mixed, 3, 50), corpus(Family::Mixed, 3, 50));
        assert_ne!(corpus(Family::Mixed, 3, 50), corpus(Family::Mixed, 4, 50));
    }

    #[test]
    fn lengths_in_range() {
        for m in corpus(Family::DrugLike, 1, 500) {
            assert!((DRUG.min_len..=DRUG.max_len).contains(&m.len()), "{m}");
        }
        for m in corpus(Family::SmallMolecule, 1, 500) {
            assert!((SMALL.min_len..=SMALL.max_len).contains(&m.len()), "{m}");
        }
    }

    #[test]
    fn drug_like_numbering_is_sequential() {
        let ms = corpus(Family::DrugLike, 9, 2000);
        assert!(ms.iter().any(|m| m.contains('2')));
        // never reused: every id appears exactly twice
        for m in ms.iter().filter(|m| !m.contains('[') && !m.contains('%')) {
            for d in '1'..='9' {
                let n = m.chars().filter(|&c| c == d).count();
                assert!(n == 0 || n == 2, "{m}");
            }
        }
    }

    #[test]
    fn balanced_parentheses() {
        for m in corpus(Family::Mixed, 5, 2000) {
            let mut depth = 0i32;
            for c in m.chars() {
                match c {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    _ => {}
                }
                assert!(depth >= 0, "{m}");
            }
            assert_eq!(depth, 0, "{m}");
        }
    }
}
