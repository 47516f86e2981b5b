//! Primary elements: the distinguished generator of each odd ideal.
//!
//! For `d = −1` an odd `n` is primary iff `n ≡ 1 (mod (1+i)³)`. For the other
//! fields primary classes modulo 4 are
//!
//! * `G₄² × ⟨1+2ω⟩` for `d ∉ {−2, −3}`,
//! * `G₄² × {1, −(1+ω)}` for `d = −2`,
//! * `⟨1+2ω⟩` for `d = −3`,
//!
//! where `G₄²` is the group of squares of `(O_K/4)^×`. The class lists are
//! materialized once per field.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::field::{FieldId, QuadInt, CLASS_NUMBER_ONE};
use crate::ideal::{ideal_of, residue_system, IdealMatrix};

#[derive(Clone, Debug)]
pub struct PrimarySet {
    pub field: FieldId,
    pub modulus: QuadInt,
    ideal: IdealMatrix,
    /// Canonical residues `(a, b)` of the primary classes, sorted.
    classes: Vec<(i64, i64)>,
}

impl PrimarySet {
    fn build(field: FieldId) -> Result<Self> {
        let modulus = if field.d() == -1 { field.elem(-2, 2) } else { field.elem(4, 0) };
        let ideal = ideal_of(&modulus)?;
        let red = |x: QuadInt| -> (i64, i64) {
            let r = ideal.reduce(&x);
            (r.a, r.b)
        };
        let classes: Vec<(i64, i64)> = if field.d() == -1 {
            vec![red(field.one())]
        } else {
            let units_mod4: Vec<QuadInt> = residue_system(&modulus)?.invertible().collect();
            let mut squares: Vec<(i64, i64)> = units_mod4.iter().map(|&x| red(x * x)).collect();
            squares.sort_unstable();
            squares.dedup();
            let cyclic = |g: QuadInt| -> Vec<QuadInt> {
                let mut out = vec![field.one()];
                let mut x = ideal.reduce(&g);
                while red(x) != red(field.one()) {
                    out.push(x);
                    x = ideal.reduce(&(x * g));
                }
                out
            };
            let one_plus_two_omega = field.elem(1, 2);
            let (squares, second): (Vec<(i64, i64)>, Vec<QuadInt>) = match field.d() {
                -3 => (vec![red(field.one())], cyclic(one_plus_two_omega)),
                -2 => (squares, vec![field.one(), field.elem(-1, -1)]),
                _ => (squares, cyclic(one_plus_two_omega)),
            };
            let mut out = Vec::new();
            for &(a, b) in &squares {
                for t in &second {
                    out.push(red(field.elem(a, b) * *t));
                }
            }
            out
        };
        let mut classes = classes;
        classes.sort_unstable();
        classes.dedup();
        Ok(PrimarySet { field, modulus, ideal, classes })
    }

    pub fn classes(&self) -> Vec<QuadInt> {
        self.classes.iter().map(|&(a, b)| self.field.elem(a, b)).collect()
    }

    pub fn contains(&self, n: &QuadInt) -> bool {
        let r = self.ideal.reduce(n);
        self.classes.binary_search(&(r.a, r.b)).is_ok()
    }
}

/// The primary residue classes of a field.
pub fn primary_set(field: FieldId) -> &'static PrimarySet {
    static SETS: OnceLock<Vec<PrimarySet>> = OnceLock::new();
    let sets = SETS.get_or_init(|| {
        CLASS_NUMBER_ONE
            .iter()
            .map(|&d| PrimarySet::build(FieldId::new(d).unwrap()).expect("primary set construction"))
            .collect()
    });
    let idx = CLASS_NUMBER_ONE.iter().position(|&d| d == field.d()).expect("validated field");
    &sets[idx]
}

pub fn is_primary(n: &QuadInt) -> Result<bool> {
    if !n.is_odd() {
        return Err(Error::EvenElement("is_primary"));
    }
    Ok(primary_set(n.field).contains(n))
}

/// The unique unit `u` with `u·n` primary, together with `u·n`.
pub fn primary_normalize(n: &QuadInt) -> Result<(QuadInt, QuadInt)> {
    if n.is_zero() {
        return Err(Error::ZeroElement("primary_normalize"));
    }
    if !n.is_odd() {
        return Err(Error::EvenElement("primary_normalize"));
    }
    let set = primary_set(n.field);
    let mut found = None;
    for u in n.field.units() {
        let m = u.checked_mul(n)?;
        if set.contains(&m) {
            if found.is_some() {
                return Err(Error::Budget(format!("two primary associates of {n}")));
            }
            found = Some((u, m));
        }
    }
    found.ok_or_else(|| Error::Budget(format!("no primary associate of {n}")))
}

/// `E`-primary test for `c + e·ω²` in `Q(√−3)`, with `(c + eω², 6) = 1`.
pub fn is_e_primary(c: i64, e: i64) -> bool {
    let pm_one_mod_3 = e.rem_euclid(3) == 0 && (c.rem_euclid(3) == 1 || c.rem_euclid(3) == 2);
    if !pm_one_mod_3 {
        return false;
    }
    if e % 2 == 0 {
        (c + e).rem_euclid(4) == 1
    } else if c % 2 == 0 {
        e.rem_euclid(4) == 1
    } else {
        c.rem_euclid(4) == 3
    }
}
