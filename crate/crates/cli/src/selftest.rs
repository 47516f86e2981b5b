use hecke_core::rational::kronecker;
use hecke_core::{euler_p2, is_primary, symbol, FieldId, QuadInt};
use num_complex::Complex64 as C;

use crate::{fast_matches, fe_error, root_number_error, zeta_gaussian_error, CliError};

pub struct Check {
    name: String,
    ok: bool,
    detail: String,
}

fn half_odd(x: &QuadInt) -> bool {
    (x.norm() - 1) / 2 % 2 != 0
}

/// Reciprocity sign, both supplements and the Euclidean fast path over every
/// pair of primary elements with norm at most `maxnorm`.
pub fn symbol_laws(fields: &[FieldId], maxnorm: i64) -> hecke_core::Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &k in fields {
        let prim: Vec<QuadInt> = k
            .elements_up_to(maxnorm)
            .into_iter()
            .filter(|x| x.is_odd() && is_primary(x).unwrap_or(false))
            .collect();
        let (mut pairs, mut bad) = (0u64, Vec::new());
        for n in &prim {
            let minus = if half_odd(n) { -1 } else { 1 };
            if symbol(&k.elem(-1, 0), n)? != minus || symbol(&k.elem(2, 0), n)? != kronecker(2, n.norm()) {
                bad.push(format!("supplement at {n}"));
            }
            for m in &prim {
                let x = symbol(m, n)?;
                if x == 0 {
                    continue;
                }
                pairs += 1;
                let expect = if half_odd(m) && half_odd(n) { -1 } else { 1 };
                if x * symbol(n, m)? != expect {
                    bad.push(format!("reciprocity at ({m}, {n})"));
                }
                if !fast_matches(m, n, x)? {
                    bad.push(format!("fast path at ({m}/{n})"));
                }
            }
        }
        checks.push(Check {
            name: format!("symbol laws d={}", k.d()),
            ok: bad.is_empty(),
            detail: match bad.first() {
                None => format!("{} primary n, {pairs} coprime pairs", prim.len()),
                Some(first) => format!("{} violations, first {first}", bad.len()),
            },
        });
    }
    Ok(checks)
}

pub fn all() -> hecke_core::Result<Vec<Check>> {
    let fields: Vec<FieldId> = FieldId::all().collect();
    let mut checks = symbol_laws(&fields, 60)?;
    for &k in &fields {
        let e = root_number_error(k, 40)?;
        checks.push(Check { name: format!("root number d={}", k.d()), ok: e <= 1e-6, detail: format!("max rel. error {e:.1e}") });
        let e = fe_error(k, 100)?;
        checks.push(Check {
            name: format!("functional equation d={}", k.d()),
            ok: e <= 1e-6,
            detail: format!("max residual {e:.1e}"),
        });
    }
    let e = zeta_gaussian_error()?;
    checks.push(Check { name: "zeta_Q(i)(2) = zeta(2) G".into(), ok: e <= 1e-10, detail: format!("error {e:.1e}") });
    let w = C::new(0.3, 2.0);
    let e = (euler_p2(w, w, fields[0], 1e-10)? - 1.0).norm();
    checks.push(Check { name: "P(w,w) = 1".into(), ok: e <= 1e-12, detail: format!("error {e:.1e}") });
    Ok(checks)
}

pub fn report(checks: Vec<Check>) -> Result<(), CliError> {
    for c in &checks {
        println!("{} {}: {}", if c.ok { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    match checks.iter().filter(|c| !c.ok).count() {
        0 => Ok(()),
        n => Err(CliError::Checks(n)),
    }
}
