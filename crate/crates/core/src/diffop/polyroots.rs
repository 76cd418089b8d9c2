//! Root extraction for indicial polynomials: all roots in F_p with the
//! leftover factored into irreducibles (Cantor-Zassenhaus), and small
//! rational roots over Q recovered through modular images.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use crate::field::{Field, Fp, Rationals};
use crate::modarith::rational_reconstruct;
use crate::poly::Poly;

/// Roots in F_p with multiplicities, plus the remaining root-free factors
/// as (irreducible factor, multiplicity) pairs.
pub fn roots_mod_p(poly: &Poly<Fp>) -> (Vec<(u64, usize)>, Vec<(Poly<Fp>, usize)>) {
    assert!(!poly.is_zero());
    let mut roots: Vec<(u64, usize)> = Vec::new();
    let mut nonlinear: Vec<(Poly<Fp>, usize)> = Vec::new();
    // multiplicity structure via squarefree decomposition
    for (sqf, mult) in squarefree_decomposition(poly) {
        if sqf.degree() == 0 {
            continue;
        }
        let (rs, irr) = split_squarefree(&sqf);
        for r in rs {
            roots.push((r, mult));
        }
        for g in irr {
            nonlinear.push((g, mult));
        }
    }
    roots.sort_unstable();
    nonlinear.sort_by_key(|(g, _)| g.degree());
    (roots, nonlinear)
}

/// Distinct roots and irreducible non-linear factors of a squarefree
/// polynomial.
fn split_squarefree(poly: &Poly<Fp>) -> (Vec<u64>, Vec<Poly<Fp>>) {
    let f = poly.field;
    let p = f.modulus();
    let mut roots = Vec::new();
    let mut work = poly.monic();
    // strip the root at zero
    if work.valuation() > 0 {
        roots.push(0);
        work = work.shift_down(work.valuation());
    }
    if work.degree() == 0 {
        return (roots, Vec::new());
    }
    // linear part: gcd(x^p - x, f)
    let xp = pow_x_mod(&work, p);
    let x = Poly::from_i64(f, &[0, 1]);
    let linear = work.gcd(&xp.sub(&x));
    let mut rest = work.divrem(&linear).0;
    if linear.degree() >= 1 {
        collect_roots(&linear, &mut roots, 1);
    }
    // factor the root-free remainder into irreducibles
    let mut irr = Vec::new();
    if rest.degree() >= 1 {
        distinct_degree_split(&mut rest, &mut irr);
    }
    roots.sort_unstable();
    (roots, irr)
}

/// Equal-degree splitting of a product of linear factors.
fn collect_roots(poly: &Poly<Fp>, out: &mut Vec<u64>, salt: u64) {
    let f = poly.field;
    let p = f.modulus();
    if poly.degree() == 0 {
        return;
    }
    if poly.degree() == 1 {
        // monic x + c -> root -c
        let c = poly.coeff(0);
        out.push(f.0.neg(c));
        return;
    }
    // (x + a)^((p-1)/2) - 1 splits the roots into quadratic residues
    let mut a = splitmix(salt) % p;
    loop {
        let shifted = poly.shift_argument(&a);
        // g(x) = gcd(shifted, x^((p-1)/2) - 1), pulled back by -a
        let xe = pow_x_mod_exp(&shifted, (p - 1) / 2);
        let g = shifted.gcd(&xe.sub(&Poly::one(f)));
        if g.degree() >= 1 && g.degree() < shifted.degree() {
            let g_back = g.shift_argument(&f.0.neg(a));
            let rest = poly.divrem(&g_back).0;
            collect_roots(&g_back, out, splitmix(a + 1));
            collect_roots(&rest, out, splitmix(a + 2));
            return;
        }
        a = splitmix(a + 3) % p;
    }
}

/// Distinct-degree factorization of a squarefree root-free polynomial,
/// followed by equal-degree splitting.
fn distinct_degree_split(poly: &mut Poly<Fp>, out: &mut Vec<Poly<Fp>>) {
    let f = poly.field;
    let p = f.modulus();
    let x = Poly::from_i64(f, &[0, 1]);
    let mut h = x.clone(); // x^(p^d) mod poly
    let mut d = 0usize;
    while poly.degree() >= 1 {
        d += 1;
        if (poly.degree() as usize) < 2 * d {
            // what is left is irreducible
            out.push(poly.monic());
            break;
        }
        h = pow_poly_mod(&h, p, poly);
        let g = poly.gcd(&h.sub(&x));
        if g.degree() >= 1 {
            equal_degree_split(&g, d, out, 1);
            *poly = poly.divrem(&g).0;
            h = h.rem(poly);
        }
    }
}

fn equal_degree_split(poly: &Poly<Fp>, d: usize, out: &mut Vec<Poly<Fp>>, salt: u64) {
    let f = poly.field;
    let p = f.modulus();
    if poly.degree() == d {
        out.push(poly.monic());
        return;
    }
    // Cantor-Zassenhaus with deterministic pseudo-random elements
    let mut state = salt;
    loop {
        state = splitmix(state);
        let deg = 2 * d - 1;
        let mut coeffs = Vec::with_capacity(deg + 1);
        let mut s = state;
        for _ in 0..=deg {
            s = splitmix(s);
            coeffs.push(s % p);
        }
        let a = Poly::new(f, coeffs);
        if a.is_zero() {
            continue;
        }
        // a^((p^d - 1)/2) mod poly
        let e = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
        let b = pow_poly_mod_big(&a, &e, poly);
        let g = poly.gcd(&b.sub(&Poly::one(f)));
        if g.degree() >= 1 && g.degree() < poly.degree() {
            equal_degree_split(&g, d, out, splitmix(state + 1));
            equal_degree_split(&poly.divrem(&g).0, d, out, splitmix(state + 2));
            return;
        }
    }
}

/// Squarefree decomposition over F_p (Yun-style with the frobenius case
/// untouched: indicial polynomials here have degree far below p).
pub fn factor_squarefree_mod_p(poly: &Poly<Fp>) -> Vec<(Poly<Fp>, usize)> {
    squarefree_decomposition(poly)
}

fn squarefree_decomposition<F: Field>(poly: &Poly<F>) -> Vec<(Poly<F>, usize)> {
    let mut out = Vec::new();
    let mut a = poly.monic();
    let mut mult = 0usize;
    loop {
        if a.degree() == 0 {
            break;
        }
        let d = a.derivative();
        if d.is_zero() {
            // p-th power; does not occur for our degrees < p
            out.push((a, mult + 1));
            break;
        }
        let g = a.gcd(&d);
        let sqf_all = a.divrem(&g).0; // product of distinct factors of a
        mult += 1;
        // factors with exactly this multiplicity
        let next_a = g;
        let lower = sqf_all.gcd(&next_a);
        let exact = sqf_all.divrem(&lower).0;
        if exact.degree() >= 1 {
            out.push((exact.monic(), mult));
        }
        a = next_a;
    }
    out
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// x^e mod poly.
fn pow_x_mod(poly: &Poly<Fp>, e: u64) -> Poly<Fp> {
    pow_x_mod_exp(poly, e)
}

fn pow_x_mod_exp(poly: &Poly<Fp>, e: u64) -> Poly<Fp> {
    let f = poly.field;
    let x = Poly::from_i64(f, &[0, 1]);
    pow_poly_mod(&x, e, poly)
}

fn pow_poly_mod(base: &Poly<Fp>, mut e: u64, modulus: &Poly<Fp>) -> Poly<Fp> {
    let f = base.field;
    let mut b = base.rem(modulus);
    let mut acc = Poly::one(f);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b).rem(modulus);
        }
        e >>= 1;
        if e > 0 {
            b = b.mul(&b).rem(modulus);
        }
    }
    acc
}

fn pow_poly_mod_big(base: &Poly<Fp>, e: &BigUint, modulus: &Poly<Fp>) -> Poly<Fp> {
    let f = base.field;
    let mut b = base.rem(modulus);
    let mut acc = Poly::one(f);
    let bits = e.bits();
    for i in (0..bits).rev() {
        acc = acc.mul(&acc).rem(modulus);
        if e.bit(i) {
            acc = acc.mul(&b).rem(modulus);
        }
    }
    let _ = &mut b;
    acc
}

/// Rational roots of an exact polynomial, found through modular images
/// and rational reconstruction, then verified exactly. Returns (root,
/// multiplicity) pairs and the root-free cofactor.
pub fn rational_roots_exact(
    poly: &Poly<Rationals>,
) -> (Vec<(BigRational, usize)>, Poly<Rationals>) {
    assert!(!poly.is_zero());
    let q = Rationals;
    let mut out: Vec<(BigRational, usize)> = Vec::new();
    let mut work = poly.clone();
    // candidate roots from two modular images
    let mut candidates: Vec<BigRational> = Vec::new();
    for p in [32749u64, 32719] {
        let f = Fp::new(p).unwrap();
        let Some(img) = reduce_poly(&work, f) else { continue };
        if img.is_zero() || img.degree() != work.degree() {
            continue;
        }
        let (roots, _) = roots_mod_p(&img);
        for (r, _) in roots {
            if let Ok(rat) = rational_reconstruct(&BigUint::from(r), &BigUint::from(p)) {
                let val = rat.to_big_rational();
                if !candidates.contains(&val) {
                    candidates.push(val);
                }
            }
        }
        break;
    }
    candidates.sort();
    for cand in candidates {
        let mut mult = 0usize;
        loop {
            if work.eval(&cand).is_zero() {
                // exact deflation by (x - cand)
                let lin = Poly::new(q, vec![-cand.clone(), q.one()]);
                let (quot, rem) = work.divrem(&lin);
                debug_assert!(rem.is_zero());
                work = quot;
                mult += 1;
            } else {
                break;
            }
        }
        if mult > 0 {
            out.push((cand, mult));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    (out, work)
}

fn reduce_poly(poly: &Poly<Rationals>, f: Fp) -> Option<Poly<Fp>> {
    let mut v = Vec::with_capacity(poly.coeffs().len());
    for c in poly.coeffs() {
        v.push(f.from_rational(c)?);
    }
    Some(Poly::new(f, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::big_ratio;

    /// Smallest quadratic non-residue mod p, for building an irreducible
    /// quadratic x^2 - n.
    fn non_residue(f: Fp) -> i64 {
        let p = f.modulus();
        (2..p)
            .find(|&n| f.0.pow(n, (p - 1) / 2) == p - 1)
            .unwrap() as i64
    }

    #[test]
    fn roots_with_multiplicity_mod_p() {
        let f = Fp::new(32749).unwrap();
        let n = non_residue(f);
        // (x-2)^2 (x-5) (x^2 - n) with x^2 - n irreducible
        let p = Poly::from_i64(f, &[-2, 1])
            .mul(&Poly::from_i64(f, &[-2, 1]))
            .mul(&Poly::from_i64(f, &[-5, 1]))
            .mul(&Poly::from_i64(f, &[-n, 0, 1]));
        let (roots, nonlinear) = roots_mod_p(&p);
        assert_eq!(roots, vec![(2, 2), (5, 1)]);
        assert_eq!(nonlinear.len(), 1);
        assert_eq!(nonlinear[0].0.degree(), 2);
        assert_eq!(nonlinear[0].1, 1);
    }

    #[test]
    fn half_integer_root_mod_p() {
        let f = Fp::new(32749).unwrap();
        // 2x - 5 has root 5/2
        let p = Poly::from_i64(f, &[-5, 2]);
        let (roots, _) = roots_mod_p(&p);
        assert_eq!(roots.len(), 1);
        let r = roots[0].0;
        assert_eq!(f.0.mul(2, r), 5);
    }

    #[test]
    fn rational_roots_exact_small() {
        let q = Rationals;
        // (x - 1/2)(x + 3)^2 * (x^2 + 1)
        let half = Poly::new(q, vec![big_ratio(-1, 2), q.one()]);
        let p3 = Poly::from_i64(q, &[3, 1]);
        let quad = Poly::from_i64(q, &[1, 0, 1]);
        let p = half.mul(&p3).mul(&p3).mul(&quad);
        let (roots, rest) = rational_roots_exact(&p);
        assert_eq!(
            roots,
            vec![(big_ratio(-3, 1), 2), (big_ratio(1, 2), 1)]
        );
        assert_eq!(rest.degree(), 2);
    }

    #[test]
    fn random_polynomial_has_all_roots_found() {
        let f = Fp::new(101).unwrap();
        // product of (x - r) over a few r, times an irreducible quadratic
        let n = non_residue_101(f);
        let mut p = Poly::one(f);
        for r in [3i64, 17, 42, 99] {
            p = p.mul(&Poly::from_i64(f, &[-r, 1]));
        }
        p = p.mul(&Poly::from_i64(f, &[-n, 0, 1]));
        let (roots, nonlinear) = roots_mod_p(&p);
        let found: Vec<u64> = roots.iter().map(|&(r, _)| r).collect();
        assert_eq!(found, vec![3, 17, 42, 99]);
        assert_eq!(nonlinear[0].0.degree(), 2);
    }

    fn non_residue_101(f: Fp) -> i64 {
        let p = f.modulus();
        (2..p)
            .find(|&n| f.0.pow(n, (p - 1) / 2) == p - 1)
            .unwrap() as i64
    }
}
