//! p-curvature computation and nilpotence testing in characteristic p.
//!
//! With Y' = A Y the companion system of L mod p, the p-curvature is the
//! matrix M_p from the iteration M_1 = A, M_(k+1) = M_k' + M_k A. The
//! iteration is run fraction-free as B_k = l^k M_k with l the leading
//! coefficient polynomial:
//!
//!   B_(k+1) = l B_k' - k l' B_k + B_k (l A),
//!
//! so only dense polynomial arithmetic over F_p occurs. Nilpotence of M_p
//! is nilpotence of B_p (they differ by the scalar l^p), decided through
//! the power-sum traces of B_p.

use super::{Basis, DiffOpError, DiffOperator};
use crate::field::Fp;
use crate::modarith::PrimeContext;

/// Result of a p-curvature computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureReport {
    pub prime: u64,
    pub order: usize,
    pub nilpotent: bool,
    /// Smallest k with M_p^k = 0, when nilpotent.
    pub nilpotency_index: Option<usize>,
}

/// Computes the p-curvature of an operator reduced mod p and tests
/// nilpotence.
pub fn p_curvature(op: &DiffOperator<Fp>) -> Result<CurvatureReport, DiffOpError> {
    let p = op.field().modulus();
    if op.is_zero() || op.order() == 0 {
        return Err(DiffOpError::ZeroOperator);
    }
    let ddw = op.convert_basis(Basis::Ddw);
    let q = ddw.order();
    let lead = ddw.leading_poly();
    if lead.is_zero() {
        return Err(DiffOpError::BadReductionAtP(p));
    }
    let ctx = op.field().ctx();

    let ell: Vec<u64> = lead.coeffs().to_vec();
    let ell_d = derivative(&ell, ctx);
    // l A: identity band carries l, last row carries -a_j
    let neg_rows: Vec<Vec<u64>> = (0..q)
        .map(|j| {
            ddw.coeff(j)
                .coeffs()
                .iter()
                .map(|&c| ctx.neg(c))
                .collect()
        })
        .collect();

    // B_1 = l A
    let mut b: Vec<Vec<Vec<u64>>> = vec![vec![Vec::new(); q]; q];
    for i in 0..q - 1 {
        b[i][i + 1] = ell.clone();
    }
    for (j, r) in neg_rows.iter().enumerate() {
        b[q - 1][j] = r.clone();
    }

    for k in 1..p {
        let kk = k % p;
        let mut next: Vec<Vec<Vec<u64>>> = vec![vec![Vec::new(); q]; q];
        for i in 0..q {
            for j in 0..q {
                // l B' - k l' B
                let db = derivative(&b[i][j], ctx);
                let mut acc = mul_smallish(&db, &ell, ctx);
                let t2 = mul_smallish(&b[i][j], &ell_d, ctx);
                sub_scaled(&mut acc, &t2, kk, ctx);
                // (B lA)[i][j] = B[i][j-1] l + B[i][q-1] (-a_j)
                if j >= 1 {
                    let t = mul_smallish(&b[i][j - 1], &ell, ctx);
                    add_into(&mut acc, &t, ctx);
                }
                let t = mul_smallish(&b[i][q - 1], &neg_rows[j], ctx);
                add_into(&mut acc, &t, ctx);
                trim(&mut acc);
                next[i][j] = acc;
            }
        }
        b = next;
    }

    // nilpotence via power sums tr(B^k), k = 1..q (char p > q)
    let mut powers: Vec<Vec<Vec<Vec<u64>>>> = vec![b.clone()];
    let mut nilpotent = true;
    for k in 1..=q {
        if powers.len() < k {
            let last = powers.last().unwrap();
            powers.push(mat_mul(last, &b, ctx));
        }
        let tr = mat_trace(&powers[k - 1], ctx);
        if !tr.is_empty() {
            nilpotent = false;
            break;
        }
    }
    let nilpotency_index = if nilpotent {
        let mut idx = q;
        for (k, m) in powers.iter().enumerate() {
            if mat_is_zero(m) {
                idx = k + 1;
                break;
            }
        }
        Some(idx)
    } else {
        None
    };
    Ok(CurvatureReport { prime: p, order: q, nilpotent, nilpotency_index })
}

/// Reduce an exact operator mod p and compute its p-curvature.
pub fn p_curvature_of_rational(
    op: &DiffOperator<crate::field::Rationals>,
    p: u64,
) -> Result<CurvatureReport, DiffOpError> {
    let f = Fp::new(p).map_err(|_| DiffOpError::BadReductionAtP(p))?;
    let reduced = op.reduce_mod(f)?;
    p_curvature(&reduced)
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn derivative(a: &[u64], ctx: PrimeContext) -> Vec<u64> {
    if a.len() <= 1 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(a.len() - 1);
    for (i, &c) in a.iter().enumerate().skip(1) {
        out.push(ctx.mul(c, (i as u64) % ctx.modulus()));
    }
    trim(&mut out);
    out
}

/// Product where one factor is expected small; plain convolution with an
/// unreduced u128 accumulator.
fn mul_smallish(a: &[u64], b: &[u64], ctx: PrimeContext) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let p = ctx.modulus();
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &s) in small.iter().enumerate() {
        if s == 0 {
            continue;
        }
        let mut carry_guard = 0usize;
        let _ = &mut carry_guard;
        for (j, &g) in big.iter().enumerate() {
            if g == 0 {
                continue;
            }
            let t = (s as u128 * g as u128 + out[i + j] as u128) % p as u128;
            out[i + j] = t as u64;
        }
    }
    trim(&mut out);
    out
}

/// Karatsuba multiplication for the large final products.
fn mul_karatsuba(a: &[u64], b: &[u64], ctx: PrimeContext) -> Vec<u64> {
    const THRESHOLD: usize = 64;
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len().min(b.len()) <= THRESHOLD {
        return mul_smallish(a, b, ctx);
    }
    let h = a.len().max(b.len()) / 2;
    let (a0, a1) = split(a, h);
    let (b0, b1) = split(b, h);
    let z0 = mul_karatsuba(&a0, &b0, ctx);
    let z2 = mul_karatsuba(&a1, &b1, ctx);
    let sa = add_vec(&a0, &a1, ctx);
    let sb = add_vec(&b0, &b1, ctx);
    let mut z1 = mul_karatsuba(&sa, &sb, ctx);
    sub_scaled(&mut z1, &z0, 1, ctx);
    sub_scaled(&mut z1, &z2, 1, ctx);
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &c) in z0.iter().enumerate() {
        out[i] = ctx.add(out[i], c);
    }
    for (i, &c) in z1.iter().enumerate() {
        out[i + h] = ctx.add(out[i + h], c);
    }
    for (i, &c) in z2.iter().enumerate() {
        out[i + 2 * h] = ctx.add(out[i + 2 * h], c);
    }
    trim(&mut out);
    out
}

fn split(a: &[u64], h: usize) -> (Vec<u64>, Vec<u64>) {
    if a.len() <= h {
        (a.to_vec(), Vec::new())
    } else {
        (a[..h].to_vec(), a[h..].to_vec())
    }
}

fn add_vec(a: &[u64], b: &[u64], ctx: PrimeContext) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = ctx.add(x, y);
    }
    trim(&mut out);
    out
}

fn add_into(acc: &mut Vec<u64>, t: &[u64], ctx: PrimeContext) {
    if acc.len() < t.len() {
        acc.resize(t.len(), 0);
    }
    for (i, &c) in t.iter().enumerate() {
        acc[i] = ctx.add(acc[i], c);
    }
}

/// acc -= k * t
fn sub_scaled(acc: &mut Vec<u64>, t: &[u64], k: u64, ctx: PrimeContext) {
    if k == 0 {
        return;
    }
    if acc.len() < t.len() {
        acc.resize(t.len(), 0);
    }
    for (i, &c) in t.iter().enumerate() {
        acc[i] = ctx.sub(acc[i], ctx.mul(k, c));
    }
    trim(acc);
}

fn mat_mul(
    a: &[Vec<Vec<u64>>],
    b: &[Vec<Vec<u64>>],
    ctx: PrimeContext,
) -> Vec<Vec<Vec<u64>>> {
    let q = a.len();
    let mut out = vec![vec![Vec::new(); q]; q];
    for i in 0..q {
        for j in 0..q {
            let mut acc: Vec<u64> = Vec::new();
            for (t, row) in b.iter().enumerate() {
                if a[i][t].is_empty() || row[j].is_empty() {
                    continue;
                }
                let prod = mul_karatsuba(&a[i][t], &row[j], ctx);
                add_into(&mut acc, &prod, ctx);
            }
            trim(&mut acc);
            out[i][j] = acc;
        }
    }
    out
}

fn mat_trace(a: &[Vec<Vec<u64>>], ctx: PrimeContext) -> Vec<u64> {
    let mut acc: Vec<u64> = Vec::new();
    for (i, row) in a.iter().enumerate() {
        add_into(&mut acc, &row[i], ctx);
    }
    trim(&mut acc);
    acc
}

fn mat_is_zero(a: &[Vec<Vec<u64>>]) -> bool {
    a.iter().all(|row| row.iter().all(|e| e.is_empty()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;

    /// d/dw - 1 has curvature scalar 1 at p = 5: not nilpotent.
    #[test]
    fn exponential_is_not_nilpotent() {
        let f = Fp::new(5).unwrap();
        let l = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[1]]);
        let r = p_curvature(&l).unwrap();
        assert!(!r.nilpotent);
        assert_eq!(r.order, 1);
    }

    /// d/dw - 1/w (cleared: w D - 1) has curvature 0 at p = 5.
    #[test]
    fn logarithmic_derivative_is_nilpotent() {
        let f = Fp::new(5).unwrap();
        let l = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[0, 1]]);
        let r = p_curvature(&l).unwrap();
        assert!(r.nilpotent);
        assert_eq!(r.nilpotency_index, Some(1));
    }

    /// Scalar curvature recursion oracle for first order operators:
    /// a_(k+1) = a_k' + a a_k on rational functions, checked against the
    /// matrix code for D - r'/r with r = w^2 + 1.
    #[test]
    fn first_order_log_derivative_family() {
        // (w^2+1) D - 2w annihilates w^2 + 1: globally nilpotent
        for p in [7u64, 11, 101] {
            let f = Fp::new(p).unwrap();
            let l = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[0, -2], &[1, 0, 1]]);
            let r = p_curvature(&l).unwrap();
            assert!(r.nilpotent, "p = {p}");
        }
    }

    /// Products of nilpotent first-order factors stay nilpotent.
    #[test]
    fn product_of_nilpotent_factors_is_nilpotent() {
        let f = Fp::new(101).unwrap();
        // D - 1/w and D - 2w/(w^2+1), cleared forms
        let a = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-1], &[0, 1]]);
        let b = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[0, -2], &[1, 0, 1]]);
        let prod = a.multiply(&b).unwrap();
        let r = p_curvature(&prod).unwrap();
        assert!(r.nilpotent);
        assert!(r.nilpotency_index.unwrap() <= 2);
    }

    /// The elliptic-integral operator (1-16w^2) theta^2 + 16 w^2 is
    /// derived from geometry: nilpotent at every good prime.
    #[test]
    fn elliptic_operator_is_nilpotent() {
        let q = Rationals;
        let le = DiffOperator::from_i64_rows(
            q,
            Basis::Theta,
            &[&[0, 0, 16], &[0], &[1, 0, -16]],
        );
        for p in [101u64, 10007] {
            let r = p_curvature_of_rational(&le, p).unwrap();
            assert!(r.nilpotent, "p = {p}");
        }
    }

    /// D - 2 is not nilpotent at any prime (nonzero residue).
    #[test]
    fn generic_first_order_not_nilpotent() {
        let f = Fp::new(101).unwrap();
        let l = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[-2], &[1]]);
        assert!(!p_curvature(&l).unwrap().nilpotent);
    }
}
