//! Symmetric powers of differential operators.
//!
//! The exact construction works in the k-th symmetric power of the
//! companion module: monomials in the solution slots carry an induced
//! derivation, and the minimal operator of the cyclic vector y^k is found
//! as the first linear dependence among its derivatives over F(w). The
//! series-first route (guess the annihilator of solution products, then
//! verify) lives in the guess module and is used by the toolkit driver;
//! this construction is its exact fallback and oracle.

use super::{Basis, DiffOpError, DiffOperator, FracOperator};
use crate::field::Field;
use crate::poly::{FracField, RatFn};

/// Multi-index over solution slots v_0 .. v_(q-1) with total degree k.
fn monomials(q: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(q: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == q - 1 {
            let mut m = prefix.clone();
            m.push(k);
            out.push(m);
            return;
        }
        for a in (0..=k).rev() {
            prefix.push(a);
            rec(q, k - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(q, k, &mut Vec::new(), &mut out);
    out
}

/// Minimal operator annihilating all k-fold products of solutions of
/// `op`, built by the cyclic-vector construction on the symmetric power
/// of the companion module. For a generic order-2 operator the result has
/// order k + 1.
pub fn symmetric_power_exact<F: Field>(
    op: &DiffOperator<F>,
    k: usize,
) -> Result<DiffOperator<F>, DiffOpError> {
    if op.is_zero() || op.order() == 0 {
        return Err(DiffOpError::ZeroOperator);
    }
    assert!(k >= 1, "symmetric power wants k >= 1");
    let ddw = op.convert_basis(Basis::Ddw);
    let q = ddw.order();
    let f = op.field().clone();
    let ff = FracField(f.clone());

    // companion: v_i' = v_(i+1) for i < q-1, v_(q-1)' = -sum c_j v_j
    let lead = RatFn::from_poly(ddw.leading_poly());
    let c: Vec<RatFn<F>> = (0..q)
        .map(|j| RatFn::from_poly(ddw.coeff(j)).div(&lead).neg())
        .collect();

    let basis = monomials(q, k);
    let dim = basis.len();
    let index_of = |m: &[usize]| basis.iter().position(|b| b == m).unwrap();

    // derivation of a coordinate vector in the monomial basis
    let derive = |v: &[RatFn<F>]| -> Vec<RatFn<F>> {
        let mut out = vec![ff.zero(); dim];
        for (idx, coeff) in v.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            // product-rule part: coefficient functions differentiate
            out[idx] = out[idx].add(&coeff.derivative());
            // Leibniz over the slots of the monomial
            let mono = &basis[idx];
            for i in 0..q {
                if mono[i] == 0 {
                    continue;
                }
                let mult = f.from_i64(mono[i] as i64);
                if i + 1 < q {
                    // v_i -> v_(i+1)
                    let mut m2 = mono.clone();
                    m2[i] -= 1;
                    m2[i + 1] += 1;
                    let t = coeff.scale(&mult);
                    let j = index_of(&m2);
                    out[j] = out[j].add(&t);
                } else {
                    // v_(q-1) -> sum_j c_j v_j
                    for (jslot, cj) in c.iter().enumerate() {
                        if cj.is_zero() {
                            continue;
                        }
                        let mut m2 = mono.clone();
                        m2[q - 1] -= 1;
                        m2[jslot] += 1;
                        let t = coeff.scale(&mult).mul(cj);
                        let j = index_of(&m2);
                        out[j] = out[j].add(&t);
                    }
                }
            }
        }
        out
    };

    // cyclic vector y^k = v_0^k
    let mut top = vec![0usize; q];
    top[0] = k;
    let mut u = vec![ff.zero(); dim];
    u[index_of(&top)] = ff.one();

    // echelon of derivatives with tracked combinations
    let mut rows: Vec<(Vec<RatFn<F>>, Vec<RatFn<F>>)> = Vec::new();
    let mut current = u;
    for m in 0..=dim {
        let mut vec = current.clone();
        let mut combo = vec![ff.zero(); dim + 2];
        combo[m] = ff.one();
        // reduce against echelon rows
        for (row, rc) in &rows {
            let pivot = row.iter().position(|x| !x.is_zero()).unwrap();
            if vec[pivot].is_zero() {
                continue;
            }
            let factor = vec[pivot].div(&row[pivot]);
            for i in 0..dim {
                let t = factor.mul(&row[i]);
                vec[i] = vec[i].sub(&t);
            }
            for i in 0..combo.len() {
                let t = factor.mul(&rc[i]);
                combo[i] = combo[i].sub(&t);
            }
        }
        if vec.iter().all(|x| x.is_zero()) {
            // dependence: sum combo[m] grad^m u = 0
            let frac = FracOperator {
                field: f.clone(),
                coeffs: combo[..=m].to_vec(),
            };
            return Ok(frac.clear_denominators());
        }
        rows.push((vec, combo));
        current = derive(&current);
    }
    unreachable!("dependence must occur by dimension + 1 derivatives");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Rationals};
    use crate::series::{apply_operator, series_from_ode, TruncSeries};

    fn fp() -> Fp {
        Fp::new(32749).unwrap()
    }

    /// Sym^2(D^2) = D^3: solutions {1, w} give products {1, w, w^2}.
    #[test]
    fn sym2_of_d2() {
        let f = fp();
        let d2 = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[0], &[0], &[1]]);
        let s = symmetric_power_exact(&d2, 2).unwrap();
        assert_eq!(
            s,
            DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[0], &[0], &[0], &[1]])
        );
    }

    /// Sym^1 returns the operator itself.
    #[test]
    fn sym1_identity() {
        let f = fp();
        let l = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[1, 3], &[2, 0, 1], &[0, 5]]);
        let s = symmetric_power_exact(&l, 1).unwrap();
        // same solution space: proportional coefficient vectors after
        // clearing; compare by cross-multiplying leading coefficients
        let prod = s.leading_poly().mul(&l.coeff(0));
        let prod2 = l.leading_poly().mul(&s.coeff(0));
        assert_eq!(prod, prod2);
        assert_eq!(s.order(), l.order());
    }

    /// Sym^2 of the elliptic E operator annihilates products of its
    /// solutions: verified on the square of a power-series solution.
    #[test]
    fn sym2_annihilates_solution_squares() {
        let q = Rationals;
        // (1-16w^2) theta^2 + 16w^2
        let le = DiffOperator::from_i64_rows(
            q,
            Basis::Theta,
            &[&[0, 0, 16], &[0], &[1, 0, -16]],
        );
        let sym2 = symmetric_power_exact(&le, 2).unwrap();
        assert_eq!(sym2.order(), 3);
        let e = series_from_ode(&le, &[(0, q.one())], 40).unwrap();
        let e2 = e.mul(&e);
        let img = apply_operator(&sym2, &e2);
        assert!(img.is_zero_on_window(), "Sym^2 must kill E^2");
    }

    #[test]
    fn sym3_order_of_second_order_operator() {
        let f = fp();
        // generic second order: w D^2 + (1+w) D + 3
        let l = DiffOperator::from_i64_rows(f, Basis::Ddw, &[&[3], &[1, 1], &[0, 1]]);
        let s = symmetric_power_exact(&l, 3).unwrap();
        assert_eq!(s.order(), 4);
        // verify against a series solution cube on the shifted-ordinary
        // point w = 1
        let t = l.translate(&1);
        let st = s.translate(&1);
        let sol = series_from_ode(&t, &[(0, 1), (1, 1)], 60).unwrap();
        let cube = sol.mul(&sol).mul(&sol);
        let img = apply_operator(&st, &cube);
        assert!(img.is_zero_on_window());
        let _ = TruncSeries::<Fp>::zero(f, 1);
    }
}
