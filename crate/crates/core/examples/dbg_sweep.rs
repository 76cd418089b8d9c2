use orefactor_core::diffop::{Basis, DiffOperator};
use orefactor_core::factor::*;
use orefactor_core::field::Fp;
use orefactor_core::guess::{min_terms_required, FixedSeries, ProbePlan};
use orefactor_core::series::{linear_combine, series_from_ode};

fn main() {
    let f = Fp::new(32749).unwrap();
    // --- remove_summand case
    let geo = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[-1], &[1, -4]]);
    let le = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[0, 0, 16], &[0], &[1, 0, -16]]);
    let n = 400;
    let t = series_from_ode(&geo, &[(1, 1)], n).unwrap();
    let g = series_from_ode(&le, &[(0, 1)], n).unwrap();
    let s = linear_combine(&[&t, &g], &[1, 1]).unwrap();
    println!("s: val={} len={}", s.valuation(), s.len());
    for (q, d) in [(3usize, 4usize), (4, 10), (3, 10), (4, 14)] {
        let gen_alpha = 12345u64;
        let neg = f.0.neg(gen_alpha);
        let comb = linear_combine(&[&s, &t], &[1, neg]).unwrap();
        println!("probe ({q},{d}): generic N = {:?}", min_terms_required(&comb, q, d));
        let comb1 = linear_combine(&[&s, &t], &[1, f.0.neg(1)]).unwrap();
        println!("probe ({q},{d}): alpha=1 N = {:?}", min_terms_required(&comb1, q, d));
    }
    let cfg = SweepConfig { probe_order: 3, probe_degree: 4, budget: 1_000_000, witness_degree_cap: 16 };
    match remove_direct_summand(&s, &t, &cfg) {
        Ok(r) => println!("remove_direct_summand: {:?}", r),
        Err(e) => println!("remove_direct_summand error: {e}"),
    }
    // order inference of g
    let mut src = FixedSeries(g.clone());
    let plan = ProbePlan { order_hint: 1, degree_hint: 4, max_rounds: 3 };
    println!("infer(g) = {:?}", orefactor_core::guess::infer_minimal_order(&mut src, &plan).map(|(f, _)| f));
    let mut src = FixedSeries(s.clone());
    println!("infer(s) = {:?}", orefactor_core::guess::infer_minimal_order(&mut src, &plan).map(|(f, _)| f));

    // --- factorize C*LE case
    let c = DiffOperator::from_i64_rows(f, Basis::Theta, &[&[-3], &[1, -4]]);
    let l = c.multiply(&le).unwrap();
    println!("L = C*LE: order {} degree {}", l.order(), l.degree());
    let fam = frobenius_family(&l, 0, 300).unwrap();
    println!("family(0): frees = {:?}", fam.family.directions.iter().map(|(i, _)| *i).collect::<Vec<_>>());
    let cfg2 = SweepConfig { probe_order: 3, probe_degree: 3, budget: 1_000_000, witness_degree_cap: 40 };
    match alpha_sweep(&fam, &cfg2) {
        Ok(rs) => {
            println!("sweep results: {}", rs.len());
            for r in rs {
                println!("  alpha={} n={} q={:?} witness={:?}", r.alpha, r.n_at_probe, r.reduced_order, r.witness.as_ref().map(|w| (w.order(), w.degree())));
            }
        }
        Err(e) => println!("sweep error: {e}"),
    }
    let fam3 = frobenius_family(&l, 3, 300).unwrap();
    println!("family(3): frees = {:?}", fam3.family.directions.len());
    let mut src3 = FixedSeries(fam3.family.base.clone());
    println!("infer(fam3 base) = {:?}", orefactor_core::guess::infer_minimal_order(&mut src3, &ProbePlan { order_hint: 1, degree_hint: 3, max_rounds: 3 }).map(|(f, _)| f));
}
