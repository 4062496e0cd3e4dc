use proptest::prelude::*;
use valueset_core::multipoly::{elementary_symmetric, elementary_symmetric_in, weighted_compose};
use valueset_core::{FieldSpec, FqElem, Monomial, MultiPoly};

fn fp(p: u64) -> FieldSpec {
    FieldSpec::prime(p).unwrap()
}

fn arb_terms(nvars: usize) -> impl Strategy<Value = Vec<(Vec<u32>, u64)>> {
    prop::collection::vec((prop::collection::vec(0u32..3, nvars), 1u64..1000), 1..6)
}

fn build(f: &FieldSpec, nvars: usize, terms: &[(Vec<u32>, u64)]) -> MultiPoly {
    MultiPoly::from_terms_checked(f, nvars, terms.iter().map(|(e, c)| (Monomial::new(e.clone()), f.from_int(*c as i64)))).unwrap()
}

fn points(f: &FieldSpec, n: usize) -> Vec<Vec<FqElem>> {
    let q = f.q();
    (0..q.pow(n as u32))
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let e = f.from_index(k % q).unwrap();
                    k /= q;
                    e
                })
                .collect()
        })
        .collect()
}

proptest! {
    #[test]
    fn highest_form_is_homogeneous(pi in 0usize..4, terms in arb_terms(3)) {
        let f = fp([2, 3, 5, 7][pi]);
        let g = build(&f, 3, &terms);
        prop_assume!(!g.is_zero());
        let h = g.highest_form().unwrap();
        let deg = h.total_degree().unwrap() as u64;
        for x in points(&f, 3) {
            let hx = h.eval(&f, &x).unwrap();
            for lam in f.elements().filter(|l| !l.is_zero()) {
                let lx: Vec<FqElem> = x.iter().map(|&c| f.mul(lam, c)).collect();
                prop_assert_eq!(h.eval(&f, &lx).unwrap(), f.mul(f.pow(lam, deg), hx));
            }
        }
    }

    #[test]
    fn elementary_symmetric_is_permutation_invariant(n in 1usize..6, k in 1usize..6, raw in prop::collection::vec(0u64..11, 5), rot in 0usize..5) {
        prop_assume!(k <= n);
        let f = fp(11);
        let e = elementary_symmetric(&f, n, k).unwrap();
        let mut x: Vec<FqElem> = raw[..n].iter().map(|&c| f.from_int(c as i64)).collect();
        let base = e.eval(&f, &x).unwrap();
        x.rotate_left(rot % n);
        prop_assert_eq!(e.eval(&f, &x).unwrap(), base);
        x.reverse();
        prop_assert_eq!(e.eval(&f, &x).unwrap(), base);
    }

    #[test]
    fn composition_respects_the_weight_bound(terms in arb_terms(3)) {
        // S(Y1, Y2, Y3) composed with the elementary symmetric polynomials
        // in five variables has degree at most the largest weight of S.
        let f = fp(7);
        let s = build(&f, 3, &terms);
        prop_assume!(!s.is_zero());
        let vars: Vec<usize> = (0..5).collect();
        let pis: Vec<MultiPoly> = (1..=3).map(|k| elementary_symmetric_in(&f, 5, &vars, k).unwrap()).collect();
        let g = weighted_compose(&f, &s, &pis).unwrap();
        let bound = s.max_weight().unwrap();
        prop_assert!(g.total_degree().unwrap_or(0) <= bound);
        let hw = s.highest_weight_component().unwrap();
        let top = weighted_compose(&f, &hw, &pis).unwrap();
        // elementary symmetric polynomials are algebraically independent, so
        // the top-weight part survives in degree exactly `bound`
            prop_assert_eq!(top.total_degree(), Some(bound));
        prop_assert_eq!(g.total_degree(), Some(bound));
    }
}

#[test]
fn weight_bound_examples() {
    let f = fp(5);
    let vars: Vec<usize> = (0..4).collect();
    let pis: Vec<MultiPoly> = (1..=2).map(|k| elementary_symmetric_in(&f, 4, &vars, k).unwrap()).collect();
    // Y1^2 - 2 Y2 has weight 2 and composes to the sum of squares.
    let s = build(&f, 2, &[(vec![2, 0], 1), (vec![0, 1], 3)]);
    let g = weighted_compose(&f, &s, &pis).unwrap();
    assert_eq!(s.max_weight(), Some(2));
    assert_eq!(g.total_degree(), Some(2));
    assert_eq!(g.num_terms(), 4);
}
