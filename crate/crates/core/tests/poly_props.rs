use proptest::prelude::*;
use valueset_core::poly::{discriminant, gcd, roots_in_field, MonicFamilyPoly};
use valueset_core::{FieldSpec, FqElem};

fn field(i: usize) -> FieldSpec {
    let (p, s) = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (3, 2), (11, 1)][i % 7];
    FieldSpec::new(p, s, None).unwrap()
}

fn elems(f: &FieldSpec, raw: &[u64]) -> Vec<FqElem> {
    raw.iter().map(|&x| f.from_index(x % f.q()).unwrap()).collect()
}

fn recursive_quotient(f: &FieldSpec, poly: &MonicFamilyPoly, nodes: &[FqElem]) -> FqElem {
    let u = poly.to_unipoly(f);
    if nodes.len() == 1 {
        return u.eval(f, nodes[0]).unwrap();
    }
    let n = nodes.len();
    let hi = recursive_quotient(f, poly, &nodes[1..]);
    let lo = recursive_quotient(f, poly, &nodes[..n - 1]);
    f.div(f.sub(hi, lo), f.sub(nodes[n - 1], nodes[0])).unwrap()
}

proptest! {
    #[test]
    fn divided_difference_is_symmetric(fi in 0usize..7, a in prop::collection::vec(any::<u64>(), 1..7),
                                       nodes in prop::collection::vec(any::<u64>(), 1..6), rot in 0usize..6) {
        let f = field(fi);
        let poly = MonicFamilyPoly::new(&f, elems(&f, &a)).unwrap();
        let mut x = elems(&f, &nodes);
        let base = poly.divided_difference(&f, &x).unwrap();
        let len = x.len();
        x.rotate_left(rot % len);
        prop_assert_eq!(poly.divided_difference(&f, &x).unwrap(), base);
        x.reverse();
        prop_assert_eq!(poly.divided_difference(&f, &x).unwrap(), base);
    }

    #[test]
    fn divided_difference_matches_recursion_at_distinct_nodes(fi in 0usize..7, a in prop::collection::vec(any::<u64>(), 1..8),
                                                             nodes in prop::collection::vec(any::<u64>(), 1..7)) {
        let f = field(fi);
        let poly = MonicFamilyPoly::new(&f, elems(&f, &a)).unwrap();
        let mut x = elems(&f, &nodes);
        x.sort();
        x.dedup();
        prop_assert_eq!(poly.divided_difference(&f, &x).unwrap(), recursive_quotient(&f, &poly, &x));
    }

    #[test]
    fn confluent_limit_is_derivative(fi in 0usize..7, a in prop::collection::vec(any::<u64>(), 1..8), t in any::<u64>()) {
        let f = field(fi);
        let poly = MonicFamilyPoly::new(&f, elems(&f, &a)).unwrap();
        let t = f.from_index(t % f.q()).unwrap();
        let df = poly.to_unipoly(&f).derivative(&f);
        prop_assert_eq!(poly.divided_difference(&f, &[t, t]).unwrap(), df.eval(&f, t).unwrap());
    }

    #[test]
    fn hermite_matches_prefixes_in_any_order(fi in 0usize..7, a in prop::collection::vec(any::<u64>(), 1..6),
                                            nodes in prop::collection::vec(any::<u64>(), 1..5), rot in 0usize..5) {
        let f = field(fi);
        let poly = MonicFamilyPoly::new(&f, elems(&f, &a)).unwrap();
        let mut x = elems(&f, &nodes);
        let divides = poly.hermite_divides(&f, &x).unwrap();
        let len = x.len();
        x.rotate_left(rot % len);
        let prefixes = (1..=len).all(|i| poly.divided_difference(&f, &x[..i]).unwrap().is_zero());
        prop_assert_eq!(poly.hermite_divides(&f, &x).unwrap(), divides);
        prop_assert_eq!(prefixes, divides);
    }

    #[test]
    fn split_polynomials_with_repeated_roots_have_zero_discriminant(fi in 0usize..7, roots in prop::collection::vec(any::<u64>(), 2..5)) {
        let f = field(fi);
        let r = elems(&f, &roots);
        let u = valueset_core::UniPoly::from_roots(&f, &r);
        let df = u.derivative(&f);
        prop_assume!(!df.is_zero());
        let mut sorted = r.clone();
        sorted.sort();
        sorted.dedup();
        let repeated = sorted.len() < r.len();
        prop_assert_eq!(discriminant(&f, &u).unwrap().is_zero(), repeated);
        prop_assert_eq!(gcd(&f, &u, &df).unwrap().degree().unwrap() >= 1, repeated);
        prop_assert_eq!(roots_in_field(&f, &u).unwrap().len(), sorted.len());
    }
}
