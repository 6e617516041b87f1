use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use oqs_core::algebra::{embed, kron, CsrMatrix, DensityMatrix, Operator, SpaceLayout};
use proptest::prelude::*;

fn c64() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

/// Random `n × n` matrix with roughly a fraction `fill` of entries set.
fn sparse(n: usize, fill: f64) -> impl Strategy<Value = CsrMatrix> {
    proptest::collection::vec(proptest::option::weighted(fill, c64()), n * n).prop_map(move |cells| {
        let triplets = cells.into_iter().enumerate().filter_map(|(k, z)| z.map(|z| (k / n, k % n, z)));
        CsrMatrix::from_triplets(n, n, triplets, 0.0)
    })
}

fn dims() -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(1usize..4, 1..4)
}

fn layout(d: &[usize]) -> Arc<SpaceLayout> {
    Arc::new(SpaceLayout::new(d.iter().enumerate().map(|(k, &n)| (format!("f{k}"), n))).unwrap())
}

fn op(l: &Arc<SpaceLayout>, m: CsrMatrix) -> Operator {
    Operator::new(l.clone(), m).unwrap()
}

fn random_hermitian(n: usize) -> impl Strategy<Value = Array2<C64>> {
    proptest::collection::vec(c64(), n * n).prop_map(move |v| {
        let a = Array2::from_shape_vec((n, n), v).unwrap();
        let h = &a + &a.t().mapv(|z| z.conj());
        h.mapv(|z| z * 0.5)
    })
}

#[test]
fn canonical_dimension_is_144() {
    assert_eq!(SpaceLayout::canonical(5, 5).dim(), 144);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjoint_reverses_products(
        (d, a, b) in dims().prop_flat_map(|d| {
            let n: usize = d.iter().product();
            (Just(d), sparse(n, 0.3), sparse(n, 0.3))
        })
    ) {
        let l = layout(&d);
        let (a, b) = (op(&l, a), op(&l, b));
        let lhs = (&a * &b).adjoint();
        let rhs = &b.adjoint() * &a.adjoint();
        prop_assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-12);
    }

    #[test]
    fn embed_is_kron_with_identities(
        (d, k, m) in dims().prop_flat_map(|d| {
            let len = d.len();
            (Just(d), 0..len)
        }).prop_flat_map(|(d, k)| {
            let n = d[k];
            (Just(d), Just(k), sparse(n, 0.5))
        })
    ) {
        let l = layout(&d);
        let label = format!("f{k}");
        let local = op(&Arc::new(SpaceLayout::single(&label, d[k])), m);
        let embedded = embed(&local, &label, &l).unwrap();
        let mut acc: Option<Operator> = None;
        for (j, &n) in d.iter().enumerate() {
            let name = format!("f{j}");
            let piece = if j == k {
                local.clone()
            } else {
                Operator::identity(Arc::new(SpaceLayout::single(&name, n)))
            };
            acc = Some(match acc {
                None => piece,
                Some(a) => kron(&a, &piece),
            });
        }
        let full = acc.unwrap();
        prop_assert_eq!(full.layout().as_ref(), l.as_ref());
        prop_assert!(full.matrix().max_abs_diff(embedded.matrix()) == 0.0);
    }

    #[test]
    fn kron_mixed_product(a in sparse(2, 0.5), b in sparse(3, 0.5), c in sparse(2, 0.5), e in sparse(3, 0.5)) {
        let la = Arc::new(SpaceLayout::single("a", 2));
        let lb = Arc::new(SpaceLayout::single("b", 3));
        let (a, c) = (op(&la, a), op(&la, c));
        let (b, e) = (op(&lb, b), op(&lb, e));
        let lhs = &kron(&a, &b) * &kron(&c, &e);
        let rhs = kron(&(&a * &c), &(&b * &e));
        prop_assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace(
        (d, h, keep) in dims().prop_flat_map(|d| {
            let n: usize = d.iter().product();
            let len = d.len();
            (Just(d), random_hermitian(n), proptest::collection::vec(any::<bool>(), len))
        })
    ) {
        let l = layout(&d);
        let rho = DensityMatrix::from_matrix(l.clone(), h).unwrap();
        // At least one factor must remain.
        let labels: Vec<String> = (0..d.len()).filter(|&k| keep[k] || k == 0).map(|k| format!("f{k}")).collect();
        let keep: Vec<&str> = labels.iter().map(String::as_str).collect();
        let reduced = rho.partial_trace(&keep).unwrap();
        prop_assert!((reduced.trace() - rho.trace()).norm() < 1e-12);
    }
}
