use num_complex::Complex64;
use proptest::prelude::*;
use qprecomp::algebra::dense::{self, CMatrix};
use qprecomp::algebra::random::random_clifford_circuit;
use qprecomp::algebra::{binomial, CliffordTableau, PauliString, ZkElement};
use qprecomp::rng::seeded;
use qprecomp::sim::{Circuit, Gate};
use rand::Rng;

fn p(text: &str) -> PauliString {
    PauliString::parse(text).unwrap()
}

fn conj(u: &CMatrix, m: &CMatrix) -> CMatrix {
    u * m * u.adjoint()
}

fn zk_matrix(g: &ZkElement) -> CMatrix {
    dense::diagonal(&g.to_diagonal().unwrap())
}

#[test]
fn pauli_products() {
    assert_eq!(p("+;1;0").multiply(&p("+;1;0")).unwrap(), p("+;0;0"));
    // X·Z is −iY; with Y = i·X·Z that is the bare string X^1 Z^1.
    let xz = p("+;1;0").multiply(&p("+;0;1")).unwrap();
    let y = PauliString::single(1, 0, 'Y').unwrap();
    let expected = dense::pauli_matrix(&y).unwrap() * Complex64::new(0.0, -1.0);
    assert!(dense::max_abs_diff(&dense::pauli_matrix(&xz).unwrap(), &expected) < 1e-15);
    assert_eq!(p("+;10;00").multiply(&p("+;00;01")).unwrap(), p("+;10;01"));
    assert!(p("+;1;0").multiply(&p("+;10;00")).is_err());
}

#[test]
fn pauli_text_round_trip() {
    for text in ["+;;", "-i;101;011", "+i;1;1", "-;00;10"] {
        assert_eq!(p(text).to_string(), text);
    }
    assert!(PauliString::parse("*;1;1").is_err());
    assert!(PauliString::parse("+;1;11").is_err());
}

proptest! {
    #[test]
    fn pauli_product_matches_matrices(n in 1usize..4, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let mut random = || {
            let x = (0..n).map(|_| rng.random_bool(0.5)).collect();
            let z = (0..n).map(|_| rng.random_bool(0.5)).collect();
            PauliString::from_bits(x, z, rng.random_range(0..4)).unwrap()
        };
        let (a, b) = (random(), random());
        let prod = a.multiply(&b).unwrap();
        let ma = dense::pauli_matrix(&a).unwrap();
        let mb = dense::pauli_matrix(&b).unwrap();
        prop_assert!(dense::max_abs_diff(&dense::pauli_matrix(&prod).unwrap(), &(&ma * &mb)) < 1e-12);
        prop_assert!(dense::max_abs_diff(&dense::pauli_matrix(&a.adjoint()).unwrap(), &ma.adjoint()) < 1e-12);
        prop_assert_eq!(a.commutes_with(&b), dense::max_abs_diff(&(&ma * &mb), &(&mb * &ma)) < 1e-12);
    }
}

#[test]
fn tableau_examples() {
    let mut h = Circuit::new(1);
    h.push(Gate::H, [0]);
    let t = CliffordTableau::from_circuit(&h).unwrap();
    assert_eq!(t.x_image(0), &p("+;0;1"));
    assert_eq!(t.z_image(0), &p("+;1;0"));

    let mut s = Circuit::new(1);
    s.push(Gate::S, [0]);
    let t = CliffordTableau::from_circuit(&s).unwrap();
    assert_eq!(t.x_image(0), &PauliString::single(1, 0, 'Y').unwrap());
    assert_eq!(t.z_image(0), &p("+;0;1"));

    let mut cx = Circuit::new(2);
    cx.push(Gate::Cnot, [0, 1]);
    let t = CliffordTableau::from_circuit(&cx).unwrap();
    assert_eq!(t.x_image(0), &p("+;11;00"));
    assert_eq!(t.z_image(1), &p("+;00;11"));
    assert_eq!(t.conjugate(&p("+;00;10")).unwrap(), p("+;00;10"));

    let id = CliffordTableau::identity(3);
    assert_eq!(id.conjugate(&p("-i;101;110")).unwrap(), p("-i;101;110"));

    let ht = CliffordTableau::from_circuit(&h).unwrap();
    assert_eq!(
        ht.factorize_correction(&[true], &[false]).unwrap(),
        p("+;0;1")
    );
    assert_eq!(
        ht.factorize_correction(&[false], &[false]).unwrap(),
        p("+;0;0")
    );

    let mut bad = Circuit::new(1);
    bad.push(Gate::T, [0]);
    assert!(CliffordTableau::from_circuit(&bad).is_err());
}

#[test]
fn tableau_conjugation_matches_dense_with_phase() {
    let mut rng = seeded(17);
    for trial in 0..1000 {
        let n = 1 + trial % 4;
        let len = rng.random_range(0..=40);
        let mut circuit = random_clifford_circuit(n, len, &mut rng);
        for _ in 0..3 {
            let q = rng.random_range(0..n);
            circuit.push(
                [Gate::X, Gate::Y, Gate::Z, Gate::Sdg][rng.random_range(0..4)],
                [q],
            );
        }
        let t = CliffordTableau::from_circuit(&circuit).unwrap();
        assert!(t.is_symplectic());
        let u = dense::circuit_unitary(&circuit).unwrap();
        let x = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let z = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let pauli = PauliString::from_bits(x, z, rng.random_range(0..4)).unwrap();
        let got = dense::pauli_matrix(&t.conjugate(&pauli).unwrap()).unwrap();
        let want = conj(&u, &dense::pauli_matrix(&pauli).unwrap());
        assert!(dense::max_abs_diff(&got, &want) < 1e-12, "trial {trial}");
    }
}

#[test]
fn factorization_equals_conjugation() {
    let mut rng = seeded(23);
    let check = |t: &CliffordTableau, x: Vec<bool>, z: Vec<bool>| {
        let assembled = PauliString::from_bits(x.clone(), z.clone(), 0).unwrap();
        assert_eq!(
            t.factorize_correction(&x, &z).unwrap(),
            t.conjugate(&assembled).unwrap()
        );
    };
    for _ in 0..20 {
        let t = CliffordTableau::from_circuit(&random_clifford_circuit(2, 20, &mut rng)).unwrap();
        for bits in 0u32..16 {
            let x = vec![bits & 1 == 1, bits & 2 == 2];
            let z = vec![bits & 4 == 4, bits & 8 == 8];
            check(&t, x, z);
        }
    }
    for _ in 0..200 {
        let t = CliffordTableau::from_circuit(&random_clifford_circuit(4, 80, &mut rng)).unwrap();
        let x = (0..4).map(|_| rng.random_bool(0.5)).collect();
        let z = (0..4).map(|_| rng.random_bool(0.5)).collect();
        check(&t, x, z);
    }
    let circuit = random_clifford_circuit(3, 45, &mut rng);
    let t = CliffordTableau::from_circuit(&circuit).unwrap();
    let u = dense::circuit_unitary(&circuit).unwrap();
    let x = vec![true, false, true];
    let z = vec![false, true, true];
    let got = dense::pauli_matrix(&t.factorize_correction(&x, &z).unwrap()).unwrap();
    let byproduct = PauliString::from_bits(x, z, 0).unwrap();
    let want = conj(&u, &dense::pauli_matrix(&byproduct).unwrap());
    assert!(dense::max_abs_diff(&got, &want) < 1e-12);
}

#[test]
fn random_clifford_generator_contract() {
    let a = random_clifford_circuit(3, 45, &mut seeded(4));
    let b = random_clifford_circuit(3, 45, &mut seeded(4));
    assert_eq!(a, b);
    assert!(a.is_clifford());
    assert!(a
        .ops
        .iter()
        .all(|op| matches!(op.gate, Gate::H | Gate::S | Gate::Cnot | Gate::Cz)));
    assert!(random_clifford_circuit(3, 0, &mut seeded(4)).is_empty());
}

fn zk(n: usize, k: usize, neg: bool, monos: &[&[usize]]) -> ZkElement {
    ZkElement::from_monomials(n, k, neg, monos.iter().copied()).unwrap()
}

#[test]
fn zk_multiplication_examples() {
    let mut rng = seeded(1);
    let g = ZkElement::random(4, 3, &mut rng);
    assert!(g.multiply(&g).unwrap().is_identity());
    let z1 = zk(2, 1, false, &[&[0]]);
    let cz = zk(2, 2, false, &[&[0, 1]]);
    assert_eq!(z1.multiply(&cz).unwrap(), zk(2, 2, false, &[&[0], &[0, 1]]));
    let minus = zk(2, 0, true, &[]);
    assert!(minus.multiply(&minus).unwrap().is_identity());
    assert!(z1.multiply(&ZkElement::identity(3, 1)).is_err());
}

#[test]
fn zk_conjugation_examples() {
    let cz = zk(2, 2, false, &[&[0, 1]]);
    assert_eq!(cz.conjugate_by_x(&[0]).unwrap(), zk(2, 1, false, &[&[1]]));
    let z = zk(1, 1, false, &[&[0]]);
    assert_eq!(z.conjugate_by_x(&[0]).unwrap(), zk(1, 0, true, &[]));
    let ccz = zk(3, 3, false, &[&[0, 1, 2]]);
    assert_eq!(
        ccz.conjugate_by_x(&[0]).unwrap(),
        zk(3, 2, false, &[&[1, 2]])
    );

    let (xs, g_prime, g) = ZkElement::identity(2, 2).commute_x_left(&[1]).unwrap();
    assert_eq!(xs, PauliString::x_on(2, &[1]));
    assert!(g_prime.is_identity() && g.is_identity());
    let (xs, g_prime, g) = cz.commute_x_left(&[0]).unwrap();
    assert_eq!(xs, p("+;10;00"));
    assert_eq!(g_prime, zk(2, 1, false, &[&[1]]));
    assert_eq!(g, cz);
}

#[test]
fn zk_level_and_circuit_examples() {
    assert_eq!(ZkElement::identity(3, 3).level(), 0);
    assert_eq!(zk(3, 2, false, &[&[0], &[1, 2]]).level(), 2);
    assert_eq!(zk(3, 3, false, &[&[0, 1, 2]]).level(), 3);

    let (c, neg) = ZkElement::identity(2, 2).to_circuit();
    assert!(c.is_empty() && !neg);
    let (c, _) = zk(2, 2, false, &[&[0, 1]]).to_circuit();
    assert_eq!(c.ops.len(), 1);
    assert_eq!(c.ops[0].targets, vec![0, 1]);
    let g = zk(3, 3, false, &[&[0], &[0, 1, 2]]);
    let (c, neg) = g.to_circuit();
    assert_eq!(
        c.ops.iter().map(|o| o.targets.clone()).collect::<Vec<_>>(),
        vec![vec![0], vec![0, 1, 2]]
    );
    assert!(dense::max_abs_diff(&dense::circuit_unitary(&c).unwrap(), &zk_matrix(&g)) < 1e-15);
    assert!(!neg);
}

#[test]
fn zk_diagonal_examples() {
    assert_eq!(
        ZkElement::identity(1, 1).to_diagonal().unwrap(),
        vec![1.0, 1.0]
    );
    assert_eq!(
        zk(1, 1, false, &[&[0]]).to_diagonal().unwrap(),
        vec![1.0, -1.0]
    );
    assert_eq!(
        zk(2, 2, false, &[&[0, 1]]).to_diagonal().unwrap(),
        vec![1.0, 1.0, 1.0, -1.0]
    );
    assert!(ZkElement::identity(13, 1).to_diagonal().is_err());
}

#[test]
fn zk_text_round_trip() {
    let g = zk(3, 2, true, &[&[1], &[1, 2]]);
    assert_eq!(g.to_string(), "-;1;1,2");
    assert_eq!(ZkElement::parse("-;1;1,2", 3, 2).unwrap(), g);
    assert_eq!(ZkElement::identity(2, 2).to_string(), "+");
    assert!(ZkElement::parse("+;0,1,2", 3, 2).is_err());
}

#[test]
fn random_zk_contract() {
    let mut counts = [0usize; 4];
    let mut rng = seeded(3);
    for _ in 0..4000 {
        let g = ZkElement::random(1, 1, &mut rng);
        counts[usize::from(g.is_negative()) * 2 + g.monomials().len()] += 1;
    }
    assert!(
        counts
            .iter()
            .all(|&c| (c as f64 / 4000.0 - 0.25).abs() < 0.03),
        "{counts:?}"
    );
    assert_eq!(
        ZkElement::random(2, 2, &mut seeded(9)),
        ZkElement::random(2, 2, &mut seeded(9))
    );
    for _ in 0..100 {
        assert!(ZkElement::random(4, 2, &mut rng).level() <= 2);
    }
    assert_eq!(ZkElement::enumerate(2, 2).unwrap().len(), 16);
}

fn random_subset(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    (0..n).filter(|_| rng.random_bool(0.5)).collect()
}

#[test]
fn conjugation_lowers_level() {
    let mut rng = seeded(31);
    for _ in 0..1000 {
        let n = rng.random_range(1..=5);
        let k = rng.random_range(1..=4);
        let g = ZkElement::random(n, k, &mut rng);
        let s = random_subset(n, &mut rng);
        let gp = g.conjugate_by_x(&s).unwrap();
        assert!(gp.level() < k);
        assert!(gp.level() <= g.level().saturating_sub(1));
    }
}

#[test]
fn conjugation_dense_identities() {
    let mut rng = seeded(37);
    for _ in 0..1000 {
        let n = rng.random_range(1..=4);
        let k = rng.random_range(1..=4);
        let g = ZkElement::random(n, k, &mut rng);
        let s = random_subset(n, &mut rng);
        let (xs, gp, g2) = g.commute_x_left(&s).unwrap();
        let mx = dense::pauli_matrix(&xs).unwrap();
        let mg = zk_matrix(&g);
        let mgp = zk_matrix(&gp);
        let lhs = &mx * &mg * &mx * mg.adjoint();
        assert!(dense::max_abs_diff(&lhs, &mgp) < 1e-12);
        let left = &mg * &mx;
        let right = &mx * &mgp * zk_matrix(&g2);
        assert!(dense::max_abs_diff(&left, &right) < 1e-12);
    }
}

#[test]
fn derivative_matches_single_conjugation() {
    let mut rng = seeded(41);
    for _ in 0..300 {
        let n = rng.random_range(1..=5);
        let g = ZkElement::random(n, 4, &mut rng);
        for i in 0..n {
            let d = g.derivative(qprecomp::algebra::Monomial::single(i));
            let c = g.conjugate_by_single_x(i);
            assert_eq!(d, c);
            assert_eq!(d.to_diagonal().unwrap(), c.to_diagonal().unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn zk_group_laws(seed in any::<u64>(), n in 1usize..6, k in 1usize..5) {
        let mut rng = seeded(seed);
        let a = ZkElement::random(n, k, &mut rng);
        let b = ZkElement::random(n, k, &mut rng);
        let c = ZkElement::random(n, k, &mut rng);
        let ab_c = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let a_bc = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(&ab_c, &a_bc);
        prop_assert!(ab_c.level() <= k);
        prop_assert!(a.multiply(&a).unwrap().is_identity());
        prop_assert_eq!(a.multiply(&b).unwrap(), b.multiply(&a).unwrap());
    }

    #[test]
    fn zk_payload_bound(seed in any::<u64>(), n in 1usize..7, k in 1usize..5) {
        let g = ZkElement::random(n, k, &mut seeded(seed));
        let bound: u64 = (0..=k).map(|j| binomial(n, j)).sum::<u64>() + 1;
        prop_assert!(g.to_bitmap().len() as u64 <= bound);
        let text = g.to_string();
        prop_assert_eq!(ZkElement::parse(&text, n, k).unwrap(), g);
    }
}
