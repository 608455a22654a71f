use qac_core::{Elem, FiniteField};

const SPECS: [&str; 12] = [
    "2", "3", "2^2", "5", "7", "2^3", "3^2", "2^4", "5^2", "3^3", "2^5", "7^2",
];

fn fields() -> impl Iterator<Item = FiniteField> {
    SPECS.iter().map(|s| FiniteField::from_spec(s).unwrap())
}

#[test]
fn ring_axioms_on_pairs() {
    for f in fields() {
        let els: Vec<Elem> = f.elements().collect();
        for &a in &els {
            assert_eq!(f.add(a, Elem::ZERO), a);
            assert_eq!(f.mul(a, Elem::ONE), a);
            assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE, "{f}: inverse of {a}");
                assert_eq!(f.pow(a, f.order() as u64 - 1), Elem::ONE);
            }
            for &b in &els {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.sub(f.add(a, b), b), a);
            }
        }
    }
}

#[test]
fn associativity_and_distributivity_on_triples() {
    for f in fields() {
        let els: Vec<Elem> = f.elements().collect();
        for &a in &els {
            for &b in &els {
                let ab = f.mul(a, b);
                let a_plus_b = f.add(a, b);
                for &c in &els {
                    assert_eq!(f.mul(ab, c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.add(a_plus_b, c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(ab, f.mul(a, c)));
                }
            }
        }
    }
}

#[test]
fn frobenius_is_a_ring_homomorphism() {
    for f in fields() {
        let els: Vec<Elem> = f.elements().collect();
        for &a in &els {
            assert_eq!(f.frobenius(a), f.pow(a, f.characteristic() as u64));
            for &b in &els {
                assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
                assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
            }
        }
    }
}

#[test]
fn subfields_are_closed() {
    for f in fields() {
        for t in (1..=f.degree()).filter(|t| f.degree() % t == 0) {
            let sub = f.subfield_elements(t).unwrap();
            assert_eq!(sub.len() as u32, f.characteristic().pow(t));
            for &a in &sub {
                for &b in &sub {
                    assert!(sub.contains(&f.add(a, b)), "{f}: subfield {t} not closed");
                    assert!(sub.contains(&f.mul(a, b)), "{f}: subfield {t} not closed");
                }
            }
        }
    }
}
