//! Exact multivector calculus with coefficients `c * y^a * exp(<l,x>) * f^e`.

mod coeff;
mod multivector;
mod parse;

pub use coeff::{CoeffSum, CoeffTerm, DerivationTable, Monomial, Signature, Symbol};
pub use multivector::{pfaffian_f64, Multivector};
pub use parse::{parse_coeff, parse_multivector};

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use proptest::prelude::*;

    use super::*;
    use crate::exact::{q, qf, Rational};

    fn sig(n_y: usize, n_x: usize) -> Arc<Signature> {
        Arc::new(Signature::new(n_y, n_x, vec![]))
    }

    fn mv(s: &Arc<Signature>, text: &str) -> Multivector {
        parse_multivector(s.clone(), text).unwrap()
    }

    fn none(s: &Signature) -> DerivationTable {
        DerivationTable::empty(s)
    }

    #[test]
    fn wedge_signs() {
        let s = sig(4, 0);
        let d0 = mv(&s, "y0 : 1");
        assert!(d0.wedge(&d0).unwrap().is_zero());
        let a = mv(&s, "y0^y1 : 1");
        let b = mv(&s, "y2^y3 : 1");
        assert_eq!(a.wedge(&b).unwrap(), mv(&s, "y0^y1^y2^y3 : 1"));
        assert_eq!(mv(&s, "y1^y0 : 1"), mv(&s, "y0^y1 : -1"));
        let c = mv(&s, "y1 : 1").wedge(&mv(&s, "y0^y2 : 1")).unwrap();
        assert_eq!(c, mv(&s, "y0^y1^y2 : -1"));
    }

    #[test]
    fn schouten_on_functions_and_fields() {
        let s = sig(2, 1);
        let t = none(&s);
        // [z d_z, z^a] = a z^a
        let e = mv(&s, "y0 : y0");
        let f = Multivector::function(s.clone(), parse_coeff(&s, "y0^3").unwrap());
        assert_eq!(e.schouten(&f, &t).unwrap(), f.scale(&q(3)));
        // Lie bracket [y0 d0, y1^2 d1] = 0 and [y1 d0, y0 d1] = y1 d1 - y0 d0
        assert!(mv(&s, "y0 : y0").schouten(&mv(&s, "y1 : y1^2"), &t).unwrap().is_zero());
        let lb = mv(&s, "y0 : y1").schouten(&mv(&s, "y1 : y0"), &t).unwrap();
        assert_eq!(lb, mv(&s, "y1 : y1\ny0 : -y0"));
        // [d_x, exp(2x)] = 2 exp(2x)
        let g = Multivector::function(s.clone(), parse_coeff(&s, "exp(2*x)").unwrap());
        assert_eq!(mv(&s, "x : 1").schouten(&g, &t).unwrap(), g.scale(&q(2)));
        // constant-coefficient bivector commutes with itself
        let p = mv(&s, "y0^y1 : 3\ny0^x : -1/2");
        assert!(p.schouten(&p, &t).unwrap().is_zero());
    }

    #[test]
    fn hamiltonian_matches_bracket_with_exponential() {
        let s = sig(3, 1);
        let t = none(&s);
        let pi = mv(&s, "y0^y1 : -y0*y1\ny0^x : 3*y0\ny2^x : -y2*exp(x)");
        let u = pi.hamiltonian_field(0).unwrap();
        assert_eq!(u, mv(&s, "y0 : 3*y0\ny2 : -y2*exp(x)"));
        let ex = Multivector::function(s.clone(), parse_coeff(&s, "exp(x)").unwrap());
        let lhs = pi.schouten(&ex, &t).unwrap();
        assert_eq!(lhs, u.mul_coeff(&parse_coeff(&s, "exp(x)").unwrap()));
        let sym = mv(&sig(2, 1), "y0^y1 : 1");
        assert!(sym.hamiltonian_field(0).unwrap().is_zero());
    }

    #[test]
    fn symbols_use_the_table() {
        let s = Arc::new(Signature::new(1, 1, vec![Symbol::invertible("xi"), Symbol::constant("eps")]));
        let mut t = DerivationTable::empty(&s);
        t.set(0, 0, parse_coeff(&s, "xi*exp(x)").unwrap());
        let c = parse_coeff(&s, "eps^2*xi^-1*y0").unwrap();
        let d = c.derivative(&s, 1, &t).unwrap();
        assert_eq!(d, parse_coeff(&s, "-eps^2*xi^-1*exp(x)*y0").unwrap());
        let bare = DerivationTable::empty(&s);
        assert!(c.derivative(&s, 1, &bare).is_err());
    }

    #[test]
    fn render_roundtrip() {
        let s = Arc::new(Signature::new(3, 2, vec![Symbol::invertible("xi"), Symbol::function("eta")]));
        let text = "y0^y1 : -1/8*y0*y1*exp(2*x1-6*x2)*xi^-1 + 3*eta^2\ny2^x2 : y2*exp(-x1/2)";
        let m = parse_multivector(s.clone(), text).unwrap();
        let again = parse_multivector(s.clone(), &m.render()).unwrap();
        assert_eq!(m, again);
        assert!(m.render().contains("exp(-1/2*x1)"));
        assert!(parse_coeff(&s, "eta^-1").is_err());
        assert!(parse_coeff(&s, "w").is_err());
        assert!(parse_coeff(&s, "(y0 + 1)^2").unwrap() == parse_coeff(&s, "y0^2 + 2*y0 + 1").unwrap());
    }

    #[test]
    fn substitution() {
        let s = Signature::new(1, 0, vec![Symbol::invertible("xi"), Symbol::function("eta")]);
        let c = parse_coeff(&s, "xi^-2*y0 + eta*xi").unwrap();
        let half = CoeffSum::constant(&s, qf(1, 2));
        let r = c.substitute(&s, 0, &half).unwrap().substitute(&s, 1, &CoeffSum::zero()).unwrap();
        assert_eq!(r, parse_coeff(&s, "4*y0").unwrap());
    }

    #[test]
    fn pfaffian_small_cases() {
        let s = sig(5, 0);
        let pi = mv(&s, "y0^y1 : 1\ny2^y3 : 1");
        assert_eq!(pi.pfaffian().unwrap(), parse_coeff(&s, "2*y4").unwrap());
        assert!(mv(&sig(2, 0), "y0^y1 : 1").pfaffian().is_err());
    }

    #[test]
    fn pfaffian_matches_bordered_matrix() {
        let s = sig(4, 1);
        let pi = mv(&s, "y0^y1 : -2*y0*y1\ny1^y2 : y1*y2*exp(x)\ny0^y3 : 3*y0*y3\ny2^x : y2\ny3^x : -y3\ny1^y3 : y2^2");
        let y = [1.3, -0.7, 2.1, 0.4];
        let x = [0.3];
        let mut a = vec![vec![0.0; 6]; 6];
        for (idx, v) in pi.eval(&y, &x, &[]) {
            a[idx[0]][idx[1]] = v;
            a[idx[1]][idx[0]] = -v;
        }
        for (i, &yi) in y.iter().enumerate() {
            a[i][5] = yi;
            a[5][i] = -yi;
        }
        // top coefficient of pi^k ^ E is k! Pf of the bordered matrix, here k = 2
        let direct = pi.pfaffian().unwrap().eval(&y, &x, &[]);
        assert!((direct - 2.0 * pfaffian_f64(&a)).abs() < 1e-10, "{direct}");
    }

    #[test]
    fn chart_restriction() {
        let s = sig(3, 0);
        let pi = mv(&s, "y1^y2 : y1*y2\ny0^y1 : y0*y1");
        let chart = pi.to_chart(0).unwrap();
        // y1 y2 d1^d2 -> z1 z2; y0 y1 d0^d1 -> -(z1 d1 + z2 d2)^ z1 d1 = -z1 z2 d2^d1 = z1 z2 d1^d2
        let cs = Arc::new({
            let mut c = Signature::new(2, 0, vec![]);
            c.y_name = 'z';
            c
        });
        assert_eq!(chart, parse_multivector(cs, "z0^z1 : 2*z0*z1").unwrap());
        assert!(mv(&s, "y0 : 1").to_chart(0).is_err());
    }

    fn arb_mv(degree: usize) -> impl Strategy<Value = Multivector> {
        let s = sig(2, 1);
        prop::collection::vec(
            (
                prop::sample::subsequence(vec![0usize, 1, 2], degree),
                -3i64..=3,
                prop::collection::vec(0i64..=2, 2),
                -1i64..=1,
            ),
            1..=3,
        )
        .prop_map(move |terms| {
            let mut m = Multivector::zero(s.clone());
            for (idx, c, ye, l) in terms {
                let mut mono = Monomial::one(&s);
                mono.y = ye;
                mono.lin = vec![Rational::from_integer(l.into())];
                let coeff = CoeffSum::term(q(c), mono);
                m = m.add(&Multivector::basis(s.clone(), &idx, coeff).unwrap()).unwrap();
            }
            m
        })
    }

    fn sign(e: i64) -> Rational {
        if e.rem_euclid(2) == 0 {
            q(1)
        } else {
            q(-1)
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn graded_antisymmetry(
            (p, r, a, b) in (0usize..=2, 0usize..=2).prop_flat_map(|(p, r)| (Just(p), Just(r), arb_mv(p), arb_mv(r)))
        ) {
            let t = none(a.signature());
            let ab = a.schouten(&b, &t).unwrap();
            let ba = b.schouten(&a, &t).unwrap();
            let s = sign((p as i64 - 1) * (r as i64 - 1));
            prop_assert_eq!(ab.add(&ba.scale(&s)).unwrap().is_zero(), true);
        }

        #[test]
        fn graded_jacobi(a in arb_mv(2), b in arb_mv(1), c in arb_mv(2)) {
            let t = none(a.signature());
            let (da, db, dc) = (2i64, 1i64, 2i64);
            let br = |x: &Multivector, y: &Multivector| x.schouten(y, &t).unwrap();
            let j = br(&a, &br(&b, &c)).scale(&sign((da - 1) * (dc - 1)))
                .add(&br(&b, &br(&c, &a)).scale(&sign((db - 1) * (da - 1)))).unwrap()
                .add(&br(&c, &br(&a, &b)).scale(&sign((dc - 1) * (db - 1)))).unwrap();
            prop_assert!(j.is_zero());
        }

        #[test]
        fn jacobi_with_functions(a in arb_mv(1), b in arb_mv(2), f in arb_mv(0)) {
            let t = none(a.signature());
            let br = |x: &Multivector, y: &Multivector| x.schouten(y, &t).unwrap();
            // degrees 1, 2, 0
            let j = br(&a, &br(&b, &f))
                .add(&br(&b, &br(&f, &a))).unwrap()
                .sub(&br(&f, &br(&a, &b))).unwrap();
            prop_assert!(j.is_zero());
        }

        #[test]
        fn wedge_associative_and_graded_commutative(a in arb_mv(1), b in arb_mv(1), c in arb_mv(2)) {
            let ab_c = a.wedge(&b).unwrap().wedge(&c).unwrap();
            let a_bc = a.wedge(&b.wedge(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            prop_assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap().scale(&q(-1)));
            prop_assert_eq!(a.wedge(&c).unwrap(), c.wedge(&a).unwrap());
        }
    }
}
