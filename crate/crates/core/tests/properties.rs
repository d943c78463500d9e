use fedosov::parse::{parse_star_function, parse_weyl};
use fedosov::random;
use fedosov::rational::Rational;
use fedosov::render::{render_star, render_weyl};
use fedosov::weyl::{delta, delta_inv};
use fedosov::AbelianConnection;
use proptest::prelude::*;

const NW: usize = 6;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn delta_squares_vanish(seed in any::<u64>()) {
        let a = random::weyl(&mut random::rng(seed), 2, NW, 6, &[0, 1, 2]);
        prop_assert!(delta(&delta(&a)).is_zero());
        prop_assert!(delta_inv(&delta_inv(&a)).is_zero());
    }

    #[test]
    fn hodge_decomposition(seed in any::<u64>()) {
        let a = random::weyl(&mut random::rng(seed), 2, NW, 6, &[0, 1, 2]);
        let up = a.with_n_work(NW + 1);
        let a00 = a.filter(|k| k.y_degree() == 0 && k.dx == 0);
        let rebuilt = &(&delta(&delta_inv(&up)) + &delta_inv(&delta(&up))).with_n_work(NW) + &a00;
        prop_assert_eq!(rebuilt, a);
    }

    #[test]
    fn circ_is_associative(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let [a, b, c] = [0; 3].map(|_| random::weyl(&mut rng, 2, NW, 3, &[0, 1]));
        prop_assert_eq!(a.circ(&b).circ(&c), a.circ(&b.circ(&c)));
    }

    #[test]
    fn weyl_render_round_trips(seed in any::<u64>()) {
        let a = random::weyl(&mut random::rng(seed), 2, NW, 5, &[0, 1, 2]);
        let text = render_weyl(&a).text;
        prop_assert_eq!(parse_weyl(&text, 2, NW).unwrap(), a);
    }

    #[test]
    fn star_render_round_trips(seed in any::<u64>()) {
        let f = random::star_function(&mut random::rng(seed), 2, 3, 4);
        prop_assert_eq!(parse_star_function(&render_star(&f).text).unwrap(), f);
    }

    #[test]
    fn flat_star_is_associative(seed in any::<u64>()) {
        let conn = AbelianConnection::trivial(2, NW, 2).unwrap();
        let mut rng = random::rng(seed);
        let [f, g, h] = [0; 3].map(|_| random::classical(&mut rng, 2, 3));
        let star = |a, b| conn.star_product(a, b).unwrap();
        let (fg, gh) = (star(&f, &g), star(&g, &h));
        prop_assert_eq!(star(&fg, &h), star(&f, &gh));
    }

    #[test]
    fn rational_field_laws(a in -10_000i64..10_000, b in 1i64..500, c in -10_000i64..10_000, d in 1i64..500) {
        let (x, y) = (Rational::ratio(a, b), Rational::ratio(c, d));
        prop_assert_eq!(&(&x + &y) - &y, x.clone());
        prop_assert_eq!(&x * &y, &y * &x);
        if c != 0 {
            prop_assert_eq!(&(&x * &y) * &y.recip(), x.clone());
        }
        prop_assert_eq!(x.to_big() + y.to_big(), (&x + &y).to_big());
    }
}
