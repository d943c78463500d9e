//! Engine output against frozen values and the closed forms in `reference`.

use fedosov::abelian::central_function;
use fedosov::parse::{parse_poly, parse_star_function};
use fedosov::reference;
use fedosov::render::{render_star, render_weyl};
use fedosov::{AbelianConnection, Chart, Frame, Poly, StarFunction, TrivializationMap};

fn p(s: &str) -> Poly {
    parse_poly(s).unwrap()
}

fn g111(n_work: usize) -> Chart {
    Chart::from_entries(2, n_work, 2, &[([0, 0, 0], p("x2"))]).unwrap()
}

fn generic() -> Chart {
    Chart::from_entries(
        2,
        6,
        2,
        &[
            ([0, 0, 0], p("x2 + x1^2")),
            ([0, 0, 1], p("x1 - 2 x2^2")),
            ([0, 1, 1], p("1 + x1 x2")),
            ([1, 1, 1], p("3 x1 - x2")),
        ],
    )
    .unwrap()
}

#[test]
fn r_for_single_gamma_component() {
    let conn = AbelianConnection::build(&g111(6));
    // leading term (1/8) R_ijkl y^i y^j y^k dx^l
    assert_eq!(
        render_weyl(&conn.r().degree_part(3)).text,
        "-(1/8) y1^3 dx2 + (1/8) y1^2 y2 dx1"
    );
    assert_eq!(
        render_weyl(conn.r()).text,
        "-(1/8) y1^3 dx2 + (1/8) y1^2 y2 dx1 - (1/128) y1^5 dx2 + (1/128) y1^4 y2 dx1"
    );
}

#[test]
fn flat_star_of_coordinates() {
    let conn = AbelianConnection::trivial(2, 6, 2).unwrap();
    let f = parse_star_function("x1").unwrap();
    let g = parse_star_function("x2").unwrap();
    assert_eq!(
        render_star(&conn.star_product(&f, &g).unwrap()).text,
        "x1 x2 + (1/2 I) h"
    );
    assert_eq!(
        render_star(&conn.star_product(&g, &f).unwrap()).text,
        "x1 x2 - (1/2 I) h"
    );
}

#[test]
fn hamiltonian_single_component() {
    let conn = AbelianConnection::build(&g111(5));
    let h = TrivializationMap::build(&conn).hamiltonian();
    assert_eq!(
        render_weyl(&h).text,
        "-(1/6) x2 y1^3 - (1/24) y1^3 y2 - (1/240) x2 t y1^5"
    );
}

#[test]
fn hamiltonian_matches_closed_form() {
    let chart = generic();
    let conn = AbelianConnection::build(&chart);
    let h = TrivializationMap::build(&conn).hamiltonian();
    let closed = reference::hamiltonian_closed_form(&chart, 6);
    assert!((&h.up_to_degree(5) - &closed.up_to_degree(5)).is_zero());
}

#[test]
fn trivialization_matches_closed_form() {
    let chart = generic();
    let conn = AbelianConnection::build(&chart);
    let triv = TrivializationMap::build(&conn);
    let trivial = AbelianConnection::trivial(2, 6, 2).unwrap();
    for a0 in ["x1", "x1^2", "x1 x2", "x1^2 x2", "x2^3 - x1 x2"] {
        let a0 = p(a0);
        let f = StarFunction::from_poly(a0.clone());
        let up = central_function(&triv.apply_t_inv(&trivial.quantize(&f)).unwrap(), 2);
        let down = central_function(&triv.apply_t(&conn.quantize(&f)).unwrap(), 2);
        let corr = reference::trivialization_correction(&chart, &a0);
        assert_eq!(
            up,
            StarFunction::new(vec![a0.clone(), Poly::zero(), corr.clone()])
        );
        assert_eq!(down, StarFunction::new(vec![a0, Poly::zero(), -corr]));
    }
}

#[test]
fn lambda_and_derivations_match_closed_forms() {
    for chart in [g111(6), generic()] {
        let conn = AbelianConnection::build(&chart);
        let frame = Frame::for_connection(&conn).unwrap();
        for i in 0..2 {
            assert_eq!(
                frame.lambda(i).unwrap(),
                &reference::lambda_closed_form(&chart, i)
            );
            for f in ["x1^3 x2", "x2^4 + x1", "x1 x2"] {
                let f = p(f);
                let xf = frame
                    .derive(i, &StarFunction::from_poly(f.clone()))
                    .unwrap();
                let want = StarFunction::new(vec![
                    f.diff_x(i),
                    Poly::zero(),
                    reference::derivation_correction(&chart, i, &f),
                ]);
                assert_eq!(xf, want);
            }
        }
    }
}

#[test]
fn flat_star_is_moyal() {
    let conn = AbelianConnection::trivial(2, 8, 3).unwrap();
    for (f, g) in [
        ("x1^3", "x2^3"),
        ("x1 x2^2", "x1^2 + x2"),
        ("3 x2^4", "x1^4"),
    ] {
        let f = parse_star_function(f).unwrap();
        let g = parse_star_function(g).unwrap();
        assert_eq!(
            conn.star_product(&f, &g).unwrap(),
            reference::moyal_base(&f, &g, 2, 3)
        );
    }
}
