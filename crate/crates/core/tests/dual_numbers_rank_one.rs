//! Rank-one homology of the dual numbers, checked against explicit chains.
//!
//! The printed generators `g = x x3 − 2 x1 x2`, `g1 = −2 x1 x2² + x x2 x3`
//! and `g2 = −x2 x3 − 4 x1 x4 + 2 x x5` are cycles, but the module they span
//! over `A = k[x]/x²` is not free: `x g = d(x1 x3)` and
//! `x g2 + g1 = 2 d(x1 x5)`. So `H_3` is one-dimensional (weight 5) and
//! `H_5` has dimension 1 in each of weights 7 and 8.

use drep_core::comm::{CommPoly, FreeCdga};
use drep_core::homology::betti;
use drep_core::presentation::builtin_resolution;
use drep_core::rep::rep_n;
use drep_core::scalar::int;
use drep_core::DEFAULT_CELL_BUDGET;

fn var(cdga: &FreeCdga, name: &str) -> CommPoly {
    let t = cdga.table();
    CommPoly::var(t, t.position(&format!("{name}.1.1")).unwrap())
}

fn prod(ps: &[&CommPoly]) -> CommPoly {
    ps[1..].iter().fold(ps[0].clone(), |acc, p| acc.mul(p).unwrap())
}

#[test]
fn printed_cycles_and_their_relations() {
    let alg = rep_n(&builtin_resolution("dual-numbers", 8).unwrap(), 1).unwrap();
    let r = alg.cdga();
    let [x, x1, x2, x3, x4, x5] = ["x", "x1", "x2", "x3", "x4", "x5"].map(|n| var(r, n));
    let g = prod(&[&x, &x3]).sub(&prod(&[&x1, &x2]).scale(&int(2))).unwrap();
    let g1 = prod(&[&x1, &x2, &x2])
        .scale(&int(-2))
        .add(&prod(&[&x, &x2, &x3]))
        .unwrap();
    let g2 = prod(&[&x2, &x3])
        .scale(&int(-1))
        .sub(&prod(&[&x1, &x4]).scale(&int(4)))
        .unwrap()
        .add(&prod(&[&x, &x5]).scale(&int(2)))
        .unwrap();
    for c in [&g, &g1, &g2] {
        assert!(r.d(c).unwrap().is_zero(), "{} is not a cycle", c.render());
    }
    assert_eq!(x.mul(&g).unwrap(), r.d(&prod(&[&x1, &x3])).unwrap());
    let lhs = x.mul(&g2).unwrap().add(&g1).unwrap();
    assert_eq!(lhs, r.d(&prod(&[&x1, &x5])).unwrap().scale(&int(2)));
}

#[test]
fn betti_numbers_match_the_relations() {
    let p = builtin_resolution("dual-numbers", 8).unwrap();
    let b = betti(&rep_n(&p, 1).unwrap().complex(8, DEFAULT_CELL_BUDGET).unwrap()).unwrap();
    assert_eq!(b.get(3, 5), 1);
    assert_eq!(b.get(3, 6), 0);
    assert_eq!(b.get(5, 7), 1);
    assert_eq!(b.get(5, 8), 1);
}
