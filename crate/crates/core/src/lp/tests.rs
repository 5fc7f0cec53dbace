use super::*;
use crate::stream::stream_rng;
use rand::Rng;

fn box_lp(objective: Vec<f64>, bounds: Vec<(f64, f64)>) -> LinearProgram {
    LinearProgram::minimize(objective).with_bounds(bounds)
}

/// Random LP with a known interior point, so it is feasible and bounded.
fn random_bounded_lp(n: usize, rows: usize, seed: u64) -> LinearProgram {
    let mut rng = stream_rng(&["test", "random-lp"], seed);
    let bounds: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let lo = rng.gen_range(-3.0..0.0);
            let hi = rng.gen_range(0.5..4.0);
            (lo, hi)
        })
        .collect();
    let center: Vec<f64> = bounds.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
    let objective: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let mut lp = box_lp(objective, bounds);
    for _ in 0..rows {
        let coeffs: Vec<(usize, f64)> = (0..n)
            .filter_map(|j| {
                if rng.gen_bool(0.7) {
                    Some((j, rng.gen_range(-2.0..2.0)))
                } else {
                    None
                }
            })
            .collect();
        if coeffs.is_empty() {
            continue;
        }
        let at_center: f64 = coeffs.iter().map(|&(j, a)| a * center[j]).sum();
        let kind = rng.gen_range(0..3);
        match kind {
            0 => lp.push_constraint(coeffs, Sense::Le, at_center + rng.gen_range(0.2..2.0)),
            1 => lp.push_constraint(coeffs, Sense::Ge, at_center - rng.gen_range(0.2..2.0)),
            _ => lp.push_constraint(coeffs, Sense::Eq, at_center),
        }
    }
    lp
}

#[test]
fn single_active_bound() {
    // min x s.t. x >= 3, x in [0, inf)
    let mut lp = LinearProgram::minimize(vec![1.0]);
    lp.push_constraint(vec![(0, 1.0)], Sense::Ge, 3.0);
    let sol = solve_lp(&lp, 1e-6).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!((sol.primal[0] - 3.0).abs() < 1e-9);
    assert!((sol.objective - 3.0).abs() < 1e-9);
}

#[test]
fn contradictory_constraints_infeasible() {
    // min 0 s.t. x <= -1, x >= 0
    let mut lp = LinearProgram::minimize(vec![0.0]);
    lp.push_constraint(vec![(0, 1.0)], Sense::Le, -1.0);
    let sol = solve_lp(&lp, 1e-6).unwrap();
    assert_eq!(sol.status, LpStatus::Infeasible);
    assert!(sol.primal.is_empty() && sol.dual.is_empty());
}

#[test]
fn unbounded_detected() {
    let mut lp = LinearProgram::minimize(vec![-1.0]);
    lp.push_constraint(vec![(0, -1.0)], Sense::Le, 0.0);
    let sol = solve_lp(&lp, 1e-6).unwrap();
    assert_eq!(sol.status, LpStatus::Unbounded);
}

#[test]
fn maximize_flips_sign() {
    // max 2x + 3y over the unit box.
    let mut lp = box_lp(vec![2.0, 3.0], vec![(0.0, 1.0), (0.0, 1.0)]);
    lp.sense = ObjSense::Maximize;
    let sol = solve_lp(&lp, 1e-6).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!((sol.objective - 5.0).abs() < 1e-9);
    assert!((sol.dual_objective - 5.0).abs() < 1e-6);
}

#[test]
fn free_variable_handled() {
    // min x + y, x free, y in [0, inf), x + y >= 2, x >= -5 via row.
    let mut lp = LinearProgram::minimize(vec![1.0, 1.0])
        .with_bounds(vec![(f64::NEG_INFINITY, f64::INFINITY), (0.0, f64::INFINITY)]);
    lp.push_constraint(vec![(0, 1.0), (1, 1.0)], Sense::Ge, 2.0);
    lp.push_constraint(vec![(0, 1.0)], Sense::Ge, -5.0);
    let sol = solve_lp(&lp, 1e-6).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!((sol.objective - 2.0).abs() < 1e-8);
}

#[test]
fn random_lps_match_vertex_oracle() {
    // The derived oracle: the simplex optimum must equal the best vertex.
    for seed in 0..60 {
        let lp = random_bounded_lp(5, 4, seed);
        let sol = solve_lp(&lp, 1e-6).unwrap();
        let vertices = enumerate_vertices(&lp).unwrap();
        match sol.status {
            LpStatus::Optimal => {
                let best = vertices
                    .iter()
                    .map(|(_, o)| *o)
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    (sol.objective - best).abs() <= 1e-6 * (1.0 + best.abs()),
                    "seed {seed}: simplex {} vs vertex oracle {best}",
                    sol.objective
                );
            }
            LpStatus::Infeasible => assert!(vertices.is_empty(), "seed {seed}"),
            LpStatus::Unbounded => panic!("seed {seed}: boxed LP cannot be unbounded"),
        }
    }
}

#[test]
fn strong_duality_and_complementary_slackness() {
    for seed in 100..140 {
        let lp = random_bounded_lp(6, 5, seed);
        let sol = solve_lp(&lp, 1e-6).unwrap();
        if sol.status != LpStatus::Optimal {
            continue;
        }
        let gap = (sol.objective - sol.dual_objective).abs();
        assert!(
            gap <= 1e-6 * (1.0 + sol.objective.abs()),
            "seed {seed}: duality gap {gap}"
        );
        for (i, row) in lp.constraints.iter().enumerate() {
            if row.sense == Sense::Eq {
                continue;
            }
            let slack = row.rhs - row.lhs(&sol.primal);
            assert!(
                (sol.dual[i] * slack).abs() <= 1e-6 * (1.0 + sol.objective.abs()),
                "seed {seed}: row {i} dual {} slack {slack}",
                sol.dual[i]
            );
        }
    }
}

#[test]
fn dual_solves_equality_form() {
    // min q'y s.t. Wy = h, y >= 0: check W'pi <= q and q'y* = pi'h.
    let mut rng = stream_rng(&["test", "dual"], 3);
    for _ in 0..20 {
        let (m, n) = (3, 6);
        let w: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..2.0)).collect())
            .collect();
        let y0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
        let h: Vec<f64> = w
            .iter()
            .map(|row| row.iter().zip(&y0).map(|(a, y)| a * y).sum())
            .collect();
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
        let mut lp = LinearProgram::minimize(q.clone());
        for i in 0..m {
            let coeffs: Vec<(usize, f64)> =
                (0..n).filter(|&j| w[i][j] != 0.0).map(|j| (j, w[i][j])).collect();
            lp.push_constraint(coeffs, Sense::Eq, h[i]);
        }
        let sol = solve_lp(&lp, 1e-6).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        let pi_h: f64 = sol.dual.iter().zip(&h).map(|(p, hv)| p * hv).sum();
        assert!((pi_h - sol.objective).abs() <= 1e-6 * (1.0 + sol.objective.abs()));
        for j in 0..n {
            let wtpi: f64 = (0..m).map(|i| w[i][j] * sol.dual[i]).sum();
            assert!(wtpi <= q[j] + 1e-6, "dual infeasible at column {j}");
        }
    }
}

#[test]
fn deterministic_across_runs() {
    let lp = random_bounded_lp(6, 5, 42);
    let a = solve_lp(&lp, 1e-6).unwrap();
    let b = solve_lp(&lp, 1e-6).unwrap();
    assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    for (x, y) in a.primal.iter().zip(&b.primal) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
    for (x, y) in a.dual.iter().zip(&b.dual) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
}

#[test]
fn unit_box_vertices() {
    let lp = box_lp(vec![1.0, 1.0], vec![(0.0, 1.0), (0.0, 1.0)]);
    let vertices = enumerate_vertices(&lp).unwrap();
    assert_eq!(vertices.len(), 4);
    let best = vertices.iter().min_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap();
    assert_eq!(best.0, vec![0.0, 0.0]);
    assert_eq!(best.1, 0.0);
}

#[test]
fn standard_simplex_has_three_vertices() {
    let mut lp = box_lp(vec![1.0, 2.0, 3.0], vec![(0.0, f64::INFINITY); 3]);
    lp.push_constraint(vec![(0, 1.0), (1, 1.0), (2, 1.0)], Sense::Eq, 1.0);
    let vertices = enumerate_vertices(&lp).unwrap();
    assert_eq!(vertices.len(), 3);
}

#[test]
fn vertex_guard_rejects_large() {
    let lp = box_lp(vec![0.0; 13], vec![(0.0, 1.0); 13]);
    assert!(matches!(enumerate_vertices(&lp), Err(LpError::TooLarge(13))));
}

#[test]
fn vertex_detects_recession() {
    // x - y = 0 with x, y >= 0 is an unbounded ray.
    let mut lp = box_lp(vec![1.0, 1.0], vec![(0.0, f64::INFINITY), (0.0, f64::INFINITY)]);
    lp.push_constraint(vec![(0, 1.0), (1, -1.0)], Sense::Eq, 0.0);
    assert!(matches!(enumerate_vertices(&lp), Err(LpError::UnboundedRegion)));
}

#[test]
fn interchange_round_trip() {
    let mut lp = random_bounded_lp(4, 3, 9);
    lp.objective_offset = 2.75;
    let text = write_lp_string(&lp);
    let back = read_lp_str(&text).unwrap();
    assert_eq!(lp, back);
}

#[test]
fn interchange_rejects_integer_section() {
    let text = "min: 1*x0\nbounds:\nx0 in [0, 1]\nintegers: x0\n";
    assert!(read_lp_str(text).is_err());
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn round_trip_is_exact(seed in 0u64..10_000) {
            let lp = random_bounded_lp(5, 3, seed);
            let text = write_lp_string(&lp);
            let back = read_lp_str(&text).unwrap();
            prop_assert_eq!(lp, back);
        }

        #[test]
        fn optimal_solutions_are_feasible(seed in 0u64..10_000) {
            let lp = random_bounded_lp(4, 3, seed);
            let sol = solve_lp(&lp, 1e-6).unwrap();
            if sol.status == LpStatus::Optimal {
                prop_assert!(lp.max_violation(&sol.primal) <= 1e-7 * 10.0);
                let gap = (sol.objective - sol.dual_objective).abs();
                prop_assert!(gap <= 1e-6 * (1.0 + sol.objective.abs()));
            }
        }
    }
}
