//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gave::certificates::{check_theorem1, theorem1_matrix};
use gave::matrixlab::{comparison_matrix, is_m_matrix, SparseMatrix};
use gave::problems::{
    generate_lattice, lcp_to_gave, sign_enumeration_oracle, GaveProblem, LatticeParams, LatticeVariant,
};
use gave::solvers::{
    max_plus, solve_max_based, solve_mn, solve_nms, solve_sign_reduced, AssumedSign, ReducedBackend,
    SolveReport, SolverConfig, SplittingStrategy,
};

const TABLE_SIZES: [usize; 2] = [50, 100];
const RES_TOL: f64 = 1e-6;
const SOLUTION_TOL: f64 = 1e-5;

fn report(id: u32, ok: bool, detail: &str) {
    println!("criterion {id}: {} {detail}", if ok { "PASS" } else { "FAIL" });
}

fn lattice(m: usize, variant: LatticeVariant) -> (GaveProblem, Vec<f64>) {
    let lcp = generate_lattice(LatticeParams { m, mu: 4.0, variant }).unwrap();
    let (p, w) = lcp_to_gave(&lcp);
    (p, w.unwrap().x_star)
}

fn max_err(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

struct Run {
    label: &'static str,
    n: usize,
    report: SolveReport,
    res: f64,
    err: f64,
}

fn table_runs(variant: LatticeVariant) -> Vec<Run> {
    let cfg = SolverConfig::default();
    let mut runs = Vec::new();
    for m in TABLE_SIZES {
        let (p, x_star) = lattice(m, variant);
        let reports = [
            ("M-1", solve_mn(&p, &cfg).unwrap()),
            ("M-2", solve_nms(&p, &cfg, &SplittingStrategy::GaussSeidel).unwrap()),
            ("M-3", solve_max_based(&p, &cfg).unwrap()),
        ];
        for (label, report) in reports {
            let res = p.residual(&report.x).unwrap();
            let err = max_err(&report.x, &x_star);
            runs.push(Run { label, n: m * m, report, res, err });
        }
    }
    runs
}

fn table_criterion(id: u32, variant: LatticeVariant) {
    let start = Instant::now();
    let runs = table_runs(variant);
    let elapsed = start.elapsed().as_secs_f64();
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for r in &runs {
        let it = r.report.iterations;
        let it_ok = match r.label {
            "M-1" => (16..=19).contains(&it),
            _ => it == 2,
        };
        let res_ok = r.report.converged && r.res < RES_TOL;
        summary.push(format!("{}@{}: IT={} RES={:.4e}", r.label, r.n, it, r.res));
        if !(it_ok && res_ok) {
            failures.push(format!("{}@{} IT={} RES={:.4e}", r.label, r.n, it, r.res));
        }
    }
    if elapsed >= 30.0 {
        failures.push(format!("runtime {elapsed:.1}s"));
    }
    let ok = failures.is_empty();
    report(id, ok, &format!("[{}] time={elapsed:.2}s failing=[{}]", summary.join(", "), failures.join(", ")));
    assert!(ok, "criterion {id} failing rows: {failures:?}");
}

#[test]
fn criterion_1_table1_iteration_counts() {
    table_criterion(1, LatticeVariant::Symmetric);
}

#[test]
fn criterion_2_table2_iteration_counts() {
    table_criterion(2, LatticeVariant::Nonsymmetric);
}

#[test]
fn criterion_3_gmres_on_reduced_system() {
    let cfg = SolverConfig::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for (variant, target) in [(LatticeVariant::Symmetric, 10usize), (LatticeVariant::Nonsymmetric, 12)] {
        let (p, _) = lattice(50, variant);
        let r = solve_sign_reduced(&p, &cfg, AssumedSign::Nonpositive, ReducedBackend::Gmres { restart: 20 }).unwrap();
        let res = p.residual(&r.x).unwrap();
        let within = r.iterations.abs_diff(target) <= 3;
        ok &= res < RES_TOL && within && r.sign_consistent == Some(true);
        detail.push(format!("{variant:?}: inner={} (target {target}) RES={res:.4e}", r.iterations));
    }
    report(3, ok, &detail.join(", "));
    assert!(ok);
}

#[test]
fn criterion_4_solution_accuracy() {
    let cfg = SolverConfig::default();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for variant in [LatticeVariant::Symmetric, LatticeVariant::Nonsymmetric] {
        for r in table_runs(variant).iter().filter(|r| r.report.converged) {
            worst = worst.max(r.err);
            checked += 1;
        }
        let (p, x_star) = lattice(50, variant);
        let g = solve_sign_reduced(&p, &cfg, AssumedSign::Nonpositive, ReducedBackend::Gmres { restart: 20 }).unwrap();
        if g.converged {
            worst = worst.max(max_err(&g.x, &x_star));
            checked += 1;
        }
    }
    let ok = checked > 0 && worst <= SOLUTION_TOL;
    report(4, ok, &format!("converged runs={checked} max |x - x*|_inf={worst:.3e}"));
    assert!(ok);
}

/// Strictly diagonally dominant `A`, small random `B`, rejected until
/// Theorem 1 holds for `Ω = diag(A)`.
fn certified_instance(rng: &mut ChaCha8Rng) -> (GaveProblem, SparseMatrix) {
    loop {
        let n = rng.random_range(1..=8usize);
        let mut a = vec![vec![0.0; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if i != j && rng.random_bool(0.6) {
                    *v = rng.random_range(-1.0..1.0);
                }
            }
            let off: f64 = row.iter().map(|v: &f64| v.abs()).sum();
            row[i] = off + rng.random_range(0.5..3.0);
        }
        let scale = rng.random_range(0.02..0.4);
        let b: Vec<Vec<f64>> =
            (0..n).map(|_| (0..n).map(|_| scale * rng.random_range(-1.0..1.0)).collect()).collect();
        let rhs: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let p = GaveProblem::new(
            SparseMatrix::from_dense_rows(&a).unwrap(),
            SparseMatrix::from_dense_rows(&b).unwrap(),
            rhs,
        )
        .unwrap();
        let omega = SparseMatrix::from_diagonal(&p.a().diagonal());
        if check_theorem1(&p, &omega).unwrap().holds {
            return (p, omega);
        }
    }
}

#[test]
fn criterion_5_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    for inst in 0..100 {
        let (p, _) = certified_instance(&mut rng);
        let sols = sign_enumeration_oracle(&p).unwrap();
        if sols.len() != 1 {
            failures.push(format!("instance {inst}: {} oracle solutions", sols.len()));
            continue;
        }
        for start in 0..10 {
            let x0: Vec<f64> = (0..p.dim()).map(|_| rng.random_range(-10.0..10.0)).collect();
            let cfg = SolverConfig { x0: Some(x0), tol: 1e-12, ..Default::default() };
            let r = solve_max_based(&p, &cfg).unwrap();
            let err = max_err(&r.x, &sols[0].x);
            if !r.converged || err > 1e-6 {
                failures.push(format!("instance {inst} start {start}: err={err:.3e}"));
            }
        }
    }
    let ok = failures.is_empty();
    report(5, ok, &format!("100 instances x 10 starts, failures={}", failures.len()));
    assert!(ok, "{failures:?}");
}

#[test]
fn criterion_6_componentwise_contraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0usize;
    let mut steps = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let (p, omega) = certified_instance(&mut rng);
        let x_star = sign_enumeration_oracle(&p).unwrap().remove(0).x;
        let s = theorem1_matrix(&p, &omega).unwrap();
        for _ in 0..10 {
            let x0: Vec<f64> = (0..p.dim()).map(|_| rng.random_range(-10.0..10.0)).collect();
            let cfg = SolverConfig { x0: Some(x0.clone()), tol: 1e-12, record_iterates: true, ..Default::default() };
            let r = solve_max_based(&p, &cfg).unwrap();
            let mut prev = x0;
            for next in &r.iterates {
                let e_prev: Vec<f64> = prev.iter().zip(&x_star).map(|(a, b)| (a - b).abs()).collect();
                let bound = s.mul_vec(&e_prev);
                for ((xn, xs), bd) in next.iter().zip(&x_star).zip(&bound) {
                    let gap = (xn - xs).abs() - bd;
                    worst = worst.max(gap);
                    if gap > 1e-10 {
                        violations += 1;
                    }
                }
                steps += 1;
                prev = next.clone();
            }
        }
    }
    let ok = violations == 0 && steps > 0;
    report(6, ok, &format!("iterations checked={steps} violations={violations} max(lhs - rhs)={worst:.3e}"));
    assert!(ok);
}

/// A random H-matrix: a strictly diagonally dominant matrix with random signs
/// and a random positive column scaling, so it need not be dominant itself.
fn random_h_matrix(rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let n = rng.random_range(1..=16usize);
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let mut off = 0.0;
        for j in 0..n {
            if i != j && rng.random_bool(0.5) {
                a[(i, j)] = rng.random_range(-2.0..2.0);
                off += a[(i, j)].abs();
            }
        }
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        a[(i, i)] = sign * (off + rng.random_range(0.1..2.0));
    }
    for j in 0..n {
        let c = rng.random_range(0.1..10.0);
        for i in 0..n {
            a[(i, j)] *= c;
        }
    }
    a
}

#[test]
fn criterion_7_lemma_inverse_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for _ in 0..100 {
        let a = random_h_matrix(&mut rng);
        let sparse = SparseMatrix::from_dense(&a);
        let cmp = comparison_matrix(&sparse);
        assert!(is_m_matrix(&cmp).holds(), "generator produced a non-H-matrix");
        let inv = a.clone().try_inverse().unwrap();
        let cmp_inv = cmp.to_dense().try_inverse().unwrap();
        for (x, y) in inv.iter().zip(cmp_inv.iter()) {
            let gap = x.abs() - y;
            worst = worst.max(gap);
            ok &= gap <= 1e-10;
        }
    }
    report(7, ok, &format!("100 H-matrices, max(|A^-1| - <A>^-1)={worst:.3e}"));
    assert!(ok);
}

#[test]
fn criterion_8_fixed_point_reformulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut identity_ok = true;
    let mut worst_gap: f64 = 0.0;
    let mut worst_sol: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=10usize);
        let dense = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
            (0..n).map(|_| (0..n).map(|_| rng.random_range(-3.0..3.0)).collect()).collect()
        };
        let a = SparseMatrix::from_dense_rows(&dense(&mut rng)).unwrap();
        let b = SparseMatrix::from_dense_rows(&dense(&mut rng)).unwrap();
        let omega = SparseMatrix::from_diagonal(&(0..n).map(|_| rng.random_range(0.1..5.0)).collect::<Vec<_>>());
        let x_star: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();

        for v in x.iter().chain(&x_star) {
            identity_ok &= 2.0 * max_plus(&[*v])[0] - v == v.abs();
        }

        // b chosen so that x* solves the instance exactly.
        let abs_star: Vec<f64> = x_star.iter().map(|v| v.abs()).collect();
        let rhs: Vec<f64> = a.mul_vec(&x_star).iter().zip(b.mul_vec(&abs_star)).map(|(p, q)| p - q).collect();
        let p = GaveProblem::new(a.clone(), b.clone(), rhs.clone()).unwrap();
        let big = a.add(&b).unwrap().add(&omega).unwrap();
        let b_norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        let fixed_point_res = |x: &[f64]| -> f64 {
            let lhs = big.mul_vec(x);
            let w = omega.mul_vec(x);
            let m = b.mul_vec(&max_plus(x));
            let r: f64 = (0..n).map(|i| (lhs[i] - w[i] - 2.0 * m[i] - rhs[i]).powi(2)).sum::<f64>().sqrt();
            if b_norm > 0.0 { r / b_norm } else { r }
        };
        let (g_star, f_star) = (p.residual(&x_star).unwrap(), fixed_point_res(&x_star));
        worst_sol = worst_sol.max(g_star).max(f_star);
        worst_gap = worst_gap.max((g_star - f_star).abs());
        let (g, f) = (p.residual(&x).unwrap(), fixed_point_res(&x));
        worst_gap = worst_gap.max((g - f).abs() / g.max(1.0));
    }
    let ok = identity_ok && worst_sol <= 1e-10 && worst_gap <= 1e-10;
    report(
        8,
        ok,
        &format!("identity exact={identity_ok} max residual at solutions={worst_sol:.3e} max formulation gap={worst_gap:.3e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_9_method_one_is_full_splitting() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut compared = 0usize;
    let mut lengths_agree = true;
    for _ in 0..50 {
        let n = rng.random_range(2..=40usize);
        let mut trip = Vec::new();
        let mut off = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.random_bool(0.2) {
                    let v = rng.random_range(-1.0..1.0);
                    off[i] += f64::abs(v);
                    trip.push((i, j, v));
                }
            }
        }
        for (i, o) in off.iter().enumerate() {
            trip.push((i, i, o + rng.random_range(1.0..4.0)));
        }
        let a = SparseMatrix::from_triplets(n, n, trip).unwrap();
        let mut b_trip: Vec<(usize, usize, f64)> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if rng.random_bool(0.15) {
                    b_trip.push((i, j, rng.random_range(-0.3..0.3)));
                }
            }
        }
        let b = SparseMatrix::from_triplets(n, n, b_trip).unwrap();
        let rhs: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let p = GaveProblem::new(a, b, rhs).unwrap();
        let cfg = SolverConfig { record_iterates: true, tol: 1e-12, k_max: 200, ..Default::default() };
        let mn = solve_mn(&p, &cfg).unwrap();
        let full = solve_nms(&p, &cfg, &SplittingStrategy::Full).unwrap();
        lengths_agree &= mn.iterates.len() == full.iterates.len();
        for (u, v) in mn.iterates.iter().zip(&full.iterates) {
            worst = worst.max(max_err(u, v));
            compared += 1;
        }
    }
    let ok = lengths_agree && worst <= 1e-14 && compared > 0;
    report(9, ok, &format!("50 instances, iterations compared={compared} max difference={worst:.3e}"));
    assert!(ok);
}
