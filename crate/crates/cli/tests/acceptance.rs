//! Acceptance gate. Runs every criterion at its stated tolerance, prints
//! one PASS/FAIL line each and exits nonzero if any fails. Reference values
//! come from oracles written here against nalgebra, independent of the
//! library's own matrix, Wigner and conditioning code.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::Rng;

use qdiscord::dv::{
    condition_on_povm, discord_estimate_2q, generate_maximally_entangled, generate_zero_discord, reconstruct_joint,
    verify_commutativity, Verdict,
};
use qdiscord::gaussian::{
    peak, peak_coincidence_test, random_physical_state, standard_form, validate_physical, zero_discord_decision,
    GaussianState, StandardForm,
};
use qdiscord::phase_space::{
    char_commutator, gaussian_char, gaussian_wigner, moyal_commutator, wigner_from_char, wigner_from_fock, FockOperator,
    GridGeometry, WignerGrid,
};
use qdiscord::povm::{default_ic_povm, dual_frame, random_ic_povm, sic_qubit, Povm};
use qdiscord::random::{random_density_matrix, seeded};
use qdiscord::tomo::{estimate_conditionals, sample_joint, significant_commutativity_with, SignificanceOptions};
use qdiscord::{ComplexMatrix, DensityOperator};

type Outcome = Result<String, String>;
type CMat = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn dense(m: &ComplexMatrix) -> CMat {
    CMat::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Tr_A[(M ⊗ I) ρ] / p, summed element by element.
fn oracle_conditional(rho: &CMat, m: &CMat, da: usize, db: usize) -> Option<CMat> {
    let mut out = CMat::zeros(db, db);
    for i in 0..db {
        for j in 0..db {
            let mut s = c(0.0);
            for a in 0..da {
                for a2 in 0..da {
                    s += m[(a, a2)] * rho[(a2 * db + i, a * db + j)];
                }
            }
            out[(i, j)] = s;
        }
    }
    let p = out.trace().re;
    (p > 1e-12).then(|| out / c(p))
}

fn oracle_max_commutator(rho: &DensityOperator, povm: &Povm) -> f64 {
    let (da, db) = rho.bipartition().unwrap();
    let r = dense(rho.matrix());
    let states: Vec<CMat> = povm.effects().iter().filter_map(|e| oracle_conditional(&r, &dense(e), da, db)).collect();
    let mut worst: f64 = 0.0;
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            worst = worst.max((&states[i] * &states[j] - &states[j] * &states[i]).norm());
        }
    }
    worst
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for (da, db) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        for seed in 0..50u64 {
            let rho = generate_zero_discord(da, db, 5000 + seed).map_err(|e| e.to_string())?;
            let povm = default_ic_povm(da, seed).map_err(|e| e.to_string())?;
            let v = verify_commutativity(&condition_on_povm(&rho, &povm).map_err(|e| e.to_string())?, 1e-9);
            if v.verdict != Verdict::ConsistentWithZero {
                return Err(format!("{da}x{db} seed {seed}: norm {:.3e}", v.max_commutator_norm));
            }
            worst = worst.max(oracle_max_commutator(&rho, &povm));
            n += 1;
        }
    }
    if worst > 1e-9 {
        return Err(format!("oracle commutator norm {worst:.3e}"));
    }
    Ok(format!("{n} states consistent with zero, oracle max norm {worst:.1e}"))
}

fn criterion_2() -> Outcome {
    let mut norms = Vec::new();
    for d in 2..=4 {
        let rho = generate_maximally_entangled(d).map_err(|e| e.to_string())?;
        let povm = default_ic_povm(d, 0).map_err(|e| e.to_string())?;
        let v = verify_commutativity(&condition_on_povm(&rho, &povm).map_err(|e| e.to_string())?, 1e-9);
        if v.verdict != Verdict::NonzeroDiscord {
            return Err(format!("d={d} not detected"));
        }
        norms.push(v.max_commutator_norm);
    }
    let rho = generate_maximally_entangled(2).unwrap();
    let oracle = oracle_max_commutator(&rho, &sic_qubit());
    if (oracle - 2.0 / 3.0).abs() > 1e-9 {
        return Err(format!("oracle norm {oracle} differs from 2/3"));
    }
    if (norms[0] - oracle).abs() > 1e-9 {
        return Err(format!("SIC norm {} vs oracle {oracle}", norms[0]));
    }
    Ok(format!("d=2,3,4 detected; d=2 SIC norm {:.12} (oracle {:.12})", norms[0], oracle))
}

fn criterion_3() -> Outcome {
    let mut rng = seeded(31);
    let mut worst: f64 = 0.0;
    let cases: [(usize, usize, bool); 2] = [(2, 3, true), (3, 2, false)];
    for (da, db, sic) in cases {
        let povm = if sic { sic_qubit() } else { random_ic_povm(da, 17).map_err(|e| e.to_string())? };
        let duals = dual_frame(&povm).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let rho = DensityOperator::bipartite(random_density_matrix(da * db, &mut rng), da, db).unwrap();
            let back = reconstruct_joint(&condition_on_povm(&rho, &povm).unwrap(), &duals).map_err(|e| e.to_string())?;
            worst = worst.max((dense(back.matrix()) - dense(rho.matrix())).norm());
        }
    }
    if worst > 1e-9 {
        return Err(format!("residual {worst:.3e}"));
    }
    Ok(format!("200 round trips (SIC and random IC), max residual {worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let d = discord_estimate_2q(&generate_zero_discord(2, 2, seed).unwrap()).map_err(|e| e.to_string())?;
        worst = worst.max(d.abs());
    }
    let bell = discord_estimate_2q(&generate_maximally_entangled(2).unwrap()).map_err(|e| e.to_string())?;
    if worst > 1e-6 || (bell - 1.0).abs() > 2e-3 {
        return Err(format!("zero-discord max {worst:.3e}, Bell {bell}"));
    }
    Ok(format!("zero-discord max {worst:.1e} bits, Bell {bell:.6} bits"))
}

/// ⟨n|D(β)|m⟩ for n, m ≤ cutoff from D|0⟩ (a coherent state) and
/// D|m+1⟩ = (a† − β*) D|m⟩ / √(m+1), which follows from D a† D† = a† − β*.
fn oracle_displacement(beta: Complex64, cutoff: usize) -> CMat {
    let n = cutoff + 1;
    let mut d = CMat::zeros(n, n);
    let mut amp = c((-0.5 * beta.norm_sqr()).exp());
    for k in 0..n {
        d[(k, 0)] = amp;
        amp *= beta / c(((k + 1) as f64).sqrt());
    }
    for m in 0..cutoff {
        for k in 0..n {
            let raised = if k > 0 { d[(k - 1, m)] * c((k as f64).sqrt()) } else { c(0.0) };
            d[(k, m + 1)] = (raised - beta.conj() * d[(k, m)]) / c(((m + 1) as f64).sqrt());
        }
    }
    d
}

/// W(α) = (2/π) Σ ρ_mn (−1)^m ⟨n|D(2α)|m⟩ with α = x + ip.
fn oracle_wigner(op: &CMat, g: &GridGeometry) -> Vec<f64> {
    let cutoff = op.nrows() - 1;
    (0..g.len())
        .map(|k| {
            let alpha = Complex64::new(g.x(k / g.np), g.p(k % g.np));
            let d = oracle_displacement(alpha * 2.0, cutoff);
            let mut s = c(0.0);
            for m in 0..=cutoff {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                for n in 0..=cutoff {
                    s += op[(m, n)] * d[(n, m)] * sign;
                }
            }
            2.0 / PI * s.re
        })
        .collect()
}

fn embedded(levels: usize, cutoff: usize, seed: u64) -> CMat {
    let small = random_density_matrix(levels, &mut seeded(seed));
    CMat::from_fn(cutoff + 1, cutoff + 1, |i, j| if i < levels && j < levels { small[(i, j)] } else { c(0.0) })
}

fn fock(m: &CMat) -> FockOperator {
    FockOperator::new(ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])).unwrap()
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// (8/π) ∫ d²u d²v W_a(α+u) W_b(α+v) sin(4(u_r v_i − u_i v_r)), summed directly.
fn literal_quadrature(a: &WignerGrid, b: &WignerGrid) -> Vec<f64> {
    let g = *a.geometry();
    let area = g.cell_area();
    let pts: Vec<(f64, f64)> = (0..g.len()).map(|k| (g.x(k / g.np), g.p(k % g.np))).collect();
    pts.iter()
        .map(|&(x, p)| {
            let mut acc = 0.0;
            for (k1, &(x1, p1)) in pts.iter().enumerate() {
                let (ur, ui) = (x1 - x, p1 - p);
                let wa = a.values()[k1];
                for (k2, &(x2, p2)) in pts.iter().enumerate() {
                    acc += wa * b.values()[k2] * (4.0 * (ur * (p2 - p) - ui * (x2 - x))).sin();
                }
            }
            acc * 8.0 / PI * area * area
        })
        .collect()
}

fn criterion_5() -> Outcome {
    let g = GridGeometry::default();
    let mut worst: f64 = 0.0;
    for pair in 0..10u64 {
        let (a, b) = (embedded(7, 8, 2 * pair), embedded(7, 8, 2 * pair + 1));
        let moyal = moyal_commutator(&wigner_from_fock(&fock(&a), &g).unwrap(), &wigner_from_fock(&fock(&b), &g).unwrap())
            .map_err(|e| e.to_string())?;
        let minus_i_comm = (&a * &b - &b * &a) * Complex64::new(0.0, -1.0);
        worst = worst.max(sup(moyal.values(), &oracle_wigner(&minus_i_comm, &g)));
    }
    if worst > 1e-3 {
        return Err(format!("Moyal vs Fock commutator {worst:.3e}"));
    }

    let small = GridGeometry::square(2.4, 16);
    let vac = [[0.25, 0.0], [0.0, 0.25]];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut plus = CMat::zeros(7, 7);
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        plus[(i, j)] = c(h * h);
    }
    let mut vacuum = CMat::zeros(7, 7);
    vacuum[(0, 0)] = c(1.0);
    let fixtures = [
        (
            WignerGrid::new(small, oracle_wigner(&vacuum, &small)).unwrap(),
            WignerGrid::new(small, oracle_wigner(&plus, &small)).unwrap(),
        ),
        (gaussian_wigner([0.0, 0.0], vac, &small).unwrap(), gaussian_wigner([0.5, 0.0], vac, &small).unwrap()),
        (
            gaussian_wigner([0.0, 0.2], [[0.35, 0.0], [0.0, 0.35]], &small).unwrap(),
            gaussian_wigner([-0.3, 0.0], [[0.2, 0.0], [0.0, 0.3125]], &small).unwrap(),
        ),
    ];
    let mut worst_literal: f64 = 0.0;
    for (a, b) in &fixtures {
        let spectral = moyal_commutator(a, b).map_err(|e| e.to_string())?;
        worst_literal = worst_literal.max(sup(spectral.values(), &literal_quadrature(a, b)));
    }
    if worst_literal > 5e-3 {
        return Err(format!("literal quadrature vs spectral {worst_literal:.3e}"));
    }
    Ok(format!("10 random pairs max L∞ {worst:.2e}; literal 16x16 oracle max {worst_literal:.2e}"))
}

fn criterion_6() -> Outcome {
    let g = GridGeometry::default();
    let cg = GridGeometry::square(8.0, 64);
    let vac = [[0.25, 0.0], [0.0, 0.25]];
    let fixtures = [
        ([0.0, 0.0], vac, [1.0, 0.0], vac),
        ([0.0, 0.0], vac, [0.5, -0.5], vac),
        ([0.2, 0.1], [[0.4, 0.0], [0.0, 0.4]], [-0.3, 0.4], [[0.15, 0.05], [0.05, 0.45]]),
    ];
    let mut worst: f64 = 0.0;
    for (ma, ca, mb, cb) in fixtures {
        let moyal = moyal_commutator(&gaussian_wigner(ma, ca, &g).unwrap(), &gaussian_wigner(mb, cb, &g).unwrap())
            .map_err(|e| e.to_string())?;
        let chi = char_commutator(&gaussian_char(ma, ca, &cg).unwrap(), &gaussian_char(mb, cb, &cg).unwrap())
            .map_err(|e| e.to_string())?;
        let (w, _) = wigner_from_char(&chi, &g).map_err(|e| e.to_string())?;
        worst = worst.max(moyal.sup_distance_to(&w).map_err(|e| e.to_string())?);
    }
    if worst > 2e-3 {
        return Err(format!("characteristic vs Moyal {worst:.3e}"));
    }
    Ok(format!("3 Gaussian fixtures, max L∞ {worst:.2e}"))
}

/// Mean of B's quadrature given heterodyne outcome y on A: the joint Wigner
/// function times the coherent-state factor (2/π)^{1/2} e^{−2(x₁−y)²},
/// integrated on a fine midpoint grid.
fn brute_force_mean(a: f64, b: f64, z: f64, y: f64) -> f64 {
    let det = a * b - z * z;
    let (ia, ib, iz) = (b / det, a / det, -z / det);
    let half = 7.0 * a.max(b).sqrt() + 2.0 * y.abs();
    let n = 700;
    let h = 2.0 * half / n as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        let x1 = -half + (i as f64 + 0.5) * h;
        let k = (-2.0 * (x1 - y).powi(2)).exp();
        for j in 0..n {
            let x2 = -half + (j as f64 + 0.5) * h;
            let w = (-0.5 * (ia * x1 * x1 + 2.0 * iz * x1 * x2 + ib * x2 * x2)).exp() * k;
            num += x2 * w;
            den += w;
        }
    }
    num / den
}

fn random_standard_form(rng: &mut impl Rng) -> StandardForm {
    loop {
        let a: f64 = rng.random_range(0.25..1.25);
        let b = rng.random_range(0.25..1.25);
        let lim = (a * b).sqrt();
        let (cc, d) = (rng.random_range(-lim..lim), rng.random_range(-lim..lim));
        let g = GaussianState::from_standard(a, b, cc, d);
        let sub_min = |z: f64| Matrix2::new(a, z, z, b).symmetric_eigenvalues().min();
        if validate_physical(&g) && sub_min(cc) > 0.02 && sub_min(d) > 0.02 {
            return standard_form(&g).unwrap();
        }
    }
}

fn criterion_7() -> Outcome {
    let worked = standard_form(&GaussianState::from_standard(0.5, 0.5, 0.25, 0.0)).map_err(|e| e.to_string())?;
    let gamma = peak(&worked, Complex64::new(1.0, 1.0)).map_err(|e| e.to_string())?;
    let brute = brute_force_mean(0.5, 0.5, 0.25, 1.0);
    if (gamma - c(1.0 / 3.0)).norm() > 1e-6 || (brute - 1.0 / 3.0).abs() > 1e-6 {
        return Err(format!("worked case: closed form {gamma}, integration {brute}"));
    }
    let mut rng = seeded(77);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let sf = random_standard_form(&mut rng);
        let out = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let g = peak(&sf, out).map_err(|e| e.to_string())?;
        let b = Complex64::new(brute_force_mean(sf.a, sf.b, sf.c, out.re), brute_force_mean(sf.a, sf.b, sf.d, out.im));
        worst = worst.max((g - b).norm());
    }
    if worst > 1e-6 {
        return Err(format!("closed form vs integration {worst:.3e}"));
    }
    Ok(format!("worked case γ = {:.12}; 20 random forms max {worst:.1e}", gamma.re))
}

fn criterion_8() -> Outcome {
    let pairs = [((0.3, 0.7), (-1.1, 0.4)), ((1.0, 1.0), (-0.5, -2.0)), ((2.0, -0.3), (0.1, 0.9))];
    let mut rng = seeded(88);
    let (mut disagreements, mut zeros) = (0, 0);
    for k in 0..200 {
        let g = random_physical_state(&mut rng, k % 2 == 0);
        let zero = zero_discord_decision(&g, 1e-8).map_err(|e| e.to_string())?;
        zeros += zero as usize;
        let sf = standard_form(&g).map_err(|e| e.to_string())?;
        for ((x1, p1), (x2, p2)) in pairs {
            let r = peak_coincidence_test(&sf, Complex64::new(x1, p1), Complex64::new(x2, p2), 1e-8)
                .map_err(|e| e.to_string())?;
            if (r.verdict == Verdict::ConsistentWithZero) != zero {
                disagreements += 1;
            }
        }
    }
    if disagreements > 0 {
        return Err(format!("{disagreements} disagreements"));
    }
    Ok(format!("200 states ({zeros} with C = 0), 600 peak tests, 0 disagreements"))
}

fn criterion_9() -> Outcome {
    let mut rng = seeded(99);
    let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(1e-300);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let g = random_physical_state(&mut rng, true);
        let sf = standard_form(&g).map_err(|e| e.to_string())?;
        let red = sf.state();
        for (x, y) in [
            (g.block_a().determinant(), red.block_a().determinant()),
            (g.block_b().determinant(), red.block_b().determinant()),
            (g.block_c().determinant(), red.block_c().determinant()),
            (g.cov().determinant(), red.cov().determinant()),
        ] {
            worst = worst.max(rel(x, y));
        }
        let again = standard_form(&red).map_err(|e| e.to_string())?;
        if (again.a, again.b, again.c, again.d) != (sf.a, sf.b, sf.c, sf.d) {
            return Err(format!("state {k}: reduction not idempotent"));
        }
    }
    if worst > 1e-9 {
        return Err(format!("invariant drift {worst:.3e}"));
    }
    Ok(format!("200 states, max relative invariant drift {worst:.1e}, idempotent"))
}

fn criterion_10() -> Outcome {
    let povm = sic_qubit();
    let duals = dual_frame(&povm).unwrap();
    let opts = SignificanceOptions { z_threshold: 5.0, bootstrap_resamples: 0, ..Default::default() };
    let mut rng = seeded(1010);
    let a = DensityOperator::new(random_density_matrix(2, &mut rng)).unwrap();
    let b = DensityOperator::new(random_density_matrix(2, &mut rng)).unwrap();
    let product = DensityOperator::product(&a, &b);
    let cq = generate_zero_discord(2, 2, 1011).unwrap();
    let bell = generate_maximally_entangled(2).unwrap();
    let rate = |rho: &DensityOperator| -> Result<usize, String> {
        let mut hits = 0;
        for seed in 0..100 {
            let rec = sample_joint(rho, &povm, &povm, 100_000, seed).map_err(|e| e.to_string())?;
            let est = estimate_conditionals(&rec, &duals).map_err(|e| e.to_string())?;
            hits += significant_commutativity_with(&est, &opts).map_err(|e| e.to_string())?.verdict.is_nonzero() as usize;
        }
        Ok(hits)
    };
    let (fp_product, fp_cq, detected) = (rate(&product)?, rate(&cq)?, rate(&bell)?);
    if fp_product > 5 || fp_cq > 5 || detected != 100 {
        return Err(format!("false positives {fp_product}/100 and {fp_cq}/100, detection {detected}/100"));
    }
    Ok(format!("false positives {fp_product}% (product), {fp_cq}% (classical-quantum); detection {detected}%"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qdiscord"))
        .args(args)
        .env("QDISCORD_FIXTURES", fixtures())
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.code() != Some(0) {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn criterion_11() -> Outcome {
    let dir = std::env::temp_dir().join(format!("qdiscord-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let record = dir.join("bell2.shots");
    let record_arg = record.to_str().unwrap().to_string();
    let runs: [Vec<&str>; 4] = [
        vec!["verify-dv", "bell2.state"],
        vec!["verify-gaussian", "tmsv_r05.state", "--outcomes", "0,0;1,1"],
        vec!["moyal", "fock0.state", "plus.state"],
        vec!["tomo", "bell2.state", "--shots", "100000", "--seed", "7", "--record-out", &record_arg],
    ];
    for args in &runs {
        if cli(args)? != cli(args)? {
            return Err(format!("{args:?}: reports differ between runs"));
        }
    }
    let original: serde_json::Value = serde_json::from_slice(&cli(&runs[3])?).map_err(|e| e.to_string())?;
    let replay: serde_json::Value = serde_json::from_slice(&cli(&["tomo", &record_arg])?).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_dir_all(&dir);
    for key in ["verdict", "witness", "thresholds", "seeds"] {
        if original[key] != replay[key] {
            return Err(format!("replay differs in {key}"));
        }
    }
    Ok("4 commands byte-identical across runs; tomo replay identical".into())
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() {
    let criteria: [Criterion; 11] = [
        ("zero-discord soundness", criterion_1, Some(Duration::from_secs(10))),
        ("maximally entangled detection", criterion_2, None),
        ("dual-frame reconstruction", criterion_3, None),
        ("discord estimator cross-check", criterion_4, None),
        ("Moyal bracket vs Fock commutator", criterion_5, Some(Duration::from_secs(60))),
        ("characteristic-function route", criterion_6, None),
        ("Gaussian peak formula", criterion_7, None),
        ("Gaussian decision agreement", criterion_8, None),
        ("standard-form invariants", criterion_9, None),
        ("tomography calibration", criterion_10, Some(Duration::from_secs(120))),
        ("CLI golden reports", criterion_11, None),
    ];
    let mut failures = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let (Ok(detail), Some(budget)) = (&outcome, budget) {
            if elapsed > *budget {
                outcome = Err(format!("{detail}; took {elapsed:.1?}, budget {budget:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{elapsed:.2?}]", k + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {why} [{elapsed:.2?}]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
