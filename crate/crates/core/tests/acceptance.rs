//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmix::combine::{
    combine3_bruteforce, combine3_closed, combine3_magic, delta_from_nested, nested_expand, nested_from_delta,
    q_from_pdelta, s3_coeffs_from_phases, sample_q_triple, verify_real_imag_param, z_from_q, NestedSpec,
};
use qmix::experiments::{mub_qubit_states, run_combine, run_epi_scan, CombineMode, CombineParams, ScanConfig};
use qmix::groups::{regular_lincomb, CoeffVector};
use qmix::io::{complex_to_json, matrix_from_json, to_json_pretty, Tagged};
use qmix::linalg::{c, haar_su2_pair, max_abs_diff, unitarity_residual, C64};
use qmix::linkage::{boundary_b0, orbit_count, orbit_count_bruteforce, orbit_trace, Assignment, LinkageSpec};
use qmix::repr::{extract_blocks, irreps_s3, s3_blocks, s3_closed_form_coeffs, synthesize_coeffs, tensor_lincomb};
use qmix::state::random_density_with;
use qmix::{BlockUnitaries, DensityMatrix, EntropyFunctional};

type Outcome = Result<String, String>;

struct Criterion {
    id: u8,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_state(rng: &mut ChaCha8Rng, d: usize) -> DensityMatrix {
    let rank = rng.random_range(1..=d);
    random_density_with(rng, d, rank).unwrap()
}

fn random_block_coeffs(count: usize, seed: u64) -> Vec<CoeffVector> {
    let irreps = irreps_s3();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| synthesize_coeffs(&BlockUnitaries::random(&irreps, &mut rng), &irreps).unwrap())
        .collect()
}

fn c1_unitary_synthesis() -> Outcome {
    let irreps = irreps_s3();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut unit, mut round) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let blocks = BlockUnitaries::random(&irreps, &mut rng);
        let z = synthesize_coeffs(&blocks, &irreps).map_err(|e| e.to_string())?;
        unit = unit.max(unitarity_residual(&regular_lincomb(&z)));
        let back = extract_blocks(&z, &irreps).map_err(|e| e.to_string())?;
        round = round.max(back.max_abs_diff(&blocks));
    }
    ensure(unit < 1e-10 && round < 1e-9, || {
        format!("unitarity {unit:.2e}, round trip {round:.2e}")
    })?;
    Ok(format!(
        "1000 draws, max unitarity residual {unit:.2e}, max round-trip error {round:.2e}"
    ))
}

fn c2_tensor_unitarity() -> Outcome {
    let zs = random_block_coeffs(1000, 101);
    let mut worst = [0.0f64; 3];
    for z in &zs {
        for d in 1..=3 {
            let u = tensor_lincomb(z, d).map_err(|e| e.to_string())?;
            worst[d - 1] = worst[d - 1].max(unitarity_residual(&u));
        }
    }
    ensure(worst.iter().all(|&w| w < 1e-10), || {
        format!("residuals by d: {worst:?}")
    })?;
    Ok(format!(
        "1000 vectors, max residual d=1 {:.2e}, d=2 {:.2e}, d=3 {:.2e}",
        worst[0], worst[1], worst[2]
    ))
}

fn c3_triple_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    for (d, count) in [(2usize, 200usize), (3, 50)] {
        for _ in 0..count {
            let s: Vec<DensityMatrix> = (0..3).map(|_| random_state(&mut rng, d)).collect();
            let states = [&s[0], &s[1], &s[2]];
            let q = sample_q_triple(&mut rng);
            let z = z_from_q(&q);
            let closed = combine3_closed(states, &q).map_err(|e| e.to_string())?;
            let magic = combine3_magic(states, z.coeffs()).map_err(|e| e.to_string())?;
            let brute = combine3_bruteforce(states, &z).map_err(|e| e.to_string())?;
            worst = worst
                .max(max_abs_diff(closed.matrix(), &magic))
                .max(max_abs_diff(closed.matrix(), brute.matrix()))
                .max(max_abs_diff(&magic, brute.matrix()));
        }
    }
    ensure(worst < 1e-10, || format!("max disagreement {worst:.2e}"))?;
    Ok(format!(
        "250 cases (200 at d=2, 50 at d=3), max pairwise difference {worst:.2e}"
    ))
}

fn c4_closed_form() -> Outcome {
    let irreps = irreps_s3();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (phi1, phi2) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI));
        let (a, cc) = haar_su2_pair(&mut rng);
        let blocks = s3_blocks(phi1, phi2, a, cc).map_err(|e| e.to_string())?;
        let z = synthesize_coeffs(&blocks, &irreps).map_err(|e| e.to_string())?;
        let direct = s3_closed_form_coeffs(phi1, phi2, a, cc);
        for (x, y) in z.coeffs().iter().zip(&direct) {
            worst = worst.max((x - y).norm());
        }
    }
    ensure(worst < 1e-12, || format!("max error {worst:.2e}"))?;
    Ok(format!("1000 parameter draws, max error {worst:.2e}"))
}

fn c5_state_independence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst_tied = 0.0f64;
    let mut generic_hits = 0usize;
    for _ in 0..1000 {
        let phi = rng.random_range(-PI..PI);
        let (a, cc) = haar_su2_pair(&mut rng);
        let z = s3_coeffs_from_phases(phi, -phi, a, cc).map_err(|e| e.to_string())?;
        worst_tied = worst_tied.max(z.independence_residuals().into_iter().fold(0.0, f64::max));

        let (phi1, phi2) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI));
        let (a, cc) = haar_su2_pair(&mut rng);
        let z = s3_coeffs_from_phases(phi1, phi2, a, cc).map_err(|e| e.to_string())?;
        if z.independence_residuals().iter().any(|&r| r > 1e-3) {
            generic_hits += 1;
        }
    }
    ensure(worst_tied < 1e-12 && generic_hits >= 990, || {
        format!("tied residual {worst_tied:.2e}, generic hits {generic_hits}/1000")
    })?;
    Ok(format!(
        "tied phases max residual {worst_tied:.2e}; generic phases exceed 1e-3 on {generic_hits}/1000"
    ))
}

fn c6_nested_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 100 {
        let w: [f64; 3] = std::array::from_fn(|_| -rng.random::<f64>().max(1e-300).ln());
        let total: f64 = w.iter().sum();
        let p = w.map(|x| x / total);
        if p.iter().any(|&x| x < 0.01) {
            continue;
        }
        let s: Vec<DensityMatrix> = (0..3).map(|_| random_state(&mut rng, 2)).collect();
        let states = [&s[0], &s[1], &s[2]];
        for spec in NestedSpec::all_for_weights(p).map_err(|e| e.to_string())? {
            let pd = delta_from_nested(&spec).map_err(|e| e.to_string())?;
            let q = q_from_pdelta(&pd).map_err(|e| e.to_string())?;
            let via_closed = combine3_closed(states, &q).map_err(|e| e.to_string())?;
            let direct = nested_expand(&spec, states).map_err(|e| e.to_string())?;
            worst = worst.max(max_abs_diff(via_closed.matrix(), direct.matrix()));
            let back = nested_from_delta(&pd).map_err(|e| e.to_string())?;
            let same = back.ordering == spec.ordering
                && back.s == spec.s
                && back.s_prime == spec.s_prime
                && (back.a - spec.a).abs() < 1e-9
                && (back.a_prime - spec.a_prime).abs() < 1e-9;
            ensure(same, || format!("spec {spec:?} recovered as {back:?}"))?;
        }
        done += 1;
    }
    ensure(worst < 1e-10, || format!("max difference {worst:.2e}"))?;
    Ok(format!(
        "100 weight vectors x 12 specs, all specs recovered, max difference {worst:.2e}"
    ))
}

fn c7_orbit_sweep() -> Outcome {
    let (mut checked, mut excluded, mut bad, mut twos) = (0, 0, Vec::new(), 0);
    for ci in 0..10 {
        let cc = 0.6 + 0.38 * ci as f64 / 9.0;
        let lo = ((1.0 - cc * cc) / 2.0).sqrt();
        let hi = cc.min((1.0 - cc * cc).sqrt());
        for bi in 0..5 {
            let b = lo + (hi - lo) * (bi as f64 + 0.5) / 5.0;
            if (b - boundary_b0(cc)).abs() < 1e-6 {
                excluded += 1;
                continue;
            }
            let spec = LinkageSpec::from_bc(b, cc).map_err(|e| e.to_string())?;
            let analytic = orbit_count(&spec);
            let brute = orbit_count_bruteforce(&spec, 2048).map_err(|e| e.to_string())?;
            checked += 1;
            twos += usize::from(analytic == 2);
            if analytic != brute {
                bad.push(format!("(b={b:.6}, c={cc:.6}): analytic {analytic}, graph {brute}"));
            }
        }
    }
    ensure(bad.is_empty(), || bad.join("; "))?;
    Ok(format!(
        "{checked} points ({twos} with two orbits, {excluded} excluded near the boundary), 0 disagreements"
    ))
}

fn c8_uniform_orbit() -> Outcome {
    let t = 1.0 / 3f64.sqrt();
    let spec = LinkageSpec::new(t, t, t).map_err(|e| e.to_string())?;
    let orbits = orbit_trace(&spec, Assignment::identity(), 1200).map_err(|e| e.to_string())?;
    ensure(orbits.len() == 1 && orbit_count(&spec) == 1, || {
        format!("{} loops", orbits.len())
    })?;
    let cfgs = &orbits[0].configs;
    let (first, last) = (cfgs[0].values(), cfgs[cfgs.len() - 1].values());
    let gap = (0..3).map(|k| (first[k] - last[k]).norm()).fold(0.0, f64::max);
    let max_step = cfgs
        .windows(2)
        .map(|w| {
            (0..3)
                .map(|k| (w[0].values()[k] - w[1].values()[k]).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    ensure(gap <= max_step.max(1e-12) * 1.5, || {
        format!("loop not closed: gap {gap:.2e}, step {max_step:.2e}")
    })?;
    let nested = orbits[0].nested_indices(1e-6).len();
    ensure(nested == 12, || format!("{nested} nested configurations"))?;
    Ok(format!(
        "single closed loop of {} configurations, {nested} nested",
        cfgs.len()
    ))
}

fn c9_mub_bloch() -> Outcome {
    let t = 1.0 / 3f64.sqrt();
    let spec = LinkageSpec::new(t, t, t).map_err(|e| e.to_string())?;
    let orbits = orbit_trace(&spec, Assignment::identity(), 1200).map_err(|e| e.to_string())?;
    let cfgs = &orbits[0].configs;
    let states = mub_qubit_states().to_vec();
    let mut worst = 0.0f64;
    for k in 0..100 {
        let cfg = &cfgs[k * cfgs.len() / 100];
        let q = cfg.values().map(complex_to_json);
        let params = CombineParams {
            q: Some(q),
            ..Default::default()
        };
        let report = run_combine(&states, &params, CombineMode::Closed, true).map_err(|e| e.to_string())?;
        let b = report.bloch.ok_or("no Bloch vector")?;
        let [Some(d12), Some(d23), Some(d31)] = cfg.deltas() else {
            return Err("degenerate configuration".into());
        };
        let want = [
            (1.0 - d23.sin()) / 3.0,
            (1.0 - d31.sin()) / 3.0,
            (1.0 - d12.sin()) / 3.0,
        ];
        for i in 0..3 {
            worst = worst.max((b[i] - want[i]).abs());
        }
    }
    ensure(worst < 1e-10, || format!("max deviation {worst:.2e}"))?;
    Ok(format!(
        "100 orbit points through the combine command, max deviation {worst:.2e}"
    ))
}

fn c10_binary_inequality() -> Outcome {
    let mut parts = Vec::new();
    for d in [2usize, 3] {
        for functional in [EntropyFunctional::VonNeumann, EntropyFunctional::Renyi { alpha: 2.0 }] {
            let cfg = ScanConfig {
                format: None,
                n: 2,
                functional,
                samples: 10_000,
                d,
                seed: 1000 + d as u64,
                commuting: false,
            };
            let report = run_epi_scan(&cfg).map_err(|e| e.to_string())?;
            ensure(report.min_gap >= -1e-9, || {
                format!("{} d={d}: gap {:.3e}", functional.name(), report.min_gap)
            })?;
            parts.push(format!("{} d={d} min {:.2e}", functional.name(), report.min_gap));
        }
    }
    Ok(format!("10^4 samples each: {}", parts.join(", ")))
}

fn c11_ternary_scan() -> Outcome {
    let cfg = ScanConfig {
        format: None,
        n: 3,
        functional: EntropyFunctional::VonNeumann,
        samples: 10_000,
        d: 2,
        seed: 1111,
        commuting: false,
    };
    let a = run_epi_scan(&cfg).map_err(|e| e.to_string())?;
    let b = run_epi_scan(&cfg).map_err(|e| e.to_string())?;
    let (ja, jb) = (to_json_pretty(&Tagged::new(&a)), to_json_pretty(&Tagged::new(&b)));
    ensure(ja == jb && a.replay_ok, || "report not reproducible".into())?;
    let mut note = String::new();
    if let Some(ce) = &a.counterexample {
        let path = std::env::temp_dir().join("qmix_counterexample.json");
        std::fs::write(&path, to_json_pretty(&Tagged::new(ce))).map_err(|e| e.to_string())?;
        note = format!(", counterexample written to {}", path.display());
        // Sanity: the dumped output is a valid state.
        let out = matrix_from_json(&ce.output).map_err(|e| e.to_string())?;
        DensityMatrix::new(out).map_err(|e| e.to_string())?;
    }
    Ok(format!(
        "10^4 samples reproducible, min gap {:.3e} (not asserted){note}",
        a.min_gap
    ))
}

fn c12_real_imag_param() -> Outcome {
    let irreps = irreps_s3();
    let group = irreps.group().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(1212);
    let (mut discrepancies, mut unitary) = (0, 0);
    for k in 0..10_000 {
        let (a, b) = match k % 3 {
            0 => {
                let q = sample_q_triple(&mut rng);
                (q.values().map(|x| x.re), q.values().map(|x| x.im))
            }
            1 => {
                let q = sample_q_triple(&mut rng);
                let e = 1e-6;
                (
                    q.values().map(|x| x.re + e * rng.random_range(-1.0..1.0)),
                    q.values().map(|x| x.im + e * rng.random_range(-1.0..1.0)),
                )
            }
            _ => {
                let v: [f64; 6] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                ([v[0] / n, v[1] / n, v[2] / n], [v[3] / n, v[4] / n, v[5] / n])
            }
        };
        let z = vec![
            C64::from(a[0]),
            C64::from(a[1]),
            C64::from(a[2]),
            c(0.0, b[0]),
            c(0.0, b[1]),
            c(0.0, b[2]),
        ];
        let cv = CoeffVector::new(group.clone(), z).map_err(|e| e.to_string())?;
        let by_blocks = extract_blocks(&cv, &irreps).is_ok();
        let by_param = verify_real_imag_param(a, b);
        unitary += usize::from(by_blocks);
        discrepancies += usize::from(by_blocks != by_param);
    }
    ensure(discrepancies == 0, || format!("{discrepancies} discrepancies"))?;
    Ok(format!("10^4 tuples ({unitary} unitary), 0 discrepancies"))
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "unitary synthesis on S3",
            budget: Some(Duration::from_secs(5)),
            run: c1_unitary_synthesis,
        },
        Criterion {
            id: 2,
            name: "tensor permutation sums stay unitary",
            budget: Some(Duration::from_secs(30)),
            run: c2_tensor_unitarity,
        },
        Criterion {
            id: 3,
            name: "closed, 36-term and brute-force combination agree",
            budget: Some(Duration::from_secs(60)),
            run: c3_triple_oracle,
        },
        Criterion {
            id: 4,
            name: "closed-form S3 coefficients",
            budget: None,
            run: c4_closed_form,
        },
        Criterion {
            id: 5,
            name: "state-independent weights",
            budget: None,
            run: c5_state_independence,
        },
        Criterion {
            id: 6,
            name: "nested compositions round trip",
            budget: None,
            run: c6_nested_round_trip,
        },
        Criterion {
            id: 7,
            name: "orbit count against connected components",
            budget: Some(Duration::from_secs(120)),
            run: c7_orbit_sweep,
        },
        Criterion {
            id: 8,
            name: "uniform-weight orbit",
            budget: None,
            run: c8_uniform_orbit,
        },
        Criterion {
            id: 9,
            name: "axis-aligned qubit triple Bloch vector",
            budget: None,
            run: c9_mub_bloch,
        },
        Criterion {
            id: 10,
            name: "two-state entropy inequality",
            budget: Some(Duration::from_secs(60)),
            run: c10_binary_inequality,
        },
        Criterion {
            id: 11,
            name: "three-state entropy scan",
            budget: None,
            run: c11_ternary_scan,
        },
        Criterion {
            id: 12,
            name: "real/imaginary unitarity test",
            budget: None,
            run: c12_real_imag_param,
        },
    ];
    let mut failures = 0;
    for cr in &criteria {
        let start = Instant::now();
        let outcome = (cr.run)();
        let elapsed = start.elapsed();
        let outcome = match (outcome, cr.budget) {
            (Ok(msg), Some(limit)) if elapsed > limit => Err(format!("{msg}; took {elapsed:.2?}, limit {limit:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(msg) => println!("PASS {:>2} {}: {msg} [{:.2?}]", cr.id, cr.name, elapsed),
            Err(msg) => {
                failures += 1;
                println!("FAIL {:>2} {}: {msg} [{:.2?}]", cr.id, cr.name, elapsed);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
