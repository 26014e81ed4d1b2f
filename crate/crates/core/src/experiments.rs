//! Request and report types behind the `qmix` command line, plus the
//! drivers that run them. Every report serializes to versioned JSON.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combine::{
    combine2, combine2_bruteforce, combine3_bruteforce, combine3_closed, combine3_magic, delta_from_nested,
    q_from_pdelta, q_from_z, s3_coeffs_from_phases, sample_q_triple, z_from_q, NestedSpec, PDelta, QTriple, S3Coeffs,
    Sign,
};
use crate::error::{Error, Result};
use crate::groups::regular_lincomb;
use crate::io::{
    check_format, complex_from_json, complex_to_json, matrix_from_json, matrix_to_json, ComplexJson, MatrixJson,
};
use crate::linalg::{cis, max_abs_diff, unitarity_residual, CMatrix};
use crate::linkage::{
    orbit_count, orbit_trace, write_orbit_csv, Assignment, BlochFn, LinkageConfig, LinkageSpec, Orbit, NESTED_FLAG_TOL,
};
use crate::repr::{
    extract_blocks, flat_unitary_search, irreps_cyclic, irreps_s3, s3_blocks, synthesize_coeffs, BlockUnitaries,
    FlatSearchOptions, IrrepSet, FLATNESS_TOL,
};
use crate::state::{
    entropy, entropy_of_matrix, random_density_with, DensityMatrix, EntropyFunctional, StateDiagnostics,
};

/// Largest disagreement tolerated between evaluators under `--verify`.
pub const VERIFY_TOL: f64 = 1e-10;
/// A two-state scan gap below this is a bug: the inequality is a theorem.
pub const BINARY_GAP_TOL: f64 = -1e-9;
/// A three-state scan gap below this is recorded as a counterexample.
pub const COUNTEREXAMPLE_GAP: f64 = -1e-6;

fn irreps_by_name(name: &str) -> Result<IrrepSet> {
    let lower = name.to_ascii_lowercase();
    if lower == "s3" {
        return Ok(irreps_s3());
    }
    let n = lower
        .strip_prefix('z')
        .and_then(|n| n.parse::<usize>().ok())
        .ok_or_else(|| Error::Format(format!("unknown group `{name}`, expected s3 or zN")))?;
    irreps_cyclic(n)
}

fn usage(detail: impl Into<String>) -> Error {
    Error::Format(detail.into())
}

/// Coefficient synthesis input: a group and one unitary per irrep.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    #[serde(default)]
    pub format: Option<String>,
    pub group: String,
    /// Explicit block unitaries, one per irrep in the canonical order.
    #[serde(default)]
    pub blocks: Option<Vec<MatrixJson>>,
    /// Phases `θ` of one-dimensional blocks `e^{iθ}`.
    #[serde(default)]
    pub phases: Option<Vec<f64>>,
    /// S₃ blocks `(e^{iφ₁}, e^{iφ₂}, [[a, c], [−c̄, ā]])`.
    #[serde(default)]
    pub phi1: Option<f64>,
    #[serde(default)]
    pub phi2: Option<f64>,
    #[serde(default)]
    pub a: Option<ComplexJson>,
    #[serde(default)]
    pub c: Option<ComplexJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthVerification {
    pub unitarity_residual: f64,
    pub block_roundtrip_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthReport {
    pub group: String,
    pub order: usize,
    pub coeffs: Vec<ComplexJson>,
    pub verification: SynthVerification,
}

pub fn run_synth(cfg: &SynthConfig) -> Result<SynthReport> {
    check_format(cfg.format.as_deref())?;
    let irreps = irreps_by_name(&cfg.group)?;
    let s3_params = [cfg.phi1.is_some(), cfg.phi2.is_some(), cfg.a.is_some(), cfg.c.is_some()];
    let sources = usize::from(cfg.blocks.is_some())
        + usize::from(cfg.phases.is_some())
        + usize::from(s3_params.iter().any(|&x| x));
    if sources != 1 {
        return Err(usage("give exactly one of `blocks`, `phases`, or `phi1/phi2/a/c`"));
    }
    let blocks = if let Some(mats) = &cfg.blocks {
        let mats = mats.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
        check_block_shapes(&irreps, &mats)?;
        BlockUnitaries::new(mats)?
    } else if let Some(phases) = &cfg.phases {
        if irreps.dims().iter().any(|&d| d != 1) {
            return Err(usage("`phases` needs an abelian group"));
        }
        let mats: Vec<CMatrix> = phases.iter().map(|&t| CMatrix::from_element(1, 1, cis(t))).collect();
        check_block_shapes(&irreps, &mats)?;
        BlockUnitaries::new(mats)?
    } else {
        if irreps.dims() != [1, 1, 2] {
            return Err(usage("`phi1/phi2/a/c` parametrize S3 blocks only"));
        }
        let (Some(phi1), Some(phi2), Some(a), Some(c)) = (cfg.phi1, cfg.phi2, cfg.a, cfg.c) else {
            return Err(usage("S3 parameters need all of phi1, phi2, a, c"));
        };
        s3_blocks(phi1, phi2, complex_from_json(a), complex_from_json(c))?
    };
    let z = synthesize_coeffs(&blocks, &irreps)?;
    let unitarity = unitarity_residual(&regular_lincomb(&z));
    let back = extract_blocks(&z, &irreps)?;
    Ok(SynthReport {
        group: cfg.group.to_ascii_lowercase(),
        order: irreps.group().order(),
        coeffs: z.coeffs().iter().map(|&x| complex_to_json(x)).collect(),
        verification: SynthVerification {
            unitarity_residual: unitarity,
            block_roundtrip_error: back.max_abs_diff(&blocks),
        },
    })
}

fn check_block_shapes(irreps: &IrrepSet, mats: &[CMatrix]) -> Result<()> {
    let dims = irreps.dims();
    if mats.len() != dims.len() {
        return Err(Error::SizeMismatch {
            expected: dims.len(),
            found: mats.len(),
        });
    }
    for (m, &d) in mats.iter().zip(&dims) {
        if m.shape() != (d, d) {
            return Err(Error::SizeMismatch {
                expected: d,
                found: m.nrows(),
            });
        }
    }
    Ok(())
}

/// Input states: explicit matrices or qubit Bloch vectors.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatesFile {
    #[serde(default)]
    pub format: Option<String>,
    #[serde(default)]
    pub states: Option<Vec<MatrixJson>>,
    #[serde(default)]
    pub bloch: Option<Vec<[f64; 3]>>,
}

impl StatesFile {
    pub fn load(&self) -> Result<Vec<DensityMatrix>> {
        check_format(self.format.as_deref())?;
        match (&self.states, &self.bloch) {
            (Some(m), None) => m.iter().map(DensityMatrix::from_json).collect(),
            (None, Some(b)) => b.iter().map(|v| DensityMatrix::from_bloch(v[0], v[1], v[2])).collect(),
            _ => Err(usage("give exactly one of `states` or `bloch`")),
        }
    }
}

/// `|+⟩⟨+|`, `|+i⟩⟨+i|`, `|0⟩⟨0|`: pure qubit states along the three Bloch axes.
pub fn mub_qubit_states() -> [DensityMatrix; 3] {
    [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)]
        .map(|(x, y, z)| DensityMatrix::from_bloch(x, y, z).expect("pure state"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseParams {
    pub phi1: f64,
    pub phi2: f64,
    pub a: ComplexJson,
    pub c: ComplexJson,
}

/// Combination parameters; exactly one parametrization must be present
/// (`lambda`/`sign` for two states).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombineParams {
    #[serde(default)]
    pub format: Option<String>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub sign: Option<Sign>,
    #[serde(default)]
    pub q: Option<[ComplexJson; 3]>,
    #[serde(default)]
    pub p: Option<[f64; 3]>,
    #[serde(default)]
    pub delta: Option<[f64; 3]>,
    #[serde(default)]
    pub z: Option<Vec<ComplexJson>>,
    #[serde(default)]
    pub phases: Option<PhaseParams>,
    #[serde(default)]
    pub nested: Option<NestedSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombineMode {
    Closed,
    Magic,
    Brute,
}

impl std::str::FromStr for CombineMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(CombineMode::Closed),
            "magic" => Ok(CombineMode::Magic),
            "brute" => Ok(CombineMode::Brute),
            _ => Err(usage(format!("unknown mode `{s}`, expected closed|magic|brute"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombineReport {
    pub mode: CombineMode,
    pub state: MatrixJson,
    pub diagnostics: StateDiagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bloch: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<QTriple>,
    /// Largest pairwise difference between evaluators, when verified.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify_max_diff: Option<f64>,
}

// Resolves three-state parameters into coefficients and, when in gauge, a q-triple.
fn ternary_params(params: &CombineParams) -> Result<(S3Coeffs, Option<QTriple>)> {
    let chosen = [
        params.q.is_some(),
        params.p.is_some() || params.delta.is_some(),
        params.z.is_some(),
        params.phases.is_some(),
        params.nested.is_some(),
    ];
    if chosen.iter().filter(|&&x| x).count() != 1 || params.lambda.is_some() {
        return Err(usage("three states need exactly one of q, p+delta, z, phases, nested"));
    }
    let from_q = |q: QTriple| (z_from_q(&q), Some(q));
    if let Some(q) = params.q {
        return Ok(from_q(QTriple::new(q.map(complex_from_json))?));
    }
    if let Some(spec) = &params.nested {
        let spec = NestedSpec::new(spec.ordering, spec.a, spec.a_prime, spec.s, spec.s_prime)?;
        return Ok(from_q(q_from_pdelta(&delta_from_nested(&spec)?)?));
    }
    if params.p.is_some() || params.delta.is_some() {
        let (Some(p), Some(delta)) = (params.p, params.delta) else {
            return Err(usage("`p` and `delta` must be given together"));
        };
        return Ok(from_q(q_from_pdelta(&PDelta::new(p, delta)?)?));
    }
    let z = if let Some(z) = &params.z {
        S3Coeffs::from_json(z)?
    } else {
        let ph = params.phases.expect("checked above");
        s3_coeffs_from_phases(ph.phi1, ph.phi2, complex_from_json(ph.a), complex_from_json(ph.c))?
    };
    let q = q_from_z(&z).ok();
    Ok((z, q))
}

pub fn run_combine(
    states: &[DensityMatrix],
    params: &CombineParams,
    mode: CombineMode,
    verify: bool,
) -> Result<CombineReport> {
    check_format(params.format.as_deref())?;
    let (out, q, diff) = match states.len() {
        2 => {
            let (Some(lambda), true) = (
                params.lambda,
                params.q.is_none() && params.z.is_none() && params.nested.is_none(),
            ) else {
                return Err(usage("two states need `lambda` (and optionally `sign`) only"));
            };
            let sign = params.sign.unwrap_or(Sign::Plus);
            let closed = combine2(&states[0], &states[1], lambda, sign)?;
            let brute = combine2_bruteforce(&states[0], &states[1], lambda, sign)?;
            let diff = verify.then(|| max_abs_diff(closed.matrix(), brute.matrix()));
            let out = if mode == CombineMode::Brute { brute } else { closed };
            (out.into_matrix(), None, diff)
        }
        3 => {
            let (z, q) = ternary_params(params)?;
            let s = [&states[0], &states[1], &states[2]];
            let evaluate = |m: CombineMode| -> Result<CMatrix> {
                match m {
                    CombineMode::Closed => {
                        let q = match q {
                            Some(q) => q,
                            None => q_from_z(&z)?,
                        };
                        Ok(combine3_closed(s, &q)?.into_matrix())
                    }
                    CombineMode::Magic => combine3_magic(s, z.coeffs()),
                    CombineMode::Brute => Ok(combine3_bruteforce(s, &z)?.into_matrix()),
                }
            };
            let out = evaluate(mode)?;
            let diff = if verify {
                let mut modes = vec![CombineMode::Magic, CombineMode::Brute];
                if q.is_some() {
                    modes.push(CombineMode::Closed);
                }
                let mats = modes.iter().map(|&m| evaluate(m)).collect::<Result<Vec<_>>>()?;
                let mut worst: f64 = 0.0;
                for i in 0..mats.len() {
                    for j in i + 1..mats.len() {
                        worst = worst.max(max_abs_diff(&mats[i], &mats[j]));
                    }
                }
                Some(worst)
            } else {
                None
            };
            (out, q, diff)
        }
        n => return Err(Error::out_of_range("state count", format!("{n}, expected 2 or 3"))),
    };
    if let Some(d) = diff {
        if d.is_nan() || d > VERIFY_TOL {
            return Err(Error::InvariantViolation(format!("evaluators disagree by {d:.3e}")));
        }
    }
    let diagnostics = StateDiagnostics::of(&out)?;
    if !diagnostics.is_valid() {
        return Err(Error::InvariantViolation(format!(
            "output is not a state: {diagnostics:?}"
        )));
    }
    let bloch = (out.nrows() == 2)
        .then(|| crate::state::bloch_vector(&out))
        .transpose()?;
    Ok(CombineReport {
        mode,
        state: matrix_to_json(&out),
        diagnostics,
        bloch,
        q,
        verify_max_diff: diff,
    })
}

/// Orbit emission input: weights `p`, or sorted bar lengths `(a, b, c)`
/// assigned to slots in order.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitRequest {
    #[serde(default)]
    pub format: Option<String>,
    #[serde(default)]
    pub weights: Option<[f64; 3]>,
    #[serde(default)]
    pub lengths: Option<[f64; 3]>,
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Append the Bloch vector of the combination of `mub_qubit_states()`.
    #[serde(default)]
    pub mub: bool,
}

fn default_steps() -> usize {
    1200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub weights: [f64; 3],
    pub lengths: [f64; 3],
    pub grashof: bool,
    pub orbit_count: usize,
    pub loops: usize,
    pub rows: usize,
    pub nested_rows: usize,
}

pub struct OrbitRun {
    pub orbits: Vec<Orbit>,
    pub summary: OrbitSummary,
    mub: bool,
}

pub fn run_orbit(req: &OrbitRequest) -> Result<OrbitRun> {
    check_format(req.format.as_deref())?;
    let (spec, assignment) = match (req.weights, req.lengths) {
        (Some(p), None) => {
            if p.iter().any(|x| !x.is_finite() || *x < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
                return Err(Error::out_of_range(
                    "weights",
                    format!("{p:?} is not a probability vector"),
                ));
            }
            LinkageSpec::from_weights(p)?
        }
        (None, Some([a, b, c])) => {
            let spec = LinkageSpec::new(a, b, c).map_err(|e| Error::out_of_range("lengths", e.to_string()))?;
            (spec, Assignment::identity())
        }
        _ => return Err(usage("give exactly one of `weights` or `lengths`")),
    };
    let p = assignment.slot_lengths(&spec).map(|r| r * r);
    let orbits = orbit_trace(&spec, assignment, req.steps)?;
    let rows = orbits.iter().map(|o| o.configs.len()).sum();
    let nested_rows = orbits.iter().map(|o| o.nested_indices(NESTED_FLAG_TOL).len()).sum();
    Ok(OrbitRun {
        summary: OrbitSummary {
            weights: p,
            lengths: spec.lengths(),
            grashof: spec.is_grashof(),
            orbit_count: orbit_count(&spec),
            loops: orbits.len(),
            rows,
            nested_rows,
        },
        orbits,
        mub: req.mub,
    })
}

/// Bloch vector of the ternary combination of the MUB qubit triple at `cfg`.
pub fn mub_bloch(cfg: &LinkageConfig) -> Result<[f64; 3]> {
    let s = mub_qubit_states();
    let q = cfg.to_qtriple()?;
    combine3_closed([&s[0], &s[1], &s[2]], &q)?.bloch_vector()
}

impl OrbitRun {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let bloch: &BlochFn = &mub_bloch;
        write_orbit_csv(out, &self.orbits, self.mub.then_some(bloch))
    }
}

/// Entropy-inequality scan input.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default)]
    pub format: Option<String>,
    pub n: usize,
    pub functional: EntropyFunctional,
    pub samples: usize,
    pub d: usize,
    pub seed: u64,
    /// Draw mutually diagonal states.
    #[serde(default)]
    pub commuting: bool,
}

/// Parameters of one scan sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SampleParams {
    Binary { lambda: f64, sign: Sign },
    Ternary { q: QTriple, weights: [f64; 3] },
}

/// Where the minimum was found: sample `k` is drawn from the ChaCha8 stream `k`
/// of the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Argmin {
    pub sample: usize,
    pub seed: u64,
    pub stream: u64,
    pub params: SampleParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub gap: f64,
    pub states: Vec<MatrixJson>,
    pub output: MatrixJson,
    pub params: SampleParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub n: usize,
    pub d: usize,
    pub functional: String,
    pub samples: usize,
    pub seed: u64,
    pub commuting: bool,
    pub min_gap: f64,
    pub argmin: Argmin,
    pub replay_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    /// Wall time; kept out of the JSON so reports are reproducible byte for byte.
    #[serde(skip)]
    pub elapsed: f64,
}

struct Sample {
    gap: f64,
    params: SampleParams,
    states: Vec<DensityMatrix>,
    output: CMatrix,
}

fn diagonal_state<R: Rng>(rng: &mut R, d: usize) -> Result<DensityMatrix> {
    let w: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    DensityMatrix::diagonal(&w.iter().map(|x| x / total).collect::<Vec<_>>())
}

fn draw_state<R: Rng>(rng: &mut R, d: usize, commuting: bool) -> Result<DensityMatrix> {
    if commuting {
        diagonal_state(rng, d)
    } else {
        let rank = rng.random_range(1..=d);
        random_density_with(rng, d, rank)
    }
}

fn scan_sample(cfg: &ScanConfig, index: usize) -> Result<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let f = cfg.functional;
    if cfg.n == 2 {
        let states = vec![
            draw_state(&mut rng, cfg.d, cfg.commuting)?,
            draw_state(&mut rng, cfg.d, cfg.commuting)?,
        ];
        let lambda: f64 = rng.random();
        let sign = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
        let out = combine2(&states[0], &states[1], lambda, sign)?;
        let gap = entropy(f, &out)? - lambda * entropy(f, &states[0])? - (1.0 - lambda) * entropy(f, &states[1])?;
        Ok(Sample {
            gap,
            params: SampleParams::Binary { lambda, sign },
            states,
            output: out.into_matrix(),
        })
    } else {
        let states = (0..3)
            .map(|_| draw_state(&mut rng, cfg.d, cfg.commuting))
            .collect::<Result<Vec<_>>>()?;
        let q = sample_q_triple(&mut rng);
        let out = combine3_closed([&states[0], &states[1], &states[2]], &q)?.into_matrix();
        let p = q.weights();
        let mut bound = 0.0;
        for (pk, s) in p.iter().zip(&states) {
            bound += pk * entropy(f, s)?;
        }
        let gap = entropy_of_matrix(f, &out)? - bound;
        Ok(Sample {
            gap,
            params: SampleParams::Ternary { q, weights: p },
            states,
            output: out,
        })
    }
}

/// Monte-Carlo scan of `f(output) − Σ pᵢ f(ρᵢ)`.
///
/// For two states the gap must be non-negative (a violation is reported as an
/// invariant error); for three states the minimum is only recorded.
pub fn run_epi_scan(cfg: &ScanConfig) -> Result<ScanReport> {
    check_format(cfg.format.as_deref())?;
    if cfg.n != 2 && cfg.n != 3 {
        return Err(Error::out_of_range("n", format!("{}, expected 2 or 3", cfg.n)));
    }
    if !(2..=4).contains(&cfg.d) {
        return Err(Error::out_of_range("d", format!("{}, expected 2..=4", cfg.d)));
    }
    if cfg.samples == 0 {
        return Err(Error::out_of_range("samples", "must be positive"));
    }
    if !cfg.functional.is_concave_for(cfg.d) {
        return Err(Error::out_of_range(
            "functional",
            format!("{} is not concave for d = {}", cfg.functional.name(), cfg.d),
        ));
    }
    let start = std::time::Instant::now();
    let (min_gap, index) = (0..cfg.samples)
        .into_par_iter()
        .map(|k| scan_sample(cfg, k).map(|s| (s.gap, k)))
        .try_reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| {
                Ok(if b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)).is_lt() {
                    b
                } else {
                    a
                })
            },
        )?;
    if !min_gap.is_finite() {
        return Err(Error::InvariantViolation(format!("non-finite gap at sample {index}")));
    }
    let replay = scan_sample(cfg, index)?;
    let replay_ok = replay.gap.to_bits() == min_gap.to_bits();
    if !replay_ok {
        return Err(Error::InvariantViolation(format!(
            "sample {index} replays to gap {} instead of {min_gap}",
            replay.gap
        )));
    }
    if cfg.n == 2 && min_gap < BINARY_GAP_TOL {
        return Err(Error::InvariantViolation(format!(
            "two-state entropy inequality violated: gap {min_gap:.3e} at sample {index}"
        )));
    }
    let counterexample = (cfg.n == 3 && min_gap < COUNTEREXAMPLE_GAP).then(|| Counterexample {
        gap: min_gap,
        states: replay.states.iter().map(DensityMatrix::to_json).collect(),
        output: matrix_to_json(&replay.output),
        params: replay.params.clone(),
    });
    Ok(ScanReport {
        n: cfg.n,
        d: cfg.d,
        functional: cfg.functional.name(),
        samples: cfg.samples,
        seed: cfg.seed,
        commuting: cfg.commuting,
        min_gap,
        argmin: Argmin {
            sample: index,
            seed: cfg.seed,
            stream: index as u64,
            params: replay.params,
        },
        replay_ok,
        counterexample,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatSolution {
    pub coeffs: Vec<ComplexJson>,
    pub unitarity_residual: f64,
    pub flatness_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatSearchReport {
    pub attempts: usize,
    pub seed: u64,
    pub solutions: Vec<FlatSolution>,
}

pub fn run_flat_search(attempts: usize, seed: u64) -> Result<FlatSearchReport> {
    let irreps = irreps_s3();
    let found = flat_unitary_search(&irreps, FlatSearchOptions::new(attempts, seed))?;
    let target = 1.0 / 6f64.sqrt();
    let solutions = found
        .iter()
        .map(|z| {
            let flatness_error = z.coeffs().iter().map(|x| (x.norm() - target).abs()).fold(0.0, f64::max);
            debug_assert!(flatness_error <= FLATNESS_TOL);
            FlatSolution {
                coeffs: z.coeffs().iter().map(|&x| complex_to_json(x)).collect(),
                unitarity_residual: unitarity_residual(&regular_lincomb(z)),
                flatness_error,
            }
        })
        .collect();
    Ok(FlatSearchReport {
        attempts,
        seed,
        solutions,
    })
}
