//! The constraint set `Σ|qᵢ|² = 1`, `Σqᵢ = 1` at fixed weights is the
//! configuration space of a planar four-bar linkage: three mobile bars of
//! lengths `|qᵢ|` closing against an immobile unit bar.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::combine::{QTriple, PARAM_TOL};
use crate::error::{Error, Result};
use crate::linalg::{cis, wrap_angle, C64};

/// Tolerance on `h²` below which two circles are taken to be tangent.
pub const TANGENCY_TOL: f64 = 1e-12;
/// `|cos δᵢⱼ|` below which a traced configuration is flagged as nested.
pub const NESTED_FLAG_TOL: f64 = 1e-9;

const SKIP_BISECTION_TOL: f64 = 1e-12;
const MAX_REFINE_DEPTH: usize = 60;

/// Sorted bar lengths `a ≤ b ≤ c` with `a² + b² + c² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkageSpec {
    a: f64,
    b: f64,
    c: f64,
}

impl LinkageSpec {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(0.0 <= a && a <= b && b <= c && c <= 1.0) {
            return Err(Error::UnsortedLengths(vec![a, b, c]));
        }
        let norm = a * a + b * b + c * c;
        if (norm - 1.0).abs() > PARAM_TOL {
            return Err(Error::ConstraintViolation(format!("a^2 + b^2 + c^2 = {norm}")));
        }
        Ok(LinkageSpec { a, b, c })
    }

    /// The spec for `(b, c)` with `a = √(1 − b² − c²)`.
    pub fn from_bc(b: f64, c: f64) -> Result<Self> {
        let a2 = 1.0 - b * b - c * c;
        if a2 < -PARAM_TOL {
            return Err(Error::ConstraintViolation(format!("b^2 + c^2 = {} > 1", 1.0 - a2)));
        }
        Self::new(a2.max(0.0).sqrt(), b, c)
    }

    /// Bar lengths `√pₖ` sorted, with the slot each length belongs to.
    pub fn from_weights(p: [f64; 3]) -> Result<(Self, Assignment)> {
        if p.iter().any(|&x| x < -PARAM_TOL) || (p.iter().sum::<f64>() - 1.0).abs() > PARAM_TOL {
            return Err(Error::ConstraintViolation(format!("weights {p:?}")));
        }
        let r = p.map(|x| x.max(0.0).sqrt());
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| r[i].total_cmp(&r[j]));
        let mut rank = [0usize; 3];
        for (k, &slot) in order.iter().enumerate() {
            rank[slot] = k;
        }
        // Rescale so the sorted lengths satisfy the norm exactly.
        let n = (r.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let spec = LinkageSpec::new(r[order[0]] / n, r[order[1]] / n, r[order[2]] / n)?;
        Ok((spec, Assignment(rank)))
    }

    pub fn lengths(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn is_grashof(&self) -> bool {
        grashof(self.a, self.b, self.c, 1.0).expect("spec lengths are sorted")
    }
}

/// For each slot `k`, the index into the sorted lengths of `|qₖ|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment(pub [usize; 3]);

impl Assignment {
    pub fn identity() -> Self {
        Assignment([0, 1, 2])
    }

    pub fn new(map: [usize; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for &m in &map {
            if m > 2 || seen[m] {
                return Err(Error::InvalidPermutation(format!("{map:?}")));
            }
            seen[m] = true;
        }
        Ok(Assignment(map))
    }

    pub fn slot_lengths(&self, spec: &LinkageSpec) -> [f64; 3] {
        let l = spec.lengths();
        self.0.map(|k| l[k])
    }
}

/// `(q₁, q₂, q₃)` closing the linkage: `q₁ + q₂ + q₃ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkageConfig {
    q: [C64; 3],
}

impl LinkageConfig {
    pub fn values(&self) -> &[C64; 3] {
        &self.q
    }

    pub fn closure_residual(&self) -> f64 {
        (self.q.iter().sum::<C64>() - 1.0).norm()
    }

    pub fn to_qtriple(&self) -> Result<QTriple> {
        QTriple::new(self.q)
    }

    pub fn conj(&self) -> Self {
        LinkageConfig {
            q: self.q.map(|x| x.conj()),
        }
    }

    /// Bar angles, `None` for zero-length bars.
    pub fn bar_angles(&self) -> [Option<f64>; 3] {
        self.q.map(|x| (x.norm() > 0.0).then(|| x.arg()))
    }

    /// `(δ₁₂, δ₂₃, δ₃₁)`, `None` where a bar has zero length.
    pub fn deltas(&self) -> [Option<f64>; 3] {
        let ang = self.bar_angles();
        [(0, 1), (1, 2), (2, 0)].map(|(i, j)| Some(wrap_angle(ang[i]? - ang[j]?)))
    }

    /// `Re(qᵢq̄ⱼ)` for the pairs `(1,2)`, `(2,3)`, `(3,1)`.
    pub fn cross_re(&self) -> [f64; 3] {
        let q = &self.q;
        [
            (q[0] * q[1].conj()).re,
            (q[1] * q[2].conj()).re,
            (q[2] * q[0].conj()).re,
        ]
    }

    /// Some `|cos δᵢⱼ| < tol` with both bars nonzero.
    pub fn is_nested(&self, tol: f64) -> bool {
        self.deltas().iter().flatten().any(|d| d.cos().abs() < tol)
    }
}

/// `a + d < b + c` for sorted `a ≤ b ≤ c ≤ d`.
pub fn grashof(a: f64, b: f64, c: f64, d: f64) -> Result<bool> {
    if !(a <= b && b <= c && c <= d) {
        return Err(Error::UnsortedLengths(vec![a, b, c, d]));
    }
    Ok(a + d < b + c)
}

/// `b₀(c) = (1 − c + √(1 + (2 − 3c)c)) / 2`.
pub fn boundary_b0(c: f64) -> f64 {
    (1.0 - c + (1.0 + (2.0 - 3.0 * c) * c).max(0.0).sqrt()) / 2.0
}

/// Number of connected components of the configuration space.
pub fn orbit_count(spec: &LinkageSpec) -> usize {
    if spec.b > boundary_b0(spec.c) {
        2
    } else {
        1
    }
}

// Closes the linkage given the driver bar `k` at angle `theta`. The remaining
// bars are the next two slots cyclically; `branch` picks the side of the chord.
// With `strict` unset, slightly infeasible angles are projected onto the tangent point.
fn close_with_driver(r: &[f64; 3], k: usize, theta: f64, branch: f64, strict: bool) -> Option<(LinkageConfig, f64)> {
    let (i, j) = ((k + 1) % 3, (k + 2) % 3);
    let qk = cis(theta) * r[k];
    let w = C64::from(1.0) - qk;
    let dist = w.norm();
    let mut q = [C64::from(0.0); 3];
    q[k] = qk;
    if r[i] == 0.0 || r[j] == 0.0 {
        let other = if r[i] == 0.0 { j } else { i };
        let h2 = -(dist - r[other]).powi(2);
        if strict && h2 < -TANGENCY_TOL {
            return None;
        }
        q[other] = w;
        return Some((LinkageConfig { q }, 0.0));
    }
    if dist == 0.0 {
        return None;
    }
    let x = (dist * dist + r[i] * r[i] - r[j] * r[j]) / (2.0 * dist);
    let h2 = r[i] * r[i] - x * x;
    if strict && h2 < -TANGENCY_TOL {
        return None;
    }
    let h = branch * h2.max(0.0).sqrt();
    let unit = w / dist;
    q[i] = unit * C64::new(x, h);
    q[j] = w - q[i];
    Some((LinkageConfig { q }, h2))
}

/// All configurations with `q₁ = |q₁|e^{iθ}`; zero, one (tangency) or two.
pub fn solve_configs(spec: &LinkageSpec, assignment: Assignment, theta: f64) -> Vec<LinkageConfig> {
    let r = assignment.slot_lengths(spec);
    let Some((plus, h2)) = close_with_driver(&r, 0, theta, 1.0, true) else {
        return Vec::new();
    };
    if h2.abs() <= TANGENCY_TOL {
        return vec![plus];
    }
    let (minus, _) = close_with_driver(&r, 0, theta, -1.0, true).expect("same feasibility");
    vec![plus, minus]
}

// Isolated configurations when some bar has zero length.
fn degenerate_points(r: &[f64; 3]) -> Vec<LinkageConfig> {
    let zero = r.iter().position(|&x| x == 0.0).expect("a zero bar");
    let mut points = Vec::new();
    for branch in [1.0, -1.0] {
        // With a zero driver the closing pair is rigid.
        if let Some((cfg, h2)) = close_with_driver(r, zero, 0.0, branch, true) {
            if points.iter().all(|p: &LinkageConfig| max_norm(p, &cfg) > 1e-12) {
                points.push(cfg);
            }
            if h2.abs() <= TANGENCY_TOL {
                break;
            }
        }
    }
    points
}

fn max_norm(a: &LinkageConfig, b: &LinkageConfig) -> f64 {
    a.q.iter().zip(&b.q).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_angle_jump(a: &LinkageConfig, b: &LinkageConfig) -> f64 {
    let (aa, bb) = (a.bar_angles(), b.bar_angles());
    (0..3)
        .filter_map(|k| Some(wrap_angle(aa[k]? - bb[k]?).abs()))
        .fold(0.0, f64::max)
}

/// Feasible driver angles: a full circle or a list of closed intervals.
enum DriverRange {
    Full { touch: Option<f64> },
    Intervals(Vec<(f64, f64)>),
}

fn driver_range(r: &[f64; 3], k: usize) -> DriverRange {
    let (ri, rj, rk) = (r[(k + 1) % 3], r[(k + 2) % 3], r[k]);
    // |1 − rk e^{iθ}|² = 1 + rk² − 2rk cos θ must lie in [(ri − rj)², (ri + rj)²].
    let lo = (1.0 + rk * rk - (ri + rj).powi(2)) / (2.0 * rk);
    let hi = (1.0 + rk * rk - (ri - rj).powi(2)) / (2.0 * rk);
    let eps = TANGENCY_TOL;
    if lo <= -1.0 + eps && hi >= 1.0 - eps {
        let touch = if lo > -1.0 - eps {
            Some(PI)
        } else if hi < 1.0 + eps {
            Some(0.0)
        } else {
            None
        };
        return DriverRange::Full { touch };
    }
    let t_far = lo.clamp(-1.0, 1.0).acos();
    let t_near = hi.clamp(-1.0, 1.0).acos();
    if t_near <= 0.0 {
        DriverRange::Intervals(vec![(-t_far, t_far)])
    } else if t_far >= PI {
        DriverRange::Intervals(vec![(t_near, TAU - t_near)])
    } else {
        DriverRange::Intervals(vec![(t_near, t_far), (-t_far, -t_near)])
    }
}

/// A branch segment of an orbit: driver angles along one side of the chord.
struct Run {
    branch: f64,
    thetas: Vec<f64>,
}

fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|m| from + (to - from) * m as f64 / n as f64).collect()
}

struct Tracer {
    r: [f64; 3],
    driver: usize,
    limit: f64,
}

impl Tracer {
    fn config(&self, theta: f64, branch: f64) -> LinkageConfig {
        close_with_driver(&self.r, self.driver, theta, branch, false)
            .map(|(c, _)| c)
            .expect("nonzero chord")
    }

    fn refine(&self, run: &Run) -> Vec<(f64, LinkageConfig)> {
        let mut out = Vec::new();
        for w in run.thetas.windows(2) {
            let a = (w[0], self.config(w[0], run.branch));
            let b = (w[1], self.config(w[1], run.branch));
            if out.is_empty() {
                out.push(a);
            }
            self.refine_segment(run.branch, a, b, 0, &mut out);
        }
        out
    }

    fn refine_segment(
        &self,
        branch: f64,
        a: (f64, LinkageConfig),
        b: (f64, LinkageConfig),
        depth: usize,
        out: &mut Vec<(f64, LinkageConfig)>,
    ) {
        if depth < MAX_REFINE_DEPTH && max_angle_jump(&a.1, &b.1) >= self.limit {
            let mid = 0.5 * (a.0 + b.0);
            let m = (mid, self.config(mid, branch));
            self.refine_segment(branch, a, m, depth + 1, out);
            self.refine_segment(branch, m, b, depth + 1, out);
        } else {
            out.push(b);
        }
    }

    // Adds the points where some Re(qᵢq̄ⱼ) changes sign between neighbours.
    fn insert_nested(&self, branch: f64, samples: Vec<(f64, LinkageConfig)>) -> Vec<(f64, LinkageConfig)> {
        let mut out = Vec::with_capacity(samples.len() + 8);
        for w in samples.windows(2) {
            out.push(w[0]);
            let (fa, fb) = (w[0].1.cross_re(), w[1].1.cross_re());
            let mut found = Vec::new();
            for pair in 0..3 {
                if fa[pair].abs() < SKIP_BISECTION_TOL
                    || fb[pair].abs() < SKIP_BISECTION_TOL
                    || fa[pair] * fb[pair] > 0.0
                {
                    continue;
                }
                let (mut lo, mut hi) = (w[0].0, w[1].0);
                let mut flo = fa[pair];
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid == lo || mid == hi {
                        break;
                    }
                    let fm = self.config(mid, branch).cross_re()[pair];
                    if fm * flo > 0.0 {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                let (cl, ch) = (self.config(lo, branch), self.config(hi, branch));
                found.push(if cl.cross_re()[pair].abs() <= ch.cross_re()[pair].abs() {
                    (lo, cl)
                } else {
                    (hi, ch)
                });
            }
            let forward = w[1].0 >= w[0].0;
            found.sort_by(|x, y| {
                if forward {
                    x.0.total_cmp(&y.0)
                } else {
                    y.0.total_cmp(&x.0)
                }
            });
            out.extend(found);
        }
        if let Some(last) = samples.last() {
            out.push(*last);
        }
        out
    }

    fn trace(&self, runs: &[Run]) -> Vec<LinkageConfig> {
        let mut configs: Vec<LinkageConfig> = Vec::new();
        for (idx, run) in runs.iter().enumerate() {
            let pts = self.insert_nested(run.branch, self.refine(run));
            let skip = usize::from(idx > 0);
            configs.extend(pts.into_iter().skip(skip).map(|(_, c)| c));
        }
        // The final point closes the loop onto the first.
        configs.pop();
        configs
    }
}

/// One connected component of the configuration space, traversed in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub configs: Vec<LinkageConfig>,
}

impl Orbit {
    pub fn nested_indices(&self, tol: f64) -> Vec<usize> {
        (0..self.configs.len())
            .filter(|&k| self.configs[k].is_nested(tol))
            .collect()
    }
}

/// Closed loops covering the configuration space; adjacent configurations
/// differ by less than `6π/steps` in every bar angle.
pub fn orbit_trace(spec: &LinkageSpec, assignment: Assignment, steps: usize) -> Result<Vec<Orbit>> {
    if steps < 12 {
        return Err(Error::out_of_range("steps", format!("{steps} < 12")));
    }
    let r = assignment.slot_lengths(spec);
    if r.contains(&0.0) {
        return Ok(degenerate_points(&r)
            .into_iter()
            .map(|c| Orbit { configs: vec![c] })
            .collect());
    }
    let driver = (0..3).min_by(|&i, &j| r[i].total_cmp(&r[j])).expect("three bars");
    let tracer = Tracer {
        r,
        driver,
        limit: 3.0 * TAU / steps as f64,
    };
    let loops: Vec<Vec<Run>> = match driver_range(&r, driver) {
        DriverRange::Full { touch: None } => [1.0, -1.0]
            .iter()
            .map(|&branch| {
                vec![Run {
                    branch,
                    thetas: linspace(0.0, TAU, steps),
                }]
            })
            .collect(),
        DriverRange::Full { touch: Some(t) } => vec![vec![
            Run {
                branch: 1.0,
                thetas: linspace(t, t + TAU, steps),
            },
            Run {
                branch: -1.0,
                thetas: linspace(t + TAU, t + 2.0 * TAU, steps),
            },
        ]],
        DriverRange::Intervals(list) => list
            .into_iter()
            .map(|(lo, hi)| {
                let half = (steps / 2).max(2);
                vec![
                    Run {
                        branch: 1.0,
                        thetas: linspace(lo, hi, half),
                    },
                    Run {
                        branch: -1.0,
                        thetas: linspace(hi, lo, half),
                    },
                ]
            })
            .collect(),
    };
    Ok(loops
        .iter()
        .map(|runs| Orbit {
            configs: tracer.trace(runs),
        })
        .collect())
}

/// Counts connected components by sampling every nonzero bar as the driver on
/// a grid of `resolution` angles and linking samples that are close on the
/// torus of bar angles.
pub fn orbit_count_bruteforce(spec: &LinkageSpec, resolution: usize) -> Result<usize> {
    if resolution < 360 {
        return Err(Error::out_of_range("resolution", format!("{resolution} < 360")));
    }
    let r = spec.lengths();
    if r.contains(&0.0) {
        return Ok(degenerate_points(&r).len());
    }
    let mut points: Vec<[f64; 3]> = Vec::new();
    for driver in 0..3 {
        for m in 0..resolution {
            let theta = TAU * m as f64 / resolution as f64;
            for branch in [1.0, -1.0] {
                if let Some((cfg, _)) = close_with_driver(&r, driver, theta, branch, true) {
                    points.push(cfg.q.map(|x| x.arg().rem_euclid(TAU)));
                }
            }
        }
    }
    let threshold = 1.5 * TAU / resolution as f64;
    let cells = ((TAU / threshold).floor() as i64).max(3);
    let width = TAU / cells as f64;
    let cell_of = |p: &[f64; 3]| p.map(|x| ((x / width) as i64).min(cells - 1));
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (idx, p) in points.iter().enumerate() {
        grid.entry(cell_of(p)).or_default().push(idx);
    }
    let torus = |a: &[f64; 3], b: &[f64; 3]| {
        (0..3)
            .map(|k| {
                let d = (a[k] - b[k]).abs();
                d.min(TAU - d)
            })
            .fold(0.0, f64::max)
    };
    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (idx, p) in points.iter().enumerate() {
        let cell = cell_of(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let key = [
                        (cell[0] + dx).rem_euclid(cells),
                        (cell[1] + dy).rem_euclid(cells),
                        (cell[2] + dz).rem_euclid(cells),
                    ];
                    let Some(bucket) = grid.get(&key) else { continue };
                    for &other in bucket {
                        if other > idx && torus(p, &points[other]) <= threshold {
                            let (ra, rb) = (find(&mut parent, idx), find(&mut parent, other));
                            if ra != rb {
                                parent[ra] = rb;
                            }
                        }
                    }
                }
            }
        }
    }
    let mut roots: Vec<usize> = (0..points.len()).map(|i| find(&mut parent, i)).collect();
    roots.sort_unstable();
    roots.dedup();
    Ok(roots.len())
}

/// CSV header for orbit traces; Bloch columns are appended when present.
pub const ORBIT_CSV_COLUMNS: [&str; 12] = [
    "orbit", "step", "q1_re", "q1_im", "q2_re", "q2_im", "q3_re", "q3_im", "delta12", "delta23", "delta31", "nested",
];

/// Writes one row per configuration; `bloch` adds `bloch_x, bloch_y, bloch_z`.
/// Extra per-row Bloch columns for [`write_orbit_csv`].
pub type BlochFn = dyn Fn(&LinkageConfig) -> Result<[f64; 3]>;

// Shortest round-trip form, switching to exponent notation for tiny or huge values.
fn csv_float(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_orbit_csv<W: Write>(out: W, orbits: &[Orbit], bloch: Option<&BlochFn>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Format(e.to_string());
    let mut header: Vec<&str> = ORBIT_CSV_COLUMNS.to_vec();
    if bloch.is_some() {
        header.extend(["bloch_x", "bloch_y", "bloch_z"]);
    }
    w.write_record(&header).map_err(csv_err)?;
    for (o, orbit) in orbits.iter().enumerate() {
        for (step, cfg) in orbit.configs.iter().enumerate() {
            let mut row = vec![o.to_string(), step.to_string()];
            for q in cfg.values() {
                row.push(csv_float(q.re));
                row.push(csv_float(q.im));
            }
            for d in cfg.deltas() {
                row.push(d.map(csv_float).unwrap_or_default());
            }
            row.push(u8::from(cfg.is_nested(NESTED_FLAG_TOL)).to_string());
            if let Some(f) = bloch {
                row.extend(f(cfg)?.map(csv_float));
            }
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}
