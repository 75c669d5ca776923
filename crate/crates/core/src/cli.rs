//! Support code for the `kaleido` binary: spectrum sources, argument
//! parsers, exit codes and the verification report.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use nalgebra::DVector;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{counting_check, CountingReport, ReflectionGroup};
use crate::masses::{Family, JacobiFrame, MassSpectrum};
use crate::numfmt;
use crate::roots::{dihedral_angle, CoxeterDiagram, RootSet, DEFAULT_DIAGRAM_TOL};
use crate::states::{AntiInvariantState, BetheState, Wavevector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_NOT_KALEIDOSCOPIC: i32 = 3;

pub const DEFAULT_SEED: u64 = 42;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotKaleidoscopic { .. } | Error::ClosureOverflow { .. } => EXIT_NOT_KALEIDOSCOPIC,
        Error::Domain(_) | Error::Index { .. } | Error::ParityMismatch { .. } => EXIT_DOMAIN,
    }
}

/// Parses a list of finite reals separated by commas and/or whitespace.
pub fn parse_real_list(text: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::domain(format!("`{t}` is not a number")))
                .and_then(|x| {
                    if x.is_finite() {
                        Ok(x)
                    } else {
                        Err(Error::domain(format!("`{t}` is not finite")))
                    }
                })
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(Error::domain("empty list of numbers"));
    }
    Ok(values)
}

pub fn parse_family(text: &str) -> Result<Family> {
    match text.to_ascii_lowercase().as_str() {
        "h3" => Ok(Family::H3),
        "h4" => Ok(Family::H4),
        other => Err(Error::domain(format!(
            "unknown family `{other}`, expected h3 or h4"
        ))),
    }
}

/// Where a mass spectrum comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSource {
    Family { family: Family, xi: f64, m2: f64 },
    MassesJson(PathBuf),
    Masses(Vec<f64>),
}

impl SpectrumSource {
    pub fn resolve(&self) -> Result<MassSpectrum> {
        match self {
            SpectrumSource::Family { family, xi, m2 } => family.spectrum(*xi, *m2),
            SpectrumSource::MassesJson(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::domain(format!("cannot read {}: {e}", path.display())))?;
                MassSpectrum::from_json(&text)
            }
            SpectrumSource::Masses(m) => MassSpectrum::custom(m.clone()),
        }
    }
}

/// Everything derived from one spectrum.
#[derive(Debug, Clone)]
pub struct System {
    pub frame: JacobiFrame,
    pub roots: RootSet,
    pub diagram: CoxeterDiagram,
    pub group: Arc<ReflectionGroup>,
}

impl System {
    /// Builds the group only after the diagram check passes.
    pub fn build(spectrum: MassSpectrum, max_order: usize) -> Result<Self> {
        let frame = JacobiFrame::new(spectrum);
        let roots = RootSet::simple_roots(&frame);
        let diagram = roots.infer_diagram(DEFAULT_DIAGRAM_TOL)?;
        let group = Arc::new(ReflectionGroup::generate(&roots, max_order)?);
        Ok(System {
            frame,
            roots,
            diagram,
            group,
        })
    }

    pub fn spectrum(&self) -> &MassSpectrum {
        self.frame.spectrum()
    }

    pub fn counting(&self) -> CountingReport {
        counting_check(self.spectrum(), &self.group)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(serialize_with = "numfmt::real")]
    pub measured: f64,
    #[serde(serialize_with = "numfmt::real")]
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub spectrum: MassSpectrum,
    pub diagram: CoxeterDiagram,
    pub order: usize,
    pub seed: u64,
    #[serde(serialize_with = "numfmt::reals")]
    pub k: Vec<f64>,
    pub counting: CountingReport,
    pub checks: Vec<Check>,
    pub overall: Status,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.overall == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(4);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:width$}  status  {:>24}  {:>24}",
            "check", "measured", "threshold"
        );
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
            };
            let _ = writeln!(
                out,
                "{:width$}  {status:6}  {:>24}  {:>24}",
                c.name,
                numfmt::sci(c.measured, 6),
                numfmt::sci(c.threshold, 6)
            );
        }
        let _ = writeln!(
            out,
            "overall: {}",
            if self.passed() { "pass" } else { "FAIL" }
        );
        out
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    /// Passes when `measured <= threshold`. NaN fails.
    fn at_most(&mut self, name: &str, measured: f64, threshold: f64) {
        let ok = measured <= threshold;
        self.push(name, ok, measured, threshold);
    }

    fn equal(&mut self, name: &str, measured: usize, expected: usize) {
        self.push(name, measured == expected, measured as f64, expected as f64);
    }

    fn push(&mut self, name: &str, ok: bool, measured: f64, threshold: f64) {
        self.0.push(Check {
            name: name.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            measured,
            threshold,
        });
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// A point `sum c_j w_j` with `c_j` in `[0.2, 1]`, scaled to `radius` in the
/// relative space, plus a center-of-mass offset of up to `radius / 10`.
pub fn random_chamber_point(
    rng: &mut ChaCha8Rng,
    roots: &RootSet,
    radius: f64,
) -> Result<DVector<f64>> {
    let weights = roots.fundamental_weights()?;
    let mut z = DVector::zeros(roots.dim());
    for w in &weights {
        z += w * rng.random_range(0.2..1.0);
    }
    Ok(z.normalize() * radius + roots.e_com() * (radius * rng.random_range(-0.1..0.1)))
}

/// Uniform random point on a mirror, relative part at `radius`.
fn random_mirror_point(
    rng: &mut ChaCha8Rng,
    frame: &JacobiFrame,
    beta: &DVector<f64>,
    radius: f64,
) -> DVector<f64> {
    let z = gaussian(rng, frame.dim());
    let on_mirror = frame.relative_part(&(&z - beta * beta.dot(&z)));
    on_mirror.normalize() * radius + frame.e_com() * (radius * rng.random_range(-0.1..0.1))
}

/// Default incident wavevector: a random combination `-sum c_j w_j` with
/// `c_j > 0`, so `alpha_i . k > 0`, scaled to `|k_rel| = 2`, plus a small
/// center-of-mass component.
pub fn default_wavevector(rng: &mut ChaCha8Rng, roots: &RootSet) -> Result<Wavevector> {
    let weights = roots.fundamental_weights()?;
    let mut k = DVector::zeros(roots.dim());
    for w in &weights {
        k -= w * rng.random_range(0.3..1.0);
    }
    let k = k.normalize() * 2.0 + roots.e_com() * 0.25;
    Ok(Wavevector(k))
}

/// Runs every invariant check on a built system. Deterministic given `seed`.
pub fn verify(system: &System, k: Option<Wavevector>, seed: u64) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame = &system.frame;
    let roots = &system.roots;
    let group = &system.group;
    let n = frame.dim();
    let e = frame.e_com();
    let mut checks = Checks::default();

    // masses
    let mut round_trip: f64 = 0.0;
    let mut misordered = 0;
    for _ in 0..1000 {
        let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        x.sort_by(f64::total_cmp);
        let x = DVector::from_vec(x);
        let z = frame.x_to_z(&x);
        let back = frame.z_to_x(&z);
        for (a, b) in back.iter().zip(x.iter()) {
            round_trip = round_trip.max((a - b).abs() / b.abs().max(1e-300));
        }
        let distinct = x.as_slice().windows(2).all(|w| w[0] < w[1]);
        if distinct && !roots.in_chamber(&z) {
            misordered += 1;
        }
    }
    checks.at_most("masses.round_trip", round_trip, 1e-12);
    checks.at_most("masses.e_com_unit", (e.norm() - 1.0).abs(), 1e-12);
    checks.equal("roots.chamber_condition", misordered, 0);

    // roots
    let mut unit: f64 = 0.0;
    let mut com: f64 = 0.0;
    let mut nonadjacent: f64 = 0.0;
    let mut formula: f64 = 0.0;
    let m = frame.spectrum().masses();
    for (k, a) in roots.roots().iter().enumerate() {
        unit = unit.max((a.norm() - 1.0).abs());
        com = com.max(a.dot(e).abs());
        for b in roots.roots().iter().skip(k + 2) {
            nonadjacent = nonadjacent.max(a.dot(b).abs());
        }
        if k + 1 < roots.rank() {
            let i = k + 2;
            let geometric = roots.angle_between_mirrors(i, i + 1)?;
            let from_masses = dihedral_angle(m[i - 2], m[i - 1], m[i])?;
            formula = formula.max((geometric - from_masses).abs());
        }
    }
    checks.at_most("roots.unit_norm", unit, 1e-12);
    checks.at_most("roots.orthogonal_to_com", com, 1e-12);
    checks.at_most("roots.nonadjacent_orthogonal", nonadjacent, 1e-12);
    checks.at_most("roots.angle_matches_mass_formula", formula, 1e-10);
    let mut diagram_dev: f64 = 0.0;
    for ((i, j), _) in system.diagram.labels() {
        let angle = roots.angle_between_mirrors(i, j)?;
        diagram_dev = diagram_dev.max((angle - system.diagram.angle(i, j).unwrap()).abs());
    }
    checks.at_most("roots.diagram_angles", diagram_dev, DEFAULT_DIAGRAM_TOL);

    // group
    if let Some((order, mirrors)) = system.diagram.known_order() {
        checks.equal("group.order", group.order(), order);
        checks.equal("group.reflections", group.positive_roots().len(), mirrors);
    }
    let identity = nalgebra::DMatrix::<f64>::identity(n, n);
    let mut ortho: f64 = 0.0;
    let mut det: f64 = 0.0;
    let mut fixes: f64 = 0.0;
    for g in group.elements() {
        ortho = ortho.max((g.matrix.transpose() * &g.matrix - &identity).amax());
        det = det.max((g.matrix.determinant() - g.sign()).abs());
        fixes = fixes.max((&g.matrix * e - e).amax());
    }
    checks.at_most("group.orthogonal", ortho, 1e-10);
    checks.at_most("group.determinant_matches_parity", det, 1e-8);
    checks.at_most("group.fixes_com", fixes, 1e-10);
    checks.equal(
        "group.identity_first",
        group.element(0).parity as usize + group.element(0).word_length,
        0,
    );
    let mut missing = 0;
    let mut parity_breaks = 0;
    for _ in 0..1000 {
        let a = rng.random_range(0..group.order());
        let b = rng.random_range(0..group.order());
        match group.compose(a, b) {
            None => missing += 1,
            Some(c) => {
                if group.element(c).parity != group.element(a).parity ^ group.element(b).parity {
                    parity_breaks += 1;
                }
            }
        }
    }
    checks.equal("group.closure", missing, 0);
    checks.equal("group.parity_homomorphism", parity_breaks, 0);
    let (even, odd) = group.parity_counts();
    checks.equal("group.parity_balance", even, odd);
    let beta_com = group
        .positive_roots()
        .iter()
        .map(|b| b.dot(e).abs())
        .fold(0.0, f64::max);
    checks.at_most("group.positive_roots_orthogonal_to_com", beta_com, 1e-10);
    let simple_missing = roots
        .roots()
        .iter()
        .filter(|a| {
            !group
                .positive_roots()
                .iter()
                .any(|b| (b - *a).amax() < 1e-10)
        })
        .count();
    checks.equal("group.simple_roots_are_positive", simple_missing, 0);
    let mut roundtrip_beta: f64 = 0.0;
    for (b, &id) in group.positive_roots().iter().zip(group.reflection_ids()) {
        let r = crate::group::reflection_matrix(b)?;
        roundtrip_beta = roundtrip_beta.max((r - &group.element(id).matrix).amax());
    }
    checks.at_most("group.reflection_round_trip", roundtrip_beta, 1e-8);

    // Bethe state
    let k = match k {
        Some(k) => k,
        None => default_wavevector(&mut rng, roots)?,
    };
    let bethe = BetheState::scattering(group.clone(), k.clone())?;
    let scale = bethe.term_scale();
    let mut mirror_points = Vec::new();
    let radius = bethe.probe_radius();
    for b in group.positive_roots() {
        for _ in 0..50 {
            mirror_points.push(random_mirror_point(&mut rng, frame, b, radius));
        }
    }
    let dirichlet = bethe
        .eval_batch(&mirror_points)
        .iter()
        .map(|v| v.norm() / scale)
        .fold(0.0, f64::max);
    checks.at_most("bethe.dirichlet_on_mirrors", dirichlet, 1e-10);
    let mut equivariance: f64 = 0.0;
    let mut translation: f64 = 0.0;
    for _ in 0..100 {
        let g = group.elements().choose(&mut rng).expect("nonempty group");
        let h = group.elements().choose(&mut rng).expect("nonempty group");
        let z = h.apply(&random_chamber_point(&mut rng, roots, radius)?);
        equivariance = equivariance.max(bethe.symmetry_residual(g, &z));
        translation = translation.max(bethe.translation_residual(&z, rng.random_range(-2.0..2.0)));
    }
    checks.at_most("bethe.equivariance", equivariance, 1e-10);
    checks.at_most("bethe.com_translation", translation, 1e-10);
    let mut helmholtz: f64 = 0.0;
    for _ in 0..5 {
        let z = random_chamber_point(&mut rng, roots, radius)?;
        helmholtz = helmholtz.max(bethe.helmholtz_residual(&z, 1e-3)?);
    }
    checks.at_most("bethe.helmholtz", helmholtz, 1e-5);
    let zero = BetheState::new(group.clone(), Wavevector(DVector::zeros(n)))?;
    let zero_k = (0..10)
        .map(|_| zero.eval(&gaussian(&mut rng, n)).norm() / zero.term_scale())
        .fold(0.0, f64::max);
    checks.at_most("bethe.zero_wavevector_vanishes", zero_k, 1e-12);

    // zero-energy state
    let anti = AntiInvariantState::new(group);
    let mut harmonic: f64 = 0.0;
    for _ in 0..100 {
        let z = frame.relative_part(&gaussian(&mut rng, n)).normalize();
        let (value, scale) = anti.laplacian(&z);
        harmonic = harmonic.max(if scale > 0.0 {
            value.abs() / scale
        } else {
            0.0
        });
    }
    checks.at_most("anti_invariant.harmonic", harmonic, 1e-9);
    let sample: Vec<usize> = if group.order() <= 200 {
        (0..group.order()).collect()
    } else {
        (0..200)
            .map(|_| rng.random_range(0..group.order()))
            .collect()
    };
    let mut anti_sym: f64 = 0.0;
    for id in sample {
        let g = group.element(id);
        let z = random_chamber_point(&mut rng, roots, 1.0)?;
        let base = anti.eval(&z);
        let moved = anti.eval(&g.apply(&z));
        anti_sym = anti_sym.max((moved - g.sign() * base).abs() / base.abs());
    }
    checks.at_most("anti_invariant.antisymmetry", anti_sym, 1e-10);
    let z = random_chamber_point(&mut rng, roots, 1.0)?;
    let slope = homogeneity_slope(&anti, &z);
    checks.at_most(
        "anti_invariant.degree",
        (slope - anti.degree() as f64).abs(),
        1e-9,
    );
    let reference = anti.eval(group.interior_point()).signum();
    let sign_flips = (0..200)
        .filter(|_| {
            let z = random_chamber_point(&mut rng, roots, 1.0).expect("weights exist");
            anti.eval(&z).signum() != reference
        })
        .count();
    checks.equal("anti_invariant.fixed_sign_in_chamber", sign_flips, 0);
    let com_shift = (0..20)
        .map(|_| {
            let z = random_chamber_point(&mut rng, roots, 1.0).expect("weights exist");
            let c = rng.random_range(-3.0..3.0);
            let base = anti.eval(&z);
            (anti.eval(&(&z + e * c)) - base).abs() / base.abs()
        })
        .fold(0.0, f64::max);
    checks.at_most("anti_invariant.com_translation", com_shift, 1e-10);

    let checks = checks.0;
    let overall = if checks.iter().all(|c| c.status == Status::Pass) {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(VerificationReport {
        spectrum: system.spectrum().clone(),
        diagram: system.diagram.clone(),
        order: group.order(),
        seed,
        k: k.0.iter().copied().collect(),
        counting: system.counting(),
        checks,
        overall,
    })
}

/// Least-squares slope of `log|psi(lambda z)|` against `log lambda` over
/// `lambda` in `[0.5, 2]`.
pub fn homogeneity_slope(state: &AntiInvariantState, z: &DVector<f64>) -> f64 {
    let samples: Vec<(f64, f64)> = (0..9)
        .map(|i| {
            let lambda = 0.5 * 4f64.powf(i as f64 / 8.0);
            (lambda.ln(), state.eval(&(z * lambda)).abs().ln())
        })
        .collect();
    let count = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / count;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / count;
    let sxy: f64 = samples.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = samples.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
