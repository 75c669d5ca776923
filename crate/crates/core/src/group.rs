//! Closure of the generating reflections into the full finite group.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::masses::MassSpectrum;
use crate::numfmt;
use crate::roots::{CoxeterDiagram, RootSet};

/// Safe upper bound for the H4 order (14400).
pub const DEFAULT_MAX_ORDER: usize = 20_000;

/// Quantization step of the dedup key (8 decimal digits).
const KEY_QUANTUM: f64 = 1e-8;
/// Entries closer than this to a rounding boundary also probe the neighbor
/// cell, so equal matrices are found whichever side they round to.
const KEY_MARGIN: f64 = 1e-10;
/// Entrywise tolerance when confirming a key hit.
const MATCH_TOL: f64 = 1e-8;
const PARITY_TOL: f64 = 1e-6;
const TRACE_TOL: f64 = 1e-6;

/// Householder reflection `I - 2 beta beta^T` about the mirror with unit
/// normal `beta`.
pub fn reflection_matrix(beta: &DVector<f64>) -> Result<DMatrix<f64>> {
    let norm = beta.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!(
            "mirror normal has length {norm}, expected 1"
        )));
    }
    let n = beta.len();
    Ok(DMatrix::identity(n, n) - beta * beta.transpose() * 2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub matrix: DMatrix<f64>,
    /// Generator word length mod 2; `(-1)^parity` is the determinant.
    pub parity: u8,
    /// Length of the shortest generator word found during closure.
    pub word_length: usize,
}

impl GroupElement {
    pub fn sign(&self) -> f64 {
        if self.parity == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }
}

#[derive(Debug, Clone)]
struct DedupIndex {
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl DedupIndex {
    fn new() -> Self {
        DedupIndex {
            cells: HashMap::new(),
        }
    }

    fn key(m: &DMatrix<f64>) -> Vec<i64> {
        m.iter().map(|x| (x / KEY_QUANTUM).round() as i64).collect()
    }

    /// All keys the matrix may have been filed under.
    fn candidate_keys(m: &DMatrix<f64>) -> Vec<Vec<i64>> {
        let mut keys = vec![Vec::with_capacity(m.len())];
        for &x in m.iter() {
            let scaled = x / KEY_QUANTUM;
            let cell = scaled.round();
            let offset = scaled - cell;
            let alt = if (offset.abs() - 0.5).abs() < KEY_MARGIN / KEY_QUANTUM {
                Some(if offset > 0.0 { cell + 1.0 } else { cell - 1.0 })
            } else {
                None
            };
            match alt {
                None => keys.iter_mut().for_each(|k| k.push(cell as i64)),
                Some(a) => {
                    let mut doubled = keys.clone();
                    keys.iter_mut().for_each(|k| k.push(cell as i64));
                    doubled.iter_mut().for_each(|k| k.push(a as i64));
                    keys.extend(doubled);
                }
            }
        }
        keys
    }

    fn find(&self, m: &DMatrix<f64>, elements: &[GroupElement]) -> Option<usize> {
        Self::candidate_keys(m).iter().find_map(|k| {
            self.cells.get(k).and_then(|ids| {
                ids.iter().copied().find(|&id| {
                    elements[id]
                        .matrix
                        .iter()
                        .zip(m.iter())
                        .all(|(a, b)| (a - b).abs() <= MATCH_TOL)
                })
            })
        })
    }

    fn insert(&mut self, m: &DMatrix<f64>, id: usize) {
        self.cells.entry(Self::key(m)).or_default().push(id);
    }
}

/// A finite reflection group as an explicit list of orthogonal matrices.
#[derive(Debug, Clone)]
pub struct ReflectionGroup {
    roots: RootSet,
    elements: Vec<GroupElement>,
    generators: Vec<DMatrix<f64>>,
    positive_roots: Vec<DVector<f64>>,
    reflection_ids: Vec<usize>,
    interior_point: DVector<f64>,
    index: DedupIndex,
}

impl ReflectionGroup {
    /// Breadth-first closure over products with the generating reflections.
    /// Element 0 is the identity.
    pub fn generate(roots: &RootSet, max_order: usize) -> Result<Self> {
        let n = roots.dim();
        let generators = roots
            .roots()
            .iter()
            .map(reflection_matrix)
            .collect::<Result<Vec<_>>>()?;
        let identity = GroupElement {
            matrix: DMatrix::identity(n, n),
            parity: 0,
            word_length: 0,
        };
        let mut index = DedupIndex::new();
        index.insert(&identity.matrix, 0);
        let mut elements = vec![identity];
        let mut next = 0;
        while next < elements.len() {
            let word_length = elements[next].word_length + 1;
            for s in &generators {
                let product = s * &elements[next].matrix;
                if index.find(&product, &elements).is_some() {
                    continue;
                }
                if elements.len() >= max_order {
                    return Err(Error::ClosureOverflow { max_order });
                }
                let parity = (word_length % 2) as u8;
                let determinant = product.determinant();
                let expected = if parity == 0 { 1.0 } else { -1.0 };
                if (determinant - expected).abs() > PARITY_TOL {
                    return Err(Error::ParityMismatch {
                        word_length,
                        determinant,
                    });
                }
                index.insert(&product, elements.len());
                elements.push(GroupElement {
                    matrix: product,
                    parity,
                    word_length,
                });
            }
            next += 1;
        }

        let interior_point = roots.interior_point()?;
        let mut positive_roots = Vec::new();
        let mut reflection_ids = Vec::new();
        for (id, g) in elements.iter().enumerate() {
            if g.parity == 1 && (g.matrix.trace() - (n as f64 - 2.0)).abs() < TRACE_TOL {
                positive_roots.push(mirror_normal(&g.matrix, &interior_point));
                reflection_ids.push(id);
            }
        }

        Ok(ReflectionGroup {
            roots: roots.clone(),
            elements,
            generators,
            positive_roots,
            reflection_ids,
            interior_point,
            index,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.roots.dim()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, id: usize) -> &GroupElement {
        &self.elements[id]
    }

    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.generators
    }

    pub fn roots(&self) -> &RootSet {
        &self.roots
    }

    pub fn e_com(&self) -> &DVector<f64> {
        self.roots.e_com()
    }

    /// Reference point inside the physical chamber used to orient the
    /// positive roots.
    pub fn interior_point(&self) -> &DVector<f64> {
        &self.interior_point
    }

    /// One unit normal per mirror, oriented so that `beta . z < 0` inside the
    /// physical chamber.
    pub fn positive_roots(&self) -> &[DVector<f64>] {
        &self.positive_roots
    }

    /// Element ids of the pure reflections, aligned with `positive_roots`.
    pub fn reflection_ids(&self) -> &[usize] {
        &self.reflection_ids
    }

    /// Id of the stored element equal to `m` (entrywise within 1e-8).
    pub fn find(&self, m: &DMatrix<f64>) -> Option<usize> {
        self.index.find(m, &self.elements)
    }

    /// Id of `g_a * g_b`.
    pub fn compose(&self, a: usize, b: usize) -> Option<usize> {
        self.find(&(&self.elements[a].matrix * &self.elements[b].matrix))
    }

    /// (even, odd) element counts.
    pub fn parity_counts(&self) -> (usize, usize) {
        let odd = self.elements.iter().filter(|g| g.parity == 1).count();
        (self.order() - odd, odd)
    }

    pub fn summary(&self, diagram: &CoxeterDiagram, with_elements: bool) -> GroupSummary {
        let (even, odd) = self.parity_counts();
        GroupSummary {
            order: self.order(),
            n_reflections: self.positive_roots.len(),
            parity_counts: ParityCounts { even, odd },
            diagram: diagram.clone(),
            elements: with_elements.then(|| {
                self.elements
                    .iter()
                    .map(|g| ElementDump {
                        matrix: g
                            .matrix
                            .row_iter()
                            .map(|r| r.iter().copied().collect())
                            .collect(),
                        parity: g.parity,
                        word_length: g.word_length,
                    })
                    .collect()
            }),
        }
    }
}

/// Mirror normal of a pure reflection: `(I - R) / 2 = beta beta^T`, so any
/// nonzero column spans the mirror normal.
fn mirror_normal(reflection: &DMatrix<f64>, interior: &DVector<f64>) -> DVector<f64> {
    let n = reflection.nrows();
    let projector = (DMatrix::identity(n, n) - reflection) * 0.5;
    let col = (0..n)
        .max_by(|&a, &b| projector[(a, a)].total_cmp(&projector[(b, b)]))
        .expect("nonempty matrix");
    let beta = projector.column(col).normalize();
    if beta.dot(interior) > 0.0 {
        -beta
    } else {
        beta
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParityCounts {
    pub even: usize,
    pub odd: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ElementDump {
    #[serde(serialize_with = "numfmt::real_rows")]
    pub matrix: Vec<Vec<f64>>,
    pub parity: u8,
    pub word_length: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupSummary {
    pub order: usize,
    pub n_reflections: usize,
    pub parity_counts: ParityCounts,
    pub diagram: CoxeterDiagram,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<ElementDump>>,
}

/// Particle contact planes versus group mirrors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountingReport {
    /// Contact planes reachable when particles may pass each other: N(N-1)/2.
    pub contact_planes: usize,
    pub mirrors: usize,
    pub equal: bool,
}

pub fn counting_check(spectrum: &MassSpectrum, group: &ReflectionGroup) -> CountingReport {
    let n = spectrum.len();
    let contact_planes = n * (n - 1) / 2;
    let mirrors = group.positive_roots().len();
    CountingReport {
        contact_planes,
        mirrors,
        equal: contact_planes == mirrors,
    }
}
