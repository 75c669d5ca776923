//! Outer normals of the contact hyperplanes and the Coxeter diagram they
//! encode.
//!
//! Indices follow particle pairs: root `i` (for `i` in `2..=N`) is the outer
//! normal of the plane where particles `i-1` and `i` touch.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::DVector;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::masses::JacobiFrame;
use crate::numfmt;

/// Largest Coxeter label considered when inferring a diagram.
pub const MAX_LABEL: u32 = 64;
/// Default tolerance (radians) for matching a mirror angle to 180°/n.
pub const DEFAULT_DIAGRAM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    simple_roots: Vec<DVector<f64>>,
    e_com: DVector<f64>,
}

impl RootSet {
    /// Simple roots of the frame: for each neighboring pair `(i-1, i)`,
    ///
    /// `alpha_i = sqrt(m_i/(m_{i-1}+m_i)) e_{i-1} - sqrt(m_{i-1}/(m_{i-1}+m_i)) e_i`.
    ///
    /// Configurations with `x_1 < ... < x_N` map to `alpha_i . z < 0`.
    pub fn simple_roots(frame: &JacobiFrame) -> Self {
        let n = frame.dim();
        let m = frame.spectrum().masses();
        let simple_roots = (1..n)
            .map(|k| {
                let (a, b) = (m[k - 1], m[k]);
                let mut v = DVector::zeros(n);
                v[k - 1] = (b / (a + b)).sqrt();
                v[k] = -(a / (a + b)).sqrt();
                v
            })
            .collect();
        RootSet {
            simple_roots,
            e_com: frame.e_com().clone(),
        }
    }

    /// Builds a root set from explicit vectors. Each is normalized.
    pub fn from_vectors(roots: Vec<DVector<f64>>, e_com: DVector<f64>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::domain("a root set needs at least one root"));
        }
        let dim = e_com.len();
        let mut simple_roots = Vec::with_capacity(roots.len());
        for r in roots {
            let norm = r.norm();
            if r.len() != dim || !(norm.is_finite() && norm > 0.0) {
                return Err(Error::domain(
                    "roots must be nonzero vectors of the frame dimension",
                ));
            }
            simple_roots.push(r / norm);
        }
        Ok(RootSet {
            simple_roots,
            e_com: e_com.normalize(),
        })
    }

    /// Ambient dimension N.
    pub fn dim(&self) -> usize {
        self.e_com.len()
    }

    /// Number of roots (N - 1 for a particle chain).
    pub fn rank(&self) -> usize {
        self.simple_roots.len()
    }

    /// First and last valid root index.
    pub fn index_range(&self) -> (usize, usize) {
        (2, self.rank() + 1)
    }

    /// Root `i`, indexed by the pair `(i-1, i)`.
    pub fn root(&self, i: usize) -> Result<&DVector<f64>> {
        let (first, last) = self.index_range();
        if i < first || i > last {
            return Err(Error::Index {
                index: i,
                first,
                last,
            });
        }
        Ok(&self.simple_roots[i - 2])
    }

    pub fn roots(&self) -> &[DVector<f64>] {
        &self.simple_roots
    }

    pub fn e_com(&self) -> &DVector<f64> {
        &self.e_com
    }

    /// True when `alpha_i . z < 0` for every root.
    pub fn in_chamber(&self, z: &DVector<f64>) -> bool {
        self.simple_roots.iter().all(|a| a.dot(z) < 0.0)
    }

    /// Angle between the mirrors of roots `i` and `j`, folded into `[0, pi/2]`.
    pub fn angle_between_mirrors(&self, i: usize, j: usize) -> Result<f64> {
        let a = self.root(i)?;
        let b = self.root(j)?;
        if i == j {
            return Err(Error::domain(format!("mirror {i} paired with itself")));
        }
        let between_normals = a.dot(b).clamp(-1.0, 1.0).acos();
        Ok(if between_normals > PI / 2.0 {
            PI - between_normals
        } else {
            between_normals
        })
    }

    /// Dual vectors `w_j` in the span of the roots with `alpha_i . w_j = -delta_ij`.
    /// Positive combinations of them fill the chamber. Requires linearly
    /// independent roots.
    pub fn fundamental_weights(&self) -> Result<Vec<DVector<f64>>> {
        let r = self.rank();
        let gram = nalgebra::DMatrix::from_fn(r, r, |i, j| {
            self.simple_roots[i].dot(&self.simple_roots[j])
        });
        let inverse = gram
            .try_inverse()
            .ok_or_else(|| Error::domain("simple roots are linearly dependent"))?;
        Ok((0..r)
            .map(|j| {
                let mut w = DVector::zeros(self.dim());
                for (i, a) in self.simple_roots.iter().enumerate() {
                    w -= a * inverse[(i, j)];
                }
                w
            })
            .collect())
    }

    /// A unit point strictly inside the chamber, orthogonal to `e_com`, with
    /// `alpha_i . z0` equal for every root.
    pub fn interior_point(&self) -> Result<DVector<f64>> {
        let z0: DVector<f64> = self.fundamental_weights()?.iter().sum();
        let norm = z0.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::domain("degenerate chamber"));
        }
        Ok(z0 / norm)
    }

    pub fn infer_diagram(&self, tol: f64) -> Result<CoxeterDiagram> {
        infer_diagram(self, tol)
    }
}

impl Serialize for RootSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Rows<'a>(&'a [DVector<f64>]);
        impl Serialize for Rows<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let rows: Vec<Vec<f64>> =
                    self.0.iter().map(|v| v.iter().copied().collect()).collect();
                numfmt::real_rows(&rows, s)
            }
        }
        struct Vector<'a>(&'a DVector<f64>);
        impl Serialize for Vector<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                numfmt::reals(self.0.as_slice(), s)
            }
        }
        let mut st = s.serialize_struct("RootSet", 4)?;
        st.serialize_field("dim", &self.dim())?;
        st.serialize_field("first_index", &2)?;
        st.serialize_field("simple_roots", &Rows(&self.simple_roots))?;
        st.serialize_field("e_com", &Vector(&self.e_com))?;
        st.end()
    }
}

/// Dihedral angle between the contact planes of `(prev, mid)` and
/// `(mid, next)`, from the three masses alone.
pub fn dihedral_angle(m_prev: f64, m_mid: f64, m_next: f64) -> Result<f64> {
    for (name, m) in [("m_prev", m_prev), ("m_mid", m_mid), ("m_next", m_next)] {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::domain(format!(
                "{name} = {m} must be positive and finite"
            )));
        }
    }
    Ok((m_mid * (m_prev + m_mid + m_next) / (m_prev * m_next))
        .sqrt()
        .atan())
}

/// Pairwise mirror labels `m_ij`: the mirrors of roots `i` and `j` meet at
/// `pi / m_ij`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoxeterDiagram {
    vertices: Vec<usize>,
    labels: BTreeMap<(usize, usize), u32>,
}

impl CoxeterDiagram {
    pub fn from_labels(vertices: Vec<usize>, labels: BTreeMap<(usize, usize), u32>) -> Self {
        let labels = labels
            .into_iter()
            .map(|((i, j), m)| ((i.min(j), i.max(j)), m))
            .collect();
        CoxeterDiagram { vertices, labels }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// `m_ij`, symmetric; `None` for `i == j` or unknown vertices.
    pub fn label(&self, i: usize, j: usize) -> Option<u32> {
        self.labels.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn labels(&self) -> impl Iterator<Item = ((usize, usize), u32)> + '_ {
        self.labels.iter().map(|(&k, &v)| (k, v))
    }

    /// Angle between mirrors `i` and `j` implied by the label.
    pub fn angle(&self, i: usize, j: usize) -> Option<f64> {
        self.label(i, j).map(|m| PI / m as f64)
    }

    /// Labels between consecutive vertices.
    pub fn chain_labels(&self) -> Vec<u32> {
        self.vertices
            .windows(2)
            .filter_map(|w| self.label(w[0], w[1]))
            .collect()
    }

    /// True when only consecutive vertices are joined.
    pub fn is_chain(&self) -> bool {
        self.labels.iter().all(|(&(i, j), &m)| {
            let adjacent = self
                .vertices
                .windows(2)
                .any(|w| (w[0], w[1]) == (i, j) || (w[1], w[0]) == (i, j));
            adjacent || m == 2
        })
    }

    /// Group order and mirror count for the linear diagrams this crate
    /// meets: A_n, I2(m), H3 and H4. `None` otherwise.
    pub fn known_order(&self) -> Option<(usize, usize)> {
        if !self.is_chain() {
            return None;
        }
        let chain = self.chain_labels();
        let rank = self.vertices.len();
        match chain.as_slice() {
            [] if rank == 1 => Some((2, 1)),
            [m] => Some((2 * *m as usize, *m as usize)),
            [5, 3] | [3, 5] => Some((120, 15)),
            [5, 3, 3] | [3, 3, 5] => Some((14400, 60)),
            c if c.iter().all(|&m| m == 3) => {
                let n = rank;
                Some(((1..=n + 1).product(), n * (n + 1) / 2))
            }
            _ => None,
        }
    }

    /// One-line text form listing the chain labels, e.g. `5 - 3 - 3`.
    pub fn render(&self) -> String {
        if self.vertices.len() == 1 {
            return "•".to_string();
        }
        if self.is_chain() {
            self.chain_labels()
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join(" - ")
        } else {
            self.labels
                .iter()
                .filter(|(_, &m)| m != 2)
                .map(|((i, j), m)| format!("{i}-{j}:{m}"))
                .collect::<Vec<_>>()
                .join(" ")
        }
    }
}

impl fmt::Display for CoxeterDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for CoxeterDiagram {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let labels: Vec<[usize; 3]> = self
            .labels
            .iter()
            .map(|(&(i, j), &m)| [i, j, m as usize])
            .collect();
        let mut st = s.serialize_struct("CoxeterDiagram", 3)?;
        st.serialize_field("vertices", &self.vertices)?;
        st.serialize_field("labels", &labels)?;
        st.serialize_field("text", &self.render())?;
        st.end()
    }
}

/// Matches every pairwise mirror angle to `pi / n` with `n` in `2..=64`.
pub fn infer_diagram(roots: &RootSet, tol: f64) -> Result<CoxeterDiagram> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::domain(format!(
            "diagram tolerance {tol} outside (0, 1e-3]"
        )));
    }
    let (first, last) = roots.index_range();
    let vertices: Vec<usize> = (first..=last).collect();
    let mut labels = BTreeMap::new();
    for i in first..=last {
        for j in i + 1..=last {
            let angle = roots.angle_between_mirrors(i, j)?;
            let n = (2..=MAX_LABEL)
                .find(|&n| (angle - PI / n as f64).abs() < tol)
                .ok_or(Error::NotKaleidoscopic {
                    i,
                    j,
                    degrees: angle.to_degrees(),
                })?;
            labels.insert((i, j), n);
        }
    }
    Ok(CoxeterDiagram { vertices, labels })
}
