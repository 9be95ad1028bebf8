//! JSON formats for operators, states, families and graphs.
//!
//! Matrices are row-major lists of rows, each entry an `[re, im]` pair:
//!
//! ```json
//! {"support": ["A", "C"], "matrix": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]}
//! ```
//!
//! A family file carries its layout and a list of such operators; a state
//! file is either `{"layout": .., "operator": ..}` or a bare operator, in
//! which case every site is assumed to have the same dimension.

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::eig::CMatrix;
use crate::error::{Error, Result};
use crate::layout::{Site, SystemLayout};
use crate::markov::MarginalFamily;
use crate::operator::{DensityOperator, Operator};

pub type MatrixRepr = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_repr(m: &CMatrix) -> MatrixRepr {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn matrix_from_repr(rows: &MatrixRepr) -> Result<CMatrix> {
    let n = rows.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::Format(format!(
            "matrix row {i} has {} entries, expected {n}",
            r.len()
        )));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorRepr {
    pub support: Vec<String>,
    pub matrix: MatrixRepr,
}

impl From<&Operator> for OperatorRepr {
    fn from(op: &Operator) -> Self {
        OperatorRepr {
            support: op.labels(),
            matrix: matrix_to_repr(op.matrix()),
        }
    }
}

impl OperatorRepr {
    /// Resolve against `layout`; the result is reordered to layout order.
    pub fn to_operator(&self, layout: &SystemLayout) -> Result<Operator> {
        let sites = self
            .support
            .iter()
            .map(|l| layout.site(l).cloned())
            .collect::<Result<Vec<Site>>>()?;
        let op = Operator::new(sites, matrix_from_repr(&self.matrix)?)?;
        op.embed_into(&layout.subset(&self.support)?)
    }

    /// Layout with every support site of the same inferred dimension.
    pub fn uniform_layout(&self) -> Result<SystemLayout> {
        let n = self.matrix.len();
        let k = self.support.len() as u32;
        let d = if k == 0 {
            1
        } else {
            (n as f64).powf(1.0 / k as f64).round() as usize
        };
        if d.checked_pow(k) != Some(n) {
            return Err(Error::Format(format!(
                "dimension {n} is not a power for {k} sites"
            )));
        }
        SystemLayout::new(
            self.support
                .iter()
                .map(|l| Site::new(l.clone(), d))
                .collect(),
        )
    }
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorRepr::from(self).serialize(s)
    }
}

impl Serialize for DensityOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.op().serialize(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateFile {
    WithLayout {
        layout: SystemLayout,
        operator: OperatorRepr,
    },
    Bare(OperatorRepr),
}

impl StateFile {
    pub fn from_state(layout: &SystemLayout, rho: &DensityOperator) -> Self {
        StateFile::WithLayout {
            layout: layout.clone(),
            operator: rho.op().into(),
        }
    }

    /// Parse either form, choosing by the presence of a `layout` key so that
    /// errors name the offending field.
    pub fn parse(text: &str) -> Result<Self> {
        let v: serde_json::Value = parse(text)?;
        let field = |e: serde_json::Error| Error::Format(e.to_string());
        if v.get("layout").is_some() {
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct WithLayout {
                layout: SystemLayout,
                operator: OperatorRepr,
            }
            let w: WithLayout = serde_json::from_value(v).map_err(field)?;
            Ok(StateFile::WithLayout {
                layout: w.layout,
                operator: w.operator,
            })
        } else {
            Ok(StateFile::Bare(serde_json::from_value(v).map_err(field)?))
        }
    }

    pub fn to_state(&self) -> Result<DensityOperator> {
        let (layout, op) = match self {
            StateFile::WithLayout { layout, operator } => (layout.clone(), operator),
            StateFile::Bare(op) => (op.uniform_layout()?, op),
        };
        DensityOperator::new(op.to_operator(&layout)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyFile {
    pub layout: SystemLayout,
    pub marginals: Vec<OperatorRepr>,
}

impl FamilyFile {
    pub fn from_family(f: &MarginalFamily) -> Self {
        FamilyFile {
            layout: f.layout().clone(),
            marginals: f.entries().map(|(_, r)| r.op().into()).collect(),
        }
    }

    pub fn to_family(&self) -> Result<MarginalFamily> {
        let states = self
            .marginals
            .iter()
            .map(|m| DensityOperator::new(m.to_operator(&self.layout)?))
            .collect::<Result<Vec<_>>>()?;
        MarginalFamily::new(self.layout.clone(), states)
    }
}

/// Parse JSON text, mapping serde errors to [`Error::Format`].
pub fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}
