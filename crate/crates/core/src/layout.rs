use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A labeled tensor factor with its local Hilbert-space dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Site {
    pub label: String,
    pub dim: usize,
}

impl Site {
    pub fn new(label: impl Into<String>, dim: usize) -> Self {
        Site {
            label: label.into(),
            dim,
        }
    }
}

/// Ordered list of sites defining the global tensor space.
///
/// Every operator built against a layout stores its support in layout order,
/// with the leftmost site as the most significant digit of the matrix index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LayoutRepr", into = "LayoutRepr")]
pub struct SystemLayout {
    sites: Vec<Site>,
}

#[derive(Serialize, Deserialize)]
struct LayoutRepr {
    sites: Vec<Site>,
}

impl TryFrom<LayoutRepr> for SystemLayout {
    type Error = Error;
    fn try_from(r: LayoutRepr) -> Result<Self> {
        SystemLayout::new(r.sites)
    }
}

impl From<SystemLayout> for LayoutRepr {
    fn from(l: SystemLayout) -> Self {
        LayoutRepr { sites: l.sites }
    }
}

impl SystemLayout {
    pub fn new(sites: Vec<Site>) -> Result<Self> {
        for (i, s) in sites.iter().enumerate() {
            if s.dim == 0 {
                return Err(Error::InvalidLayout(format!(
                    "site {:?} has dimension 0",
                    s.label
                )));
            }
            if sites[..i].iter().any(|t| t.label == s.label) {
                return Err(Error::InvalidLayout(format!(
                    "duplicate label {:?}",
                    s.label
                )));
            }
        }
        Ok(SystemLayout { sites })
    }

    /// `n` qubits labeled `"1"`, ..., `"n"`.
    pub fn qubits(n: usize) -> Self {
        SystemLayout {
            sites: (1..=n).map(|i| Site::new(i.to_string(), 2)).collect(),
        }
    }

    /// Sites with the given dimensions, labeled `"1"`, `"2"`, ...
    pub fn with_dims(dims: &[usize]) -> Result<Self> {
        Self::new(
            dims.iter()
                .enumerate()
                .map(|(i, &d)| Site::new((i + 1).to_string(), d))
                .collect(),
        )
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn labels(&self) -> Vec<String> {
        self.sites.iter().map(|s| s.label.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.sites.iter().map(|s| s.dim).product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.sites.iter().position(|s| s.label == label)
    }

    pub fn site(&self, label: &str) -> Result<&Site> {
        self.sites
            .iter()
            .find(|s| s.label == label)
            .ok_or_else(|| Error::SupportMismatch(format!("unknown site {label:?}")))
    }

    /// Resolve labels to sites, returned in layout order without duplicates.
    pub fn subset<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<Site>> {
        for l in labels {
            self.site(l.as_ref())?;
        }
        Ok(self
            .sites
            .iter()
            .filter(|s| labels.iter().any(|l| l.as_ref() == s.label))
            .cloned()
            .collect())
    }

    /// Labels of `a ∪ b` in layout order.
    pub fn union<S: AsRef<str>, T: AsRef<str>>(&self, a: &[S], b: &[T]) -> Result<Vec<String>> {
        let mut all: Vec<&str> = a.iter().map(|s| s.as_ref()).collect();
        all.extend(b.iter().map(|s| s.as_ref()));
        Ok(self.subset(&all)?.into_iter().map(|s| s.label).collect())
    }

    /// Labels of `a ∩ b` in layout order.
    pub fn intersection<S: AsRef<str>, T: AsRef<str>>(
        &self,
        a: &[S],
        b: &[T],
    ) -> Result<Vec<String>> {
        let sa = self.subset(a)?;
        Ok(sa
            .into_iter()
            .filter(|s| b.iter().any(|l| l.as_ref() == s.label))
            .map(|s| s.label)
            .collect())
    }

    /// Labels of the layout not in `a`, in layout order.
    pub fn complement<S: AsRef<str>>(&self, a: &[S]) -> Result<Vec<String>> {
        self.subset(a)?;
        Ok(self
            .sites
            .iter()
            .filter(|s| !a.iter().any(|l| l.as_ref() == s.label))
            .map(|s| s.label.clone())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_labels() {
        let r = SystemLayout::new(vec![Site::new("A", 2), Site::new("A", 3)]);
        assert!(matches!(r, Err(Error::InvalidLayout(_))));
    }

    #[test]
    fn subset_operations_resolve_by_label() {
        let l = SystemLayout::new(vec![
            Site::new("A", 2),
            Site::new("B", 3),
            Site::new("C", 1),
        ])
        .unwrap();
        assert_eq!(l.total_dim(), 6);
        assert_eq!(l.union(&["C", "A"], &["A"]).unwrap(), vec!["A", "C"]);
        assert_eq!(l.intersection(&["C", "B"], &["B", "A"]).unwrap(), vec!["B"]);
        assert_eq!(l.complement(&["B"]).unwrap(), vec!["A", "C"]);
        assert!(l.subset(&["D"]).is_err());
    }

    #[test]
    fn layout_json_shape() {
        let l = SystemLayout::qubits(2);
        let s = serde_json::to_string(&l).unwrap();
        assert_eq!(
            s,
            r#"{"sites":[{"label":"1","dim":2},{"label":"2","dim":2}]}"#
        );
        let back: SystemLayout = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l);
    }
}
