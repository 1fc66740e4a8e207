//! Skip-free lattice paths: integer walks whose steps are all ≥ -1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    /// Any arrangement of the steps; ends at `-rho`.
    Bridge,
    /// Stays above `-rho` until its final step, where it first hits `-rho`.
    FirstPassage,
    /// A first-passage path read as the depth-first encoding of a forest.
    Lukasiewicz,
}

/// A path `W(0) = 0, W(i+1) = W(i) + steps[i]` with every step ≥ -1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePath {
    steps: Vec<i64>,
    kind: PathKind,
}

impl LatticePath {
    pub fn new(steps: Vec<i64>, kind: PathKind) -> Result<Self> {
        if let Some(i) = steps.iter().position(|&s| s < -1) {
            return Err(Error::MalformedPath(format!("step {i} is {} < -1", steps[i])));
        }
        let p = LatticePath { steps, kind };
        if kind != PathKind::Bridge {
            p.check_first_passage()?;
        }
        Ok(p)
    }

    pub(crate) fn new_unchecked(steps: Vec<i64>, kind: PathKind) -> Self {
        LatticePath { steps, kind }
    }

    fn check_first_passage(&self) -> Result<()> {
        let target = self.terminal();
        if target >= 0 {
            return Err(Error::MalformedPath(format!("terminal value {target} is not negative")));
        }
        let mut w = 0i64;
        for (i, &s) in self.steps[..self.steps.len() - 1].iter().enumerate() {
            w += s;
            if w <= target {
                return Err(Error::MalformedPath(format!(
                    "reaches {w} at index {} before the end (target {target})",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn with_kind(self, kind: PathKind) -> Result<Self> {
        LatticePath::new(self.steps, kind)
    }

    pub fn steps(&self) -> &[i64] {
        &self.steps
    }

    pub fn into_steps(self) -> Vec<i64> {
        self.steps
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `W(0), ..., W(len)`.
    pub fn values(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut w = 0;
        out.push(0);
        for &s in &self.steps {
            w += s;
            out.push(w);
        }
        out
    }

    pub fn terminal(&self) -> i64 {
        self.steps.iter().sum()
    }

    /// `min_{j ≤ i} W(j)` for every `i`.
    pub fn running_min(&self) -> Vec<i64> {
        let mut m = 0;
        self.values()
            .into_iter()
            .map(|w| {
                m = m.min(w);
                m
            })
            .collect()
    }

    /// One step per line.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.steps.len() * 3);
        for s in &self.steps {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str, kind: PathKind) -> Result<Self> {
        let steps = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.parse::<i64>().map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        LatticePath::new(steps, kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_and_running_min() {
        let p = LatticePath::new(vec![1, -1, -1, 2, -1, -1, -1], PathKind::Lukasiewicz).unwrap();
        assert_eq!(p.values(), vec![0, 1, 0, -1, 1, 0, -1, -2]);
        assert_eq!(p.running_min(), vec![0, 0, 0, -1, -1, -1, -1, -2]);
        assert_eq!(p.terminal(), -2);
    }

    #[test]
    fn rejects_bad_paths() {
        assert!(LatticePath::new(vec![-2, 1], PathKind::Bridge).is_err());
        assert!(LatticePath::new(vec![0, -1], PathKind::Lukasiewicz).is_ok());
        assert!(LatticePath::new(vec![-1, 0], PathKind::Lukasiewicz).is_err());
        assert!(LatticePath::new(vec![-1, -1, 1], PathKind::Lukasiewicz).is_err());
        assert!(LatticePath::new(vec![1, -1], PathKind::FirstPassage).is_err());
        assert!(LatticePath::new(vec![1, -1], PathKind::Bridge).is_ok());
    }

    #[test]
    fn text_round_trip() {
        let p = LatticePath::new(vec![0, 3, -1, -1, -1, -1], PathKind::Lukasiewicz).unwrap();
        assert_eq!(LatticePath::from_text(&p.to_text(), PathKind::Lukasiewicz).unwrap(), p);
    }
}
