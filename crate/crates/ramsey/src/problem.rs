//! Problem definitions shared by every engine: which variant is being
//! computed, the target pattern(s), the symmetry and color regime, and any
//! additional forbidden colored graphs.

use crate::graphs::{ColoredCompleteGraph, GraphPattern, Symmetry};
use thiserror::Error;

/// The three number variants.
///
/// `Er`: colorings of the ordered complete graph with arbitrarily many
/// colors, forbidding a canonically colored copy of an ordered target.
/// `Cr`: colorings of the unordered complete graph with arbitrarily many
/// colors, forbidding an orderable copy of `g` and a rainbow copy of `h`.
/// `Or`: 2-colorings of the ordered complete graph, forbidding a
/// monochromatic copy of an ordered target.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Variant {
    Er,
    Cr,
    Or,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ColorRegime {
    Two,
    Unbounded,
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum ProblemError {
    #[error("ER and OR targets must be ordered patterns")]
    TargetMustBeOrdered,
    #[error("CR targets must be unordered patterns")]
    TargetMustBeUnordered,
    #[error("CR requires a rainbow target h")]
    MissingRainbowTarget,
    #[error("auxiliary forbidden graph has more than one vertex class regime issue: {0}")]
    BadAuxiliary(String),
}

/// A fully specified search problem. The variant pins the symmetry and the
/// color regime: ER and OR are ordered, CR is unordered; OR uses exactly two
/// classes, ER and CR are unbounded.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub id: String,
    pub variant: Variant,
    pub g: GraphPattern,
    pub h: Option<GraphPattern>,
    pub aux_forbidden: Vec<ColoredCompleteGraph>,
}

impl ProblemSpec {
    pub fn er(id: impl Into<String>, g: GraphPattern) -> Result<Self, ProblemError> {
        if !g.ordered() {
            return Err(ProblemError::TargetMustBeOrdered);
        }
        Ok(Self {
            id: id.into(),
            variant: Variant::Er,
            g,
            h: None,
            aux_forbidden: Vec::new(),
        })
    }

    pub fn or(id: impl Into<String>, g: GraphPattern) -> Result<Self, ProblemError> {
        if !g.ordered() {
            return Err(ProblemError::TargetMustBeOrdered);
        }
        Ok(Self {
            id: id.into(),
            variant: Variant::Or,
            g,
            h: None,
            aux_forbidden: Vec::new(),
        })
    }

    pub fn cr(
        id: impl Into<String>,
        g: GraphPattern,
        h: GraphPattern,
    ) -> Result<Self, ProblemError> {
        if g.ordered() || h.ordered() {
            return Err(ProblemError::TargetMustBeUnordered);
        }
        Ok(Self {
            id: id.into(),
            variant: Variant::Cr,
            g,
            h: Some(h),
            aux_forbidden: Vec::new(),
        })
    }

    pub fn with_aux(mut self, aux: Vec<ColoredCompleteGraph>) -> Self {
        self.aux_forbidden = aux;
        self
    }

    pub fn symmetry(&self) -> Symmetry {
        match self.variant {
            Variant::Er | Variant::Or => Symmetry::Ordered,
            Variant::Cr => Symmetry::Unordered,
        }
    }

    pub fn color_regime(&self) -> ColorRegime {
        match self.variant {
            Variant::Or => ColorRegime::Two,
            Variant::Er | Variant::Cr => ColorRegime::Unbounded,
        }
    }

    /// Largest pattern size among the targets and auxiliaries.
    pub fn max_pattern_size(&self) -> usize {
        let mut m = self.g.m();
        if let Some(h) = &self.h {
            m = m.max(h.m());
        }
        for a in &self.aux_forbidden {
            m = m.max(a.n());
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_regimes() {
        let c3o = GraphPattern::cycle(3, true);
        let c3u = GraphPattern::cycle(3, false);
        let k4 = GraphPattern::complete(4, false);
        let er = ProblemSpec::er("er-c3", c3o.clone()).unwrap();
        assert_eq!(er.symmetry(), Symmetry::Ordered);
        assert_eq!(er.color_regime(), ColorRegime::Unbounded);
        let or = ProblemSpec::or("or-c3", c3o.clone()).unwrap();
        assert_eq!(or.color_regime(), ColorRegime::Two);
        let cr = ProblemSpec::cr("cr-4-3", k4, c3u.clone()).unwrap();
        assert_eq!(cr.symmetry(), Symmetry::Unordered);
        assert!(ProblemSpec::er("bad", c3u.clone()).is_err());
        assert!(ProblemSpec::cr("bad", c3o, c3u).is_err());
    }
}
