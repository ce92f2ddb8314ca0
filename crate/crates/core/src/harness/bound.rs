//! Positive scalar bounds with one-sided semantics.
//!
//! Harness rules compose functional values into products and powers; this
//! tracks first-order error propagation and which side of the true value a
//! composed quantity is known to sit on.

use crate::functionals::{FunctionalValue, ValueKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// |true - value| <= err.
    TwoSided,
    /// true <= value + err.
    Upper,
    /// true >= value - err.
    Lower,
}

#[derive(Debug, Clone, Copy)]
pub struct Bound {
    pub value: f64,
    pub err: f64,
    pub side: Side,
}

impl Bound {
    pub fn exact(value: f64) -> Self {
        Self { value, err: 0.0, side: Side::TwoSided }
    }

    pub fn from_value(fv: &FunctionalValue<f64>) -> Self {
        let side = match fv.kind {
            ValueKind::ClosedForm | ValueKind::Quadrature => Side::TwoSided,
            ValueKind::OptimizerUpperBound => Side::Upper,
            ValueKind::OptimizerLowerBound => Side::Lower,
        };
        Self { value: fv.value, err: fv.err, side }
    }

    pub fn to_value(self, id: &str, resolution: usize) -> FunctionalValue<f64> {
        let kind = match self.side {
            Side::TwoSided => ValueKind::Quadrature,
            Side::Upper => ValueKind::OptimizerUpperBound,
            Side::Lower => ValueKind::OptimizerLowerBound,
        };
        FunctionalValue {
            value: self.value,
            err: self.err,
            kind,
            meta: crate::functionals::Meta {
                id: id.to_string(),
                p: None,
                i: None,
                resolution,
                condition: None,
            },
        }
    }

    /// x^e for positive x; a negative exponent flips the bound side.
    pub fn powf(self, e: f64) -> Self {
        debug_assert!(self.value > 0.0, "bound algebra needs positive values");
        let value = self.value.powf(e);
        let err = (e.abs() * value / self.value) * self.err;
        let side = match (self.side, e >= 0.0) {
            (Side::TwoSided, _) => Side::TwoSided,
            (s, true) => s,
            (Side::Upper, false) => Side::Lower,
            (Side::Lower, false) => Side::Upper,
        };
        Self { value, err, side }
    }

    /// Product of positive bounds; sides must be compatible (a two-sided
    /// factor adopts the other side, equal sides combine; opposite sides
    /// never meet by construction).
    pub fn mul(self, other: Bound) -> Self {
        let side = match (self.side, other.side) {
            (Side::TwoSided, s) => s,
            (s, Side::TwoSided) => s,
            (a, b) if a == b => a,
            _ => {
                debug_assert!(false, "incompatible bound sides multiplied");
                Side::TwoSided
            }
        };
        Self {
            value: self.value * other.value,
            err: self.err * other.value.abs() + other.err * self.value.abs(),
            side,
        }
    }

    pub fn scale(self, c: f64) -> Self {
        debug_assert!(c > 0.0);
        Self { value: self.value * c, err: self.err * c, side: self.side }
    }

    /// Drops the side information; structural by-construction checks compare
    /// values directly and may combine bounds of opposite sides.
    pub fn unsided(self) -> Self {
        Self { side: Side::TwoSided, ..self }
    }

    /// 1 / x.
    pub fn recip(self) -> Self {
        self.powf(-1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

/// What a failed comparison means: `Violated` when the pass condition is a
/// necessary consequence of the theorem given the bound sides, otherwise
/// `Inconclusive` (an estimator sat on the unfavorable side).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailClass {
    Inconclusive,
    Violated,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub label: String,
    pub lhs: Bound,
    pub rhs: Bound,
    pub relation: Relation,
    pub rel_tol: f64,
    pub on_fail: FailClass,
}

impl Comparison {
    pub fn new(
        label: impl Into<String>,
        lhs: Bound,
        rhs: Bound,
        relation: Relation,
        rel_tol: f64,
        on_fail: FailClass,
    ) -> Self {
        Self { label: label.into(), lhs, rhs, relation, rel_tol, on_fail }
    }

    /// Signed satisfaction margin (positive = comfortably satisfied) in
    /// relative units.
    pub fn slack(&self) -> f64 {
        let scale = self.lhs.value.abs().max(self.rhs.value.abs()).max(1e-300);
        match self.relation {
            Relation::Le => (self.rhs.value - self.lhs.value) / scale,
            Relation::Ge => (self.lhs.value - self.rhs.value) / scale,
            Relation::Eq => -(self.lhs.value - self.rhs.value).abs() / scale,
        }
    }

    pub fn passes(&self) -> bool {
        let scale = self.lhs.value.abs().max(self.rhs.value.abs()).max(1e-300);
        let combined = self.lhs.err + self.rhs.err + self.rel_tol * scale;
        match self.relation {
            Relation::Le => self.lhs.value <= self.rhs.value + combined,
            Relation::Ge => self.lhs.value >= self.rhs.value - combined,
            Relation::Eq => (self.lhs.value - self.rhs.value).abs() <= combined,
        }
    }
}
