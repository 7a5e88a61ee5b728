use num_complex::Complex64;

use crate::error::{arg, Result};
use crate::linalg::{trace, CMat};
use crate::symbols::{leading_order_trace, wodzicki_residue, SymbolExpansion};

/// Which trace closes a product of curvature values into a number.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TraceKind {
    #[default]
    Matrix,
    Wodzicki,
    LeadingOrder,
}

impl std::str::FromStr for TraceKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix" => Ok(TraceKind::Matrix),
            "wodzicki" => Ok(TraceKind::Wodzicki),
            "leading-order" => Ok(TraceKind::LeadingOrder),
            _ => arg(format!("unknown trace `{s}` (matrix | wodzicki | leading-order)")),
        }
    }
}

/// Values a connection can take: finite matrices or operator symbols.
pub trait Algebra: Clone + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn scaled(&self, k: Complex64) -> Self;
    fn trace_with(&self, kind: TraceKind) -> Result<Complex64>;
    /// Bundle rank (matrix size).
    fn rank(&self) -> usize;
}

impl Algebra for CMat {
    fn zero_like(&self) -> Self {
        CMat::zeros(self.nrows(), self.ncols())
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn scaled(&self, k: Complex64) -> Self {
        self * k
    }
    fn trace_with(&self, kind: TraceKind) -> Result<Complex64> {
        match kind {
            TraceKind::Matrix => Ok(trace(self)),
            other => arg(format!("{other:?} trace needs symbol-valued curvature")),
        }
    }
    fn rank(&self) -> usize {
        self.nrows()
    }
}

/// Symbol arithmetic inside a single connection family always uses
/// compatible ladders, so ladder mismatches here are programming errors.
impl Algebra for SymbolExpansion {
    fn zero_like(&self) -> Self {
        self.scale(Complex64::new(0.0, 0.0))
    }
    fn plus(&self, o: &Self) -> Self {
        self.checked_add(o).expect("symbol ladders of one connection family are compatible")
    }
    fn times(&self, o: &Self) -> Self {
        self.compose(o).expect("symbol ladders of one connection family are compatible")
    }
    fn scaled(&self, k: Complex64) -> Self {
        self.scale(k)
    }
    fn trace_with(&self, kind: TraceKind) -> Result<Complex64> {
        match kind {
            TraceKind::Wodzicki => Ok(wodzicki_residue(self).value),
            TraceKind::LeadingOrder => Ok(leading_order_trace(self, None)?.value),
            TraceKind::Matrix => arg("matrix trace is not defined on operator symbols"),
        }
    }
    fn rank(&self) -> usize {
        SymbolExpansion::rank(self)
    }
}
