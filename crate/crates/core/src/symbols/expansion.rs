use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fourier::FourierMatrix;
use crate::error::{arg, Result};
use crate::linalg::CMat;

pub const DEFAULT_CUTOFF: usize = 16;
pub const DEFAULT_DEPTH: usize = 6;

const LADDER_TOL: f64 = 1e-9;

/// One homogeneous term `sigma(x, xi) = coeff_pm(x) |xi|^order` on `T*S^1`,
/// stored by its values at the two cosphere directions `xi = +1, -1`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousSymbol {
    pub order: f64,
    pub plus: FourierMatrix,
    pub minus: FourierMatrix,
}

impl HomogeneousSymbol {
    pub fn zero(order: f64, rank: usize, cutoff: usize) -> Self {
        HomogeneousSymbol { order, plus: FourierMatrix::zeros(rank, cutoff), minus: FourierMatrix::zeros(rank, cutoff) }
    }

    /// Same coefficient in both directions.
    pub fn even(order: f64, coeff: FourierMatrix) -> Self {
        HomogeneousSymbol { order, plus: coeff.clone(), minus: coeff }
    }

    pub fn is_zero(&self) -> bool {
        self.plus.is_zero() && self.minus.is_zero()
    }

    /// Max-abs over all Fourier coefficients in both directions.
    pub fn norm(&self) -> f64 {
        self.plus.max_abs().max(self.minus.max_abs())
    }

    fn add_assign(&mut self, o: &HomogeneousSymbol) {
        self.plus = &self.plus + &o.plus;
        self.minus = &self.minus + &o.minus;
    }

    fn scaled(&self, cp: Complex64, cm: Complex64) -> Self {
        HomogeneousSymbol { order: self.order, plus: self.plus.scale(cp), minus: self.minus.scale(cm) }
    }
}

/// Truncated classical symbol `sum_j sigma_{m - j/q}` with `q` = `den`
/// (1 for the usual unit-step ladder, 2 when half-integer offsets have been
/// merged in). Components run from the leading order down to
/// `leading - depth`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolExpansion {
    leading: f64,
    den: u32,
    components: Vec<HomogeneousSymbol>,
    rank: usize,
    cutoff: usize,
    truncation_loss: f64,
}

impl SymbolExpansion {
    /// Zero expansion on the unit-step ladder `m, m-1, .., m-depth`.
    pub fn zero(leading: f64, rank: usize, cutoff: usize, depth: usize) -> Self {
        SymbolExpansion::from_components(leading, 1, rank, cutoff, vec![None; depth + 1])
    }

    fn from_components(
        leading: f64,
        den: u32,
        rank: usize,
        cutoff: usize,
        comps: Vec<Option<HomogeneousSymbol>>,
    ) -> Self {
        let components = comps
            .into_iter()
            .enumerate()
            .map(|(j, c)| {
                let order = leading - j as f64 / den as f64;
                match c {
                    Some(mut c) => {
                        c.order = order;
                        c
                    }
                    None => HomogeneousSymbol::zero(order, rank, cutoff),
                }
            })
            .collect();
        SymbolExpansion { leading, den, components, rank, cutoff, truncation_loss: 0.0 }
    }

    /// Builds an expansion from explicit unit-step components.
    pub fn new(leading: f64, components: Vec<HomogeneousSymbol>) -> Result<Self> {
        let Some(first) = components.first() else {
            return arg("a symbol expansion needs at least one component");
        };
        let (rank, cutoff) = (first.plus.rank(), first.plus.cutoff());
        for c in &components {
            for f in [&c.plus, &c.minus] {
                if f.rank() != rank || f.cutoff() != cutoff {
                    return arg("symbol components must share rank and Fourier cutoff");
                }
            }
        }
        Ok(SymbolExpansion::from_components(leading, 1, rank, cutoff, components.into_iter().map(Some).collect()))
    }

    pub fn identity(rank: usize, cutoff: usize, depth: usize) -> Self {
        SymbolExpansion::multiplication(FourierMatrix::identity(rank, cutoff), depth)
    }

    /// Symbol of the multiplication operator by a matrix-valued loop.
    pub fn multiplication(f: FourierMatrix, depth: usize) -> Self {
        let (rank, cutoff) = (f.rank(), f.cutoff());
        let mut comps = vec![None; depth + 1];
        comps[0] = Some(HomogeneousSymbol::even(0.0, f));
        SymbolExpansion::from_components(0.0, 1, rank, cutoff, comps)
    }

    /// Multiplication by a constant matrix.
    pub fn constant(m: &CMat, cutoff: usize, depth: usize) -> Self {
        SymbolExpansion::multiplication(FourierMatrix::constant(m, cutoff), depth)
    }

    /// Every component filled with independent entries uniform in the unit
    /// square on modes `|k| <= max_mode`, separately in each direction.
    pub fn random(leading: f64, rank: usize, cutoff: usize, depth: usize, max_mode: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let km = max_mode.min(cutoff) as i64;
        let draw = |rng: &mut ChaCha8Rng| {
            let mut f = FourierMatrix::zeros(rank, cutoff);
            for k in -km..=km {
                for i in 0..rank {
                    for j in 0..rank {
                        f.set_entry(k, i, j, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
                    }
                }
            }
            f
        };
        let comps = (0..=depth)
            .map(|_| {
                let plus = draw(&mut rng);
                let minus = draw(&mut rng);
                Some(HomogeneousSymbol { order: 0.0, plus, minus })
            })
            .collect();
        SymbolExpansion::from_components(leading, 1, rank, cutoff, comps)
    }

    pub fn leading_order(&self) -> f64 {
        self.leading
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Ladder step denominator: orders are `leading - j/den`.
    pub fn step_denominator(&self) -> u32 {
        self.den
    }

    /// Truncation depth in order units.
    pub fn depth(&self) -> f64 {
        self.steps() as f64 / self.den as f64
    }

    fn steps(&self) -> usize {
        self.components.len() - 1
    }

    pub fn lowest_order(&self) -> f64 {
        self.leading - self.depth()
    }

    pub fn components(&self) -> &[HomogeneousSymbol] {
        &self.components
    }

    /// Accumulated energy of Fourier modes discarded by products.
    pub fn truncation_loss(&self) -> f64 {
        self.truncation_loss
    }

    pub fn with_truncation_loss(mut self, loss: f64) -> Self {
        self.truncation_loss = loss;
        self
    }

    /// The component at a given order, if that order sits on the ladder.
    pub fn component_at(&self, order: f64) -> Option<&HomogeneousSymbol> {
        let j = (self.leading - order) * self.den as f64;
        let jr = j.round();
        if (j - jr).abs() > LADDER_TOL || jr < 0.0 {
            return None;
        }
        self.components.get(jr as usize)
    }

    /// Largest component norm.
    pub fn max_norm(&self) -> f64 {
        self.components.iter().map(HomogeneousSymbol::norm).fold(0.0, f64::max)
    }

    /// Highest order carrying a component of norm above `tol`.
    pub fn effective_order(&self, tol: f64) -> Option<f64> {
        self.components.iter().find(|c| c.norm() > tol).map(|c| c.order)
    }

    /// Re-expresses on a finer ladder with step `1/den` (zero padding).
    fn regrid(&self, den: u32) -> Self {
        if den == self.den {
            return self.clone();
        }
        assert!(den % self.den == 0, "ladder refinement must divide");
        let f = (den / self.den) as usize;
        let mut comps = vec![None; self.steps() * f + 1];
        for (j, c) in self.components.iter().enumerate() {
            comps[j * f] = Some(c.clone());
        }
        SymbolExpansion::from_components(self.leading, den, self.rank, self.cutoff, comps)
            .with_truncation_loss(self.truncation_loss)
    }

    fn check_compatible(&self, o: &SymbolExpansion) -> Result<()> {
        if self.rank != o.rank {
            return arg(format!("symbol rank mismatch: {} vs {}", self.rank, o.rank));
        }
        if self.cutoff != o.cutoff {
            return arg(format!("Fourier cutoff mismatch: {} vs {}", self.cutoff, o.cutoff));
        }
        Ok(())
    }

    /// Common ladder denominator for two leading orders, if one exists.
    fn common_den(&self, o: &SymbolExpansion) -> Result<u32> {
        let base = self.den.max(o.den);
        for den in [base, 2 * base] {
            let diff = (self.leading - o.leading) * den as f64;
            if (diff - diff.round()).abs() < LADDER_TOL {
                return Ok(den);
            }
        }
        arg(format!(
            "order ladders {} and {} are not compatible modulo 1/2",
            self.leading, o.leading
        ))
    }

    /// Symbol of the composition `A o B`:
    /// `sum_a ((-i)^a / a!) d_xi^a sigma(A) d_x^a sigma(B)`, truncated at
    /// depth `min(J_A, J_B)` below the new leading order.
    pub fn compose(&self, o: &SymbolExpansion) -> Result<SymbolExpansion> {
        self.check_compatible(o)?;
        let den = self.den.max(o.den);
        let a = self.regrid(den);
        let b = o.regrid(den);
        let steps = a.steps().min(b.steps());
        let mut out: Vec<HomogeneousSymbol> = (0..=steps)
            .map(|j| HomogeneousSymbol::zero(a.leading + b.leading - j as f64 / den as f64, a.rank, a.cutoff))
            .collect();
        let mut loss = a.truncation_loss + b.truncation_loss;
        let d = den as usize;
        for (ia, ca) in a.components.iter().enumerate().take(steps + 1) {
            if ca.is_zero() {
                continue;
            }
            for (ib, cb) in b.components.iter().enumerate().take(steps + 1 - ia) {
                if cb.is_zero() {
                    continue;
                }
                let mut alpha = 0usize;
                let mut falling = 1.0;
                let mut fact = 1.0;
                while ia + ib + alpha * d <= steps {
                    if falling == 0.0 {
                        break;
                    }
                    let pre = Complex64::new(0.0, -1.0).powu(alpha as u32) * (falling / fact);
                    let sign_minus = if alpha % 2 == 0 { 1.0 } else { -1.0 };
                    let bx = HomogeneousSymbol {
                        order: cb.order,
                        plus: cb.plus.derivative(alpha as u32),
                        minus: cb.minus.derivative(alpha as u32),
                    };
                    if !bx.is_zero() {
                        let (pp, lp) = ca.plus.mul_truncated(&bx.plus);
                        let (pm, lm) = ca.minus.mul_truncated(&bx.minus);
                        loss += lp + lm;
                        let term = HomogeneousSymbol { order: 0.0, plus: pp, minus: pm }.scaled(pre, pre * sign_minus);
                        out[ia + ib + alpha * d].add_assign(&term);
                    }
                    falling *= ca.order - alpha as f64;
                    alpha += 1;
                    fact *= alpha as f64;
                }
            }
        }
        Ok(SymbolExpansion {
            leading: a.leading + b.leading,
            den,
            components: out,
            rank: a.rank,
            cutoff: a.cutoff,
            truncation_loss: loss,
        })
    }

    /// Sum of two expansions. Orders must agree modulo 1/2; the result keeps
    /// only orders both operands resolve.
    pub fn checked_add(&self, o: &SymbolExpansion) -> Result<SymbolExpansion> {
        self.check_compatible(o)?;
        let den = self.common_den(o)?;
        let leading = self.leading.max(o.leading);
        let low = self.lowest_order().max(o.lowest_order());
        let steps = ((leading - low) * den as f64).round().max(0.0) as usize;
        let mut comps: Vec<HomogeneousSymbol> = (0..=steps)
            .map(|j| HomogeneousSymbol::zero(leading - j as f64 / den as f64, self.rank, self.cutoff))
            .collect();
        for e in [self, o] {
            for c in &e.components {
                let j = ((leading - c.order) * den as f64).round();
                if j >= 0.0 && (j as usize) <= steps {
                    comps[j as usize].add_assign(c);
                }
            }
        }
        Ok(SymbolExpansion {
            leading,
            den,
            components: comps,
            rank: self.rank,
            cutoff: self.cutoff,
            truncation_loss: self.truncation_loss + o.truncation_loss,
        })
    }

    pub fn checked_sub(&self, o: &SymbolExpansion) -> Result<SymbolExpansion> {
        self.checked_add(&o.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `A B - B A`.
    pub fn commutator(&self, o: &SymbolExpansion) -> Result<SymbolExpansion> {
        self.compose(o)?.checked_sub(&o.compose(self)?)
    }

    pub fn scale(&self, k: Complex64) -> SymbolExpansion {
        let mut out = self.clone();
        for c in &mut out.components {
            *c = c.scaled(k, k);
        }
        out
    }

    /// Componentwise max-abs difference, on the common ladder.
    pub fn distance(&self, o: &SymbolExpansion) -> Result<f64> {
        Ok(self.checked_sub(o)?.max_norm())
    }

    /// Drops orders below `leading - depth`.
    pub fn truncate(&self, depth: f64) -> SymbolExpansion {
        let keep = ((depth * self.den as f64).round().max(0.0) as usize).min(self.steps());
        let mut out = self.clone();
        out.components.truncate(keep + 1);
        out
    }

    pub(crate) fn raw(
        leading: f64,
        den: u32,
        rank: usize,
        cutoff: usize,
        components: Vec<HomogeneousSymbol>,
        truncation_loss: f64,
    ) -> Self {
        SymbolExpansion { leading, den, components, rank, cutoff, truncation_loss }
    }
}
