//! Truncated Fock-space linear algebra: states, ladder operators,
//! expectation values, exponential actions and overlaps.
//!
//! Conventions used throughout the crate:
//!
//! * A mode truncated at `cutoff` keeps the number states |0⟩..|cutoff⟩,
//!   so state vectors hold `cutoff + 1` amplitudes.
//! * Two-mode amplitudes are stored row-major with mode A as the row
//!   index: the flat index of |n⟩_A ⊗ |m⟩_B is `n * (cutoff_b + 1) + m`.
//! * Quadratures are X = a + a† and Y = −i(a − a†), so the vacuum has
//!   unit variance in both and \[X, Y\] = 2i.
//!
//! All operations are pure; identical inputs produce bit-identical
//! outputs.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tiny negative variances from round-off are clamped to zero below this.
pub const VARIANCE_CLAMP: f64 = 1e-12;

/// Default bound on the norm loss tolerated by [`apply_exponential`].
pub const DEFAULT_LEAK_TOL: f64 = 1e-9;

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Single-mode pure state as amplitudes over |0⟩..|cutoff⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeState {
    cutoff: usize,
    amps: Vec<C64>,
}

impl ModeState {
    /// Wrap raw amplitudes; `amps[n]` multiplies |n⟩.
    pub fn from_amps(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self { cutoff: amps.len() - 1, amps })
    }

    pub fn vacuum(cutoff: usize) -> Self {
        let mut amps = vec![C64::ZERO; cutoff + 1];
        amps[0] = C64::ONE;
        Self { cutoff, amps }
    }

    pub fn number(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::InvalidParameter {
                name: "n",
                value: n as f64,
                requirement: "n <= cutoff",
            });
        }
        let mut amps = vec![C64::ZERO; cutoff + 1];
        amps[n] = C64::ONE;
        Ok(Self { cutoff, amps })
    }

    /// Coherent state truncated at `cutoff` and renormalized.
    pub fn coherent(alpha: C64, cutoff: usize) -> Self {
        let mut amps = Vec::with_capacity(cutoff + 1);
        let mut c = C64::from((-0.5 * alpha.norm_sqr()).exp());
        amps.push(c);
        for n in 1..=cutoff {
            c *= alpha / (n as f64).sqrt();
            amps.push(c);
        }
        let mut s = Self { cutoff, amps };
        s.normalize().expect("coherent amplitudes are nonzero");
        s
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// Scale to unit norm; returns the norm the state had before.
    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        for a in &mut self.amps {
            *a /= n;
        }
        Ok(n)
    }
}

/// Two-mode pure state; see the module docs for the index order.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeState {
    cutoff_a: usize,
    cutoff_b: usize,
    amps: Vec<C64>,
}

impl TwoModeState {
    pub fn vacuum(cutoff_a: usize, cutoff_b: usize) -> Self {
        let mut amps = vec![C64::ZERO; (cutoff_a + 1) * (cutoff_b + 1)];
        amps[0] = C64::ONE;
        Self { cutoff_a, cutoff_b, amps }
    }

    pub fn from_amps(cutoff_a: usize, cutoff_b: usize, amps: Vec<C64>) -> Result<Self> {
        let dim = (cutoff_a + 1) * (cutoff_b + 1);
        if amps.len() != dim {
            return Err(Error::DimensionMismatch { left: amps.len(), right: dim });
        }
        Ok(Self { cutoff_a, cutoff_b, amps })
    }

    pub fn cutoff_a(&self) -> usize {
        self.cutoff_a
    }

    pub fn cutoff_b(&self) -> usize {
        self.cutoff_b
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Amplitude of |n⟩_A ⊗ |m⟩_B.
    pub fn amp(&self, n: usize, m: usize) -> C64 {
        self.amps[n * (self.cutoff_b + 1) + m]
    }

    pub fn set_amp(&mut self, n: usize, m: usize, v: C64) {
        self.amps[n * (self.cutoff_b + 1) + m] = v;
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        for a in &mut self.amps {
            *a /= n;
        }
        Ok(n)
    }

    /// Probability mass sitting on the outermost levels (n_A = cutoff_a or
    /// n_B = cutoff_b). A truncated unitary flow conserves norm, so this
    /// is the signal that amplitude wanted to move past the cutoff.
    pub fn boundary_mass(&self) -> f64 {
        let mut acc = 0.0;
        for m in 0..=self.cutoff_b {
            acc += self.amp(self.cutoff_a, m).norm_sqr();
        }
        for n in 0..self.cutoff_a {
            acc += self.amp(n, self.cutoff_b).norm_sqr();
        }
        acc
    }
}

/// Complex sparse matrix in compressed-row form.
///
/// Fock-space operators are a few diagonals wide, and their two-mode
/// embeddings stay sparse; dense storage would not fit in memory at the
/// cutoffs the adaptive rule picks.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl OperatorMatrix {
    /// Build from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut t: Vec<(usize, usize, C64)> = triplets.into_iter().collect();
        for &(r, c, _) in &t {
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch { left: r.max(c) + 1, right: dim });
            }
        }
        t.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        let mut row_ptr = vec![0usize; dim + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let cols = merged.iter().map(|&(_, c, _)| c).collect();
        let vals = merged.iter().map(|&(_, _, v)| v).collect();
        Ok(Self { dim, row_ptr, cols, vals })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::from_triplets(dim, std::iter::empty())
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, C64::ONE)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    /// Entry lookup, zero for positions without stored values.
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.row(row)
            .find(|&(c, _)| c == col)
            .map(|(_, v)| v)
            .unwrap_or(C64::ZERO)
    }

    /// Matrix-vector product.
    pub fn apply(&self, vec: &[C64]) -> Result<Vec<C64>> {
        if vec.len() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: vec.len() });
        }
        let mut out = vec![C64::ZERO; self.dim];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = C64::ZERO;
            for (c, v) in self.row(i) {
                acc += v * vec[c];
            }
            *o = acc;
        }
        Ok(out)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: rhs.dim });
        }
        let mut scratch = vec![C64::ZERO; self.dim];
        let mut touched: Vec<usize> = Vec::new();
        let mut triplets: Vec<(usize, usize, C64)> = Vec::new();
        for i in 0..self.dim {
            for (k, va) in self.row(i) {
                for (j, vb) in rhs.row(k) {
                    if scratch[j] == C64::ZERO {
                        touched.push(j);
                    }
                    scratch[j] += va * vb;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                if scratch[j] != C64::ZERO {
                    triplets.push((i, j, scratch[j]));
                }
                scratch[j] = C64::ZERO;
            }
            touched.clear();
        }
        Self::from_triplets(self.dim, triplets)
    }

    pub fn adjoint(&self) -> Self {
        let t: Vec<(usize, usize, C64)> = (0..self.dim)
            .flat_map(|i| self.row(i).map(move |(j, v)| (j, i, v.conj())))
            .collect();
        Self::from_triplets(self.dim, t).expect("adjoint preserves dimensions")
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: rhs.dim });
        }
        let t = (0..self.dim)
            .flat_map(|i| {
                self.row(i)
                    .chain(rhs.row(i))
                    .map(move |(j, v)| (i, j, v))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>();
        Self::from_triplets(self.dim, t)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.scale(-C64::ONE))
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= s;
        }
        out
    }

    /// Kronecker product; `self` acts on the row (first) factor.
    pub fn kron(&self, rhs: &Self) -> Self {
        let dim = self.dim * rhs.dim;
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::with_capacity(self.nnz() * rhs.nnz());
        let mut vals = Vec::with_capacity(self.nnz() * rhs.nnz());
        row_ptr.push(0);
        for i1 in 0..self.dim {
            for i2 in 0..rhs.dim {
                for (j1, v1) in self.row(i1) {
                    for (j2, v2) in rhs.row(i2) {
                        cols.push(j1 * rhs.dim + j2);
                        vals.push(v1 * v2);
                    }
                }
                row_ptr.push(cols.len());
            }
        }
        Self { dim, row_ptr, cols, vals }
    }

    /// Largest absolute entry of A − A†; zero for Hermitian matrices.
    pub fn hermiticity_error(&self) -> f64 {
        let adj = self.adjoint();
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            let mut row: Vec<(usize, C64)> = self.row(i).collect();
            for (j, v) in adj.row(i) {
                match row.iter_mut().find(|(c, _)| *c == j) {
                    Some((_, rv)) => *rv -= v,
                    None => row.push((j, -v)),
                }
            }
            for (_, v) in row {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    /// Induced 1-norm (max column abs sum); used to pick the Taylor
    /// segmentation in [`apply_exponential`].
    pub fn one_norm(&self) -> f64 {
        let mut col_sums = vec![0.0f64; self.dim];
        for (c, v) in self.cols.iter().zip(&self.vals) {
            col_sums[*c] += v.norm();
        }
        col_sums.into_iter().fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Matrix of a on |0⟩..|cutoff⟩: a|n⟩ = √n |n−1⟩.
pub fn annihilator(cutoff: usize) -> Result<OperatorMatrix> {
    if cutoff == 0 {
        return Err(Error::InvalidDimension(0));
    }
    OperatorMatrix::from_triplets(
        cutoff + 1,
        (1..=cutoff).map(|n| (n - 1, n, C64::from((n as f64).sqrt()))),
    )
}

pub fn creator(cutoff: usize) -> Result<OperatorMatrix> {
    Ok(annihilator(cutoff)?.adjoint())
}

pub fn number_op(cutoff: usize) -> Result<OperatorMatrix> {
    if cutoff == 0 {
        return Err(Error::InvalidDimension(0));
    }
    OperatorMatrix::from_triplets(cutoff + 1, (0..=cutoff).map(|n| (n, n, C64::from(n as f64))))
}

/// Quadrature pair X = a + a†, Y = −i(a − a†).
pub fn quadratures(cutoff: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let a = annihilator(cutoff)?;
    let adag = a.adjoint();
    let x = a.add(&adag)?;
    let y = a.sub(&adag)?.scale(C64::new(0.0, -1.0));
    Ok((x, y))
}

/// Which factor of the two-mode space an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

/// Lift a single-mode operator to the two-mode space as op ⊗ I or I ⊗ op,
/// following the row-major index order documented on [`TwoModeState`].
pub fn embed_op(
    op: &OperatorMatrix,
    mode: Mode,
    cutoffs: (usize, usize),
) -> Result<OperatorMatrix> {
    let (ca, cb) = cutoffs;
    let expected = match mode {
        Mode::A => ca + 1,
        Mode::B => cb + 1,
    };
    if op.dim() != expected {
        return Err(Error::DimensionMismatch { left: op.dim(), right: expected });
    }
    Ok(match mode {
        Mode::A => op.kron(&OperatorMatrix::identity(cb + 1)?),
        Mode::B => OperatorMatrix::identity(ca + 1)?.kron(op),
    })
}

/// ⟨ψ|op|ψ⟩ for a state given as raw amplitudes.
pub fn expectation(state: &[C64], op: &OperatorMatrix) -> Result<C64> {
    let w = op.apply(state)?;
    Ok(state.iter().zip(&w).map(|(s, w)| s.conj() * w).sum())
}

/// Var(A) = ⟨A²⟩ − ⟨A⟩² for Hermitian A; round-off negatives above
/// −[`VARIANCE_CLAMP`] are clamped to zero.
pub fn variance(state: &[C64], op: &OperatorMatrix) -> Result<f64> {
    let w = op.apply(state)?;
    let mean: C64 = state.iter().zip(&w).map(|(s, w)| s.conj() * w).sum();
    let w2 = op.apply(&w)?;
    let second: C64 = state.iter().zip(&w2).map(|(s, w)| s.conj() * w).sum();
    let var = second.re - mean.re * mean.re;
    Ok(if var < 0.0 && var > -VARIANCE_CLAMP { 0.0 } else { var })
}

/// ⟨s1|s2⟩.
pub fn overlap(s1: &[C64], s2: &[C64]) -> Result<C64> {
    if s1.len() != s2.len() {
        return Err(Error::DimensionMismatch { left: s1.len(), right: s2.len() });
    }
    Ok(s1.iter().zip(s2).map(|(a, b)| a.conj() * b).sum())
}

/// |⟨s1|s2⟩|².
pub fn fidelity(s1: &[C64], s2: &[C64]) -> Result<f64> {
    Ok(overlap(s1, s2)?.norm_sqr())
}

/// Result of an exponential action: the evolved amplitudes and the norm
/// fraction lost past the cutoff.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub state: Vec<C64>,
    pub leakage: f64,
}

/// Apply exp(time · generator) to a state by segmented Taylor summation.
///
/// The generator must be anti-Hermitian so the flow is norm preserving;
/// any norm lost is reported as leakage and checked against `leak_tol`.
/// Note that the truncation of an anti-Hermitian operator is itself
/// anti-Hermitian, so leakage here only tracks integrator drift; mass an
/// undersized cutoff fails to pass through shows up on the last levels
/// instead (see [`TwoModeState::boundary_mass`]).
pub fn apply_exponential(
    generator: &OperatorMatrix,
    state: &[C64],
    time: f64,
    leak_tol: f64,
) -> Result<Evolution> {
    if state.len() != generator.dim() {
        return Err(Error::DimensionMismatch { left: generator.dim(), right: state.len() });
    }
    let scale = generator.max_abs();
    let dev = generator.add(&generator.adjoint())?.max_abs();
    if dev > 1e-10 * scale.max(1.0) {
        return Err(Error::NotAntiHermitian { deviation: dev });
    }

    let in_norm_sqr = norm_sqr(state);
    let tau = time.abs() * generator.one_norm();
    let mut y = state.to_vec();
    if tau > 0.0 {
        // Keep each segment's Taylor argument at norm <= 4 so the series
        // converges fast without large intermediate terms.
        let nseg = (tau / 4.0).ceil().max(1.0) as usize;
        let dt = time / nseg as f64;
        for _ in 0..nseg {
            let mut term = y.clone();
            for k in 1..=200u32 {
                term = generator.apply(&term)?;
                let f = dt / f64::from(k);
                for t in &mut term {
                    *t *= f;
                }
                for (yi, ti) in y.iter_mut().zip(&term) {
                    *yi += ti;
                }
                if norm_sqr(&term).sqrt() <= f64::EPSILON * norm_sqr(&y).sqrt() {
                    break;
                }
            }
        }
    }

    let leakage = if in_norm_sqr > 0.0 {
        ((in_norm_sqr - norm_sqr(&y)) / in_norm_sqr).max(0.0)
    } else {
        0.0
    };
    if leakage > leak_tol {
        return Err(Error::TruncationOverflow { leakage, threshold: leak_tol });
    }
    Ok(Evolution { state: y, leakage })
}

/// Smallest cutoff N such that λ^{2N}/(1 − λ²) falls below `tail_tol`,
/// bounding the neglected geometric tail of a λ-weighted expansion.
pub fn adaptive_cutoff(lambda: f64, tail_tol: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            requirement: "0 <= lambda < 1",
        });
    }
    if tail_tol.is_nan() || tail_tol <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "tail_tol",
            value: tail_tol,
            requirement: "tail_tol > 0",
        });
    }
    if lambda == 0.0 {
        return Ok(1);
    }
    let n = ((tail_tol * (1.0 - lambda * lambda)).ln() / (2.0 * lambda.ln())).ceil();
    Ok((n.max(1.0)) as usize)
}

/// Smallest cutoff N with Σ_{m>N} |amps\[m\]|² below `tail_tol`.
pub fn tail_cutoff(amps: &[C64], tail_tol: f64) -> usize {
    let mut tail = 0.0;
    for (m, a) in amps.iter().enumerate().rev() {
        tail += a.norm_sqr();
        if tail > tail_tol {
            return m;
        }
    }
    0
}
