//! Teleportation by joint quadrature measurements, on a position-grid
//! wavefunction representation.
//!
//! Wavefunctions live on a uniform grid over [−L, L] in the x-scaling
//! where the vacuum is ψ₀(x) = (2π)^{−1/4} e^{−x²/4} (unit variance,
//! matching X = a + a†) and the conjugate quadrature acts as −2i d/dx.
//! The sender's measurement of the joint pair (X̂_T − X̂_A, Ŷ_T + Ŷ_A)
//! with results (X, Y) leaves the receiver with
//!
//!   φ(x) ∝ ∫ dx′ e^{ix′Y} G(x′, x; r) ψ(X − x′),
//!
//! where the Gaussian kernel G sharpens to δ(x′ + x) as the squeezing
//! grows. The receiver then undoes the outcome with a position shift and
//! a momentum phase, scaled by the gain pair; global phases are dropped
//! throughout, fidelity being the only observable.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Trapezoid points used when no explicit grid is configured.
pub const DEFAULT_POINTS: usize = 2048;

/// Edge mass above which a spectral shift would wrap meaningfully.
const EDGE_MASS_TOL: f64 = 1e-10;

/// Uniform symmetric grid over [−extent, extent].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    extent: f64,
    points: usize,
}

impl Grid {
    pub fn new(extent: f64, points: usize) -> Result<Self> {
        if extent.is_nan() || extent <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "extent",
                value: extent,
                requirement: "extent > 0",
            });
        }
        if points < 2 {
            return Err(Error::InvalidParameter {
                name: "points",
                value: points as f64,
                requirement: "points >= 2",
            });
        }
        Ok(Self { extent, points })
    }

    /// Extent that comfortably holds a coherent target plus kernel
    /// broadening: max(12, 2|α| + 10).
    pub fn auto_extent(alpha: f64) -> f64 {
        12f64.max(2.0 * alpha.abs() + 10.0)
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.extent + i as f64 * self.spacing()
    }

    /// Whether the spacing resolves the kernel's narrow direction,
    /// h ≤ e^{−r}/8.
    pub fn resolves(&self, r: f64) -> bool {
        self.spacing() <= (-r).exp() / 8.0
    }
}

/// Complex wavefunction sampled on a [`Grid`]; integrals use the
/// trapezoid rule.
#[derive(Clone, Debug)]
pub struct WaveFunction {
    grid: Grid,
    samples: Vec<C64>,
}

impl WaveFunction {
    pub fn new(grid: Grid, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.points() {
            return Err(Error::DimensionMismatch { left: samples.len(), right: grid.points() });
        }
        Ok(Self { grid, samples })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    fn trapezoid<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        let n = self.samples.len();
        let mut acc = 0.0;
        for i in 0..n {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += w * f(i);
        }
        acc * self.grid.spacing()
    }

    /// ∫ |ψ|² dx.
    pub fn norm_sqr(&self) -> f64 {
        self.trapezoid(|i| self.samples[i].norm_sqr())
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        for s in &mut self.samples {
            *s /= n;
        }
        Ok(n)
    }

    /// ∫ x^k |ψ|² dx.
    pub fn moment(&self, k: u32) -> f64 {
        self.trapezoid(|i| self.grid.x(i).powi(k as i32) * self.samples[i].norm_sqr())
    }

    pub fn mean_x(&self) -> f64 {
        self.moment(1) / self.norm_sqr()
    }

    /// Mean of the conjugate quadrature, ⟨−2i d/dx⟩, via a spectral
    /// derivative.
    pub fn mean_y(&self) -> f64 {
        let n = self.samples.len();
        let h = self.grid.spacing();
        let mut spec = self.samples.clone();
        fft_in_place(&mut spec, false);
        for (j, s) in spec.iter_mut().enumerate() {
            *s *= C64::new(0.0, wavenumber(j, n, h));
        }
        fft_in_place(&mut spec, true);
        let mut acc = C64::ZERO;
        for (i, (s, d)) in self.samples.iter().zip(&spec).enumerate() {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += w * s.conj() * C64::new(0.0, -2.0) * d;
        }
        (acc * h).re / self.norm_sqr()
    }

    /// Trapezoid ⟨self|other⟩.
    pub fn overlap(&self, other: &WaveFunction) -> Result<C64> {
        if self.samples.len() != other.samples.len() {
            return Err(Error::DimensionMismatch {
                left: self.samples.len(),
                right: other.samples.len(),
            });
        }
        let n = self.samples.len();
        let mut acc = C64::ZERO;
        for i in 0..n {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += w * self.samples[i].conj() * other.samples[i];
        }
        Ok(acc * self.grid.spacing())
    }

    pub fn fidelity(&self, other: &WaveFunction) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    /// Probability mass within `width` of either grid edge.
    fn edge_mass(&self, width: f64) -> f64 {
        let l = self.grid.extent();
        self.trapezoid(|i| {
            if self.grid.x(i).abs() > l - width {
                self.samples[i].norm_sqr()
            } else {
                0.0
            }
        })
    }
}

fn wavenumber(j: usize, n: usize, h: f64) -> f64 {
    let f = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
    2.0 * PI * f / (n as f64 * h)
}

fn fft_in_place(data: &mut [C64], inverse: bool) {
    let n = data.len();
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    fft.process(data);
    if inverse {
        let scale = 1.0 / n as f64;
        for d in data.iter_mut() {
            *d *= scale;
        }
    }
}

/// Spectral translation: samples of ψ(x − delta). The wavefunction must
/// have decayed at the edges (callers check `edge_mass` first).
fn spectral_shift(samples: &mut [C64], h: f64, delta: f64) {
    let n = samples.len();
    fft_in_place(samples, false);
    for (j, s) in samples.iter_mut().enumerate() {
        *s *= C64::from_polar(1.0, -wavenumber(j, n, h) * delta);
    }
    fft_in_place(samples, true);
}

/// Target state of the quadrature protocol.
#[derive(Clone, Debug, PartialEq)]
pub enum TargetSpec {
    /// Coherent state of real amplitude α, centred at ⟨X⟩ = 2α.
    Coherent { alpha: f64 },
    /// Number state |n⟩ as the n-th oscillator eigenfunction.
    Number { n: usize },
    /// Raw samples, normalized on construction.
    Custom { samples: Vec<C64> },
}

/// Build the target wavefunction on the grid.
pub fn target_wavefunction(spec: &TargetSpec, grid: Grid) -> Result<WaveFunction> {
    let norm0 = (2.0 * PI).powf(-0.25);
    let samples: Vec<C64> = match spec {
        TargetSpec::Coherent { alpha } => {
            let centre = 2.0 * alpha;
            if centre.abs() + 8.0 > grid.extent() {
                return Err(Error::GridCoverage(format!(
                    "coherent target centred at {centre} needs extent >= {}, grid has {}",
                    centre.abs() + 8.0,
                    grid.extent()
                )));
            }
            (0..grid.points())
                .map(|i| {
                    let x = grid.x(i) - centre;
                    C64::from(norm0 * (-x * x / 4.0).exp())
                })
                .collect()
        }
        TargetSpec::Number { n } => {
            let turning = (2.0 * (2.0 * *n as f64 + 1.0)).sqrt();
            if turning + 8.0 > grid.extent() {
                return Err(Error::GridCoverage(format!(
                    "number state {n} needs extent >= {}, grid has {}",
                    turning + 8.0,
                    grid.extent()
                )));
            }
            (0..grid.points())
                .map(|i| C64::from(hermite_function(*n, grid.x(i))))
                .collect()
        }
        TargetSpec::Custom { samples } => samples.clone(),
    };
    let mut wf = WaveFunction::new(grid, samples)?;
    wf.normalize()?;
    Ok(wf)
}

/// n-th oscillator eigenfunction in the unit-variance x-scaling, by the
/// stable Hermite-function recurrence.
fn hermite_function(n: usize, x: f64) -> f64 {
    let u = x / 2f64.sqrt();
    let mut prev = 0.0f64;
    let mut cur = PI.powf(-0.25) * (-u * u / 2.0).exp();
    for k in 1..=n {
        let next = (2.0 / k as f64).sqrt() * u * cur - ((k - 1) as f64 / k as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    2f64.powf(-0.25) * cur
}

/// Measured quadrature pair (X, Y).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOutcome {
    pub x: f64,
    pub y: f64,
}

impl QuadOutcome {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// The measurement kernel
/// G(x₁, x₂; r) = (2π)^{−1/2} exp[−¼(x₁+x₂)²e^{2r} − ¼(x₁−x₂)²e^{−2r}].
pub fn kernel_g(x1: f64, x2: f64, r: f64) -> f64 {
    let tau = (2.0 * r).exp();
    let sig = (-2.0 * r).exp();
    let s = x1 + x2;
    let d = x1 - x2;
    (2.0 * PI).sqrt().recip() * (-0.25 * (s * s * tau + d * d * sig)).exp()
}

/// Receiver state conditioned on the outcome, by trapezoid quadrature of
/// the kernel integral; normalized.
pub fn teleport_conditional(
    psi: &WaveFunction,
    outcome: QuadOutcome,
    r: f64,
) -> Result<WaveFunction> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::InvalidParameter { name: "r", value: r, requirement: "r >= 0" });
    }
    let grid = psi.grid();
    let h = grid.spacing();
    let required = (-r).exp() / 8.0;
    if h > required {
        return Err(Error::GridResolution { h, r, required });
    }

    // samples of ψ(X − x′): reflect (the grid is symmetric), then shift
    let mut reflected: Vec<C64> = psi.samples().iter().rev().copied().collect();
    if outcome.x != 0.0 {
        if psi.edge_mass(outcome.x.abs()) > EDGE_MASS_TOL {
            return Err(Error::GridCoverage(format!(
                "target support leaves the grid when shifted by the outcome X = {}",
                outcome.x
            )));
        }
        spectral_shift(&mut reflected, h, outcome.x);
    }

    let n = grid.points();
    // trapezoid weight, measurement phase and shifted target, per node
    let pref: Vec<C64> = (0..n)
        .map(|j| {
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            C64::from_polar(w * h, grid.x(j) * outcome.y) * reflected[j]
        })
        .collect();

    let tau = (2.0 * r).exp();
    let sig = (-2.0 * r).exp();
    let scale = (2.0 * PI).sqrt().recip();
    let mut out = vec![C64::ZERO; n];
    for (i, o) in out.iter_mut().enumerate() {
        let xi = grid.x(i);
        let mut acc = C64::ZERO;
        for (j, p) in pref.iter().enumerate() {
            let xj = grid.x(j);
            let s = xj + xi;
            let d = xj - xi;
            let e = -0.25 * (s * s * tau + d * d * sig);
            // the kernel underflows long before this matters
            if e > -700.0 {
                acc += p * e.exp();
            }
        }
        *o = acc * scale;
    }

    let mut wf = WaveFunction::new(grid, out)?;
    wf.normalize()?;
    Ok(wf)
}

/// Gain pair scaling the corrective position shift and momentum phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gains {
    pub g_x: f64,
    pub g_y: f64,
}

impl Gains {
    pub fn fixed(g_x: f64, g_y: f64) -> Self {
        Self { g_x, g_y }
    }

    /// The unit gains: the pair that removes the measurement outcome from
    /// the corrected output's quadrature means for Gaussian targets, so
    /// the output mean tracks the input mean. For the Gaussian kernel
    /// these are
    ///
    ///   g_x = (e^{2r} − e^{−2r}) / (e^{2r} + e^{−2r} + 4),
    ///   g_y = (e^{2r} − e^{−2r}) / (e^{2r} + e^{−2r} + 1),
    ///
    /// both approaching 1 exponentially in r. [`calibrate_gains`]
    /// recovers the same pair from the protocol itself.
    pub fn unit(r: f64) -> Self {
        let tau = (2.0 * r).exp();
        let sig = (-2.0 * r).exp();
        Self {
            g_x: (tau - sig) / (tau + sig + 4.0),
            g_y: (tau - sig) / (tau + sig + 1.0),
        }
    }
}

/// Undo the outcome: shift position by g_x·X, then imprint the momentum
/// phase e^{i g_y Y x}. Norm is preserved; the leftover global phase is
/// dropped.
pub fn correct(phi: &WaveFunction, outcome: QuadOutcome, gains: Gains) -> Result<WaveFunction> {
    let grid = phi.grid();
    let delta = gains.g_x * outcome.x;
    let mut samples = phi.samples().to_vec();
    if delta != 0.0 {
        if phi.edge_mass(delta.abs()) > EDGE_MASS_TOL {
            return Err(Error::GridCoverage(format!(
                "corrective shift by {delta} pushes the state off the grid"
            )));
        }
        spectral_shift(&mut samples, grid.spacing(), delta);
    }
    let kick = gains.g_y * outcome.y;
    if kick != 0.0 {
        for (i, s) in samples.iter_mut().enumerate() {
            *s *= C64::from_polar(1.0, kick * grid.x(i));
        }
    }
    WaveFunction::new(grid, samples)
}

/// Numeric gain calibration from the protocol itself: the corrected
/// means respond linearly to the gains, so probing two outcomes along
/// each quadrature pins the pair that makes the output means
/// outcome-independent.
pub fn calibrate_gains(r: f64, grid: Grid) -> Result<Gains> {
    let psi = target_wavefunction(&TargetSpec::Coherent { alpha: 1.0 }, grid)?;
    let base = teleport_conditional(&psi, QuadOutcome::new(0.0, 0.0), r)?;
    let probe_x = teleport_conditional(&psi, QuadOutcome::new(2.0, 0.0), r)?;
    let probe_y = teleport_conditional(&psi, QuadOutcome::new(0.0, 2.0), r)?;
    // position: shifting by g_x·X moves the mean by the same amount
    let g_x = (base.mean_x() - probe_x.mean_x()) / 2.0;
    // momentum: the phase e^{i g_y Y x} moves ⟨Y⟩ by 2 g_y Y
    let g_y = (base.mean_y() - probe_y.mean_y()) / 4.0;
    Ok(Gains { g_x, g_y })
}

/// End-to-end fidelity of the corrected output against the target.
pub fn protocol_fidelity(
    spec: &TargetSpec,
    grid: Grid,
    r: f64,
    outcome: QuadOutcome,
    gains: Gains,
) -> Result<f64> {
    let psi = target_wavefunction(spec, grid)?;
    let cond = teleport_conditional(&psi, outcome, r)?;
    let corrected = correct(&cond, outcome, gains)?;
    psi.fidelity(&corrected)
}
