//! Channels, incoming wave-packet modes and energy-resolved S-matrix models.
//!
//! Everything here works in natural units ħ = μ = L = 1 unless a channel
//! carries a different mass, so the cavity energy scale is `ε₀ = π²/2`.
//! Conversion from the ε₀-based units of configuration files happens in
//! [`crate::config`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{FcsError, Result};
use crate::linalg::ComplexMatrix;

/// Tolerance on ‖S†S − 1‖_max.
pub const UNITARITY_TOL: f64 = 1e-12;

/// Energy scale π²/(2μL²) of a square cavity of side L.
pub fn epsilon_0(mass: f64, side: f64) -> f64 {
    PI * PI / (2.0 * mass * side * side)
}

/// Cavity eigenenergy (ℓ² + ℓ′²)·ε₀.
pub fn resonance_energy(l: u32, l_prime: u32, side: f64, mass: f64) -> f64 {
    let (a, b) = (f64::from(l), f64::from(l_prime));
    (a * a + b * b) * epsilon_0(mass, side)
}

/// One asymptotic channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    /// 1-based channel label.
    pub index: usize,
    /// Transversal-mode energy E⁰ₖ.
    pub threshold: f64,
    pub mass: f64,
}

/// Momentum in a channel, or `Closed` at and below threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelMomentum {
    Open(f64),
    Closed,
}

impl ChannelMomentum {
    pub fn open(self) -> Option<f64> {
        match self {
            ChannelMomentum::Open(p) => Some(p),
            ChannelMomentum::Closed => None,
        }
    }
}

impl ChannelSpec {
    pub fn new(index: usize, threshold: f64) -> Self {
        ChannelSpec {
            index,
            threshold,
            mass: 1.0,
        }
    }

    /// Total energy p²/2μ + E⁰ of a particle with momentum `p` in this channel.
    pub fn total_energy(&self, p: f64) -> f64 {
        p * p / (2.0 * self.mass) + self.threshold
    }

    pub fn momentum(&self, total_energy: f64) -> ChannelMomentum {
        momentum_in_channel(total_energy, self)
    }

    pub fn is_open(&self, total_energy: f64) -> bool {
        total_energy > self.threshold
    }
}

/// Momentum carried in `channel` by a particle of total energy `total_energy`.
pub fn momentum_in_channel(total_energy: f64, channel: &ChannelSpec) -> ChannelMomentum {
    let kinetic = total_energy - channel.threshold;
    if kinetic > 0.0 {
        ChannelMomentum::Open((2.0 * channel.mass * kinetic).sqrt())
    } else {
        ChannelMomentum::Closed
    }
}

/// Incoming single-particle mode with a Gaussian momentum profile truncated to p > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacketMode {
    /// 1-based input channel.
    pub channel: usize,
    pub center_momentum: f64,
    pub momentum_width: f64,
    pub inject_position: f64,
    pub inject_time: f64,
}

impl WavePacketMode {
    pub fn validate(&self) -> Result<()> {
        if !(self.center_momentum > 0.0 && self.center_momentum.is_finite()) {
            return Err(FcsError::Config(format!(
                "center momentum must be positive, got {}",
                self.center_momentum
            )));
        }
        if !(self.momentum_width > 0.0 && self.momentum_width < self.center_momentum / 4.0) {
            return Err(FcsError::Config(format!(
                "momentum width {} must lie in (0, p0/4 = {})",
                self.momentum_width,
                self.center_momentum / 4.0
            )));
        }
        if !self.inject_position.is_finite() || !self.inject_time.is_finite() {
            return Err(FcsError::Config("injection point must be finite".into()));
        }
        Ok(())
    }

    /// Momentum interval [p₀ − Wσ, p₀ + Wσ] clipped at zero.
    pub fn support(&self, half_width: f64) -> (f64, f64) {
        let lo = (self.center_momentum - half_width * self.momentum_width).max(0.0);
        (lo, self.center_momentum + half_width * self.momentum_width)
    }

    /// Group velocity at the packet centre.
    pub fn center_velocity(&self, channel: &ChannelSpec) -> f64 {
        self.center_momentum / channel.mass
    }

    /// Phase exp[i p x_in + i 𝓔 t_in] accumulated between injection and the
    /// common reference point.
    pub fn injection_phase(&self, p: f64, total_energy: f64) -> Complex64 {
        Complex64::from_polar(1.0, p * self.inject_position + total_energy * self.inject_time)
    }
}

/// Momentum width for which σ_E = v₀σ_p equals `energy_width` at centre momentum `p0`.
pub fn momentum_width_for_energy_width(energy_width: f64, p0: f64, mass: f64) -> f64 {
    energy_width / (p0 / mass)
}

/// 𝒩 exp[−(p − p₀)²/(4σ²)] with 𝒩 chosen so ∫₀^∞ |A|² dp = 1; zero for p < 0.
pub fn gaussian_amplitude(p: f64, mode: &WavePacketMode) -> Complex64 {
    if p < 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let sigma = mode.momentum_width;
    let z = mode.center_momentum / (sigma * std::f64::consts::SQRT_2);
    let norm_sq = sigma * (PI / 2.0).sqrt() * (1.0 + libm::erf(z));
    let d = p - mode.center_momentum;
    Complex64::new((-d * d / (4.0 * sigma * sigma)).exp() / norm_sq.sqrt(), 0.0)
}

/// Energy-resolved scatterer.
#[derive(Debug, Clone, PartialEq)]
pub enum ScattererModel {
    /// Single isolated resonance with equal partial widths Γ/N in every channel.
    BreitWigner {
        resonance_energy: f64,
        width: f64,
        phase: f64,
        channels: usize,
    },
    /// Energy-independent unitary matrix.
    ConstantUnitary { matrix: ComplexMatrix },
    /// No channel mixing: S = diag(e^{iφₖ}).
    Diagonal { phases: Vec<f64> },
}

impl ScattererModel {
    pub fn num_channels(&self) -> usize {
        match self {
            ScattererModel::BreitWigner { channels, .. } => *channels,
            ScattererModel::ConstantUnitary { matrix } => matrix.rows(),
            ScattererModel::Diagonal { phases } => phases.len(),
        }
    }

    /// Energy scale of the narrowest feature of S(𝓔), if any.
    pub fn feature_width(&self) -> Option<f64> {
        match self {
            ScattererModel::BreitWigner { width, .. } => Some(*width),
            _ => None,
        }
    }

    /// Whether S(𝓔) is diagonal at every energy.
    pub fn is_diagonal(&self) -> bool {
        match self {
            ScattererModel::Diagonal { .. } => true,
            ScattererModel::ConstantUnitary { matrix } => matrix.is_diagonal(0.0),
            ScattererModel::BreitWigner { channels, .. } => *channels == 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScattererModel::BreitWigner {
                width,
                channels,
                resonance_energy,
                phase,
            } => {
                if *channels == 0 {
                    return Err(FcsError::Config("Breit-Wigner model needs at least one channel".into()));
                }
                if !(*width > 0.0) || !resonance_energy.is_finite() || !phase.is_finite() {
                    return Err(FcsError::Config(format!(
                        "Breit-Wigner width must be positive and parameters finite (Γ = {width})"
                    )));
                }
            }
            ScattererModel::ConstantUnitary { matrix } => {
                if !matrix.is_square() || matrix.rows() == 0 {
                    return Err(FcsError::Config("constant scatterer must be a non-empty square matrix".into()));
                }
                let residual = unitarity_residual(matrix);
                if residual > UNITARITY_TOL {
                    return Err(FcsError::Config(format!(
                        "constant scatterer is not unitary: ‖U†U − 1‖ = {residual:e}"
                    )));
                }
            }
            ScattererModel::Diagonal { phases } => {
                if phases.is_empty() || phases.iter().any(|p| !p.is_finite()) {
                    return Err(FcsError::Config("diagonal scatterer needs finite phases".into()));
                }
            }
        }
        Ok(())
    }

    /// S(𝓔) with every channel required to be open.
    pub fn s_matrix(&self, total_energy: f64, channels: &[ChannelSpec]) -> Result<ComplexMatrix> {
        if let Some(closed) = channels.iter().find(|c| !c.is_open(total_energy)) {
            return Err(FcsError::Domain(format!(
                "channel {} is closed at total energy {total_energy} (threshold {})",
                closed.index, closed.threshold
            )));
        }
        Ok(self.s_matrix_unchecked(total_energy))
    }

    /// S(𝓔) without any threshold check.
    pub fn s_matrix_unchecked(&self, total_energy: f64) -> ComplexMatrix {
        match self {
            ScattererModel::BreitWigner {
                resonance_energy,
                width,
                phase,
                channels,
            } => {
                let n = *channels;
                let pole = Complex64::new(total_energy - resonance_energy, 0.5 * width);
                let off = Complex64::new(0.0, width / n as f64) / pole;
                let global = Complex64::from_polar(1.0, *phase);
                ComplexMatrix::from_fn(n, n, |m, k| {
                    let delta = if m == k { 1.0 } else { 0.0 };
                    global * (Complex64::new(delta, 0.0) - off)
                })
            }
            ScattererModel::ConstantUnitary { matrix } => matrix.clone(),
            ScattererModel::Diagonal { phases } => ComplexMatrix::diagonal(
                &phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect::<Vec<_>>(),
            ),
        }
    }

    /// Relabels channels: new channel `a` is old channel `perm[a]` (0-based).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        match self {
            ScattererModel::BreitWigner { .. } => self.clone(),
            ScattererModel::ConstantUnitary { matrix } => ScattererModel::ConstantUnitary {
                matrix: ComplexMatrix::from_fn(matrix.rows(), matrix.cols(), |a, b| matrix[(perm[a], perm[b])]),
            },
            ScattererModel::Diagonal { phases } => ScattererModel::Diagonal {
                phases: perm.iter().map(|&p| phases[p]).collect(),
            },
        }
    }
}

/// ‖S†S − 1‖_max.
pub fn unitarity_residual(s: &ComplexMatrix) -> f64 {
    match s.adjoint().mul(s) {
        Ok(p) => p.distance_from_identity(),
        Err(_) => f64::INFINITY,
    }
}

/// Balanced two-port beam splitter [[1, i], [i, 1]]/√2.
pub fn balanced_beam_splitter() -> ComplexMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_rows(&[
        vec![Complex64::new(r, 0.0), Complex64::new(0.0, r)],
        vec![Complex64::new(0.0, r), Complex64::new(r, 0.0)],
    ])
    .expect("2x2 literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS0: f64 = PI * PI / 2.0;

    #[test]
    fn momentum_from_energy_conservation() {
        let ch = ChannelSpec::new(1, 9.0 * EPS0);
        let p = momentum_in_channel(18.0 * EPS0, &ch).open().unwrap();
        assert!((p - 3.0 * PI).abs() < 1e-12);
        assert_eq!(momentum_in_channel(9.0 * EPS0, &ch), ChannelMomentum::Closed);
        assert_eq!(momentum_in_channel(2.0 * EPS0, &ch), ChannelMomentum::Closed);
    }

    #[test]
    fn equal_thresholds_map_momentum_to_itself() {
        let a = ChannelSpec::new(1, 9.0 * EPS0);
        let b = ChannelSpec::new(2, 9.0 * EPS0);
        for p in [0.3, 3.0 * PI, 17.5] {
            let q = momentum_in_channel(a.total_energy(p), &b).open().unwrap();
            assert!((q - p).abs() < 1e-12 * p.max(1.0));
        }
    }

    #[test]
    fn resonance_energies() {
        assert!((resonance_energy(3, 3, 1.0, 1.0) - 18.0 * EPS0).abs() < 1e-12);
        assert!((resonance_energy(4, 1, 1.0, 1.0) - 17.0 * EPS0).abs() < 1e-12);
        assert!((resonance_energy(1, 4, 1.0, 1.0) - 17.0 * EPS0).abs() < 1e-12);
        assert!((resonance_energy(1, 1, 1.0, 1.0) - 2.0 * EPS0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_peak_and_norm() {
        let mode = WavePacketMode {
            channel: 1,
            center_momentum: 2.0,
            momentum_width: 0.45,
            inject_position: 0.0,
            inject_time: 0.0,
        };
        let peak = gaussian_amplitude(2.0, &mode).norm();
        for p in [1.9, 2.1, 1.0, 3.0] {
            assert!(gaussian_amplitude(p, &mode).norm() < peak);
        }
        assert_eq!(gaussian_amplitude(-0.1, &mode).norm(), 0.0);
        let q = crate::quadrature::GaussLegendre::new(400);
        let norm = q.integrate(0.0, 2.0 + 12.0 * 0.45, |p| gaussian_amplitude(p, &mode).norm_sqr());
        assert!((norm - 1.0).abs() < 1e-10, "{norm}");
    }

    #[test]
    fn width_matching_resonance() {
        let gamma = 0.05 * EPS0;
        let sigma = momentum_width_for_energy_width(gamma, 3.0 * PI, 1.0);
        // 0.05·(π²/2) / (3π) = 0.05π/6
        assert!((sigma - 0.05 * PI / 6.0).abs() < 1e-15);
    }

    #[test]
    fn breit_wigner_at_resonance() {
        let model = ScattererModel::BreitWigner {
            resonance_energy: 18.0 * EPS0,
            width: 0.05 * EPS0,
            phase: 0.0,
            channels: 4,
        };
        let s = model.s_matrix_unchecked(18.0 * EPS0);
        for m in 0..4 {
            for k in 0..4 {
                let expected = if m == k { 0.5 } else { -0.5 };
                assert!((s[(m, k)] - Complex64::new(expected, 0.0)).norm() < 1e-14);
                assert!((s[(m, k)].norm_sqr() - 0.25).abs() < 1e-14);
            }
        }
        let far = model.s_matrix_unchecked(18.0 * EPS0 + 1e6);
        assert!(far.distance_from_identity() < 1e-6);
    }

    #[test]
    fn closed_channel_is_a_domain_error() {
        let model = ScattererModel::Diagonal { phases: vec![0.0, 0.0] };
        let chans = [ChannelSpec::new(1, 0.0), ChannelSpec::new(2, 5.0)];
        assert!(matches!(model.s_matrix(4.0, &chans), Err(FcsError::Domain(_))));
        assert!(model.s_matrix(6.0, &chans).is_ok());
    }

    #[test]
    fn beam_splitter_is_returned_unchanged() {
        let u = balanced_beam_splitter();
        let model = ScattererModel::ConstantUnitary { matrix: u.clone() };
        model.validate().unwrap();
        assert_eq!(model.s_matrix_unchecked(1.0), u);
        assert!(unitarity_residual(&u) < 1e-15);
    }

    #[test]
    fn non_unitary_constant_is_rejected() {
        let m = ComplexMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(ScattererModel::ConstantUnitary { matrix: m }.validate().is_err());
    }

    #[test]
    fn mode_validation() {
        let mut mode = WavePacketMode {
            channel: 1,
            center_momentum: 1.0,
            momentum_width: 0.3,
            inject_position: 0.0,
            inject_time: 0.0,
        };
        assert!(mode.validate().is_err());
        mode.momentum_width = 0.2;
        assert!(mode.validate().is_ok());
    }
}
