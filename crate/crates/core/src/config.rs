//! Experiment configuration files and built-in presets.
//!
//! Files are TOML. Energies are given in units of ε₀ = π²/(2μL²) and times in
//! units of 1/ε₀ (ħ = L = 1); momenta are in units of ħ/L and positions in
//! units of L. [`ConfigFile`] mirrors the file literally so that it
//! round-trips every value; [`ExperimentConfig`] is the validated form in
//! internal units.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FcsError, Result};
use crate::linalg::{ComplexMatrix, StatisticsKind};
use crate::overlap::{compute_overlap_set, OverlapSet, QuadratureSettings};
use crate::physics::{epsilon_0, momentum_width_for_energy_width, ChannelSpec, ScattererModel, WavePacketMode};

fn one() -> f64 {
    1.0
}

fn all_kinds() -> Vec<StatisticsKind> {
    StatisticsKind::ALL.to_vec()
}

/// The configuration file as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Particle mass μ shared by all channels.
    #[serde(default = "one")]
    pub mass: f64,
    pub channels: Vec<ChannelEntry>,
    pub modes: Vec<ModeEntry>,
    pub scatterer: ScattererEntry,
    #[serde(default = "all_kinds")]
    pub statistics: Vec<StatisticsKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepEntry>,
    #[serde(default)]
    pub quadrature: QuadratureEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelEntry {
    /// Threshold E⁰ₖ in units of ε₀.
    pub threshold: f64,
}

/// One incoming mode. Give either `center_momentum` or `center_energy`
/// (total energy, ε₀), and either `momentum_width` or `energy_width` (ε₀).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    /// 1-based input channel.
    pub channel: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_momentum: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_width: Option<f64>,
    #[serde(default)]
    pub inject_position: f64,
    /// Injection time in units of 1/ε₀.
    #[serde(default)]
    pub inject_time: f64,
    /// During a sweep the injection time becomes `inject_time + delay_factor·τ`.
    #[serde(default)]
    pub delay_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScattererEntry {
    BreitWigner {
        /// ε₀
        resonance_energy: f64,
        /// ε₀
        width: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Row-major `[re, im]` pairs.
    ConstantUnitary { matrix: Vec<Vec<[f64; 2]>> },
    Diagonal { phases: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEntry {
    /// Delay values τ in units of 1/ε₀.
    pub values: Vec<f64>,
    /// Observables to tabulate, e.g. `"all:3"`, `"none:3,4"`, `"count:3=1"`, `"mean:3"`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observables: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureEntry {
    pub support_half_width: f64,
    pub base_nodes: usize,
    pub scale: f64,
    pub convergence_tol: f64,
    pub max_doublings: usize,
    pub unitarity_tol: f64,
    pub psd_tol: f64,
}

impl Default for QuadratureEntry {
    fn default() -> Self {
        QuadratureSettings::default().into()
    }
}

impl From<QuadratureSettings> for QuadratureEntry {
    fn from(q: QuadratureSettings) -> Self {
        QuadratureEntry {
            support_half_width: q.support_half_width,
            base_nodes: q.base_nodes,
            scale: q.scale,
            convergence_tol: q.convergence_tol,
            max_doublings: q.max_doublings,
            unitarity_tol: q.unitarity_tol,
            psd_tol: q.psd_tol,
        }
    }
}

impl From<QuadratureEntry> for QuadratureSettings {
    fn from(q: QuadratureEntry) -> Self {
        QuadratureSettings {
            support_half_width: q.support_half_width,
            base_nodes: q.base_nodes,
            scale: q.scale,
            convergence_tol: q.convergence_tol,
            max_doublings: q.max_doublings,
            unitarity_tol: q.unitarity_tol,
            psd_tol: q.psd_tol,
        }
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| FcsError::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| FcsError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is plain data")
    }
}

/// Delay sweep in internal time units.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// τ as written in the file, units of 1/ε₀.
    pub values: Vec<f64>,
    pub delays: Vec<f64>,
    pub observables: Vec<String>,
}

/// Validated experiment in internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub channels: Vec<ChannelSpec>,
    pub modes: Vec<WavePacketMode>,
    /// Per-mode multiplier of the sweep delay.
    pub delay_factors: Vec<f64>,
    pub scatterer: ScattererModel,
    pub kinds: Vec<StatisticsKind>,
    pub sweep: Option<Sweep>,
    pub quadrature: QuadratureSettings,
    /// ε₀ in internal units.
    pub energy_unit: f64,
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_file(&ConfigFile::load(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_file(&ConfigFile::parse(text)?)
    }

    pub fn from_file(file: &ConfigFile) -> Result<Self> {
        if !(file.mass > 0.0 && file.mass.is_finite()) {
            return Err(FcsError::Config(format!("mass must be positive, got {}", file.mass)));
        }
        let eps = epsilon_0(file.mass, 1.0);
        if file.channels.is_empty() {
            return Err(FcsError::Config("no channels declared".into()));
        }
        let channels: Vec<ChannelSpec> = file
            .channels
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if !(c.threshold >= 0.0 && c.threshold.is_finite()) {
                    return Err(FcsError::Config(format!("channel {} threshold must be >= 0", i + 1)));
                }
                Ok(ChannelSpec {
                    index: i + 1,
                    threshold: c.threshold * eps,
                    mass: file.mass,
                })
            })
            .collect::<Result<_>>()?;
        if file.modes.is_empty() {
            return Err(FcsError::Config("at least one mode is required".into()));
        }

        let mut modes = Vec::with_capacity(file.modes.len());
        let mut delay_factors = Vec::with_capacity(file.modes.len());
        for (i, m) in file.modes.iter().enumerate() {
            let label = i + 1;
            if m.channel == 0 || m.channel > channels.len() {
                return Err(FcsError::Config(format!(
                    "mode {label}: channel {} outside 1..={}",
                    m.channel,
                    channels.len()
                )));
            }
            let ch = &channels[m.channel - 1];
            let p0 = match (m.center_momentum, m.center_energy) {
                (Some(p), None) => p,
                (None, Some(e)) => ch.momentum(e * eps).open().ok_or_else(|| {
                    FcsError::Config(format!("mode {label}: centre energy {e} is below the channel threshold"))
                })?,
                _ => {
                    return Err(FcsError::Config(format!(
                        "mode {label}: give exactly one of center_momentum, center_energy"
                    )))
                }
            };
            let sigma = match (m.momentum_width, m.energy_width) {
                (Some(s), None) => s,
                (None, Some(w)) => momentum_width_for_energy_width(w * eps, p0, file.mass),
                _ => {
                    return Err(FcsError::Config(format!(
                        "mode {label}: give exactly one of momentum_width, energy_width"
                    )))
                }
            };
            let mode = WavePacketMode {
                channel: m.channel,
                center_momentum: p0,
                momentum_width: sigma,
                inject_position: m.inject_position,
                inject_time: m.inject_time / eps,
            };
            mode.validate()
                .map_err(|e| FcsError::Config(format!("mode {label}: {e}")))?;
            if !m.delay_factor.is_finite() {
                return Err(FcsError::Config(format!("mode {label}: delay_factor must be finite")));
            }
            modes.push(mode);
            delay_factors.push(m.delay_factor);
        }

        let n = channels.len();
        let scatterer = match &file.scatterer {
            ScattererEntry::BreitWigner {
                resonance_energy,
                width,
                phase,
            } => ScattererModel::BreitWigner {
                resonance_energy: resonance_energy * eps,
                width: width * eps,
                phase: *phase,
                channels: n,
            },
            ScattererEntry::ConstantUnitary { matrix } => {
                let rows: Vec<Vec<Complex64>> = matrix
                    .iter()
                    .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                    .collect();
                ScattererModel::ConstantUnitary {
                    matrix: ComplexMatrix::from_rows(&rows).map_err(|e| FcsError::Config(e.to_string()))?,
                }
            }
            ScattererEntry::Diagonal { phases } => ScattererModel::Diagonal { phases: phases.clone() },
        };
        scatterer.validate()?;
        if scatterer.num_channels() != n {
            return Err(FcsError::Config(format!(
                "scatterer acts on {} channels but {n} are declared",
                scatterer.num_channels()
            )));
        }

        let mut kinds = file.statistics.clone();
        kinds.sort();
        kinds.dedup();
        if kinds.is_empty() {
            return Err(FcsError::Config("no statistics kinds requested".into()));
        }

        let sweep = match &file.sweep {
            Some(s) => {
                if s.values.is_empty() || s.values.iter().any(|v| !v.is_finite()) {
                    return Err(FcsError::Config("sweep values must be finite and non-empty".into()));
                }
                Some(Sweep {
                    values: s.values.clone(),
                    delays: s.values.iter().map(|v| v / eps).collect(),
                    observables: s.observables.clone(),
                })
            }
            None => None,
        };
        let quadrature: QuadratureSettings = file.quadrature.into();
        quadrature.validate()?;

        Ok(ExperimentConfig {
            channels,
            modes,
            delay_factors,
            scatterer,
            kinds,
            sweep,
            quadrature,
            energy_unit: eps,
        })
    }

    /// Number of particles J.
    pub fn particles(&self) -> usize {
        self.modes.len()
    }

    /// Modes with injection times shifted by `delay_factor·delay` (internal units).
    pub fn modes_at_delay(&self, delay: f64) -> Vec<WavePacketMode> {
        self.modes
            .iter()
            .zip(&self.delay_factors)
            .map(|(m, f)| WavePacketMode {
                inject_time: m.inject_time + f * delay,
                ..*m
            })
            .collect()
    }

    /// Overlap set at zero sweep delay.
    pub fn overlap_set(&self) -> Result<OverlapSet> {
        self.overlap_set_at(0.0)
    }

    /// Overlap set with the sweep delay set to `delay` (internal units).
    pub fn overlap_set_at(&self, delay: f64) -> Result<OverlapSet> {
        compute_overlap_set(&self.modes_at_delay(delay), &self.channels, &self.scatterer, &self.quadrature)
    }

    /// Converts a delay in units of 1/ε₀ to internal units.
    pub fn delay_from_file_units(&self, tau: f64) -> f64 {
        tau / self.energy_unit
    }

    /// Converts an internal delay to units of 1/ε₀.
    pub fn delay_to_file_units(&self, delay: f64) -> f64 {
        delay * self.energy_unit
    }
}

/// Ready-made configurations.
pub mod presets {
    use super::*;

    /// Resonance width Γ of the four-channel cavity, in ε₀.
    pub const CAVITY_WIDTH: f64 = 0.05;
    /// Resonance energy E^r(3,3) = 18ε₀.
    pub const CAVITY_RESONANCE: f64 = 18.0;
    /// Common inlet threshold 9ε₀.
    pub const CAVITY_THRESHOLD: f64 = 9.0;
    /// Number of τ points in the figure sweeps.
    pub const SWEEP_POINTS: usize = 161;
    /// Sweep range in units of 1/Γ.
    pub const SWEEP_SPAN_IN_LIFETIMES: f64 = 40.0;

    /// Uniform τ grid over [0, 40/Γ] in units of 1/ε₀.
    pub fn cavity_tau_grid() -> Vec<f64> {
        let end = SWEEP_SPAN_IN_LIFETIMES / CAVITY_WIDTH;
        (0..SWEEP_POINTS)
            .map(|i| end * i as f64 / (SWEEP_POINTS - 1) as f64)
            .collect()
    }

    /// Four identical inlets around a single resonance; one particle in
    /// channel 1 at t = 0 and two in channel 2 at τ/2 and τ. All packets
    /// are centred on the resonance with energy width `energy_width` (ε₀).
    pub fn resonant_cavity(energy_width: f64, observables: &[&str]) -> ConfigFile {
        let mode = |channel: usize, delay_factor: f64| ModeEntry {
            channel,
            center_momentum: None,
            center_energy: Some(CAVITY_RESONANCE),
            momentum_width: None,
            energy_width: Some(energy_width),
            inject_position: 0.0,
            inject_time: 0.0,
            delay_factor,
        };
        ConfigFile {
            mass: 1.0,
            channels: vec![
                ChannelEntry {
                    threshold: CAVITY_THRESHOLD
                };
                4
            ],
            modes: vec![mode(1, 0.0), mode(2, 0.5), mode(2, 1.0)],
            scatterer: ScattererEntry::BreitWigner {
                resonance_energy: CAVITY_RESONANCE,
                width: CAVITY_WIDTH,
                phase: 0.0,
            },
            statistics: all_kinds(),
            sweep: Some(SweepEntry {
                values: cavity_tau_grid(),
                observables: observables.iter().map(|s| s.to_string()).collect(),
            }),
            quadrature: QuadratureEntry::default(),
        }
    }

    /// Cavity preset tabulating W(3|3), W(0|3) and n̄₃.
    pub fn fig3() -> ConfigFile {
        resonant_cavity(CAVITY_WIDTH, &["all:3", "none:3", "mean:3"])
    }

    /// Cavity preset tabulating W(0,0|3,4) and W(1|3).
    pub fn fig4() -> ConfigFile {
        resonant_cavity(CAVITY_WIDTH, &["none:3,4", "count:3=1"])
    }

    /// Balanced two-port splitter with one synchronized packet per input.
    pub fn hom() -> ConfigFile {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mode = |channel: usize| ModeEntry {
            channel,
            center_momentum: None,
            center_energy: Some(10.0),
            momentum_width: None,
            energy_width: Some(0.5),
            inject_position: 0.0,
            inject_time: 0.0,
            delay_factor: if channel == 2 { 1.0 } else { 0.0 },
        };
        ConfigFile {
            mass: 1.0,
            channels: vec![ChannelEntry { threshold: 0.0 }; 2],
            modes: vec![mode(1), mode(2)],
            scatterer: ScattererEntry::ConstantUnitary {
                matrix: vec![vec![[r, 0.0], [0.0, r]], vec![[0.0, r], [r, 0.0]]],
            },
            statistics: all_kinds(),
            sweep: Some(SweepEntry {
                values: (0..=80).map(|i| f64::from(i) * 0.25 - 10.0).collect(),
                observables: vec!["count:1=1".into(), "all:1".into()],
            }),
            quadrature: QuadratureEntry::default(),
        }
    }

    /// Named preset lookup.
    pub fn by_name(name: &str) -> Option<ConfigFile> {
        match name {
            "fig3" => Some(fig3()),
            "fig4" => Some(fig4()),
            "hom" => Some(hom()),
            _ => None,
        }
    }
}
