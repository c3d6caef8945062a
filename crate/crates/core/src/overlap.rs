//! Overlap matrices of incoming modes (Î) and of their scattered parts in each
//! outgoing channel (Q̂(m)).
//!
//! All modes are sampled on one shared Gauss–Legendre grid in the variable
//! q = √(2μ(𝓔 − E_ref)), where E_ref is the lowest threshold among the
//! populated input channels. Each mode's amplitude carries the Jacobian
//! √(dp/dq) so that its samples are energy-normalized, and the S-matrix is
//! applied node by node. Every matrix is then a Gram matrix of weighted sample
//! vectors, which makes Hermiticity and positive-semidefiniteness hold by
//! construction and turns Σₘ Q̂(m) = Î into a statement about the unitarity
//! of S at the nodes.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{FcsError, Result};
use crate::linalg::{min_psd_eigenvalue, ComplexMatrix};
use crate::physics::{gaussian_amplitude, ChannelSpec, ScattererModel, WavePacketMode};
use crate::quadrature::GaussLegendre;

/// Knobs for the overlap quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    /// Support half-width W, in units of each mode's momentum width.
    pub support_half_width: f64,
    /// Node count n₀ before the delay and resonance-width growth factors.
    pub base_nodes: usize,
    /// Extra multiplier on the node count (`--quad-scale`).
    pub scale: f64,
    /// Largest entry change tolerated when the node count is doubled.
    pub convergence_tol: f64,
    /// How many doublings to try before giving up.
    pub max_doublings: usize,
    /// Tolerance on ‖Σₘ Q̂(m) − Î‖_max.
    pub unitarity_tol: f64,
    /// Eigenvalue slack for the positive-semidefiniteness checks.
    pub psd_tol: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            support_half_width: 8.0,
            base_nodes: 64,
            scale: 1.0,
            convergence_tol: 1e-9,
            max_doublings: 4,
            unitarity_tol: 1e-8,
            psd_tol: 1e-10,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.support_half_width > 0.0) || !(self.scale > 0.0) {
            return Err(FcsError::Config("quadrature support and scale must be positive".into()));
        }
        if self.base_nodes < 64 || !self.base_nodes.is_multiple_of(2) {
            return Err(FcsError::Config(format!(
                "base node count must be even and at least 64, got {}",
                self.base_nodes
            )));
        }
        if !(self.convergence_tol > 0.0) || !(self.unitarity_tol > 0.0) || !(self.psd_tol >= 0.0) {
            return Err(FcsError::Config("quadrature tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Row/column label (j_k, k) of an overlap matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModeLabel {
    /// Position of the mode in the configuration's mode list.
    pub source_index: usize,
    /// 1-based input channel k.
    pub channel: usize,
    /// 1-based rank j_k of the mode within its channel (by injection time).
    pub rank_in_channel: usize,
}

/// Quadrature diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureReport {
    /// Nodes of the accepted evaluation.
    pub nodes: usize,
    pub doublings: usize,
    /// Largest entry change in the last doubling.
    pub convergence_change: f64,
    /// ‖Σₘ Q̂(m) − Î‖_max.
    pub completeness_residual: f64,
    pub min_eigenvalue_input: f64,
    pub min_eigenvalue_outgoing: Vec<f64>,
    /// Smallest eigenvalue over all Î − Σ_{m∈set} Q̂(m), proper subsets.
    pub min_eigenvalue_remainder: f64,
    /// Integration interval in the grid variable q.
    pub interval: (f64, f64),
}

/// Î and the Q̂(m), with modes ordered by (channel, injection time).
#[derive(Debug, Clone)]
pub struct OverlapSet {
    pub input: ComplexMatrix,
    pub outgoing: Vec<ComplexMatrix>,
    pub mode_order: Vec<ModeLabel>,
    pub report: QuadratureReport,
}

impl OverlapSet {
    /// Number of particles J.
    pub fn particles(&self) -> usize {
        self.input.rows()
    }

    /// Number of outgoing channels N.
    pub fn channels(&self) -> usize {
        self.outgoing.len()
    }

    /// Q̂(m) for a 0-based channel index.
    pub fn q(&self, m: usize) -> &ComplexMatrix {
        &self.outgoing[m]
    }

    /// Î − Σ_{m∈set} Q̂(m), 0-based channel indices.
    pub fn remainder(&self, set: &[usize]) -> ComplexMatrix {
        let mut r = self.input.clone();
        for &m in set {
            r = r.sub(&self.outgoing[m]).expect("overlap matrices share a shape");
        }
        r
    }

    /// Builds an overlap set directly from matrices, checking shapes only.
    pub fn from_matrices(input: ComplexMatrix, outgoing: Vec<ComplexMatrix>) -> Result<Self> {
        let j = input.rows();
        if !input.is_square() || outgoing.iter().any(|q| q.rows() != j || q.cols() != j) {
            return Err(FcsError::Dimension("overlap matrices must all be J x J".into()));
        }
        if outgoing.is_empty() {
            return Err(FcsError::Dimension("at least one outgoing channel is required".into()));
        }
        let mode_order = (0..j)
            .map(|i| ModeLabel {
                source_index: i,
                channel: 0,
                rank_in_channel: i + 1,
            })
            .collect();
        let completeness_residual = completeness_residual(&input, &outgoing);
        Ok(OverlapSet {
            input,
            outgoing,
            mode_order,
            report: QuadratureReport {
                nodes: 0,
                doublings: 0,
                convergence_change: 0.0,
                completeness_residual,
                min_eigenvalue_input: f64::NAN,
                min_eigenvalue_outgoing: Vec::new(),
                min_eigenvalue_remainder: f64::NAN,
                interval: (0.0, 0.0),
            },
        })
    }

    /// Serializes the matrices as TOML with row-major `[re, im]` pairs.
    pub fn to_text(&self) -> String {
        #[derive(Serialize)]
        struct Dump<'a> {
            modes: &'a [ModeLabel],
            report: &'a QuadratureReport,
            input: Vec<Vec<[f64; 2]>>,
            outgoing: Vec<Vec<Vec<[f64; 2]>>>,
        }
        fn pairs(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
            (0..m.rows())
                .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
                .collect()
        }
        let dump = Dump {
            modes: &self.mode_order,
            report: &self.report,
            input: pairs(&self.input),
            outgoing: self.outgoing.iter().map(pairs).collect(),
        };
        toml::to_string(&dump).expect("overlap dump is plain data")
    }
}

/// ‖Σₘ Q̂(m) − Î‖_max.
pub fn completeness_residual(input: &ComplexMatrix, outgoing: &[ComplexMatrix]) -> f64 {
    let mut sum = ComplexMatrix::zeros(input.rows(), input.cols());
    for q in outgoing {
        sum = sum.add(q).expect("same shape");
    }
    sum.max_abs_diff(input)
}

/// Modes sorted by (channel, injection time), stable for ties.
fn ordered_modes(modes: &[WavePacketMode]) -> (Vec<WavePacketMode>, Vec<ModeLabel>) {
    let mut idx: Vec<usize> = (0..modes.len()).collect();
    idx.sort_by(|&a, &b| {
        modes[a]
            .channel
            .cmp(&modes[b].channel)
            .then(modes[a].inject_time.total_cmp(&modes[b].inject_time))
    });
    let mut labels = Vec::with_capacity(modes.len());
    let mut rank = 0;
    let mut prev_channel = None;
    for &i in &idx {
        if prev_channel != Some(modes[i].channel) {
            rank = 0;
            prev_channel = Some(modes[i].channel);
        }
        rank += 1;
        labels.push(ModeLabel {
            source_index: i,
            channel: modes[i].channel,
            rank_in_channel: rank,
        });
    }
    (idx.iter().map(|&i| modes[i]).collect(), labels)
}

/// Shared sampling grid for one set of modes.
struct Grid<'a> {
    modes: &'a [WavePacketMode],
    channels: &'a [ChannelSpec],
    mass: f64,
    e_ref: f64,
    q_lo: f64,
    q_hi: f64,
    base_count: usize,
}

/// Weighted samples √w·ψ̃ᵢ(q) for every mode at every node, plus the node energies.
struct Samples {
    energies: Vec<f64>,
    /// `values[i][n]`
    values: Vec<Vec<Complex64>>,
}

impl<'a> Grid<'a> {
    fn new(
        modes: &'a [WavePacketMode],
        channels: &'a [ChannelSpec],
        scatterer: Option<&ScattererModel>,
        quad: &QuadratureSettings,
    ) -> Result<Self> {
        quad.validate()?;
        if modes.is_empty() {
            return Err(FcsError::Config("at least one mode is required".into()));
        }
        let n_channels = channels.len();
        for (pos, ch) in channels.iter().enumerate() {
            if ch.index != pos + 1 || !(ch.threshold >= 0.0) || !(ch.mass > 0.0) {
                return Err(FcsError::Config(format!(
                    "channel {} must carry index {} with threshold >= 0 and positive mass",
                    pos + 1,
                    pos + 1
                )));
            }
        }
        let mass = channels.first().map_or(1.0, |c| c.mass);
        if channels.iter().any(|c| c.mass != mass) {
            return Err(FcsError::Config("all channels must share one mass".into()));
        }
        for mode in modes {
            mode.validate()?;
            if mode.channel == 0 || mode.channel > n_channels {
                return Err(FcsError::Config(format!(
                    "mode channel {} outside 1..={n_channels}",
                    mode.channel
                )));
            }
        }

        let channel_of = |m: &WavePacketMode| &channels[m.channel - 1];
        let e_ref = modes
            .iter()
            .map(|m| channel_of(m).threshold)
            .fold(f64::INFINITY, f64::min);
        let w = quad.support_half_width;
        let mut q_lo = f64::INFINITY;
        let mut q_hi = 0.0f64;
        for m in modes {
            let (a, b) = m.support(w);
            let shift = 2.0 * mass * (channel_of(m).threshold - e_ref);
            q_lo = q_lo.min((a * a + shift).sqrt());
            q_hi = q_hi.max((b * b + shift).sqrt());
        }

        let v0 = modes
            .iter()
            .map(|m| m.center_velocity(channel_of(m)))
            .fold(0.0, f64::max);
        let mut separation = 0.0f64;
        for (i, a) in modes.iter().enumerate() {
            for b in &modes[i + 1..] {
                let dt = (a.inject_time - b.inject_time).abs()
                    + (a.inject_position - b.inject_position).abs() / v0;
                separation = separation.max(dt);
            }
        }
        let span = q_hi - q_lo;
        let energy_span = v0 * span;
        // exp[-i𝓔Δt] over the interval: v₀·Δt·σ_p/π per packet-width of span
        let phase_term = v0 * separation * span / (2.0 * w * std::f64::consts::PI);
        let feature_term = scatterer
            .and_then(ScattererModel::feature_width)
            .map_or(0.0, |gamma| energy_span / (4.0 * gamma));
        let raw = quad.base_nodes as f64 * quad.scale * (1.0 + phase_term + feature_term);
        let mut base_count = raw.ceil().max(64.0) as usize;
        base_count += base_count % 2;

        Ok(Grid {
            modes,
            channels,
            mass,
            e_ref,
            q_lo,
            q_hi,
            base_count,
        })
    }

    fn sample(&self, nodes: usize) -> Samples {
        let rule = GaussLegendre::cached(nodes);
        let mut energies = Vec::with_capacity(nodes);
        let mut values = vec![Vec::with_capacity(nodes); self.modes.len()];
        for (q, weight) in rule.scaled(self.q_lo, self.q_hi) {
            let energy = self.e_ref + q * q / (2.0 * self.mass);
            energies.push(energy);
            let sw = weight.sqrt();
            for (mode, out) in self.modes.iter().zip(values.iter_mut()) {
                let channel = &self.channels[mode.channel - 1];
                let z = match channel.momentum(energy).open() {
                    Some(p) => {
                        let jacobian = (q / p).sqrt();
                        gaussian_amplitude(p, mode) * mode.injection_phase(p, energy) * (sw * jacobian)
                    }
                    None => Complex64::new(0.0, 0.0),
                };
                out.push(z);
            }
        }
        // renormalize on this grid so that every Iᵢᵢ is one
        for v in values.iter_mut() {
            let norm: f64 = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
            if norm > 0.0 {
                v.iter_mut().for_each(|z| *z /= norm);
            }
        }
        Samples { energies, values }
    }
}

fn gram(rows: &[Vec<Complex64>], same_block: impl Fn(usize, usize) -> bool) -> ComplexMatrix {
    let j = rows.len();
    let mut m = ComplexMatrix::zeros(j, j);
    for a in 0..j {
        for b in a..j {
            if !same_block(a, b) {
                continue;
            }
            // ⟨b|a⟩ with row a as the ket
            let z: Complex64 = rows[a].iter().zip(&rows[b]).map(|(x, y)| y.conj() * x).sum();
            m[(a, b)] = z;
            m[(b, a)] = z.conj();
        }
    }
    m
}

fn input_matrix(modes: &[WavePacketMode], samples: &Samples) -> ComplexMatrix {
    let mut m = gram(&samples.values, |a, b| modes[a].channel == modes[b].channel);
    for i in 0..modes.len() {
        m[(i, i)] = Complex64::new(1.0, 0.0);
    }
    m
}

fn outgoing_matrices(
    modes: &[WavePacketMode],
    channels: &[ChannelSpec],
    scatterer: &ScattererModel,
    samples: &Samples,
    which: Option<usize>,
) -> Result<Vec<ComplexMatrix>> {
    let n_out = scatterer.num_channels();
    let s_at_nodes: Vec<ComplexMatrix> = samples
        .energies
        .iter()
        .map(|&e| scatterer.s_matrix(e, channels))
        .collect::<Result<_>>()?;
    let targets: Vec<usize> = match which {
        Some(m) => vec![m],
        None => (0..n_out).collect(),
    };
    Ok(targets
        .into_iter()
        .map(|m| {
            let rows: Vec<Vec<Complex64>> = modes
                .iter()
                .zip(&samples.values)
                .map(|(mode, v)| {
                    v.iter()
                        .zip(&s_at_nodes)
                        .map(|(z, s)| s[(m, mode.channel - 1)] * z)
                        .collect()
                })
                .collect();
            gram(&rows, |_, _| true)
        })
        .collect())
}

fn max_change(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max)
}

/// Evaluates `build` at the grid's node count and doubles until two
/// successive results agree to `convergence_tol`.
fn converge(
    grid: &Grid<'_>,
    quad: &QuadratureSettings,
    mut build: impl FnMut(&Samples) -> Result<Vec<ComplexMatrix>>,
) -> Result<(Vec<ComplexMatrix>, usize, usize, f64)> {
    let mut nodes = grid.base_count;
    let mut previous = build(&grid.sample(nodes))?;
    let mut change = f64::INFINITY;
    for doubling in 1..=quad.max_doublings.max(1) {
        let next_nodes = nodes * 2;
        let next = build(&grid.sample(next_nodes))?;
        change = max_change(&previous, &next);
        if change <= quad.convergence_tol {
            return Ok((next, next_nodes, doubling, change));
        }
        nodes = next_nodes;
        previous = next;
    }
    Err(FcsError::Convergence {
        from: nodes / 2,
        to: nodes,
        change,
        limit: quad.convergence_tol,
    })
}

/// Î for the given modes, in the order supplied.
pub fn input_overlaps(
    modes: &[WavePacketMode],
    channels: &[ChannelSpec],
    quad: &QuadratureSettings,
) -> Result<ComplexMatrix> {
    let grid = Grid::new(modes, channels, None, quad)?;
    let (mut out, ..) = converge(&grid, quad, |s| Ok(vec![input_matrix(modes, s)]))?;
    Ok(out.remove(0))
}

/// Q̂(m) for a 1-based outgoing channel `m`, modes in the order supplied.
pub fn outgoing_overlaps(
    modes: &[WavePacketMode],
    channels: &[ChannelSpec],
    scatterer: &ScattererModel,
    m: usize,
    quad: &QuadratureSettings,
) -> Result<ComplexMatrix> {
    check_scatterer(channels, scatterer)?;
    if m == 0 || m > channels.len() {
        return Err(FcsError::Config(format!("outgoing channel {m} outside 1..={}", channels.len())));
    }
    let grid = Grid::new(modes, channels, Some(scatterer), quad)?;
    let (mut out, ..) = converge(&grid, quad, |s| {
        outgoing_matrices(modes, channels, scatterer, s, Some(m - 1))
    })?;
    Ok(out.remove(0))
}

fn check_scatterer(channels: &[ChannelSpec], scatterer: &ScattererModel) -> Result<()> {
    scatterer.validate()?;
    if scatterer.num_channels() != channels.len() {
        return Err(FcsError::Config(format!(
            "scatterer has {} channels but {} are declared",
            scatterer.num_channels(),
            channels.len()
        )));
    }
    Ok(())
}

/// Computes Î and every Q̂(m), then verifies Hermiticity, unit diagonal,
/// completeness and positive-semidefiniteness of Î, Q̂(m) and every remainder
/// Î − Σ_{m∈set} Q̂(m).
pub fn compute_overlap_set(
    modes: &[WavePacketMode],
    channels: &[ChannelSpec],
    scatterer: &ScattererModel,
    quad: &QuadratureSettings,
) -> Result<OverlapSet> {
    check_scatterer(channels, scatterer)?;
    let (sorted, labels) = ordered_modes(modes);
    let grid = Grid::new(&sorted, channels, Some(scatterer), quad)?;
    let (mut mats, nodes, doublings, change) = converge(&grid, quad, |s| {
        let mut all = vec![input_matrix(&sorted, s)];
        all.extend(outgoing_matrices(&sorted, channels, scatterer, s, None)?);
        Ok(all)
    })?;
    let outgoing = mats.split_off(1);
    let input = mats.pop().expect("input matrix");

    let consistency = |identity: String, residual: f64, tol: f64| FcsError::Consistency {
        identity,
        residual,
        tol,
    };

    let herm = std::iter::once(&input)
        .chain(&outgoing)
        .map(ComplexMatrix::hermitian_deviation)
        .fold(0.0, f64::max);
    if herm > 0.0 {
        return Err(consistency("Hermiticity of overlap matrices".into(), herm, 0.0));
    }
    let completeness = completeness_residual(&input, &outgoing);
    if completeness > quad.unitarity_tol {
        return Err(consistency("sum_m Q(m) = I".into(), completeness, quad.unitarity_tol));
    }

    let min_eigenvalue_input = min_psd_eigenvalue(&input, quad.psd_tol)?;
    if min_eigenvalue_input < -quad.psd_tol {
        return Err(consistency("I is PSD".into(), -min_eigenvalue_input, quad.psd_tol));
    }
    let mut min_eigenvalue_outgoing = Vec::with_capacity(outgoing.len());
    for (m, q) in outgoing.iter().enumerate() {
        let ev = min_psd_eigenvalue(q, quad.psd_tol)?;
        if ev < -quad.psd_tol {
            return Err(consistency(format!("Q({}) is PSD", m + 1), -ev, quad.psd_tol));
        }
        min_eigenvalue_outgoing.push(ev);
    }

    let mut set = OverlapSet {
        input,
        outgoing,
        mode_order: labels,
        report: QuadratureReport {
            nodes,
            doublings,
            convergence_change: change,
            completeness_residual: completeness,
            min_eigenvalue_input,
            min_eigenvalue_outgoing,
            min_eigenvalue_remainder: f64::INFINITY,
            interval: (grid.q_lo, grid.q_hi),
        },
    };

    let n = set.channels();
    let mut min_rem = f64::INFINITY;
    for mask in 1u32..(1u32 << n) - 1 {
        let subset: Vec<usize> = (0..n).filter(|&m| mask & (1 << m) != 0).collect();
        let ev = min_psd_eigenvalue(&set.remainder(&subset), quad.psd_tol)?;
        if ev < -quad.psd_tol {
            let names: Vec<String> = subset.iter().map(|m| (m + 1).to_string()).collect();
            return Err(consistency(
                format!("I - sum Q over channels {{{}}} is PSD", names.join(",")),
                -ev,
                quad.psd_tol,
            ));
        }
        min_rem = min_rem.min(ev);
    }
    set.report.min_eigenvalue_remainder = if n > 1 { min_rem } else { 0.0 };
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::balanced_beam_splitter;

    fn mode(channel: usize, t: f64) -> WavePacketMode {
        WavePacketMode {
            channel,
            center_momentum: 4.0,
            momentum_width: 0.2,
            inject_position: 0.0,
            inject_time: t,
        }
    }

    fn two_channels() -> Vec<ChannelSpec> {
        vec![ChannelSpec::new(1, 0.0), ChannelSpec::new(2, 0.0)]
    }

    #[test]
    fn identical_modes_overlap_fully() {
        let q = QuadratureSettings::default();
        let i = input_overlaps(&[mode(1, 0.0), mode(1, 0.0)], &two_channels(), &q).unwrap();
        assert!((i[(0, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(i[(0, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn different_channels_are_orthogonal() {
        let q = QuadratureSettings::default();
        let i = input_overlaps(&[mode(1, 0.0), mode(2, 0.0)], &two_channels(), &q).unwrap();
        assert_eq!(i[(0, 1)], Complex64::new(0.0, 0.0));
        assert_eq!(i[(1, 0)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn modes_are_sorted_by_channel_then_time() {
        let modes = [mode(2, 5.0), mode(1, 1.0), mode(2, 0.5)];
        let (sorted, labels) = ordered_modes(&modes);
        assert_eq!(sorted[0].channel, 1);
        assert_eq!(sorted[1].inject_time, 0.5);
        assert_eq!(labels[1].source_index, 2);
        assert_eq!(labels[2].rank_in_channel, 2);
    }

    #[test]
    fn diagonal_scatterer_reproduces_input_blocks() {
        let chans = two_channels();
        let modes = [mode(1, 0.0), mode(1, 0.3), mode(2, 0.1)];
        let diag = ScattererModel::Diagonal { phases: vec![0.4, -1.1] };
        let set = compute_overlap_set(&modes, &chans, &diag, &QuadratureSettings::default()).unwrap();
        let i = &set.input;
        for (m, q) in set.outgoing.iter().enumerate() {
            for a in 0..3 {
                for b in 0..3 {
                    let in_m = set.mode_order[a].channel == m + 1 && set.mode_order[b].channel == m + 1;
                    let expected = if in_m { i[(a, b)] } else { Complex64::new(0.0, 0.0) };
                    assert!((q[(a, b)] - expected).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn closed_channel_propagates_domain_error() {
        let chans = vec![ChannelSpec::new(1, 0.0), ChannelSpec::new(2, 100.0)];
        let model = ScattererModel::ConstantUnitary {
            matrix: balanced_beam_splitter(),
        };
        let err = compute_overlap_set(&[mode(1, 0.0)], &chans, &model, &QuadratureSettings::default()).unwrap_err();
        assert!(matches!(err, FcsError::Domain(_)));
    }

    #[test]
    fn bad_settings_are_config_errors() {
        let q = QuadratureSettings {
            base_nodes: 63,
            ..Default::default()
        };
        assert!(matches!(q.validate(), Err(FcsError::Config(_))));
    }

    #[test]
    fn dump_is_parseable_toml() {
        let chans = two_channels();
        let model = ScattererModel::ConstantUnitary {
            matrix: balanced_beam_splitter(),
        };
        let set = compute_overlap_set(&[mode(1, 0.0), mode(2, 0.0)], &chans, &model, &QuadratureSettings::default())
            .unwrap();
        let text = set.to_text();
        let parsed: toml::Value = toml::from_str(&text).unwrap();
        let q1 = parsed["outgoing"][0][0][0].as_array().unwrap();
        assert_eq!(q1[0].as_float().unwrap(), set.outgoing[0][(0, 0)].re);
    }
}
