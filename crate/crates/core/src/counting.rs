//! Full counting statistics from an [`OverlapSet`].
//!
//! The generating function is G±(α) = S±[T̂(α)]/S±[Î] with
//! T̂(α) = Σₘ αₘ Q̂(m). Because S± is multilinear in rows, the coefficient of
//! α₁^{n₁}…α_N^{n_N} is the sum of S±[M(c)] over every assignment c of rows
//! to channels with occupation n, where row i of M(c) is row i of Q̂(cᵢ).
//! That is how [`full_distribution`] extracts the probabilities.
//!
//! Channel indices in this module are 0-based.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use crate::error::{FcsError, Result};
use crate::linalg::{s_pm, ComplexMatrix, StatisticsKind};
use crate::overlap::OverlapSet;

/// |S±[Î]| below this is treated as a null input state.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Agreement required between two evaluation routes of the same quantity.
pub const ROUTE_TOL: f64 = 1e-10;
/// Default ‖Î − 1‖_max below which inputs count as initially uncorrelated.
pub const UNCORRELATED_TOL: f64 = 0.01;
/// Slack on the bunching inequalities before they count as violated.
pub const INEQUALITY_SLACK: f64 = 1e-9;
/// Upper bound on N^J assignments enumerated by [`full_distribution`].
pub const MAX_ASSIGNMENTS: u64 = 50_000_000;
/// Size limits of the DFT oracle.
pub const DFT_MAX_PARTICLES: usize = 8;
pub const DFT_MAX_CHANNELS: usize = 6;

/// Occupation numbers (n₁, …, n_N).
pub type Occupation = Vec<usize>;

/// Number of ways C(J+N−1, N−1) to place J particles into N channels.
pub fn outcome_count(particles: usize, channels: usize) -> Result<u64> {
    if channels == 0 {
        return Err(FcsError::Range("at least one channel is required".into()));
    }
    // C(J+N-1, k) with k = min(J, N-1), built incrementally so each step is exact
    let n = (particles + channels - 1) as u128;
    let k = particles.min(channels - 1) as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc
            .checked_mul(n - k + i)
            .ok_or_else(|| FcsError::Range("outcome count overflows".into()))?
            / i;
    }
    u64::try_from(acc).map_err(|_| FcsError::Range(format!("C({n}, {k}) exceeds 64 bits")))
}

/// Every occupation vector with Σnₘ = J, in lexicographic order.
pub fn occupations(particles: usize, channels: usize) -> Vec<Occupation> {
    fn rec(left: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Occupation>) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for n in 0..=left {
            prefix.push(n);
            rec(left - n, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if channels > 0 {
        rec(particles, channels, &mut Vec::with_capacity(channels), &mut out);
    }
    out
}

/// Probabilities of every outcome for one kind of particle.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingDistribution {
    pub kind: StatisticsKind,
    pub particles: usize,
    pub channels: usize,
    /// Raw values, including tiny negative rounding noise.
    pub probabilities: BTreeMap<Occupation, f64>,
    /// |Σ W − 1|.
    pub normalization_residual: f64,
    /// Largest |coefficient| found off the Σn = J shell (only the DFT route
    /// can see these; zero otherwise).
    pub off_support_residual: f64,
}

impl CountingDistribution {
    fn from_map(kind: StatisticsKind, particles: usize, channels: usize, probabilities: BTreeMap<Occupation, f64>) -> Self {
        let total: f64 = probabilities.values().sum();
        CountingDistribution {
            kind,
            particles,
            channels,
            probabilities,
            normalization_residual: (total - 1.0).abs(),
            off_support_residual: 0.0,
        }
    }

    /// W(n); zero for occupations off the Σn = J shell.
    pub fn get(&self, occupation: &[usize]) -> f64 {
        self.probabilities.get(occupation).copied().unwrap_or(0.0)
    }

    /// W(n) with rounding noise below zero clipped, for reporting.
    pub fn clipped(&self, occupation: &[usize]) -> f64 {
        self.get(occupation).max(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, f64)> {
        self.probabilities.iter().map(|(k, &v)| (k, v))
    }

    /// Largest entrywise difference to another distribution over the same outcomes.
    pub fn max_difference(&self, other: &CountingDistribution) -> f64 {
        self.probabilities
            .keys()
            .chain(other.probabilities.keys())
            .map(|n| (self.get(n) - other.get(n)).abs())
            .fold(0.0, f64::max)
    }

    /// Smallest raw probability.
    pub fn min_probability(&self) -> f64 {
        self.probabilities.values().copied().fold(f64::INFINITY, f64::min)
    }
}

fn denominator(ov: &OverlapSet, kind: StatisticsKind) -> Result<Complex64> {
    let d = s_pm(&ov.input, kind)?;
    if d.norm() <= DEGENERACY_TOL {
        return Err(FcsError::DegenerateInput { kind, value: d.norm() });
    }
    Ok(d)
}

/// w(m, i) = Q_ii(m): probability that a lone particle in mode i leaves via m.
/// Indexed `[m][i]`.
pub fn dp_weights(ov: &OverlapSet) -> Vec<Vec<f64>> {
    ov.outgoing
        .iter()
        .map(|q| (0..q.rows()).map(|i| q[(i, i)].re).collect())
        .collect()
}

fn dp_distribution(ov: &OverlapSet) -> CountingDistribution {
    let (j, n) = (ov.particles(), ov.channels());
    let w = dp_weights(ov);
    // G_DP(α) = Πᵢ Σₘ αₘ w(m,i), expanded one particle at a time
    let mut poly: BTreeMap<Occupation, f64> = BTreeMap::new();
    poly.insert(vec![0; n], 1.0);
    for i in 0..j {
        let mut next = BTreeMap::new();
        for (occ, &p) in &poly {
            for (m, wm) in w.iter().enumerate() {
                let mut o = occ.clone();
                o[m] += 1;
                *next.entry(o).or_insert(0.0) += p * wm[i];
            }
        }
        poly = next;
    }
    let mut probabilities: BTreeMap<Occupation, f64> = occupations(j, n).into_iter().map(|o| (o, 0.0)).collect();
    for (o, p) in poly {
        probabilities.insert(o, p);
    }
    CountingDistribution::from_map(StatisticsKind::Distinguishable, j, n, probabilities)
}

/// W(n) for every outcome n.
pub fn full_distribution(ov: &OverlapSet, kind: StatisticsKind) -> Result<CountingDistribution> {
    if kind == StatisticsKind::Distinguishable {
        return Ok(dp_distribution(ov));
    }
    let (j, n) = (ov.particles(), ov.channels());
    let assignments = (n as u64)
        .checked_pow(j as u32)
        .filter(|&a| a <= MAX_ASSIGNMENTS)
        .ok_or_else(|| FcsError::Range(format!("{n}^{j} row assignments exceed {MAX_ASSIGNMENTS}")))?;
    let denom = denominator(ov, kind)?;

    // occupation encoded in base J+1
    let radix = j + 1;
    let mut sums: HashMap<usize, Complex64> = HashMap::new();
    let mut assignment = vec![0usize; j];
    let mut m = ComplexMatrix::zeros(j, j);
    for _ in 0..assignments {
        let mut key = 0usize;
        let mut all_zero_row = false;
        for (i, &c) in assignment.iter().enumerate() {
            let row = ov.outgoing[c].row(i);
            all_zero_row |= row.iter().all(|z| z.norm_sqr() == 0.0);
            m.set_row(i, row);
        }
        for &c in &assignment {
            key += radix.pow(c as u32);
        }
        if !all_zero_row {
            *sums.entry(key).or_insert(Complex64::new(0.0, 0.0)) += s_pm(&m, kind)?;
        }
        // next assignment, last row fastest
        for digit in assignment.iter_mut().rev() {
            *digit += 1;
            if *digit < n {
                break;
            }
            *digit = 0;
        }
    }

    let probabilities = occupations(j, n)
        .into_iter()
        .map(|o| {
            let key: usize = o.iter().enumerate().map(|(c, &k)| k * radix.pow(c as u32)).sum();
            let value = sums.get(&key).map_or(0.0, |s| (s / denom).re);
            (o, value)
        })
        .collect();
    Ok(CountingDistribution::from_map(kind, j, n, probabilities))
}

/// W(n|m) for n = 0..=J, summed from the full distribution.
pub fn marginal_from_distribution(dist: &CountingDistribution, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; dist.particles + 1];
    for (occ, p) in dist.iter() {
        out[occ[m]] += p;
    }
    out
}

/// W(n|m) from row-subset replacements in Î − Q̂(m).
pub fn marginal_by_row_subsets(ov: &OverlapSet, kind: StatisticsKind, m: usize) -> Result<Vec<f64>> {
    check_channel(ov, m)?;
    let j = ov.particles();
    let q = &ov.outgoing[m];
    if kind == StatisticsKind::Distinguishable {
        // Πᵢ (1 − wᵢ + wᵢα)
        let mut poly = vec![1.0];
        for i in 0..j {
            let w = q[(i, i)].re;
            let mut next = vec![0.0; poly.len() + 1];
            for (k, &c) in poly.iter().enumerate() {
                next[k] += c * (1.0 - w);
                next[k + 1] += c * w;
            }
            poly = next;
        }
        return Ok(poly);
    }
    let denom = denominator(ov, kind)?;
    let base = ov.remainder(&[m]);
    let mut out = vec![Complex64::new(0.0, 0.0); j + 1];
    for mask in 0u64..(1u64 << j) {
        let mut mat = base.clone();
        for i in 0..j {
            if mask & (1 << i) != 0 {
                mat.set_row(i, q.row(i));
            }
        }
        out[mask.count_ones() as usize] += s_pm(&mat, kind)?;
    }
    Ok(out.into_iter().map(|z| (z / denom).re).collect())
}

/// W(n|m) by summation, cross-checked against the row-subset route.
pub fn single_channel_marginal(dist: &CountingDistribution, ov: &OverlapSet, m: usize) -> Result<Vec<f64>> {
    check_channel(ov, m)?;
    let summed = marginal_from_distribution(dist, m);
    let direct = marginal_by_row_subsets(ov, dist.kind, m)?;
    let residual = max_abs_diff(&summed, &direct);
    if residual > ROUTE_TOL {
        return Err(FcsError::Consistency {
            identity: format!("marginal W(n|{}) by summation vs row subsets", m + 1),
            residual,
            tol: ROUTE_TOL,
        });
    }
    Ok(summed)
}

/// n̄ₘ = Σ nₘ W(n).
pub fn mean_numbers(dist: &CountingDistribution) -> Vec<f64> {
    let mut out = vec![0.0; dist.channels];
    for (occ, p) in dist.iter() {
        for (m, &k) in occ.iter().enumerate() {
            out[m] += k as f64 * p;
        }
    }
    out
}

/// n̄ₘ from single-row replacements: Σ_l S±[Î^(l)]/S±[Î], where Î^(l) is Î
/// with row l taken from Q̂(m).
pub fn mean_numbers_direct(ov: &OverlapSet, kind: StatisticsKind) -> Result<Vec<f64>> {
    let j = ov.particles();
    if kind == StatisticsKind::Distinguishable {
        return Ok(dp_weights(ov).iter().map(|w| w.iter().sum()).collect());
    }
    let denom = denominator(ov, kind)?;
    ov.outgoing
        .iter()
        .map(|q| {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..j {
                let mut mat = ov.input.clone();
                mat.set_row(l, q.row(l));
                acc += s_pm(&mat, kind)?;
            }
            Ok((acc / denom).re)
        })
        .collect()
}

/// Mean numbers by both routes; errors if they disagree.
pub fn mean_numbers_checked(dist: &CountingDistribution, ov: &OverlapSet) -> Result<Vec<f64>> {
    let summed = mean_numbers(dist);
    let direct = mean_numbers_direct(ov, dist.kind)?;
    let residual = max_abs_diff(&summed, &direct);
    if residual > ROUTE_TOL {
        return Err(FcsError::Consistency {
            identity: "mean numbers by summation vs row replacement".into(),
            residual,
            tol: ROUTE_TOL,
        });
    }
    Ok(summed)
}

fn validate_selection(dist_channels: usize, particles: usize, channels: &[usize], counts: &[usize]) -> Result<()> {
    if channels.len() != counts.len() || channels.is_empty() {
        return Err(FcsError::Range("channels and counts must be non-empty and equally long".into()));
    }
    for (a, &c) in channels.iter().enumerate() {
        if c >= dist_channels {
            return Err(FcsError::Range(format!("channel index {c} out of range")));
        }
        if channels[..a].contains(&c) {
            return Err(FcsError::Range(format!("channel index {c} repeated")));
        }
    }
    if counts.iter().sum::<usize>() > particles {
        return Err(FcsError::Range("counts exceed the particle number".into()));
    }
    Ok(())
}

/// Probability of observing `counts[l]` particles in `channels[l]` for every l,
/// regardless of the other channels. Summed from the distribution.
pub fn joint_from_distribution(dist: &CountingDistribution, channels: &[usize], counts: &[usize]) -> Result<f64> {
    validate_selection(dist.channels, dist.particles, channels, counts)?;
    Ok(dist
        .iter()
        .filter(|(occ, _)| channels.iter().zip(counts).all(|(&c, &k)| occ[c] == k))
        .map(|(_, p)| p)
        .sum())
}

/// Probability that none of `set` receives a particle: S±[Î − Σ Q̂]/S±[Î], or
/// Πᵢ(1 − Σ_{m∈set} w(m,i)) for distinguishable particles.
pub fn no_particle_probability(ov: &OverlapSet, kind: StatisticsKind, set: &[usize]) -> Result<f64> {
    for &m in set {
        check_channel(ov, m)?;
    }
    if kind == StatisticsKind::Distinguishable {
        let w = dp_weights(ov);
        return Ok((0..ov.particles())
            .map(|i| 1.0 - set.iter().map(|&m| w[m][i]).sum::<f64>())
            .product());
    }
    let denom = denominator(ov, kind)?;
    Ok((s_pm(&ov.remainder(set), kind)? / denom).re)
}

/// Probability that every particle leaves via `m`: S±[Q̂(m)]/S±[Î], or Πᵢ w(m,i).
pub fn all_particle_probability(ov: &OverlapSet, kind: StatisticsKind, m: usize) -> Result<f64> {
    check_channel(ov, m)?;
    if kind == StatisticsKind::Distinguishable {
        return Ok(dp_weights(ov)[m].iter().product());
    }
    let denom = denominator(ov, kind)?;
    Ok((s_pm(&ov.outgoing[m], kind)? / denom).re)
}

/// Joint probability, with the all-zero case cross-checked against the
/// remainder-matrix formula.
pub fn joint_probability(
    dist: &CountingDistribution,
    ov: &OverlapSet,
    channels: &[usize],
    counts: &[usize],
) -> Result<f64> {
    let summed = joint_from_distribution(dist, channels, counts)?;
    if counts.iter().all(|&k| k == 0) {
        let direct = no_particle_probability(ov, dist.kind, channels)?;
        let residual = (summed - direct).abs();
        if residual > ROUTE_TOL {
            return Err(FcsError::Consistency {
                identity: "no-particle probability by summation vs remainder matrix".into(),
                residual,
                tol: ROUTE_TOL,
            });
        }
    }
    Ok(summed)
}

/// Recovers every coefficient of G±(α) by sampling α on (J+1)-th roots of
/// unity and inverting the multidimensional DFT. Independent of the
/// assignment enumeration in [`full_distribution`].
pub fn dft_coefficient_oracle(ov: &OverlapSet, kind: StatisticsKind) -> Result<CountingDistribution> {
    let (j, n) = (ov.particles(), ov.channels());
    if j > DFT_MAX_PARTICLES || n > DFT_MAX_CHANNELS {
        return Err(FcsError::Range(format!(
            "DFT oracle limited to J <= {DFT_MAX_PARTICLES}, N <= {DFT_MAX_CHANNELS} (got J = {j}, N = {n})"
        )));
    }
    let radix = j + 1;
    let size = radix.pow(n as u32);
    let roots: Vec<Complex64> = (0..radix)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / radix as f64))
        .collect();

    let denom = match kind {
        StatisticsKind::Distinguishable => Complex64::new(1.0, 0.0),
        _ => denominator(ov, kind)?,
    };
    let w = dp_weights(ov);

    // axis m has stride radix^m
    let mut grid = vec![Complex64::new(0.0, 0.0); size];
    let mut t = ComplexMatrix::zeros(j, j);
    for (flat, value) in grid.iter_mut().enumerate() {
        let alphas: Vec<Complex64> = (0..n).map(|m| roots[(flat / radix.pow(m as u32)) % radix]).collect();
        *value = match kind {
            StatisticsKind::Distinguishable => (0..j)
                .map(|i| alphas.iter().zip(&w).map(|(a, wm)| a * wm[i]).sum::<Complex64>())
                .product(),
            _ => {
                for r in 0..j {
                    for c in 0..j {
                        t[(r, c)] = alphas.iter().zip(&ov.outgoing).map(|(a, q)| a * q[(r, c)]).sum();
                    }
                }
                s_pm(&t, kind)? / denom
            }
        };
    }

    // inverse transform along each axis: c_k = (1/R) Σ_s g_s ω^{-sk}
    let mut line = vec![Complex64::new(0.0, 0.0); radix];
    for m in 0..n {
        let stride = radix.pow(m as u32);
        for start in 0..size {
            if (start / stride) % radix != 0 {
                continue;
            }
            for (k, out) in line.iter_mut().enumerate() {
                *out = (0..radix)
                    .map(|s| grid[start + s * stride] * roots[(s * k) % radix].conj())
                    .sum::<Complex64>()
                    / radix as f64;
            }
            for (k, &v) in line.iter().enumerate() {
                grid[start + k * stride] = v;
            }
        }
    }

    let mut probabilities = BTreeMap::new();
    let mut off_support = 0.0f64;
    for (flat, value) in grid.iter().enumerate() {
        let occ: Occupation = (0..n).map(|m| (flat / radix.pow(m as u32)) % radix).collect();
        if occ.iter().sum::<usize>() == j {
            off_support = off_support.max(value.im.abs());
            probabilities.insert(occ, value.re);
        } else {
            off_support = off_support.max(value.norm());
        }
    }
    let mut dist = CountingDistribution::from_map(kind, j, n, probabilities);
    dist.off_support_residual = off_support;
    Ok(dist)
}

/// One bunching inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityEntry {
    pub event: Event,
    pub boson: Option<f64>,
    pub distinguishable: f64,
    pub fermion: Option<f64>,
}

/// Extreme outcome audited by [`inequality_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    /// All J particles in one channel.
    AllIn(usize),
    /// No particle in any of the listed channels.
    NoneIn(Vec<usize>),
}

impl Event {
    /// Human-readable label with 1-based channels, e.g. `W(3|3)` or `W(0,0|3,4)`.
    pub fn label(&self, particles: usize) -> String {
        match self {
            Event::AllIn(m) => format!("W({particles}|{})", m + 1),
            Event::NoneIn(set) => {
                let zeros = vec!["0"; set.len()].join(",");
                let chans: Vec<String> = set.iter().map(|m| (m + 1).to_string()).collect();
                format!("W({zeros}|{})", chans.join(","))
            }
        }
    }
}

impl InequalityEntry {
    /// W⁺ − W^DP (None when the boson value is unavailable).
    pub fn bunching_margin(&self) -> Option<f64> {
        self.boson.map(|b| b - self.distinguishable)
    }

    /// W^DP − W⁻.
    pub fn antibunching_margin(&self) -> Option<f64> {
        self.fermion.map(|f| self.distinguishable - f)
    }

    pub fn satisfied(&self, slack: f64) -> bool {
        self.bunching_margin().is_none_or(|m| m >= -slack) && self.antibunching_margin().is_none_or(|m| m >= -slack)
    }
}

/// Bunching audit of the extreme-outcome probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub particles: usize,
    /// ‖Î − 1‖_max.
    pub input_correlation: f64,
    /// Whether the inequalities are asserted (inputs initially uncorrelated).
    pub asserted: bool,
    pub entries: Vec<InequalityEntry>,
}

impl InequalityReport {
    pub fn violations(&self, slack: f64) -> impl Iterator<Item = &InequalityEntry> {
        self.entries.iter().filter(move |e| !e.satisfied(slack))
    }

    pub fn all_satisfied(&self, slack: f64) -> bool {
        self.violations(slack).next().is_none()
    }
}

fn optional(result: Result<f64>) -> Result<Option<f64>> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(FcsError::DegenerateInput { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Evaluates W(J|m) for every m and W(0,…,0|set) for every non-empty proper
/// channel subset, for all three kinds. Never fails on a violated inequality.
pub fn inequality_report(ov: &OverlapSet, uncorrelated_tol: f64) -> Result<InequalityReport> {
    let n = ov.channels();
    let input_correlation = ov.input.distance_from_identity();
    let mut entries = Vec::new();
    let mut push = |event: Event| -> Result<()> {
        let (b, d, f) = match &event {
            Event::AllIn(m) => (
                all_particle_probability(ov, StatisticsKind::Boson, *m),
                all_particle_probability(ov, StatisticsKind::Distinguishable, *m)?,
                all_particle_probability(ov, StatisticsKind::Fermion, *m),
            ),
            Event::NoneIn(set) => (
                no_particle_probability(ov, StatisticsKind::Boson, set),
                no_particle_probability(ov, StatisticsKind::Distinguishable, set)?,
                no_particle_probability(ov, StatisticsKind::Fermion, set),
            ),
        };
        entries.push(InequalityEntry {
            event,
            boson: optional(b)?,
            distinguishable: d,
            fermion: optional(f)?,
        });
        Ok(())
    };
    for m in 0..n {
        push(Event::AllIn(m))?;
    }
    if n > 1 {
        for mask in 1u32..(1u32 << n) - 1 {
            push(Event::NoneIn((0..n).filter(|&m| mask & (1 << m) != 0).collect()))?;
        }
    }
    Ok(InequalityReport {
        particles: ov.particles(),
        input_correlation,
        asserted: input_correlation <= uncorrelated_tol,
        entries,
    })
}

/// [`inequality_report`] that fails if an asserted inequality is violated.
pub fn inequality_audit(ov: &OverlapSet, uncorrelated_tol: f64) -> Result<InequalityReport> {
    let report = inequality_report(ov, uncorrelated_tol)?;
    if report.asserted {
        if let Some(bad) = report.violations(INEQUALITY_SLACK).next() {
            return Err(FcsError::InequalityViolation(format!(
                "{}: boson {:?}, dp {}, fermion {:?}",
                bad.event.label(report.particles),
                bad.boson,
                bad.distinguishable,
                bad.fermion
            )));
        }
    }
    Ok(report)
}

fn check_channel(ov: &OverlapSet, m: usize) -> Result<()> {
    if m >= ov.channels() {
        return Err(FcsError::Range(format!("channel index {m} out of range 0..{}", ov.channels())));
    }
    Ok(())
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// HOM overlaps for the balanced splitter with perfectly matched packets.
    fn hom_overlaps() -> OverlapSet {
        let r = 0.5;
        // Q(1): rows (mode in ch1, mode in ch2); S_11 = 1/√2, S_12 = i/√2
        let q1 = ComplexMatrix::from_rows(&[vec![c(r, 0.0), c(0.0, -r)], vec![c(0.0, r), c(r, 0.0)]]).unwrap();
        let q2 = ComplexMatrix::from_rows(&[vec![c(r, 0.0), c(0.0, r)], vec![c(0.0, -r), c(r, 0.0)]]).unwrap();
        OverlapSet::from_matrices(ComplexMatrix::identity(2), vec![q1, q2]).unwrap()
    }

    #[test]
    fn outcome_counts() {
        assert_eq!(outcome_count(3, 4).unwrap(), 20);
        assert_eq!(outcome_count(1, 7).unwrap(), 7);
        assert_eq!(outcome_count(5, 3).unwrap(), 21);
        assert_eq!(outcome_count(0, 3).unwrap(), 1);
        assert!(matches!(outcome_count(200, 200), Err(FcsError::Range(_))));
        assert!(matches!(outcome_count(1, 0), Err(FcsError::Range(_))));
        assert_eq!(occupations(3, 4).len(), 20);
        assert_eq!(occupations(5, 3).len(), 21);
    }

    #[test]
    fn hom_distributions() {
        let ov = hom_overlaps();
        let b = full_distribution(&ov, StatisticsKind::Boson).unwrap();
        assert!(b.get(&[1, 1]).abs() < 1e-15);
        assert!((b.get(&[2, 0]) - 0.5).abs() < 1e-15);
        assert!((b.get(&[0, 2]) - 0.5).abs() < 1e-15);
        let f = full_distribution(&ov, StatisticsKind::Fermion).unwrap();
        assert!((f.get(&[1, 1]) - 1.0).abs() < 1e-15);
        let d = full_distribution(&ov, StatisticsKind::Distinguishable).unwrap();
        assert!((d.get(&[1, 1]) - 0.5).abs() < 1e-15);
        assert!((d.get(&[2, 0]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn hom_marginal_and_means() {
        let ov = hom_overlaps();
        let b = full_distribution(&ov, StatisticsKind::Boson).unwrap();
        let marg = single_channel_marginal(&b, &ov, 0).unwrap();
        for (got, want) in marg.iter().zip([0.5, 0.0, 0.5]) {
            assert!((got - want).abs() < 1e-15);
        }
        let means = mean_numbers_checked(&b, &ov).unwrap();
        assert!((means[0] - 1.0).abs() < 1e-15 && (means[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hom_inequalities() {
        let ov = hom_overlaps();
        let report = inequality_audit(&ov, UNCORRELATED_TOL).unwrap();
        assert!(report.asserted);
        let first = &report.entries[0];
        assert_eq!(first.event, Event::AllIn(0));
        assert!((first.boson.unwrap() - 0.5).abs() < 1e-15);
        assert!((first.distinguishable - 0.25).abs() < 1e-15);
        assert_eq!(first.event.label(2), "W(2|1)");
    }

    #[test]
    fn fermion_degenerate_input_is_rejected() {
        let ones = ComplexMatrix::from_fn(2, 2, |_, _| c(1.0, 0.0));
        let ov = OverlapSet::from_matrices(ones.clone(), vec![ones.scale(c(0.5, 0.0)), ones.scale(c(0.5, 0.0))]).unwrap();
        assert!(matches!(
            full_distribution(&ov, StatisticsKind::Fermion),
            Err(FcsError::DegenerateInput { .. })
        ));
        // bosons are fine
        let b = full_distribution(&ov, StatisticsKind::Boson).unwrap();
        assert!(b.normalization_residual < 1e-14);
    }

    #[test]
    fn dft_oracle_single_particle_is_weight_row() {
        let q1 = ComplexMatrix::from_real(&[&[0.3]]).unwrap();
        let q2 = ComplexMatrix::from_real(&[&[0.7]]).unwrap();
        let ov = OverlapSet::from_matrices(ComplexMatrix::identity(1), vec![q1, q2]).unwrap();
        for kind in StatisticsKind::ALL {
            let d = dft_coefficient_oracle(&ov, kind).unwrap();
            assert!((d.get(&[1, 0]) - 0.3).abs() < 1e-15);
            assert!((d.get(&[0, 1]) - 0.7).abs() < 1e-15);
        }
    }

    #[test]
    fn dft_oracle_limits() {
        let ov = OverlapSet::from_matrices(ComplexMatrix::identity(9), vec![ComplexMatrix::identity(9)]).unwrap();
        assert!(matches!(
            dft_coefficient_oracle(&ov, StatisticsKind::Boson),
            Err(FcsError::Range(_))
        ));
    }

    #[test]
    fn joint_selection_validation() {
        let ov = hom_overlaps();
        let b = full_distribution(&ov, StatisticsKind::Boson).unwrap();
        assert!(joint_probability(&b, &ov, &[0, 0], &[0, 0]).is_err());
        assert!(joint_probability(&b, &ov, &[0], &[3]).is_err());
        assert!(joint_probability(&b, &ov, &[5], &[0]).is_err());
        let w = joint_probability(&b, &ov, &[1], &[0]).unwrap();
        assert!((w - 0.5).abs() < 1e-15);
    }
}
