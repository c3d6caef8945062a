//! Sweep observables named in the config, e.g. `all:3`, `none:3,4`,
//! `count:3=1`, `mean:3`. Channels are 1-based in the text form.

use std::fmt;

use fcs_core::counting::{
    all_particle_probability, joint_probability, mean_numbers_checked, single_channel_marginal, ROUTE_TOL,
};
use fcs_core::{CountingDistribution, FcsError, OverlapSet};

use crate::error::{CliError, Result};

/// Observable with 0-based channel indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observable {
    /// W(J|m).
    AllIn(usize),
    /// W(0,…,0|set).
    NoneIn(Vec<usize>),
    /// W(k|m).
    Count { channel: usize, count: usize },
    /// n̄_m.
    Mean(usize),
}

fn channel_index(text: &str, channels: usize) -> Result<usize> {
    let k: usize = text
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad channel number {text:?}")))?;
    if k == 0 || k > channels {
        return Err(CliError::Usage(format!("channel {k} outside 1..={channels}")));
    }
    Ok(k - 1)
}

impl Observable {
    pub fn parse(text: &str, channels: usize, particles: usize) -> Result<Self> {
        let (head, rest) = text
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("observable {text:?} lacks a ':'")))?;
        match head.trim() {
            "all" => Ok(Observable::AllIn(channel_index(rest, channels)?)),
            "mean" => Ok(Observable::Mean(channel_index(rest, channels)?)),
            "none" => {
                let mut set = rest
                    .split(',')
                    .map(|c| channel_index(c, channels))
                    .collect::<Result<Vec<_>>>()?;
                set.sort_unstable();
                if set.windows(2).any(|w| w[0] == w[1]) {
                    return Err(CliError::Usage(format!("observable {text:?} repeats a channel")));
                }
                Ok(Observable::NoneIn(set))
            }
            "count" => {
                let (ch, k) = rest
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("observable {text:?} should read count:<channel>=<n>")))?;
                let count: usize = k
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad count in {text:?}")))?;
                if count > particles {
                    return Err(CliError::Usage(format!("count {count} exceeds the {particles} particles")));
                }
                Ok(Observable::Count {
                    channel: channel_index(ch, channels)?,
                    count,
                })
            }
            other => Err(CliError::Usage(format!("unknown observable kind {other:?}"))),
        }
    }

    /// CSV-safe column stem.
    pub fn column(&self) -> String {
        match self {
            Observable::AllIn(m) => format!("W_all{}", m + 1),
            Observable::NoneIn(set) => {
                let chans: Vec<String> = set.iter().map(|m| (m + 1).to_string()).collect();
                format!("W_none{}", chans.join("_"))
            }
            Observable::Count { channel, count } => format!("W_{count}in{}", channel + 1),
            Observable::Mean(m) => format!("nbar{}", m + 1),
        }
    }

    pub fn is_probability(&self) -> bool {
        !matches!(self, Observable::Mean(_))
    }

    /// Description with unit, for the file header.
    pub fn describe(&self, particles: usize) -> String {
        match self {
            Observable::AllIn(m) => format!("W({particles}|{}), all particles in channel {} [probability]", m + 1, m + 1),
            Observable::NoneIn(set) => {
                let zeros = vec!["0"; set.len()].join(",");
                let chans: Vec<String> = set.iter().map(|m| (m + 1).to_string()).collect();
                format!("W({zeros}|{}), no particle in channels {} [probability]", chans.join(","), chans.join(","))
            }
            Observable::Count { channel, count } => format!(
                "W({count}|{}), exactly {count} particle(s) in channel {} [probability]",
                channel + 1,
                channel + 1
            ),
            Observable::Mean(m) => format!("mean number of particles in channel {} [particles]", m + 1),
        }
    }

    /// Evaluates the observable, cross-checking it against the full
    /// distribution by a second route.
    pub fn evaluate(&self, ov: &OverlapSet, dist: &CountingDistribution) -> fcs_core::Result<f64> {
        match self {
            Observable::AllIn(m) => {
                let direct = all_particle_probability(ov, dist.kind, *m)?;
                let mut occ = vec![0; ov.channels()];
                occ[*m] = ov.particles();
                let residual = (direct - dist.get(&occ)).abs();
                if residual > ROUTE_TOL {
                    return Err(FcsError::Consistency {
                        identity: format!("W(J|{}) by remainder matrix vs distribution", m + 1),
                        residual,
                        tol: ROUTE_TOL,
                    });
                }
                Ok(direct)
            }
            Observable::NoneIn(set) => joint_probability(dist, ov, set, &vec![0; set.len()]),
            Observable::Count { channel, count } => Ok(single_channel_marginal(dist, ov, *channel)?[*count]),
            Observable::Mean(m) => Ok(mean_numbers_checked(dist, ov)?[*m]),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::AllIn(m) => write!(f, "all:{}", m + 1),
            Observable::NoneIn(set) => {
                let chans: Vec<String> = set.iter().map(|m| (m + 1).to_string()).collect();
                write!(f, "none:{}", chans.join(","))
            }
            Observable::Count { channel, count } => write!(f, "count:{}={count}", channel + 1),
            Observable::Mean(m) => write!(f, "mean:{}", m + 1),
        }
    }
}
