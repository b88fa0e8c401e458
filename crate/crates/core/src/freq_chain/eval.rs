use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{ChainError, Freq, FreqChain, FreqSet, NodeKind};

/// Largest number of components a node may carry before evaluation fails.
pub const DEFAULT_COMPONENT_CAP: usize = 64;

pub fn evaluate(chain: &FreqChain) -> Result<BTreeMap<String, FreqSet>, ChainError> {
    evaluate_with_cap(chain, DEFAULT_COMPONENT_CAP)
}

pub fn evaluate_with_cap(
    chain: &FreqChain,
    cap: usize,
) -> Result<BTreeMap<String, FreqSet>, ChainError> {
    let mut values: HashMap<&str, FreqSet> = HashMap::with_capacity(chain.nodes().len());
    for node in chain.nodes() {
        let id = node.id.as_str();
        let overflow = || ChainError::Overflow(id.to_string());
        let get = |input: &str| -> &FreqSet { &values[input] };
        let set: FreqSet = match &node.kind {
            NodeKind::Source { freq } | NodeKind::Vco { freq } => FreqSet::single(*freq),
            NodeKind::Double { input } => get(input)
                .iter()
                .map(|f| f.0.checked_mul(2).map(Freq).ok_or_else(overflow))
                .collect::<Result<_, _>>()?,
            NodeKind::Shift { input, delta } => get(input)
                .iter()
                .map(|f| {
                    let shifted = f.0 as i128 + *delta as i128;
                    u64::try_from(shifted.max(0))
                        .map(Freq)
                        .map_err(|_| overflow())
                })
                .collect::<Result<_, _>>()?,
            NodeKind::Sideband {
                input,
                offset,
                orders,
            } => {
                let mut out = Vec::new();
                for f in get(input).iter() {
                    for &k in orders {
                        let v = f.0 as i128 + k as i128 * offset.0 as i128;
                        out.push(
                            u64::try_from(v.unsigned_abs())
                                .map(Freq)
                                .map_err(|_| overflow())?,
                        );
                    }
                }
                out.into_iter().collect()
            }
            NodeKind::Beat { a, b } => {
                let (sa, sb) = (get(a), get(b));
                sa.iter()
                    .flat_map(|x| sb.iter().map(move |y| Freq(x.0.abs_diff(y.0))))
                    .collect()
            }
            NodeKind::Mix { a, b } => {
                let (sa, sb) = (get(a), get(b));
                let mut out = Vec::new();
                for x in sa.iter() {
                    for y in sb.iter() {
                        out.push(Freq(x.0.abs_diff(y.0)));
                        out.push(x.0.checked_add(y.0).map(Freq).ok_or_else(overflow)?);
                    }
                }
                out.into_iter().collect()
            }
            NodeKind::LowPass { input, cutoff } => {
                get(input).iter().filter(|f| f < cutoff).collect()
            }
            NodeKind::Divide { input, n } => get(input)
                .iter()
                // round half up to the nearest millihertz
                .map(|f| Freq((f.0 as u128 * 2 + *n as u128) as u64 / (2 * *n)))
                .collect(),
        };
        if set.len() > cap {
            return Err(ChainError::TooManyComponents {
                id: id.to_string(),
                count: set.len(),
                cap,
            });
        }
        values.insert(id, set);
    }
    Ok(values
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub expected_hz: f64,
    pub tolerance_hz: f64,
    /// `None` when the node carries no components (e.g. everything filtered).
    pub nearest_hz: Option<f64>,
    pub pass: bool,
}

/// Passes a check iff some component of the node lies within tolerance of the
/// expected value (compared in exact millihertz).
pub fn check_locks(chain: &FreqChain) -> Result<Vec<CheckReport>, ChainError> {
    let values = evaluate(chain)?;
    chain
        .checks()
        .iter()
        .map(|check| {
            let set = values
                .get(&check.id)
                .ok_or_else(|| ChainError::UnknownCheck(check.id.clone()))?;
            let nearest = set.nearest(check.expected);
            let pass = nearest.is_some_and(|f| f.0.abs_diff(check.expected.0) <= check.tolerance.0);
            Ok(CheckReport {
                id: check.id.clone(),
                expected_hz: check.expected.as_hz(),
                tolerance_hz: check.tolerance.as_hz(),
                nearest_hz: nearest.map(Freq::as_hz),
                pass,
            })
        })
        .collect()
}
