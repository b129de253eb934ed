//! Friendship-nomination network ingestion: per-respondent send-network
//! density and race-heterogeneity indices, aggregated into a
//! [`NetworkParams`] estimate.
//!
//! Input is two CSVs.  The people file has columns `ego_id,group,alters`
//! where `alters` is a semicolon-separated id list; `group` is `majority`,
//! `minority`, `other`, or empty for missing.  Rows with a non-empty alter
//! list are respondents; rows with an empty list are roster-only entries
//! that supply group data for alters but enter no statistic.  The edges
//! file has columns `src,dst`, one directed tie per row.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::NetworkParams;

/// Group label in the calibration data.  `Other` respondents are excluded
/// from the majority share and the group means but still count toward
/// network heterogeneity as alters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordGroup {
    Majority,
    Minority,
    Other,
}

impl RecordGroup {
    fn parse(s: &str) -> Option<Option<RecordGroup>> {
        match s.trim() {
            "" => Some(None),
            "majority" | "maj" => Some(Some(RecordGroup::Majority)),
            "minority" | "min" => Some(Some(RecordGroup::Minority)),
            "other" => Some(Some(RecordGroup::Other)),
            _ => None,
        }
    }
}

/// One respondent with their nominated alters and whatever group data is
/// known for those alters.
#[derive(Debug, Clone)]
pub struct EgoNetworkRecord {
    pub ego_id: String,
    pub group: RecordGroup,
    pub nominated: Vec<String>,
    pub alter_groups: HashMap<String, RecordGroup>,
}

impl EgoNetworkRecord {
    pub fn new(
        ego_id: String,
        group: RecordGroup,
        nominated: Vec<String>,
        alter_groups: HashMap<String, RecordGroup>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for alter in &nominated {
            if alter == &ego_id {
                return Err(Error::MalformedInput {
                    line: 0,
                    message: format!("{ego_id} nominates itself"),
                });
            }
            if !seen.insert(alter) {
                return Err(Error::MalformedInput {
                    line: 0,
                    message: format!("{ego_id} nominates {alter} twice"),
                });
            }
        }
        Ok(EgoNetworkRecord { ego_id, group, nominated, alter_groups })
    }
}

/// A directed tie set keyed by `(src, dst)`.
pub type EdgeSet = HashSet<(String, String)>;

/// Send-network density: directed ties among `{ego} ∪ nominated` divided by
/// `s (s - 1)`.  Mutual nominations count twice.
pub fn send_network_density(record: &EgoNetworkRecord, edges: &EdgeSet) -> Result<f64> {
    let mut nodes: HashSet<&str> = HashSet::with_capacity(record.nominated.len() + 1);
    nodes.insert(&record.ego_id);
    nodes.extend(record.nominated.iter().map(String::as_str));
    let s = nodes.len();
    if s < 2 {
        return Err(Error::UndefinedDensity { ego_id: record.ego_id.clone() });
    }
    let ties = edges
        .iter()
        .filter(|(src, dst)| {
            src != dst && nodes.contains(src.as_str()) && nodes.contains(dst.as_str())
        })
        .count();
    Ok(ties as f64 / (s * (s - 1)) as f64)
}

/// Race-heterogeneity index `1 - sum_k (R_k / d)^2` over the nodes of the
/// ego network with known group, ego included.  `None` when the ego is the
/// only member of the network.
pub fn race_heterogeneity(record: &EgoNetworkRecord) -> Option<f64> {
    if record.nominated.is_empty() {
        return None;
    }
    let mut counts: HashMap<RecordGroup, usize> = HashMap::new();
    *counts.entry(record.group).or_insert(0) += 1;
    for alter in &record.nominated {
        if let Some(g) = record.alter_groups.get(alter) {
            *counts.entry(*g).or_insert(0) += 1;
        }
    }
    let d = counts.values().sum::<usize>() as f64;
    let sum_sq: f64 = counts.values().map(|&n| (n as f64 / d).powi(2)).sum();
    Some(1.0 - sum_sq)
}

/// Respondent counts entering each statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StatCounts {
    pub delta_majority: usize,
    pub delta_minority: usize,
    pub tau_maj: usize,
    pub tau_min: usize,
    pub psi_maj: usize,
    pub psi_min: usize,
}

/// Estimated model parameters with per-statistic respondent counts.
/// Estimates outside the model's admissible ranges are retained verbatim
/// and listed in `out_of_model`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub delta: f64,
    /// Not estimated from network data; full ability sorting is assumed.
    pub alpha: f64,
    pub tau_maj: f64,
    pub tau_min: f64,
    pub psi_maj: f64,
    pub psi_min: f64,
    pub counts: StatCounts,
    pub out_of_model: Vec<String>,
}

impl CalibrationResult {
    /// Converts to validated [`NetworkParams`], failing on any out-of-model
    /// estimate.
    pub fn to_params(&self) -> Result<NetworkParams> {
        NetworkParams::new(
            self.delta,
            self.alpha,
            self.tau_maj,
            self.tau_min,
            self.psi_maj,
            self.psi_min,
        )
    }
}

fn group_mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Aggregates respondent records into a parameter estimate: the majority
/// share from respondent counts, group means of send-network density for
/// the taus, and group means of `1 - heterogeneity / 2` for the psis.
/// Respondents missing a statistic are excluded from that statistic only.
pub fn estimate_params(records: &[EgoNetworkRecord], edges: &EdgeSet) -> Result<CalibrationResult> {
    let mut n_maj = 0usize;
    let mut n_min = 0usize;
    let mut esden: HashMap<RecordGroup, Vec<f64>> = HashMap::new();
    let mut psi: HashMap<RecordGroup, Vec<f64>> = HashMap::new();

    for record in records {
        match record.group {
            RecordGroup::Majority => n_maj += 1,
            RecordGroup::Minority => n_min += 1,
            RecordGroup::Other => continue,
        }
        if let Ok(density) = send_network_density(record, edges) {
            esden.entry(record.group).or_default().push(density);
        }
        if let Some(het) = race_heterogeneity(record) {
            psi.entry(record.group).or_default().push(1.0 - het / 2.0);
        }
    }

    if n_maj == 0 {
        return Err(Error::EmptyGroup { group: "majority", statistic: "delta" });
    }
    if n_min == 0 {
        return Err(Error::EmptyGroup { group: "minority", statistic: "delta" });
    }
    let stat = |map: &HashMap<RecordGroup, Vec<f64>>,
                group: RecordGroup,
                group_name: &'static str,
                statistic: &'static str|
     -> Result<(f64, usize)> {
        let values = map.get(&group).map(Vec::as_slice).unwrap_or(&[]);
        match group_mean(values) {
            Some(mean) => Ok((mean, values.len())),
            None => Err(Error::EmptyGroup { group: group_name, statistic }),
        }
    };
    let (tau_maj, tau_maj_n) = stat(&esden, RecordGroup::Majority, "majority", "tau_maj")?;
    let (tau_min, tau_min_n) = stat(&esden, RecordGroup::Minority, "minority", "tau_min")?;
    let (psi_maj, psi_maj_n) = stat(&psi, RecordGroup::Majority, "majority", "psi_maj")?;
    let (psi_min, psi_min_n) = stat(&psi, RecordGroup::Minority, "minority", "psi_min")?;

    let delta = n_maj as f64 / (n_maj + n_min) as f64;
    let mut out_of_model = Vec::new();
    for (name, value, ok) in [
        ("delta", delta, delta > 0.5 && delta < 1.0),
        ("tau_maj", tau_maj, tau_maj > 0.0 && tau_maj <= 1.0),
        ("tau_min", tau_min, tau_min > 0.0 && tau_min <= 1.0),
        ("psi_maj", psi_maj, (0.5..1.0).contains(&psi_maj)),
        ("psi_min", psi_min, (0.5..1.0).contains(&psi_min)),
    ] {
        if !ok {
            out_of_model.push(format!("{name}={value}"));
        }
    }

    Ok(CalibrationResult {
        delta,
        alpha: 1.0,
        tau_maj,
        tau_min,
        psi_maj,
        psi_min,
        counts: StatCounts {
            delta_majority: n_maj,
            delta_minority: n_min,
            tau_maj: tau_maj_n,
            tau_min: tau_min_n,
            psi_maj: psi_maj_n,
            psi_min: psi_min_n,
        },
        out_of_model,
    })
}

/// Reads the people CSV into respondent records, resolving alter groups
/// against every row (respondent or roster-only).
pub fn read_people(path: &Path) -> Result<Vec<EgoNetworkRecord>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let mut rows: Vec<(u64, String, Option<RecordGroup>, Vec<String>)> = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row?;
        let line = idx as u64 + 2; // header is line 1
        if row.len() < 3 {
            return Err(Error::MalformedInput {
                line,
                message: "expected columns ego_id,group,alters".into(),
            });
        }
        let ego_id = row[0].to_string();
        let group = RecordGroup::parse(&row[1]).ok_or_else(|| Error::MalformedInput {
            line,
            message: format!("unknown group {:?}", &row[1]),
        })?;
        let alters: Vec<String> = row[2]
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        rows.push((line, ego_id, group, alters));
    }

    let groups: HashMap<String, RecordGroup> = rows
        .iter()
        .filter_map(|(_, id, g, _)| g.map(|g| (id.clone(), g)))
        .collect();

    rows.into_iter()
        .filter(|(_, _, group, alters)| group.is_some() && !alters.is_empty())
        .map(|(line, ego_id, group, alters)| {
            let alter_groups = alters
                .iter()
                .filter_map(|a| groups.get(a).map(|g| (a.clone(), *g)))
                .collect();
            EgoNetworkRecord::new(ego_id, group.unwrap(), alters, alter_groups)
                .map_err(|e| match e {
                    Error::MalformedInput { message, .. } => {
                        Error::MalformedInput { line, message }
                    }
                    other => other,
                })
        })
        .collect()
}

/// Reads the directed-edge CSV (`src,dst`).
pub fn read_edges(path: &Path) -> Result<EdgeSet> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let mut edges = EdgeSet::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row?;
        if row.len() < 2 {
            return Err(Error::MalformedInput {
                line: idx as u64 + 2,
                message: "expected columns src,dst".into(),
            });
        }
        edges.insert((row[0].to_string(), row[1].to_string()));
    }
    Ok(edges)
}

/// Convenience wrapper: ingest both files and estimate parameters.
pub fn calibrate_from_files(people: &Path, edges: &Path) -> Result<CalibrationResult> {
    let records = read_people(people)?;
    let edge_set = read_edges(edges)?;
    estimate_params(&records, &edge_set)
}
