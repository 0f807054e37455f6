//! CSV ingestion of the feeder topology and the feeder-head base load.
//!
//! Wall-clock timestamps are only understood here; everything downstream
//! works in slot indices.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDateTime};
use pevgrid::network::{BaseLoad, BaseValues, Branch, Bus, BusId, FeederModel, RadialFeeder, RegulatorSite, SourceBus};
use pevgrid::regulator::VrConfig;

/// A schema or content problem, located as precisely as the input allows.
#[derive(Debug, Clone, PartialEq)]
pub struct IngestError {
    pub file: PathBuf,
    pub line: Option<u64>,
    pub column: Option<String>,
    pub message: String,
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.file.display())?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
        }
        if let Some(column) = &self.column {
            write!(f, " [column {column}]")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for IngestError {}

impl IngestError {
    fn file(file: &Path, message: impl Into<String>) -> Self {
        Self { file: file.to_path_buf(), line: None, column: None, message: message.into() }
    }

    fn at(file: &Path, line: u64, column: Option<&str>, message: impl Into<String>) -> Self {
        Self {
            file: file.to_path_buf(),
            line: Some(line),
            column: column.map(str::to_string),
            message: message.into(),
        }
    }
}

/// Header positions of a CSV file, with required and optional columns.
struct Columns {
    index: HashMap<String, usize>,
}

impl Columns {
    fn read(file: &Path, reader: &mut csv::Reader<std::fs::File>, required: &[&str]) -> Result<Self, IngestError> {
        let headers = reader.headers().map_err(|e| IngestError::at(file, 1, None, e.to_string()))?;
        let index: HashMap<String, usize> =
            headers.iter().enumerate().map(|(i, h)| (h.trim().to_ascii_lowercase(), i)).collect();
        for name in required {
            if !index.contains_key(*name) {
                return Err(IngestError::at(file, 1, Some(name), "required column is missing"));
            }
        }
        Ok(Self { index })
    }

    fn has(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    fn field<'r>(&self, record: &'r csv::StringRecord, name: &str) -> &'r str {
        self.index.get(name).and_then(|&i| record.get(i)).map_or("", str::trim)
    }
}

fn open(file: &Path) -> Result<csv::Reader<std::fs::File>, IngestError> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(file)
        .map_err(|e| IngestError::file(file, e.to_string()))
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, csv::Position::line)
}

fn number(file: &Path, line: u64, column: &str, text: &str) -> Result<f64, IngestError> {
    let value: f64 =
        text.parse().map_err(|_| IngestError::at(file, line, Some(column), format!("'{text}' is not a number")))?;
    if !value.is_finite() {
        return Err(IngestError::at(file, line, Some(column), "value must be finite"));
    }
    Ok(value)
}

fn flag(file: &Path, line: u64, column: &str, text: &str) -> Result<bool, IngestError> {
    match text.to_ascii_lowercase().as_str() {
        "" | "0" | "false" | "no" => Ok(false),
        "1" | "true" | "yes" => Ok(true),
        other => Err(IngestError::at(file, line, Some(column), format!("'{other}' is not a boolean"))),
    }
}

/// Electrical settings not carried by the topology file.
#[derive(Debug, Clone, PartialEq)]
pub struct FeederSettings {
    pub rating_kva: f64,
    pub v_source_pu: f64,
    pub v_base_kv: f64,
    pub regulator: VrConfig,
}

/// Reads `bus_id, parent_id, r_pu, x_pu, load_share, regulator`. The source
/// bus has an empty parent; every other row describes the branch from its
/// parent. A true `regulator` places a regulator on that branch.
pub fn read_feeder(file: &Path, settings: &FeederSettings) -> Result<RadialFeeder, IngestError> {
    const REQUIRED: [&str; 5] = ["bus_id", "parent_id", "r_pu", "x_pu", "load_share"];
    let mut reader = open(file)?;
    let cols = Columns::read(file, &mut reader, &REQUIRED)?;
    let mut buses = Vec::new();
    let mut branches = Vec::new();
    let mut regulators = Vec::new();
    let mut source = None;
    let mut seen: HashMap<BusId, u64> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| IngestError::file(file, e.to_string()))?;
        let line = line_of(&record);
        let id_text = cols.field(&record, "bus_id");
        let id: BusId = id_text
            .parse()
            .map_err(|_| IngestError::at(file, line, Some("bus_id"), format!("'{id_text}' is not a bus id")))?;
        if let Some(first) = seen.insert(id, line) {
            return Err(IngestError::at(
                file,
                line,
                Some("bus_id"),
                format!("duplicate bus id {id} (first defined on line {first})"),
            ));
        }
        let load_share = number(file, line, "load_share", cols.field(&record, "load_share"))?;
        if load_share < 0.0 {
            return Err(IngestError::at(file, line, Some("load_share"), "load share must be non-negative"));
        }
        buses.push(Bus { id, load_share });
        let parent_text = cols.field(&record, "parent_id");
        let regulated = cols.has("regulator") && flag(file, line, "regulator", cols.field(&record, "regulator"))?;
        if parent_text.is_empty() {
            if source.replace(id).is_some() {
                return Err(IngestError::at(file, line, Some("parent_id"), "more than one bus without a parent"));
            }
            if regulated {
                return Err(IngestError::at(file, line, Some("regulator"), "the source bus has no branch to regulate"));
            }
            continue;
        }
        let from: BusId = parent_text.parse().map_err(|_| {
            IngestError::at(file, line, Some("parent_id"), format!("'{parent_text}' is not a bus id"))
        })?;
        let r_pu = number(file, line, "r_pu", cols.field(&record, "r_pu"))?;
        let x_pu = number(file, line, "x_pu", cols.field(&record, "x_pu"))?;
        if r_pu < 0.0 || x_pu < 0.0 || r_pu + x_pu == 0.0 {
            return Err(IngestError::at(file, line, Some("r_pu"), "branch impedance must be non-negative and non-zero"));
        }
        if regulated {
            regulators.push(RegulatorSite { branch: branches.len(), config: settings.regulator.clone() });
        }
        branches.push(Branch { from, to: id, r_pu, x_pu });
    }
    let source = source.ok_or_else(|| IngestError::file(file, "no source bus (a row with empty parent_id)"))?;
    let model = FeederModel {
        buses,
        branches,
        source: SourceBus { bus: source, v_source_pu: settings.v_source_pu, rating_kva: settings.rating_kva },
        base: BaseValues { s_base_kva: settings.rating_kva, v_base_kv: settings.v_base_kv },
        regulators,
    };
    RadialFeeder::new(model).map_err(|e| IngestError::file(file, e.to_string()))
}

/// Expected base-load layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseLoadSpec {
    pub resolution_h: f64,
    pub horizon_days: u32,
    /// Power factor used when the file has no `q_kvar` column.
    pub power_factor: f64,
}

impl BaseLoadSpec {
    pub fn slots_per_day(&self) -> usize {
        (24.0 / self.resolution_h).round() as usize
    }

    pub fn required_slots(&self) -> usize {
        self.horizon_days as usize * self.slots_per_day()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Stamp {
    Slot(i64),
    Seconds(i64),
}

fn parse_timestamp(text: &str) -> Option<Stamp> {
    if let Ok(slot) = text.parse::<i64>() {
        return Some(Stamp::Slot(slot));
    }
    if let Ok(t) = DateTime::parse_from_rfc3339(text) {
        return Some(Stamp::Seconds(t.timestamp()));
    }
    ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"]
        .iter()
        .find_map(|fmt| NaiveDateTime::parse_from_str(text, fmt).ok())
        .map(|t| Stamp::Seconds(t.and_utc().timestamp()))
}

/// Reads `timestamp, p_kw[, q_kvar]` with uniformly spaced timestamps that
/// are either slot indices or ISO-8601 date-times at the declared resolution.
pub fn read_base_load(file: &Path, spec: &BaseLoadSpec) -> Result<BaseLoad, IngestError> {
    let mut reader = open(file)?;
    let cols = Columns::read(file, &mut reader, &["timestamp", "p_kw"])?;
    let has_q = cols.has("q_kvar");
    let step_seconds = (spec.resolution_h * 3600.0).round() as i64;
    let mut p_kw = Vec::new();
    let mut q_kvar = Vec::new();
    let mut previous: Option<Stamp> = None;
    for record in reader.records() {
        let record = record.map_err(|e| IngestError::file(file, e.to_string()))?;
        let line = line_of(&record);
        let text = cols.field(&record, "timestamp");
        let stamp = parse_timestamp(text).ok_or_else(|| {
            IngestError::at(file, line, Some("timestamp"), format!("'{text}' is neither a slot index nor ISO-8601"))
        })?;
        let spacing_ok = match (previous, stamp) {
            (None, _) => true,
            (Some(Stamp::Slot(a)), Stamp::Slot(b)) => b - a == 1,
            (Some(Stamp::Seconds(a)), Stamp::Seconds(b)) => b - a == step_seconds,
            _ => false,
        };
        if !spacing_ok {
            return Err(IngestError::at(
                file,
                line,
                Some("timestamp"),
                format!("timestamps must be uniformly spaced at {} h", spec.resolution_h),
            ));
        }
        previous = Some(stamp);
        let p = number(file, line, "p_kw", cols.field(&record, "p_kw"))?;
        if p < 0.0 {
            return Err(IngestError::at(file, line, Some("p_kw"), "power must be non-negative"));
        }
        p_kw.push(p);
        if has_q {
            q_kvar.push(number(file, line, "q_kvar", cols.field(&record, "q_kvar"))?);
        }
    }

    let required = spec.required_slots();
    let per_day = spec.slots_per_day();
    if p_kw.len() < required {
        return Err(IngestError::file(
            file,
            format!(
                "{} data rows, expected {required} ({} days at {} h resolution)",
                p_kw.len(),
                spec.horizon_days,
                spec.resolution_h
            ),
        ));
    }
    if p_kw.len() % per_day != 0 {
        return Err(IngestError::file(
            file,
            format!("{} data rows is not a whole number of {per_day}-slot days", p_kw.len()),
        ));
    }
    if has_q {
        Ok(BaseLoad { resolution_h: spec.resolution_h, p_kw, q_kvar })
    } else {
        log::warn!(
            "{}: no q_kvar column; reactive power filled in at power factor {}",
            file.display(),
            spec.power_factor
        );
        Ok(BaseLoad::from_real_power(spec.resolution_h, p_kw, spec.power_factor))
    }
}

/// Writes a feeder in the format read by [`read_feeder`].
pub fn write_feeder(file: &Path, model: &FeederModel) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(file)?;
    w.write_record(["bus_id", "parent_id", "r_pu", "x_pu", "load_share", "regulator"])?;
    for bus in &model.buses {
        match model.branches.iter().position(|b| b.to == bus.id) {
            None => w.write_record([bus.id.to_string(), String::new(), String::new(), String::new(), bus.load_share.to_string(), "0".into()])?,
            Some(k) => {
                let br = &model.branches[k];
                let regulated = model.regulators.iter().any(|s| s.branch == k);
                w.write_record([
                    bus.id.to_string(),
                    br.from.to_string(),
                    br.r_pu.to_string(),
                    br.x_pu.to_string(),
                    bus.load_share.to_string(),
                    u8::from(regulated).to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes a base load with slot-index timestamps.
pub fn write_base_load(file: &Path, base: &BaseLoad, with_q: bool) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(file)?;
    if with_q {
        w.write_record(["timestamp", "p_kw", "q_kvar"])?;
    } else {
        w.write_record(["timestamp", "p_kw"])?;
    }
    for (t, (p, q)) in base.p_kw.iter().zip(&base.q_kvar).enumerate() {
        if with_q {
            w.write_record([t.to_string(), p.to_string(), q.to_string()])?;
        } else {
            w.write_record([t.to_string(), p.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timestamps_parse_in_both_forms() {
        assert_eq!(parse_timestamp("17"), Some(Stamp::Slot(17)));
        let a = parse_timestamp("2019-01-01T00:15:00").unwrap();
        let b = parse_timestamp("2019-01-01 00:30").unwrap();
        match (a, b) {
            (Stamp::Seconds(a), Stamp::Seconds(b)) => assert_eq!(b - a, 900),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_timestamp("2019-01-01T00:15:00+02:00"), Some(Stamp::Seconds(_))));
        assert_eq!(parse_timestamp("noon"), None);
    }

    #[test]
    fn error_display_names_location() {
        let e = IngestError::at(Path::new("f.csv"), 7, Some("p_kw"), "bad");
        assert_eq!(e.to_string(), "f.csv:7 [column p_kw]: bad");
    }
}
