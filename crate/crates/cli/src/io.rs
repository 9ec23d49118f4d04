//! CSV and key=value persistence for run outputs and scenarios.
//!
//! Floats are written with `Display`, the shortest decimal that parses back
//! to the same `f64`, so every file here round-trips exactly.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use taea_core::problems::{Dispatch, MicrogridScenario};
use taea_core::{CheckpointEvent, MetricRow, Solution};

use crate::config::parse_pairs;
use crate::error::{format_error, CliError};

type Result<T> = std::result::Result<T, CliError>;

pub const METRICS_FILE: &str = "metrics.csv";
pub const FRONT_FILE: &str = "front.csv";
pub const MANIFEST_FILE: &str = "manifest.txt";
pub const SCHEDULE_FILE: &str = "schedule.csv";
pub const FEASIBILITY_FILE: &str = "feasibility.txt";

const METRIC_HEADER: [&str; 10] = [
    "generation",
    "evaluations",
    "hv",
    "igd_plus",
    "trust",
    "phi",
    "maturity",
    "delta",
    "nd_ratio",
    "checkpoint_event",
];

const SCHEDULE_HEADER: [&str; 8] = ["t", "grid_kw", "gen_kw", "ch_kw", "dis_kw", "dr_kw", "cur_kw", "soc_kwh"];

const SCENARIO_HEADER: [&str; 6] = ["t", "load_kw", "re_kw", "price", "emission_factor", "dr_max_kw"];

fn field<T: FromStr>(path: &Path, rec: &csv::StringRecord, i: usize) -> Result<T> {
    let raw = rec
        .get(i)
        .ok_or_else(|| format_error(path, format!("missing column {i}")))?;
    raw.parse()
        .map_err(|_| format_error(path, format!("cannot parse '{raw}' in column {i}")))
}

fn opt_field(path: &Path, rec: &csv::StringRecord, i: usize) -> Result<Option<f64>> {
    match rec.get(i) {
        Some("") => Ok(None),
        _ => field(path, rec, i).map(Some),
    }
}

fn check_header(path: &Path, rdr: &mut csv::Reader<fs::File>, expected: &[&str]) -> Result<()> {
    let header = rdr.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(format_error(path, format!("unexpected header {header:?}")));
    }
    Ok(())
}

fn opt_text(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_metrics(path: &Path, rows: &[MetricRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(METRIC_HEADER)?;
    for r in rows {
        w.write_record([
            r.generation.to_string(),
            r.evaluations.to_string(),
            opt_text(r.hv),
            opt_text(r.igd_plus),
            r.trust.to_string(),
            r.phi.to_string(),
            r.maturity.to_string(),
            r.delta.to_string(),
            r.nd_ratio.to_string(),
            r.event.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    check_header(path, &mut rdr, &METRIC_HEADER)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let event = rec.get(9).and_then(CheckpointEvent::parse).ok_or_else(|| {
            format_error(path, format!("unknown checkpoint event {:?}", rec.get(9)))
        })?;
        rows.push(MetricRow {
            generation: field(path, &rec, 0)?,
            evaluations: field(path, &rec, 1)?,
            hv: opt_field(path, &rec, 2)?,
            igd_plus: opt_field(path, &rec, 3)?,
            trust: field(path, &rec, 4)?,
            phi: field(path, &rec, 5)?,
            maturity: field(path, &rec, 6)?,
            delta: field(path, &rec, 7)?,
            nd_ratio: field(path, &rec, 8)?,
            event,
        });
    }
    Ok(rows)
}

/// Objective vectors, violations and optionally decision vectors of a solution set.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontTable {
    pub objectives: Vec<Vec<f64>>,
    pub violation: Vec<f64>,
    pub decisions: Option<Vec<Vec<f64>>>,
}

impl FrontTable {
    pub fn from_solutions(set: &[Solution], with_decisions: bool) -> Self {
        Self {
            objectives: set.iter().map(|s| s.f.clone()).collect(),
            violation: set.iter().map(|s| s.violation).collect(),
            decisions: with_decisions.then(|| set.iter().map(|s| s.x.clone()).collect()),
        }
    }
}

/// Columns `f1..fM`, then `x1..xD` when decisions are present, then `violation`.
pub fn write_front(path: &Path, table: &FrontTable) -> Result<()> {
    let m = table.objectives.first().map_or(0, Vec::len);
    let d = table
        .decisions
        .as_ref()
        .and_then(|x| x.first())
        .map_or(0, Vec::len);
    let mut header: Vec<String> = (1..=m).map(|k| format!("f{k}")).collect();
    header.extend((1..=d).map(|j| format!("x{j}")));
    header.push("violation".into());
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&header)?;
    for (i, f) in table.objectives.iter().enumerate() {
        let mut rec: Vec<String> = f.iter().map(f64::to_string).collect();
        if let Some(xs) = &table.decisions {
            rec.extend(xs[i].iter().map(f64::to_string));
        }
        rec.push(table.violation[i].to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_front(path: &Path) -> Result<FrontTable> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header = rdr.headers()?.clone();
    if header.iter().last() != Some("violation") {
        return Err(format_error(path, "last column must be violation"));
    }
    let m = header.iter().filter(|h| h.starts_with('f')).count();
    let d = header.len() - m - 1;
    let mut table = FrontTable {
        objectives: Vec::new(),
        violation: Vec::new(),
        decisions: (d > 0).then(Vec::new),
    };
    for rec in rdr.records() {
        let rec = rec?;
        let row: Vec<f64> = (0..rec.len()).map(|i| field(path, &rec, i)).collect::<Result<_>>()?;
        table.objectives.push(row[..m].to_vec());
        if let Some(xs) = table.decisions.as_mut() {
            xs.push(row[m..m + d].to_vec());
        }
        table.violation.push(row[m + d]);
    }
    Ok(table)
}

/// One period of a dispatch schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleRow {
    pub t: usize,
    pub grid_kw: f64,
    pub gen_kw: f64,
    pub ch_kw: f64,
    pub dis_kw: f64,
    pub dr_kw: f64,
    pub cur_kw: f64,
    pub soc_kwh: f64,
}

pub fn schedule_rows(d: &Dispatch) -> Vec<ScheduleRow> {
    (0..d.grid.len())
        .map(|t| ScheduleRow {
            t,
            grid_kw: d.grid[t],
            gen_kw: d.generator[t],
            ch_kw: d.charge[t],
            dis_kw: d.discharge[t],
            dr_kw: d.demand_response[t],
            cur_kw: d.curtailment[t],
            soc_kwh: d.soc[t],
        })
        .collect()
}

pub fn write_schedule(path: &Path, rows: &[ScheduleRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SCHEDULE_HEADER)?;
    for r in rows {
        w.write_record([
            r.t.to_string(),
            r.grid_kw.to_string(),
            r.gen_kw.to_string(),
            r.ch_kw.to_string(),
            r.dis_kw.to_string(),
            r.dr_kw.to_string(),
            r.cur_kw.to_string(),
            r.soc_kwh.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_schedule(path: &Path) -> Result<Vec<ScheduleRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    check_header(path, &mut rdr, &SCHEDULE_HEADER)?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            Ok(ScheduleRow {
                t: field(path, &rec, 0)?,
                grid_kw: field(path, &rec, 1)?,
                gen_kw: field(path, &rec, 2)?,
                ch_kw: field(path, &rec, 3)?,
                dis_kw: field(path, &rec, 4)?,
                dr_kw: field(path, &rec, 5)?,
                cur_kw: field(path, &rec, 6)?,
                soc_kwh: field(path, &rec, 7)?,
            })
        })
        .collect()
}

/// Writes ordered `key=value` lines.
pub fn write_pairs(path: &Path, pairs: &[(String, String)]) -> Result<()> {
    let text: String = pairs.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
    fs::write(path, text)?;
    Ok(())
}

pub fn read_pairs(path: &Path) -> Result<Vec<(String, String)>> {
    parse_pairs(&fs::read_to_string(path)?)
}

fn scenario_scalars(s: &MicrogridScenario) -> [(&'static str, f64); 16] {
    [
        ("gen_cost", s.gen_cost),
        ("gen_emission", s.gen_emission),
        ("battery_cost", s.battery_cost),
        ("dr_cost", s.dr_cost),
        ("cur_cost", s.cur_cost),
        ("gen_max", s.gen_max),
        ("ramp_max", s.ramp_max),
        ("charge_max", s.charge_max),
        ("discharge_max", s.discharge_max),
        ("eta_ch", s.eta_ch),
        ("eta_dis", s.eta_dis),
        ("soc_min", s.soc_min),
        ("soc_max", s.soc_max),
        ("soc_initial", s.soc_initial),
        ("soc_tolerance", s.soc_tolerance),
        ("dr_energy_max", s.dr_energy_max),
    ]
}

/// Scenario file: `#key=value` lines for the device scalars, then one CSV row per period.
pub fn write_scenario(path: &Path, s: &MicrogridScenario) -> Result<()> {
    let mut text: String = scenario_scalars(s)
        .iter()
        .map(|(k, v)| format!("#{k}={v}\n"))
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SCENARIO_HEADER)?;
    for t in 0..s.periods() {
        w.write_record([
            t.to_string(),
            s.load[t].to_string(),
            s.renewable[t].to_string(),
            s.grid_price[t].to_string(),
            s.grid_emission[t].to_string(),
            s.dr_max[t].to_string(),
        ])?;
    }
    let body = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    text.push_str(&String::from_utf8_lossy(&body));
    fs::write(path, text)?;
    Ok(())
}

pub fn read_scenario(path: &Path) -> Result<MicrogridScenario> {
    let text = fs::read_to_string(path)?;
    let (comments, body): (Vec<&str>, Vec<&str>) = text.lines().partition(|l| l.starts_with('#'));
    let scalars = parse_pairs(
        &comments
            .iter()
            .map(|l| format!("{}\n", &l[1..]))
            .collect::<String>(),
    )?;
    let body = body.join("\n");
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let header = rdr.headers()?.clone();
    if header.iter().ne(SCENARIO_HEADER) {
        return Err(format_error(path, format!("unexpected header {header:?}")));
    }
    let mut s = MicrogridScenario {
        load: Vec::new(),
        renewable: Vec::new(),
        grid_price: Vec::new(),
        grid_emission: Vec::new(),
        dr_max: Vec::new(),
        gen_cost: 0.0,
        gen_emission: 0.0,
        battery_cost: 0.0,
        dr_cost: 0.0,
        cur_cost: 0.0,
        gen_max: 0.0,
        ramp_max: 0.0,
        charge_max: 0.0,
        discharge_max: 0.0,
        eta_ch: 0.0,
        eta_dis: 0.0,
        soc_min: 0.0,
        soc_max: 0.0,
        soc_initial: 0.0,
        soc_tolerance: 0.0,
        dr_energy_max: 0.0,
    };
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let t: usize = field(path, &rec, 0)?;
        if t != i {
            return Err(format_error(path, format!("period {t} out of order at row {i}")));
        }
        s.load.push(field(path, &rec, 1)?);
        s.renewable.push(field(path, &rec, 2)?);
        s.grid_price.push(field(path, &rec, 3)?);
        s.grid_emission.push(field(path, &rec, 4)?);
        s.dr_max.push(field(path, &rec, 5)?);
    }
    let mut seen = Vec::new();
    for (key, value) in scalars {
        let v: f64 = value
            .parse()
            .map_err(|_| format_error(path, format!("cannot parse {key}={value}")))?;
        let slot = match key.as_str() {
            "gen_cost" => &mut s.gen_cost,
            "gen_emission" => &mut s.gen_emission,
            "battery_cost" => &mut s.battery_cost,
            "dr_cost" => &mut s.dr_cost,
            "cur_cost" => &mut s.cur_cost,
            "gen_max" => &mut s.gen_max,
            "ramp_max" => &mut s.ramp_max,
            "charge_max" => &mut s.charge_max,
            "discharge_max" => &mut s.discharge_max,
            "eta_ch" => &mut s.eta_ch,
            "eta_dis" => &mut s.eta_dis,
            "soc_min" => &mut s.soc_min,
            "soc_max" => &mut s.soc_max,
            "soc_initial" => &mut s.soc_initial,
            "soc_tolerance" => &mut s.soc_tolerance,
            "dr_energy_max" => &mut s.dr_energy_max,
            other => return Err(format_error(path, format!("unknown scenario field '{other}'"))),
        };
        *slot = v;
        seen.push(key);
    }
    if let Some((missing, _)) = scenario_scalars(&s)
        .iter()
        .find(|(k, _)| !seen.iter().any(|s| s == k))
    {
        return Err(format_error(path, format!("missing scenario field '{missing}'")));
    }
    s.validate()?;
    Ok(s)
}
