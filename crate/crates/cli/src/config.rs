//! Flat `key=value` run configuration with dotted section prefixes.

use std::fmt::Display;
use std::str::FromStr;

use sha2::{Digest, Sha256};
use taea_core::{Algorithm, ProbeRepair, RunConfig};

use crate::error::{usage, CliError};

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub problem: String,
    pub objectives: usize,
    pub variables: usize,
    /// Microgrid scenario source: a CSV path or `synthetic:<seed>`.
    pub scenario: Option<String>,
    pub x_dump: bool,
    pub run: RunConfig,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            problem: "LSMOP1".into(),
            objectives: 2,
            variables: 500,
            scenario: None,
            x_dump: false,
            run: RunConfig::default(),
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| usage(format!("invalid value '{value}' for {key}")))
}

fn opt_num<T: FromStr>(key: &str, value: &str) -> Result<Option<T>, CliError> {
    match value {
        "auto" | "none" => Ok(None),
        _ => num(key, value).map(Some),
    }
}

fn show_opt<T: Display>(v: &Option<T>, absent: &str) -> String {
    v.as_ref().map_or_else(|| absent.to_string(), |v| v.to_string())
}

impl Settings {
    /// Canonical listing in a fixed key order. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let r = &self.run;
        let (t, sp, pr, ck) = (&r.trust, &r.reproduction, &r.probe, &r.checkpoint);
        let repair = match pr.repair {
            ProbeRepair::EqualToRho => "equal_to_rho".to_string(),
            ProbeRepair::Fixed(v) => v.to_string(),
        };
        vec![
            ("problem", self.problem.clone()),
            ("m", self.objectives.to_string()),
            ("d", self.variables.to_string()),
            ("scenario", show_opt(&self.scenario, "none")),
            ("algorithm", r.algorithm.as_str().to_string()),
            ("pop", r.population.to_string()),
            ("gens", r.generations.to_string()),
            ("seed", r.seed.to_string()),
            ("metric_interval", r.metric_interval.to_string()),
            ("max_evaluations", show_opt(&r.max_evaluations, "none")),
            ("x_dump", self.x_dump.to_string()),
            ("trust.tau_s", t.tau_s.to_string()),
            ("trust.tau_e", t.tau_e.to_string()),
            ("trust.mu", t.mu.to_string()),
            ("trust.bins", show_opt(&t.bins, "auto")),
            ("trust.kappa", t.kappa.to_string()),
            ("trust.alpha", t.alpha.to_string()),
            ("trust.beta", t.beta.to_string()),
            ("trust.gamma", t.gamma.to_string()),
            ("trust.p_min", t.p_min.to_string()),
            ("trust.p_max", t.p_max.to_string()),
            ("trust.lambda_exp", t.lambda_exp.to_string()),
            ("trust.k_min", t.k_min.to_string()),
            ("trust.k_max", show_opt(&t.k_max, "auto")),
            ("trust.rho_min", t.rho_min.to_string()),
            ("trust.rho_max", t.rho_max.to_string()),
            ("search.f", sp.f.to_string()),
            ("search.cr", sp.cr.to_string()),
            ("search.lambda", sp.lambda.to_string()),
            ("search.omega0", sp.omega0.to_string()),
            ("search.omega1", sp.omega1.to_string()),
            ("search.omega2", sp.omega2.to_string()),
            ("search.elite_fraction", sp.elite_fraction.to_string()),
            ("probe.p_start", pr.p_start.to_string()),
            ("probe.delta0", pr.delta0.to_string()),
            ("probe.delta1", pr.delta1.to_string()),
            ("probe.delta2", pr.delta2.to_string()),
            ("probe.delta_max", pr.delta_max.to_string()),
            ("probe.beta_min", pr.beta_range.0.to_string()),
            ("probe.beta_max", pr.beta_range.1.to_string()),
            ("probe.repair", repair),
            ("probe.noise", pr.noise.to_string()),
            ("checkpoint.lambda_d", ck.lambda_d.to_string()),
            ("checkpoint.lambda_c", ck.lambda_c.to_string()),
            ("checkpoint.lambda_n", ck.lambda_n.to_string()),
            ("checkpoint.eta_gamma", ck.eta_gamma.to_string()),
            ("checkpoint.eta_r", ck.eta_r.to_string()),
            ("checkpoint.tau_b", ck.tau_b.to_string()),
            ("checkpoint.gamma_r", ck.gamma_r.to_string()),
            ("checkpoint.gamma_gamma", ck.gamma_gamma.to_string()),
        ]
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        let r = &mut self.run;
        match key.trim() {
            "problem" => self.problem = v.to_string(),
            "m" => self.objectives = num(key, v)?,
            "d" => self.variables = num(key, v)?,
            "scenario" => self.scenario = (v != "none").then(|| v.to_string()),
            "algorithm" | "algo" => {
                r.algorithm =
                    Algorithm::parse(v).ok_or_else(|| usage(format!("unknown algorithm '{v}'")))?
            }
            "pop" => r.population = num(key, v)?,
            "gens" => r.generations = num(key, v)?,
            "seed" => r.seed = num(key, v)?,
            "metric_interval" => r.metric_interval = num(key, v)?,
            "max_evaluations" => r.max_evaluations = opt_num(key, v)?,
            "x_dump" => self.x_dump = num(key, v)?,
            "trust.tau_s" => r.trust.tau_s = num(key, v)?,
            "trust.tau_e" => r.trust.tau_e = num(key, v)?,
            "trust.mu" => r.trust.mu = num(key, v)?,
            "trust.bins" => r.trust.bins = opt_num(key, v)?,
            "trust.kappa" => r.trust.kappa = num(key, v)?,
            "trust.alpha" => r.trust.alpha = num(key, v)?,
            "trust.beta" => r.trust.beta = num(key, v)?,
            "trust.gamma" => r.trust.gamma = num(key, v)?,
            "trust.p_min" => r.trust.p_min = num(key, v)?,
            "trust.p_max" => r.trust.p_max = num(key, v)?,
            "trust.lambda_exp" => r.trust.lambda_exp = num(key, v)?,
            "trust.k_min" => r.trust.k_min = num(key, v)?,
            "trust.k_max" => r.trust.k_max = opt_num(key, v)?,
            "trust.rho_min" => r.trust.rho_min = num(key, v)?,
            "trust.rho_max" => r.trust.rho_max = num(key, v)?,
            "search.f" => r.reproduction.f = num(key, v)?,
            "search.cr" => r.reproduction.cr = num(key, v)?,
            "search.lambda" => r.reproduction.lambda = num(key, v)?,
            "search.omega0" => r.reproduction.omega0 = num(key, v)?,
            "search.omega1" => r.reproduction.omega1 = num(key, v)?,
            "search.omega2" => r.reproduction.omega2 = num(key, v)?,
            "search.elite_fraction" => r.reproduction.elite_fraction = num(key, v)?,
            "probe.p_start" => r.probe.p_start = num(key, v)?,
            "probe.delta0" => r.probe.delta0 = num(key, v)?,
            "probe.delta1" => r.probe.delta1 = num(key, v)?,
            "probe.delta2" => r.probe.delta2 = num(key, v)?,
            "probe.delta_max" => r.probe.delta_max = num(key, v)?,
            "probe.beta_min" => r.probe.beta_range.0 = num(key, v)?,
            "probe.beta_max" => r.probe.beta_range.1 = num(key, v)?,
            "probe.repair" => {
                r.probe.repair = match v {
                    "equal_to_rho" => ProbeRepair::EqualToRho,
                    _ => ProbeRepair::Fixed(num(key, v)?),
                }
            }
            "probe.noise" => r.probe.noise = num(key, v)?,
            "checkpoint.lambda_d" => r.checkpoint.lambda_d = num(key, v)?,
            "checkpoint.lambda_c" => r.checkpoint.lambda_c = num(key, v)?,
            "checkpoint.lambda_n" => r.checkpoint.lambda_n = num(key, v)?,
            "checkpoint.eta_gamma" => r.checkpoint.eta_gamma = num(key, v)?,
            "checkpoint.eta_r" => r.checkpoint.eta_r = num(key, v)?,
            "checkpoint.tau_b" => r.checkpoint.tau_b = num(key, v)?,
            "checkpoint.gamma_r" => r.checkpoint.gamma_r = num(key, v)?,
            "checkpoint.gamma_gamma" => r.checkpoint.gamma_gamma = num(key, v)?,
            other => return Err(usage(format!("unknown configuration key '{other}'"))),
        }
        Ok(())
    }

    /// Applies every pair from `text`, skipping `config_hash` and `result.*`
    /// so that a run manifest can be fed back in as a config file.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (key, value) in parse_pairs(text)? {
            if key == "config_hash" || key.starts_with("result.") {
                continue;
            }
            self.set(&key, &value)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut s = Self::default();
        s.apply_text(text)?;
        Ok(s)
    }

    pub fn canonical_text(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    pub fn config_hash(&self) -> String {
        content_hash(self.canonical_text().as_bytes())
    }
}

/// Splits `key=value` lines. Blank lines and lines starting with `#` are ignored.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("line {}: expected key=value, got '{line}'", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Git-style content hash: SHA-256 over `blob <len>\0` followed by the bytes.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}
