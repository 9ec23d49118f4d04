use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;

use crate::error::{config, Result};
use crate::rng::{Role, SeedTree};
use crate::solution::Bounds;
use crate::structure::{ConstantTargets, VariableStructure};

use super::Problem;

/// Number of decision blocks: generator, charge, discharge, demand response, curtailment.
const BLOCKS: usize = 5;

/// Upper bound given to curtailment in periods without renewable output.
const NIGHT_CURTAILMENT_BOUND: f64 = 1e-6;

/// A representative day for the dispatch model.
#[derive(Debug, Clone, PartialEq)]
pub struct MicrogridScenario {
    pub load: Vec<f64>,
    pub renewable: Vec<f64>,
    pub grid_price: Vec<f64>,
    pub grid_emission: Vec<f64>,
    pub dr_max: Vec<f64>,
    pub gen_cost: f64,
    pub gen_emission: f64,
    pub battery_cost: f64,
    pub dr_cost: f64,
    pub cur_cost: f64,
    pub gen_max: f64,
    pub ramp_max: f64,
    pub charge_max: f64,
    pub discharge_max: f64,
    pub eta_ch: f64,
    pub eta_dis: f64,
    pub soc_min: f64,
    pub soc_max: f64,
    pub soc_initial: f64,
    pub soc_tolerance: f64,
    pub dr_energy_max: f64,
}

impl MicrogridScenario {
    pub fn periods(&self) -> usize {
        self.load.len()
    }

    /// Hours per period.
    pub fn step(&self) -> f64 {
        24.0 / self.periods() as f64
    }

    pub fn total_load(&self) -> f64 {
        self.load.iter().sum::<f64>() * self.step()
    }

    pub fn total_renewable(&self) -> f64 {
        self.renewable.iter().sum::<f64>() * self.step()
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.periods();
        if t < 2 {
            return Err(config("a scenario needs at least two periods"));
        }
        let vectors = [&self.renewable, &self.grid_price, &self.grid_emission, &self.dr_max];
        if vectors.iter().any(|v| v.len() != t) {
            return Err(config("scenario profiles must share one length"));
        }
        let profiles_ok = [&self.load, &self.renewable, &self.grid_price, &self.grid_emission, &self.dr_max]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite() && *x >= 0.0));
        let limits = [
            self.gen_max,
            self.ramp_max,
            self.charge_max,
            self.discharge_max,
            self.soc_tolerance,
            self.dr_energy_max,
        ];
        if !profiles_ok || limits.iter().any(|l| !(*l >= 0.0)) {
            return Err(config("scenario profiles and limits must be finite and nonnegative"));
        }
        if !(self.eta_ch > 0.0 && self.eta_ch <= 1.0 && self.eta_dis > 0.0 && self.eta_dis <= 1.0) {
            return Err(config("battery efficiencies must lie in (0, 1]"));
        }
        if !(self.soc_min <= self.soc_initial && self.soc_initial <= self.soc_max) {
            return Err(config("initial state of charge must lie within its limits"));
        }
        Ok(())
    }
}

/// Knobs of the synthetic scenario generator.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub periods: usize,
    /// Flat part of the load, kW.
    pub base_load: f64,
    pub morning_peak: f64,
    pub evening_peak: f64,
    /// Peak of the daylight renewable bell, kW.
    pub renewable_peak: f64,
    /// Relative amplitude of the multiplicative noise on both profiles.
    pub noise: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            periods: 96,
            base_load: 250.0,
            morning_peak: 85.0,
            evening_peak: 130.0,
            renewable_peak: 285.0,
            noise: 0.02,
        }
    }
}

/// Load in kW at hour `h`: a base level plus Gaussian bumps at 10:00 and 19:30.
fn load_profile(h: f64, p: &ScenarioParams) -> f64 {
    let bump = |centre: f64, width: f64| (-(h - centre).powi(2) / (2.0 * width * width)).exp();
    p.base_load + p.morning_peak * bump(10.0, 2.5) + p.evening_peak * bump(19.5, 2.0)
}

/// Renewable output in kW at hour `h`: a half-sine between 05:30 and 19:30.
fn renewable_profile(h: f64, p: &ScenarioParams) -> f64 {
    let (rise, set) = (5.5, 19.5);
    if h <= rise || h >= set {
        0.0
    } else {
        p.renewable_peak * (PI * (h - rise) / (set - rise)).sin()
    }
}

fn price_tier(h: f64) -> f64 {
    if !(7.0..23.0).contains(&h) {
        0.35
    } else if (10.0..13.0).contains(&h) || (18.0..22.0).contains(&h) {
        1.0
    } else {
        0.65
    }
}

/// Deterministic synthetic day. Profiles are sampled at period midpoints and
/// perturbed by seeded multiplicative noise; renewable output never exceeds
/// 90% of the load.
pub fn generate_scenario(params: &ScenarioParams, seed: u64) -> Result<MicrogridScenario> {
    if params.periods < 2 {
        return Err(config("a scenario needs at least two periods"));
    }
    let t = params.periods;
    let step = 24.0 / t as f64;
    let mut rng = SeedTree::new(seed).stream(0, Role::Scenario, 0);
    let mut jitter = || 1.0 + params.noise * (2.0 * rng.random::<f64>() - 1.0);
    let mut load = Vec::with_capacity(t);
    let mut renewable = Vec::with_capacity(t);
    for k in 0..t {
        let h = (k as f64 + 0.5) * step;
        let l = load_profile(h, params) * jitter();
        let r = (renewable_profile(h, params) * jitter()).min(0.9 * l);
        load.push(l);
        renewable.push(r.max(0.0));
    }
    let hours: Vec<f64> = (0..t).map(|k| (k as f64 + 0.5) * step).collect();
    let grid_price: Vec<f64> = hours.iter().map(|&h| price_tier(h)).collect();
    let grid_emission = grid_price.iter().map(|p| 0.55 + 0.1 * p).collect();
    let dr_max = load.iter().map(|l| 0.1 * l).collect();
    let scenario = MicrogridScenario {
        load,
        renewable,
        grid_price,
        grid_emission,
        dr_max,
        gen_cost: 0.7,
        gen_emission: 0.45,
        battery_cost: 0.05,
        dr_cost: 0.5,
        cur_cost: 0.3,
        gen_max: 120.0,
        ramp_max: 30.0,
        charge_max: 60.0,
        discharge_max: 60.0,
        eta_ch: 0.95,
        eta_dis: 0.95,
        soc_min: 40.0,
        soc_max: 360.0,
        soc_initial: 180.0,
        soc_tolerance: 10.0,
        dr_energy_max: 300.0,
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Per-constraint violation totals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ViolationBreakdown {
    /// Negative grid exchange, kW.
    pub grid: f64,
    /// Generator ramp excess, kW.
    pub ramp: f64,
    /// State-of-charge excursions, kWh.
    pub soc: f64,
    /// Demand-response energy excess, kWh.
    pub dr_energy: f64,
    /// Terminal state-of-charge imbalance beyond tolerance, kWh.
    pub terminal: f64,
}

impl ViolationBreakdown {
    pub fn total(&self) -> f64 {
        self.grid + self.ramp + self.soc + self.dr_energy + self.terminal
    }

    pub fn entries(&self) -> [(&'static str, f64); 5] {
        [
            ("grid_nonnegativity", self.grid),
            ("generator_ramp", self.ramp),
            ("soc_bounds", self.soc),
            ("dr_energy", self.dr_energy),
            ("terminal_soc", self.terminal),
        ]
    }
}

/// A decoded schedule with derived grid exchange and state of charge.
#[derive(Debug, Clone, PartialEq)]
pub struct Dispatch {
    pub generator: Vec<f64>,
    pub charge: Vec<f64>,
    pub discharge: Vec<f64>,
    pub demand_response: Vec<f64>,
    pub curtailment: Vec<f64>,
    pub grid: Vec<f64>,
    /// State of charge at the end of each period.
    pub soc: Vec<f64>,
}

/// Three-objective day-ahead dispatch: cost, emissions and grid ramping.
#[derive(Debug, Clone)]
pub struct MicrogridProblem {
    scenario: MicrogridScenario,
    bounds: Bounds,
}

impl MicrogridProblem {
    pub fn new(scenario: MicrogridScenario) -> Result<Self> {
        scenario.validate()?;
        let t = scenario.periods();
        let mut upper = Vec::with_capacity(BLOCKS * t);
        upper.extend(std::iter::repeat_n(scenario.gen_max, t));
        upper.extend(std::iter::repeat_n(scenario.charge_max, t));
        upper.extend(std::iter::repeat_n(scenario.discharge_max, t));
        upper.extend(scenario.dr_max.iter().copied());
        upper.extend(scenario.renewable.iter().map(|&r| r.max(NIGHT_CURTAILMENT_BOUND)));
        let positive = upper.iter().map(|&u| u.max(NIGHT_CURTAILMENT_BOUND)).collect();
        let bounds = Bounds::new(vec![0.0; BLOCKS * t], positive)?;
        Ok(Self { scenario, bounds })
    }

    pub fn scenario(&self) -> &MicrogridScenario {
        &self.scenario
    }

    /// Splits `x` into its blocks, clips the box limits and simulates the battery.
    pub fn decode(&self, x: &[f64]) -> Result<Dispatch> {
        let s = &self.scenario;
        let t = s.periods();
        if x.len() != BLOCKS * t {
            return Err(config(format!("dispatch vector has {} entries, expected {}", x.len(), BLOCKS * t)));
        }
        let block = |b: usize, cap: &dyn Fn(usize) -> f64| -> Vec<f64> {
            (0..t).map(|k| x[b * t + k].clamp(0.0, cap(k))).collect()
        };
        let generator = block(0, &|_| s.gen_max);
        let charge = block(1, &|_| s.charge_max);
        let discharge = block(2, &|_| s.discharge_max);
        let demand_response = block(3, &|k| s.dr_max[k]);
        let curtailment = block(4, &|k| s.renewable[k]);
        let grid = (0..t)
            .map(|k| {
                s.load[k] - demand_response[k] + charge[k] + curtailment[k]
                    - (generator[k] + discharge[k] + s.renewable[k])
            })
            .collect();
        let dt = s.step();
        let mut soc = Vec::with_capacity(t);
        let mut e = s.soc_initial;
        for k in 0..t {
            e = e + s.eta_ch * dt * charge[k] - dt / s.eta_dis * discharge[k];
            soc.push(e);
        }
        Ok(Dispatch {
            generator,
            charge,
            discharge,
            demand_response,
            curtailment,
            grid,
            soc,
        })
    }

    pub fn objectives_of(&self, d: &Dispatch) -> [f64; 3] {
        let s = &self.scenario;
        let dt = s.step();
        let t = s.periods();
        let mut cost = 0.0;
        let mut emission = 0.0;
        for k in 0..t {
            cost += s.grid_price[k] * d.grid[k]
                + s.gen_cost * d.generator[k]
                + s.battery_cost * (d.charge[k] + d.discharge[k])
                + s.dr_cost * d.demand_response[k]
                + s.cur_cost * d.curtailment[k];
            emission += s.grid_emission[k] * d.grid[k] + s.gen_emission * d.generator[k];
        }
        let ramp = d.grid.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (t - 1) as f64;
        [dt * cost, dt * emission, ramp]
    }

    pub fn violations_of(&self, d: &Dispatch) -> ViolationBreakdown {
        let s = &self.scenario;
        let dt = s.step();
        let grid = d.grid.iter().map(|g| (-g).max(0.0)).sum();
        let ramp = d
            .generator
            .windows(2)
            .map(|w| ((w[1] - w[0]).abs() - s.ramp_max).max(0.0))
            .sum();
        let soc = d
            .soc
            .iter()
            .map(|e| (s.soc_min - e).max(0.0) + (e - s.soc_max).max(0.0))
            .sum();
        let dr_energy = (dt * d.demand_response.iter().sum::<f64>() - s.dr_energy_max).max(0.0);
        let last = *d.soc.last().expect("at least two periods");
        let terminal = ((last - s.soc_initial).abs() - s.soc_tolerance).max(0.0);
        ViolationBreakdown {
            grid,
            ramp,
            soc,
            dr_energy,
            terminal,
        }
    }
}

impl Problem for MicrogridProblem {
    fn name(&self) -> String {
        "MICROGRID".into()
    }

    fn objectives(&self) -> usize {
        3
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> (Vec<f64>, f64) {
        match self.decode(x) {
            Ok(d) => (self.objectives_of(&d).to_vec(), self.violations_of(&d).total()),
            Err(_) => (vec![f64::NAN; 3], f64::INFINITY),
        }
    }

    /// Generator block as the front group; the other four blocks converge
    /// toward zero action.
    fn structure(&self) -> VariableStructure {
        let t = self.scenario.periods();
        let groups = (0..BLOCKS).map(|b| (b * t..(b + 1) * t).collect()).collect();
        let targets = Arc::new(ConstantTargets(vec![0.0; BLOCKS * t]));
        VariableStructure::new(groups, self.bounds.clone(), targets).expect("blocks partition the decision vector")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_period() -> MicrogridScenario {
        let mut s = generate_scenario(&ScenarioParams { periods: 2, ..Default::default() }, 1).unwrap();
        s.load = vec![100.0, 100.0];
        s.renewable = vec![30.0, 30.0];
        s.dr_max = vec![10.0, 10.0];
        s
    }

    #[test]
    fn power_balance_example() {
        let p = MicrogridProblem::new(one_period()).unwrap();
        let x = [20.0, 20.0, 5.0, 5.0, 10.0, 10.0, 10.0, 10.0, 0.0, 0.0];
        let d = p.decode(&x).unwrap();
        assert_eq!(d.grid, vec![35.0, 35.0]);
        assert_eq!(p.objectives_of(&d)[2], 0.0);
    }

    #[test]
    fn identity_dispatch() {
        let s = generate_scenario(&ScenarioParams::default(), 3).unwrap();
        let p = MicrogridProblem::new(s.clone()).unwrap();
        let d = p.decode(&vec![0.0; 5 * 96]).unwrap();
        for k in 0..96 {
            assert!((d.grid[k] - (s.load[k] - s.renewable[k])).abs() < 1e-12);
        }
        let net: Vec<f64> = s.load.iter().zip(&s.renewable).map(|(l, r)| l - r).collect();
        let ramp = net.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / 95.0;
        assert!((p.objectives_of(&d)[2] - ramp).abs() < 1e-9);
        let v = p.violations_of(&d);
        assert_eq!((v.soc, v.terminal, v.total()), (0.0, 0.0, 0.0));
    }

    #[test]
    fn decode_clips_box_limits() {
        let s = generate_scenario(&ScenarioParams::default(), 3).unwrap();
        let p = MicrogridProblem::new(s.clone()).unwrap();
        let d = p.decode(&vec![1e6; 5 * 96]).unwrap();
        for k in 0..96 {
            assert!(d.curtailment[k] <= s.renewable[k]);
            assert!(d.demand_response[k] <= s.dr_max[k]);
            assert!(d.generator[k] <= s.gen_max);
        }
        assert!(p.decode(&[0.0; 7]).is_err());
    }

    #[test]
    fn scenario_generation() {
        let params = ScenarioParams::default();
        let a = generate_scenario(&params, 9).unwrap();
        assert_eq!(a, generate_scenario(&params, 9).unwrap());
        assert_eq!(a.renewable[0], 0.0);
        assert_eq!(a.renewable[95], 0.0);
        assert!((a.total_load() / 7181.71 - 1.0).abs() < 0.1, "{}", a.total_load());
        assert!((a.total_renewable() / 2461.64 - 1.0).abs() < 0.1, "{}", a.total_renewable());
    }
}
