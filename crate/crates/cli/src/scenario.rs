//! Scenario files (`.scn`, YAML).
//!
//! Robot numbers in files are one-based, as in the usual R1..Rn notation;
//! everything in memory is zero-based.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use swarmgc_core::planners::{Circle, Environment, PlannerConfig, PlannerKind, Rect, Scenario};
use swarmgc_core::{allocate_groups, GroupAllocation, SwarmParams, SwarmState, Vector2};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub positions: Vec<[f64; 2]>,
    pub orientations: Vec<f64>,
}

impl StateDoc {
    pub fn from_state(s: &SwarmState) -> Self {
        StateDoc {
            positions: s.positions().iter().map(|p| [p.x, p.y]).collect(),
            orientations: s.headings().to_vec(),
        }
    }

    pub fn to_state(&self) -> Result<SwarmState> {
        Ok(SwarmState::new(
            self.positions.iter().map(|p| Vector2::new(p[0], p[1])).collect(),
            self.orientations.clone(),
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsDoc {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleDoc {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvDoc {
    pub bounds: BoundsDoc,
    #[serde(default)]
    pub obstacles: Vec<CircleDoc>,
    #[serde(default)]
    pub robot_radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_separation: Option<f64>,
}

/// Planner knobs; anything omitted takes the library default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planner: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_time_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal_bias: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extend_candidates: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    /// One-based robot numbers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroups: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub robots: usize,
    pub turning_radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_overrides: Option<Vec<f64>>,
    #[serde(default = "unit_speed")]
    pub speed: f64,
    /// One 0/1 string per group, robot 1 first. Generated from `robots`
    /// when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allocation: Option<Vec<String>>,
    pub starts: StateDoc,
    pub goals: Vec<[f64; 2]>,
    pub environment: EnvDoc,
    pub goal_radius: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub planner: ConfigDoc,
}

fn unit_speed() -> f64 {
    1.0
}

/// A loaded scenario plus the planner named in its config, if any.
#[derive(Debug, Clone)]
pub struct ScenarioFile {
    pub scenario: Scenario,
    pub planner: Option<PlannerKind>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn parse_bits(key: &str, text: &str, n: usize) -> Result<Vec<bool>> {
    if text.len() != n {
        return Err(invalid(format!("{key}: expected {n} characters, got '{text}'")));
    }
    text.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(invalid(format!("{key}: '{text}' is not a 0/1 string"))),
        })
        .collect()
}

pub(crate) fn bits(row: &[bool]) -> String {
    row.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn one_based(key: &str, sets: &[Vec<usize>], n: usize) -> Result<Vec<Vec<usize>>> {
    sets.iter()
        .map(|s| {
            s.iter()
                .map(|&r| {
                    if r == 0 || r > n {
                        Err(invalid(format!("{key}: robot {r} is not in 1..={n}")))
                    } else {
                        Ok(r - 1)
                    }
                })
                .collect()
        })
        .collect()
}

impl ConfigDoc {
    pub fn apply(&self, n: usize, cfg: &mut PlannerConfig) -> Result<()> {
        macro_rules! set {
            ($($f:ident),*) => {$(if let Some(v) = self.$f { cfg.$f = v; })*};
        }
        set!(max_nodes, max_time_s, goal_bias, d_max, extend_candidates, k_steps, restarts, eps, resolution);
        if let Some(s) = &self.subgroups {
            cfg.subgroups = one_based("planner.subgroups", s, n)?;
        }
        Ok(())
    }

    pub fn from_config(cfg: &PlannerConfig, planner: Option<PlannerKind>) -> Self {
        ConfigDoc {
            planner: planner.map(|p| p.id().to_string()),
            max_nodes: Some(cfg.max_nodes),
            max_time_s: Some(cfg.max_time_s),
            goal_bias: Some(cfg.goal_bias),
            d_max: Some(cfg.d_max),
            extend_candidates: Some(cfg.extend_candidates),
            k_steps: Some(cfg.k_steps),
            restarts: Some(cfg.restarts),
            subgroups: (!cfg.subgroups.is_empty()).then(|| {
                cfg.subgroups
                    .iter()
                    .map(|s| s.iter().map(|r| r + 1).collect())
                    .collect()
            }),
            eps: Some(cfg.eps),
            resolution: Some(cfg.resolution),
        }
    }
}

impl ScenarioDoc {
    pub fn into_scenario(self) -> Result<ScenarioFile> {
        let n = self.robots;
        if n == 0 {
            return Err(invalid("robots: must be at least 1"));
        }
        let mut params = SwarmParams::new(n, self.turning_radius)?.with_speed(self.speed)?;
        if let Some(r) = self.radius_overrides {
            if r.len() != n {
                return Err(invalid(format!("radius_overrides: expected {n} values, got {}", r.len())));
            }
            params = params.with_radius_overrides(r)?;
        }
        let alloc = match &self.allocation {
            None => allocate_groups(n)?,
            Some(rows) => GroupAllocation::from_rows(
                rows.iter()
                    .map(|r| parse_bits("allocation", r, n))
                    .collect::<Result<_>>()?,
            )?,
        };
        if self.starts.positions.len() != n || self.starts.orientations.len() != n {
            return Err(invalid(format!("starts: expected {n} positions and orientations")));
        }
        if self.goals.len() != n {
            return Err(invalid(format!("goals: expected {n} entries, got {}", self.goals.len())));
        }
        let starts = self.starts.to_state()?;
        let goals = self.goals.iter().map(|g| Vector2::new(g[0], g[1])).collect();
        let e = &self.environment;
        let bounds = Rect::new(Vector2::from(e.bounds.min), Vector2::from(e.bounds.max))?;
        let obstacles = e
            .obstacles
            .iter()
            .map(|c| Circle::new(Vector2::from(c.center), c.radius))
            .collect::<Result<_, _>>()?;
        let env = Environment::new(bounds, obstacles)?
            .with_robot_radius(e.robot_radius)?
            .with_min_separation(e.min_separation)?;
        let mut config = PlannerConfig::default();
        self.planner.apply(n, &mut config)?;
        let planner = self
            .planner
            .planner
            .as_deref()
            .map(str::parse::<PlannerKind>)
            .transpose()?;
        let scenario = Scenario {
            params,
            alloc,
            starts,
            goals,
            env,
            goal_radius: self.goal_radius,
            seed: self.seed,
            config,
        };
        scenario.validate()?;
        Ok(ScenarioFile { scenario, planner })
    }

    pub fn from_scenario(scn: &Scenario, planner: Option<PlannerKind>) -> Self {
        let env = &scn.env;
        ScenarioDoc {
            robots: scn.params.n(),
            turning_radius: scn.params.radius(),
            radius_overrides: scn.params.radius_overrides().map(<[f64]>::to_vec),
            speed: scn.params.speed(),
            allocation: Some(scn.alloc.rows().iter().map(|r| bits(r)).collect()),
            starts: StateDoc::from_state(&scn.starts),
            goals: scn.goals.iter().map(|g| [g.x, g.y]).collect(),
            environment: EnvDoc {
                bounds: BoundsDoc {
                    min: env.bounds().min.into(),
                    max: env.bounds().max.into(),
                },
                obstacles: env
                    .obstacles()
                    .iter()
                    .map(|c| CircleDoc {
                        center: c.center.into(),
                        radius: c.radius,
                    })
                    .collect(),
                robot_radius: env.robot_radius(),
                min_separation: env.min_separation(),
            },
            goal_radius: scn.goal_radius,
            seed: scn.seed,
            planner: ConfigDoc::from_config(&scn.config, planner),
        }
    }
}

pub(crate) fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub(crate) fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub(crate) fn yaml<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    serde_yaml::from_str(text).map_err(|source| CliError::Yaml {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn to_yaml<T: Serialize>(value: &T) -> String {
    serde_yaml::to_string(value).expect("plain data always serializes")
}

/// Parses scenario text; `origin` only labels error messages.
pub fn parse_scenario(text: &str, origin: &Path) -> Result<ScenarioFile> {
    yaml::<ScenarioDoc>(origin, text)?.into_scenario()
}

pub fn load_scenario(path: &Path) -> Result<ScenarioFile> {
    parse_scenario(&read(path)?, path)
}

pub fn scenario_to_yaml(scn: &Scenario, planner: Option<PlannerKind>) -> String {
    to_yaml(&ScenarioDoc::from_scenario(scn, planner))
}

pub fn save_scenario(path: &Path, scn: &Scenario, planner: Option<PlannerKind>) -> Result<()> {
    write(path, &scenario_to_yaml(scn, planner))
}

pub fn load_state(path: &Path) -> Result<SwarmState> {
    yaml::<StateDoc>(path, &read(path)?)?.to_state()
}

pub fn state_to_yaml(s: &SwarmState) -> String {
    to_yaml(&StateDoc::from_state(s))
}

pub fn save_state(path: &Path, s: &SwarmState) -> Result<()> {
    write(path, &state_to_yaml(s))
}
