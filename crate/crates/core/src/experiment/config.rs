use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::gridworld::{Cell, HeadingNoise, NoiseModel, WorkspaceLayout};
use crate::learning::{AlphaSchedule, Blend, LearningSchedule, ObjectiveKind, UpdateRange};
use crate::stl::{Formula, ParseContext};
use crate::tau_mdp::DEFAULT_STATE_CAP;

use super::ExperimentError;

#[derive(Clone, Debug, PartialEq)]
pub struct LayoutSection {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub pitch: f64,
    pub initial: [f64; 2],
    /// `(i, j) -> label`.
    pub regions: BTreeMap<(usize, usize), String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSection {
    /// Radians.
    pub delta_theta: f64,
    pub step_length: f64,
    pub distribution: HeadingNoise,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormulaSection {
    /// `name := body` lines in file order.
    pub aliases: Vec<(String, String)>,
    pub phi: String,
    /// Episode length `T`; defaults to `H + W - 1`.
    pub horizon: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearningSection {
    pub objective: ObjectiveKind,
    pub alpha: f64,
    pub per_visit_alpha: bool,
    pub gamma: f64,
    pub epsilon_base: f64,
    pub episodes: usize,
    pub seed: u64,
    pub r_min: f64,
    pub r_max: f64,
    pub blend: Blend,
    pub update_range: UpdateRange,
    pub state_cap: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationSection {
    pub rollouts: usize,
    pub seed: u64,
}

/// Everything needed to reproduce one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub layout: LayoutSection,
    pub noise: NoiseSection,
    pub formula: FormulaSection,
    pub learning: LearningSection,
    pub evaluation: EvaluationSection,
}

fn invalid(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ExperimentError> {
    v.trim()
        .parse()
        .map_err(|_| invalid(format!("`{key}`: cannot parse `{v}`")))
}

fn pair(key: &str, v: &str) -> Result<(f64, f64), ExperimentError> {
    let (a, b) = v
        .split_once(',')
        .ok_or_else(|| invalid(format!("`{key}` must be two comma-separated numbers")))?;
    Ok((num(key, a)?, num(key, b)?))
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let mut sections: BTreeMap<String, Vec<(usize, String, String)>> = BTreeMap::new();
        let mut aliases = Vec::new();
        let mut current: Option<String> = None;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim().to_string();
                if !matches!(
                    name.as_str(),
                    "layout" | "regions" | "noise" | "formula" | "learning" | "evaluation"
                ) {
                    return Err(invalid(format!("line {}: unknown section [{name}]", no + 1)));
                }
                sections.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let sec = current
                .clone()
                .ok_or_else(|| invalid(format!("line {}: entry outside any section", no + 1)))?;
            if sec == "formula" {
                if let Some((name, body)) = line.split_once(":=") {
                    aliases.push((name.trim().to_string(), body.trim().to_string()));
                    continue;
                }
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected `key = value`", no + 1)))?;
            let entries = sections.get_mut(&sec).expect("section registered");
            let k = k.trim().to_string();
            if sec != "regions" && entries.iter().any(|(_, key, _)| *key == k) {
                return Err(invalid(format!("line {}: duplicate key `{k}`", no + 1)));
            }
            entries.push((no + 1, k, v.trim().to_string()));
        }

        let get = |sec: &str| -> BTreeMap<String, String> {
            sections
                .get(sec)
                .map(|e| e.iter().map(|(_, k, v)| (k.clone(), v.clone())).collect())
                .unwrap_or_default()
        };
        let check_keys = |sec: &str, m: &BTreeMap<String, String>, allowed: &[&str]| {
            match m.keys().find(|k| !allowed.contains(&k.as_str())) {
                Some(k) => Err(invalid(format!("unknown key `{k}` in [{sec}]"))),
                None => Ok(()),
            }
        };

        let l = get("layout");
        check_keys("layout", &l, &["x_min", "x_max", "y_min", "y_max", "pitch", "initial"])?;
        let f = |m: &BTreeMap<String, String>, k: &str, d: f64| -> Result<f64, ExperimentError> {
            m.get(k).map_or(Ok(d), |v| num(k, v))
        };
        let mut regions = BTreeMap::new();
        for (line, k, v) in sections.get("regions").into_iter().flatten() {
            let (i, j) = pair(k, k).map_err(|_| invalid(format!("line {line}: region key must be `i,j`")))?;
            if i < 0.0 || j < 0.0 || i.fract() != 0.0 || j.fract() != 0.0 {
                return Err(invalid(format!("line {line}: region indices must be whole numbers")));
            }
            if v.is_empty() || !v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(invalid(format!("line {line}: invalid label `{v}`")));
            }
            if regions.insert((i as usize, j as usize), v.clone()).is_some() {
                return Err(invalid(format!("line {line}: cell {k} labelled twice")));
            }
        }
        let initial = match l.get("initial") {
            Some(v) => {
                let (a, b) = pair("initial", v)?;
                [a, b]
            }
            None => [0.5, 0.5],
        };
        let layout = LayoutSection {
            x: (f(&l, "x_min", 0.0)?, f(&l, "x_max", 6.0)?),
            y: (f(&l, "y_min", 0.0)?, f(&l, "y_max", 6.0)?),
            pitch: f(&l, "pitch", 1.0)?,
            initial,
            regions,
        };

        let n = get("noise");
        check_keys("noise", &n, &["delta_theta", "delta_theta_deg", "step_length", "distribution"])?;
        let delta_theta = match (n.get("delta_theta"), n.get("delta_theta_deg")) {
            (Some(_), Some(_)) => {
                return Err(invalid("give either delta_theta or delta_theta_deg, not both"))
            }
            (Some(v), None) => num("delta_theta", v)?,
            (None, Some(v)) => num::<f64>("delta_theta_deg", v)?.to_radians(),
            (None, None) => std::f64::consts::PI / 9.0,
        };
        let distribution = match n.get("distribution").map(String::as_str) {
            None | Some("uniform") => HeadingNoise::Uniform,
            Some(other) => return Err(invalid(format!("unsupported noise distribution `{other}`"))),
        };
        let noise = NoiseSection {
            delta_theta,
            step_length: f(&n, "step_length", 1.0)?,
            distribution,
        };

        let fm = get("formula");
        check_keys("formula", &fm, &["phi", "horizon"])?;
        let formula = FormulaSection {
            aliases,
            phi: fm
                .get("phi")
                .cloned()
                .ok_or_else(|| invalid("[formula] needs `phi`"))?,
            horizon: fm.get("horizon").map(|v| num("horizon", v)).transpose()?,
        };

        let g = get("learning");
        check_keys(
            "learning",
            &g,
            &[
                "objective",
                "alpha",
                "alpha_schedule",
                "gamma",
                "epsilon_base",
                "episodes",
                "seed",
                "r_min",
                "r_max",
                "blend",
                "update_range",
                "state_cap",
            ],
        )?;
        let objective = match g.get("objective") {
            None => ObjectiveKind::MaxRobustness,
            Some(v) => ObjectiveKind::parse(v).ok_or_else(|| invalid(format!("unknown objective `{v}`")))?,
        };
        let per_visit_alpha = match g.get("alpha_schedule").map(String::as_str) {
            None | Some("constant") => false,
            Some("per_visit") => true,
            Some(o) => return Err(invalid(format!("unknown alpha_schedule `{o}`"))),
        };
        let blend = match g.get("blend").map(String::as_str) {
            None | Some("standard") => Blend::Standard,
            Some("alg2") => Blend::Alg2,
            Some(o) => return Err(invalid(format!("unknown blend `{o}`"))),
        };
        let update_range = match g.get("update_range").map(String::as_str) {
            None | Some("full") => UpdateRange::Full,
            Some("algorithm") => UpdateRange::Algorithm,
            Some(o) => return Err(invalid(format!("unknown update_range `{o}`"))),
        };
        let learning = LearningSection {
            objective,
            alpha: f(&g, "alpha", 0.95)?,
            per_visit_alpha,
            gamma: f(&g, "gamma", 1.0)?,
            epsilon_base: f(&g, "epsilon_base", 0.995)?,
            episodes: g.get("episodes").map_or(Ok(300), |v| num("episodes", v))?,
            seed: g
                .get("seed")
                .map(|v| num("seed", v))
                .transpose()?
                .ok_or_else(|| invalid("[learning] needs an explicit `seed`"))?,
            r_min: f(&g, "r_min", -5.0)?,
            r_max: f(&g, "r_max", 0.5)?,
            blend,
            update_range,
            state_cap: g.get("state_cap").map_or(Ok(DEFAULT_STATE_CAP), |v| num("state_cap", v))?,
        };

        let e = get("evaluation");
        check_keys("evaluation", &e, &["rollouts", "seed"])?;
        let evaluation = EvaluationSection {
            rollouts: e.get("rollouts").map_or(Ok(500), |v| num("rollouts", v))?,
            seed: e
                .get("seed")
                .map(|v| num("seed", v))
                .transpose()?
                .ok_or_else(|| invalid("[evaluation] needs an explicit `seed`"))?,
        };

        let cfg = ExperimentConfig {
            layout,
            noise,
            formula,
            learning,
            evaluation,
        };
        cfg.build()?;
        Ok(cfg)
    }

    /// Canonical text of everything that shapes the trained artifacts,
    /// excluding the learning seed and the evaluation section.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let l = &self.layout;
        let _ = writeln!(s, "layout {:?} {:?} {:?} {:?}", l.x, l.y, l.pitch, l.initial);
        for ((i, j), lab) in &l.regions {
            let _ = writeln!(s, "region {i},{j} {lab}");
        }
        let n = &self.noise;
        let _ = writeln!(s, "noise {:?} {:?} {:?}", n.delta_theta, n.step_length, n.distribution);
        for (name, body) in &self.formula.aliases {
            let _ = writeln!(s, "alias {name} := {body}");
        }
        let _ = writeln!(s, "phi {} horizon {:?}", self.formula.phi, self.formula.horizon);
        let g = &self.learning;
        let _ = writeln!(
            s,
            "learning {} {:?} {} {:?} {:?} {} {:?} {:?} {:?} {:?} {}",
            g.objective.name(),
            g.alpha,
            g.per_visit_alpha,
            g.gamma,
            g.epsilon_base,
            g.episodes,
            g.r_min,
            g.r_max,
            g.blend,
            g.update_range,
            g.state_cap
        );
        s
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    /// Validates and instantiates the layout, noise, formula and schedule.
    pub fn build(&self) -> Result<Setup, ExperimentError> {
        let l = &self.layout;
        let mut layout = WorkspaceLayout::new(l.x, l.y, l.pitch, l.initial)?;
        for (&(i, j), lab) in &l.regions {
            layout.set_label(Cell::new(i, j), lab)?;
        }
        let noise = NoiseModel::new(self.noise.delta_theta, self.noise.step_length)?;
        if self.noise.step_length > l.pitch {
            return Err(invalid("step_length above the cell pitch lets the robot skip cells"));
        }

        let mut ctx = ParseContext::new(2);
        let user: Vec<&str> = self.formula.aliases.iter().map(|(n, _)| n.as_str()).collect();
        let labels: std::collections::BTreeSet<&str> = l.regions.values().map(String::as_str).collect();
        for lab in labels {
            if !user.contains(&lab) {
                ctx.bind(lab, layout.label_formula(lab)?)?;
            }
        }
        for (name, body) in &self.formula.aliases {
            ctx.define(&format!("{name} := {body}"))?;
        }
        let spec = ctx.parse(&self.formula.phi)?;
        let top = spec.top_level()?;
        let window = top.inner.window_len();
        let natural = top.bound + window - 1;
        let horizon = self.formula.horizon.unwrap_or(natural);
        if horizon < window {
            return Err(invalid(format!("horizon {horizon} is shorter than the window {window}")));
        }

        let g = &self.learning;
        if !(g.r_min < g.r_max) {
            return Err(invalid("r_min must be below r_max"));
        }
        let mut schedule = LearningSchedule::new(
            if g.per_visit_alpha {
                AlphaSchedule::PerVisit
            } else {
                AlphaSchedule::Constant(g.alpha)
            },
            g.gamma,
            g.epsilon_base,
            g.episodes,
            g.seed,
        );
        schedule.blend = g.blend;
        schedule.update_range = g.update_range;
        schedule.init = match g.objective {
            ObjectiveKind::MaxProbability => (0.0, 0.1),
            ObjectiveKind::MaxRobustness => (0.1 * g.r_min, 0.1 * g.r_max),
        };
        schedule.validate()?;
        if g.state_cap == 0 {
            return Err(invalid("state_cap must be positive"));
        }
        Ok(Setup {
            layout,
            noise,
            spec,
            window,
            horizon,
            schedule,
        })
    }
}

/// Instantiated experiment objects.
#[derive(Clone, Debug)]
pub struct Setup {
    pub layout: WorkspaceLayout<f64>,
    pub noise: NoiseModel<f64>,
    pub spec: Formula<f64>,
    pub window: usize,
    pub horizon: usize,
    pub schedule: LearningSchedule<f64>,
}
