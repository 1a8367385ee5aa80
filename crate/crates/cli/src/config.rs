//! Experiment configuration: TOML with per-suite defaults.
//!
//! A file only needs `suite = "<name>"`; every other key falls back to the
//! defaults of that suite. Unknown keys are rejected.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Kernel,
    Linear,
    Inhomogeneous,
    Nonlinear,
    Hotspot,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Kernel, Suite::Linear, Suite::Inhomogeneous, Suite::Nonlinear, Suite::Hotspot];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Kernel => "kernel",
            Suite::Linear => "linear",
            Suite::Inhomogeneous => "inhomogeneous",
            Suite::Nonlinear => "nonlinear",
            Suite::Hotspot => "hotspot",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s)
    }

    /// What the suite verifies.
    pub fn anchor(self) -> &'static str {
        match self {
            Suite::Kernel => "fundamental solution: closed-form oracle, self-similarity, semigroup law, mass, monotonicity, pointwise derivative bounds, biorthogonality of the atoms g_a",
            Suite::Linear => "linear expansion: remainder decay of S(t)phi minus its K-term expansion, M_a recursion, corrected expansion w1",
            Suite::Inhomogeneous => "Duhamel term: solver against quadrature, error of the expansion w2",
            Suite::Nonlinear => "semilinear problem |u|^(p-1)u: decay, expansions U_0 and U_1, integrator order, blow-up below the critical exponent",
            Suite::Hotspot => "hot spots: convergence of the maximizer to the centre of mass, Hessian decay",
        }
    }

    /// Acceptance criteria covered by the suite.
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Suite::Kernel => &[1, 2, 3],
            Suite::Linear => &[4, 5, 6],
            Suite::Inhomogeneous => &[7],
            Suite::Nonlinear => &[8, 9],
            Suite::Hotspot => &[10],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    GaussianBump,
    AsymmetricBump,
    TwoBump,
    ZeroMassDipole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecSection {
    pub theta: f64,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub halfwidth: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub kind: DataKind,
    pub amplitude: f64,
    /// two-bump masses
    pub weights: [f64; 2],
    /// two-bump centres sit at `∓separation`
    pub separation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    /// fitting window
    pub window: [f64; 2],
    pub samples: usize,
    pub dt: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    pub thetas: Vec<f64>,
    pub dims: Vec<usize>,
    pub oracle_times: Vec<f64>,
    pub oracle_extent: f64,
    pub random_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionSection {
    pub k: Vec<f64>,
    pub j: Vec<usize>,
    /// moment order of `w1` and `w2`
    pub w_order: f64,
    pub w1_window: [f64; 2],
    pub random_fields: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InhomogeneousSection {
    pub pulse: [f64; 2],
    pub pulse_end: f64,
    pub pulse_dt: f64,
    pub simpson_panels: usize,
    /// `F(x, s) = (1+s)^{-decay} φ(x)` for the `w2` study
    pub decay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearSection {
    pub p: f64,
    pub k: f64,
    pub convergence_steps: Vec<f64>,
    pub convergence_horizon: f64,
    pub convergence_amplitude: f64,
    /// blow-up exponent is `1 + θ/N - blow_up_offset`
    pub blow_up_offset: f64,
    pub blow_up_horizon: f64,
    pub blow_up_amplitude: f64,
    pub checkpoint: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HotspotSection {
    pub first_time: f64,
    pub concavity_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub kernel_value: f64,
    pub kernel_derivative: f64,
    pub kernel_runtime: f64,
    pub structure: f64,
    pub mass_spread: f64,
    pub bound_violation: f64,
    pub biorthogonality: f64,
    pub slope: f64,
    pub moment_residual: f64,
    pub recursion: f64,
    pub duhamel: f64,
    pub u0_slope: f64,
    pub u1_steepening: f64,
    pub order: f64,
    pub nonlinear_runtime: f64,
    pub hessian_slope: f64,
    pub hotspot_distance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            kernel_value: 1e-8,
            kernel_derivative: 1e-6,
            kernel_runtime: 10.0,
            structure: 1e-10,
            mass_spread: 2.0,
            bound_violation: 0.05,
            biorthogonality: 1e-6,
            slope: 0.15,
            moment_residual: 1e-6,
            recursion: 1e-8,
            duhamel: 1e-5,
            u0_slope: 0.2,
            u1_steepening: 0.25,
            order: 0.2,
            nonlinear_runtime: 300.0,
            hessian_slope: 0.2,
            hotspot_distance: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub suite: Suite,
    pub seed: u64,
    pub out: String,
    pub spec: SpecSection,
    pub grid: GridSection,
    pub data: DataSection,
    pub time: TimeSection,
    pub kernel: KernelSection,
    pub expansion: ExpansionSection,
    pub inhomogeneous: InhomogeneousSection,
    pub nonlinear: NonlinearSection,
    pub hotspot: HotspotSection,
    pub tolerances: Tolerances,
}

/// Invalid configuration, reported before any computation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

impl Config {
    /// Defaults of one suite.
    pub fn defaults(suite: Suite) -> Self {
        let mut c = Config {
            suite,
            seed: 20240611,
            out: format!("reports/{suite}"),
            spec: SpecSection { theta: 1.0, dim: 1 },
            grid: GridSection { halfwidth: 256.0, points: 1024 },
            data: DataSection { kind: DataKind::AsymmetricBump, amplitude: 1.0, weights: [0.7, 0.3], separation: 1.0 },
            time: TimeSection { window: [10.0, 100.0], samples: 12, dt: 0.01, t_end: 100.0 },
            kernel: KernelSection {
                thetas: vec![0.5, 1.0, 1.5],
                dims: vec![1, 2],
                oracle_times: vec![0.5, 1.0, 2.0],
                oracle_extent: 50.0,
                random_points: 100,
            },
            expansion: ExpansionSection { k: vec![0.0, 1.0, 2.0], j: vec![0, 1], w_order: 2.0, w1_window: [1.0, 100.0], random_fields: 50 },
            inhomogeneous: InhomogeneousSection { pulse: [0.3, 1.2], pulse_end: 2.0, pulse_dt: 0.002, simpson_panels: 400, decay: 2.0 },
            nonlinear: NonlinearSection {
                p: 3.0,
                k: 2.0,
                convergence_steps: vec![0.04, 0.02, 0.01],
                convergence_horizon: 2.0,
                convergence_amplitude: 1.0,
                blow_up_offset: 0.1,
                blow_up_horizon: 50.0,
                blow_up_amplitude: 1.0,
                checkpoint: false,
            },
            hotspot: HotspotSection { first_time: 1.0, concavity_radius: 5.0 },
            tolerances: Tolerances::default(),
        };
        match suite {
            Suite::Kernel | Suite::Linear => {}
            Suite::Inhomogeneous => {
                c.time.t_end = 20.0;
                c.time.window = [2.0, 20.0];
            }
            Suite::Nonlinear => {
                c.grid = GridSection { halfwidth: 1024.0, points: 4096 };
                c.data.amplitude = 0.05;
            }
            Suite::Hotspot => {
                c.grid = GridSection { halfwidth: 1024.0, points: 8192 };
                c.data.kind = DataKind::TwoBump;
                c.time.samples = 25;
            }
        }
        c
    }

    /// Parses a TOML document over the defaults of its suite; `suite`
    /// overrides the suite named in the file.
    pub fn from_toml(text: &str, suite: Option<Suite>) -> Result<Self, ConfigError> {
        let user: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError(format!("malformed config: {}", e.message())))?;
        let suite = match suite {
            Some(s) => s,
            None => match user.get("suite") {
                Some(toml::Value::String(s)) => Suite::parse(s).ok_or_else(|| ConfigError(format!("unknown suite '{s}'")))?,
                Some(_) => return bad("suite must be a string"),
                None => return bad("missing key 'suite'"),
            },
        };
        let mut base = toml::Table::try_from(Config::defaults(suite)).map_err(|e| ConfigError(e.to_string()))?;
        merge(&mut base, user, "")?;
        base.insert("suite".into(), toml::Value::String(suite.name().into()));
        let cfg: Config = toml::Value::Table(base).try_into().map_err(|e: toml::de::Error| ConfigError(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn horizon(&self) -> f64 {
        match self.suite {
            Suite::Kernel => 0.0,
            Suite::Linear => self.expansion.w1_window[1],
            Suite::Inhomogeneous => self.time.t_end.max(self.inhomogeneous.pulse_end),
            Suite::Nonlinear => self.time.t_end.max(self.nonlinear.blow_up_horizon),
            Suite::Hotspot => self.time.window[1],
        }
    }

    /// Cross-field checks.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let theta = self.spec.theta;
        let n = self.spec.dim as f64;
        if !(theta > 0.0 && theta < 2.0) {
            return bad(format!("theta must lie in (0, 2), got {theta}"));
        }
        if !(self.spec.dim == 1 || self.spec.dim == 2) {
            return bad(format!("dimension must be 1 or 2, got {}", self.spec.dim));
        }
        if !(self.grid.halfwidth > 0.0) || self.grid.points < 16 || !self.grid.points.is_multiple_of(2) {
            return bad("grid needs a positive halfwidth and an even number of points >= 16");
        }
        let [t0, t1] = self.time.window;
        if !(t0 > 0.0 && t1 > t0) || self.time.samples < 5 {
            return bad("time window must satisfy 0 < t0 < t1 with at least 5 samples");
        }
        if !(self.time.dt > 0.0 && self.time.t_end > 0.0) {
            return bad("time step and horizon must be positive");
        }
        // kernel and linear never propagate on the periodic grid
        if !matches!(self.suite, Suite::Kernel | Suite::Linear) {
            let reach = self.horizon().powf(1.0 / theta);
            if reach > self.grid.halfwidth / 8.0 {
                return bad(format!(
                    "t_max^(1/theta) = {reach:.3} exceeds L/8 = {:.3}; enlarge the grid or shorten the run",
                    self.grid.halfwidth / 8.0
                ));
            }
        }
        if !(self.data.amplitude.is_finite() && self.data.amplitude != 0.0) {
            return bad("data amplitude must be finite and nonzero");
        }
        if self.data.kind == DataKind::TwoBump && !(self.data.weights.iter().all(|w| *w > 0.0) && self.data.separation > 0.0) {
            return bad("two-bump data needs positive weights and separation");
        }
        if self.tolerances_invalid() {
            return bad("tolerances must be positive");
        }
        match self.suite {
            Suite::Kernel => {
                if self.kernel.thetas.iter().any(|t| !(*t > 0.0 && *t < 2.0)) {
                    return bad("kernel thetas must lie in (0, 2)");
                }
                if self.kernel.dims.iter().any(|d| *d != 1 && *d != 2) {
                    return bad("kernel dims must be 1 or 2");
                }
                if self.kernel.oracle_times.iter().any(|t| !(*t > 0.0)) || !(self.kernel.oracle_extent > 0.0) {
                    return bad("oracle times and extent must be positive");
                }
            }
            Suite::Linear => {
                if self.expansion.k.iter().any(|k| !(*k >= 0.0)) || self.expansion.j.iter().any(|j| *j > 2) {
                    return bad("expansion orders need K >= 0 and j <= 2");
                }
                let [a, b] = self.expansion.w1_window;
                if !(a > 0.0 && b > a) {
                    return bad("w1 window must satisfy 0 < t0 < t1");
                }
                if !(self.expansion.w_order >= 0.0) {
                    return bad("w_order must be nonnegative");
                }
            }
            Suite::Inhomogeneous => {
                let [on, off] = self.inhomogeneous.pulse;
                if !(on >= 0.0 && off > on && self.inhomogeneous.pulse_end > 0.0) {
                    return bad("pulse needs 0 <= on < off and a positive end time");
                }
                if self.inhomogeneous.simpson_panels < 2 || !self.inhomogeneous.simpson_panels.is_multiple_of(2) {
                    return bad("simpson_panels must be even and at least 2");
                }
            }
            Suite::Nonlinear => {
                let p = self.nonlinear.p;
                let k = self.nonlinear.k;
                if !(p > 1.0) {
                    return bad(format!("exponent p must exceed 1, got {p}"));
                }
                if n * (p - 1.0) / theta <= 1.0 {
                    return bad(format!("A_p = N(p-1)/theta = {:.3} must exceed 1", n * (p - 1.0) / theta));
                }
                if !(k >= 0.0 && k + n < p * (n + theta)) {
                    return bad(format!("moment order needs 0 <= K and K+N < p(N+theta): K = {k}, p(N+theta) = {}", p * (n + theta)));
                }
                if !(1.0 + theta / n - self.nonlinear.blow_up_offset > 1.0 && self.nonlinear.blow_up_offset > 0.0) {
                    return bad("blow_up_offset must lie in (0, theta/N)");
                }
                if self.nonlinear.convergence_steps.len() < 3 {
                    return bad("convergence study needs at least three step sizes");
                }
            }
            Suite::Hotspot => {
                if self.data.kind == DataKind::ZeroMassDipole || self.data.amplitude < 0.0 {
                    return bad("hot-spot tracking needs data of positive mass");
                }
                if !(self.hotspot.first_time > 0.0 && self.hotspot.first_time < t0) {
                    return bad("hotspot first_time must lie in (0, window start)");
                }
            }
        }
        Ok(())
    }

    fn tolerances_invalid(&self) -> bool {
        let t = &self.tolerances;
        [
            t.kernel_value,
            t.kernel_derivative,
            t.kernel_runtime,
            t.structure,
            t.mass_spread,
            t.bound_violation,
            t.biorthogonality,
            t.slope,
            t.moment_residual,
            t.recursion,
            t.duhamel,
            t.u0_slope,
            t.u1_steepening,
            t.order,
            t.nonlinear_runtime,
            t.hessian_slope,
            t.hotspot_distance,
        ]
        .iter()
        .any(|v| !(*v > 0.0))
    }
}

/// Recursive overlay of `user` on `base`; unknown keys are errors.
fn merge(base: &mut toml::Table, user: toml::Table, path: &str) -> Result<(), ConfigError> {
    for (key, value) in user {
        let full = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) => merge(b, u, &full)?,
            (Some(toml::Value::Table(_)), _) => return bad(format!("'{full}' must be a table")),
            (Some(slot), v) => *slot = v,
            (None, _) => return bad(format!("unknown key '{full}'")),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        for s in Suite::ALL {
            let c = Config::defaults(s);
            c.validate().unwrap();
            assert_eq!(Config::from_toml(&c.to_toml(), None).unwrap(), c);
        }
    }

    #[test]
    fn overrides_and_rejections() {
        let c = Config::from_toml("suite = \"linear\"\n[spec]\ntheta = 0.8\n", None).unwrap();
        assert_eq!(c.spec.theta, 0.8);
        assert_eq!(c.grid, Config::defaults(Suite::Linear).grid);
        assert!(Config::from_toml("suite = \"linear\"\n[spec]\nthetta = 0.8\n", None).is_err());
        assert!(Config::from_toml("[spec]\ntheta = 0.8\n", None).is_err());
        let e = Config::from_toml("suite = \"nonlinear\"\n[nonlinear]\nk = 6.0\n", None).unwrap_err();
        assert!(e.0.contains("K+N < p(N+theta)"), "{e}");
        let e = Config::from_toml("suite = \"hotspot\"\n[grid]\nhalfwidth = 64.0\npoints = 512\n", None).unwrap_err();
        assert!(e.0.contains("L/8"), "{e}");
        let c = Config::from_toml("suite = \"linear\"\n", Some(Suite::Kernel)).unwrap();
        assert_eq!(c.suite, Suite::Kernel);
    }
}
