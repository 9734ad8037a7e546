//! JSON file formats: maps, Clark measure dumps and run configurations.

use innerlab_core::clark::ClarkMeasure;
use innerlab_core::clt::{Normalization, Tolerances};
use innerlab_core::variance::CoefficientSequence;
use innerlab_core::{BlaschkeProduct, C64};
use serde::{Deserialize, Serialize};

/// `[re, im]`
pub type Pair = [f64; 2];

fn complex(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

/// A Blaschke product as `{"zeros": [[re, im], ...], "rotation": [re, im]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub zeros: Vec<Pair>,
    #[serde(default = "unit")]
    pub rotation: Pair,
}

fn unit() -> Pair {
    [1.0, 0.0]
}

impl MapSpec {
    pub fn build(&self) -> innerlab_core::Result<BlaschkeProduct> {
        let zeros: Vec<C64> = self.zeros.iter().copied().map(complex).collect();
        BlaschkeProduct::new(&zeros, complex(self.rotation))
    }

    pub fn from_product(f: &BlaschkeProduct) -> Self {
        Self {
            zeros: f.zeros().into_iter().map(pair).collect(),
            rotation: pair(f.rotation()),
        }
    }
}

/// `{"alpha": theta, "atoms": [[theta, weight], ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClarkDump {
    pub alpha: f64,
    pub atoms: Vec<Pair>,
}

impl From<&ClarkMeasure> for ClarkDump {
    fn from(mu: &ClarkMeasure) -> Self {
        Self {
            alpha: mu.alpha.theta(),
            atoms: mu.atoms.iter().map(|(p, w)| [p.theta(), *w]).collect(),
        }
    }
}

/// Coefficient sequences. `len` defaults to the run's `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientSpec {
    Ones {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        len: Option<usize>,
    },
    Explicit {
        values: Vec<Pair>,
    },
    RandomSigns {
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        len: Option<usize>,
    },
    Geometric {
        ratio: Pair,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        len: Option<usize>,
    },
}

impl CoefficientSpec {
    pub fn build(&self, n: usize) -> innerlab_core::Result<CoefficientSequence> {
        match self {
            Self::Ones { len } => {
                CoefficientSequence::constant(C64::new(1.0, 0.0), len.unwrap_or(n))
            }
            Self::Explicit { values } => {
                CoefficientSequence::explicit(values.iter().copied().map(complex).collect())
            }
            Self::RandomSigns { seed, len } => {
                CoefficientSequence::random_signs(*seed, len.unwrap_or(n))
            }
            Self::Geometric { ratio, len } => {
                CoefficientSequence::geometric(complex(*ratio), len.unwrap_or(n))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Main,
    Tail,
    Corollary,
}

impl From<Mode> for Normalization {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Main => Normalization::Main,
            Mode::Tail => Normalization::Tail,
            Mode::Corollary => Normalization::Corollary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceSpec {
    pub mean: f64,
    pub abs2: f64,
    pub sq: f64,
    pub abs4: f64,
    pub ks: f64,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        let t = Tolerances::default();
        Self {
            mean: t.mean,
            abs2: t.abs2,
            sq: t.sq,
            abs4: t.abs4,
            ks: t.ks,
        }
    }
}

impl From<ToleranceSpec> for Tolerances {
    fn from(t: ToleranceSpec) -> Self {
        Tolerances {
            mean: t.mean,
            abs2: t.abs2,
            sq: t.sq,
            abs4: t.abs4,
            ks: t.ks,
        }
    }
}

/// Configuration of `clt simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub map: MapSpec,
    pub coefficients: CoefficientSpec,
    #[serde(rename = "N")]
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    /// Worker threads; the machine's parallelism when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit_cap: Option<usize>,
}

impl RunConfig {
    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}
