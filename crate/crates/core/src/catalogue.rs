//! Textual names for energies and initial data, as used in run configs.
//!
//! Energies: `quadratic`, `quadratic(n)`, `power(p)`, `dirichlet1d(n)`,
//! `dirichlet2d(n)`, `semilinear(n, well=double|harmonic)`, `tv1d(n)` and
//! `constrained(<energy>, box=[lo,hi])`.
//!
//! Initial data: `constant(c)`, `ramp`, `ramp(a,b)`, `step`,
//! `step(lo,hi,at)`, `sine(k)`, `cosine(k)`, `random(lo,hi)`. Coordinates
//! are taken along `x`; `random` draws nodes independently from a
//! ChaCha8 generator seeded with the run seed.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::energies::{semilinear_energy_on, Dirichlet, DoubleWell, HarmonicWell, Power, Quadratic, TotalVariation, Well};
use crate::energy::{constrained_energy, BoxConstraint, EnergyHandle};
use crate::error::{Error, Result};
use crate::hilbert::{Grid, GridFunction};

/// Grid size used by `quadratic` without an argument.
pub const DEFAULT_QUADRATIC_NODES: usize = 33;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WellSpec {
    Double,
    Harmonic,
}

impl WellSpec {
    fn build(self) -> Arc<dyn Well> {
        match self {
            WellSpec::Double => Arc::new(DoubleWell::default()),
            WellSpec::Harmonic => Arc::new(HarmonicWell),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnergySpec {
    Quadratic { n: Option<usize> },
    Power { p: f64 },
    Dirichlet1d { n: usize },
    Dirichlet2d { n: usize },
    Semilinear { n: usize, well: WellSpec },
    Tv1d { n: usize },
    Constrained { inner: Box<EnergySpec>, lo: f64, hi: f64 },
}

impl EnergySpec {
    pub fn grid(&self) -> Result<Grid> {
        match self {
            EnergySpec::Quadratic { n } => Grid::line(n.unwrap_or(DEFAULT_QUADRATIC_NODES)),
            EnergySpec::Power { .. } => Ok(Grid::Point),
            EnergySpec::Dirichlet1d { n } | EnergySpec::Semilinear { n, .. } | EnergySpec::Tv1d { n } => Grid::line(*n),
            EnergySpec::Dirichlet2d { n } => Grid::square(*n),
            EnergySpec::Constrained { inner, .. } => inner.grid(),
        }
    }

    pub fn build(&self) -> Result<EnergyHandle> {
        let grid = self.grid()?;
        Ok(match self {
            EnergySpec::Quadratic { .. } => Arc::new(Quadratic::new(grid)),
            EnergySpec::Power { p } => Arc::new(Power::new(*p)?),
            EnergySpec::Dirichlet1d { .. } | EnergySpec::Dirichlet2d { .. } => Arc::new(Dirichlet::new(grid)),
            EnergySpec::Semilinear { well, .. } => semilinear_energy_on(grid, well.build())?,
            EnergySpec::Tv1d { .. } => Arc::new(TotalVariation::new(grid)?),
            EnergySpec::Constrained { inner, lo, hi } => {
                let b = BoxConstraint::new(*lo, *hi)?;
                let witness = GridFunction::constant(grid, 0.5 * (lo + hi));
                constrained_energy(inner.build()?, Arc::new(b), &witness)?
            }
        })
    }

    /// Mutable access to the numeric parameter `name` (`n` or `p`), used by
    /// parameter sweeps.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        let as_count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Config(format!("parameter `{name}` needs a whole number, got {v}")))
            }
        };
        match (self, name) {
            (EnergySpec::Power { p }, "p") => *p = value,
            (EnergySpec::Quadratic { n }, "n") => *n = Some(as_count(value)?),
            (
                EnergySpec::Dirichlet1d { n }
                | EnergySpec::Dirichlet2d { n }
                | EnergySpec::Semilinear { n, .. }
                | EnergySpec::Tv1d { n },
                "n",
            ) => *n = as_count(value)?,
            (EnergySpec::Constrained { inner, .. }, _) => return inner.set_param(name, value),
            (spec, _) => return Err(Error::Config(format!("energy `{spec}` has no numeric parameter `{name}`"))),
        }
        Ok(())
    }
}

impl fmt::Display for EnergySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnergySpec::Quadratic { n: None } => write!(f, "quadratic"),
            EnergySpec::Quadratic { n: Some(n) } => write!(f, "quadratic({n})"),
            EnergySpec::Power { p } => write!(f, "power({p})"),
            EnergySpec::Dirichlet1d { n } => write!(f, "dirichlet1d({n})"),
            EnergySpec::Dirichlet2d { n } => write!(f, "dirichlet2d({n})"),
            EnergySpec::Semilinear { n, well } => write!(
                f,
                "semilinear({n}, well={})",
                match well {
                    WellSpec::Double => "double",
                    WellSpec::Harmonic => "harmonic",
                }
            ),
            EnergySpec::Tv1d { n } => write!(f, "tv1d({n})"),
            EnergySpec::Constrained { inner, lo, hi } => write!(f, "constrained({inner}, box=[{lo},{hi}])"),
        }
    }
}

/// `name(arg, arg, ...)` split at top-level commas.
struct Call<'a> {
    name: &'a str,
    args: Vec<&'a str>,
}

fn split_call(text: &str) -> Result<Call<'_>> {
    let text = text.trim();
    let Some(open) = text.find('(') else {
        if text.is_empty() || !text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::Parse(format!("expected a name, got `{text}`")));
        }
        return Ok(Call { name: text, args: vec![] });
    };
    if !text.ends_with(')') {
        return Err(Error::Parse(format!("missing closing parenthesis in `{text}`")));
    }
    let name = text[..open].trim();
    let inner = &text[open + 1..text.len() - 1];
    let mut args = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced brackets in `{text}`")));
                }
            }
            ',' if depth == 0 => {
                args.push(inner[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced brackets in `{text}`")));
    }
    if !inner.trim().is_empty() {
        args.push(inner[start..].trim());
    }
    if args.iter().any(|a| a.is_empty()) {
        return Err(Error::Parse(format!("empty argument in `{text}`")));
    }
    Ok(Call { name, args })
}

fn number(text: &str, what: &str) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{what}: `{text}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("{what}: `{text}` is not finite")));
    }
    Ok(v)
}

fn count(text: &str, what: &str) -> Result<usize> {
    text.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{what}: `{text}` is not a node count")))
}

fn expect_args(call: &Call, n: usize) -> Result<()> {
    if call.args.len() != n {
        return Err(Error::Parse(format!(
            "`{}` takes {n} argument(s), got {}",
            call.name,
            call.args.len()
        )));
    }
    Ok(())
}

fn keyword<'a>(arg: &'a str, key: &str) -> Option<&'a str> {
    let (k, v) = arg.split_once('=')?;
    (k.trim() == key).then(|| v.trim())
}

impl FromStr for EnergySpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let call = split_call(text)?;
        let spec = match call.name {
            "quadratic" => match call.args.len() {
                0 => EnergySpec::Quadratic { n: None },
                _ => {
                    expect_args(&call, 1)?;
                    EnergySpec::Quadratic {
                        n: Some(count(call.args[0], "quadratic")?),
                    }
                }
            },
            "power" => {
                expect_args(&call, 1)?;
                EnergySpec::Power {
                    p: number(call.args[0], "power")?,
                }
            }
            "dirichlet1d" | "dirichlet2d" | "tv1d" => {
                expect_args(&call, 1)?;
                let n = count(call.args[0], call.name)?;
                match call.name {
                    "dirichlet1d" => EnergySpec::Dirichlet1d { n },
                    "dirichlet2d" => EnergySpec::Dirichlet2d { n },
                    _ => EnergySpec::Tv1d { n },
                }
            }
            "semilinear" => {
                if call.args.is_empty() || call.args.len() > 2 {
                    return Err(Error::Parse("`semilinear` takes (n) or (n, well=...)".into()));
                }
                let n = count(call.args[0], "semilinear")?;
                let well = match call.args.get(1) {
                    None => WellSpec::Double,
                    Some(arg) => match keyword(arg, "well") {
                        Some("double") => WellSpec::Double,
                        Some("harmonic") => WellSpec::Harmonic,
                        Some(other) => {
                            return Err(Error::Parse(format!("unknown well `{other}` (expected double or harmonic)")))
                        }
                        None => return Err(Error::Parse(format!("expected `well=...`, got `{arg}`"))),
                    },
                };
                EnergySpec::Semilinear { n, well }
            }
            "constrained" => {
                expect_args(&call, 2)?;
                let inner: EnergySpec = call.args[0].parse()?;
                if matches!(inner, EnergySpec::Constrained { .. }) {
                    return Err(Error::Parse("nested `constrained` is not supported".into()));
                }
                let bounds = keyword(call.args[1], "box")
                    .and_then(|b| b.strip_prefix('[')?.strip_suffix(']'))
                    .ok_or_else(|| Error::Parse(format!("expected `box=[lo,hi]`, got `{}`", call.args[1])))?;
                let (lo, hi) = bounds
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("expected two bounds, got `[{bounds}]`")))?;
                let (lo, hi) = (number(lo, "box")?, number(hi, "box")?);
                if lo > hi {
                    return Err(Error::Parse(format!("empty box [{lo},{hi}]")));
                }
                EnergySpec::Constrained {
                    inner: Box::new(inner),
                    lo,
                    hi,
                }
            }
            other => return Err(Error::Parse(format!("unknown energy `{other}`"))),
        };
        match &spec {
            EnergySpec::Power { p } if !(*p > 1.0) => Err(Error::Parse(format!("power(p) needs p > 1, got {p}"))),
            _ => {
                spec.grid()?;
                Ok(spec)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Constant(f64),
    Ramp { a: f64, b: f64 },
    Step { lo: f64, hi: f64, at: f64 },
    Sine(f64),
    Cosine(f64),
    Random { lo: f64, hi: f64 },
}

impl InitialSpec {
    /// Samples the initial datum on `grid`; `seed` feeds `random`.
    pub fn generate(&self, grid: Grid, seed: u64) -> Result<GridFunction> {
        use std::f64::consts::PI;
        match *self {
            InitialSpec::Constant(c) => Ok(GridFunction::constant(grid, c)),
            InitialSpec::Ramp { a, b } => GridFunction::sample(grid, |x, _| a + (b - a) * x),
            InitialSpec::Step { lo, hi, at } => GridFunction::sample(grid, |x, _| if x < at { lo } else { hi }),
            InitialSpec::Sine(k) => GridFunction::sample(grid, |x, _| (k * PI * x).sin()),
            InitialSpec::Cosine(k) => GridFunction::sample(grid, |x, _| (k * PI * x).cos()),
            InitialSpec::Random { lo, hi } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                GridFunction::new(grid, (0..grid.len()).map(|_| rng.gen_range(lo..=hi)).collect())
            }
        }
    }
}

impl fmt::Display for InitialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialSpec::Constant(c) => write!(f, "constant({c})"),
            InitialSpec::Ramp { a, b } => write!(f, "ramp({a},{b})"),
            InitialSpec::Step { lo, hi, at } => write!(f, "step({lo},{hi},{at})"),
            InitialSpec::Sine(k) => write!(f, "sine({k})"),
            InitialSpec::Cosine(k) => write!(f, "cosine({k})"),
            InitialSpec::Random { lo, hi } => write!(f, "random({lo},{hi})"),
        }
    }
}

impl FromStr for InitialSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let call = split_call(text)?;
        let args: Vec<f64> = call
            .args
            .iter()
            .map(|a| number(a, call.name))
            .collect::<Result<_>>()?;
        let arity = |allowed: &[usize]| -> Result<()> {
            if allowed.contains(&args.len()) {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "`{}` takes {allowed:?} argument(s), got {}",
                    call.name,
                    args.len()
                )))
            }
        };
        Ok(match call.name {
            "constant" => {
                arity(&[1])?;
                InitialSpec::Constant(args[0])
            }
            "ramp" => {
                arity(&[0, 2])?;
                match args[..] {
                    [a, b] => InitialSpec::Ramp { a, b },
                    _ => InitialSpec::Ramp { a: 0.0, b: 1.0 },
                }
            }
            "step" => {
                arity(&[0, 3])?;
                match args[..] {
                    [lo, hi, at] => InitialSpec::Step { lo, hi, at },
                    _ => InitialSpec::Step {
                        lo: 0.0,
                        hi: 1.0,
                        at: 0.5,
                    },
                }
            }
            "sine" | "cosine" => {
                arity(&[0, 1])?;
                let k = args.first().copied().unwrap_or(1.0);
                if call.name == "sine" {
                    InitialSpec::Sine(k)
                } else {
                    InitialSpec::Cosine(k)
                }
            }
            "random" => {
                arity(&[0, 2])?;
                let (lo, hi) = match args[..] {
                    [lo, hi] => (lo, hi),
                    _ => (-1.0, 1.0),
                };
                if lo > hi {
                    return Err(Error::Parse(format!("random({lo},{hi}) has lo > hi")));
                }
                InitialSpec::Random { lo, hi }
            }
            other => return Err(Error::Parse(format!("unknown initial datum `{other}`"))),
        })
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                text.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(EnergySpec);
string_serde!(InitialSpec);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in [
            "quadratic",
            "quadratic(9)",
            "power(4)",
            "power(2.5)",
            "dirichlet1d(65)",
            "dirichlet2d(17)",
            "semilinear(33, well=double)",
            "semilinear(33, well=harmonic)",
            "tv1d(64)",
            "constrained(dirichlet1d(65), box=[0,1])",
            "constrained(semilinear(9, well=double), box=[-0.5,1.5])",
        ] {
            let spec: EnergySpec = name.parse().unwrap();
            assert_eq!(spec.to_string(), name);
            let e = spec.build().unwrap();
            assert_eq!(e.space().grid(), spec.grid().unwrap());
        }
        let spec: EnergySpec = " semilinear( 17 ) ".parse().unwrap();
        assert_eq!(spec.to_string(), "semilinear(17, well=double)");
    }

    #[test]
    fn bad_names() {
        for name in [
            "",
            "cubic",
            "power(1)",
            "power(x)",
            "dirichlet1d(1)",
            "dirichlet1d(65",
            "tv1d(4, 5)",
            "semilinear(9, well=triple)",
            "constrained(quadratic, box=[1,0])",
            "constrained(quadratic, [0,1])",
            "constrained(constrained(quadratic, box=[0,1]), box=[0,1])",
        ] {
            assert!(name.parse::<EnergySpec>().is_err(), "{name}");
        }
    }

    #[test]
    fn initial_data() {
        let g = Grid::Line(5);
        let u = "ramp".parse::<InitialSpec>().unwrap().generate(g, 0).unwrap();
        assert_eq!(u.values(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let s = "step".parse::<InitialSpec>().unwrap().generate(g, 0).unwrap();
        assert_eq!(s.values(), &[0.0, 0.0, 1.0, 1.0, 1.0]);
        let r: InitialSpec = "random(-2, 3)".parse().unwrap();
        let a = r.generate(g, 7).unwrap();
        assert_eq!(a, r.generate(g, 7).unwrap());
        assert_ne!(a, r.generate(g, 8).unwrap());
        assert!(a.values().iter().all(|x| (-2.0..=3.0).contains(x)));
        for name in ["constant(1.5)", "ramp(1,2)", "step(0,1,0.5)", "sine(2)", "cosine(1)", "random(-1,1)"] {
            assert_eq!(name.parse::<InitialSpec>().unwrap().to_string(), name);
        }
        assert!("constant".parse::<InitialSpec>().is_err());
        assert!("random(1,0)".parse::<InitialSpec>().is_err());
    }

    #[test]
    fn sweep_parameters() {
        let mut spec: EnergySpec = "constrained(dirichlet1d(9), box=[0,1])".parse().unwrap();
        spec.set_param("n", 17.0).unwrap();
        assert_eq!(spec.to_string(), "constrained(dirichlet1d(17), box=[0,1])");
        assert!(spec.set_param("p", 3.0).is_err());
        assert!(spec.set_param("n", 2.5).is_err());
    }
}
